//! Side-effect-free expression language for preconditions, effects and goals.
//!
//! Numeric and boolean expressions are separate types, so a comparison over
//! booleans or a conjunction over numbers cannot be built. The untyped
//! [`Expr`] wrapper re-checks kinds at construction for callers that assemble
//! trees dynamically.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::Arc;

use thiserror::Error;

use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExprError {
    #[error("unknown fluent `{0}`")]
    UnknownFluent(String),
    #[error("division by zero in `{0}`")]
    DivisionByZero(String),
    #[error("{function} argument {arg} outside its domain {domain}")]
    Domain {
        function: &'static str,
        arg: f64,
        domain: &'static str,
    },
    #[error("type error: {0}")]
    Type(String),
}

/// Reference to a numeric fluent: its slot in the state plus the grounded
/// name used in diagnostics.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct NumFluent {
    pub slot: usize,
    pub name: Arc<str>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BoolFluent {
    pub slot: usize,
    pub name: Arc<str>,
}

/// Read access to fluent values. Implemented by the model's `State`.
pub trait Valuation<T> {
    fn num(&self, slot: usize) -> Option<T>;
    fn boolean(&self, slot: usize) -> Option<bool>;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CmpOp {
    Lt,
    Le,
    Eq,
    Ge,
    Gt,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Intrinsic {
    /// Bhaskara sine, argument in degrees.
    ApproxSin,
    /// Small-angle cosine, argument in radians.
    ApproxCos,
    Sqrt,
}

#[derive(Debug, Clone, PartialEq)]
pub enum NumExpr<T = f64> {
    Lit(T),
    Fluent(NumFluent),
    Neg(Box<NumExpr<T>>),
    Bin(ArithOp, Box<NumExpr<T>>, Box<NumExpr<T>>),
    Call(Intrinsic, Box<NumExpr<T>>),
}

#[derive(Debug, Clone, PartialEq)]
pub enum BoolExpr<T = f64> {
    Lit(bool),
    Fluent(BoolFluent),
    Cmp(CmpOp, Box<NumExpr<T>>, Box<NumExpr<T>>),
    And(Vec<BoolExpr<T>>),
    Or(Vec<BoolExpr<T>>),
    Not(Box<BoolExpr<T>>),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Value<T = f64> {
    Num(T),
    Bool(bool),
}

impl<T: Scalar> Value<T> {
    pub fn as_num(self) -> Option<T> {
        match self {
            Value::Num(v) => Some(v),
            Value::Bool(_) => None,
        }
    }

    pub fn as_bool(self) -> Option<bool> {
        match self {
            Value::Bool(b) => Some(b),
            Value::Num(_) => None,
        }
    }

    /// Equality on bit patterns, so that `NaN == NaN` and `0.0 != -0.0`.
    pub fn bit_eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Value::Num(a), Value::Num(b)) => a.to_f64().map(f64::to_bits) == b.to_f64().map(f64::to_bits),
            (Value::Bool(a), Value::Bool(b)) => a == b,
            _ => false,
        }
    }
}

impl<T: fmt::Display> fmt::Display for Value<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Num(v) => write!(f, "{v}"),
            Value::Bool(b) => write!(f, "{b}"),
        }
    }
}

/// Bhaskara's rational approximation of the sine of an angle in degrees.
pub fn approx_sin<T: Scalar>(theta_deg: T) -> Result<T, ExprError> {
    let half_turn = T::lit(180.0);
    if !(theta_deg >= T::zero() && theta_deg <= half_turn) {
        return Err(ExprError::Domain {
            function: "approx_sin",
            arg: theta_deg.as_f64(),
            domain: "[0, 180] degrees",
        });
    }
    let p = theta_deg * (half_turn - theta_deg);
    Ok(T::lit(4.0) * p / (T::lit(40500.0) - p))
}

/// Small-angle approximation of the cosine of an angle in radians.
pub fn approx_cos<T: Scalar>(theta_rad: T) -> Result<T, ExprError> {
    if !(theta_rad.abs() <= T::FRAC_PI_2()) {
        return Err(ExprError::Domain {
            function: "approx_cos",
            arg: theta_rad.as_f64(),
            domain: "[-pi/2, pi/2] radians",
        });
    }
    Ok(T::one() - theta_rad * theta_rad / T::lit(2.0))
}

impl Intrinsic {
    fn name(self) -> &'static str {
        match self {
            Intrinsic::ApproxSin => "approx_sin",
            Intrinsic::ApproxCos => "approx_cos",
            Intrinsic::Sqrt => "sqrt",
        }
    }

    fn apply<T: Scalar>(self, arg: T) -> Result<T, ExprError> {
        match self {
            Intrinsic::ApproxSin => approx_sin(arg),
            Intrinsic::ApproxCos => approx_cos(arg),
            Intrinsic::Sqrt if arg >= T::zero() => Ok(arg.sqrt()),
            Intrinsic::Sqrt => Err(ExprError::Domain {
                function: "sqrt",
                arg: arg.as_f64(),
                domain: "[0, inf)",
            }),
        }
    }
}

impl ArithOp {
    fn symbol(self) -> &'static str {
        match self {
            ArithOp::Add => "+",
            ArithOp::Sub => "-",
            ArithOp::Mul => "*",
            ArithOp::Div => "/",
        }
    }
}

impl CmpOp {
    fn symbol(self) -> &'static str {
        match self {
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Eq => "=",
            CmpOp::Ge => ">=",
            CmpOp::Gt => ">",
        }
    }

    pub fn holds<T: PartialOrd>(self, a: T, b: T) -> bool {
        match self {
            CmpOp::Lt => a < b,
            CmpOp::Le => a <= b,
            CmpOp::Eq => a == b,
            CmpOp::Ge => a >= b,
            CmpOp::Gt => a > b,
        }
    }
}

impl<T: Scalar> NumExpr<T> {
    pub fn lit(v: T) -> Self {
        NumExpr::Lit(v)
    }

    pub fn fluent(f: &NumFluent) -> Self {
        NumExpr::Fluent(f.clone())
    }

    pub fn call(f: Intrinsic, arg: NumExpr<T>) -> Self {
        NumExpr::Call(f, Box::new(arg))
    }

    pub fn approx_sin(self) -> Self {
        Self::call(Intrinsic::ApproxSin, self)
    }

    pub fn approx_cos(self) -> Self {
        Self::call(Intrinsic::ApproxCos, self)
    }

    pub fn sqrt(self) -> Self {
        Self::call(Intrinsic::Sqrt, self)
    }

    pub fn square(self) -> Self {
        self.clone() * self
    }

    pub fn lt(self, rhs: Self) -> BoolExpr<T> {
        BoolExpr::cmp(CmpOp::Lt, self, rhs)
    }

    pub fn le(self, rhs: Self) -> BoolExpr<T> {
        BoolExpr::cmp(CmpOp::Le, self, rhs)
    }

    pub fn equals(self, rhs: Self) -> BoolExpr<T> {
        BoolExpr::cmp(CmpOp::Eq, self, rhs)
    }

    pub fn ge(self, rhs: Self) -> BoolExpr<T> {
        BoolExpr::cmp(CmpOp::Ge, self, rhs)
    }

    pub fn gt(self, rhs: Self) -> BoolExpr<T> {
        BoolExpr::cmp(CmpOp::Gt, self, rhs)
    }

    pub fn eval(&self, s: &impl Valuation<T>) -> Result<T, ExprError> {
        match self {
            NumExpr::Lit(v) => Ok(*v),
            NumExpr::Fluent(f) => s
                .num(f.slot)
                .ok_or_else(|| ExprError::UnknownFluent(f.name.to_string())),
            NumExpr::Neg(e) => Ok(-e.eval(s)?),
            NumExpr::Bin(op, a, b) => {
                let (a, b) = (a.eval(s)?, b.eval(s)?);
                match op {
                    ArithOp::Add => Ok(a + b),
                    ArithOp::Sub => Ok(a - b),
                    ArithOp::Mul => Ok(a * b),
                    ArithOp::Div if b == T::zero() => Err(ExprError::DivisionByZero(self.to_string())),
                    ArithOp::Div => Ok(a / b),
                }
            }
            NumExpr::Call(f, arg) => f.apply(arg.eval(s)?),
        }
    }

    /// Evaluates with only some fluents known. `None` when the result
    /// depends on an unknown fluent or evaluation fails.
    pub fn partial_eval(&self, known: &dyn Fn(&NumFluent) -> Option<T>) -> Option<T> {
        match self {
            NumExpr::Lit(v) => Some(*v),
            NumExpr::Fluent(f) => known(f),
            NumExpr::Neg(e) => e.partial_eval(known).map(|v| -v),
            NumExpr::Bin(op, a, b) => {
                let (a, b) = (a.partial_eval(known)?, b.partial_eval(known)?);
                match op {
                    ArithOp::Add => Some(a + b),
                    ArithOp::Sub => Some(a - b),
                    ArithOp::Mul => Some(a * b),
                    ArithOp::Div if b == T::zero() => None,
                    ArithOp::Div => Some(a / b),
                }
            }
            NumExpr::Call(f, arg) => f.apply(arg.partial_eval(known)?).ok(),
        }
    }

    pub fn visit_fluents(&self, on_num: &mut dyn FnMut(&NumFluent)) {
        match self {
            NumExpr::Lit(_) => {}
            NumExpr::Fluent(f) => on_num(f),
            NumExpr::Neg(e) | NumExpr::Call(_, e) => e.visit_fluents(on_num),
            NumExpr::Bin(_, a, b) => {
                a.visit_fluents(on_num);
                b.visit_fluents(on_num);
            }
        }
    }
}

impl<T: Scalar> BoolExpr<T> {
    pub fn cmp(op: CmpOp, a: NumExpr<T>, b: NumExpr<T>) -> Self {
        BoolExpr::Cmp(op, Box::new(a), Box::new(b))
    }

    pub fn fluent(f: &BoolFluent) -> Self {
        BoolExpr::Fluent(f.clone())
    }

    pub fn and(parts: Vec<BoolExpr<T>>) -> Self {
        BoolExpr::And(parts)
    }

    pub fn or(parts: Vec<BoolExpr<T>>) -> Self {
        BoolExpr::Or(parts)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(self) -> Self {
        BoolExpr::Not(Box::new(self))
    }

    pub fn eval(&self, s: &impl Valuation<T>) -> Result<bool, ExprError> {
        match self {
            BoolExpr::Lit(b) => Ok(*b),
            BoolExpr::Fluent(f) => s
                .boolean(f.slot)
                .ok_or_else(|| ExprError::UnknownFluent(f.name.to_string())),
            BoolExpr::Cmp(op, a, b) => Ok(op.holds(a.eval(s)?, b.eval(s)?)),
            BoolExpr::And(parts) => {
                for p in parts {
                    if !p.eval(s)? {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            BoolExpr::Or(parts) => {
                for p in parts {
                    if p.eval(s)? {
                        return Ok(true);
                    }
                }
                Ok(false)
            }
            BoolExpr::Not(e) => Ok(!e.eval(s)?),
        }
    }

    /// Three-valued evaluation: `Some` when the value is forced by the
    /// known fluents alone.
    pub fn partial_eval(
        &self,
        known_num: &dyn Fn(&NumFluent) -> Option<T>,
        known_bool: &dyn Fn(&BoolFluent) -> Option<bool>,
    ) -> Option<bool> {
        match self {
            BoolExpr::Lit(b) => Some(*b),
            BoolExpr::Fluent(f) => known_bool(f),
            BoolExpr::Cmp(op, a, b) => Some(op.holds(a.partial_eval(known_num)?, b.partial_eval(known_num)?)),
            BoolExpr::And(parts) => {
                let mut all_known = true;
                for p in parts {
                    match p.partial_eval(known_num, known_bool) {
                        Some(false) => return Some(false),
                        Some(true) => {}
                        None => all_known = false,
                    }
                }
                all_known.then_some(true)
            }
            BoolExpr::Or(parts) => {
                let mut all_known = true;
                for p in parts {
                    match p.partial_eval(known_num, known_bool) {
                        Some(true) => return Some(true),
                        Some(false) => {}
                        None => all_known = false,
                    }
                }
                all_known.then_some(false)
            }
            BoolExpr::Not(e) => e.partial_eval(known_num, known_bool).map(|b| !b),
        }
    }

    /// Top-level conjuncts (a non-conjunction is its own single conjunct).
    pub fn conjuncts(&self) -> Vec<&BoolExpr<T>> {
        match self {
            BoolExpr::And(parts) => parts.iter().flat_map(|p| p.conjuncts()).collect(),
            other => vec![other],
        }
    }

    pub fn visit_fluents(&self, on_num: &mut dyn FnMut(&NumFluent), on_bool: &mut dyn FnMut(&BoolFluent)) {
        match self {
            BoolExpr::Lit(_) => {}
            BoolExpr::Fluent(f) => on_bool(f),
            BoolExpr::Cmp(_, a, b) => {
                a.visit_fluents(on_num);
                b.visit_fluents(on_num);
            }
            BoolExpr::And(parts) | BoolExpr::Or(parts) => {
                for p in parts {
                    p.visit_fluents(on_num, on_bool);
                }
            }
            BoolExpr::Not(e) => e.visit_fluents(on_num, on_bool),
        }
    }
}

/// Untyped expression, for callers that build trees without static kinds.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr<T = f64> {
    Num(NumExpr<T>),
    Bool(BoolExpr<T>),
}

impl<T: Scalar> Expr<T> {
    pub fn eval(&self, s: &impl Valuation<T>) -> Result<Value<T>, ExprError> {
        match self {
            Expr::Num(e) => e.eval(s).map(Value::Num),
            Expr::Bool(e) => e.eval(s).map(Value::Bool),
        }
    }

    fn into_num(self, ctx: &str) -> Result<NumExpr<T>, ExprError> {
        match self {
            Expr::Num(e) => Ok(e),
            Expr::Bool(e) => Err(ExprError::Type(format!("{ctx} expects a numeric operand, got `{e}`"))),
        }
    }

    fn into_bool(self, ctx: &str) -> Result<BoolExpr<T>, ExprError> {
        match self {
            Expr::Bool(e) => Ok(e),
            Expr::Num(e) => Err(ExprError::Type(format!("{ctx} expects a boolean operand, got `{e}`"))),
        }
    }

    pub fn arith(op: ArithOp, a: Expr<T>, b: Expr<T>) -> Result<Self, ExprError> {
        let ctx = op.symbol();
        Ok(Expr::Num(NumExpr::Bin(op, Box::new(a.into_num(ctx)?), Box::new(b.into_num(ctx)?))))
    }

    pub fn negate(a: Expr<T>) -> Result<Self, ExprError> {
        Ok(Expr::Num(NumExpr::Neg(Box::new(a.into_num("negation")?))))
    }

    pub fn intrinsic(f: Intrinsic, a: Expr<T>) -> Result<Self, ExprError> {
        Ok(Expr::Num(NumExpr::call(f, a.into_num(f.name())?)))
    }

    pub fn compare(op: CmpOp, a: Expr<T>, b: Expr<T>) -> Result<Self, ExprError> {
        let ctx = op.symbol();
        Ok(Expr::Bool(BoolExpr::cmp(op, a.into_num(ctx)?, b.into_num(ctx)?)))
    }

    pub fn and(parts: Vec<Expr<T>>) -> Result<Self, ExprError> {
        let parts = parts.into_iter().map(|p| p.into_bool("and")).collect::<Result<_, _>>()?;
        Ok(Expr::Bool(BoolExpr::And(parts)))
    }

    pub fn or(parts: Vec<Expr<T>>) -> Result<Self, ExprError> {
        let parts = parts.into_iter().map(|p| p.into_bool("or")).collect::<Result<_, _>>()?;
        Ok(Expr::Bool(BoolExpr::Or(parts)))
    }

    pub fn not(a: Expr<T>) -> Result<Self, ExprError> {
        Ok(Expr::Bool(a.into_bool("not")?.not()))
    }
}

impl<T: Scalar> From<NumExpr<T>> for Expr<T> {
    fn from(e: NumExpr<T>) -> Self {
        Expr::Num(e)
    }
}

impl<T: Scalar> From<BoolExpr<T>> for Expr<T> {
    fn from(e: BoolExpr<T>) -> Self {
        Expr::Bool(e)
    }
}

macro_rules! arith_impl {
    ($trait:ident, $method:ident, $op:expr) => {
        impl<T: Scalar> $trait for NumExpr<T> {
            type Output = NumExpr<T>;
            fn $method(self, rhs: NumExpr<T>) -> NumExpr<T> {
                NumExpr::Bin($op, Box::new(self), Box::new(rhs))
            }
        }
    };
}

arith_impl!(Add, add, ArithOp::Add);
arith_impl!(Sub, sub, ArithOp::Sub);
arith_impl!(Mul, mul, ArithOp::Mul);
arith_impl!(Div, div, ArithOp::Div);

impl<T: Scalar> Neg for NumExpr<T> {
    type Output = NumExpr<T>;
    fn neg(self) -> NumExpr<T> {
        NumExpr::Neg(Box::new(self))
    }
}

impl<T: fmt::Display> fmt::Display for NumExpr<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NumExpr::Lit(v) => write!(f, "{v}"),
            NumExpr::Fluent(fl) => write!(f, "{}", fl.name),
            NumExpr::Neg(e) => write!(f, "(- {e})"),
            NumExpr::Bin(op, a, b) => write!(f, "({} {a} {b})", op.symbol()),
            NumExpr::Call(func, a) => write!(f, "({} {a})", func.name()),
        }
    }
}

impl<T: fmt::Display> fmt::Display for BoolExpr<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoolExpr::Lit(b) => write!(f, "{b}"),
            BoolExpr::Fluent(fl) => write!(f, "{}", fl.name),
            BoolExpr::Cmp(op, a, b) => write!(f, "({} {a} {b})", op.symbol()),
            BoolExpr::And(parts) | BoolExpr::Or(parts) => {
                let head = if matches!(self, BoolExpr::And(_)) { "and" } else { "or" };
                write!(f, "({head}")?;
                for p in parts {
                    write!(f, " {p}")?;
                }
                write!(f, ")")
            }
            BoolExpr::Not(e) => write!(f, "(not {e})"),
        }
    }
}

impl<T: fmt::Display> fmt::Display for Expr<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(e) => e.fmt(f),
            Expr::Bool(e) => e.fmt(f),
        }
    }
}
