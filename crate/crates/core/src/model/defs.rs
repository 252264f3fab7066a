use std::collections::HashMap;

use crate::expr::{ArithOp, BoolExpr, BoolFluent, CmpOp, NumExpr, NumFluent, Value};
use crate::model::state::State;
use crate::model::ModelError;
use crate::scalar::Scalar;

/// One effect: `target <- value`, with the value read from the state before
/// any effect of the same happening is applied.
#[derive(Debug, Clone, PartialEq)]
pub enum Assignment<T = f64> {
    Num(NumFluent, NumExpr<T>),
    Bool(BoolFluent, BoolExpr<T>),
}

impl<T: Scalar> Assignment<T> {
    pub fn num(target: &NumFluent, value: NumExpr<T>) -> Self {
        Assignment::Num(target.clone(), value)
    }

    pub fn boolean(target: &BoolFluent, value: bool) -> Self {
        Assignment::Bool(target.clone(), BoolExpr::Lit(value))
    }

    pub fn target_name(&self) -> &str {
        match self {
            Assignment::Num(f, _) => &f.name,
            Assignment::Bool(f, _) => &f.name,
        }
    }
}

/// Applies `effects` with simultaneous-assignment semantics.
pub(crate) fn apply_effects<T: Scalar>(
    state: &mut State<T>,
    effects: &[Assignment<T>],
    context: &str,
) -> Result<(), ModelError> {
    let eval_err = |source| ModelError::Eval {
        context: context.to_string(),
        source,
    };
    let mut values = Vec::with_capacity(effects.len());
    for eff in effects {
        values.push(match eff {
            Assignment::Num(_, e) => Value::Num(e.eval(state).map_err(eval_err)?),
            Assignment::Bool(_, e) => Value::Bool(e.eval(state).map_err(eval_err)?),
        });
    }
    for (eff, v) in effects.iter().zip(values) {
        match (eff, v) {
            (Assignment::Num(f, _), Value::Num(x)) => state.set_num_slot(f.slot, x),
            (Assignment::Bool(f, _), Value::Bool(b)) => state.set_bool_slot(f.slot, b),
            _ => unreachable!("assignment kinds are fixed at construction"),
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct ActionDef<T = f64> {
    pub name: String,
    pub precondition: BoolExpr<T>,
    pub effects: Vec<Assignment<T>>,
}

impl<T: Scalar> ActionDef<T> {
    pub fn new(name: impl Into<String>, precondition: BoolExpr<T>, effects: Vec<Assignment<T>>) -> Self {
        ActionDef {
            name: name.into(),
            precondition,
            effects,
        }
    }

    pub fn is_applicable(&self, state: &State<T>) -> Result<bool, ModelError> {
        self.precondition.eval(state).map_err(|source| ModelError::Eval {
            context: self.name.clone(),
            source,
        })
    }
}

/// Must-fire instantaneous happening.
#[derive(Debug, Clone, PartialEq)]
pub struct EventDef<T = f64> {
    pub name: String,
    /// Position in the problem's event list; fixed when the problem is built.
    pub index: usize,
    pub precondition: BoolExpr<T>,
    pub effects: Vec<Assignment<T>>,
}

impl<T: Scalar> EventDef<T> {
    /// Builds an event, rejecting it unless some conjunct of the
    /// precondition is provably false after the event's own effects.
    pub fn new(
        name: impl Into<String>,
        precondition: BoolExpr<T>,
        effects: Vec<Assignment<T>>,
    ) -> Result<Self, ModelError> {
        let name = name.into();
        if !self_falsifying(&precondition, &effects) {
            return Err(ModelError::SelfRetriggering(name));
        }
        Ok(EventDef {
            name,
            index: 0,
            precondition,
            effects,
        })
    }

    /// Grounded names are `lifted[args]`; this returns the lifted part.
    pub fn lifted_name(&self) -> &str {
        lifted_name(&self.name)
    }

    pub(crate) fn apply(&self, state: &mut State<T>) -> Result<(), ModelError> {
        apply_effects(state, &self.effects, &self.name)
    }
}

/// `name[args]` to `name`.
pub fn lifted_name(grounded: &str) -> &str {
    grounded.split('[').next().unwrap_or(grounded)
}

/// Static guard analysis. Recognized guards, per precondition conjunct:
/// the conjunct folds to false once every constant-valued effect is
/// substituted (covers flag guards and assignments such as `y <- 1` against
/// `y <= 0`); or the conjunct is `f = e` where the effects step `f` by a
/// nonzero constant and leave `e` untouched.
fn self_falsifying<T: Scalar>(pre: &BoolExpr<T>, effects: &[Assignment<T>]) -> bool {
    let no_num = |_: &NumFluent| None;
    let no_bool = |_: &BoolFluent| None;
    let mut num_consts: HashMap<usize, T> = HashMap::new();
    let mut bool_consts: HashMap<usize, bool> = HashMap::new();
    let mut assigned_nums: Vec<usize> = Vec::new();
    let mut steps: HashMap<usize, T> = HashMap::new();
    for eff in effects {
        match eff {
            Assignment::Num(f, e) => {
                assigned_nums.push(f.slot);
                if let Some(v) = e.partial_eval(&no_num) {
                    num_consts.insert(f.slot, v);
                } else if let Some(k) = constant_step(f, e) {
                    steps.insert(f.slot, k);
                }
            }
            Assignment::Bool(f, e) => {
                if let Some(v) = e.partial_eval(&no_num, &no_bool) {
                    bool_consts.insert(f.slot, v);
                }
            }
        }
    }
    let known_num = |f: &NumFluent| num_consts.get(&f.slot).copied();
    let known_bool = |f: &BoolFluent| bool_consts.get(&f.slot).copied();
    pre.conjuncts().into_iter().any(|c| {
        if c.partial_eval(&known_num, &known_bool) == Some(false) {
            return true;
        }
        let BoolExpr::Cmp(CmpOp::Eq, a, b) = c else {
            return false;
        };
        let counter_guard = |side: &NumExpr<T>, other: &NumExpr<T>| {
            let NumExpr::Fluent(f) = side else { return false };
            if !steps.contains_key(&f.slot) {
                return false;
            }
            let mut touches = false;
            other.visit_fluents(&mut |g| touches |= assigned_nums.contains(&g.slot));
            !touches
        };
        counter_guard(a, b) || counter_guard(b, a)
    })
}

/// `f + k`, `k + f` or `f - k` with constant nonzero `k`.
fn constant_step<T: Scalar>(f: &NumFluent, e: &NumExpr<T>) -> Option<T> {
    let no_num = |_: &NumFluent| None;
    let is_f = |x: &NumExpr<T>| matches!(x, NumExpr::Fluent(g) if g.slot == f.slot);
    let k = match e {
        NumExpr::Bin(ArithOp::Add, a, b) if is_f(a) => b.partial_eval(&no_num)?,
        NumExpr::Bin(ArithOp::Add, a, b) if is_f(b) => a.partial_eval(&no_num)?,
        NumExpr::Bin(ArithOp::Sub, a, b) if is_f(a) => -b.partial_eval(&no_num)?,
        _ => return None,
    };
    (k != T::zero()).then_some(k)
}

/// Continuous flow: while `condition` holds, each fluent in `rates` changes
/// with the given derivative.
#[derive(Debug, Clone, PartialEq)]
pub struct ProcessDef<T = f64> {
    pub name: String,
    pub condition: BoolExpr<T>,
    pub rates: Vec<(NumFluent, NumExpr<T>)>,
}

impl<T: Scalar> ProcessDef<T> {
    pub fn new(name: impl Into<String>, condition: BoolExpr<T>, rates: Vec<(NumFluent, NumExpr<T>)>) -> Self {
        ProcessDef {
            name: name.into(),
            condition,
            rates,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::schema::{FluentSchema, Unit};

    fn schema() -> (FluentSchema, NumFluent, NumFluent, BoolFluent) {
        let mut s = FluentSchema::new();
        let y = s.declare_num("y", Unit::Meters).unwrap();
        let n = s.declare_num("n", Unit::Count).unwrap();
        let done = s.declare_bool("done").unwrap();
        (s, y, n, done)
    }

    #[test]
    fn constant_assignment_guard_is_accepted() {
        let (_, y, _, _) = schema();
        let pre = NumExpr::fluent(&y).le(NumExpr::lit(0.0));
        let ev = EventDef::new("bounce", pre, vec![Assignment::num(&y, NumExpr::lit(1.0))]);
        assert!(ev.is_ok());
    }

    #[test]
    fn flag_guard_is_accepted() {
        let (_, y, _, done) = schema();
        let pre = BoolExpr::and(vec![
            NumExpr::fluent(&y).gt(NumExpr::lit(3.0)),
            BoolExpr::fluent(&done).not(),
        ]);
        let eff = vec![
            Assignment::boolean(&done, true),
            Assignment::num(&y, NumExpr::fluent(&y) * NumExpr::lit(2.0)),
        ];
        assert!(EventDef::new("e", pre, eff).is_ok());
    }

    #[test]
    fn counter_guard_is_accepted() {
        let (_, _, n, _) = schema();
        let pre = NumExpr::fluent(&n).equals(NumExpr::lit(2.0));
        let eff = vec![Assignment::num(&n, NumExpr::fluent(&n) + NumExpr::lit(1.0))];
        assert!(EventDef::new("step", pre, eff).is_ok());
    }

    #[test]
    fn non_falsifying_event_is_rejected() {
        let (_, y, _, done) = schema();
        // effects leave the precondition true
        let pre = NumExpr::fluent(&y).gt(NumExpr::lit(0.0));
        let eff = vec![Assignment::boolean(&done, true)];
        assert_eq!(
            EventDef::new("loop", pre, eff),
            Err(ModelError::SelfRetriggering("loop".into()))
        );
        // numeric update whose outcome is unknown statically
        let pre = NumExpr::fluent(&y).gt(NumExpr::lit(0.0));
        let eff = vec![Assignment::num(&y, NumExpr::fluent(&y) * NumExpr::lit(0.5))];
        assert!(EventDef::new("halve", pre, eff).is_err());
    }

    #[test]
    fn lifted_names() {
        assert_eq!(lifted_name("collision_ground[b0]"), "collision_ground");
        assert_eq!(lifted_name("plain"), "plain");
    }
}
