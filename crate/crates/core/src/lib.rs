// NaN must fail these checks, hence `!(x > 0.0)` rather than `x <= 0.0`.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod domain;
pub mod expr;
pub mod io;
pub mod model;
pub mod planner;
pub mod scalar;
pub mod sim;

/// Scalar the non-generic parts of the crate (levels, oracle, planner
/// bookkeeping) work in.
pub type Real = f64;
pub type Problem = model::HybridProblem<Real>;
pub type ModelState = model::State<Real>;
pub type Domain = domain::DomainProblem<Real>;
pub type NumExpr = expr::NumExpr<Real>;
pub type BoolExpr = expr::BoolExpr<Real>;
