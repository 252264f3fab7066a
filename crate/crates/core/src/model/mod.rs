//! Hybrid-automaton intermediate representation and its uniform
//! discretization: instantaneous actions, must-fire events applied to a
//! fixpoint, and continuous processes advanced by explicit Euler steps.

pub mod defs;
pub mod problem;
pub mod schema;
pub mod state;
pub mod step;
pub mod trace;

use thiserror::Error;

use crate::expr::ExprError;

pub use defs::{lifted_name, ActionDef, Assignment, EventDef, ProcessDef};
pub use problem::{Decision, HybridProblem, ProblemParts};
pub use schema::{FluentDecl, FluentKind, FluentSchema, Unit, UnitClass};
pub use state::State;
pub use step::{advance, applicable_actions, apply_action, fire_events, fire_events_indexed, tick, tick_logged, CASCADE_CAP};
pub use trace::{changed_fluents, TickLog};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("while evaluating {context}: {source}")]
    Eval { context: String, source: ExprError },
    #[error("event cascade divergence: more than {cap} firings, last fired {tail:?}")]
    CascadeDivergence { cap: usize, tail: Vec<String> },
    #[error("fluent `{fluent}` has concurrent flows from `{first}` and `{second}`")]
    DuplicateFlow { fluent: String, first: String, second: String },
    #[error("inapplicable action `{0}`")]
    InapplicableAction(String),
    #[error("unknown action `{0}`")]
    UnknownAction(String),
    #[error("event `{0}` does not falsify its own precondition")]
    SelfRetriggering(String),
    #[error("duplicate fluent `{0}`")]
    DuplicateFluent(String),
    #[error("unknown fluent `{0}`")]
    UnknownFluent(String),
    #[error("fluent `{0}` has the wrong kind")]
    KindMismatch(String),
    #[error("invalid problem: {0}")]
    InvalidProblem(String),
}

#[cfg(test)]
mod tests;
