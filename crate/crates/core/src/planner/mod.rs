//! Breadth-first search over the uniformly discretized model, plus the
//! single-shot / no-blocks / default-action cascade.

mod cascade;
mod plan;
mod search;

use std::fmt;
use std::str::FromStr;
use std::time::Duration;

use thiserror::Error;

use crate::domain::DomainError;
use crate::model::ModelError;

pub use cascade::{cascade, cascade_until, default_release_tick, CascadeConfig, ShotDecision, StageAttempt};
pub use plan::{replay_to_goal, Plan, PlanStep};
pub use search::{quantize, solve, SearchOutcome, SearchStats, StateKey, Unsolved};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PlanError {
    #[error("search dt {config} does not match problem dt {problem}")]
    DtMismatch { config: f64, problem: f64 },
    #[error("invalid search configuration: {0}")]
    InvalidConfig(String),
    #[error("no birds left to shoot")]
    NoBirds,
    #[error("plan does not reach the goal: {0}")]
    InvalidPlan(String),
    #[error("plan file line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Domain(#[from] DomainError),
}

/// Which problem a shot was planned against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum StageTag {
    Full,
    SingleShot,
    SingleShotNoBlocks,
    DefaultAction,
}

impl StageTag {
    pub const ALL: [StageTag; 4] = [
        StageTag::Full,
        StageTag::SingleShot,
        StageTag::SingleShotNoBlocks,
        StageTag::DefaultAction,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            StageTag::Full => "full",
            StageTag::SingleShot => "single-shot",
            StageTag::SingleShotNoBlocks => "single-shot-no-blocks",
            StageTag::DefaultAction => "default-action",
        }
    }
}

impl fmt::Display for StageTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for StageTag {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        StageTag::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| format!("unknown stage tag `{s}`"))
    }
}

/// Snapping resolution per unit class for duplicate detection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grids {
    pub position: f64,
    pub velocity: f64,
    /// Finer than one tick of aiming, so distinct release ticks never merge.
    pub angle: f64,
}

impl Default for Grids {
    fn default() -> Self {
        Grids {
            position: 0.1,
            velocity: 0.1,
            angle: 0.25,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchConfig {
    pub dt: f64,
    pub horizon: u64,
    pub timeout: Duration,
    pub grids: Grids,
    /// Simulate action-free stretches in one go instead of tick by tick
    /// through the frontier. Same plans either way.
    pub macro_steps: bool,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            dt: 0.05,
            horizon: 1200,
            timeout: Duration::from_secs(30),
            grids: Grids::default(),
            macro_steps: true,
        }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<(), PlanError> {
        let g = &self.grids;
        for (name, v) in [("position", g.position), ("velocity", g.velocity), ("angle", g.angle)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(PlanError::InvalidConfig(format!("{name} grid must be positive, got {v}")));
            }
        }
        if self.timeout.is_zero() {
            return Err(PlanError::InvalidConfig("timeout must be positive".into()));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(PlanError::InvalidConfig(format!("dt must be positive, got {}", self.dt)));
        }
        if self.horizon == 0 {
            return Err(PlanError::InvalidConfig("horizon must be at least one tick".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests;
