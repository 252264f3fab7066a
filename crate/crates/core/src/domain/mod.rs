//! Angry Birds levels and their translation into a hybrid planning problem:
//! the launch action, the aiming and flight processes, the collision event
//! catalogue, and the single-shot and no-blocks simplifications.

pub mod level;
pub mod physics;
pub mod translate;

use std::sync::Arc;

use thiserror::Error;

use crate::model::{HybridProblem, ModelError};
use crate::scalar::Scalar;

pub use level::{Bird, BirdKind, Block, Level, LevelError, Material, Physics, Pig, Platform, Point, UnknownMaterial};
pub use physics::{
    block_attributes, block_supports, circle_rect_overlap, elastic_bird_velocity, pig_supports, BlockAttributes,
    MaterialProps, MaterialTable, Vec2,
};
pub use translate::{BirdFluents, BlockFluents, DomainIndex, GlobalFluents, PigFluents, PlatformFluents};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DomainError {
    #[error("invalid level: {0}")]
    Level(#[from] LevelError),
    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Tunable constants of the translation. Only the orderings between
/// materials are meaningful; the magnitudes are calibration choices.
#[derive(Debug, Clone, PartialEq)]
pub struct DomainConfig {
    pub materials: MaterialTable,
    pub bird_radius: f64,
    /// Blast radius around a TNT block's center.
    pub tnt_radius: f64,
    /// Life lost per meter a collapsing block drops.
    pub fall_damage: f64,
    /// Height a bird is reset to when it bounces off the ground.
    pub ground_clearance: f64,
    /// Birds expire after this many ticks of flight.
    pub flight_tick_limit: u64,
    /// Gap allowed between resting surfaces in the support analysis.
    pub support_tolerance: f64,
    /// Minimum impact momentum that kills a pig; `None` kills on any contact.
    pub pig_force_threshold: Option<f64>,
    pub dt: f64,
    pub horizon: u64,
}

impl Default for DomainConfig {
    fn default() -> Self {
        DomainConfig {
            materials: MaterialTable::default(),
            bird_radius: 0.5,
            tnt_radius: 2.0,
            fall_damage: 20.0,
            ground_clearance: 1.0,
            flight_tick_limit: 3000,
            support_tolerance: 0.1,
            pig_force_threshold: None,
            dt: 0.05,
            horizon: 1200,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GoalMode {
    /// Every pig dead, every bird available.
    Full,
    /// At least one pig killed by the active bird.
    SingleShot,
}

/// A translated level: the grounded problem plus the handles needed to read
/// objects back out of its states.
#[derive(Debug, Clone, PartialEq)]
pub struct DomainProblem<T = f64> {
    level: Arc<Level>,
    config: DomainConfig,
    goal: GoalMode,
    problem: HybridProblem<T>,
    index: DomainIndex,
}

impl<T: Scalar> DomainProblem<T> {
    pub fn level(&self) -> &Level {
        &self.level
    }

    pub fn config(&self) -> &DomainConfig {
        &self.config
    }

    pub fn goal_mode(&self) -> GoalMode {
        self.goal
    }

    pub fn problem(&self) -> &HybridProblem<T> {
        &self.problem
    }

    pub fn index(&self) -> &DomainIndex {
        &self.index
    }

    pub fn into_problem(self) -> HybridProblem<T> {
        self.problem
    }
}

/// Translates a level with the full goal (all pigs dead).
pub fn translate<T: Scalar>(level: &Level, config: &DomainConfig) -> Result<DomainProblem<T>, DomainError> {
    translate_with(level, config, GoalMode::Full)
}

pub fn translate_with<T: Scalar>(
    level: &Level,
    config: &DomainConfig,
    goal: GoalMode,
) -> Result<DomainProblem<T>, DomainError> {
    let (problem, index) = translate::ground(level, config, goal)?;
    Ok(DomainProblem {
        level: Arc::new(level.clone()),
        config: config.clone(),
        goal,
        problem,
        index,
    })
}

/// Single-bird episode: goal `pigs_killed >= 1`, only the active bird's
/// launch action kept.
pub fn single_shot<T: Scalar>(dp: &DomainProblem<T>) -> DomainProblem<T> {
    if dp.goal == GoalMode::SingleShot {
        return dp.clone();
    }
    translate_with(&dp.level, &dp.config, GoalMode::SingleShot).expect("level already translated once")
}

/// Drops every block together with the events that mention blocks. Pigs,
/// platforms and bird bookkeeping are untouched.
pub fn strip_blocks<T: Scalar>(dp: &DomainProblem<T>) -> DomainProblem<T> {
    if dp.level.blocks.is_empty() {
        return dp.clone();
    }
    translate_with(&dp.level.without_blocks(), &dp.config, dp.goal).expect("level already translated once")
}
