use std::time::{Duration, Instant};

use log::{debug, info};

use crate::domain::{single_shot, strip_blocks, translate, DomainConfig, DomainProblem, Level};
use crate::planner::{solve, Plan, PlanError, PlanStep, SearchConfig, SearchStats, StageTag, Unsolved};

#[derive(Debug, Clone, PartialEq)]
pub struct CascadeConfig {
    /// Grids, horizon and dt shared by both search stages. Its timeout is
    /// ignored in favor of the per-stage budgets below.
    pub search: SearchConfig,
    pub single_shot_timeout: Duration,
    pub no_blocks_timeout: Duration,
    /// Release angle of the fallback shot, degrees.
    pub default_angle: f64,
    pub domain: DomainConfig,
}

impl Default for CascadeConfig {
    fn default() -> Self {
        CascadeConfig {
            search: SearchConfig::default(),
            single_shot_timeout: Duration::from_secs(30),
            no_blocks_timeout: Duration::from_secs(30),
            default_angle: 45.0,
            domain: DomainConfig::default(),
        }
    }
}

impl CascadeConfig {
    /// Sets the step size of both the model and the search.
    pub fn with_dt(mut self, dt: f64) -> Self {
        self.search.dt = dt;
        self.domain.dt = dt;
        self
    }

    pub fn with_timeouts(mut self, t: Duration) -> Self {
        self.single_shot_timeout = t;
        self.no_blocks_timeout = t;
        self
    }
}

/// One search stage of the cascade.
#[derive(Debug, Clone, PartialEq)]
pub struct StageAttempt {
    pub stage: StageTag,
    /// `None` when the stage produced the plan.
    pub failure: Option<Unsolved>,
    pub elapsed: Duration,
    pub stats: SearchStats,
}

#[derive(Debug, Clone)]
pub struct ShotDecision {
    pub plan: Plan,
    pub attempts: Vec<StageAttempt>,
    /// Wall-clock time of the whole cascade.
    pub elapsed: Duration,
}

/// First tick whose accumulated aiming angle is closest to `target`.
pub fn default_release_tick(level: &Level, dt: f64, horizon: u64, target: f64) -> u64 {
    let ph = &level.physics;
    let mut best = (0, f64::INFINITY);
    for k in 0..horizon {
        let angle = (k as f64 * dt * ph.angle_rate).min(ph.max_angle);
        let err = (angle - target).abs();
        if err < best.1 {
            best = (k, err);
        }
        if angle >= ph.max_angle {
            break;
        }
    }
    best.0
}

fn attempt(
    dp: &DomainProblem,
    cfg: &CascadeConfig,
    timeout: Duration,
    deadline: Option<Instant>,
    stage: StageTag,
    attempts: &mut Vec<StageAttempt>,
) -> Result<Option<Plan>, PlanError> {
    let timeout = match deadline {
        Some(d) => timeout.min(d.saturating_duration_since(Instant::now())),
        None => timeout,
    };
    if timeout.is_zero() {
        debug!("{stage}: no time left in the budget");
        attempts.push(StageAttempt {
            stage,
            failure: Some(Unsolved::Timeout),
            elapsed: Duration::ZERO,
            stats: SearchStats::default(),
        });
        return Ok(None);
    }
    let search = SearchConfig {
        timeout,
        ..cfg.search.clone()
    };
    let out = solve(dp.problem(), &search, stage)?;
    debug!(
        "{stage}: {} after {:?} ({} expanded, {} ticks)",
        out.reason.map_or("plan", |r| r.as_str()),
        out.elapsed,
        out.stats.expanded,
        out.stats.ticks
    );
    attempts.push(StageAttempt {
        stage,
        failure: out.reason,
        elapsed: out.elapsed,
        stats: out.stats,
    });
    Ok(out.plan)
}

/// Plans the next shot for `level`, whose bird 0 is the one in the
/// slingshot: single-shot problem first, then the same without blocks, then
/// the default release.
pub fn cascade(level: &Level, cfg: &CascadeConfig) -> Result<ShotDecision, PlanError> {
    cascade_until(level, cfg, None)
}

/// [`cascade`], with each stage's timeout cut short so that no search runs
/// past `deadline`. Stages that start after it are skipped.
pub fn cascade_until(level: &Level, cfg: &CascadeConfig, deadline: Option<Instant>) -> Result<ShotDecision, PlanError> {
    if level.birds.is_empty() {
        return Err(PlanError::NoBirds);
    }
    let start = Instant::now();
    let full: DomainProblem = translate(level, &cfg.domain)?;
    let mut attempts = Vec::new();
    let ss = single_shot(&full);
    let mut plan = attempt(&ss, cfg, cfg.single_shot_timeout, deadline, StageTag::SingleShot, &mut attempts)?;
    if plan.is_none() {
        let bare = strip_blocks(&ss);
        plan = attempt(&bare, cfg, cfg.no_blocks_timeout, deadline, StageTag::SingleShotNoBlocks, &mut attempts)?;
    }
    let plan = match plan {
        Some(p) => p,
        None => {
            let k = default_release_tick(level, cfg.search.dt, cfg.search.horizon, cfg.default_angle);
            let action = ss.problem().actions()[0].name.clone();
            Plan::new(StageTag::DefaultAction, cfg.search.dt, vec![PlanStep { tick: k, action }])
        }
    };
    info!("shot planned: {} ({} steps)", plan.stage, plan.steps.len());
    Ok(ShotDecision {
        plan,
        attempts,
        elapsed: start.elapsed(),
    })
}
