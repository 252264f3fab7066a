//! Plan replay against the same model the planner searches, scoring, the
//! shot-by-shot agent loop, and an independent flight oracle.

mod oracle;

use std::fmt;
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::domain::{block_attributes, translate, Block, DomainConfig, DomainError, DomainProblem, Level};
use crate::domain::physics::base_height;
use crate::model::{changed_fluents, tick_logged, Decision, ModelError, State, TickLog};
use crate::planner::{cascade_until, CascadeConfig, Plan, PlanError, StageAttempt, StageTag};

pub use oracle::{aim_angle, oracle_hit, oracle_sweep, simulate_flight, Flight, FlightEnd, FlightPoint, OracleConfig, OracleHits};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("more shots than birds ({birds} birds)")]
    TooManyShots { birds: usize },
    #[error("the oracle only handles levels without blocks")]
    OracleWithBlocks,
    #[error("no pig with index {0}")]
    NoSuchPig(usize),
    #[error(transparent)]
    Plan(#[from] PlanError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Domain(#[from] DomainError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScoreConfig {
    pub pig_points: u64,
    pub block_points: u64,
    /// Awarded per unused bird once every pig is dead.
    pub bird_points: u64,
}

impl Default for ScoreConfig {
    fn default() -> Self {
        ScoreConfig {
            pig_points: 5000,
            block_points: 500,
            bird_points: 10000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ScoreReport {
    pub pigs_killed: usize,
    pub blocks_destroyed: usize,
    /// Birds left over; only counted when the level is solved.
    pub unused_birds: usize,
    pub pig_score: u64,
    pub block_score: u64,
    pub bird_score: u64,
    pub total: u64,
}

impl ScoreReport {
    pub fn new(pigs_killed: usize, blocks_destroyed: usize, unused_birds: usize, cfg: &ScoreConfig) -> Self {
        let pig_score = pigs_killed as u64 * cfg.pig_points;
        let block_score = blocks_destroyed as u64 * cfg.block_points;
        let bird_score = unused_birds as u64 * cfg.bird_points;
        ScoreReport {
            pigs_killed,
            blocks_destroyed,
            unused_birds,
            pig_score,
            block_score,
            bird_score,
            total: pig_score + block_score + bird_score,
        }
    }
}

impl fmt::Display for ScoreReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "pigs={} ({}) blocks={} ({}) unused_birds={} ({}) total={}",
            self.pigs_killed,
            self.pig_score,
            self.blocks_destroyed,
            self.block_score,
            self.unused_birds,
            self.bird_score,
            self.total
        )
    }
}

/// Everything that happened during one shot.
#[derive(Debug, Clone, PartialEq)]
pub struct ShotTrace {
    pub stage: StageTag,
    pub ticks: Vec<TickLog>,
    pub pigs_killed: usize,
    /// The shot ran out of ticks before its birds expired.
    pub hit_horizon: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct TerminalFlags {
    pub all_pigs_dead: bool,
    pub birds_exhausted: bool,
    pub horizon: bool,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Trace {
    pub shots: Vec<ShotTrace>,
    pub terminal: TerminalFlags,
}

impl Trace {
    /// Bitwise comparison of every logged value.
    pub fn bit_eq(&self, other: &Trace) -> bool {
        self.shots.len() == other.shots.len()
            && self.terminal == other.terminal
            && self.shots.iter().zip(&other.shots).all(|(a, b)| {
                a.stage == b.stage
                    && a.ticks.len() == b.ticks.len()
                    && a.ticks.iter().zip(&b.ticks).all(|(x, y)| {
                        x.time.to_bits() == y.time.to_bits()
                            && x.decision == y.decision
                            && x.fired == y.fired
                            && x.changes.len() == y.changes.len()
                            && x.changes.iter().zip(&y.changes).all(|(c, d)| c.0 == d.0 && c.1.bit_eq(&d.1))
                    })
            })
    }

    /// Names of every event fired, in order.
    pub fn fired(&self) -> impl Iterator<Item = &str> {
        self.shots
            .iter()
            .flat_map(|s| s.ticks.iter())
            .flat_map(|t| t.fired.iter().map(String::as_str))
    }
}

impl fmt::Display for Trace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, shot) in self.shots.iter().enumerate() {
            writeln!(f, "# shot {i} stage={} pigs_killed={}", shot.stage, shot.pigs_killed)?;
            for t in &shot.ticks {
                writeln!(f, "{t}")?;
            }
        }
        let t = &self.terminal;
        writeln!(
            f,
            "# terminal all_pigs_dead={} birds_exhausted={} horizon={}",
            t.all_pigs_dead, t.birds_exhausted, t.horizon
        )
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ExecConfig {
    pub domain: DomainConfig,
    pub score: ScoreConfig,
}

/// Result of replaying one shot on a level.
#[derive(Debug, Clone)]
pub struct ShotOutcome {
    pub trace: ShotTrace,
    /// What is left of the level afterwards; birds are renumbered.
    pub residual: Level,
    pub final_state: State,
    pub birds_released: usize,
}

fn full_life(b: &Block, cfg: &DomainConfig) -> Option<f64> {
    block_attributes(b.width, b.height, b.material, base_height(b), &cfg.materials)
        .ok()
        .map(|a| a.life)
}

/// Surviving objects of `dp`'s level in `s`: unreleased birds, live pigs,
/// live blocks at their current height and with their remaining life.
pub fn residual_level(dp: &DomainProblem, s: &State) -> Level {
    let level = dp.level();
    let ix = dp.index();
    let mut out = level.clone();
    out.birds = level
        .birds
        .iter()
        .zip(&ix.birds)
        .filter(|(_, f)| !s.get_bool(&f.released))
        .map(|(b, _)| b.clone())
        .collect();
    for (i, b) in out.birds.iter_mut().enumerate() {
        b.id = i;
    }
    out.pigs = level
        .pigs
        .iter()
        .zip(&ix.pigs)
        .filter(|(_, f)| !s.get_bool(&f.dead))
        .map(|(p, _)| p.clone())
        .collect();
    out.blocks = level
        .blocks
        .iter()
        .zip(&ix.blocks)
        .filter(|(_, f)| !s.get_bool(&f.dead))
        .map(|(b, f)| {
            let mut nb = Block {
                y: s.get(&f.y),
                ..b.clone()
            };
            let life = s.get(&f.life);
            nb.life = (full_life(&nb, dp.config()) != Some(life)).then_some(life);
            nb
        })
        .collect();
    out
}

/// Replays `plan` on `level` in the full model (every bird, every block)
/// until the birds it released have expired, or the horizon.
pub fn execute_shot(level: &Level, plan: &Plan, cfg: &ExecConfig) -> Result<ShotOutcome, SimError> {
    let dp: DomainProblem = translate(level, &cfg.domain)?;
    let p = dp.problem();
    let ix = dp.index();
    let decisions = plan.decisions(p)?;
    let last = plan.last_tick();
    let mut s = p.initial().clone();
    let mut ticks = Vec::new();
    let mut next = decisions.iter().peekable();
    let mut hit_horizon = false;
    let released = |s: &State| ix.birds.iter().filter(|b| s.get_bool(&b.released)).count();
    let settled = |s: &State| ix.birds.iter().all(|b| !s.get_bool(&b.released) || s.get_bool(&b.expired));
    if last.is_some() {
        let mut k = 0u64;
        loop {
            if last.is_some_and(|l| k > l) && settled(&s) {
                break;
            }
            if k >= cfg.domain.horizon {
                hit_horizon = true;
                break;
            }
            let d = match next.peek() {
                Some(&&(t, d)) if t == k => {
                    next.next();
                    d
                }
                _ => Decision::Wait,
            };
            let (after, fired) = tick_logged(s.clone(), p, d)?;
            ticks.push(TickLog {
                time: after.time(),
                decision: p.decision_label(d).to_string(),
                fired: fired.iter().map(|&i| p.events()[i].name.clone()).collect(),
                changes: changed_fluents(p.schema(), &s, &after),
            });
            s = after;
            k += 1;
        }
    }
    let pigs_killed = ix.pigs.iter().filter(|f| s.get_bool(&f.dead)).count();
    Ok(ShotOutcome {
        trace: ShotTrace {
            stage: plan.stage,
            ticks,
            pigs_killed,
            hit_horizon,
        },
        residual: residual_level(&dp, &s),
        birds_released: released(&s),
        final_state: s,
    })
}

/// Outcome of playing a level to the end.
#[derive(Debug, Clone, PartialEq)]
pub struct Execution {
    pub trace: Trace,
    pub score: ScoreReport,
    pub solved: bool,
    pub residual: Level,
}

fn finish(level: &Level, residual: Level, shots: Vec<ShotTrace>, horizon: bool, cfg: &ExecConfig) -> Execution {
    let solved = residual.pigs.is_empty();
    let unused = if solved { residual.birds.len() } else { 0 };
    let score = ScoreReport::new(
        level.pigs.len() - residual.pigs.len(),
        level.blocks.len() - residual.blocks.len(),
        unused,
        &cfg.score,
    );
    Execution {
        trace: Trace {
            shots,
            terminal: TerminalFlags {
                all_pigs_dead: solved,
                birds_exhausted: residual.birds.is_empty(),
                horizon,
            },
        },
        score,
        solved,
        residual,
    }
}

/// Plays `shots` in order, each against what the previous ones left.
/// Stops early once every pig is dead.
pub fn execute(level: &Level, shots: &[Plan], cfg: &ExecConfig) -> Result<Execution, SimError> {
    level.validate().map_err(DomainError::from)?;
    let mut residual = level.clone();
    let mut traces = Vec::new();
    let mut horizon = false;
    for plan in shots {
        if residual.pigs.is_empty() {
            break;
        }
        if residual.birds.is_empty() {
            return Err(SimError::TooManyShots {
                birds: level.birds.len(),
            });
        }
        let out = execute_shot(&residual, plan, cfg)?;
        horizon |= out.trace.hit_horizon;
        traces.push(out.trace);
        residual = out.residual;
    }
    Ok(finish(level, residual, traces, horizon, cfg))
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct AgentConfig {
    pub cascade: CascadeConfig,
    pub score: ScoreConfig,
    /// Planning time allowed for the whole level. Searches are cut short
    /// when it runs out and the remaining birds take the default shot.
    pub budget: Option<Duration>,
}

impl AgentConfig {
    fn exec(&self) -> ExecConfig {
        ExecConfig {
            domain: self.cascade.domain.clone(),
            score: self.score,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ShotRecord {
    pub plan: Plan,
    pub attempts: Vec<StageAttempt>,
    pub plan_time: Duration,
    pub pigs_killed: usize,
}

#[derive(Debug, Clone)]
pub struct AgentReport {
    pub execution: Execution,
    pub shots: Vec<ShotRecord>,
}

impl AgentReport {
    pub fn stage_tags(&self) -> Vec<StageTag> {
        self.shots.iter().map(|s| s.plan.stage).collect()
    }
}

/// Plans and plays one bird at a time, replanning on what is left after
/// each shot, until the pigs or the birds run out.
pub fn agent_loop(level: &Level, cfg: &AgentConfig) -> Result<AgentReport, SimError> {
    level.validate().map_err(DomainError::from)?;
    let exec = cfg.exec();
    let mut residual = level.clone();
    let mut traces = Vec::new();
    let mut records = Vec::new();
    let mut horizon = false;
    let deadline = cfg.budget.map(|b| Instant::now() + b);
    while !residual.pigs.is_empty() && !residual.birds.is_empty() {
        let decision = cascade_until(&residual, &cfg.cascade, deadline)?;
        let mut out = execute_shot(&residual, &decision.plan, &exec)?;
        if out.birds_released == 0 {
            // cannot happen with cascade plans; guarantees progress anyway
            out.residual.birds.remove(0);
            for (i, b) in out.residual.birds.iter_mut().enumerate() {
                b.id = i;
            }
        }
        horizon |= out.trace.hit_horizon;
        records.push(ShotRecord {
            plan: decision.plan,
            attempts: decision.attempts,
            plan_time: decision.elapsed,
            pigs_killed: out.trace.pigs_killed,
        });
        traces.push(out.trace);
        residual = out.residual;
    }
    Ok(AgentReport {
        execution: finish(level, residual, traces, horizon, &exec),
        shots: records,
    })
}
