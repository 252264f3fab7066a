use std::cmp::Ordering;
use std::collections::{BTreeMap, HashSet};
use std::rc::Rc;
use std::time::{Duration, Instant};

use crate::model::{applicable_actions, tick, Decision, FluentKind, FluentSchema, HybridProblem, ModelError, State, UnitClass};
use crate::planner::{replay_to_goal, Grids, Plan, PlanError, PlanStep, SearchConfig, StageTag};
use crate::scalar::Scalar;

/// Duplicate-detection key: every numeric fluent snapped to its grid, then
/// the booleans, in schema order. Time is not part of the key.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct StateKey(Box<[u64]>);

pub fn quantize<T: Scalar>(state: &State<T>, schema: &FluentSchema, grids: &Grids) -> StateKey {
    let n_bool = schema.bool_count();
    let mut out = Vec::with_capacity(schema.num_count() + n_bool.div_ceil(64));
    let mut bits = vec![0u64; n_bool.div_ceil(64)];
    for d in schema.decls() {
        match d.kind {
            FluentKind::Numeric => {
                let v = state.nums()[d.slot];
                let grid = match d.unit.map(|u| u.class()) {
                    Some(UnitClass::Position) => Some(grids.position),
                    Some(UnitClass::Velocity) => Some(grids.velocity),
                    Some(UnitClass::Angle) => Some(grids.angle),
                    _ => None,
                };
                let x = v.as_f64();
                out.push(match grid {
                    Some(g) if x.is_finite() => (x / g).round() as i64 as u64,
                    _ => v.canonical_bits(),
                });
            }
            FluentKind::Boolean => {
                if state.bools()[d.slot] {
                    bits[d.slot / 64] |= 1 << (d.slot % 64);
                }
            }
        }
    }
    out.extend(bits);
    StateKey(out.into_boxed_slice())
}

/// Why a search ended without a plan.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Unsolved {
    /// Every branch died out before the horizon.
    FrontierExhausted,
    /// Some branch was still alive when the horizon cut it off.
    HorizonExhausted,
    Timeout,
}

impl Unsolved {
    pub fn as_str(self) -> &'static str {
        match self {
            Unsolved::FrontierExhausted => "frontier exhausted",
            Unsolved::HorizonExhausted => "horizon exhausted",
            Unsolved::Timeout => "timeout",
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SearchStats {
    pub expanded: u64,
    pub ticks: u64,
    pub duplicates: u64,
    /// Branches dropped because an expression failed to evaluate.
    pub pruned: u64,
}

#[derive(Debug, Clone)]
pub struct SearchOutcome {
    pub plan: Option<Plan>,
    pub reason: Option<Unsolved>,
    pub stats: SearchStats,
    pub elapsed: Duration,
    /// Tick at which the plan reaches the goal.
    pub goal_tick: Option<u64>,
}

/// Shared-prefix decision list, newest first.
struct Link {
    tick: u64,
    action: usize,
    prev: Path,
}

type Path = Option<Rc<Link>>;

fn extend(path: &Path, tick: u64, d: Decision) -> Path {
    match d {
        Decision::Wait => path.clone(),
        Decision::Act(action) => Some(Rc::new(Link {
            tick,
            action,
            prev: path.clone(),
        })),
    }
}

fn steps_of(path: &Path) -> Vec<(u64, usize)> {
    let mut out = Vec::new();
    let mut cur = path;
    while let Some(l) = cur {
        out.push((l.tick, l.action));
        cur = &l.prev;
    }
    out.reverse();
    out
}

/// Order of the dense decision sequences (wait before any action, actions
/// by index), which is also the order breadth-first expansion visits them.
fn cmp_steps(a: &[(u64, usize)], b: &[(u64, usize)]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        if x.0 != y.0 {
            // the later action means a wait where the other acts
            return y.0.cmp(&x.0);
        }
        if x.1 != y.1 {
            return x.1.cmp(&y.1);
        }
    }
    // the shorter one waits where the longer one acts
    a.len().cmp(&b.len())
}

struct Node<T> {
    state: State<T>,
    path: Path,
    steps: Vec<(u64, usize)>,
}

impl<T: Scalar> Node<T> {
    fn new(state: State<T>, path: Path) -> Self {
        let steps = steps_of(&path);
        Node { state, path, steps }
    }
}

/// Errors that kill one branch rather than the search.
fn prunable(e: &ModelError) -> bool {
    matches!(e, ModelError::Eval { .. } | ModelError::InapplicableAction(_))
}

struct Search<'a, T> {
    problem: &'a HybridProblem<T>,
    config: &'a SearchConfig,
    deadline: Instant,
    visited: HashSet<StateKey>,
    stats: SearchStats,
    horizon_cut: bool,
    timed_out: bool,
    /// Goal-reaching paths with their goal tick.
    found: Vec<(u64, Vec<(u64, usize)>)>,
    /// Nodes produced by macro steps, waiting for their layer.
    pending: BTreeMap<u64, Vec<Node<T>>>,
}

impl<T: Scalar> Search<'_, T> {
    fn best_layer(&self) -> Option<u64> {
        self.found.iter().map(|f| f.0).min()
    }

    fn step(&mut self, s: State<T>, d: Decision) -> Result<Option<State<T>>, PlanError> {
        self.stats.ticks += 1;
        match tick(s, self.problem, d) {
            Ok(next) => Ok(Some(next)),
            Err(e) if prunable(&e) => {
                self.stats.pruned += 1;
                Ok(None)
            }
            Err(e) => Err(e.into()),
        }
    }

    fn out_of_time(&mut self) -> bool {
        if !self.timed_out && Instant::now() >= self.deadline {
            self.timed_out = true;
        }
        self.timed_out
    }

    /// Goal and horizon checks for a state reached after `layer` ticks.
    /// Returns true if the branch continues.
    fn alive(&mut self, s: &State<T>, layer: u64, path: &Path) -> Result<bool, PlanError> {
        match self.problem.goal_holds(s) {
            Ok(true) => {
                self.found.push((layer, steps_of(path)));
                return Ok(false);
            }
            Ok(false) => {}
            Err(e) if prunable(&e) => {
                self.stats.pruned += 1;
                return Ok(false);
            }
            Err(e) => return Err(e.into()),
        }
        if layer >= self.config.horizon {
            self.horizon_cut = true;
            return Ok(false);
        }
        Ok(true)
    }

    fn applicable(&mut self, s: &State<T>) -> Result<Option<Vec<usize>>, PlanError> {
        match applicable_actions(s, self.problem) {
            Ok(a) => Ok(Some(a)),
            Err(e) if prunable(&e) => {
                self.stats.pruned += 1;
                Ok(None)
            }
            Err(e) => Err(e.into()),
        }
    }

    /// Runs an action-free stretch forward until an action becomes
    /// applicable (the node then joins the frontier of its layer), the goal
    /// is reached, the horizon is hit, or the state stops changing.
    fn macro_step(&mut self, mut s: State<T>, mut layer: u64, path: Path) -> Result<(), PlanError> {
        loop {
            if self.out_of_time() {
                return Ok(());
            }
            let Some(next) = self.step(s.clone(), Decision::Wait)? else {
                return Ok(());
            };
            layer += 1;
            if !self.alive(&next, layer, &path)? {
                return Ok(());
            }
            if next.nums() == s.nums() && next.bools() == s.bools() {
                // fixpoint without actions: nothing will ever change
                return Ok(());
            }
            let Some(acts) = self.applicable(&next)? else {
                return Ok(());
            };
            if !acts.is_empty() {
                self.pending.entry(layer).or_default().push(Node::new(next, path));
                return Ok(());
            }
            s = next;
        }
    }

    fn run(&mut self) -> Result<(), PlanError> {
        let s0 = self.problem.initial().clone();
        if !self.alive(&s0, 0, &None)? {
            return Ok(());
        }
        self.visited.insert(quantize(&s0, self.problem.schema(), &self.config.grids));
        let mut frontier = vec![Node::new(s0, None)];
        let mut layer = 0u64;
        loop {
            if self.best_layer().is_some_and(|b| layer >= b) {
                return Ok(());
            }
            let mut children = self.pending.remove(&(layer + 1)).unwrap_or_default();
            for node in frontier.drain(..) {
                if self.out_of_time() {
                    return Ok(());
                }
                self.stats.expanded += 1;
                let Some(acts) = self.applicable(&node.state)? else {
                    continue;
                };
                let decisions = std::iter::once(Decision::Wait).chain(acts.into_iter().map(Decision::Act));
                for d in decisions {
                    let Some(next) = self.step(node.state.clone(), d)? else {
                        continue;
                    };
                    let path = extend(&node.path, layer, d);
                    if self.alive(&next, layer + 1, &path)? {
                        children.push(Node::new(next, path));
                    }
                }
            }
            // breadth-first order, so duplicate detection keeps the same
            // representative a tick-by-tick search would
            children.sort_by(|a, b| cmp_steps(&a.steps, &b.steps));
            for child in children {
                let key = quantize(&child.state, self.problem.schema(), &self.config.grids);
                if !self.visited.insert(key) {
                    self.stats.duplicates += 1;
                    continue;
                }
                if self.config.macro_steps {
                    let Some(acts) = self.applicable(&child.state)? else {
                        continue;
                    };
                    if acts.is_empty() {
                        self.macro_step(child.state, layer + 1, child.path)?;
                        continue;
                    }
                }
                frontier.push(child);
            }
            layer += 1;
            if frontier.is_empty() {
                // macro-stepped nodes may rejoin later
                match self.pending.keys().next() {
                    Some(&next) if self.best_layer().is_none_or(|b| next < b) => {
                        frontier = self.pending.remove(&next).unwrap_or_default();
                        frontier.sort_by(|a, b| cmp_steps(&a.steps, &b.steps));
                        frontier.retain(|n| {
                            self.visited
                                .insert(quantize(&n.state, self.problem.schema(), &self.config.grids))
                                || {
                                    self.stats.duplicates += 1;
                                    false
                                }
                        });
                        layer = next;
                    }
                    _ => return Ok(()),
                }
            }
        }
    }
}

/// Breadth-first search for the earliest goal-reaching decision sequence.
/// Ties within the earliest goal layer go to the breadth-first-first
/// sequence. The plan is re-validated by replay before it is returned.
pub fn solve<T: Scalar>(problem: &HybridProblem<T>, config: &SearchConfig, stage: StageTag) -> Result<SearchOutcome, PlanError> {
    config.validate()?;
    if T::lit(config.dt) != problem.dt() {
        return Err(PlanError::DtMismatch {
            config: config.dt,
            problem: problem.dt().as_f64(),
        });
    }
    let start = Instant::now();
    let mut search = Search {
        problem,
        config,
        deadline: start + config.timeout,
        visited: HashSet::new(),
        stats: SearchStats::default(),
        horizon_cut: false,
        timed_out: false,
        found: Vec::new(),
        pending: BTreeMap::new(),
    };
    search.run()?;
    let best = search.best_layer().and_then(|layer| {
        search
            .found
            .iter()
            .filter(|f| f.0 == layer)
            .min_by(|a, b| cmp_steps(&a.1, &b.1))
            .cloned()
    });
    let mut out = SearchOutcome {
        plan: None,
        reason: None,
        stats: search.stats,
        elapsed: Duration::ZERO,
        goal_tick: None,
    };
    match best {
        Some((layer, steps)) => {
            let steps = steps
                .into_iter()
                .map(|(tick, a)| PlanStep {
                    tick,
                    action: problem.actions()[a].name.clone(),
                })
                .collect();
            let mut plan = Plan::new(stage, config.dt, steps);
            match replay_to_goal(problem, &plan, layer)? {
                Some((k, _)) if k == layer => {}
                other => {
                    return Err(PlanError::InvalidPlan(format!(
                        "search reached the goal at tick {layer}, replay gave {:?}",
                        other.map(|o| o.0)
                    )))
                }
            }
            plan.elapsed = start.elapsed();
            out.plan = Some(plan);
            out.goal_tick = Some(layer);
        }
        None => {
            out.reason = Some(if search.timed_out {
                Unsolved::Timeout
            } else if search.horizon_cut {
                Unsolved::HorizonExhausted
            } else {
                Unsolved::FrontierExhausted
            });
        }
    }
    out.elapsed = start.elapsed();
    Ok(out)
}
