use std::sync::Arc;

use crate::expr::{BoolExpr, NumExpr};
use crate::model::defs::{ActionDef, Assignment, EventDef, ProcessDef};
use crate::model::schema::FluentSchema;
use crate::model::state::State;
use crate::model::ModelError;
use crate::scalar::Scalar;

/// Grounded hybrid planning problem. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct HybridProblem<T = f64> {
    schema: Arc<FluentSchema>,
    initial: State<T>,
    actions: Vec<ActionDef<T>>,
    events: Vec<EventDef<T>>,
    processes: Vec<ProcessDef<T>>,
    goal: BoolExpr<T>,
    dt: T,
    horizon: u64,
}

/// Per-tick choice: idle, or apply the action with this index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Decision {
    Wait,
    Act(usize),
}

pub struct ProblemParts<T = f64> {
    pub schema: FluentSchema,
    pub initial: State<T>,
    pub actions: Vec<ActionDef<T>>,
    pub events: Vec<EventDef<T>>,
    pub processes: Vec<ProcessDef<T>>,
    pub goal: BoolExpr<T>,
    pub dt: T,
    pub horizon: u64,
}

impl<T: Scalar> HybridProblem<T> {
    pub fn new(parts: ProblemParts<T>) -> Result<Self, ModelError> {
        let ProblemParts {
            schema,
            initial,
            actions,
            mut events,
            processes,
            goal,
            dt,
            horizon,
        } = parts;
        if !(dt > T::zero()) {
            return Err(ModelError::InvalidProblem(format!("dt must be positive, got {dt}")));
        }
        if horizon < 1 {
            return Err(ModelError::InvalidProblem("horizon must be at least one tick".into()));
        }
        if !initial.is_dense_over(&schema) {
            return Err(ModelError::InvalidProblem("initial state does not match the schema".into()));
        }
        check_bool(&schema, &goal, "goal")?;
        for a in &actions {
            check_bool(&schema, &a.precondition, &a.name)?;
            check_effects(&schema, &a.effects, &a.name)?;
        }
        for e in &events {
            check_bool(&schema, &e.precondition, &e.name)?;
            check_effects(&schema, &e.effects, &e.name)?;
        }
        for p in &processes {
            check_bool(&schema, &p.condition, &p.name)?;
            for (f, rate) in &p.rates {
                if !schema.owns_num(f) {
                    return Err(ModelError::UnknownFluent(format!("{} (in {})", f.name, p.name)));
                }
                check_num(&schema, rate, &p.name)?;
            }
        }
        let mut names: Vec<&str> = actions.iter().map(|a| a.name.as_str()).collect();
        names.sort_unstable();
        if let Some(w) = names.windows(2).find(|w| w[0] == w[1]) {
            return Err(ModelError::InvalidProblem(format!("duplicate action `{}`", w[0])));
        }
        for (i, e) in events.iter_mut().enumerate() {
            e.index = i;
        }
        Ok(HybridProblem {
            schema: Arc::new(schema),
            initial,
            actions,
            events,
            processes,
            goal,
            dt,
            horizon,
        })
    }

    pub fn schema(&self) -> &FluentSchema {
        &self.schema
    }

    pub fn initial(&self) -> &State<T> {
        &self.initial
    }

    pub fn actions(&self) -> &[ActionDef<T>] {
        &self.actions
    }

    pub fn events(&self) -> &[EventDef<T>] {
        &self.events
    }

    pub fn processes(&self) -> &[ProcessDef<T>] {
        &self.processes
    }

    pub fn goal(&self) -> &BoolExpr<T> {
        &self.goal
    }

    pub fn dt(&self) -> T {
        self.dt
    }

    pub fn horizon(&self) -> u64 {
        self.horizon
    }

    pub fn action_index(&self, name: &str) -> Option<usize> {
        self.actions.iter().position(|a| a.name == name)
    }

    pub fn decision(&self, name: &str) -> Result<Decision, ModelError> {
        if name == "wait" {
            return Ok(Decision::Wait);
        }
        self.action_index(name)
            .map(Decision::Act)
            .ok_or_else(|| ModelError::UnknownAction(name.to_string()))
    }

    pub fn decision_label(&self, d: Decision) -> &str {
        match d {
            Decision::Wait => "wait",
            Decision::Act(i) => &self.actions[i].name,
        }
    }

    pub fn goal_holds(&self, state: &State<T>) -> Result<bool, ModelError> {
        self.goal.eval(state).map_err(|source| ModelError::Eval {
            context: "goal".into(),
            source,
        })
    }

    pub fn with_goal(&self, goal: BoolExpr<T>) -> Result<Self, ModelError> {
        check_bool(&self.schema, &goal, "goal")?;
        Ok(HybridProblem { goal, ..self.clone() })
    }

    pub fn with_initial(&self, initial: State<T>) -> Result<Self, ModelError> {
        if !initial.is_dense_over(&self.schema) {
            return Err(ModelError::InvalidProblem("initial state does not match the schema".into()));
        }
        Ok(HybridProblem { initial, ..self.clone() })
    }

    pub fn with_actions(&self, actions: Vec<ActionDef<T>>) -> Self {
        HybridProblem {
            actions,
            ..self.clone()
        }
    }

    pub fn with_dt(&self, dt: T) -> Result<Self, ModelError> {
        if !(dt > T::zero()) {
            return Err(ModelError::InvalidProblem(format!("dt must be positive, got {dt}")));
        }
        Ok(HybridProblem { dt, ..self.clone() })
    }

    pub fn with_horizon(&self, horizon: u64) -> Result<Self, ModelError> {
        if horizon < 1 {
            return Err(ModelError::InvalidProblem("horizon must be at least one tick".into()));
        }
        Ok(HybridProblem { horizon, ..self.clone() })
    }

    /// Same problem with events redeclared in the order given by `order`
    /// (a permutation of event indices).
    pub fn with_event_order(&self, order: &[usize]) -> Result<Self, ModelError> {
        let mut seen = vec![false; self.events.len()];
        if order.len() != self.events.len() || order.iter().any(|&i| i >= seen.len() || std::mem::replace(&mut seen[i], true)) {
            return Err(ModelError::InvalidProblem("event order is not a permutation".into()));
        }
        let mut events: Vec<EventDef<T>> = order.iter().map(|&i| self.events[i].clone()).collect();
        for (i, e) in events.iter_mut().enumerate() {
            e.index = i;
        }
        Ok(HybridProblem { events, ..self.clone() })
    }
}

fn check_num<T: Scalar>(schema: &FluentSchema, e: &NumExpr<T>, ctx: &str) -> Result<(), ModelError> {
    let mut bad = None;
    e.visit_fluents(&mut |f| {
        if bad.is_none() && !schema.owns_num(f) {
            bad = Some(f.name.to_string());
        }
    });
    match bad {
        Some(name) => Err(ModelError::UnknownFluent(format!("{name} (in {ctx})"))),
        None => Ok(()),
    }
}

fn check_bool<T: Scalar>(schema: &FluentSchema, e: &BoolExpr<T>, ctx: &str) -> Result<(), ModelError> {
    let mut nums = Vec::new();
    let mut bools = Vec::new();
    e.visit_fluents(&mut |f| nums.push(f.clone()), &mut |f| bools.push(f.clone()));
    let bad = nums
        .iter()
        .find(|f| !schema.owns_num(f))
        .map(|f| f.name.clone())
        .or_else(|| bools.iter().find(|f| !schema.owns_bool(f)).map(|f| f.name.clone()));
    match bad {
        Some(name) => Err(ModelError::UnknownFluent(format!("{name} (in {ctx})"))),
        None => Ok(()),
    }
}

fn check_effects<T: Scalar>(schema: &FluentSchema, effects: &[Assignment<T>], ctx: &str) -> Result<(), ModelError> {
    for eff in effects {
        match eff {
            Assignment::Num(f, e) => {
                if !schema.owns_num(f) {
                    return Err(ModelError::UnknownFluent(format!("{} (in {ctx})", f.name)));
                }
                check_num(schema, e, ctx)?;
            }
            Assignment::Bool(f, e) => {
                if !schema.owns_bool(f) {
                    return Err(ModelError::UnknownFluent(format!("{} (in {ctx})", f.name)));
                }
                check_bool(schema, e, ctx)?;
            }
        }
    }
    Ok(())
}
