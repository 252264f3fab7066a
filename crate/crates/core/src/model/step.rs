//! Discretized step semantics.

use crate::model::defs::{apply_effects, ActionDef, EventDef, ProcessDef};
use crate::model::problem::{Decision, HybridProblem};
use crate::model::state::State;
use crate::model::ModelError;
use crate::scalar::Scalar;

/// Maximum number of event firings in one call to [`fire_events`].
pub const CASCADE_CAP: usize = 1000;

/// Fires enabled events to quiescence and returns the indices fired, in
/// order. Each round fires the first enabled event in declaration order and
/// rescans from the start.
pub fn fire_events_indexed<T: Scalar>(
    mut state: State<T>,
    events: &[EventDef<T>],
) -> Result<(State<T>, Vec<usize>), ModelError> {
    let mut fired = Vec::new();
    'scan: loop {
        for (i, ev) in events.iter().enumerate() {
            let enabled = ev.precondition.eval(&state).map_err(|source| ModelError::Eval {
                context: ev.name.clone(),
                source,
            })?;
            if enabled {
                if fired.len() == CASCADE_CAP {
                    let tail = fired[fired.len() - 10..]
                        .iter()
                        .map(|&j: &usize| events[j].name.clone())
                        .collect();
                    return Err(ModelError::CascadeDivergence { cap: CASCADE_CAP, tail });
                }
                ev.apply(&mut state)?;
                fired.push(i);
                continue 'scan;
            }
        }
        return Ok((state, fired));
    }
}

/// Like [`fire_events_indexed`], reporting event names.
pub fn fire_events<T: Scalar>(state: State<T>, events: &[EventDef<T>]) -> Result<(State<T>, Vec<String>), ModelError> {
    let (state, fired) = fire_events_indexed(state, events)?;
    Ok((state, fired.into_iter().map(|i| events[i].name.clone()).collect()))
}

/// One explicit Euler step of every active process. Rates are evaluated on
/// the pre-step state; the clock advances by `dt` even when nothing flows.
pub fn advance<T: Scalar>(state: State<T>, processes: &[ProcessDef<T>], dt: T) -> Result<State<T>, ModelError> {
    let mut deltas: Vec<(usize, T)> = Vec::new();
    let mut owners: Vec<usize> = Vec::new();
    for (pi, p) in processes.iter().enumerate() {
        let active = p.condition.eval(&state).map_err(|source| ModelError::Eval {
            context: p.name.clone(),
            source,
        })?;
        if !active {
            continue;
        }
        for (f, rate) in &p.rates {
            if let Some(k) = deltas.iter().position(|(slot, _)| *slot == f.slot) {
                return Err(ModelError::DuplicateFlow {
                    fluent: f.name.to_string(),
                    first: processes[owners[k]].name.clone(),
                    second: p.name.clone(),
                });
            }
            let r = rate.eval(&state).map_err(|source| ModelError::Eval {
                context: p.name.clone(),
                source,
            })?;
            deltas.push((f.slot, r * dt));
            owners.push(pi);
        }
    }
    let mut next = state;
    for (slot, d) in deltas {
        let v = next.nums()[slot];
        next.set_num_slot(slot, v + d);
    }
    next.step_clock(dt);
    Ok(next)
}

pub fn apply_action<T: Scalar>(mut state: State<T>, action: &ActionDef<T>) -> Result<State<T>, ModelError> {
    if !action.is_applicable(&state)? {
        return Err(ModelError::InapplicableAction(action.name.clone()));
    }
    apply_effects(&mut state, &action.effects, &action.name)?;
    Ok(state)
}

/// One tick, in the canonical happening order: action, events, flow, events.
/// Returns the next state and the indices of the events fired.
pub fn tick_logged<T: Scalar>(
    state: State<T>,
    problem: &HybridProblem<T>,
    decision: Decision,
) -> Result<(State<T>, Vec<usize>), ModelError> {
    let state = match decision {
        Decision::Wait => state,
        Decision::Act(i) => {
            let action = problem
                .actions()
                .get(i)
                .ok_or_else(|| ModelError::UnknownAction(format!("#{i}")))?;
            apply_action(state, action)?
        }
    };
    let (state, mut fired) = fire_events_indexed(state, problem.events())?;
    let state = advance(state, problem.processes(), problem.dt())?;
    let (state, after) = fire_events_indexed(state, problem.events())?;
    fired.extend(after);
    Ok((state, fired))
}

pub fn tick<T: Scalar>(state: State<T>, problem: &HybridProblem<T>, decision: Decision) -> Result<State<T>, ModelError> {
    tick_logged(state, problem, decision).map(|(s, _)| s)
}

/// Indices of the actions applicable in `state`, in declaration order.
pub fn applicable_actions<T: Scalar>(state: &State<T>, problem: &HybridProblem<T>) -> Result<Vec<usize>, ModelError> {
    let mut out = Vec::new();
    for (i, a) in problem.actions().iter().enumerate() {
        if a.is_applicable(state)? {
            out.push(i);
        }
    }
    Ok(out)
}
