use std::fmt;
use std::time::Duration;

use crate::model::{tick, Decision, HybridProblem, State};
use crate::planner::{PlanError, StageTag};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlanStep {
    /// Zero-based tick at whose start the action is applied.
    pub tick: u64,
    pub action: String,
}

/// Timed action sequence; every tick not listed is a wait.
#[derive(Debug, Clone)]
pub struct Plan {
    pub stage: StageTag,
    pub dt: f64,
    pub steps: Vec<PlanStep>,
    /// Wall-clock time spent producing the plan.
    pub elapsed: Duration,
}

/// Equality ignores `elapsed`.
impl PartialEq for Plan {
    fn eq(&self, other: &Self) -> bool {
        self.stage == other.stage && self.dt.to_bits() == other.dt.to_bits() && self.steps == other.steps
    }
}

impl Plan {
    pub fn new(stage: StageTag, dt: f64, steps: Vec<PlanStep>) -> Self {
        Plan {
            stage,
            dt,
            steps,
            elapsed: Duration::ZERO,
        }
    }

    /// Parses the text form written by `Display`.
    pub fn parse(text: &str) -> Result<Plan, PlanError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (hline, header) = lines.next().ok_or(PlanError::Parse {
            line: 1,
            message: "empty plan file".into(),
        })?;
        let err = |line: usize, message: String| PlanError::Parse { line, message };
        let (mut stage, mut dt) = (None, None);
        for field in header.split_whitespace() {
            match field.split_once('=') {
                Some(("stage", v)) => stage = Some(v.parse::<StageTag>().map_err(|m| err(hline, m))?),
                Some(("dt", v)) => {
                    dt = Some(v.parse::<f64>().map_err(|e| err(hline, format!("bad dt `{v}`: {e}")))?);
                }
                _ => return Err(err(hline, format!("unexpected header field `{field}`"))),
            }
        }
        let stage = stage.ok_or_else(|| err(hline, "header lacks stage=".into()))?;
        let dt = dt.ok_or_else(|| err(hline, "header lacks dt=".into()))?;
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(err(hline, format!("dt must be positive, got {dt}")));
        }
        let mut steps: Vec<PlanStep> = Vec::new();
        for (line, l) in lines {
            let (mut t, mut a) = (None, None);
            for field in l.split_whitespace() {
                match field.split_once('=') {
                    Some(("tick", v)) => {
                        t = Some(v.parse::<u64>().map_err(|e| err(line, format!("bad tick `{v}`: {e}")))?);
                    }
                    Some(("action", v)) if !v.is_empty() => a = Some(v.to_string()),
                    _ => return Err(err(line, format!("unexpected field `{field}`"))),
                }
            }
            let (Some(tick), Some(action)) = (t, a) else {
                return Err(err(line, "expected `tick=<k> action=<name>`".into()));
            };
            if steps.last().is_some_and(|s| s.tick >= tick) {
                return Err(err(line, "ticks must be strictly increasing".into()));
            }
            steps.push(PlanStep { tick, action });
        }
        Ok(Plan::new(stage, dt, steps))
    }

    /// Parses one plan per shot, each starting with its own header line.
    pub fn parse_many(text: &str) -> Result<Vec<Plan>, PlanError> {
        let lines: Vec<&str> = text.lines().collect();
        let starts: Vec<usize> = (0..lines.len())
            .filter(|&i| lines[i].trim_start().starts_with("stage="))
            .collect();
        let first = starts.first().copied().unwrap_or(lines.len());
        if starts.is_empty() || lines[..first].iter().any(|l| is_content(l)) {
            // whatever precedes the first header is not a valid plan
            return Err(Plan::parse(&lines[..first].join("\n")).err().unwrap_or(PlanError::Parse {
                line: 1,
                message: "expected a `stage=` header".into(),
            }));
        }
        starts
            .iter()
            .enumerate()
            .map(|(j, &s)| {
                let end = starts.get(j + 1).copied().unwrap_or(lines.len());
                // blank padding keeps line numbers file-relative
                Plan::parse(&("\n".repeat(s) + &lines[s..end].join("\n")))
            })
            .collect()
    }

    /// Decision for tick `k`, resolved against `problem`'s action names.
    pub fn decisions<T: Scalar>(&self, problem: &HybridProblem<T>) -> Result<Vec<(u64, Decision)>, PlanError> {
        self.steps
            .iter()
            .map(|s| Ok((s.tick, problem.decision(&s.action)?)))
            .collect()
    }

    pub fn last_tick(&self) -> Option<u64> {
        self.steps.last().map(|s| s.tick)
    }
}

fn is_content(line: &str) -> bool {
    let l = line.trim();
    !l.is_empty() && !l.starts_with('#')
}

impl fmt::Display for Plan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "stage={} dt={}", self.stage, self.dt)?;
        for s in &self.steps {
            writeln!(f, "tick={} action={}", s.tick, s.action)?;
        }
        Ok(())
    }
}

/// Replays `plan` from the initial state, waiting after the last action,
/// and returns the first tick count at which the goal holds (0 if it holds
/// initially), or `None` if the horizon runs out first.
pub fn replay_to_goal<T: Scalar>(
    problem: &HybridProblem<T>,
    plan: &Plan,
    horizon: u64,
) -> Result<Option<(u64, State<T>)>, PlanError> {
    let decisions = plan.decisions(problem)?;
    let mut s = problem.initial().clone();
    if problem.goal_holds(&s)? {
        return Ok(Some((0, s)));
    }
    let mut next = decisions.iter().peekable();
    for k in 0..horizon {
        let d = match next.peek() {
            Some(&&(t, d)) if t == k => {
                next.next();
                d
            }
            _ => Decision::Wait,
        };
        s = tick(s, problem, d)?;
        if problem.goal_holds(&s)? {
            return Ok(Some((k + 1, s)));
        }
    }
    Ok(None)
}
