//! Line-oriented debug dump: one line per tick,
//! `t=<time> decision=<wait|action> fired=[e1,e2] fluent=value ...`.

use std::fmt;
use std::sync::Arc;

use crate::expr::Value;
use crate::model::schema::FluentSchema;
use crate::model::state::State;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct TickLog<T = f64> {
    /// Simulated time at the end of the tick.
    pub time: T,
    pub decision: String,
    pub fired: Vec<String>,
    /// Fluents whose value changed during the tick, in schema order.
    pub changes: Vec<(Arc<str>, Value<T>)>,
}

/// Fluents that differ (bitwise) between two states, in schema order.
pub fn changed_fluents<T: Scalar>(schema: &FluentSchema, before: &State<T>, after: &State<T>) -> Vec<(Arc<str>, Value<T>)> {
    schema
        .decls()
        .iter()
        .filter_map(|d| {
            let (a, b) = (before.value(d), after.value(d));
            (!a.bit_eq(&b)).then(|| (d.name.clone(), b))
        })
        .collect()
}

impl<T: Scalar> fmt::Display for TickLog<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "t={:.4} decision={} fired=[{}]", self.time.as_f64(), self.decision, self.fired.join(","))?;
        for (name, v) in &self.changes {
            write!(f, " {name}={v}")?;
        }
        Ok(())
    }
}

/// Renders a sequence of tick logs, newline-terminated.
pub fn render<T: Scalar>(logs: &[TickLog<T>]) -> String {
    let mut out = String::new();
    for l in logs {
        out.push_str(&l.to_string());
        out.push('\n');
    }
    out
}
