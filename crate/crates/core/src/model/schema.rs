use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::expr::{BoolFluent, NumFluent};
use crate::model::ModelError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FluentKind {
    Numeric,
    Boolean,
}

/// Physical unit of a numeric fluent. Drives the quantization grid used for
/// duplicate detection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Unit {
    Meters,
    MetersPerSecond,
    MetersPerSecondSquared,
    Degrees,
    DegreesPerSecond,
    Seconds,
    Kilograms,
    Count,
    Dimensionless,
}

/// Unit families that share a quantization grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UnitClass {
    Position,
    Velocity,
    Angle,
    /// Compared bit-for-bit.
    Exact,
}

impl Unit {
    pub fn class(self) -> UnitClass {
        match self {
            Unit::Meters => UnitClass::Position,
            Unit::MetersPerSecond => UnitClass::Velocity,
            Unit::Degrees => UnitClass::Angle,
            _ => UnitClass::Exact,
        }
    }
}

impl fmt::Display for Unit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Unit::Meters => "m",
            Unit::MetersPerSecond => "m/s",
            Unit::MetersPerSecondSquared => "m/s^2",
            Unit::Degrees => "deg",
            Unit::DegreesPerSecond => "deg/s",
            Unit::Seconds => "s",
            Unit::Kilograms => "kg",
            Unit::Count => "count",
            Unit::Dimensionless => "1",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FluentDecl {
    pub name: Arc<str>,
    pub kind: FluentKind,
    /// `None` for booleans.
    pub unit: Option<Unit>,
    /// Index into the numeric or boolean value vector, depending on `kind`.
    pub slot: usize,
}

/// Ordered fluent declarations. Declaration order is fixed once grounding is
/// done; dumps and duplicate-detection keys iterate in this order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FluentSchema {
    decls: Vec<FluentDecl>,
    by_name: HashMap<Arc<str>, usize>,
    n_num: usize,
    n_bool: usize,
}

impl FluentSchema {
    pub fn new() -> Self {
        Self::default()
    }

    fn insert(&mut self, name: &str, kind: FluentKind, unit: Option<Unit>) -> Result<(Arc<str>, usize), ModelError> {
        if self.by_name.contains_key(name) {
            return Err(ModelError::DuplicateFluent(name.to_string()));
        }
        let name: Arc<str> = name.into();
        let slot = match kind {
            FluentKind::Numeric => {
                self.n_num += 1;
                self.n_num - 1
            }
            FluentKind::Boolean => {
                self.n_bool += 1;
                self.n_bool - 1
            }
        };
        self.by_name.insert(name.clone(), self.decls.len());
        self.decls.push(FluentDecl {
            name: name.clone(),
            kind,
            unit,
            slot,
        });
        Ok((name, slot))
    }

    pub fn declare_num(&mut self, name: &str, unit: Unit) -> Result<NumFluent, ModelError> {
        let (name, slot) = self.insert(name, FluentKind::Numeric, Some(unit))?;
        Ok(NumFluent { slot, name })
    }

    pub fn declare_bool(&mut self, name: &str) -> Result<BoolFluent, ModelError> {
        let (name, slot) = self.insert(name, FluentKind::Boolean, None)?;
        Ok(BoolFluent { slot, name })
    }

    pub fn decl(&self, name: &str) -> Option<&FluentDecl> {
        self.by_name.get(name).map(|&i| &self.decls[i])
    }

    pub fn num(&self, name: &str) -> Result<NumFluent, ModelError> {
        match self.decl(name) {
            Some(d) if d.kind == FluentKind::Numeric => Ok(NumFluent {
                slot: d.slot,
                name: d.name.clone(),
            }),
            Some(_) => Err(ModelError::KindMismatch(name.to_string())),
            None => Err(ModelError::UnknownFluent(name.to_string())),
        }
    }

    pub fn boolean(&self, name: &str) -> Result<BoolFluent, ModelError> {
        match self.decl(name) {
            Some(d) if d.kind == FluentKind::Boolean => Ok(BoolFluent {
                slot: d.slot,
                name: d.name.clone(),
            }),
            Some(_) => Err(ModelError::KindMismatch(name.to_string())),
            None => Err(ModelError::UnknownFluent(name.to_string())),
        }
    }

    pub fn decls(&self) -> &[FluentDecl] {
        &self.decls
    }

    pub fn len(&self) -> usize {
        self.decls.len()
    }

    pub fn is_empty(&self) -> bool {
        self.decls.is_empty()
    }

    pub fn num_count(&self) -> usize {
        self.n_num
    }

    pub fn bool_count(&self) -> usize {
        self.n_bool
    }

    /// True when `f` is the fluent this schema declares under that name.
    pub fn owns_num(&self, f: &NumFluent) -> bool {
        self.decl(&f.name)
            .is_some_and(|d| d.kind == FluentKind::Numeric && d.slot == f.slot)
    }

    pub fn owns_bool(&self, f: &BoolFluent) -> bool {
        self.decl(&f.name)
            .is_some_and(|d| d.kind == FluentKind::Boolean && d.slot == f.slot)
    }
}
