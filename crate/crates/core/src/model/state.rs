use crate::expr::{BoolFluent, NumFluent, Valuation, Value};
use crate::model::schema::{FluentDecl, FluentKind, FluentSchema};
use crate::scalar::Scalar;

/// Dense assignment of every declared fluent at one time instant.
#[derive(Debug, Clone, PartialEq)]
pub struct State<T = f64> {
    nums: Vec<T>,
    bools: Vec<bool>,
    ticks: u64,
    time: T,
}

impl<T: Scalar> State<T> {
    /// All numeric fluents zero, all booleans false, time zero.
    pub fn zeroed(schema: &FluentSchema) -> Self {
        State {
            nums: vec![T::zero(); schema.num_count()],
            bools: vec![false; schema.bool_count()],
            ticks: 0,
            time: T::zero(),
        }
    }

    pub fn get(&self, f: &NumFluent) -> T {
        self.nums[f.slot]
    }

    pub fn set(&mut self, f: &NumFluent, v: T) {
        self.nums[f.slot] = v;
    }

    pub fn get_bool(&self, f: &BoolFluent) -> bool {
        self.bools[f.slot]
    }

    pub fn set_bool(&mut self, f: &BoolFluent, v: bool) {
        self.bools[f.slot] = v;
    }

    pub(crate) fn set_num_slot(&mut self, slot: usize, v: T) {
        self.nums[slot] = v;
    }

    pub(crate) fn set_bool_slot(&mut self, slot: usize, v: bool) {
        self.bools[slot] = v;
    }

    pub fn value(&self, decl: &FluentDecl) -> Value<T> {
        match decl.kind {
            FluentKind::Numeric => Value::Num(self.nums[decl.slot]),
            FluentKind::Boolean => Value::Bool(self.bools[decl.slot]),
        }
    }

    /// Number of elapsed time steps.
    pub fn ticks(&self) -> u64 {
        self.ticks
    }

    /// Elapsed simulated time in seconds, always `ticks * dt`.
    pub fn time(&self) -> T {
        self.time
    }

    pub(crate) fn step_clock(&mut self, dt: T) {
        self.ticks += 1;
        self.time = T::from_u64(self.ticks).expect("tick count fits scalar") * dt;
    }

    /// True when the state has exactly one value per declared fluent.
    pub fn is_dense_over(&self, schema: &FluentSchema) -> bool {
        self.nums.len() == schema.num_count() && self.bools.len() == schema.bool_count()
    }

    /// Bitwise equality of every value and the clock.
    pub fn bit_eq(&self, other: &Self) -> bool {
        self.ticks == other.ticks
            && self.time.canonical_bits() == other.time.canonical_bits()
            && self.bools == other.bools
            && self.nums.len() == other.nums.len()
            && self
                .nums
                .iter()
                .zip(&other.nums)
                .all(|(a, b)| a.as_f64().to_bits() == b.as_f64().to_bits())
    }

    pub fn nums(&self) -> &[T] {
        &self.nums
    }

    pub fn bools(&self) -> &[bool] {
        &self.bools
    }
}

impl<T: Scalar> Valuation<T> for State<T> {
    #[inline]
    fn num(&self, slot: usize) -> Option<T> {
        self.nums.get(slot).copied()
    }

    #[inline]
    fn boolean(&self, slot: usize) -> Option<bool> {
        self.bools.get(slot).copied()
    }
}
