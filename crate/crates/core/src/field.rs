use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Deref, DerefMut};

/// Nodal coefficients of a CG1 control, one per mesh node. Feasible values
/// lie in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ControlField(Vec<f64>);

impl ControlField {
    pub fn new(values: Vec<f64>) -> Self {
        ControlField(values)
    }

    pub fn constant(n: usize, value: f64) -> Self {
        ControlField(vec![value; n])
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    /// Largest violation of the `[0, 1]` bounds, zero when feasible.
    pub fn box_violation(&self) -> f64 {
        self.0.iter().map(|&v| (-v).max(v - 1.0).max(0.0)).fold(0.0, f64::max)
    }

    pub fn clamp_to_box(&mut self) {
        for v in &mut self.0 {
            *v = v.clamp(0.0, 1.0);
        }
    }
}

impl Deref for ControlField {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl DerefMut for ControlField {
    fn deref_mut(&mut self) -> &mut [f64] {
        &mut self.0
    }
}

impl From<Vec<f64>> for ControlField {
    fn from(v: Vec<f64>) -> Self {
        ControlField(v)
    }
}
