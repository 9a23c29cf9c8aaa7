use crate::error::{invalid, Result};

/// Uniformly sampled real series `s(1..N)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarTimeSeries {
    values: Vec<f64>,
    /// Sampling step in units of `1 / lambda`.
    pub dt: f64,
    /// Number of initial samples discarded before `s(1)`.
    pub burn_in: usize,
}

impl ScalarTimeSeries {
    pub fn new(values: Vec<f64>, dt: f64, burn_in: usize) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(invalid("values", "series contains non-finite samples"));
        }
        if !(dt > 0.0) {
            return Err(invalid("dt", "sampling step must be positive"));
        }
        Ok(ScalarTimeSeries { values, dt, burn_in })
    }

    /// Unit step, no burn-in.
    pub fn from_values(values: Vec<f64>) -> Result<Self> {
        Self::new(values, 1.0, 0)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn min_max(&self) -> (f64, f64) {
        self.values
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)))
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    /// Population variance.
    pub fn variance(&self) -> f64 {
        let mean = self.mean();
        self.values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / self.values.len() as f64
    }

    pub fn is_constant(&self) -> bool {
        let (lo, hi) = self.min_max();
        !(hi > lo)
    }
}
