use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::series::ScalarTimeSeries;

pub const MIN_SPECTRUM_LENGTH: usize = 256;

/// One-sided periodogram; `power` sums to the population variance.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    /// Cycles per unit time.
    pub frequency: Vec<f64>,
    pub power: Vec<f64>,
}

impl Spectrum {
    pub fn total_power(&self) -> f64 {
        self.power.iter().sum()
    }

    /// Index of the largest bin.
    pub fn peak(&self) -> usize {
        (0..self.power.len()).max_by(|&a, &b| self.power[a].total_cmp(&self.power[b])).unwrap_or(0)
    }
}

pub fn power_spectrum(series: &ScalarTimeSeries) -> Result<Spectrum> {
    let n = series.len();
    if n < MIN_SPECTRUM_LENGTH {
        return Err(Error::InsufficientLength { len: n, needed: MIN_SPECTRUM_LENGTH });
    }
    let mean = series.mean();
    let mut buf: Vec<Complex64> = series.values().iter().map(|&v| Complex64::new(v - mean, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let norm = 1.0 / (n as f64 * n as f64);
    let half = n / 2;
    let mut frequency = Vec::with_capacity(half + 1);
    let mut power = Vec::with_capacity(half + 1);
    for (k, x) in buf.iter().enumerate().take(half + 1) {
        let fold = if k == 0 || (n.is_multiple_of(2) && k == half) { 1.0 } else { 2.0 };
        frequency.push(k as f64 / (n as f64 * series.dt));
        power.push(fold * x.norm_sqr() * norm);
    }
    Ok(Spectrum { frequency, power })
}
