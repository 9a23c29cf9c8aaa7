use crate::error::{invalid, Result};
use crate::model::observables::{Dynamics, Field};
use crate::model::params::ModelParams;
use crate::series::ScalarTimeSeries;

/// Samples discarded by default before analysis.
pub const DEFAULT_BURN_IN: usize = 10_000;

/// `s(i) = <N_1>(tau = burn_in + i)` for `i = 1..=total_steps - burn_in`, unit step.
pub fn generate_series(params: &ModelParams, total_steps: usize, burn_in: usize) -> Result<ScalarTimeSeries> {
    let dynamics = Dynamics::new(params)?;
    series_from_dynamics(&dynamics, total_steps, burn_in)
}

pub fn series_from_dynamics(dynamics: &Dynamics, total_steps: usize, burn_in: usize) -> Result<ScalarTimeSeries> {
    if total_steps <= burn_in {
        return Err(invalid(
            "total_steps",
            format!("{total_steps} must exceed burn_in = {burn_in}"),
        ));
    }
    let values = dynamics.sample_mean_photon_number(Field::One, burn_in as f64 + 1.0, 1.0, total_steps - burn_in);
    ScalarTimeSeries::new(values, 1.0, burn_in)
}

/// Ratio of the sample standard deviation of `samples[late]` to that of
/// `samples[early]`, where `samples[k]` is the value at `tau = k`.
///
/// A value well below one means the oscillations have collapsed.
pub fn collapse_statistic(samples: &[f64], early: std::ops::Range<usize>, late: std::ops::Range<usize>) -> Result<f64> {
    if late.end > samples.len() || early.end > samples.len() {
        return Err(invalid("samples", "window extends beyond the trajectory"));
    }
    let sd = |xs: &[f64]| {
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
    };
    Ok(sd(&samples[late]) / sd(&samples[early]))
}
