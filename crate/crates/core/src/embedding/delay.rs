use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::series::ScalarTimeSeries;

pub const AMI_BINS: usize = 64;
pub const MAX_LAG: usize = 200;
const MIN_LENGTH: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DelayRule {
    MutualInformation,
    Autocorrelation,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DelaySelection {
    pub delay: usize,
    pub rule: DelayRule,
    /// `ami[k]` is the mutual information at lag `k + 1`, in nats.
    pub ami: Vec<f64>,
    /// Plateau tolerance used when locating the minimum.
    pub tolerance: f64,
}

fn bin_indices(s: &[f64], bins: usize) -> Vec<usize> {
    let (lo, hi) = s.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    let width = hi - lo;
    s.iter()
        .map(|&v| (((v - lo) / width * bins as f64) as usize).min(bins - 1))
        .collect()
}

fn entropy(bins: &[usize], nbins: usize) -> f64 {
    let mut counts = vec![0usize; nbins];
    for &b in bins {
        counts[b] += 1;
    }
    let total = bins.len() as f64;
    counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / total;
            -p * p.ln()
        })
        .sum()
}

fn mutual_information(bins: &[usize], nbins: usize, lag: usize) -> f64 {
    let pairs = bins.len() - lag;
    let mut joint = vec![0usize; nbins * nbins];
    let mut left = vec![0usize; nbins];
    let mut right = vec![0usize; nbins];
    for i in 0..pairs {
        let (a, b) = (bins[i], bins[i + lag]);
        joint[a * nbins + b] += 1;
        left[a] += 1;
        right[b] += 1;
    }
    let total = pairs as f64;
    let mut mi = 0.0;
    for a in 0..nbins {
        for b in 0..nbins {
            let c = joint[a * nbins + b];
            if c > 0 {
                let pab = c as f64 / total;
                mi += pab * (c as f64 * total / (left[a] as f64 * right[b] as f64)).ln();
            }
        }
    }
    mi
}

/// Histogram estimate of the average mutual information for lags `1..=max_lag`.
pub fn average_mutual_information(series: &ScalarTimeSeries, max_lag: usize) -> Result<Vec<f64>> {
    if series.is_constant() {
        return Err(Error::NoStructure);
    }
    if series.len() <= max_lag + 1 {
        return Err(Error::InsufficientLength { len: series.len(), needed: max_lag + 2 });
    }
    let bins = bin_indices(series.values(), AMI_BINS);
    Ok((1..=max_lag)
        .into_par_iter()
        .map(|lag| mutual_information(&bins, AMI_BINS, lag))
        .collect())
}

/// Biased autocorrelation estimate for lags `1..=max_lag`.
pub fn autocorrelation(series: &ScalarTimeSeries, max_lag: usize) -> Vec<f64> {
    let s = series.values();
    let mean = series.mean();
    let var: f64 = s.iter().map(|v| (v - mean).powi(2)).sum();
    (1..=max_lag.min(s.len().saturating_sub(1)))
        .map(|lag| {
            let c: f64 = s.iter().zip(&s[lag..]).map(|(a, b)| (a - mean) * (b - mean)).sum();
            c / var
        })
        .collect()
}

/// Locates the first minimum of `ami`, treating values within `tol` as equal.
///
/// The first lag whose successor does not drop by more than `tol` opens a
/// plateau. A plateau closed by a rise reports its midpoint. One that runs to
/// the end of the scan reports its first lag.
fn plateau_minimum(ami: &[f64], tol: f64) -> Option<usize> {
    let start = (0..ami.len().saturating_sub(1)).find(|&k| ami[k] <= ami[k + 1] + tol)?;
    let mut end = start;
    while end + 1 < ami.len() && ami[end + 1] <= ami[start] + tol {
        end += 1;
    }
    let k = if end + 1 == ami.len() { start } else { (start + end) / 2 };
    Some(k + 1)
}

pub fn select_delay_detailed(series: &ScalarTimeSeries) -> Result<DelaySelection> {
    if series.len() < MIN_LENGTH {
        return Err(Error::InsufficientLength { len: series.len(), needed: MIN_LENGTH });
    }
    let ami = average_mutual_information(series, MAX_LAG)?;
    let n = series.len() as f64;
    let entropy = entropy(&bin_indices(series.values(), AMI_BINS), AMI_BINS);
    // Eight standard deviations of the plug-in estimator under independence,
    // floored at a small fraction of the marginal entropy.
    let sampling = 8.0 * std::f64::consts::SQRT_2 * (AMI_BINS - 1) as f64 / (2.0 * n);
    let tolerance = sampling.max(1e-3 * entropy);
    if let Some(delay) = plateau_minimum(&ami, tolerance) {
        return Ok(DelaySelection { delay, rule: DelayRule::MutualInformation, ami, tolerance });
    }
    let acf = autocorrelation(series, MAX_LAG);
    let threshold = (-1.0f64).exp();
    match acf.iter().position(|&r| r < threshold) {
        Some(k) => Ok(DelaySelection { delay: k + 1, rule: DelayRule::Autocorrelation, ami, tolerance }),
        None => Err(Error::NoStructure),
    }
}

pub fn select_delay(series: &ScalarTimeSeries) -> Result<usize> {
    select_delay_detailed(series).map(|s| s.delay)
}
