use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::spatial::KdTree;

use super::cloud::EmbeddedCloud;

pub const DEFAULT_FIT_RANGE: (usize, usize) = (1, 30);
pub const MIN_R_SQUARED: f64 = 0.9;

#[derive(Debug, Clone, PartialEq)]
pub struct LyapunovEstimate {
    /// Slope of the mean log-divergence curve, per unit of step.
    pub exponent: f64,
    /// Coefficient of determination of the linear fit.
    pub r_squared: f64,
    /// Mean log-divergence for `k = 0..=fit_range.1`.
    pub divergence: Vec<f64>,
    pub fit_range: (usize, usize),
    pub theiler_window: usize,
    /// Fraction of reference points that found an admissible neighbour.
    pub valid_fraction: f64,
}

impl LyapunovEstimate {
    pub fn is_linear(&self) -> bool {
        self.r_squared > MIN_R_SQUARED
    }
}

/// Least-squares slope, intercept and R² of `y` against `x`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let syy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    let slope = sxy / sxx;
    let r2 = if syy > 0.0 { sxy * sxy / (sxx * syy) } else { 1.0 };
    (slope, my - slope * mx, r2)
}

/// Rosenstein estimate of the maximal Lyapunov exponent.
///
/// Every reference point `i` is paired with its nearest neighbour `j` outside
/// `|i - j| <= theiler_window`. Both must have `fit_range.1` future steps.
pub fn max_lyapunov(cloud: &EmbeddedCloud, theiler_window: usize, fit_range: (usize, usize)) -> Result<LyapunovEstimate> {
    let (k0, k1) = fit_range;
    if k1 <= k0 {
        return Err(crate::error::invalid("fit_range", format!("({k0}, {k1}) is empty")));
    }
    let n = cloud.len();
    if n <= k1 + 2 {
        return Err(Error::InsufficientLength { len: n, needed: k1 + 3 });
    }
    let usable = n - k1;
    let dim = cloud.dim();
    let tree = KdTree::new(&cloud.as_flat()[..usable * dim], dim);
    let pairs: Vec<Option<usize>> = (0..usable)
        .into_par_iter()
        .map(|i| {
            tree.nearest(cloud.point(i), |j, d| j.abs_diff(i) > theiler_window && d > 0.0)
                .map(|(j, _)| j)
        })
        .collect();
    let found = pairs.iter().filter(|p| p.is_some()).count();
    if 2 * found < usable {
        return Err(Error::InsufficientNeighbors { found, total: usable });
    }
    let divergence: Vec<f64> = (0..=k1)
        .into_par_iter()
        .map(|k| {
            let (sum, count) = pairs
                .iter()
                .enumerate()
                .filter_map(|(i, p)| p.map(|j| crate::spatial::distance(cloud.point(i + k), cloud.point(j + k))))
                .filter(|&d| d > 0.0)
                .fold((0.0, 0usize), |(s, c), d| (s + d.ln(), c + 1));
            if count == 0 {
                f64::NEG_INFINITY
            } else {
                sum / count as f64
            }
        })
        .collect();
    let xs: Vec<f64> = (k0..=k1).map(|k| k as f64).collect();
    let ys = &divergence[k0..=k1];
    if ys.iter().any(|v| !v.is_finite()) {
        return Err(Error::Degenerate("divergence curve collapsed to zero".into()));
    }
    let (slope, _, r_squared) = linear_fit(&xs, ys);
    Ok(LyapunovEstimate {
        exponent: slope,
        r_squared,
        divergence,
        fit_range,
        theiler_window,
        valid_fraction: found as f64 / usable as f64,
    })
}
