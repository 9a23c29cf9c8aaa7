use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::series::ScalarTimeSeries;
use crate::spatial::KdTree;

pub const MAX_DIMENSION: usize = 12;
pub const FNN_RATIO: f64 = 10.0;
pub const FNN_THRESHOLD: f64 = 0.01;
const COINCIDENCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct DimensionSelection {
    pub dim: usize,
    /// `fractions[k]` is the false-neighbour fraction at dimension `k + 1`.
    pub fractions: Vec<f64>,
    /// True when no dimension up to the cap met the threshold.
    pub capped: bool,
}

/// Fraction of false nearest neighbours when going from `dim` to `dim + 1`.
///
/// Neighbours closer than `COINCIDENCE * std(series)` are skipped: the ratio is
/// undefined for exact repeats and dominated by rounding for near-exact ones.
pub fn false_neighbor_fraction(series: &ScalarTimeSeries, delay: usize, dim: usize) -> Result<f64> {
    let s = series.values();
    let span = dim * delay;
    if s.len() <= span + 1 {
        return Err(Error::InsufficientLength { len: s.len(), needed: span + 2 });
    }
    let count = s.len() - span;
    let mut points = Vec::with_capacity(count * dim);
    for i in 0..count {
        for j in 0..dim {
            points.push(s[i + j * delay]);
        }
    }
    let tree = KdTree::new(&points, dim);
    let floor = COINCIDENCE * series.variance().sqrt();
    let (tested, false_count) = (0..count)
        .into_par_iter()
        .map(|i| {
            let q = &points[i * dim..(i + 1) * dim];
            match tree.nearest(q, |j, d| j != i && d > floor) {
                Some((j, d)) => {
                    let extra = (s[i + span] - s[j + span]).abs();
                    (1usize, usize::from(extra / d > FNN_RATIO))
                }
                None => (0, 0),
            }
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
    if tested == 0 {
        return Err(Error::Degenerate("no point has a distinct neighbour".into()));
    }
    Ok(false_count as f64 / tested as f64)
}

pub fn select_dimension_detailed(series: &ScalarTimeSeries, delay: usize) -> Result<DimensionSelection> {
    if delay == 0 {
        return Err(crate::error::invalid("t_d", "delay must be positive"));
    }
    if series.is_constant() {
        return Err(Error::Degenerate("constant series has no neighbour structure".into()));
    }
    let mut fractions = Vec::new();
    for dim in 1..=MAX_DIMENSION {
        let f = false_neighbor_fraction(series, delay, dim)?;
        fractions.push(f);
        if f < FNN_THRESHOLD {
            return Ok(DimensionSelection { dim, fractions, capped: false });
        }
    }
    Ok(DimensionSelection { dim: MAX_DIMENSION, fractions, capped: true })
}

pub fn select_dimension(series: &ScalarTimeSeries, delay: usize) -> Result<usize> {
    select_dimension_detailed(series, delay).map(|s| s.dim)
}
