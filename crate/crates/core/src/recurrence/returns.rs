use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::series::ScalarTimeSeries;

use super::dip::dip_statistic;

pub const DEFAULT_CELLS: usize = 50;
pub const RING_DIP_THRESHOLD: f64 = 0.05;
pub const SPIKE_FRACTION: f64 = 0.1;

/// Pairs `(s(i), s(i + stride))`.
pub fn return_map(series: &ScalarTimeSeries, stride: usize) -> Vec<(f64, f64)> {
    let s = series.values();
    if stride == 0 || s.len() <= stride {
        return Vec::new();
    }
    s.iter().zip(&s[stride..]).map(|(&a, &b)| (a, b)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RingStatistic {
    pub centroid: (f64, f64),
    /// Dip of the symmetrised squared radii about the centroid.
    pub dip: f64,
}

impl RingStatistic {
    pub fn is_annular(&self) -> bool {
        self.dip > RING_DIP_THRESHOLD
    }
}

/// Bimodality of the radial distribution of a planar point set.
///
/// Squared radii are used so that a uniformly filled disc maps to a flat
/// distribution; mirroring them about zero turns a ring into two modes.
pub fn ring_statistic(points: &[(f64, f64)]) -> Result<RingStatistic> {
    if points.len() < 4 {
        return Err(Error::InsufficientLength { len: points.len(), needed: 4 });
    }
    let n = points.len() as f64;
    let cx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let cy = points.iter().map(|p| p.1).sum::<f64>() / n;
    let mut sample = Vec::with_capacity(2 * points.len());
    for &(x, y) in points {
        let r2 = (x - cx).powi(2) + (y - cy).powi(2);
        sample.push(r2);
        sample.push(-r2);
    }
    Ok(RingStatistic { centroid: (cx, cy), dip: dip_statistic(&sample) })
}

/// First-return times to equal-width cells of the series range.
#[derive(Debug, Clone, PartialEq)]
pub struct ReturnHistogram {
    /// `n_cells + 1` strictly increasing edges.
    pub edges: Vec<f64>,
    /// Per cell: return time -> count.
    pub per_cell: Vec<BTreeMap<usize, usize>>,
    pub pooled: BTreeMap<usize, usize>,
    /// Samples falling in each cell.
    pub visits: Vec<usize>,
}

impl ReturnHistogram {
    pub fn n_cells(&self) -> usize {
        self.per_cell.len()
    }

    /// Most-visited cell; ties go to the lower index.
    pub fn generic_cell(&self) -> usize {
        let max = *self.visits.iter().max().unwrap_or(&0);
        self.visits.iter().position(|&v| v == max).unwrap_or(0)
    }
}

pub fn cell_index(value: f64, lo: f64, width: f64, n_cells: usize) -> usize {
    (((value - lo) / width) as usize).min(n_cells - 1)
}

/// Records, for each visit to a cell that leaves it on the next step, the number
/// of steps until the series first re-enters that cell.
pub fn first_return_distribution(series: &ScalarTimeSeries, n_cells: usize) -> Result<ReturnHistogram> {
    if n_cells == 0 {
        return Err(crate::error::invalid("n_cells", "must be positive"));
    }
    if series.is_constant() {
        return Err(Error::Degenerate("constant series occupies a single point".into()));
    }
    let (lo, hi) = series.min_max();
    let width = (hi - lo) / n_cells as f64;
    let mut edges: Vec<f64> = (0..n_cells).map(|k| lo + k as f64 * width).collect();
    edges.push(hi);
    let cells: Vec<usize> = series.values().iter().map(|&v| cell_index(v, lo, width, n_cells)).collect();

    let mut per_cell = vec![BTreeMap::new(); n_cells];
    let mut pooled = BTreeMap::new();
    let mut visits = vec![0usize; n_cells];
    let mut last_exit: Vec<Option<usize>> = vec![None; n_cells];
    for (t, &c) in cells.iter().enumerate() {
        visits[c] += 1;
        if let Some(start) = last_exit[c].take() {
            let dt = t - start;
            *per_cell[c].entry(dt).or_insert(0) += 1;
            *pooled.entry(dt).or_insert(0) += 1;
        }
        if t + 1 < cells.len() && cells[t + 1] != c {
            last_exit[c] = Some(t);
        }
    }
    Ok(ReturnHistogram { edges, per_cell, pooled, visits })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpikeSummary {
    /// Return time of the largest bin (earliest on ties).
    pub dominant: usize,
    pub dominant_count: usize,
    /// Other local maxima above `SPIKE_FRACTION` of the largest bin.
    pub secondary: Vec<(usize, usize)>,
}

impl SpikeSummary {
    pub fn all_secondary_left(&self) -> bool {
        self.secondary.iter().all(|&(t, _)| t < self.dominant)
    }

    pub fn all_secondary_right(&self) -> bool {
        self.secondary.iter().all(|&(t, _)| t > self.dominant)
    }
}

/// Spikes of a return-time histogram: bins that exceed their left neighbour,
/// are not exceeded by their right neighbour and hold more than
/// `fraction` of the largest count. Absent return times count as zero.
pub fn spikes(histogram: &BTreeMap<usize, usize>, fraction: f64) -> Option<SpikeSummary> {
    let (&dominant, &dominant_count) = histogram.iter().fold(None, |best: Option<(&usize, &usize)>, (t, c)| {
        match best {
            Some((_, bc)) if bc >= c => best,
            _ => Some((t, c)),
        }
    })?;
    let count = |t: usize| histogram.get(&t).copied().unwrap_or(0);
    let secondary = histogram
        .iter()
        .filter(|&(&t, &c)| {
            t != dominant
                && c as f64 > fraction * dominant_count as f64
                && c > if t == 0 { 0 } else { count(t - 1) }
                && c >= count(t + 1)
        })
        .map(|(&t, &c)| (t, c))
        .collect();
    Some(SpikeSummary { dominant, dominant_count, secondary })
}
