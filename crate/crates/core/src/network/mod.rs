//! Epsilon-recurrence networks and their link density, clustering and transitivity.

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicU64, Ordering};

use rayon::prelude::*;

use crate::embedding::EmbeddedCloud;
use crate::error::{Error, Result};
use crate::recurrence::RecurrenceGraph;
use crate::spatial::distance;

pub const DEFAULT_TARGET_LD: f64 = 0.02;
pub const LD_RELATIVE_TOLERANCE: f64 = 0.05;
pub const LD_MAX_ITERATIONS: usize = 40;

/// Undirected simple graph as sorted neighbour lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Adjacency {
    neighbors: Vec<Vec<u32>>,
}

impl Adjacency {
    /// Self-loops and duplicates are dropped; edges are symmetrised.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Self {
        let mut neighbors = vec![Vec::new(); n];
        for &(i, j) in edges {
            if i != j {
                neighbors[i].push(j as u32);
                neighbors[j].push(i as u32);
            }
        }
        for list in &mut neighbors {
            list.sort_unstable();
            list.dedup();
        }
        Adjacency { neighbors }
    }

    pub fn len(&self) -> usize {
        self.neighbors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.neighbors.is_empty()
    }

    pub fn neighbors(&self, i: usize) -> &[u32] {
        &self.neighbors[i]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.neighbors[i].len()
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.neighbors[i].binary_search(&(j as u32)).is_ok()
    }

    pub fn edge_count(&self) -> usize {
        self.neighbors.iter().map(Vec::len).sum::<usize>() / 2
    }
}

/// `A = R - I`.
pub fn adjacency_from_recurrence(graph: &RecurrenceGraph) -> Adjacency {
    let neighbors = (0..graph.len())
        .map(|i| graph.row(i).iter().copied().filter(|&j| j as usize != i).collect())
        .collect();
    Adjacency { neighbors }
}

/// Recurrence network built straight from the cloud at threshold `epsilon`.
pub fn recurrence_network(cloud: &EmbeddedCloud, epsilon: f64) -> Adjacency {
    let tree = cloud.tree();
    let neighbors = (0..cloud.len())
        .into_par_iter()
        .map(|i| {
            tree.within(cloud.point(i), epsilon)
                .into_iter()
                .filter(|&j| j != i)
                .map(|j| j as u32)
                .collect()
        })
        .collect();
    Adjacency { neighbors }
}

fn intersection_above(a: &[u32], b: &[u32], floor: u32, mut hit: impl FnMut(u32)) {
    let start_a = a.partition_point(|&x| x <= floor);
    let start_b = b.partition_point(|&x| x <= floor);
    let (mut i, mut j) = (start_a, start_b);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                hit(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
}

/// Triangles through each node. Each triangle `u < v < w` is found once, from
/// the edge `(u, v)`, by intersecting the parts of both lists above `v`.
pub fn triangles_per_node(a: &Adjacency) -> Vec<u64> {
    let counts: Vec<AtomicU64> = (0..a.len()).map(|_| AtomicU64::new(0)).collect();
    (0..a.len()).into_par_iter().for_each(|u| {
        let nu = a.neighbors(u);
        let mut own = 0u64;
        for &v in nu.iter().filter(|&&v| v as usize > u) {
            intersection_above(nu, a.neighbors(v as usize), v, |w| {
                own += 1;
                counts[v as usize].fetch_add(1, Ordering::Relaxed);
                counts[w as usize].fetch_add(1, Ordering::Relaxed);
            });
        }
        counts[u].fetch_add(own, Ordering::Relaxed);
    });
    counts.into_iter().map(AtomicU64::into_inner).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct NetworkMeasures {
    pub nodes: usize,
    pub link_density: f64,
    /// Mean of the local coefficients, with `C_i = 0` for `k_i < 2`.
    pub global_clustering: f64,
    pub transitivity: f64,
    pub triangles: u64,
    /// Degree -> number of nodes.
    pub degree_histogram: BTreeMap<usize, usize>,
}

pub fn local_clustering(a: &Adjacency) -> Vec<f64> {
    let t = triangles_per_node(a);
    (0..a.len())
        .map(|i| {
            let k = a.degree(i) as f64;
            if k < 2.0 {
                0.0
            } else {
                2.0 * t[i] as f64 / (k * (k - 1.0))
            }
        })
        .collect()
}

pub fn network_measures(a: &Adjacency) -> Result<NetworkMeasures> {
    let n = a.len();
    if n < 3 {
        return Err(Error::InsufficientLength { len: n, needed: 3 });
    }
    let t = triangles_per_node(a);
    let mut degree_sum = 0u64;
    let mut wedges = 0u64;
    let mut closed = 0u64;
    let mut clustering = 0.0;
    let mut degree_histogram = BTreeMap::new();
    for i in 0..n {
        let k = a.degree(i) as u64;
        degree_sum += k;
        *degree_histogram.entry(k as usize).or_insert(0) += 1;
        if k >= 2 {
            wedges += k * (k - 1);
            closed += 2 * t[i];
            clustering += 2.0 * t[i] as f64 / (k * (k - 1)) as f64;
        }
    }
    Ok(NetworkMeasures {
        nodes: n,
        link_density: degree_sum as f64 / (n as f64 * (n - 1) as f64),
        global_clustering: clustering / n as f64,
        transitivity: if wedges == 0 { 0.0 } else { closed as f64 / wedges as f64 },
        triangles: t.iter().sum::<u64>() / 3,
        degree_histogram,
    })
}

/// Link density of the recurrence network at `epsilon`, without storing it.
pub fn link_density(cloud: &EmbeddedCloud, epsilon: f64) -> f64 {
    crate::recurrence::recurrence_density(cloud, epsilon)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkDensitySearch {
    pub epsilon: f64,
    pub link_density: f64,
    pub iterations: usize,
}

/// Pairwise distance at quantile `q` over a strided subset of at most 2000 points.
fn sampled_quantile(cloud: &EmbeddedCloud, q: f64) -> f64 {
    let n = cloud.len();
    let stride = n.div_ceil(2000).max(1);
    let idx: Vec<usize> = (0..n).step_by(stride).collect();
    let mut d: Vec<f64> = idx
        .par_iter()
        .enumerate()
        .flat_map_iter(|(a, &i)| idx[a + 1..].iter().map(move |&j| distance(cloud.point(i), cloud.point(j))))
        .collect();
    if d.is_empty() {
        return 0.0;
    }
    let k = ((q * d.len() as f64) as usize).min(d.len() - 1);
    *d.select_nth_unstable_by(k, f64::total_cmp).1
}

/// Bisection for the threshold whose link density is within 5% of `target`.
///
/// The search bracket is seeded from a subsample and widened until it
/// provably contains the target, then halved for at most 40 steps.
pub fn epsilon_by_link_density_detailed(cloud: &EmbeddedCloud, target: f64) -> Result<LinkDensitySearch> {
    if !(target > 0.0 && target <= 1.0) {
        return Err(crate::error::invalid("target_ld", format!("{target} is outside (0, 1]")));
    }
    if cloud.len() < 3 {
        return Err(Error::InsufficientLength { len: cloud.len(), needed: 3 });
    }
    let close = |ld: f64| (ld - target).abs() < LD_RELATIVE_TOLERANCE * target;
    let mut best = LinkDensitySearch { epsilon: f64::NAN, link_density: f64::NAN, iterations: 0 };
    let probe = |eps: f64, best: &mut LinkDensitySearch| {
        let ld = link_density(cloud, eps);
        best.iterations += 1;
        if best.epsilon.is_nan() || (ld - target).abs() < (best.link_density - target).abs() {
            best.epsilon = eps;
            best.link_density = ld;
        }
        ld
    };

    let diameter = cloud.diameter();
    if diameter == 0.0 {
        // Every positive threshold links all points; report the smallest probe.
        probe(0.5f64.powi(LD_MAX_ITERATIONS as i32), &mut best);
        return Ok(best);
    }
    let reached = link_density(cloud, diameter);
    if reached < target {
        return Err(Error::UnreachableTarget { target, reached });
    }

    let mut hi = sampled_quantile(cloud, (2.0 * target).min(1.0)).max(f64::MIN_POSITIVE);
    let mut lo = sampled_quantile(cloud, 0.5 * target);
    loop {
        if hi >= diameter {
            hi = diameter;
            break;
        }
        let ld = probe(hi, &mut best);
        if close(ld) {
            return Ok(best);
        }
        if ld >= target {
            break;
        }
        lo = hi;
        hi *= 2.0;
    }
    while lo > 0.0 {
        let ld = probe(lo, &mut best);
        if close(ld) {
            return Ok(best);
        }
        if ld <= target {
            break;
        }
        hi = lo;
        lo *= 0.5;
        if lo < 1e-300 {
            lo = 0.0;
        }
    }
    for _ in 0..LD_MAX_ITERATIONS {
        let mid = 0.5 * (lo + hi);
        let ld = probe(mid, &mut best);
        if close(ld) {
            break;
        }
        if ld < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(best)
}

pub fn epsilon_by_link_density(cloud: &EmbeddedCloud, target: f64) -> Result<f64> {
    epsilon_by_link_density_detailed(cloud, target).map(|s| s.epsilon)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EpsilonRule {
    /// Critical threshold from graph connectivity.
    Connectivity,
    /// Threshold giving a target link density.
    TargetLinkDensity,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NetworkSummary {
    pub measures: NetworkMeasures,
    pub epsilon: f64,
    pub rule: EpsilonRule,
}

pub fn summarize(cloud: &EmbeddedCloud, epsilon: f64, rule: EpsilonRule) -> Result<NetworkSummary> {
    let measures = network_measures(&recurrence_network(cloud, epsilon))?;
    Ok(NetworkSummary { measures, epsilon, rule })
}
