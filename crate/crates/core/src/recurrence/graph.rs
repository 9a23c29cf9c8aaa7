use rayon::prelude::*;

use crate::embedding::EmbeddedCloud;

/// Thresholded recurrence structure `R_ij = [ |x_i - x_j| <= epsilon ]`,
/// stored as sorted neighbour lists that include `i` itself.
#[derive(Debug, Clone, PartialEq)]
pub struct RecurrenceGraph {
    neighbors: Vec<Vec<u32>>,
    epsilon: f64,
}

impl RecurrenceGraph {
    /// Builds a graph from explicit neighbour lists. Lists are symmetrised,
    /// sorted and given their diagonal entry.
    pub fn from_neighbor_lists(mut neighbors: Vec<Vec<u32>>, epsilon: f64) -> Self {
        let n = neighbors.len();
        let mut extra: Vec<(u32, u32)> = Vec::new();
        for (i, list) in neighbors.iter().enumerate() {
            for &j in list {
                extra.push((j, i as u32));
            }
        }
        for (j, i) in extra {
            neighbors[j as usize].push(i);
        }
        for (i, list) in neighbors.iter_mut().enumerate() {
            list.push(i as u32);
            list.sort_unstable();
            list.dedup();
            debug_assert!(list.iter().all(|&j| (j as usize) < n));
        }
        RecurrenceGraph { neighbors, epsilon }
    }

    pub fn len(&self) -> usize {
        self.neighbors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.neighbors.is_empty()
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// Recurrent partners of `i`, including `i`.
    pub fn row(&self, i: usize) -> &[u32] {
        &self.neighbors[i]
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        self.neighbors[i].binary_search(&(j as u32)).is_ok()
    }

    /// Number of ones in `R`, diagonal included.
    pub fn nnz(&self) -> usize {
        self.neighbors.iter().map(Vec::len).sum()
    }

    /// Fraction of off-diagonal entries equal to one.
    pub fn off_diagonal_density(&self) -> f64 {
        let n = self.len();
        if n < 2 {
            return 0.0;
        }
        (self.nnz() - n) as f64 / (n as f64 * (n - 1) as f64)
    }
}

/// Exact Euclidean recurrence matrix via fixed-radius k-d tree queries.
pub fn recurrence_matrix(cloud: &EmbeddedCloud, epsilon: f64) -> RecurrenceGraph {
    let tree = cloud.tree();
    let neighbors = (0..cloud.len())
        .into_par_iter()
        .map(|i| tree.within(cloud.point(i), epsilon).into_iter().map(|j| j as u32).collect())
        .collect();
    RecurrenceGraph { neighbors, epsilon }
}

/// Off-diagonal recurrence density at `epsilon`, counted without storing `R`.
pub fn recurrence_density(cloud: &EmbeddedCloud, epsilon: f64) -> f64 {
    let n = cloud.len();
    if n < 2 {
        return 0.0;
    }
    let tree = cloud.tree();
    let ones: usize = (0..n)
        .into_par_iter()
        .map(|i| tree.count_within(cloud.point(i), epsilon) - 1)
        .sum();
    ones as f64 / (n as f64 * (n - 1) as f64)
}

/// Recurrent `(i, j)` pairs with both indices divisible by `stride`, diagonal included.
pub fn recurrence_plot_data(graph: &RecurrenceGraph, stride: usize) -> Vec<(usize, usize)> {
    let stride = stride.max(1);
    (0..graph.len())
        .step_by(stride)
        .flat_map(|i| {
            graph
                .row(i)
                .iter()
                .map(|&j| j as usize)
                .filter(|j| j % stride == 0)
                .map(move |j| (i, j))
        })
        .collect()
}

/// Same pairs as [`recurrence_plot_data`] on the full graph, computed directly
/// from the cloud so that `R` is never materialised.
pub fn recurrence_plot_pairs(cloud: &EmbeddedCloud, epsilon: f64, stride: usize) -> Vec<(usize, usize)> {
    let stride = stride.max(1);
    let tree = cloud.tree();
    let rows: Vec<Vec<(usize, usize)>> = (0..cloud.len())
        .into_par_iter()
        .step_by(stride)
        .map(|i| {
            tree.within(cloud.point(i), epsilon)
                .into_iter()
                .filter(|j| j % stride == 0)
                .map(|j| (i, j))
                .collect()
        })
        .collect();
    rows.concat()
}
