use nalgebra::DMatrix;

use crate::embedding::EmbeddedCloud;
use crate::error::{Error, Result};
use crate::spatial::{distance, KdTree};

use super::graph::RecurrenceGraph;

pub const BISECTION_STEPS: usize = 40;
/// Eigenvalues of `L` below this count as zero.
pub const ZERO_EIGENVALUE: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct UnionFind {
    parent: Vec<usize>,
    rank: Vec<u8>,
    components: usize,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect(), rank: vec![0; n], components: n }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        match self.rank[ra].cmp(&self.rank[rb]) {
            std::cmp::Ordering::Less => self.parent[ra] = rb,
            std::cmp::Ordering::Greater => self.parent[rb] = ra,
            std::cmp::Ordering::Equal => {
                self.parent[rb] = ra;
                self.rank[ra] += 1;
            }
        }
        self.components -= 1;
        true
    }

    pub fn components(&self) -> usize {
        self.components
    }
}

/// Connected components of the recurrence graph at `epsilon`.
pub fn component_count(tree: &KdTree<'_>, epsilon: f64) -> usize {
    let n = tree.len();
    let mut uf = UnionFind::new(n);
    for i in 0..n {
        if uf.components() == 1 {
            break;
        }
        tree.for_each_within(tree.point(i), epsilon, |j, _| {
            if j > i {
                uf.union(i, j);
            }
        });
    }
    uf.components()
}

/// Largest distance between trajectory neighbours; the chain `x_0, x_1, ...`
/// is connected at this threshold, so it bounds the critical value from above.
pub fn max_consecutive_step(cloud: &EmbeddedCloud) -> f64 {
    (1..cloud.len())
        .map(|i| distance(cloud.point(i - 1), cloud.point(i)))
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalEpsilon {
    /// Smallest threshold found at which the graph is connected.
    pub epsilon: f64,
    /// Largest threshold found at which it is not.
    pub lower: f64,
    pub diameter: f64,
}

fn bisect(mut lo: f64, mut hi: f64, steps: usize, mut connected: impl FnMut(f64) -> bool) -> (f64, f64) {
    for _ in 0..steps {
        let mid = 0.5 * (lo + hi);
        if connected(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    (lo, hi)
}

fn check_cloud(cloud: &EmbeddedCloud) -> Result<f64> {
    if cloud.len() < 2 {
        return Err(Error::InsufficientLength { len: cloud.len(), needed: 2 });
    }
    if cloud.all_coincident() {
        return Err(Error::Degenerate("all points coincide, so the critical threshold is zero".into()));
    }
    Ok(cloud.diameter())
}

/// Smallest threshold at which the recurrence graph is connected, by bisection
/// with union-find connectivity checks.
pub fn epsilon_critical_with(cloud: &EmbeddedCloud, steps: usize) -> Result<CriticalEpsilon> {
    let diameter = check_cloud(cloud)?;
    let tree = cloud.tree();
    let upper = max_consecutive_step(cloud).min(diameter);
    let (lower, epsilon) = bisect(0.0, upper, steps, |eps| component_count(&tree, eps) == 1);
    Ok(CriticalEpsilon { epsilon, lower, diameter })
}

pub fn epsilon_critical(cloud: &EmbeddedCloud) -> Result<f64> {
    epsilon_critical_with(cloud, BISECTION_STEPS).map(|c| c.epsilon)
}

/// `L = D - R + I`, with `D` the degree matrix of the self-loop-free graph.
pub fn laplacian(graph: &RecurrenceGraph) -> DMatrix<f64> {
    let n = graph.len();
    let mut l = DMatrix::zeros(n, n);
    for i in 0..n {
        for &j in graph.row(i) {
            l[(i, j as usize)] -= 1.0;
        }
        l[(i, i)] += (graph.row(i).len() - 1) as f64 + 1.0;
    }
    l
}

pub fn laplacian_eigenvalues(graph: &RecurrenceGraph) -> Vec<f64> {
    let mut ev: Vec<f64> = laplacian(graph).symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

pub fn zero_eigenvalue_count(graph: &RecurrenceGraph) -> usize {
    laplacian_eigenvalues(graph).iter().filter(|v| v.abs() < ZERO_EIGENVALUE).count()
}

/// Dense reference: bisection on the threshold at which the second-smallest
/// Laplacian eigenvalue leaves zero. Limited to 500 points.
pub fn epsilon_critical_spectral(cloud: &EmbeddedCloud, steps: usize) -> Result<CriticalEpsilon> {
    if cloud.len() > 500 {
        return Err(crate::error::invalid("cloud", "the spectral reference is limited to 500 points"));
    }
    let diameter = check_cloud(cloud)?;
    let (lower, epsilon) = bisect(0.0, diameter, steps, |eps| {
        let graph = super::graph::recurrence_matrix(cloud, eps);
        laplacian_eigenvalues(&graph)[1] >= ZERO_EIGENVALUE
    });
    Ok(CriticalEpsilon { epsilon, lower, diameter })
}
