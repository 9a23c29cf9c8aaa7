//! Exact k-d tree over a flat row-major point set of runtime dimension.

const LEAF_SIZE: usize = 16;

#[derive(Debug, Clone)]
struct Node {
    /// Range into `KdTree::order`.
    start: usize,
    end: usize,
    /// Child node indices; `usize::MAX` for leaves.
    left: usize,
    right: usize,
    lower: Vec<f64>,
    upper: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct KdTree<'a> {
    points: &'a [f64],
    dim: usize,
    order: Vec<usize>,
    nodes: Vec<Node>,
}

/// Euclidean distance; every recurrence decision goes through this function.
#[inline]
pub fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

impl<'a> KdTree<'a> {
    pub fn new(points: &'a [f64], dim: usize) -> Self {
        assert!(dim > 0 && points.len().is_multiple_of(dim));
        let n = points.len() / dim;
        let mut tree = KdTree {
            points,
            dim,
            order: (0..n).collect(),
            nodes: Vec::new(),
        };
        if n > 0 {
            tree.build(0, n);
        }
        tree
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn point(&self, idx: usize) -> &'a [f64] {
        &self.points[idx * self.dim..(idx + 1) * self.dim]
    }

    fn build(&mut self, start: usize, end: usize) -> usize {
        let dim = self.dim;
        let mut lower = vec![f64::INFINITY; dim];
        let mut upper = vec![f64::NEG_INFINITY; dim];
        for &i in &self.order[start..end] {
            let p = &self.points[i * dim..(i + 1) * dim];
            for k in 0..dim {
                lower[k] = lower[k].min(p[k]);
                upper[k] = upper[k].max(p[k]);
            }
        }
        let id = self.nodes.len();
        self.nodes.push(Node {
            start,
            end,
            left: usize::MAX,
            right: usize::MAX,
            lower: lower.clone(),
            upper: upper.clone(),
        });
        if end - start <= LEAF_SIZE {
            return id;
        }
        let axis = (0..dim)
            .max_by(|&a, &b| (upper[a] - lower[a]).total_cmp(&(upper[b] - lower[b])))
            .unwrap();
        if upper[axis] - lower[axis] == 0.0 {
            // All points coincide; keep them in one leaf.
            return id;
        }
        let mid = start + (end - start) / 2;
        let points = self.points;
        self.order[start..end].select_nth_unstable_by(mid - start, |&a, &b| {
            points[a * dim + axis].total_cmp(&points[b * dim + axis])
        });
        let left = self.build(start, mid);
        let right = self.build(mid, end);
        self.nodes[id].left = left;
        self.nodes[id].right = right;
        id
    }

    fn box_distance(&self, node: &Node, q: &[f64]) -> f64 {
        let mut d2 = 0.0;
        for k in 0..self.dim {
            let gap = if q[k] < node.lower[k] {
                node.lower[k] - q[k]
            } else if q[k] > node.upper[k] {
                q[k] - node.upper[k]
            } else {
                0.0
            };
            d2 += gap * gap;
        }
        d2.sqrt()
    }

    /// Closest point to `q` among those with `accept(index, distance)`, as `(index, distance)`.
    /// Ties are broken towards the smaller index.
    pub fn nearest(&self, q: &[f64], accept: impl Fn(usize, f64) -> bool) -> Option<(usize, f64)> {
        if self.nodes.is_empty() {
            return None;
        }
        let mut best: Option<(usize, f64)> = None;
        let mut stack = vec![(0usize, 0.0f64)];
        while let Some((id, bound)) = stack.pop() {
            if let Some((_, d)) = best {
                if bound > d {
                    continue;
                }
            }
            let node = &self.nodes[id];
            if node.left == usize::MAX {
                for &i in &self.order[node.start..node.end] {
                    let d = distance(q, self.point(i));
                    if !accept(i, d) {
                        continue;
                    }
                    let better = match best {
                        None => true,
                        Some((bi, bd)) => d < bd || (d == bd && i < bi),
                    };
                    if better {
                        best = Some((i, d));
                    }
                }
                continue;
            }
            let dl = self.box_distance(&self.nodes[node.left], q);
            let dr = self.box_distance(&self.nodes[node.right], q);
            // Push the farther child first so the nearer one is searched first.
            if dl <= dr {
                stack.push((node.right, dr));
                stack.push((node.left, dl));
            } else {
                stack.push((node.left, dl));
                stack.push((node.right, dr));
            }
        }
        best
    }

    /// Calls `visit(index, distance)` for every point with `distance(q, p) <= radius`.
    pub fn for_each_within(&self, q: &[f64], radius: f64, mut visit: impl FnMut(usize, f64)) {
        if self.nodes.is_empty() {
            return;
        }
        let mut stack = vec![0usize];
        while let Some(id) = stack.pop() {
            let node = &self.nodes[id];
            if self.box_distance(node, q) > radius {
                continue;
            }
            if node.left == usize::MAX {
                for &i in &self.order[node.start..node.end] {
                    let d = distance(q, self.point(i));
                    if d <= radius {
                        visit(i, d);
                    }
                }
            } else {
                stack.push(node.right);
                stack.push(node.left);
            }
        }
    }

    /// Sorted indices within `radius` of `q`.
    pub fn within(&self, q: &[f64], radius: f64) -> Vec<usize> {
        let mut out = Vec::new();
        self.for_each_within(q, radius, |i, _| out.push(i));
        out.sort_unstable();
        out
    }

    pub fn count_within(&self, q: &[f64], radius: f64) -> usize {
        let mut count = 0;
        self.for_each_within(q, radius, |_, _| count += 1);
        count
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn cloud(n: usize, dim: usize, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n * dim).map(|_| rng.random_range(-1.0..1.0)).collect()
    }

    #[test]
    fn nearest_matches_linear_scan() {
        for dim in [1, 2, 3, 7] {
            let pts = cloud(700, dim, dim as u64);
            let tree = KdTree::new(&pts, dim);
            for i in (0..700).step_by(13) {
                let q = &pts[i * dim..(i + 1) * dim];
                let exclude = |j: usize| (j as i64 - i as i64).abs() > 5;
                let got = tree.nearest(q, |j, _| exclude(j)).unwrap();
                let want = (0..700)
                    .filter(|&j| exclude(j))
                    .map(|j| (j, distance(q, &pts[j * dim..(j + 1) * dim])))
                    .min_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)))
                    .unwrap();
                assert_eq!(got, want);
            }
        }
    }

    #[test]
    fn radius_query_matches_linear_scan() {
        let dim = 3;
        let pts = cloud(900, dim, 3);
        let tree = KdTree::new(&pts, dim);
        for i in (0..900).step_by(29) {
            let q = &pts[i * dim..(i + 1) * dim];
            let r = 0.35;
            let want: Vec<usize> = (0..900).filter(|&j| distance(q, &pts[j * dim..(j + 1) * dim]) <= r).collect();
            assert_eq!(tree.within(q, r), want);
            assert_eq!(tree.count_within(q, r), want.len());
        }
    }

    #[test]
    fn coincident_points() {
        let pts = vec![0.5; 3 * 100];
        let tree = KdTree::new(&pts, 3);
        assert_eq!(tree.count_within(&[0.5, 0.5, 0.5], 0.0), 100);
        assert_eq!(tree.nearest(&[0.5, 0.5, 0.5], |j, _| j != 0), Some((1, 0.0)));
    }
}
