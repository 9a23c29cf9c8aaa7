use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::series::ScalarTimeSeries;
use crate::spatial::{distance, KdTree};

/// Delay vectors stored row-major: point `i` is `points[i*dim..(i+1)*dim]`.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddedCloud {
    points: Vec<f64>,
    dim: usize,
    delay: usize,
}

impl EmbeddedCloud {
    /// Wraps an arbitrary flat point set; `delay` is recorded as 1.
    pub fn from_points(points: Vec<f64>, dim: usize) -> Result<Self> {
        if dim == 0 || !points.len().is_multiple_of(dim) {
            return Err(crate::error::invalid("dim", "point buffer is not a whole number of points"));
        }
        if points.iter().any(|v| !v.is_finite()) {
            return Err(crate::error::invalid("points", "non-finite coordinate"));
        }
        Ok(EmbeddedCloud { points, dim, delay: 1 })
    }

    pub fn len(&self) -> usize {
        self.points.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn delay(&self) -> usize {
        self.delay
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i * self.dim..(i + 1) * self.dim]
    }

    pub fn as_flat(&self) -> &[f64] {
        &self.points
    }

    pub fn tree(&self) -> KdTree<'_> {
        KdTree::new(&self.points, self.dim)
    }

    /// Largest pairwise Euclidean distance (exact, quadratic).
    pub fn diameter(&self) -> f64 {
        let n = self.len();
        (0..n)
            .into_par_iter()
            .map(|i| {
                let p = self.point(i);
                (i + 1..n).map(|j| distance(p, self.point(j))).fold(0.0, f64::max)
            })
            .reduce(|| 0.0, f64::max)
    }

    pub fn all_coincident(&self) -> bool {
        let n = self.len();
        n == 0 || (1..n).all(|i| self.point(i) == self.point(0))
    }
}

/// `x_i = [s(i), s(i + t_d), ..., s(i + (d_emb - 1) t_d)]`, giving `N - (d_emb - 1) t_d` vectors.
pub fn delay_embed(series: &ScalarTimeSeries, delay: usize, dim: usize) -> Result<EmbeddedCloud> {
    if delay == 0 {
        return Err(crate::error::invalid("t_d", "delay must be positive"));
    }
    if dim == 0 {
        return Err(crate::error::invalid("d_emb", "dimension must be positive"));
    }
    let s = series.values();
    let span = (dim - 1) * delay;
    if s.len() <= span {
        return Err(Error::InsufficientLength { len: s.len(), needed: span + 1 });
    }
    let count = s.len() - span;
    let mut points = Vec::with_capacity(count * dim);
    for i in 0..count {
        for j in 0..dim {
            points.push(s[i + j * delay]);
        }
    }
    Ok(EmbeddedCloud { points, dim, delay })
}
