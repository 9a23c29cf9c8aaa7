//! Closed-form amplitudes `A_nm`, `B_nm`, `C_nm` of the invariant three-level
//! blocks `{|1; n; m>, |2; n-1; m+1>, |3; n-1; m>}`.
//!
//! Within a block the amplitudes obey `i d/dt (A, B, C) = H (A, B, C)` with
//!
//! ```text
//!     | V11+V22    0        f1      |
//! H = |   0      V12+V21    f2      |
//!     |   f1       f2     V12+V22   |
//! ```
//!
//! and every amplitude is a sum of `exp(i mu_j t)` over the three roots of
//! `det(H + mu) = mu^3 + x1 mu^2 + x2 mu + x3`. The roots are evaluated in the
//! frame co-rotating with the initial-state energy `V11 + V22`, where the
//! cubic's coefficients are of the order of the level spacings instead of
//! `chi n^2`; this keeps the phase error of long series at the rounding level.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::model::params::{Convention, ModelParams};

/// Relative root separation below which the `b_j` denominators are treated
/// as singular.
pub const DEGENERACY_THRESHOLD: f64 = 1e-8;
const CHI_NUDGE: f64 = 1e-10;

/// Kerr and coupling matrix elements of one block.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlockCouplings {
    pub v11: f64,
    pub v12: f64,
    pub v21: f64,
    pub v22: f64,
    pub f1: f64,
    pub f2: f64,
}

impl BlockCouplings {
    pub fn new(n: usize, m: usize, chi: f64, params: &ModelParams) -> Self {
        let (nf, mf) = (n as f64, m as f64);
        BlockCouplings {
            v11: chi * nf * (nf - 1.0),
            v12: chi * (nf - 1.0) * (nf - 2.0),
            v21: chi * mf * (mf + 1.0),
            v22: chi * mf * (mf - 1.0),
            f1: params.lambda * nf.sqrt() * params.coupling_function(nf),
            f2: params.lambda * (mf + 1.0).sqrt(),
        }
    }

    /// Diagonal energies of `|1; n; m>`, `|2; n-1; m+1>`, `|3; n-1; m>`.
    pub fn diagonal(&self) -> [f64; 3] {
        [
            self.v11 + self.v22,
            self.v12 + self.v21,
            self.v12 + self.v22,
        ]
    }
}

/// Two-level solution used by the literal `m = 0` branch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VacuumBranch {
    pub y1: f64,
    pub y2: f64,
    pub alpha1: f64,
    pub alpha2: f64,
    pub c1: f64,
    pub c2: f64,
}

/// Every scalar that feeds the closed-form amplitudes of block `(n, m)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientIntermediates {
    pub n: usize,
    pub m: usize,
    pub couplings: BlockCouplings,
    pub x1: f64,
    pub x2: f64,
    pub x3: f64,
    pub theta: f64,
    /// Roots `mu_1..mu_3` in the order of the trigonometric formula.
    pub mu: [f64; 3],
    /// `mu_j + V11 + V22`, the same roots in the co-rotating frame.
    pub relative_mu: [f64; 3],
    pub b: [f64; 3],
    pub vacuum: Option<VacuumBranch>,
    /// Set when the roots were near-degenerate and chi was nudged by one part
    /// in 1e10 to separate them.
    pub chi_nudged: bool,
}

/// Roots of `mu^3 + x1 mu^2 + x2 mu + x3` by the trigonometric formula, with
/// the arccos argument clamped to `[-1, 1]`.
pub fn trigonometric_roots(x1: f64, x2: f64, x3: f64) -> ([f64; 3], f64) {
    let p = (x1 * x1 - 3.0 * x2).max(0.0);
    if p == 0.0 {
        // Triple root.
        let r = -x1 / 3.0;
        return ([r; 3], 0.0);
    }
    let arg = (9.0 * x1 * x2 - 2.0 * x1.powi(3) - 27.0 * x3) / (2.0 * p.powf(1.5));
    let theta = arg.clamp(-1.0, 1.0).acos() / 3.0;
    let scale = 2.0 / 3.0 * p.sqrt();
    let mut roots = [0.0; 3];
    for (j, r) in roots.iter_mut().enumerate() {
        *r = -x1 / 3.0 + scale * (theta + 2.0 / 3.0 * j as f64 * PI).cos();
    }
    (roots, theta)
}

pub fn intermediates(n: usize, m: usize, params: &ModelParams) -> Result<CoefficientIntermediates> {
    if n == 0 {
        return Err(invalid("n", "the n = 0 blocks have no three-level dynamics"));
    }
    match intermediates_at(n, m, params.chi, params) {
        Err(Error::NearDegenerateRoots { .. }) => {
            let nudged = params.chi * (1.0 + CHI_NUDGE) + if params.chi == 0.0 { CHI_NUDGE } else { 0.0 };
            let mut out = intermediates_at(n, m, nudged, params)?;
            out.chi_nudged = true;
            Ok(out)
        }
        other => other,
    }
}

fn intermediates_at(n: usize, m: usize, chi: f64, params: &ModelParams) -> Result<CoefficientIntermediates> {
    let c = BlockCouplings::new(n, m, chi, params);
    let BlockCouplings { v11, v12, v21, v22, f1, f2 } = c;
    let (f1s, f2s) = (f1 * f1, f2 * f2);

    let x1 = v11 + 2.0 * v12 + v21 + 2.0 * v22;
    let x2 = (v12 + v21) * (v11 + v12 + 2.0 * v22) + (v12 + v22) * (v11 + v22) - f1s - f2s;
    let x3 = (v12 + v21) * ((v12 + v22) * (v11 + v22) - f1s) - f2s * (v11 + v22);
    let (_, theta) = trigonometric_roots(x1, x2, x3);

    // Same cubic in z = mu + (V11 + V22).
    let [e1, e2, e3] = c.diagonal();
    let beta = e2 - e1;
    let gamma = e3 - e1;
    let (mut z, _) = trigonometric_roots(beta + gamma, beta * gamma - f1s - f2s, -f1s * beta);
    let char_poly = |z: f64| z * (z + beta) * (z + gamma) - f1s * (z + beta) - f2s * z;
    let char_slope =
        |z: f64| (z + beta) * (z + gamma) + z * (z + gamma) + z * (z + beta) - f1s - f2s;
    for root in z.iter_mut() {
        polish_root(root, &char_poly, &char_slope);
    }

    let mu = [z[0] - e1, z[1] - e1, z[2] - e1];
    let max_mu = mu.iter().fold(0.0f64, |a, &x| a.max(x.abs()));
    let separation = (z[0] - z[1]).abs().min((z[1] - z[2]).abs()).min((z[0] - z[2]).abs());
    if separation < DEGENERACY_THRESHOLD * max_mu || separation == 0.0 {
        return Err(Error::NearDegenerateRoots { n, m, separation });
    }

    let mut b = [0.0; 3];
    for j in 0..3 {
        let (k, l) = ((j + 1) % 3, (j + 2) % 3);
        b[j] = f1 * f2 / ((z[j] - z[k]) * (z[j] - z[l]));
    }

    let vacuum = (m == 0).then(|| vacuum_branch(&c));

    Ok(CoefficientIntermediates {
        n,
        m,
        couplings: c,
        x1,
        x2,
        x3,
        theta,
        mu,
        relative_mu: z,
        b,
        vacuum,
        chi_nudged: false,
    })
}

fn vacuum_branch(c: &BlockCouplings) -> VacuumBranch {
    let y1 = c.v11 + c.v12;
    let y2 = c.v12 * c.v11 - c.f1 * c.f1;
    // (y1^2 - 4 y2) rewritten as (V11 - V12)^2 + 4 f1^2 avoids cancellation.
    let disc = ((c.v11 - c.v12).powi(2) + 4.0 * c.f1 * c.f1).sqrt();
    let alpha1 = 0.5 * (-y1 + disc);
    let alpha2 = 0.5 * (-y1 - disc);
    VacuumBranch {
        y1,
        y2,
        alpha1,
        alpha2,
        c1: (c.v11 + alpha2) / (alpha2 - alpha1),
        c2: (c.v11 + alpha1) / (alpha1 - alpha2),
    }
}

fn polish_root(root: &mut f64, f: &impl Fn(f64) -> f64, df: &impl Fn(f64) -> f64) {
    for _ in 0..4 {
        let slope = df(*root);
        if slope == 0.0 {
            return;
        }
        let step = f(*root) / slope;
        let next = *root - step;
        if (f(next)).abs() >= f(*root).abs() {
            return;
        }
        *root = next;
    }
}

/// `A`, `B`, `C` of one block at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmplitudeTriple {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
}

impl AmplitudeTriple {
    pub const INITIAL: AmplitudeTriple = AmplitudeTriple {
        a: Complex64::new(1.0, 0.0),
        b: Complex64::new(0.0, 0.0),
        c: Complex64::new(0.0, 0.0),
    };

    pub fn norm_sqr(&self) -> f64 {
        self.a.norm_sqr() + self.b.norm_sqr() + self.c.norm_sqr()
    }
}

/// Frequencies and real weights of one block: every amplitude is
/// `exp(i shift tau) * sum_j w_j exp(i freq_j tau)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockSpectrum {
    pub n: usize,
    pub m: usize,
    /// Common phase rate `-(V11 + V22) / lambda`.
    pub shift: f64,
    pub freqs: Vec<f64>,
    pub weight_a: Vec<f64>,
    pub weight_b: Vec<f64>,
    pub weight_c: Vec<f64>,
}

impl BlockSpectrum {
    pub fn new(n: usize, m: usize, params: &ModelParams) -> Result<Self> {
        let lambda = params.lambda;
        if n == 0 {
            let shift = match params.convention {
                Convention::Exact => -BlockCouplings::new(0, m, params.chi, params).v22 / lambda,
                Convention::Appendix => 0.0,
            };
            return Ok(BlockSpectrum {
                n,
                m,
                shift,
                freqs: vec![0.0],
                weight_a: vec![1.0],
                weight_b: vec![0.0],
                weight_c: vec![0.0],
            });
        }

        let im = intermediates(n, m, params)?;
        let c = im.couplings;
        let shift = -(c.v11 + c.v22) / lambda;

        if params.convention == Convention::Appendix {
            if let Some(v) = im.vacuum {
                let w = [v.alpha1 + c.v11, v.alpha2 + c.v11];
                let coef = [v.c1, v.c2];
                return Ok(BlockSpectrum {
                    n,
                    m,
                    shift,
                    freqs: w.iter().map(|x| x / lambda).collect(),
                    weight_a: coef.to_vec(),
                    weight_b: vec![0.0; 2],
                    weight_c: (0..2).map(|j| -coef[j] * w[j] / c.f1).collect(),
                });
            }
        }

        let [e1, e2, e3] = c.diagonal();
        let (beta, gamma) = (e2 - e1, e3 - e1);
        let z = im.relative_mu;
        let weight_a = (0..3)
            .map(|j| ((z[j] + gamma) * (z[j] + beta) - c.f2 * c.f2) * im.b[j] / (c.f1 * c.f2))
            .collect();
        let weight_c = (0..3).map(|j| -(z[j] + beta) * im.b[j] / c.f2).collect();
        Ok(BlockSpectrum {
            n,
            m,
            shift,
            freqs: z.iter().map(|x| x / lambda).collect(),
            weight_a,
            weight_b: im.b.to_vec(),
            weight_c,
        })
    }

    /// Amplitudes without the common phase `exp(i shift tau)`.
    pub fn relative_amplitudes(&self, tau: f64) -> AmplitudeTriple {
        let phases: Vec<Complex64> = self
            .freqs
            .iter()
            .map(|f| Complex64::from_polar(1.0, f * tau))
            .collect();
        self.combine(&phases)
    }

    pub fn amplitudes(&self, tau: f64) -> AmplitudeTriple {
        if tau == 0.0 && self.n > 0 {
            return AmplitudeTriple::INITIAL;
        }
        let global = Complex64::from_polar(1.0, self.shift * tau);
        let rel = self.relative_amplitudes(tau);
        AmplitudeTriple {
            a: global * rel.a,
            b: global * rel.b,
            c: global * rel.c,
        }
    }

    pub(crate) fn combine(&self, phases: &[Complex64]) -> AmplitudeTriple {
        let mut out = AmplitudeTriple {
            a: Complex64::new(0.0, 0.0),
            b: Complex64::new(0.0, 0.0),
            c: Complex64::new(0.0, 0.0),
        };
        for (j, p) in phases.iter().enumerate() {
            out.a += p * self.weight_a[j];
            out.b += p * self.weight_b[j];
            out.c += p * self.weight_c[j];
        }
        out
    }
}

/// Closed-form `(A, B, C)` of block `(n, m)` at dimensionless time `tau`.
pub fn evolve_coefficients(n: usize, m: usize, tau: f64, params: &ModelParams) -> Result<AmplitudeTriple> {
    if n > params.n_max || m > params.m_max {
        return Err(invalid(
            "n, m",
            format!("block ({n}, {m}) lies beyond the cutoffs ({}, {})", params.n_max, params.m_max),
        ));
    }
    Ok(BlockSpectrum::new(n, m, params)?.amplitudes(tau))
}

/// Central-difference residuals `|i dX/dtau - (H X)_X / lambda|` of the three
/// coupled amplitude equations, evaluated in the frame co-rotating with the
/// initial-state energy `V11 + V22` (a per-block global phase).
///
/// Under [`Convention::Appendix`] the `m = 0` blocks are checked against the
/// two-level equations they solve, i.e. with `f2 = 0`.
pub fn ode_residual(n: usize, m: usize, tau: f64, h: f64, params: &ModelParams) -> Result<[f64; 3]> {
    if n == 0 {
        return Err(invalid("n", "the residual is defined for n >= 1"));
    }
    if !(1e-4..=1e-2).contains(&h) {
        return Err(invalid("h", format!("{h} is outside [1e-4, 1e-2]")));
    }
    let spectrum = BlockSpectrum::new(n, m, params)?;
    let mut c = BlockCouplings::new(n, m, params.chi, params);
    if params.convention == Convention::Appendix && m == 0 {
        c.f2 = 0.0;
    }
    let lambda = params.lambda;
    let [e1, e2, e3] = c.diagonal();
    let mid = spectrum.relative_amplitudes(tau);
    let fwd = spectrum.relative_amplitudes(tau + h);
    let bwd = spectrum.relative_amplitudes(tau - h);
    let rhs = [
        c.f1 * mid.c / lambda,
        ((e2 - e1) * mid.b + c.f2 * mid.c) / lambda,
        ((e3 - e1) * mid.c + c.f1 * mid.a + c.f2 * mid.b) / lambda,
    ];
    let samples = [[bwd.a, mid.a, fwd.a], [bwd.b, mid.b, fwd.b], [bwd.c, mid.c, fwd.c]];
    let weights = [&spectrum.weight_a, &spectrum.weight_b, &spectrum.weight_c];
    let i = Complex64::new(0.0, 1.0);
    let mut out = [0.0; 3];
    for k in 0..3 {
        // Each component is differenced in a frame rotating at its own mean frequency.
        let total: f64 = weights[k].iter().map(|w| w.abs()).sum();
        let s = if total > 0.0 {
            weights[k].iter().zip(&spectrum.freqs).map(|(w, f)| w.abs() * f).sum::<f64>() / total
        } else {
            0.0
        };
        let rot = |t: f64, x: Complex64| x * Complex64::from_polar(1.0, -s * t);
        let [xb, xm, xf] = samples[k];
        let deriv = i * (rot(tau + h, xf) - rot(tau - h, xb)) / (2.0 * h);
        out[k] = (deriv - rot(tau, rhs[k] + s * xm)).norm();
    }
    Ok(out)
}
