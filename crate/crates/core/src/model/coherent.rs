use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::model::params::DEFAULT_TAIL_TOLERANCE;

/// Fock-basis amplitudes `q_n` of a coherent state, truncated at `n_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoherentWeights {
    weights: Vec<Complex64>,
    tail_mass: f64,
}

impl CoherentWeights {
    pub fn weights(&self) -> &[Complex64] {
        &self.weights
    }

    pub fn get(&self, n: usize) -> Complex64 {
        self.weights.get(n).copied().unwrap_or_default()
    }

    /// `|q_n|^2`, zero beyond the cutoff.
    pub fn probability(&self, n: usize) -> f64 {
        self.get(n).norm_sqr()
    }

    pub fn n_max(&self) -> usize {
        self.weights.len() - 1
    }

    /// Poisson mass above the cutoff.
    pub fn tail_mass(&self) -> f64 {
        self.tail_mass
    }

    pub fn norm_sqr(&self) -> f64 {
        self.weights.iter().map(|q| q.norm_sqr()).sum()
    }
}

pub fn coherent_weights(alpha: Complex64, n_max: usize) -> Result<CoherentWeights> {
    coherent_weights_with_tolerance(alpha, n_max, DEFAULT_TAIL_TOLERANCE)
}

/// `q_n = exp(-|a|^2/2) a^n / sqrt(n!)`, evaluated in the log domain so that
/// mean photon numbers in the hundreds neither overflow nor underflow early.
pub fn coherent_weights_with_tolerance(
    alpha: Complex64,
    n_max: usize,
    tolerance: f64,
) -> Result<CoherentWeights> {
    if n_max < 1 {
        return Err(invalid("n_max", "cutoff must be at least 1"));
    }
    let mean = alpha.norm_sqr();
    let tail_mass = poisson_tail(mean, n_max);
    if tail_mass > tolerance {
        return Err(Error::TruncationInadequate {
            cutoff: n_max,
            tail: tail_mass,
            tolerance,
        });
    }

    let mut weights = vec![Complex64::new(0.0, 0.0); n_max + 1];
    if mean == 0.0 {
        weights[0] = Complex64::new(1.0, 0.0);
        return Ok(CoherentWeights { weights, tail_mass });
    }
    let log_modulus = alpha.norm().ln();
    let phase = alpha.arg();
    let mut log_factorial = 0.0;
    for (n, q) in weights.iter_mut().enumerate() {
        if n > 0 {
            log_factorial += (n as f64).ln();
        }
        let nf = n as f64;
        let log_abs = -0.5 * mean + nf * log_modulus - 0.5 * log_factorial;
        *q = Complex64::from_polar(log_abs.exp(), nf * phase);
    }
    Ok(CoherentWeights { weights, tail_mass })
}

/// `P(N > cutoff)` for a Poisson variable of mean `mean`, summed term by term.
pub(crate) fn poisson_tail(mean: f64, cutoff: usize) -> f64 {
    if mean == 0.0 {
        return 0.0;
    }
    let ln_mean = mean.ln();
    let mut log_term = -mean;
    for k in 1..=cutoff + 1 {
        log_term += ln_mean - (k as f64).ln();
    }
    let mut tail = 0.0;
    let mut k = cutoff + 1;
    loop {
        let term = log_term.exp();
        tail += term;
        if (k as f64) > mean && (term <= tail * 1e-18 || term < 1e-300) {
            break;
        }
        k += 1;
        log_term += ln_mean - (k as f64).ln();
    }
    tail.min(1.0)
}
