use num_complex::Complex64;

use crate::error::{invalid, Result};

/// Tail-mass tolerance for the coherent-state truncation.
pub const DEFAULT_TAIL_TOLERANCE: f64 = 1e-12;

/// How the closed-form amplitudes treat the two boundary families of blocks.
///
/// `Exact` reproduces the Schrödinger dynamics of the interaction Hamiltonian:
/// an `n = 0` state only picks up its Kerr phase, and for `m = 0` the excited
/// state can still emit into the empty second mode, so the full three-level
/// block applies. `Appendix` uses the literal published branches instead:
/// `A_0m = 1` with no phase, and a two-level `m = 0` block with `B_n0 = 0`.
/// The two agree on every block with `n, m >= 1` and on all photon-number
/// statistics whenever the vacuum weight `|q_0|^2` is negligible.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Convention {
    #[default]
    Exact,
    Appendix,
}

/// Physical constants and truncation choices for one run.
///
/// Time is always the dimensionless `tau = lambda * t`. `chi` and the derived
/// matrix elements carry the same units as `lambda`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    pub chi: f64,
    pub lambda: f64,
    /// Intensity parameter of the first field; the second field's is zero.
    pub kappa: f64,
    /// Coherent amplitude shared by both fields.
    pub alpha: Complex64,
    pub n_max: usize,
    pub m_max: usize,
    pub convention: Convention,
    pub tail_tolerance: f64,
}

impl ModelParams {
    /// Parameters in units of `lambda = 1` with default Fock cutoffs.
    pub fn new(chi_over_lambda: f64, kappa: f64, alpha: Complex64) -> Result<Self> {
        let cutoff = default_cutoff(alpha.norm_sqr(), DEFAULT_TAIL_TOLERANCE);
        let params = ModelParams {
            chi: chi_over_lambda,
            lambda: 1.0,
            kappa,
            alpha,
            n_max: cutoff,
            m_max: cutoff,
            convention: Convention::Exact,
            tail_tolerance: DEFAULT_TAIL_TOLERANCE,
        };
        params.validate()?;
        Ok(params)
    }

    /// Real coherent amplitude `alpha = sqrt(alpha_sq)`.
    pub fn from_alpha_sq(chi_over_lambda: f64, kappa: f64, alpha_sq: f64) -> Result<Self> {
        if !(alpha_sq >= 0.0) || !alpha_sq.is_finite() {
            return Err(invalid("alpha_sq", format!("{alpha_sq} is not a finite non-negative number")));
        }
        Self::new(chi_over_lambda, kappa, Complex64::new(alpha_sq.sqrt(), 0.0))
    }

    pub fn with_cutoffs(mut self, n_max: usize, m_max: usize) -> Self {
        self.n_max = n_max;
        self.m_max = m_max;
        self
    }

    pub fn with_convention(mut self, convention: Convention) -> Self {
        self.convention = convention;
        self
    }

    pub fn with_tail_tolerance(mut self, tolerance: f64) -> Self {
        self.tail_tolerance = tolerance;
        self
    }

    pub fn alpha_sq(&self) -> f64 {
        self.alpha.norm_sqr()
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.chi >= 0.0) || !self.chi.is_finite() {
            return Err(invalid("chi", format!("{} must be finite and non-negative", self.chi)));
        }
        if !(self.lambda > 0.0) || !self.lambda.is_finite() {
            return Err(invalid("lambda", format!("{} must be finite and positive", self.lambda)));
        }
        if !(0.0..=1.0).contains(&self.kappa) {
            return Err(invalid("kappa", format!("{} is outside [0, 1]", self.kappa)));
        }
        if !self.alpha.re.is_finite() || !self.alpha.im.is_finite() {
            return Err(invalid("alpha", "must be finite"));
        }
        if self.n_max < 1 {
            return Err(invalid("n_max", "cutoff must be at least 1"));
        }
        if self.m_max < 1 {
            return Err(invalid("m_max", "cutoff must be at least 1"));
        }
        if !(self.tail_tolerance > 0.0) {
            return Err(invalid("tail_tolerance", "must be positive"));
        }
        Ok(())
    }

    /// Intensity-dependent coupling `f(N) = sqrt(1 + kappa N)` of field 1.
    pub fn coupling_function(&self, photons: f64) -> f64 {
        (1.0 + self.kappa * photons).sqrt()
    }
}

/// Smallest cutoff at least `ceil(x + 10 sqrt(x))` whose Poisson tail beyond it
/// is below `tolerance`, for mean photon number `x`.
pub fn default_cutoff(alpha_sq: f64, tolerance: f64) -> usize {
    let mut cutoff = (alpha_sq + 10.0 * alpha_sq.sqrt()).ceil().max(1.0) as usize;
    while crate::model::coherent::poisson_tail(alpha_sq, cutoff) >= tolerance {
        cutoff += 1;
    }
    cutoff
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_cutoffs_for_production_amplitude() {
        let p = ModelParams::from_alpha_sq(5.0, 0.0033, 25.0).unwrap();
        assert_eq!(p.n_max, 75);
        assert_eq!(p.m_max, 75);
        assert_eq!(p.lambda, 1.0);
        assert_eq!(p.convention, Convention::Exact);
    }

    #[test]
    fn small_amplitude_cutoff_grows_until_tail_is_small() {
        // ceil(2 + 10 sqrt 2) = 17 leaves a tail of ~4e-12 for a mean of 2.
        let cutoff = default_cutoff(2.0, DEFAULT_TAIL_TOLERANCE);
        assert!(cutoff > 17);
        assert!(crate::model::coherent::poisson_tail(2.0, cutoff) < DEFAULT_TAIL_TOLERANCE);
    }

    #[test]
    fn kappa_out_of_range_is_rejected() {
        assert!(ModelParams::from_alpha_sq(5.0, 1.5, 25.0).is_err());
        assert!(ModelParams::from_alpha_sq(5.0, -0.1, 25.0).is_err());
        assert!(ModelParams::from_alpha_sq(-1.0, 0.1, 25.0).is_err());
    }
}
