use anyhow::Result;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tripartite_core::model::{algebra_residual, evolve_coefficients, ode_residual, Dynamics, Field, ModelParams};
use tripartite_core::oracle::{ode_mean_photon_series, SchrodingerOracle};

#[derive(Debug, Clone)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl std::fmt::Display for Check {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{verdict} {}: {}", self.name, self.detail)
    }
}

pub const EXACTNESS_TOLERANCE: f64 = 1e-6;
pub const UNITARITY_TOLERANCE: f64 = 1e-9;
pub const CONSERVATION_TOLERANCE: f64 = 1e-8;
pub const ALGEBRA_TOLERANCE: f64 = 1e-10;

/// Small system used by the exactness checks: `|alpha|^2 = 2`, cutoffs 16 x 16.
pub fn small_system(kappa: f64) -> Result<ModelParams> {
    // The Poisson tail beyond 16 photons is ~5e-11, so the default 1e-12 bound is relaxed.
    Ok(ModelParams::from_alpha_sq(5.0, kappa, 2.0)?.with_cutoffs(16, 16).with_tail_tolerance(1e-10))
}

/// Closed-form `<N_1>` against block-wise numerical integration on `tau = 0, 0.25, ..., 100`.
pub fn exactness(kappas: &[f64]) -> Result<Check> {
    let taus: Vec<f64> = (0..=400).map(|k| k as f64 * 0.25).collect();
    let mut worst: f64 = 0.0;
    for &kappa in kappas {
        let p = small_system(kappa)?;
        let dynamics = Dynamics::new(&p)?;
        let reference = ode_mean_photon_series(&p, &taus)?;
        for (t, r) in taus.iter().zip(&reference) {
            worst = worst.max((dynamics.mean_photon_number(*t, Field::One) - r).abs());
        }
    }
    Ok(Check {
        name: "closed form vs integrated blocks",
        passed: worst < EXACTNESS_TOLERANCE,
        detail: format!("max |diff| = {worst:.3e} (tolerance {EXACTNESS_TOLERANCE:.0e}), kappa in {kappas:?}"),
    })
}

/// Closed-form `<N_1>` against dense evolution of the full Hamiltonian.
pub fn schrodinger_agreement(kappas: &[f64]) -> Result<Check> {
    let mut worst: f64 = 0.0;
    for &kappa in kappas {
        let p = small_system(kappa)?;
        let dynamics = Dynamics::new(&p)?;
        let oracle = SchrodingerOracle::new(&p)?;
        for k in 0..=100 {
            let t = k as f64;
            worst = worst.max((dynamics.mean_photon_number(t, Field::One) - oracle.mean_photon_number(t, Field::One)).abs());
        }
    }
    Ok(Check {
        name: "closed form vs dense Schrodinger evolution",
        passed: worst < EXACTNESS_TOLERANCE,
        detail: format!("max |diff| = {worst:.3e} (tolerance {EXACTNESS_TOLERANCE:.0e})"),
    })
}

/// `|A|^2 + |B|^2 + |C|^2 = 1` over random blocks and times of the production system.
pub fn unitarity(samples: usize, seed: u64) -> Result<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let kappa = rng.random_range(0.0..=1.0);
        let p = ModelParams::from_alpha_sq(5.0, kappa, 25.0)?;
        let n = rng.random_range(0..=p.n_max);
        let m = rng.random_range(0..=p.m_max);
        let tau = rng.random_range(0.0..35_000.0);
        let amp = evolve_coefficients(n, m, tau, &p)?;
        worst = worst.max((amp.norm_sqr() - 1.0).abs());
    }
    Ok(Check {
        name: "block unitarity",
        passed: worst < UNITARITY_TOLERANCE,
        detail: format!("max |norm - 1| = {worst:.3e} over {samples} triples (tolerance {UNITARITY_TOLERANCE:.0e})"),
    })
}

/// `<N_1> - <sigma_11> = |alpha|^2 - 1` at random times.
pub fn conservation(kappa: f64, count: usize, seed: u64) -> Result<Check> {
    let p = ModelParams::from_alpha_sq(5.0, kappa, 25.0)?;
    let dynamics = Dynamics::new(&p)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let want = p.alpha_sq() - 1.0;
    let mut worst: f64 = 0.0;
    for _ in 0..count {
        let tau = rng.random_range(0.0..35_000.0);
        let got = dynamics.mean_photon_number(tau, Field::One) - dynamics.ground_population(tau);
        worst = worst.max((got - want).abs());
    }
    Ok(Check {
        name: "first-field excitation conservation",
        passed: worst < CONSERVATION_TOLERANCE,
        detail: format!("max deviation = {worst:.3e} at {count} times, kappa = {kappa} (tolerance {CONSERVATION_TOLERANCE:.0e})"),
    })
}

/// Interior commutator residuals of the deformed algebra.
pub fn algebra(kappas: &[f64], cutoff: usize) -> Result<Check> {
    let mut worst: f64 = 0.0;
    for &kappa in kappas {
        worst = worst.max(algebra_residual(kappa, cutoff)?.max());
    }
    Ok(Check {
        name: "deformed algebra closure",
        passed: worst < ALGEBRA_TOLERANCE,
        detail: format!("max residual = {worst:.3e}, kappa in {kappas:?}, cutoff {cutoff} (tolerance {ALGEBRA_TOLERANCE:.0e})"),
    })
}

/// Central-difference residuals of the amplitude equations shrink fourfold when `h` halves.
pub fn finite_difference_order() -> Result<Check> {
    let p = ModelParams::from_alpha_sq(5.0, 0.5, 25.0)?;
    let coarse = ode_residual(3, 2, 11.0, 4e-3, &p)?;
    let fine = ode_residual(3, 2, 11.0, 2e-3, &p)?;
    let ratios: Vec<f64> = coarse.iter().zip(&fine).map(|(c, f)| c / f).collect();
    Ok(Check {
        name: "finite-difference residual order",
        passed: ratios.iter().all(|r| (3.5..=4.5).contains(r)),
        detail: format!("halving ratios {ratios:.3?}"),
    })
}

pub fn run_all() -> Result<Vec<Check>> {
    Ok(vec![
        exactness(&[0.0, 0.5, 1.0])?,
        schrodinger_agreement(&[0.0, 0.5, 1.0])?,
        unitarity(10_000, 2024)?,
        conservation(0.0033, 20, 7)?,
        algebra(&[0.0, 0.25, 0.5, 0.75, 1.0], 40)?,
        finite_difference_order()?,
    ])
}
