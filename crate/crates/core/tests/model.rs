use approx::assert_relative_eq;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tripartite_core::model::*;
use tripartite_core::oracle::{integrate_block, ode_mean_photon_series, SchrodingerOracle};
use tripartite_core::Error;

fn params(chi: f64, kappa: f64, alpha_sq: f64) -> ModelParams {
    ModelParams::from_alpha_sq(chi, kappa, alpha_sq).unwrap()
}

fn small_system(kappa: f64) -> ModelParams {
    // 16 x 16 cutoffs leave a Poisson tail of ~5e-11 at |alpha|^2 = 2.
    params(5.0, kappa, 2.0).with_cutoffs(16, 16).with_tail_tolerance(1e-10)
}

#[test]
fn matrix_elements_direct_substitution() {
    let p = params(0.0, 0.0, 25.0);
    let im = intermediates(1, 0, &p).unwrap();
    let c = im.couplings;
    assert_eq!([c.v11, c.v12, c.v21, c.v22], [0.0; 4]);
    assert_eq!(c.f1, 1.0);
    assert_eq!(c.f2, 1.0);

    let p = params(5.0, 0.0, 25.0);
    let c = intermediates(3, 2, &p).unwrap().couplings;
    assert_eq!([c.v11, c.v12, c.v21, c.v22], [30.0, 10.0, 30.0, 10.0]);
    assert_relative_eq!(c.f1, 3f64.sqrt(), max_relative = 1e-15);
    assert_relative_eq!(c.f2, 3f64.sqrt(), max_relative = 1e-15);

    let p = params(5.0, 0.5, 25.0);
    let c = intermediates(4, 0, &p).unwrap().couplings;
    assert_relative_eq!(c.f1, (4.0f64 * 3.0).sqrt(), max_relative = 1e-15);
}

#[test]
fn depressed_cubic_without_kerr_term() {
    // chi = 0, n = m = 1: mu^3 - (f1^2 + f2^2) mu = 0 with f1 = 1, f2 = sqrt 2.
    let p = params(0.0, 0.0, 25.0);
    let im = intermediates(1, 1, &p).unwrap();
    assert_eq!(im.x1, 0.0);
    assert_eq!(im.x3, 0.0);
    assert_relative_eq!(im.x2, -3.0, max_relative = 1e-15);
    let mut mu = im.mu;
    mu.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let r = 3f64.sqrt();
    assert!((mu[0] + r).abs() < 1e-12 && mu[1].abs() < 1e-12 && (mu[2] - r).abs() < 1e-12, "{mu:?}");
}

#[test]
fn roots_satisfy_cubic_vieta_and_weight_sum() {
    for &(chi, kappa) in &[(5.0, 0.0033), (5.0, 1.0), (0.3, 0.5), (0.0, 0.2)] {
        let p = params(chi, kappa, 25.0);
        for n in 1..=40 {
            for m in 0..=40 {
                let im = intermediates(n, m, &p).unwrap();
                let scale = im.mu.iter().fold(1.0f64, |a, &x| a.max(x.abs()));
                for &mu in &im.mu {
                    let value = mu.powi(3) + im.x1 * mu * mu + im.x2 * mu + im.x3;
                    let magnitude = mu.abs().powi(3) + im.x1.abs() * mu * mu + im.x2.abs() * mu.abs() + im.x3.abs();
                    assert!(value.abs() <= 1e-8 * magnitude.max(1.0), "({n},{m}) residual {value:e}");
                }
                let sum: f64 = im.mu.iter().sum();
                assert!((sum + im.x1).abs() <= 1e-10 * scale, "Vieta ({n},{m})");
                let bsum: f64 = im.b.iter().sum();
                let bmax = im.b.iter().fold(0.0f64, |a, &x| a.max(x.abs()));
                assert!(bsum.abs() <= 1e-10 * bmax.max(1.0), "sum b ({n},{m}) = {bsum:e}");
                assert!(!im.chi_nudged);
            }
        }
    }
}

#[test]
fn paper_root_formula_agrees_with_shifted_roots() {
    let p = params(5.0, 0.0033, 25.0);
    for &(n, m) in &[(1, 1), (5, 7), (25, 24), (40, 3), (60, 70)] {
        let im = intermediates(n, m, &p).unwrap();
        let (direct, theta) = coefficients::trigonometric_roots(im.x1, im.x2, im.x3);
        assert_relative_eq!(theta, im.theta);
        for j in 0..3 {
            assert!((direct[j] - im.mu[j]).abs() <= 1e-8 * im.mu[j].abs().max(1.0), "({n},{m}) root {j}");
        }
    }
}

#[test]
fn vacuum_branch_fields_only_for_m_zero() {
    let p = params(5.0, 0.2, 25.0);
    let im = intermediates(4, 0, &p).unwrap();
    let v = im.vacuum.unwrap();
    let c = im.couplings;
    assert_relative_eq!(v.y1, c.v11 + c.v12);
    assert_relative_eq!(v.y2, c.v11 * c.v12 - c.f1 * c.f1);
    for a in [v.alpha1, v.alpha2] {
        assert!((a * a + v.y1 * a + v.y2).abs() < 1e-9 * (v.y1 * v.y1).max(1.0));
    }
    assert_relative_eq!(v.c1 + v.c2, 1.0, epsilon = 1e-14);
    assert!(intermediates(4, 1, &p).unwrap().vacuum.is_none());
    assert!(matches!(intermediates(0, 3, &p), Err(Error::InvalidParameter { .. })));
}

#[test]
fn initial_condition_and_empty_first_field() {
    let p = params(5.0, 0.0033, 25.0);
    for &(n, m) in &[(0, 0), (1, 0), (3, 2), (40, 40)] {
        assert_eq!(evolve_coefficients(n, m, 0.0, &p).unwrap(), AmplitudeTriple::INITIAL);
    }
    let literal = p.clone().with_convention(Convention::Appendix);
    for &tau in &[0.5, 17.0, 3000.0] {
        for m in [0, 3, 30] {
            assert_eq!(evolve_coefficients(0, m, tau, &literal).unwrap(), AmplitudeTriple::INITIAL);
            let exact = evolve_coefficients(0, m, tau, &p).unwrap();
            assert_relative_eq!(exact.a.norm(), 1.0, epsilon = 1e-15);
            assert_eq!(exact.b, Complex64::new(0.0, 0.0));
            assert_eq!(exact.c, Complex64::new(0.0, 0.0));
        }
    }
    assert!(evolve_coefficients(76, 0, 1.0, &p).is_err());
}

#[test]
fn literal_vacuum_branch_has_no_second_level() {
    let p = params(5.0, 0.0033, 25.0).with_convention(Convention::Appendix);
    for n in 1..6 {
        for &tau in &[0.3, 7.0, 123.4] {
            let amp = evolve_coefficients(n, 0, tau, &p).unwrap();
            assert_eq!(amp.b, Complex64::new(0.0, 0.0));
            assert_relative_eq!(amp.norm_sqr(), 1.0, epsilon = 1e-12);
        }
    }
}

#[test]
fn block_amplitudes_match_numerical_integration() {
    let p = params(5.0, 0.0033, 25.0);
    let closed = evolve_coefficients(2, 1, 7.3, &p).unwrap();
    assert!((closed.norm_sqr() - 1.0).abs() < 1e-9);
    let c = BlockCouplings::new(2, 1, p.chi, &p);
    let ode = integrate_block(&c, p.lambda, &[7.3])[0];
    assert!((closed.a - ode.a).norm() < 1e-6, "{closed:?} vs {ode:?}");
    assert!((closed.b - ode.b).norm() < 1e-6);
    assert!((closed.c - ode.c).norm() < 1e-6);

    // Both conventions against their own equations, including the m = 0 blocks.
    for convention in [Convention::Exact, Convention::Appendix] {
        let p = params(5.0, 0.7, 25.0).with_convention(convention);
        for &(n, m) in &[(1, 0), (6, 0), (5, 9), (12, 11)] {
            let mut c = BlockCouplings::new(n, m, p.chi, &p);
            if convention == Convention::Appendix && m == 0 {
                c.f2 = 0.0;
            }
            let taus = [0.1, 2.0, 45.5];
            let ode = integrate_block(&c, p.lambda, &taus);
            for (tau, o) in taus.iter().zip(&ode) {
                let cf = evolve_coefficients(n, m, *tau, &p).unwrap();
                let err = (cf.a - o.a).norm().max((cf.b - o.b).norm()).max((cf.c - o.c).norm());
                assert!(err < 1e-8, "{convention:?} ({n},{m}) tau {tau}: {err:e}");
            }
        }
    }
}

#[test]
fn ode_residuals_are_second_order() {
    let p = params(5.0, 0.5, 25.0);
    let r = ode_residual(3, 2, 11.0, 1e-3, &p).unwrap();
    assert!(r.iter().all(|&x| x < 1e-4), "{r:?}");

    let coarse = ode_residual(3, 2, 11.0, 4e-3, &p).unwrap();
    let fine = ode_residual(3, 2, 11.0, 2e-3, &p).unwrap();
    for k in 0..3 {
        let ratio = coarse[k] / fine[k];
        assert!((3.5..=4.5).contains(&ratio), "component {k}: ratio {ratio}");
    }

    let literal = params(5.0, 0.0, 25.0).with_convention(Convention::Appendix);
    let r = ode_residual(1, 0, 3.7, 1e-3, &literal).unwrap();
    assert!(r[1] < 1e-15, "{r:?}");
    assert!(ode_residual(3, 2, 1.0, 0.5, &p).is_err());
}

#[test]
fn coherent_mean_at_time_zero() {
    let p = params(5.0, 0.0033, 25.0);
    let n1 = mean_photon_number(&p, 0.0, Field::One).unwrap();
    let n2 = mean_photon_number(&p, 0.0, Field::Two).unwrap();
    assert!((n1 - 25.0).abs() < 1e-9, "{n1}");
    assert!((n2 - 25.0).abs() < 1e-9, "{n2}");
}

#[test]
fn first_field_excitation_is_conserved() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let p = params(5.0, 0.0033, 25.0);
    let dynamics = Dynamics::new(&p).unwrap();
    for _ in 0..20 {
        let tau = rng.random_range(0.0..35_000.0);
        let diff = dynamics.mean_photon_number(tau, Field::One) - dynamics.ground_population(tau);
        assert!((diff - 24.0).abs() < 1e-8, "tau {tau}: {diff}");
    }
}

#[test]
fn reduced_density_consistency() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let p = params(5.0, 0.0033, 9.0);
    let dynamics = Dynamics::new(&p).unwrap();

    let rho0 = dynamics.reduced_density(0.0, Field::One);
    let q = coherent_weights(p.alpha, p.n_max).unwrap();
    for n in 0..=p.n_max {
        for k in 0..=p.n_max {
            assert!((rho0.get(n, k) - q.get(n) * q.get(k).conj()).norm() < 1e-12);
        }
    }

    for _ in 0..10 {
        let tau = rng.random_range(0.0..5000.0);
        for field in [Field::One, Field::Two] {
            let rho = dynamics.reduced_density(tau, field);
            assert!((rho.trace() - 1.0).abs() < 1e-9);
            assert!(rho.hermiticity_error() < 1e-10);
            let eig = nalgebra::SymmetricEigen::new(rho.to_matrix());
            assert!(eig.eigenvalues.iter().all(|&e| e >= -1e-9));
            let direct = dynamics.mean_photon_number(tau, field);
            assert!((rho.mean_photon_number() - direct).abs() < 1e-8);
        }
    }
}

#[test]
fn reduced_density_literal_guards() {
    // Under the literal branches the B component of the m = 0 blocks vanishes;
    // trace and photon number still agree.
    let p = params(5.0, 0.2, 2.0).with_convention(Convention::Appendix);
    let dynamics = Dynamics::new(&p).unwrap();
    let rho = dynamics.reduced_density(13.0, Field::Two);
    assert!((rho.trace() - 1.0).abs() < 1e-9);
    assert!((rho.mean_photon_number() - dynamics.mean_photon_number(13.0, Field::Two)).abs() < 1e-10);
}

#[test]
fn closed_form_matches_full_schrodinger_evolution() {
    for kappa in [0.0, 0.5, 1.0] {
        let p = small_system(kappa);
        let dynamics = Dynamics::new(&p).unwrap();
        let oracle = SchrodingerOracle::new(&p).unwrap();
        let mut worst = 0.0f64;
        for k in 0..=100 {
            let tau = k as f64;
            for field in [Field::One, Field::Two] {
                let cf = dynamics.mean_photon_number(tau, field);
                worst = worst.max((cf - oracle.mean_photon_number(tau, field)).abs());
            }
        }
        assert!(worst < 1e-6, "kappa {kappa}: {worst:e}");

        let rho = dynamics.reduced_density(37.0, Field::One);
        let reference = oracle.reduced_density_field_one(37.0);
        for r in 0..rho.dim {
            for c in 0..rho.dim {
                assert!((rho.get(r, c) - reference[(r, c)]).norm() < 1e-8);
            }
        }
    }
}

#[test]
fn literal_vacuum_branch_departs_from_schrodinger_evolution() {
    let p = small_system(0.5).with_convention(Convention::Appendix);
    let dynamics = Dynamics::new(&p).unwrap();
    let oracle = SchrodingerOracle::new(&p).unwrap();
    let gap = (1..=20)
        .map(|k| (dynamics.mean_photon_number(k as f64, Field::Two) - oracle.mean_photon_number(k as f64, Field::Two)).abs())
        .fold(0.0f64, f64::max);
    assert!(gap > 1e-3, "{gap:e}");
}

#[test]
fn sampled_series_matches_pointwise_evaluation() {
    let p = params(5.0, 0.0033, 25.0);
    let dynamics = Dynamics::new(&p).unwrap();
    let sampled = dynamics.sample_mean_photon_number(Field::One, 10_001.0, 1.0, 600);
    for &k in &[0usize, 1, 255, 256, 257, 599] {
        let direct = dynamics.mean_photon_number(10_001.0 + k as f64, Field::One);
        assert!((sampled[k] - direct).abs() < 1e-9, "{k}: {} vs {direct}", sampled[k]);
    }
    let ode = ode_mean_photon_series(&small_system(0.5), &[0.0, 25.0, 50.0]).unwrap();
    let closed = Dynamics::new(&small_system(0.5)).unwrap();
    for (tau, o) in [0.0, 25.0, 50.0].iter().zip(&ode) {
        assert!((closed.mean_photon_number(*tau, Field::One) - o).abs() < 1e-6);
    }
}

#[test]
fn series_length_and_determinism() {
    let p = params(5.0, 0.0033, 4.0);
    let a = generate_series(&p, 35_000, 10_000).unwrap();
    assert_eq!(a.len(), 25_000);
    assert_eq!(a.burn_in, 10_000);
    let b = generate_series(&p, 35_000, 10_000).unwrap();
    assert_eq!(a.values(), b.values());
    assert!(generate_series(&p, 100, 100).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn block_evolution_is_unitary(n in 1usize..=40, m in 0usize..=40, tau in 0.0f64..1e4, kappa in 0.0f64..=1.0) {
        let p = params(5.0, kappa, 25.0);
        let amp = evolve_coefficients(n, m, tau, &p).unwrap();
        prop_assert!((amp.norm_sqr() - 1.0).abs() < 1e-9);
    }
}
