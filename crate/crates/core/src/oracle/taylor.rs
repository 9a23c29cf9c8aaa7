use num_complex::Complex64;

use crate::error::Result;
use crate::model::coefficients::{AmplitudeTriple, BlockCouplings};
use crate::model::coherent::coherent_weights_with_tolerance;
use crate::model::params::{Convention, ModelParams};

type Vec3 = [Complex64; 3];

fn matvec(m: &[[Complex64; 3]; 3], v: &Vec3) -> Vec3 {
    let mut out = [Complex64::new(0.0, 0.0); 3];
    for (row, o) in m.iter().zip(out.iter_mut()) {
        *o = row[0] * v[0] + row[1] * v[1] + row[2] * v[2];
    }
    out
}

fn norm(v: &Vec3) -> f64 {
    v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// Integrates `i dX/dtau = H X / lambda` from `X(0) = (1, 0, 0)` and returns
/// the amplitudes at each of the non-decreasing times `taus`.
///
/// Each step sums the Taylor series of the propagator until the next term is
/// negligible, with the step length bounded by `1 / ||H||`. The equations are
/// integrated relative to the initial-state energy and the common phase is
/// restored exactly afterwards.
pub fn integrate_block(couplings: &BlockCouplings, lambda: f64, taus: &[f64]) -> Vec<AmplitudeTriple> {
    let [e1, e2, e3] = couplings.diagonal();
    let (f1, f2) = (couplings.f1, couplings.f2);
    let mi = Complex64::new(0.0, -1.0 / lambda);
    let generator = [
        [mi * 0.0, mi * 0.0, mi * f1],
        [mi * 0.0, mi * (e2 - e1), mi * f2],
        [mi * f1, mi * f2, mi * (e3 - e1)],
    ];
    let gen_norm = generator
        .iter()
        .map(|row| row.iter().map(|x| x.norm()).sum::<f64>())
        .fold(0.0f64, f64::max)
        .max(1e-300);
    let max_step = 1.0 / gen_norm;

    let mut y: Vec3 = [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)];
    let mut now = 0.0;
    let mut out = Vec::with_capacity(taus.len());
    for &target in taus {
        assert!(target >= now, "output times must be non-decreasing");
        while now < target {
            let h = (target - now).min(max_step);
            let mut term = y;
            let mut sum = y;
            for p in 1..64 {
                let next = matvec(&generator, &term);
                let scale = h / p as f64;
                for k in 0..3 {
                    term[k] = next[k] * scale;
                    sum[k] += term[k];
                }
                if p >= 4 && norm(&term) <= 1e-18 * norm(&sum) {
                    break;
                }
            }
            y = sum;
            now = if target - now <= max_step { target } else { now + h };
        }
        let global = Complex64::from_polar(1.0, -e1 * target / lambda);
        out.push(AmplitudeTriple {
            a: global * y[0],
            b: global * y[1],
            c: global * y[2],
        });
    }
    out
}

/// `<N_1>` at `taus` from block-by-block numerical integration.
pub fn ode_mean_photon_series(params: &ModelParams, taus: &[f64]) -> Result<Vec<f64>> {
    params.validate()?;
    let q = coherent_weights_with_tolerance(params.alpha, params.n_max, params.tail_tolerance)?;
    let r = coherent_weights_with_tolerance(params.alpha, params.m_max, params.tail_tolerance)?;
    let mut total = vec![0.0; taus.len()];
    for n in 0..=params.n_max {
        for m in 0..=params.m_max {
            let weight = q.probability(n) * r.probability(m);
            if weight == 0.0 {
                continue;
            }
            let mut c = BlockCouplings::new(n, m, params.chi, params);
            if params.convention == Convention::Appendix && m == 0 {
                c.f2 = 0.0;
            }
            let traj = integrate_block(&c, params.lambda, taus);
            let nf = n as f64;
            for (slot, amp) in total.iter_mut().zip(&traj) {
                *slot += weight * (nf * amp.a.norm_sqr() + (nf - 1.0) * (amp.b.norm_sqr() + amp.c.norm_sqr()));
            }
        }
    }
    Ok(total)
}
