use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{invalid, Result};
use crate::model::coefficients::{AmplitudeTriple, BlockSpectrum};
use crate::model::coherent::{coherent_weights_with_tolerance, CoherentWeights};
use crate::model::params::ModelParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Field {
    One,
    Two,
}

impl TryFrom<u8> for Field {
    type Error = crate::error::Error;

    fn try_from(value: u8) -> Result<Self> {
        match value {
            1 => Ok(Field::One),
            2 => Ok(Field::Two),
            other => Err(invalid("field", format!("{other} is not 1 or 2"))),
        }
    }
}

/// Reduced density matrix of one field mode, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedDensity {
    pub field: Field,
    pub dim: usize,
    pub elements: Vec<Complex64>,
}

impl ReducedDensity {
    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.elements[row * self.dim + col]
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|k| self.get(k, k).re).sum()
    }

    /// `Tr(rho N)`.
    pub fn mean_photon_number(&self) -> f64 {
        (0..self.dim).map(|k| k as f64 * self.get(k, k).re).sum()
    }

    pub fn hermiticity_error(&self) -> f64 {
        let mut worst = 0.0f64;
        for r in 0..self.dim {
            for c in r..self.dim {
                worst = worst.max((self.get(r, c) - self.get(c, r).conj()).norm());
            }
        }
        worst
    }

    pub fn to_matrix(&self) -> nalgebra::DMatrix<Complex64> {
        nalgebra::DMatrix::from_row_slice(self.dim, self.dim, &self.elements)
    }
}

/// Precomputed block spectra and initial weights for one parameter set.
///
/// All observables are evaluated from this table; building it is the only
/// step that touches the cubic roots.
#[derive(Debug, Clone)]
pub struct Dynamics {
    params: ModelParams,
    field_one: CoherentWeights,
    field_two: CoherentWeights,
    /// Row-major over `n` then `m`.
    blocks: Vec<BlockSpectrum>,
}

const CHUNK: usize = 256;

impl Dynamics {
    pub fn new(params: &ModelParams) -> Result<Self> {
        params.validate()?;
        let field_one = coherent_weights_with_tolerance(params.alpha, params.n_max, params.tail_tolerance)?;
        let field_two = coherent_weights_with_tolerance(params.alpha, params.m_max, params.tail_tolerance)?;
        let blocks = (0..=params.n_max)
            .into_par_iter()
            .flat_map_iter(|n| (0..=params.m_max).map(move |m| (n, m)))
            .map(|(n, m)| BlockSpectrum::new(n, m, params))
            .collect::<Result<Vec<_>>>()?;
        Ok(Dynamics {
            params: params.clone(),
            field_one,
            field_two,
            blocks,
        })
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn blocks(&self) -> &[BlockSpectrum] {
        &self.blocks
    }

    pub fn block(&self, n: usize, m: usize) -> &BlockSpectrum {
        &self.blocks[n * (self.params.m_max + 1) + m]
    }

    /// `|q_n q_m|^2`.
    pub fn block_weight(&self, n: usize, m: usize) -> f64 {
        self.field_one.probability(n) * self.field_two.probability(m)
    }

    pub fn amplitudes(&self, n: usize, m: usize, tau: f64) -> AmplitudeTriple {
        self.block(n, m).amplitudes(tau)
    }

    pub fn mean_photon_number(&self, tau: f64, field: Field) -> f64 {
        self.blocks
            .iter()
            .map(|blk| {
                let amp = blk.relative_amplitudes(tau);
                self.block_weight(blk.n, blk.m) * photon_count(blk.n, blk.m, &amp, field)
            })
            .sum()
    }

    /// `<sigma_11>`, the population of the initial atomic level.
    pub fn ground_population(&self, tau: f64) -> f64 {
        self.blocks
            .iter()
            .map(|blk| self.block_weight(blk.n, blk.m) * blk.relative_amplitudes(tau).a.norm_sqr())
            .sum()
    }

    /// `<N>` on the uniform grid `tau_0 + k dt`, `k = 0..count`.
    ///
    /// Phases are advanced by repeated multiplication within chunks of 256
    /// samples and re-seeded exactly at each chunk start, so the output does
    /// not depend on how chunks are scheduled across threads.
    pub fn sample_mean_photon_number(&self, field: Field, tau0: f64, dt: f64, count: usize) -> Vec<f64> {
        let mut out = vec![0.0; count];
        out.par_chunks_mut(CHUNK).enumerate().for_each(|(chunk_idx, chunk)| {
            let start = tau0 + (chunk_idx * CHUNK) as f64 * dt;
            let mut phases = [Complex64::new(0.0, 0.0); 3];
            let mut steps = [Complex64::new(0.0, 0.0); 3];
            for blk in &self.blocks {
                let weight = self.block_weight(blk.n, blk.m);
                if weight == 0.0 {
                    continue;
                }
                let k = blk.freqs.len();
                for j in 0..k {
                    phases[j] = Complex64::from_polar(1.0, blk.freqs[j] * start);
                    steps[j] = Complex64::from_polar(1.0, blk.freqs[j] * dt);
                }
                for slot in chunk.iter_mut() {
                    let amp = blk.combine(&phases[..k]);
                    *slot += weight * photon_count(blk.n, blk.m, &amp, field);
                    for j in 0..k {
                        phases[j] *= steps[j];
                    }
                }
            }
        });
        out
    }

    pub fn reduced_density(&self, tau: f64, field: Field) -> ReducedDensity {
        let (n_max, m_max) = (self.params.n_max, self.params.m_max);
        let amps: Vec<AmplitudeTriple> = self.blocks.iter().map(|b| b.amplitudes(tau)).collect();
        let amp = |n: usize, m: usize| &amps[n * (m_max + 1) + m];
        let q = |n: usize| self.field_one.get(n);
        let r = |m: usize| self.field_two.get(m);

        match field {
            Field::One => {
                // rho_1 = sum_m |r_m|^2 (u u^+ + v v^+ + w w^+) with
                // u_n = q_n A_nm, v_n = q_{n+1} B_{n+1,m}, w_n = q_{n+1} C_{n+1,m}.
                let dim = n_max + 1;
                let mut rho = vec![Complex64::new(0.0, 0.0); dim * dim];
                let mut vecs = vec![vec![Complex64::new(0.0, 0.0); dim]; 3];
                for m in 0..=m_max {
                    let pm = r(m).norm_sqr();
                    for n in 0..dim {
                        vecs[0][n] = q(n) * amp(n, m).a;
                        vecs[1][n] = if n < n_max { q(n + 1) * amp(n + 1, m).b } else { Complex64::new(0.0, 0.0) };
                        vecs[2][n] = if n < n_max { q(n + 1) * amp(n + 1, m).c } else { Complex64::new(0.0, 0.0) };
                    }
                    accumulate_outer(&mut rho, dim, pm, &vecs);
                }
                ReducedDensity { field, dim, elements: rho }
            }
            Field::Two => {
                // The B component carries m + 1 photons, so the matrix extends
                // one level beyond the field-2 cutoff.
                let dim = m_max + 2;
                let mut rho = vec![Complex64::new(0.0, 0.0); dim * dim];
                let mut vecs = vec![vec![Complex64::new(0.0, 0.0); dim]; 3];
                for n in 0..=n_max {
                    let pn = q(n).norm_sqr();
                    let pn1 = if n < n_max { q(n + 1).norm_sqr() } else { 0.0 };
                    for l in 0..dim {
                        vecs[0][l] = if l <= m_max { pn.sqrt() * r(l) * amp(n, l).a } else { Complex64::new(0.0, 0.0) };
                        vecs[1][l] = if l >= 1 && n < n_max { pn1.sqrt() * r(l - 1) * amp(n + 1, l - 1).b } else { Complex64::new(0.0, 0.0) };
                        vecs[2][l] = if l <= m_max && n < n_max { pn1.sqrt() * r(l) * amp(n + 1, l).c } else { Complex64::new(0.0, 0.0) };
                    }
                    accumulate_outer(&mut rho, dim, 1.0, &vecs);
                }
                ReducedDensity { field, dim, elements: rho }
            }
        }
    }
}

fn accumulate_outer(rho: &mut [Complex64], dim: usize, scale: f64, vecs: &[Vec<Complex64>]) {
    for v in vecs {
        for row in 0..dim {
            let vr = v[row];
            if vr == Complex64::new(0.0, 0.0) {
                continue;
            }
            let dst = &mut rho[row * dim..(row + 1) * dim];
            for (col, slot) in dst.iter_mut().enumerate() {
                *slot += scale * vr * v[col].conj();
            }
        }
    }
}

/// Photon number of `field` carried by block `(n, m)` in state `amp`.
fn photon_count(n: usize, m: usize, amp: &AmplitudeTriple, field: Field) -> f64 {
    let (nf, mf) = (n as f64, m as f64);
    let (pa, pb, pc) = (amp.a.norm_sqr(), amp.b.norm_sqr(), amp.c.norm_sqr());
    match field {
        Field::One => nf * pa + (nf - 1.0) * (pb + pc),
        Field::Two => mf * pa + (mf + 1.0) * pb + mf * pc,
    }
}

pub fn mean_photon_number(params: &ModelParams, tau: f64, field: Field) -> Result<f64> {
    Ok(Dynamics::new(params)?.mean_photon_number(tau, field))
}

pub fn reduced_density(params: &ModelParams, tau: f64, field: Field) -> Result<ReducedDensity> {
    Ok(Dynamics::new(params)?.reduced_density(tau, field))
}
