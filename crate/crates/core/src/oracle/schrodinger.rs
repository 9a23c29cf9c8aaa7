use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::Result;
use crate::model::coherent::coherent_weights_with_tolerance;
use crate::model::observables::Field;
use crate::model::params::ModelParams;

/// Dense diagonalization of the interaction Hamiltonian
/// `sum_i chi a_i+^2 a_i^2 + lambda [a_i f(N_i) s_3i + f(N_i) a_i+ s_i3]`
/// on `atom (x) field 1 (x) field 2`, assembled from Kronecker products of
/// the single-mode operators.
///
/// Field 2 keeps one level above its cutoff so that emission from the
/// highest populated level stays inside the space. Intended for cutoffs of a
/// few tens; the cost is cubic in `3 (n_max + 1) (m_max + 2)`.
pub struct SchrodingerOracle {
    dims: (usize, usize, usize),
    energies: DVector<f64>,
    eigenvectors: DMatrix<f64>,
    initial_overlaps: DVector<f64>,
    initial_phase: Vec<Complex64>,
    lambda: f64,
}

fn lowering(dim: usize) -> DMatrix<f64> {
    DMatrix::from_fn(dim, dim, |r, c| if c == r + 1 { (c as f64).sqrt() } else { 0.0 })
}

fn atomic(j: usize, k: usize) -> DMatrix<f64> {
    let mut s = DMatrix::zeros(3, 3);
    s[(j, k)] = 1.0;
    s
}

impl SchrodingerOracle {
    pub fn new(params: &ModelParams) -> Result<Self> {
        params.validate()?;
        let d1 = params.n_max + 1;
        let d2 = params.m_max + 2;
        let (chi, lambda, kappa) = (params.chi, params.lambda, params.kappa);

        let a1 = lowering(d1);
        let a2 = lowering(d2);
        let number = |a: &DMatrix<f64>| a.transpose() * a;
        let f1 = DMatrix::from_diagonal(&number(&a1).diagonal().map(|n| (1.0 + kappa * n).sqrt()));
        let kerr = |a: &DMatrix<f64>| {
            let ad = a.transpose();
            &ad * &ad * a * a
        };
        let id1 = DMatrix::<f64>::identity(d1, d1);
        let id2 = DMatrix::<f64>::identity(d2, d2);
        let id3 = DMatrix::<f64>::identity(3, 3);

        let on_field1 = |atom: &DMatrix<f64>, op: &DMatrix<f64>| atom.kronecker(op).kronecker(&id2);
        let on_field2 = |atom: &DMatrix<f64>, op: &DMatrix<f64>| atom.kronecker(&id1).kronecker(op);

        let coupling1 = &a1 * &f1;
        let coupling2 = a2.clone();
        // Atomic levels |1>, |2>, |3> are indices 0, 1, 2.
        let mut h = on_field1(&id3, &kerr(&a1)) * chi + on_field2(&id3, &kerr(&a2)) * chi;
        let t1 = on_field1(&atomic(2, 0), &coupling1);
        let t2 = on_field2(&atomic(2, 1), &coupling2);
        h += (&t1 + t1.transpose()) * lambda;
        h += (&t2 + t2.transpose()) * lambda;

        let q = coherent_weights_with_tolerance(params.alpha, params.n_max, params.tail_tolerance)?;
        let r = coherent_weights_with_tolerance(params.alpha, params.m_max, params.tail_tolerance)?;
        let dim = 3 * d1 * d2;
        // The initial amplitudes q_n r_m share the phase (n + m) arg(alpha); the
        // Hamiltonian is real, so evolve the moduli and restore phases per basis state.
        let mut psi0 = DVector::zeros(dim);
        let mut initial_phase = vec![Complex64::new(1.0, 0.0); dim];
        for n in 0..d1 {
            for m in 0..d2 {
                let amp = q.get(n) * r.get(m);
                psi0[n * d2 + m] = amp.norm();
                initial_phase[n * d2 + m] = if amp.norm() > 0.0 { amp / amp.norm() } else { Complex64::new(1.0, 0.0) };
            }
        }
        let eig = SymmetricEigen::new(h);
        let initial_overlaps = eig.eigenvectors.transpose() * &psi0;
        Ok(SchrodingerOracle {
            dims: (3, d1, d2),
            energies: eig.eigenvalues,
            eigenvectors: eig.eigenvectors,
            initial_overlaps,
            initial_phase,
            lambda,
        })
    }

    /// Full state at `tau`, indexed `atom * d1 * d2 + n * d2 + m`.
    pub fn state(&self, tau: f64) -> Vec<Complex64> {
        let (_, d1, d2) = self.dims;
        let rotated: Vec<Complex64> = self
            .energies
            .iter()
            .zip(self.initial_overlaps.iter())
            .map(|(e, c)| Complex64::from_polar(*c, -e * tau / self.lambda))
            .collect();
        let dim = self.energies.len();
        let mut psi = vec![Complex64::new(0.0, 0.0); dim];
        for (row, slot) in psi.iter_mut().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for (k, c) in rotated.iter().enumerate() {
                acc += c * self.eigenvectors[(row, k)];
            }
            *slot = acc;
        }
        // Phases of the initial amplitudes factor as exp(i (n + m) phi) and
        // N1 + N2 + (atomic correction) is conserved, so each basis state
        // inherits the phase of the initial ket it descends from.
        for atom in 0..3 {
            for n in 0..d1 {
                for m in 0..d2 {
                    let idx = atom * d1 * d2 + n * d2 + m;
                    let (n0, m0) = match atom {
                        0 => (n, m),
                        1 => (n + 1, m.wrapping_sub(1)),
                        _ => (n + 1, m),
                    };
                    if n0 < d1 && m0 < d2 {
                        psi[idx] *= self.initial_phase[n0 * d2 + m0];
                    }
                }
            }
        }
        psi
    }

    pub fn mean_photon_number(&self, tau: f64, field: Field) -> f64 {
        let (_, d1, d2) = self.dims;
        self.state(tau)
            .iter()
            .enumerate()
            .map(|(idx, amp)| {
                let photons = match field {
                    Field::One => (idx / d2) % d1,
                    Field::Two => idx % d2,
                };
                photons as f64 * amp.norm_sqr()
            })
            .sum()
    }

    /// Partial trace over the atom and field 2.
    pub fn reduced_density_field_one(&self, tau: f64) -> DMatrix<Complex64> {
        let (_, d1, d2) = self.dims;
        let psi = self.state(tau);
        let mut rho = DMatrix::from_element(d1, d1, Complex64::new(0.0, 0.0));
        for atom in 0..3 {
            for m in 0..d2 {
                for n in 0..d1 {
                    let x = psi[atom * d1 * d2 + n * d2 + m];
                    for np in 0..d1 {
                        rho[(n, np)] += x * psi[atom * d1 * d2 + np * d2 + m].conj();
                    }
                }
            }
        }
        rho
    }
}
