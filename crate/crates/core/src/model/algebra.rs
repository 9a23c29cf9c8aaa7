use nalgebra::DMatrix;

use crate::error::{invalid, Result};

/// Max-entry residuals of `[R, R+] - 2 R0`, `[R, R0] - kappa R` and
/// `[R+, R0] + kappa R+` on the interior block of a truncated Fock space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlgebraResidual {
    pub raising_lowering: f64,
    pub lowering_weight: f64,
    pub raising_weight: f64,
}

impl AlgebraResidual {
    pub fn max(&self) -> f64 {
        self.raising_lowering.max(self.lowering_weight).max(self.raising_weight)
    }
}

/// Builds `R = a f(N)`, `R+` and `R0 = 1/2 + kappa (N + 1/2)` with
/// `f(N) = sqrt(1 + kappa N)` on `cutoff` Fock states and checks the closed
/// commutator algebra on indices below `cutoff - 2`.
pub fn algebra_residual(kappa: f64, cutoff: usize) -> Result<AlgebraResidual> {
    if cutoff < 8 {
        return Err(invalid("cutoff", format!("{cutoff} is below the minimum of 8")));
    }
    if !(0.0..=1.0).contains(&kappa) {
        return Err(invalid("kappa", format!("{kappa} is outside [0, 1]")));
    }
    let dim = cutoff;
    let lowering = DMatrix::from_fn(dim, dim, |row, col| {
        if col == row + 1 {
            let n = col as f64;
            n.sqrt() * (1.0 + kappa * n).sqrt()
        } else {
            0.0
        }
    });
    let raising = lowering.transpose();
    let weight = DMatrix::from_fn(dim, dim, |row, col| {
        if row == col {
            0.5 + kappa * (row as f64 + 0.5)
        } else {
            0.0
        }
    });
    let commutator = |x: &DMatrix<f64>, y: &DMatrix<f64>| x * y - y * x;

    let interior = cutoff - 2;
    let max_interior = |m: DMatrix<f64>| {
        m.view((0, 0), (interior, interior))
            .iter()
            .fold(0.0f64, |acc, v| acc.max(v.abs()))
    };
    Ok(AlgebraResidual {
        raising_lowering: max_interior(commutator(&lowering, &raising) - 2.0 * &weight),
        lowering_weight: max_interior(commutator(&lowering, &weight) - kappa * &lowering),
        raising_weight: max_interior(commutator(&raising, &weight) + kappa * &raising),
    })
}
