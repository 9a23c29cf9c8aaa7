//! Reference solutions computed without the closed-form roots.
//!
//! These are the cross-checks behind the `verify` command and the
//! model tests: a Taylor-series integrator for the per-block amplitude
//! equations, and a dense diagonalization of the interaction Hamiltonian on
//! the full truncated tensor-product space.

mod schrodinger;
mod taylor;

pub use schrodinger::SchrodingerOracle;
pub use taylor::{integrate_block, ode_mean_photon_series};
