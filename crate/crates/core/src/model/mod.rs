//! Exact dynamics of the atom-plus-two-fields system and its observables.

pub mod algebra;
pub mod coefficients;
pub mod coherent;
pub mod observables;
pub mod params;
pub mod series;

pub use algebra::{algebra_residual, AlgebraResidual};
pub use coefficients::{
    evolve_coefficients, intermediates, ode_residual, AmplitudeTriple, BlockCouplings, BlockSpectrum,
    CoefficientIntermediates, VacuumBranch,
};
pub use coherent::{coherent_weights, coherent_weights_with_tolerance, CoherentWeights};
pub use observables::{mean_photon_number, reduced_density, Dynamics, Field, ReducedDensity};
pub use params::{default_cutoff, Convention, ModelParams, DEFAULT_TAIL_TOLERANCE};
pub use series::{collapse_statistic, generate_series, series_from_dynamics, DEFAULT_BURN_IN};
