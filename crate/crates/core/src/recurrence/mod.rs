//! Recurrence matrices, the critical threshold, return maps, first-return
//! statistics and power spectra.

mod critical;
mod dip;
mod graph;
mod returns;
mod spectrum;

pub use critical::{
    component_count, epsilon_critical, epsilon_critical_spectral, epsilon_critical_with, laplacian,
    laplacian_eigenvalues, max_consecutive_step, zero_eigenvalue_count, CriticalEpsilon, UnionFind,
    BISECTION_STEPS, ZERO_EIGENVALUE,
};
pub use dip::dip_statistic;
pub use graph::{recurrence_density, recurrence_matrix, recurrence_plot_data, recurrence_plot_pairs, RecurrenceGraph};
pub use returns::{
    cell_index, first_return_distribution, return_map, ring_statistic, spikes, ReturnHistogram, RingStatistic,
    SpikeSummary, DEFAULT_CELLS, RING_DIP_THRESHOLD, SPIKE_FRACTION,
};
pub use spectrum::{power_spectrum, Spectrum, MIN_SPECTRUM_LENGTH};
