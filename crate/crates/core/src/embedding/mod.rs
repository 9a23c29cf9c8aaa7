//! Phase-space reconstruction and the maximal Lyapunov exponent.

mod cloud;
mod delay;
mod dimension;
mod lyapunov;

pub use cloud::{delay_embed, EmbeddedCloud};
pub use delay::{
    autocorrelation, average_mutual_information, select_delay, select_delay_detailed, DelayRule, DelaySelection,
    AMI_BINS, MAX_LAG,
};
pub use dimension::{
    false_neighbor_fraction, select_dimension, select_dimension_detailed, DimensionSelection, FNN_RATIO,
    FNN_THRESHOLD, MAX_DIMENSION,
};
pub use lyapunov::{linear_fit, max_lyapunov, LyapunovEstimate, DEFAULT_FIT_RANGE, MIN_R_SQUARED};
