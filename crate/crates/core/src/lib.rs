//! Closed-form simulation of a three-level Lambda atom coupled to two Kerr
//! fields through an intensity-dependent interaction, and the nonlinear
//! time-series pipeline used to study the mean photon number it produces:
//! delay embedding, Lyapunov exponents, recurrence plots, first-return
//! statistics, power spectra and epsilon-recurrence networks.

pub mod embedding;
pub mod error;
pub mod model;
pub mod network;
pub mod oracle;
pub mod recurrence;
pub mod series;
pub mod spatial;

pub use error::{Error, Result};
pub use series::ScalarTimeSeries;
