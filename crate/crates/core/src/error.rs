use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("Fock cutoff {cutoff} leaves tail mass {tail:.3e} above tolerance {tolerance:.1e}")]
    TruncationInadequate {
        cutoff: usize,
        tail: f64,
        tolerance: f64,
    },

    #[error("cubic roots for block (n={n}, m={m}) are degenerate to {separation:.3e}")]
    NearDegenerateRoots { n: usize, m: usize, separation: f64 },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("series of length {len} is too short: {needed} required")]
    InsufficientLength { len: usize, needed: usize },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("no delay structure found: neither mutual information nor autocorrelation gave a lag")]
    NoStructure,

    #[error("only {found} of {total} reference points have a valid neighbour")]
    InsufficientNeighbors { found: usize, total: usize },

    #[error("link density {reached:.4} at the cloud diameter is below the target {target:.4}")]
    UnreachableTarget { target: f64, reached: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
