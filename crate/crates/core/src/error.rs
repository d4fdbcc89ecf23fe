use thiserror::Error;

/// Errors produced by the numerical routines in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{what} did not converge: {detail}")]
    NonConvergence { what: &'static str, detail: String },

    /// The two lowest eigenvalues are closer than the degeneracy threshold.
    #[error("degenerate ground state: E0 = {e0}, E1 = {e1}")]
    DegenerateGround { e0: f64, e1: f64 },

    /// The fringe slope |dN/dphi| vanishes, so the phase error diverges.
    #[error("insensitive operating point: |dN/dphi| = {slope:.3e}")]
    InsensitivePoint { slope: f64 },

    #[error("X-Y covariance {covariance:.3e} violates the zero-covariance assumption")]
    CovarianceAssumptionViolated { covariance: f64 },

    #[error("state dimension {dimension} exceeds the limit {limit}")]
    DimensionTooLarge { dimension: usize, limit: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
