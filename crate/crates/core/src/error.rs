//! Error taxonomy shared across the crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Input outside the mathematical domain of an operation
    /// (point outside the region, sensor power below the achievable minimum, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// Invalid configuration: bad scenario constants, resolution < 2,
    /// malformed config files. Maps to CLI exit code 2.
    #[error("config error: {0}")]
    Config(String),

    /// Mutually inconsistent inputs, e.g. a partition referencing an AP
    /// the deployment does not have.
    #[error("consistency error: {0}")]
    Consistency(String),

    /// Operation requires a mode the scenario is not in
    /// (coverage needs power budgets).
    #[error("mode error: {0}")]
    Mode(String),

    /// API misuse, e.g. a pairwise cell of an AP against itself.
    #[error("usage error: {0}")]
    Usage(String),

    /// FC update with zero attached volume; the caller must relocate the FC.
    #[error("fusion center {0} is idle (zero attached volume)")]
    IdleFc(usize),

    /// Projection onto an empty feasible set.
    #[error("infeasible projection: {0}")]
    InfeasibleProjection(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Exit code for the CLI: 2 for configuration problems, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Usage(_) => 2,
            _ => 1,
        }
    }
}

/// Validation helper: rejects non-positive values and NaN alike.
#[allow(clippy::neg_cmp_op_on_partial_ord)]
pub(crate) fn not_positive(v: f64) -> bool {
    !(v > 0.0)
}
