use thiserror::Error;

use crate::spectral::Representation;

/// Errors raised anywhere in the simulator or the estimate harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("representation mismatch: expected {expected:?}, found {found:?}")]
    Representation {
        expected: Representation,
        found: Representation,
    },

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("{op} requires a {needed}D grid, got {found}D")]
    Dimension {
        op: &'static str,
        needed: usize,
        found: usize,
    },

    #[error("zero-mode obstruction: {0}")]
    ZeroMode(String),

    #[error("conjugacy of chi_plus/chi_minus violated (residual {residual:.3e})")]
    Conjugacy { residual: f64 },

    #[error("imaginary residue {residual:.3e} in a quantity that must be real ({what})")]
    Realness { what: &'static str, residual: f64 },

    #[error("non-finite values after step {step} (t = {t})")]
    BlowUp { step: u64, t: f64 },

    #[error("inadmissible parameters for lemma {lemma}: {constraint}")]
    Inadmissible { lemma: String, constraint: String },

    #[error("lattice of {points} points exceeds the configured cap of {cap}")]
    LatticeCap { points: usize, cap: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("snapshot format: {0}")]
    Format(String),

    #[error("config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
