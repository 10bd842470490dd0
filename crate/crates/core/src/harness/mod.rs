//! Configuration, run orchestration and report emission behind the CLI.

mod config;
mod initial;
mod report;
mod run;

pub use config::{
    load_config, parse_config, BourgainConfig, Checks, ConvergenceConfig, GridConfig, Mode,
    RunConfig, TrapConfig, MAX_SEED, OUT_ENV, SCHEMA_VERSION,
};
pub use initial::InitialData;
pub use report::{
    emit_json, emit_report, emit_summary, lemma_slug, ConvergenceRow, ConvergenceTable,
    ReportFormat, RunInfo, Tabular,
};
pub use run::{
    convergence_table, initial_state, run, trap_c0, trap_initial, Outcome, ROUNDOFF_FLOOR,
};

use serde::Serialize;

use crate::error::Error;

/// Exit status for a failed run: 2 configuration, 3 numerical failure,
/// 1 anything else (I/O, malformed files).
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config(_)
        | Error::Inadmissible { .. }
        | Error::InvalidGrid(_)
        | Error::Dimension { .. } => 2,
        Error::BlowUp { .. }
        | Error::Realness { .. }
        | Error::Conjugacy { .. }
        | Error::ZeroMode(_)
        | Error::LatticeCap { .. } => 3,
        _ => 1,
    }
}

/// Machine-readable error record.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorRecord {
    pub kind: &'static str,
    pub message: String,
    pub exit_code: i32,
}

impl ErrorRecord {
    pub fn new(e: &Error) -> Self {
        let kind = match e {
            Error::InvalidGrid(_) => "invalid_grid",
            Error::Representation { .. } => "representation",
            Error::GridMismatch => "grid_mismatch",
            Error::Dimension { .. } => "dimension",
            Error::ZeroMode(_) => "zero_mode",
            Error::Conjugacy { .. } => "conjugacy",
            Error::Realness { .. } => "realness",
            Error::BlowUp { .. } => "blow_up",
            Error::Inadmissible { .. } => "inadmissible",
            Error::LatticeCap { .. } => "lattice_cap",
            Error::InvalidArgument(_) => "invalid_argument",
            Error::Format(_) => "format",
            Error::Config(_) => "config",
            Error::Io(_) => "io",
        };
        Self {
            kind,
            message: e.to_string(),
            exit_code: exit_code(e),
        }
    }
}
