//! Conserved quantities, the monitor `m(t)` and the energy trap.

mod quantities;
mod series;
mod trap;

pub use quantities::{
    compute_i1, compute_i2, compute_m, cubic_integral, cubic_term, inverse_riesz_norm_sq,
    laplacian_norm_sq, measure, InvariantSample, REALNESS_TOLERANCE,
};
pub use series::{InvariantRecorder, InvariantSeries, CSV_HEADER};
pub use trap::{
    c0_members, estimate_c0, estimate_c0_with, smaller_root, trap_check, C0Options, TrapReport,
    C0_SAFETY_FACTOR, DEFAULT_C0_SEED, TRAP_SLACK,
};
