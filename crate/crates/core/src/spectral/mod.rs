//! Periodic grids, Fourier transforms and multiplier operators.

pub mod fft;
mod field;
mod grid;
mod ops;
pub mod snapshot;

pub use field::{Field, Representation};
pub use grid::Grid;
pub use ops::{
    apply_multiplier, cross_dot_e, dealias, dot, gradient, partial, perp_gradient,
    project_admissible, remove_nyquist, Multiplier, ZERO_MODE_TOLERANCE,
};
