//! The first-order system, its reformulation and time integrators.

pub mod checkpoint;
mod integrate;
mod kernel;
pub(crate) mod nonlinear;
mod propagator;
mod reformulation;
mod state;

pub use integrate::{
    evolve, evolve_from, rhs_first_order, step, Integrator, Observer, SimConfig, Stepper,
    Trajectory,
};
pub use nonlinear::{cross_term, schrodinger_nonlinearity, wave_bracket, wave_nonlinearity};
pub use propagator::{linear_propagator, PropagatorKind};
pub use reformulation::{from_first_order, to_first_order};
pub use state::{Geometry, State, CONJUGACY_TOLERANCE};
