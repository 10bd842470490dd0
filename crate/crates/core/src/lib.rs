//! Pseudospectral simulation and Bourgain-space estimate harness for the
//! modified Zakharov system in two and three space dimensions.

pub mod bourgain;
pub mod dynamics;
pub mod error;
pub mod harness;
pub mod invariants;
pub mod spectral;

pub use error::{Error, Result};
