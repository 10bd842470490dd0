//! Free groups `e^{itΔ}` and `e^{∓itB}` as exact spectral phases.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::spectral::{Field, Grid};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PropagatorKind {
    /// `e^{itΔ}`: symbol `e^{−it|ξ|²}`.
    Schrodinger,
    /// `e^{−itB}`: symbol `e^{−it|ξ|}`.
    WavePlus,
    /// `e^{+itB}`: symbol `e^{+it|ξ|}`.
    WaveMinus,
}

impl PropagatorKind {
    /// Linear rate `λ(ξ)` with `∂ₜû = λ û`.
    #[inline]
    pub fn rate(self, xi_sq: f64) -> Complex64 {
        match self {
            PropagatorKind::Schrodinger => Complex64::new(0.0, -xi_sq),
            PropagatorKind::WavePlus => Complex64::new(0.0, -xi_sq.sqrt()),
            PropagatorKind::WaveMinus => Complex64::new(0.0, xi_sq.sqrt()),
        }
    }

    /// Spectral phase table `e^{t λ(ξ)}` over `grid`.
    pub fn phases(self, grid: &Grid, t: f64) -> Vec<Complex64> {
        (0..grid.len())
            .map(|i| (self.rate(grid.xi_sq(i)) * t).exp())
            .collect()
    }
}

/// Applies the free group for time `t`. Output is spectral.
pub fn linear_propagator(field: &Field, t: f64, kind: PropagatorKind) -> Field {
    let mut s = field.to_spectral();
    let g = *s.grid();
    for (i, v) in s.values_mut().iter_mut().enumerate() {
        *v *= (kind.rate(g.xi_sq(i)) * t).exp();
    }
    s
}
