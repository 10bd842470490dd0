use serde::{Deserialize, Serialize};

use super::reformulation;
use crate::error::{Error, Result};
use crate::spectral::{self, Field};

/// Spatial setting of the system: the 2D bracket `∇a · ∇̄b`, or the 3D
/// bracket `(∇a × ∇b) · e` for a constant real vector `e`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Geometry {
    Dim2,
    Dim3 { e: [f64; 3] },
}

impl Geometry {
    pub fn dimension(&self) -> usize {
        match self {
            Geometry::Dim2 => 2,
            Geometry::Dim3 { .. } => 3,
        }
    }

    pub fn e(&self) -> Option<[f64; 3]> {
        match *self {
            Geometry::Dim2 => None,
            Geometry::Dim3 { e } => Some(e),
        }
    }
}

/// Tolerance on `‖χ₋ − conj(χ₊)‖ / ‖χ₊‖` beyond which a state counts as
/// corrupted.
pub const CONJUGACY_TOLERANCE: f64 = 1e-10;

/// First-order evolution unknowns `(t, φ, χ₊, χ₋)`, held spectrally.
#[derive(Debug, Clone, PartialEq)]
pub struct State {
    pub t: f64,
    pub phi: Field,
    pub chi_plus: Field,
    pub chi_minus: Field,
    pub geometry: Geometry,
}

impl State {
    /// Builds a state from second-order data `(φ₀, χ₀, χ₁)`. All three fields
    /// are projected onto the evolution class (mean zero, Nyquist removed,
    /// 2/3-truncated when `dealias`), and `χ₀, χ₁` are replaced by their real
    /// parts.
    pub fn from_data(
        phi0: &Field,
        chi0: &Field,
        chi1: &Field,
        geometry: Geometry,
        dealias: bool,
    ) -> Result<Self> {
        let d = phi0.grid().dimension();
        if d != geometry.dimension() {
            return Err(Error::Dimension {
                op: "State::from_data",
                needed: geometry.dimension(),
                found: d,
            });
        }
        phi0.check_same_grid(chi0)?;
        phi0.check_same_grid(chi1)?;
        let real = |f: &Field| {
            f.to_physical()
                .map(|v| num_complex::Complex64::new(v.re, 0.0))
        };
        let phi = spectral::project_admissible(phi0, dealias);
        let chi0 = spectral::project_admissible(&real(chi0), dealias);
        let chi1 = spectral::project_admissible(&real(chi1), dealias);
        let (chi_plus, chi_minus) = reformulation::to_first_order(&chi0, &chi1)?;
        Ok(State {
            t: 0.0,
            phi,
            chi_plus,
            chi_minus,
            geometry,
        })
    }

    pub fn zeros(grid: spectral::Grid, geometry: Geometry) -> Self {
        let z = Field::zeros(grid, spectral::Representation::Spectral);
        State {
            t: 0.0,
            phi: z.clone(),
            chi_plus: z.clone(),
            chi_minus: z,
            geometry,
        }
    }

    pub fn grid(&self) -> &spectral::Grid {
        self.phi.grid()
    }

    /// `(χ, χₜ)` recovered from `χ±`.
    pub fn chi_pair(&self) -> Result<(Field, Field)> {
        reformulation::from_first_order(&self.chi_plus, &self.chi_minus)
    }

    /// `‖χ₋ − conj(χ₊)‖ / max(‖χ₊‖, tiny)`.
    pub fn conjugacy_residual(&self) -> f64 {
        let diff = self
            .chi_minus
            .to_spectral()
            .sub(&self.chi_plus.to_spectral().conj())
            .map(|d| d.norm())
            .unwrap_or(f64::INFINITY);
        let scale = self.chi_plus.norm();
        if scale > 0.0 {
            diff / scale
        } else {
            diff
        }
    }

    /// Multiplies `φ` by `e^{iθ}`.
    pub fn gauge_rotated(&self, theta: f64) -> State {
        let mut s = self.clone();
        s.phi = s.phi.scale(num_complex::Complex64::from_polar(1.0, theta));
        s
    }

    pub fn is_finite(&self) -> bool {
        self.phi.is_finite() && self.chi_plus.is_finite() && self.chi_minus.is_finite()
    }

    /// Spectral copies of the three evolved fields.
    pub(crate) fn spectral_parts(&self) -> [Field; 3] {
        [
            self.phi.to_spectral(),
            self.chi_plus.to_spectral(),
            self.chi_minus.to_spectral(),
        ]
    }
}
