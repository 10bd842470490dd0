//! The conserved quantities and the monitor `m(t)`.
//!
//! With `W = [φ̄, φ]` (see [`crate::dynamics::wave_bracket`]):
//!
//! ```text
//! I₁ = ‖∇φ‖²
//! I₂ = ‖Δφ‖² + ½(‖B⁻¹χₜ‖² + ‖χ‖²) + (1/i)∫χW
//! m  = ‖Δφ‖² + ¼‖χ‖² + ½‖B⁻¹χₜ‖² + ‖∇φ‖²
//! ```
//!
//! All norms are over the torus; the spectral measure is `Lᵈ`.

use num_complex::Complex64;

use crate::dynamics::nonlinear::{check_geometry, physical_gradient, wave_bracket_from_gradient};
use crate::dynamics::{Geometry, State};
use crate::error::{Error, Result};
use crate::spectral::{Field, ZERO_MODE_TOLERANCE};

/// Relative imaginary residue allowed in the cubic term.
pub const REALNESS_TOLERANCE: f64 = 1e-10;

/// `Lᵈ Σ w(|ξ|²) |f̂(ξ)|²`.
fn weighted_sq(field: &Field, w: impl Fn(f64) -> f64) -> f64 {
    let s = field.to_spectral();
    let g = *s.grid();
    let sum: f64 = s
        .values()
        .iter()
        .enumerate()
        .map(|(i, v)| w(g.xi_sq(i)) * v.norm_sqr())
        .sum();
    sum * g.volume()
}

/// `I₁ = ∫ |∇φ|² dx`.
pub fn compute_i1(phi: &Field) -> f64 {
    weighted_sq(phi, |x| x)
}

pub fn laplacian_norm_sq(phi: &Field) -> f64 {
    weighted_sq(phi, |x| x * x)
}

/// `‖B⁻¹f‖²`; `f` must be mean-zero.
pub fn inverse_riesz_norm_sq(f: &Field) -> Result<f64> {
    let s = f.to_spectral();
    if s.values()[0].norm() > ZERO_MODE_TOLERANCE * s.max_abs().max(1.0) {
        return Err(Error::ZeroMode(
            "B^-1 applied to a field with nonzero mean".into(),
        ));
    }
    Ok(weighted_sq(&s, |x| if x == 0.0 { 0.0 } else { 1.0 / x }))
}

/// `∫ χ W dx` as a complex number, where `W = [φ̄, φ]` is formed pointwise
/// from spectral derivatives.
pub fn cubic_integral(phi: &Field, chi: &Field, geometry: Geometry) -> Result<Complex64> {
    check_geometry(phi, geometry)?;
    phi.check_same_grid(chi)?;
    let w = wave_bracket_from_gradient(&physical_gradient(phi)?, geometry)?.into_spectral();
    let c = chi.to_spectral();
    let g = *c.grid();
    // ∫ f h dx = Lᵈ Σ_m f̂(m) ĥ(−m)
    let n = g.points_per_axis() as i64;
    let mut sum = Complex64::new(0.0, 0.0);
    for i in 0..g.len() {
        let m = g.modes(i);
        let neg = m.map(|v| if v == -n / 2 { v } else { -v });
        sum += c.values()[i] * w.values()[g.flat_of_modes(neg)];
    }
    Ok(sum * g.volume())
}

/// `(1/i)∫χW`, checked to be real.
pub fn cubic_term(phi: &Field, chi: &Field, geometry: Geometry) -> Result<f64> {
    let z = cubic_integral(phi, chi, geometry)? * Complex64::new(0.0, -1.0);
    let scale = chi.norm() * (compute_i1(phi) + laplacian_norm_sq(phi)) + f64::MIN_POSITIVE;
    let residual = z.im.abs() / scale;
    if residual > REALNESS_TOLERANCE {
        return Err(Error::Realness {
            what: "cubic energy term",
            residual,
        });
    }
    Ok(z.re)
}

/// `I₂ = ‖Δφ‖² + ½(‖B⁻¹χₜ‖² + ‖χ‖²) + (1/i)∫χW`.
pub fn compute_i2(phi: &Field, chi: &Field, chi_t: &Field, geometry: Geometry) -> Result<f64> {
    chi.check_same_grid(chi_t)?;
    let quad = laplacian_norm_sq(phi) + 0.5 * (inverse_riesz_norm_sq(chi_t)? + chi.norm_sq());
    Ok(quad + cubic_term(phi, chi, geometry)?)
}

/// `m = ‖Δφ‖² + ¼‖χ‖² + ½‖B⁻¹χₜ‖² + ‖∇φ‖²`.
pub fn compute_m(state: &State) -> Result<f64> {
    let (chi, chi_t) = state.chi_pair()?;
    let phi = &state.phi;
    Ok(laplacian_norm_sq(phi)
        + 0.25 * chi.norm_sq()
        + 0.5 * inverse_riesz_norm_sq(&chi_t)?
        + compute_i1(phi))
}

/// Every quantity the energy argument uses, at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InvariantSample {
    pub t: f64,
    pub i1: f64,
    pub i2: f64,
    pub m: f64,
    /// Signed `(1/i)∫χW`.
    pub cubic: f64,
}

impl InvariantSample {
    /// `Ẽ`: the energy `I₁ + I₂` with the cubic term replaced by its modulus.
    pub fn e_tilde(&self) -> f64 {
        self.i1 + self.i2 - self.cubic + self.cubic.abs()
    }
}

pub fn measure(state: &State) -> Result<InvariantSample> {
    let (chi, chi_t) = state.chi_pair()?;
    let phi = &state.phi;
    let cubic = cubic_term(phi, &chi, state.geometry)?;
    let lap = laplacian_norm_sq(phi);
    let grad = compute_i1(phi);
    let chi_sq = chi.norm_sq();
    let vel = inverse_riesz_norm_sq(&chi_t)?;
    Ok(InvariantSample {
        t: state.t,
        i1: grad,
        i2: lap + 0.5 * (vel + chi_sq) + cubic,
        m: lap + 0.25 * chi_sq + 0.5 * vel + grad,
        cubic,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{Grid, Representation};
    use std::f64::consts::PI;

    /// Physical-space copy of `f` with imaginary parts dropped.
    fn real_part(f: &Field) -> Field {
        let p = f.to_physical();
        let g = *p.grid();
        Field::from_values(
            g,
            Representation::Physical,
            p.values()
                .iter()
                .map(|v| Complex64::new(v.re, 0.0))
                .collect(),
        )
        .expect("same length")
    }

    #[test]
    fn plane_wave_values() {
        let g = Grid::new(2, 16, 2.0 * PI).unwrap();
        let phi = Field::from_fn(g, |x| Complex64::from_polar(1.0, x[0]));
        let area = 4.0 * PI * PI;
        assert!((compute_i1(&phi) - area).abs() < 1e-10);
        let zero = Field::zeros(g, Representation::Spectral);
        let i2 = compute_i2(&phi, &zero, &zero, Geometry::Dim2).unwrap();
        assert!((i2 - area).abs() < 1e-10);
        let s = State {
            t: 0.0,
            phi: phi.into_spectral(),
            chi_plus: zero.clone(),
            chi_minus: zero,
            geometry: Geometry::Dim2,
        };
        assert!((compute_m(&s).unwrap() - 2.0 * area).abs() < 1e-10);
        assert_eq!(compute_i1(&Field::zeros(g, Representation::Physical)), 0.0);
    }

    #[test]
    fn real_phi_has_no_cubic_term() {
        let g = Grid::new(3, 8, 2.0 * PI).unwrap();
        let phi = Field::from_fn(g, |x| Complex64::new((x[0] + x[1]).sin() * x[2].cos(), 0.0));
        let chi = real_part(&Field::from_fn(g, |x| Complex64::new(x[1].cos(), 0.0)));
        let geom = Geometry::Dim3 { e: [0.2, 0.3, 0.9] };
        assert!(cubic_term(&phi, &chi, geom).unwrap().abs() < 1e-12);
    }

    #[test]
    fn e_tilde_replaces_cubic_by_modulus() {
        let s = InvariantSample {
            t: 0.0,
            i1: 1.0,
            i2: 2.0,
            m: 0.0,
            cubic: -0.5,
        };
        assert_eq!(s.e_tilde(), 4.0);
    }
}
