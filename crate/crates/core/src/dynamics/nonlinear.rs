//! Cross-gradient nonlinearities.
//!
//! Both nonlinearities are built from one antisymmetric bilinear form on
//! gradients,
//!
//! ```text
//! 2D:  [a, b] = ∂₁a ∂₂b − ∂₂a ∂₁b            (= ∇a · ∇̄b)
//! 3D:  [a, b] = (∇a × ∇b) · e
//! ```
//!
//! The Schrödinger equation sees `C = [φ, χ]`, the wave equation sees
//! `W = [φ̄, φ]`, which is purely imaginary. Derivatives are spectral,
//! products are formed in physical space, and each product is truncated
//! (optionally 2/3-dealiased) and projected to mean zero.

use num_complex::Complex64;

use super::state::Geometry;
use crate::error::{Error, Result};
use crate::spectral::{self, Field, Multiplier};

pub(crate) fn check_geometry(field: &Field, geometry: Geometry) -> Result<()> {
    let d = field.grid().dimension();
    if d != geometry.dimension() {
        return Err(Error::Dimension {
            op: "nonlinearity",
            needed: geometry.dimension(),
            found: d,
        });
    }
    Ok(())
}

/// Physical-space gradient components.
pub(crate) fn physical_gradient(field: &Field) -> Result<Vec<Field>> {
    Ok(spectral::gradient(field)?
        .into_iter()
        .map(Field::into_physical)
        .collect())
}

/// The bracket `[a, b]` from physical gradients, physical output.
pub(crate) fn bracket(grad_a: &[Field], grad_b: &[Field], geometry: Geometry) -> Result<Field> {
    match geometry {
        Geometry::Dim2 => {
            let g = *grad_a[0].grid();
            let (a1, a2) = (grad_a[0].values(), grad_a[1].values());
            let (b1, b2) = (grad_b[0].values(), grad_b[1].values());
            let values = (0..g.len())
                .map(|i| a1[i] * b2[i] - a2[i] * b1[i])
                .collect();
            Field::from_values(g, spectral::Representation::Physical, values)
        }
        Geometry::Dim3 { e } => spectral::cross_dot_e(grad_a, grad_b, e),
    }
}

/// Truncate a physical product back onto the evolution class.
pub(crate) fn finish(product: Field, dealias: bool) -> Field {
    spectral::project_admissible(&product, dealias)
}

/// `C = [φ, χ]`, spectral, mean zero.
pub fn cross_term(phi: &Field, chi: &Field, geometry: Geometry, dealias: bool) -> Result<Field> {
    check_geometry(phi, geometry)?;
    phi.check_same_grid(chi)?;
    let gp = physical_gradient(phi)?;
    let gc = physical_gradient(chi)?;
    Ok(finish(bracket(&gp, &gc, geometry)?, dealias))
}

/// `W = [φ̄, φ]`, spectral, mean zero, purely imaginary in physical space.
pub fn wave_bracket(phi: &Field, geometry: Geometry, dealias: bool) -> Result<Field> {
    check_geometry(phi, geometry)?;
    let gp = physical_gradient(phi)?;
    Ok(finish(wave_bracket_from_gradient(&gp, geometry)?, dealias))
}

/// `[φ̄, φ]` from the physical gradient of `φ`. Written as `q − conj(q)` with
/// `q = ∂₁φ̄ ∂₂φ`-type terms so the real part is exactly zero.
pub(crate) fn wave_bracket_from_gradient(gp: &[Field], geometry: Geometry) -> Result<Field> {
    let g = *gp[0].grid();
    let conj: Vec<&[Complex64]> = gp.iter().map(|f| f.values()).collect();
    let values: Vec<Complex64> = match geometry {
        Geometry::Dim2 => (0..g.len())
            .map(|i| {
                let q = conj[0][i].conj() * conj[1][i];
                Complex64::new(0.0, 2.0 * q.im)
            })
            .collect(),
        Geometry::Dim3 { e } => (0..g.len())
            .map(|i| {
                let (p0, p1, p2) = (conj[0][i], conj[1][i], conj[2][i]);
                // (∇φ̄ × ∇φ)_k = q_k − conj(q_k)
                let q0 = p1.conj() * p2;
                let q1 = p2.conj() * p0;
                let q2 = p0.conj() * p1;
                Complex64::new(0.0, 2.0 * (q0.im * e[0] + q1.im * e[1] + q2.im * e[2]))
            })
            .collect(),
    };
    Field::from_values(g, spectral::Representation::Physical, values)
}

/// `N_S = (1/i) [φ, χ]`: the nonlinear term as it appears in the
/// Schrödinger-type equation `i∂ₜΔφ + Δ²φ + N_S = 0`.
pub fn schrodinger_nonlinearity(
    phi: &Field,
    chi: &Field,
    geometry: Geometry,
    dealias: bool,
) -> Result<Field> {
    Ok(cross_term(phi, chi, geometry, dealias)?.scale(Complex64::new(0.0, -1.0)))
}

/// `N_W = (1/i) Δ[φ̄, φ]`: the forcing of `χₜₜ − Δχ = N_W`. Real-valued.
pub fn wave_nonlinearity(phi: &Field, geometry: Geometry, dealias: bool) -> Result<Field> {
    let w = wave_bracket(phi, geometry, dealias)?;
    Ok(spectral::apply_multiplier(&w, Multiplier::Laplacian)?.scale(Complex64::new(0.0, -1.0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{Grid, Representation};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn smooth_random(grid: Grid, seed: u64, real: bool) -> Field {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = Field::from_modes(grid, |m| {
            if m.iter().all(|c| c.abs() <= 2) {
                let im = if real { 0.0 } else { rng.gen_range(-1.0..1.0) };
                Complex64::new(rng.gen_range(-1.0..1.0), im)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        let mut p = f.into_physical();
        if real {
            for v in p.values_mut() {
                v.im = 0.0;
            }
        }
        spectral::project_admissible(&p, true)
    }

    #[test]
    fn constant_chi_gives_zero() {
        let g = Grid::new(2, 16, 2.0 * PI).unwrap();
        let phi = smooth_random(g, 1, false);
        let chi = Field::from_fn(g, |_| Complex64::new(3.0, 0.0));
        let n = schrodinger_nonlinearity(&phi, &chi, Geometry::Dim2, true).unwrap();
        assert!(n.max_abs() < 1e-14);
    }

    #[test]
    fn real_phi_gives_no_wave_forcing() {
        let g = Grid::new(3, 8, 2.0 * PI).unwrap();
        let phi = smooth_random(g, 2, true);
        let geom = Geometry::Dim3 {
            e: [0.3, 0.5, -0.8],
        };
        assert!(wave_nonlinearity(&phi, geom, true).unwrap().max_abs() < 1e-14);
    }

    #[test]
    fn wave_forcing_is_real_and_gauge_invariant() {
        let g = Grid::new(2, 16, 2.0 * PI).unwrap();
        let phi = smooth_random(g, 3, false);
        let n = wave_nonlinearity(&phi, Geometry::Dim2, true).unwrap();
        assert!(n.max_abs() > 1e-3);
        assert!(n.max_imag() / n.max_abs() < 1e-12);
        let rotated = phi.scale(Complex64::from_polar(1.0, 0.731));
        let n2 = wave_nonlinearity(&rotated, Geometry::Dim2, true).unwrap();
        assert!(n2.max_abs_diff(&n).unwrap() / n.max_abs() < 1e-12);
    }

    #[test]
    fn single_mode_has_no_wave_forcing() {
        let g = Grid::new(3, 8, 2.0 * PI).unwrap();
        let phi = Field::from_fn(g, |x| Complex64::from_polar(0.7, x[0] + 2.0 * x[1] - x[2]));
        let geom = Geometry::Dim3 { e: [1.0, 2.0, 3.0] };
        assert!(wave_nonlinearity(&phi, geom, true).unwrap().max_abs() < 1e-12);
    }

    #[test]
    fn third_component_reduces_to_2d_bracket() {
        let g2 = Grid::new(2, 16, 2.0 * PI).unwrap();
        let g3 = Grid::new(3, 16, 2.0 * PI).unwrap();
        let phi2 = smooth_random(g2, 4, false).into_physical();
        let chi2 = smooth_random(g2, 5, true).into_physical();
        let lift = |f: &Field| {
            Field::from_values(
                g3,
                Representation::Physical,
                (0..g3.len())
                    .map(|i| {
                        let idx = g3.unravel(i);
                        f.values()[g2.ravel([idx[0], idx[1], 0])]
                    })
                    .collect(),
            )
            .unwrap()
        };
        let n2 = schrodinger_nonlinearity(&phi2, &chi2, Geometry::Dim2, true)
            .unwrap()
            .into_physical();
        let n3 = schrodinger_nonlinearity(
            &lift(&phi2),
            &lift(&chi2),
            Geometry::Dim3 { e: [0.0, 0.0, 1.0] },
            true,
        )
        .unwrap();
        assert!(n3.max_abs_diff(&lift(&n2)).unwrap() < 1e-13);
    }

    #[test]
    fn geometry_mismatch_is_rejected() {
        let g = Grid::new(2, 8, 1.0).unwrap();
        let f = Field::zeros(g, Representation::Spectral);
        let geom = Geometry::Dim3 { e: [0.0, 0.0, 1.0] };
        assert!(matches!(
            wave_nonlinearity(&f, geom, true),
            Err(Error::Dimension { .. })
        ));
    }
}
