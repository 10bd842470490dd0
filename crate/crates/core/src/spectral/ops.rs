//! Fourier multipliers and the differential operators built from them.

use num_complex::Complex64;

use super::field::{Field, Representation};
use crate::error::{Error, Result};

/// A radial Fourier multiplier.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Multiplier {
    /// `|ξ|^s`; `s = 1` is `B = (−Δ)^{1/2}`.
    RieszPower(f64),
    /// `−|ξ|²`.
    Laplacian,
    /// `|ξ|⁴`.
    Bilaplacian,
    /// `⟨ξ⟩^k = (1 + |ξ|²)^{k/2}`.
    BracketPower(f64),
    /// 1 away from the zero mode, 0 on it.
    ZeroMeanProjection,
}

impl Multiplier {
    /// Symbol value at `|ξ|²`.
    pub fn symbol(&self, xi_sq: f64) -> f64 {
        match *self {
            Multiplier::RieszPower(s) => {
                if xi_sq == 0.0 {
                    if s == 0.0 {
                        1.0
                    } else {
                        0.0
                    }
                } else {
                    xi_sq.powf(0.5 * s)
                }
            }
            Multiplier::Laplacian => -xi_sq,
            Multiplier::Bilaplacian => xi_sq * xi_sq,
            Multiplier::BracketPower(k) => (1.0 + xi_sq).powf(0.5 * k),
            Multiplier::ZeroMeanProjection => {
                if xi_sq == 0.0 {
                    0.0
                } else {
                    1.0
                }
            }
        }
    }

    fn needs_mean_zero(&self) -> bool {
        matches!(*self, Multiplier::RieszPower(s) if s < 0.0)
    }
}

/// Relative size below which a zero-mode coefficient counts as absent.
pub const ZERO_MODE_TOLERANCE: f64 = 1e-12;

fn zero_mode_present(spec: &Field) -> bool {
    let scale = spec.max_abs().max(1.0);
    spec.values()[0].norm() > ZERO_MODE_TOLERANCE * scale
}

/// Multiplies the spectrum by the symbol. The output keeps the input's
/// representation.
pub fn apply_multiplier(field: &Field, spec: Multiplier) -> Result<Field> {
    let repr = field.representation();
    let mut s = field.to_spectral();
    if spec.needs_mean_zero() && zero_mode_present(&s) {
        return Err(Error::ZeroMode(format!(
            "{spec:?} is undefined on the zero mode; project the mean out first (zero-mode coefficient {:.3e})",
            s.values()[0].norm()
        )));
    }
    let g = *s.grid();
    for (i, v) in s.values_mut().iter_mut().enumerate() {
        *v *= spec.symbol(g.xi_sq(i));
    }
    Ok(restore(s, repr))
}

fn restore(spectral: Field, repr: Representation) -> Field {
    match repr {
        Representation::Spectral => spectral,
        Representation::Physical => spectral.into_physical(),
    }
}

/// `∂_axis f`: multiplication by `iξ_axis`, with the Nyquist coefficient of
/// that axis sent to zero.
pub fn partial(field: &Field, axis: usize) -> Result<Field> {
    let g = *field.grid();
    if axis >= g.dimension() {
        return Err(Error::InvalidArgument(format!(
            "axis {axis} out of range for a {}D grid",
            g.dimension()
        )));
    }
    let repr = field.representation();
    let mut s = field.to_spectral();
    let k = g.wavenumber_unit();
    let nyq = g.nyquist_mode();
    for (i, v) in s.values_mut().iter_mut().enumerate() {
        let m = g.modes(i)[axis];
        *v = if m == nyq {
            Complex64::new(0.0, 0.0)
        } else {
            *v * Complex64::new(0.0, m as f64 * k)
        };
    }
    Ok(restore(s, repr))
}

/// `∇f` as one field per axis.
pub fn gradient(field: &Field) -> Result<Vec<Field>> {
    (0..field.grid().dimension())
        .map(|axis| partial(field, axis))
        .collect()
}

/// `∇̄f = (∂₂f, −∂₁f)`, 2D only.
pub fn perp_gradient(field: &Field) -> Result<Vec<Field>> {
    let d = field.grid().dimension();
    if d != 2 {
        return Err(Error::Dimension {
            op: "perp_gradient",
            needed: 2,
            found: d,
        });
    }
    let dx2 = partial(field, 1)?;
    let dx1 = partial(field, 0)?;
    Ok(vec![dx2, dx1.scale(Complex64::new(-1.0, 0.0))])
}

/// Pointwise `(a × b) · e` in physical space, 3D only.
pub fn cross_dot_e(a: &[Field], b: &[Field], e: [f64; 3]) -> Result<Field> {
    if a.len() != 3 || b.len() != 3 {
        return Err(Error::Dimension {
            op: "cross_dot_e",
            needed: 3,
            found: a.len().min(b.len()),
        });
    }
    let d = a[0].grid().dimension();
    if d != 3 {
        return Err(Error::Dimension {
            op: "cross_dot_e",
            needed: 3,
            found: d,
        });
    }
    let a: Vec<Field> = a.iter().map(|f| f.to_physical()).collect();
    let b: Vec<Field> = b.iter().map(|f| f.to_physical()).collect();
    for f in a.iter().chain(b.iter()).skip(1) {
        a[0].check_same_grid(f)?;
    }
    let g = *a[0].grid();
    let values = (0..g.len())
        .map(|i| {
            let (a0, a1, a2) = (a[0].values()[i], a[1].values()[i], a[2].values()[i]);
            let (b0, b1, b2) = (b[0].values()[i], b[1].values()[i], b[2].values()[i]);
            (a1 * b2 - a2 * b1) * e[0] + (a2 * b0 - a0 * b2) * e[1] + (a0 * b1 - a1 * b0) * e[2]
        })
        .collect();
    Field::from_values(g, Representation::Physical, values)
}

/// Pointwise `a · b` (no conjugation) of two vector fields, physical output.
pub fn dot(a: &[Field], b: &[Field]) -> Result<Field> {
    if a.len() != b.len() || a.is_empty() {
        return Err(Error::InvalidArgument(
            "vector fields differ in length".into(),
        ));
    }
    let mut acc = a[0].mul_pointwise(&b[0])?;
    for (x, y) in a.iter().zip(b).skip(1) {
        acc = acc.add(&x.mul_pointwise(y)?)?;
    }
    Ok(acc)
}

/// 2/3-rule truncation: zero every mode with some `|m_j| > N/3`. The Nyquist
/// index always falls in the discarded band. Output is spectral.
pub fn dealias(field: &Field) -> Field {
    let mut s = field.to_spectral();
    let g = *s.grid();
    for (i, v) in s.values_mut().iter_mut().enumerate() {
        if !g.retained(i) {
            *v = Complex64::new(0.0, 0.0);
        }
    }
    s
}

/// Zero the Nyquist coefficients of every axis. Output is spectral.
pub fn remove_nyquist(field: &Field) -> Field {
    let mut s = field.to_spectral();
    let g = *s.grid();
    for (i, v) in s.values_mut().iter_mut().enumerate() {
        if g.touches_nyquist(i) {
            *v = Complex64::new(0.0, 0.0);
        }
    }
    s
}

/// Brings a field into the admissible evolution class: mean zero, Nyquist
/// zero, and 2/3-truncated when `dealias` is set. Output is spectral.
pub fn project_admissible(field: &Field, dealias_on: bool) -> Field {
    let mut s = if dealias_on {
        dealias(field)
    } else {
        remove_nyquist(field)
    };
    s.remove_mean();
    s
}
