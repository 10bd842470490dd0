//! Discrete `X^{k,b}`, `X±^{l,b}` and `Y^k` norms.
//!
//! With `c(m,k)` the space-time coefficients and `L` the torus period,
//!
//! ```text
//! ‖f‖²_X = Lᵈ·T_ext · Σ w(ξ)² ⟨σ⟩^{2b} |c|²
//! ‖f‖²_Y = 2π·Lᵈ · Σ_ξ ( Σ_τ w(ξ) ⟨σ⟩^{−1} |c| )²
//! ```
//!
//! where `T_ext = n_t·dt` and `w(ξ) = ⟨ξ⟩^k` or `|ξ|^k`. Both agree with the
//! unitary continuum transform evaluated on the lattice, so `k = b = 0` is the
//! plain `L²_{xt}` norm.

use std::borrow::Cow;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::spacetime::SpaceTimeField;
use crate::error::{Error, Result};

/// Relative size of the ξ = 0 content tolerated by homogeneous weights.
pub const ZERO_MODE_TOLERANCE: f64 = 1e-12;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Dispersion {
    /// σ = τ + |ξ|²
    Schrodinger,
    /// σ = τ + |ξ|
    WavePlus,
    /// σ = τ − |ξ|
    WaveMinus,
}

impl Dispersion {
    pub fn sigma(self, tau: f64, xi_sq: f64) -> f64 {
        match self {
            Dispersion::Schrodinger => tau + xi_sq,
            Dispersion::WavePlus => tau + xi_sq.sqrt(),
            Dispersion::WaveMinus => tau - xi_sq.sqrt(),
        }
    }

    /// Wave dispersion for the sign `+1` / `−1`.
    pub fn wave(sign: i8) -> Self {
        if sign >= 0 {
            Dispersion::WavePlus
        } else {
            Dispersion::WaveMinus
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightStyle {
    /// ⟨ξ⟩
    Inhomogeneous,
    /// |ξ|
    Homogeneous,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormSpec {
    pub spatial_exponent: f64,
    pub modulation_exponent: f64,
    pub dispersion: Dispersion,
    pub weight_style: WeightStyle,
}

impl NormSpec {
    pub fn x(k: f64, b: f64) -> Self {
        Self {
            spatial_exponent: k,
            modulation_exponent: b,
            dispersion: Dispersion::Schrodinger,
            weight_style: WeightStyle::Inhomogeneous,
        }
    }

    pub fn x_wave(l: f64, b: f64, sign: i8) -> Self {
        Self {
            spatial_exponent: l,
            modulation_exponent: b,
            dispersion: Dispersion::wave(sign),
            weight_style: WeightStyle::Inhomogeneous,
        }
    }

    pub fn homogeneous(self) -> Self {
        Self {
            weight_style: WeightStyle::Homogeneous,
            ..self
        }
    }

    /// Weight on |c|: `w(ξ)·⟨σ⟩^b`.
    pub fn weight(&self, tau: f64, xi_sq: f64) -> f64 {
        spatial_weight(self.weight_style, self.spatial_exponent, xi_sq)
            * bracket(self.dispersion.sigma(tau, xi_sq)).powf(self.modulation_exponent)
    }
}

/// ⟨x⟩ = (1 + x²)^{1/2}
pub fn bracket(x: f64) -> f64 {
    (1.0 + x * x).sqrt()
}

pub(crate) fn spatial_weight(style: WeightStyle, exponent: f64, xi_sq: f64) -> f64 {
    match style {
        WeightStyle::Inhomogeneous => (1.0 + xi_sq).powf(0.5 * exponent),
        WeightStyle::Homogeneous => {
            if xi_sq == 0.0 {
                0.0
            } else {
                xi_sq.powf(0.5 * exponent)
            }
        }
    }
}

/// Fails if `f` carries ξ = 0 content beyond [`ZERO_MODE_TOLERANCE`].
pub fn check_zero_mode_free(f: &SpaceTimeField) -> Result<()> {
    let s = spectral_view(f);
    let n = s.grid().len();
    let total: f64 = s.values().iter().map(|v| v.norm_sqr()).sum();
    let zero: f64 = (0..s.n_time()).map(|k| s.values()[k * n].norm_sqr()).sum();
    if zero > ZERO_MODE_TOLERANCE * ZERO_MODE_TOLERANCE * total.max(f64::MIN_POSITIVE) && zero > 0.0
    {
        return Err(Error::ZeroMode(format!(
            "homogeneous weight on data with ξ = 0 content (relative {:.3e})",
            (zero / total).sqrt()
        )));
    }
    Ok(())
}

/// `(Lᵈ T_ext Σ w(ξ,τ)² |c|²)^{1/2}` for an arbitrary weight.
pub fn weighted_x_norm(f: &SpaceTimeField, weight: impl Fn(f64, f64) -> f64) -> f64 {
    let s = spectral_view(f);
    let g = *s.grid();
    let xi_sq = g.xi_sq_table();
    let mut sum = 0.0;
    for k in 0..s.n_time() {
        let tau = s.tau(k);
        for (c, &q) in s.slice(k).iter().zip(&xi_sq) {
            if *c != ZERO {
                sum += weight(tau, q).powi(2) * c.norm_sqr();
            }
        }
    }
    (g.volume() * s.extent() * sum).sqrt()
}

/// `(2π Lᵈ Σ_ξ (Σ_τ w(ξ,τ)|c|)²)^{1/2}` for an arbitrary weight.
pub fn weighted_y_norm(f: &SpaceTimeField, weight: impl Fn(f64, f64) -> f64) -> f64 {
    let s = spectral_view(f);
    let g = *s.grid();
    let n = g.len();
    let xi_sq = g.xi_sq_table();
    let mut inner = vec![0.0; n];
    for k in 0..s.n_time() {
        let tau = s.tau(k);
        for (i, c) in s.slice(k).iter().enumerate() {
            if *c != ZERO {
                inner[i] += weight(tau, xi_sq[i]) * c.norm();
            }
        }
    }
    let sum: f64 = inner.iter().map(|v| v * v).sum();
    (2.0 * std::f64::consts::PI * g.volume() * sum).sqrt()
}

fn spectral_view(f: &SpaceTimeField) -> Cow<'_, SpaceTimeField> {
    match f.representation() {
        super::spacetime::StRepresentation::SpectralXt => Cow::Borrowed(f),
        super::spacetime::StRepresentation::Physical => Cow::Owned(f.to_spectral()),
    }
}

/// `x^e` with exact shortcuts for the common half-integer exponents.
#[inline]
fn pow_fast(x: f64, e: f64) -> f64 {
    if e == 0.0 {
        1.0
    } else if e == 0.5 {
        x.sqrt()
    } else if e == -0.5 {
        1.0 / x.sqrt()
    } else if e == 1.0 {
        x
    } else if e == -1.0 {
        1.0 / x
    } else {
        x.powf(e)
    }
}

/// `s(ξ)·⟨σ⟩^b`, with `s` tabulated once per lattice.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Separable<S: Fn(f64) -> f64> {
    pub spatial: S,
    pub b: f64,
    pub dispersion: Dispersion,
}

impl<S: Fn(f64) -> f64> Separable<S> {
    fn tables(&self, f: &SpaceTimeField) -> (Vec<f64>, Vec<f64>) {
        let g = f.grid();
        let q = g.xi_sq_table();
        let s = q.iter().map(|&x| (self.spatial)(x)).collect();
        (q, s)
    }

    #[inline]
    fn sigma(&self, tau: f64, q: f64, root: f64) -> f64 {
        match self.dispersion {
            Dispersion::Schrodinger => tau + q,
            Dispersion::WavePlus => tau + root,
            Dispersion::WaveMinus => tau - root,
        }
    }

    pub fn x_norm(&self, f: &SpaceTimeField) -> f64 {
        let f = spectral_view(f);
        let (q, s) = self.tables(&f);
        let root: Vec<f64> = q.iter().map(|x| x.sqrt()).collect();
        let mut sum = 0.0;
        for k in 0..f.n_time() {
            let tau = f.tau(k);
            for (i, c) in f.slice(k).iter().enumerate() {
                if s[i] != 0.0 {
                    let sg = self.sigma(tau, q[i], root[i]);
                    sum += s[i] * s[i] * pow_fast(1.0 + sg * sg, self.b) * c.norm_sqr();
                }
            }
        }
        (f.grid().volume() * f.extent() * sum).sqrt()
    }

    pub fn y_norm(&self, f: &SpaceTimeField) -> f64 {
        let f = spectral_view(f);
        let (q, s) = self.tables(&f);
        let root: Vec<f64> = q.iter().map(|x| x.sqrt()).collect();
        let mut inner = vec![0.0; q.len()];
        for k in 0..f.n_time() {
            let tau = f.tau(k);
            for (i, c) in f.slice(k).iter().enumerate() {
                if s[i] != 0.0 {
                    let sg = self.sigma(tau, q[i], root[i]);
                    inner[i] += pow_fast(1.0 + sg * sg, 0.5 * self.b) * c.norm();
                }
            }
        }
        let sum: f64 = inner.iter().zip(&s).map(|(v, w)| (v * w).powi(2)).sum();
        (2.0 * std::f64::consts::PI * f.grid().volume() * sum).sqrt()
    }
}

impl NormSpec {
    fn separable(&self) -> Separable<impl Fn(f64) -> f64 + '_> {
        Separable {
            spatial: move |q| spatial_weight(self.weight_style, self.spatial_exponent, q),
            b: self.modulation_exponent,
            dispersion: self.dispersion,
        }
    }
}

pub fn xkb_norm(f: &SpaceTimeField, spec: &NormSpec) -> Result<f64> {
    if spec.weight_style == WeightStyle::Homogeneous {
        check_zero_mode_free(f)?;
    }
    let norm = spec.separable().x_norm(f);
    Ok(norm)
}

/// `Y^k`: the modulation exponent of `spec` is ignored and `−1` used.
pub fn yk_norm(f: &SpaceTimeField, spec: &NormSpec) -> Result<f64> {
    if spec.weight_style == WeightStyle::Homogeneous {
        check_zero_mode_free(f)?;
    }
    let s = NormSpec {
        modulation_exponent: -1.0,
        ..*spec
    };
    let norm = s.separable().y_norm(f);
    Ok(norm)
}
