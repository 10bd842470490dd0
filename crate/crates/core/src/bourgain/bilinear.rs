//! Ratio harness for the bilinear space-time estimates.
//!
//! Two bilinear expressions are measured, with `D = ∂_axis`:
//!
//! * cross products `DφDχ`, preceded by `B⁻¹` (3D) or `B^{−1+ε}` (2D), in
//!   Schrödinger-type norms (families C, E);
//! * wave forcings `Dφ̄Dφ`, possibly preceded by `B^{2−δ}`, in wave-type
//!   norms (families D, F).
//!
//! Homogeneous multipliers with negative exponent act as zero on ξ = 0.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::norms::{bracket, spatial_weight, Dispersion, Separable, WeightStyle};
use super::spacetime::SpaceTimeField;
use crate::error::{Error, Result};

/// Default for the `+` in exponents such as `−1/2+`.
pub const DEFAULT_PLUS: f64 = 0.01;

/// Relative amplitude tolerated outside the support `|t| < 2T`.
pub const SUPPORT_TOLERANCE: f64 = 1e-12;

const EXACT: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LemmaId {
    C,
    CPrime,
    CDoublePrime,
    D,
    DPrime,
    DDoublePrime,
    E,
    EPrime,
    EDoublePrime,
    F,
    FTilde,
    FPrime,
    FDoublePrime,
}

impl LemmaId {
    pub const ALL: [LemmaId; 13] = [
        LemmaId::C,
        LemmaId::CPrime,
        LemmaId::CDoublePrime,
        LemmaId::D,
        LemmaId::DPrime,
        LemmaId::DDoublePrime,
        LemmaId::E,
        LemmaId::EPrime,
        LemmaId::EDoublePrime,
        LemmaId::F,
        LemmaId::FTilde,
        LemmaId::FPrime,
        LemmaId::FDoublePrime,
    ];

    pub fn name(self) -> &'static str {
        match self {
            LemmaId::C => "C",
            LemmaId::CPrime => "C'",
            LemmaId::CDoublePrime => "C''",
            LemmaId::D => "D",
            LemmaId::DPrime => "D'",
            LemmaId::DDoublePrime => "D''",
            LemmaId::E => "E",
            LemmaId::EPrime => "E'",
            LemmaId::EDoublePrime => "E''",
            LemmaId::F => "F",
            LemmaId::FTilde => "F~",
            LemmaId::FPrime => "F'",
            LemmaId::FDoublePrime => "F''",
        }
    }

    pub fn dimension(self) -> usize {
        use LemmaId::*;
        match self {
            C | CPrime | CDoublePrime | D | DPrime | DDoublePrime => 3,
            _ => 2,
        }
    }

    /// True for the `DφDχ` families.
    pub fn is_cross(self) -> bool {
        use LemmaId::*;
        matches!(self, C | CPrime | CDoublePrime | E | EPrime | EDoublePrime)
    }

    /// Lemmas whose hypotheses hold at `params` in `dim` dimensions.
    pub fn admissible_for(dim: usize, params: &BilinearParams) -> Vec<LemmaId> {
        Self::ALL
            .into_iter()
            .filter(|l| l.dimension() == dim && check_admissible(*l, params).is_ok())
            .collect()
    }
}

impl fmt::Display for LemmaId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for LemmaId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s
            .trim()
            .to_ascii_lowercase()
            .replace("double_prime", "''")
            .replace("prime", "'")
            .replace("tilde", "~")
            .replace(['_', ' '], "");
        LemmaId::ALL
            .into_iter()
            .find(|l| l.name().to_ascii_lowercase() == norm)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown lemma id {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BilinearParams {
    pub k: f64,
    pub l: f64,
    pub epsilon: f64,
    pub delta: f64,
    /// Time-support scale: inputs live in `|t| < 2T`.
    pub t: f64,
    /// Wave branch `±1`.
    pub sign: i8,
    /// The `+` of `±1/2+`.
    pub plus: f64,
    /// Axis of `D`.
    pub axis: usize,
}

impl Default for BilinearParams {
    fn default() -> Self {
        Self {
            k: 1.0,
            l: -1.0,
            epsilon: 0.25,
            delta: 0.25,
            t: 0.5,
            sign: 1,
            plus: DEFAULT_PLUS,
            axis: 0,
        }
    }
}

fn fmt_num(x: f64) -> String {
    if x < 0.0 {
        format!("−{}", -x)
    } else {
        format!("{x}")
    }
}

pub fn check_admissible(lemma: LemmaId, p: &BilinearParams) -> Result<()> {
    use LemmaId::*;
    let fail = |c: String| {
        Err(Error::Inadmissible {
            lemma: lemma.name().to_string(),
            constraint: c,
        })
    };
    let (k, l) = (p.k, p.l);
    let kl = format!("(k,l)=({},{})", fmt_num(k), fmt_num(l));
    if !(k.is_finite() && l.is_finite()) {
        return fail("k and l must be finite".into());
    }
    if !(p.t > 0.0 && p.t <= 1.0) {
        return fail(format!("T={} outside (0,1]", p.t));
    }
    if p.sign != 1 && p.sign != -1 {
        return fail(format!("sign={} must be ±1", p.sign));
    }
    if !(p.plus > 0.0 && p.plus < 0.5) {
        return fail(format!("plus={} must lie in (0, 1/2)", p.plus));
    }
    if l < -1.0 - EXACT {
        return fail(format!("l ≥ −1 violated at {kl}"));
    }
    let eq = |a: f64, b: f64| (a - b).abs() <= EXACT;
    let ge = |a: f64, b: f64| a >= b - EXACT;
    let cross_window = |strict_upper: bool| -> Option<String> {
        if !ge(k, l + 1.0) {
            return Some(format!("l+1 ≤ k violated at {kl}"));
        }
        if strict_upper && !(k < l + 2.0 - EXACT) {
            return Some(format!("k < l+2 violated at {kl}"));
        }
        if !strict_upper && !ge(l + 2.0, k) {
            return Some(format!("k ≤ l+2 violated at {kl}"));
        }
        None
    };
    let half = |msg: &str| -> Option<String> {
        if !ge(k, 0.5 * (l + 2.0)) {
            Some(format!("k ≥ (l+2)/2 violated at {kl}{msg}"))
        } else {
            None
        }
    };
    let eps_ok = p.epsilon > 0.0 && p.epsilon < 1.0;
    let delta_pos = p.delta > 0.0;
    let delta_unit = p.delta > 0.0 && p.delta < 1.0;
    let problem: Option<String> = match lemma {
        C => cross_window(true)
            .or_else(|| (eq(k, 0.0) && eq(l, -1.0)).then(|| "(k,l)=(0,−1) excluded".to_string())),
        CPrime | CDoublePrime => cross_window(false),
        D => half("")
            .or_else(|| (!(k > l + 1.0 + EXACT)).then(|| format!("k > l+1 violated at {kl}"))),
        DPrime => {
            half("").or_else(|| (!eq(k, l + 1.0)).then(|| format!("k = l+1 violated at {kl}")))
        }
        DDoublePrime => {
            half("").or_else(|| (!ge(k, l + 1.0)).then(|| format!("k ≥ l+1 violated at {kl}")))
        }
        E => cross_window(true)
            .or_else(|| (eq(k, 0.0) && eq(l, -1.0)).then(|| "(k,l)=(0,−1) excluded".to_string())),
        EPrime => cross_window(false),
        EDoublePrime => (!eq(k, l + 2.0)).then(|| format!("k = l+2 violated at {kl}")),
        F | FTilde => half("")
            .or_else(|| (!(k > l + 1.0 + EXACT)).then(|| format!("k > l+1 violated at {kl}"))),
        FPrime | FDoublePrime => {
            half("").or_else(|| (!eq(k, l + 1.0)).then(|| format!("k = l+1 violated at {kl}")))
        }
    };
    if let Some(c) = problem {
        return fail(c);
    }
    let needs_eps = lemma.dimension() == 2;
    if needs_eps && !eps_ok {
        return fail(format!("0 < ε < 1 violated at ε={}", p.epsilon));
    }
    if lemma.is_cross() && needs_eps && !delta_pos {
        return fail(format!("δ > 0 violated at δ={}", p.delta));
    }
    if !lemma.is_cross() && needs_eps && lemma != FTilde && !delta_unit {
        return fail(format!("0 < δ < 1 violated at δ={}", p.delta));
    }
    Ok(())
}

/// Spectral data shared by every lemma for one input pair.
#[derive(Debug, Clone)]
pub struct PairSpectra {
    dphi: SpaceTimeField,
    dchi: SpaceTimeField,
    cross: SpaceTimeField,
    wave: SpaceTimeField,
}

impl PairSpectra {
    pub fn new(phi: &SpaceTimeField, chi: &SpaceTimeField, axis: usize) -> Result<Self> {
        phi.check_same_lattice(chi)?;
        Self::from_derivatives(&phi.partial(axis)?, &chi.partial(axis)?)
    }

    /// From `Dφ`, `Dχ` given directly.
    pub fn from_derivatives(dphi: &SpaceTimeField, dchi: &SpaceTimeField) -> Result<Self> {
        dphi.check_same_lattice(dchi)?;
        let cross = dphi.mul(dchi)?.into_spectral();
        let wave = dphi.conj().mul(dphi)?.into_spectral();
        Ok(Self {
            dphi: dphi.to_spectral(),
            dchi: dchi.to_spectral(),
            cross,
            wave,
        })
    }

    pub fn cross(&self) -> &SpaceTimeField {
        &self.cross
    }

    pub fn wave(&self) -> &SpaceTimeField {
        &self.wave
    }

    /// `(LHS, RHS)` for `lemma`; admissibility is not rechecked.
    pub fn parts(&self, lemma: LemmaId, p: &BilinearParams) -> (f64, f64) {
        let norm = lhs_norm(lemma, p);
        let lhs = if norm.y {
            norm.separable().y_norm(self.target(lemma))
        } else {
            norm.separable().x_norm(self.target(lemma))
        };
        let (phi_w, chi_w) = rhs_weights(lemma, p);
        let rhs = if lemma.is_cross() {
            phi_w.separable().x_norm(&self.dphi) * chi_w.separable().x_norm(&self.dchi)
        } else {
            phi_w.separable().x_norm(&self.dphi).powi(2)
        };
        (lhs, rhs)
    }

    pub fn ratio(&self, lemma: LemmaId, p: &BilinearParams) -> f64 {
        let (lhs, rhs) = self.parts(lemma, p);
        if rhs == 0.0 {
            0.0
        } else {
            lhs / rhs
        }
    }

    fn target(&self, lemma: LemmaId) -> &SpaceTimeField {
        if lemma.is_cross() {
            &self.cross
        } else {
            &self.wave
        }
    }
}

/// `|ξ|^h · ⟨ξ⟩^s · ⟨σ⟩^b` on the chosen dispersion; `y` selects `L²_ξL¹_τ`
/// (with `b = −1`).
#[derive(Debug, Clone, Copy)]
pub(crate) struct Weight {
    pub riesz: f64,
    pub spatial: f64,
    pub b: f64,
    pub dispersion: Dispersion,
    pub y: bool,
}

impl Weight {
    fn spatial_part(&self, xi_sq: f64) -> f64 {
        let h = if self.riesz == 0.0 {
            1.0
        } else {
            spatial_weight(WeightStyle::Homogeneous, self.riesz, xi_sq)
        };
        h * spatial_weight(WeightStyle::Inhomogeneous, self.spatial, xi_sq)
    }

    pub fn weight(&self, tau: f64, xi_sq: f64) -> f64 {
        self.spatial_part(xi_sq) * bracket(self.dispersion.sigma(tau, xi_sq)).powf(self.b)
    }

    fn separable(&self) -> Separable<impl Fn(f64) -> f64 + '_> {
        Separable {
            spatial: move |q| self.spatial_part(q),
            b: self.b,
            dispersion: self.dispersion,
        }
    }
}

pub(crate) fn lhs_norm(lemma: LemmaId, p: &BilinearParams) -> Weight {
    use LemmaId::*;
    let (k, l, e, d) = (p.k, p.l, p.epsilon, p.delta);
    let wave = Dispersion::wave(p.sign);
    let schr = Dispersion::Schrodinger;
    let minus_half_plus = -0.5 + p.plus;
    let w = |riesz, spatial, b, dispersion, y| Weight {
        riesz,
        spatial,
        b,
        dispersion,
        y,
    };
    match lemma {
        C => w(-1.0, k, minus_half_plus, schr, false),
        CPrime => w(-1.0, k, -0.5, schr, false),
        CDoublePrime => w(-1.0, k, -1.0, schr, true),
        D => w(0.0, l + 2.0, minus_half_plus, wave, false),
        DPrime => w(0.0, l + 2.0, -0.5, wave, false),
        DDoublePrime => w(0.0, l + 2.0, -1.0, wave, true),
        E => w(-1.0 + e, k - e, minus_half_plus, schr, false),
        EPrime => w(-1.0 + e, k - e, -0.5, schr, false),
        EDoublePrime => w(-1.0 + e, k - e, -1.0, schr, true),
        F => w(2.0 - d, l + d, minus_half_plus, wave, false),
        FTilde => w(l + 2.0, 0.0, minus_half_plus, wave, false),
        FPrime => w(2.0 - d, l + d, -0.5, wave, false),
        FDoublePrime => w(2.0 - d, l + d, -1.0, wave, true),
    }
}

/// Weights for `Dφ` and (cross families) `Dχ`.
pub(crate) fn rhs_weights(lemma: LemmaId, p: &BilinearParams) -> (Weight, Weight) {
    use LemmaId::*;
    let (k, l, e, d) = (p.k, p.l, p.epsilon, p.delta);
    let wave = Dispersion::wave(p.sign);
    let schr = Dispersion::Schrodinger;
    let w = |riesz, spatial, b, dispersion| Weight {
        riesz,
        spatial,
        b,
        dispersion,
        y: false,
    };
    // limiting variants need b = 1/2+ unless k > 1/2
    let limiting_b = if k > 0.5 { 0.5 } else { 0.5 + p.plus };
    match lemma {
        C | CPrime | CDoublePrime => (w(0.0, k, 0.5, schr), w(0.0, l, 0.5, wave)),
        D => (w(0.0, k, 0.5, schr), w(0.0, k, 0.5, schr)),
        DPrime | DDoublePrime => (w(0.0, k, limiting_b, schr), w(0.0, k, limiting_b, schr)),
        E | EPrime | EDoublePrime => (w(e, k - e, 0.5, schr), w(-d, l + d, 0.5, wave)),
        F | FTilde | FPrime | FDoublePrime => (w(e, k - e, 0.5, schr), w(e, k - e, 0.5, schr)),
    }
}

/// Fails unless `f` vanishes (relatively) wherever `|t| ≥ 2T`.
pub fn check_time_support(f: &SpaceTimeField, t: f64) -> Result<()> {
    let p = f.to_physical();
    let n = p.grid().len();
    let peak = p.max_abs();
    for j in 0..p.n_time() {
        if p.time(j).abs() >= 2.0 * t {
            let m = p.values()[j * n..(j + 1) * n]
                .iter()
                .map(|v| v.norm())
                .fold(0.0, f64::max);
            if m > SUPPORT_TOLERANCE * peak {
                return Err(Error::InvalidArgument(format!(
                    "input not supported in |t| < 2T = {} (|f| = {m:.3e} at t = {})",
                    2.0 * t,
                    p.time(j)
                )));
            }
        }
    }
    Ok(())
}

fn check_dimension(lemma: LemmaId, phi: &SpaceTimeField) -> Result<()> {
    let found = phi.grid().dimension();
    if found != lemma.dimension() {
        return Err(Error::Inadmissible {
            lemma: lemma.name().to_string(),
            constraint: format!("dimension {} required, got {found}", lemma.dimension()),
        });
    }
    Ok(())
}

/// LHS/RHS for one pair; `chi` is unused by the `Dφ̄Dφ` families.
pub fn bilinear_ratio(
    phi: &SpaceTimeField,
    chi: &SpaceTimeField,
    lemma: LemmaId,
    p: &BilinearParams,
) -> Result<f64> {
    let (lhs, rhs) = bilinear_parts(phi, chi, lemma, p)?;
    Ok(if rhs == 0.0 { 0.0 } else { lhs / rhs })
}

pub fn bilinear_parts(
    phi: &SpaceTimeField,
    chi: &SpaceTimeField,
    lemma: LemmaId,
    p: &BilinearParams,
) -> Result<(f64, f64)> {
    check_admissible(lemma, p)?;
    check_dimension(lemma, phi)?;
    if p.axis >= phi.grid().dimension() {
        return Err(Error::InvalidArgument(format!(
            "derivative axis {} out of range",
            p.axis
        )));
    }
    check_time_support(phi, p.t)?;
    if lemma.is_cross() {
        check_time_support(chi, p.t)?;
    }
    Ok(PairSpectra::new(phi, chi, p.axis)?.parts(lemma, p))
}

/// The LHS norm of `lemma` recomputed by pairing the bilinear expression,
/// formed by explicit cyclic convolution of the factor spectra, against the
/// maximizing unit test function of the dual norm. Returns
/// `(direct, paired)`. Cost is quadratic in the lattice size.
pub fn duality_check(
    phi: &SpaceTimeField,
    chi: &SpaceTimeField,
    lemma: LemmaId,
    p: &BilinearParams,
) -> Result<(f64, f64)> {
    check_admissible(lemma, p)?;
    let pair = PairSpectra::new(phi, chi, p.axis)?;
    let norm = lhs_norm(lemma, p);
    let target = pair.target(lemma);
    let g = *target.grid();
    let nt = target.n_time();
    let n = g.len();
    let xi_sq = g.xi_sq_table();
    let weights: Vec<f64> = (0..nt)
        .flat_map(|k| {
            let tau = target.tau(k);
            xi_sq.iter().map(move |&q| (tau, q)).collect::<Vec<_>>()
        })
        .map(|(tau, q)| norm.weight(tau, q))
        .collect();
    let c = target.values();
    let (direct, test, measure): (f64, Vec<Complex64>, f64) = if norm.y {
        let mut a = vec![0.0; n];
        for k in 0..nt {
            for i in 0..n {
                a[i] += weights[k * n + i] * c[k * n + i].norm();
            }
        }
        let measure = 2.0 * std::f64::consts::PI * g.volume();
        let direct = (measure * a.iter().map(|v| v * v).sum::<f64>()).sqrt();
        let test = (0..nt * n)
            .map(|p| {
                let v = c[p];
                if v.norm() == 0.0 || direct == 0.0 {
                    Complex64::new(0.0, 0.0)
                } else {
                    v / v.norm() * weights[p] * a[p % n] / direct
                }
            })
            .collect();
        (direct, test, measure)
    } else {
        let measure = g.volume() * target.extent();
        let direct = (measure
            * c.iter()
                .zip(&weights)
                .map(|(v, w)| w * w * v.norm_sqr())
                .sum::<f64>())
        .sqrt();
        let test = c
            .iter()
            .zip(&weights)
            .map(|(v, w)| {
                if direct == 0.0 {
                    Complex64::new(0.0, 0.0)
                } else {
                    v * w * w / direct
                }
            })
            .collect();
        (direct, test, measure)
    };

    // factors in coefficient space
    let a: Vec<Complex64> = if lemma.is_cross() {
        pair.dphi.values().to_vec()
    } else {
        conj_reflect(&pair.dphi)
    };
    let b = if lemma.is_cross() {
        pair.dchi.values()
    } else {
        pair.dphi.values()
    };
    let d = g.dimension();
    let m_of = |i: usize| g.modes(i);
    let nn = g.points_per_axis() as i64;
    let mut paired = Complex64::new(0.0, 0.0);
    for p1 in 0..nt * n {
        if a[p1].norm() == 0.0 {
            continue;
        }
        let (k1, i1) = (p1 / n, p1 % n);
        let m1 = m_of(i1);
        for p2 in 0..nt * n {
            if b[p2].norm() == 0.0 {
                continue;
            }
            let (k2, i2) = (p2 / n, p2 % n);
            let m2 = m_of(i2);
            let mut m = [0i64; 3];
            for j in 0..d {
                m[j] = (m1[j] + m2[j]).rem_euclid(nn);
                if m[j] >= nn / 2 {
                    m[j] -= nn;
                }
            }
            let k = (k1 + k2) % nt;
            let p = k * n + g.flat_of_modes(m);
            paired += a[p1] * b[p2] * test[p].conj();
        }
    }
    Ok((direct, (paired * measure).re))
}

/// Coefficients of `f̄` from those of `f`: `c(m,k) ↦ conj(c(−m,−k))`.
fn conj_reflect(f: &SpaceTimeField) -> Vec<Complex64> {
    let g = *f.grid();
    let n = g.len();
    let nt = f.n_time();
    let mut out = vec![Complex64::new(0.0, 0.0); n * nt];
    for k in 0..nt {
        let kr = (nt - k) % nt;
        for i in 0..n {
            let m = g.modes(i);
            let r = g.flat_of_modes([-m[0], -m[1], -m[2]]);
            out[k * n + i] = f.values()[kr * n + r].conj();
        }
    }
    out
}
