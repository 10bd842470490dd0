//! The quadratic energy trap.
//!
//! If `|∫χW| ≤ ¼‖χ‖² + c₀(‖∇φ‖² + ‖Δφ‖²)²` for all fields, then along any
//! solution `m(t) ≤ Ẽ + c₀m(t)²`, so `f(m) = Ẽ − m + c₀m²` stays nonnegative
//! and `m(t)` cannot cross the smaller root `m₁` of `f` once `Ẽ < 1/(4c₀)`.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::quantities::{compute_i1, cubic_integral, laplacian_norm_sq};
use super::series::InvariantSeries;
use crate::dynamics::nonlinear::{physical_gradient, wave_bracket_from_gradient};
use crate::dynamics::Geometry;
use crate::error::{Error, Result};
use crate::spectral::{Field, Grid};

/// Multiplier applied to the ensemble maximum.
pub const C0_SAFETY_FACTOR: f64 = 2.0;
pub const DEFAULT_C0_SEED: u64 = 0x6330_5f65_7374;
/// Relative slack on `m(t) ≤ m₁`.
pub const TRAP_SLACK: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct C0Options {
    /// Fields are drawn on the modes `|m_j| ≤ band`.
    pub band: i64,
    pub seed: u64,
    /// Also try the maximizing direction `χ ∝ (1/i)W` for each `φ`.
    pub aligned_chi: bool,
}

impl C0Options {
    /// Largest band whose products are resolved exactly on `grid`.
    pub fn for_grid(grid: &Grid) -> Self {
        let n = grid.points_per_axis() as i64;
        Self {
            band: ((n / 2 - 1) / 2).clamp(1, 3),
            seed: DEFAULT_C0_SEED,
            aligned_chi: true,
        }
    }
}

/// Band-limited field with coefficients drawn in a grid-independent order
/// and a member-specific spectral decay.
fn band_limited(grid: Grid, band: i64, rng: &mut ChaCha8Rng, real: bool) -> Field {
    let d = grid.dimension();
    let decay: f64 = rng.gen_range(0.0..3.0);
    let mut f = Field::zeros(grid, crate::spectral::Representation::Spectral);
    let width = 2 * band + 1;
    let count = width.pow(d as u32);
    for c in 0..count {
        let mut m = [0i64; 3];
        let mut r = c;
        for j in (0..d).rev() {
            m[j] = r % width - band;
            r /= width;
        }
        let re = rng.gen_range(-1.0..1.0);
        let im = rng.gen_range(-1.0..1.0);
        let k2 = (m[0] * m[0] + m[1] * m[1] + m[2] * m[2]) as f64;
        f.values_mut()[grid.flat_of_modes(m)] =
            Complex64::new(re, im) * (1.0 + k2).powf(-0.5 * decay);
    }
    f.values_mut()[0] = Complex64::new(0.0, 0.0);
    if real {
        // keep the Hermitian part
        let c = f.conj();
        f = f.add(&c).unwrap().scale(Complex64::new(0.5, 0.0));
    }
    f
}

/// Smallest `c` with `|∫χW| ≤ ¼‖χ‖² + c·P²` after optimizing over the scale
/// of `χ`, i.e. `A² / (‖χ‖² P²)` with `A = |∫χW|`, `P = ‖∇φ‖² + ‖Δφ‖²`.
fn member_constant(phi: &Field, chi: &Field, geometry: Geometry, aligned: bool) -> Result<f64> {
    let p = compute_i1(phi) + laplacian_norm_sq(phi);
    if p == 0.0 {
        return Ok(0.0);
    }
    let mut best = 0.0f64;
    let chi_sq = chi.norm_sq();
    if chi_sq > 0.0 {
        let a = cubic_integral(phi, chi, geometry)?.norm();
        best = a * a / (chi_sq * p * p);
    }
    if aligned {
        // the maximizer over χ is proportional to (1/i)W, giving ‖W‖²/P²
        let w = wave_bracket_from_gradient(&physical_gradient(phi)?, geometry)?;
        let w = crate::spectral::project_admissible(&w, false);
        best = best.max(w.norm_sq() / (p * p));
    }
    Ok(best)
}

/// Per-member constants; member `j` uses stream `j` of the seeded generator.
pub fn c0_members(
    grid: &Grid,
    geometry: Geometry,
    ensemble_size: usize,
    opts: C0Options,
) -> Result<Vec<f64>> {
    if grid.dimension() != geometry.dimension() {
        return Err(Error::Dimension {
            op: "estimate_c0",
            needed: geometry.dimension(),
            found: grid.dimension(),
        });
    }
    if 3 * opts.band > grid.points_per_axis() as i64 {
        return Err(Error::InvalidArgument(format!(
            "band {} is not resolved on N = {}",
            opts.band,
            grid.points_per_axis()
        )));
    }
    (0..ensemble_size)
        .into_par_iter()
        .map(|j| {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
            rng.set_stream(j as u64);
            let phi = band_limited(*grid, opts.band, &mut rng, false);
            let chi = band_limited(*grid, opts.band, &mut rng, true);
            member_constant(&phi, &chi, geometry, opts.aligned_chi)
        })
        .collect()
}

/// Empirical `c₀` over `ensemble_size ≥ 100` random band-limited pairs,
/// times [`C0_SAFETY_FACTOR`].
pub fn estimate_c0(grid: &Grid, geometry: Geometry, ensemble_size: usize) -> Result<f64> {
    estimate_c0_with(grid, geometry, ensemble_size, C0Options::for_grid(grid))
}

pub fn estimate_c0_with(
    grid: &Grid,
    geometry: Geometry,
    ensemble_size: usize,
    opts: C0Options,
) -> Result<f64> {
    if ensemble_size < 100 {
        return Err(Error::InvalidArgument(format!(
            "ensemble_size must be >= 100, got {ensemble_size}"
        )));
    }
    let max = c0_members(grid, geometry, ensemble_size, opts)?
        .into_iter()
        .fold(0.0, f64::max);
    if max <= 0.0 {
        return Err(Error::InvalidArgument(
            "degenerate ensemble: every member is zero".into(),
        ));
    }
    Ok(C0_SAFETY_FACTOR * max)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrapReport {
    pub c0: f64,
    pub e_tilde: f64,
    pub m0: f64,
    /// Smaller root of `f`; `None` when the smallness hypothesis fails.
    pub m1: Option<f64>,
    pub hypothesis_met: bool,
    /// `m(t_k) ≤ m₁(1 + TRAP_SLACK)` per sample.
    pub satisfied: Vec<bool>,
    /// `m(t_k) ≤ m₀` per sample.
    pub below_m0: Vec<bool>,
    /// `m(0) > m₀` although `Ẽ < 1/(4c₀)`: the inputs contradict the bound.
    pub inconsistent: bool,
}

impl TrapReport {
    pub fn holds(&self) -> bool {
        self.hypothesis_met
            && !self.inconsistent
            && self.satisfied.iter().all(|&b| b)
            && self.below_m0.iter().all(|&b| b)
    }

    pub fn summary(&self) -> String {
        if !self.hypothesis_met {
            return format!(
                "smallness hypothesis not met: E_tilde = {:.6e} >= 1/(4 c0) = {:.6e}",
                self.e_tilde,
                0.25 / self.c0
            );
        }
        let bad = self.satisfied.iter().filter(|&&b| !b).count();
        format!(
            "c0 = {:.6e}, E_tilde = {:.6e}, m0 = {:.6e}, m1 = {:.6e}, samples = {}, violations = {}{}",
            self.c0,
            self.e_tilde,
            self.m0,
            self.m1.unwrap_or(f64::NAN),
            self.satisfied.len(),
            bad,
            if self.inconsistent { ", inconsistent initial data" } else { "" }
        )
    }
}

/// Smaller root of `Ẽ − m + c₀m²`, or `None` if `Ẽ ≥ 1/(4c₀)`.
pub fn smaller_root(c0: f64, e_tilde: f64) -> Option<f64> {
    let disc = 1.0 - 4.0 * c0 * e_tilde;
    if disc <= 0.0 {
        return None;
    }
    // 2Ẽ/(1 + √disc) equals (1 − √disc)/(2c₀) without the cancellation
    Some(2.0 * e_tilde / (1.0 + disc.sqrt()))
}

/// Evaluates the trap on a recorded series; `Ẽ` comes from the first sample.
pub fn trap_check(series: &InvariantSeries, c0: f64) -> Result<TrapReport> {
    if !(c0.is_finite() && c0 > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "c0 must be positive, got {c0}"
        )));
    }
    if series.is_empty() {
        return Err(Error::InvalidArgument("empty invariant series".into()));
    }
    let e_tilde = series.sample(0).e_tilde();
    let m0 = 0.5 / c0;
    let m1 = smaller_root(c0, e_tilde);
    let (satisfied, inconsistent) = match m1 {
        Some(m1) => (
            series
                .m
                .iter()
                .map(|&m| m <= m1 * (1.0 + TRAP_SLACK))
                .collect(),
            series.m[0] > m0,
        ),
        None => (Vec::new(), false),
    };
    Ok(TrapReport {
        c0,
        e_tilde,
        m0,
        m1,
        hypothesis_met: m1.is_some(),
        satisfied,
        below_m0: series.m.iter().map(|&m| m <= m0).collect(),
        inconsistent,
    })
}
