//! The resonance identity for `(ξ₁,τ₁) − (ξ₂,τ₂)` and the elementary
//! inequalities built on it.
//!
//! Notation: `ξ = ξ₁ − ξ₂`, `τ = τ₁ − τ₂`, `σᵢ = τᵢ + |ξᵢ|²`, `σ = τ ± |ξ|`.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::norms::bracket;
use crate::error::{Error, Result};

/// Relative slack used by the inequality checks to absorb rounding.
pub const INEQUALITY_SLACK: f64 = 1e-12;

fn norm_sq(v: [f64; 3]) -> f64 {
    v[0] * v[0] + v[1] * v[1] + v[2] * v[2]
}

fn sub(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn sign_f(sign: i8) -> f64 {
    if sign >= 0 {
        1.0
    } else {
        -1.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrequencySample {
    pub xi1: [f64; 3],
    pub xi2: [f64; 3],
    pub tau1: f64,
    pub tau2: f64,
    /// `+1` or `−1`: the wave branch in σ.
    pub sign: i8,
}

impl FrequencySample {
    pub fn xi(&self) -> [f64; 3] {
        sub(self.xi1, self.xi2)
    }

    pub fn tau(&self) -> f64 {
        self.tau1 - self.tau2
    }

    pub fn sigma1(&self) -> f64 {
        self.tau1 + norm_sq(self.xi1)
    }

    pub fn sigma2(&self) -> f64 {
        self.tau2 + norm_sq(self.xi2)
    }

    pub fn sigma(&self) -> f64 {
        self.tau() + sign_f(self.sign) * norm_sq(self.xi()).sqrt()
    }

    /// `|ξ₁|² − |ξ₂|² ∓ |ξ|`
    pub fn resonance(&self) -> f64 {
        norm_sq(self.xi1) - norm_sq(self.xi2) - sign_f(self.sign) * norm_sq(self.xi()).sqrt()
    }
}

pub fn dispersive_identity_residual(
    xi1: [f64; 3],
    xi2: [f64; 3],
    tau1: f64,
    tau2: f64,
    sign: i8,
) -> f64 {
    let s = FrequencySample {
        xi1,
        xi2,
        tau1,
        tau2,
        sign,
    };
    (s.resonance() - (s.sigma1() - s.sigma2() - s.sigma())).abs()
}

/// `|z| ≤ λ|y₂| + λ/(λ−1)·|y₁|·1{λ/(λ+1) ≤ |z|/|y₁| ≤ λ/(λ−1)}`, `z = y₁ − y₂`.
/// Returns false for `λ ≤ 1`.
pub fn inequality_check_301(y1: f64, y2: f64, lambda: f64) -> bool {
    if !(lambda > 1.0) {
        return false;
    }
    let z = (y1 - y2).abs();
    let a1 = y1.abs();
    let lo = lambda / (lambda + 1.0);
    let hi = lambda / (lambda - 1.0);
    let active = a1 > 0.0 && {
        let r = z / a1;
        r >= lo * (1.0 - INEQUALITY_SLACK) && r <= hi * (1.0 + INEQUALITY_SLACK)
    };
    let rhs = lambda * y2.abs() + if active { hi * a1 } else { 0.0 };
    z <= rhs * (1.0 + INEQUALITY_SLACK) + f64::MIN_POSITIVE
}

/// The admissible region `|ξ₁| ≥ ratio·|ξ₂|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub ratio: f64,
}

impl Default for Region {
    fn default() -> Self {
        Self { ratio: 2.0 }
    }
}

impl Region {
    pub fn contains(&self, s: &FrequencySample) -> bool {
        norm_sq(s.xi1).sqrt() >= self.ratio * norm_sq(s.xi2).sqrt()
    }
}

/// `(c, c₁, c₂)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InequalityConstants {
    pub c: f64,
    pub c1: f64,
    pub c2: f64,
}

impl Default for InequalityConstants {
    /// λ = 2 in the three-term split; see [`sweep_constants`] for the check.
    fn default() -> Self {
        Self {
            c: 17.0 / 2.0,
            c1: 4.0 / 33.0,
            c2: 12.0,
        }
    }
}

impl InequalityConstants {
    pub fn scaled_c(self, factor: f64) -> Self {
        Self {
            c: self.c * factor,
            ..self
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InequalityReport {
    pub constants: InequalityConstants,
    /// One flag per inequality per sample, ordered as in [`inequality_ratios`].
    pub satisfied: Vec<[bool; 3]>,
    /// Smallest `c` that would make each inequality hold on every sample,
    /// with the supplied `c₁, c₂`.
    pub min_c: [f64; 3],
}

impl InequalityReport {
    pub fn violations(&self) -> [usize; 3] {
        let mut v = [0; 3];
        for s in &self.satisfied {
            for i in 0..3 {
                if !s[i] {
                    v[i] += 1;
                }
            }
        }
        v
    }

    pub fn all_satisfied(&self) -> bool {
        self.satisfied.iter().all(|s| s.iter().all(|&b| b))
    }
}

fn in_band(c1: f64, c2: f64, sigma: f64, xi_sq: f64) -> bool {
    let a = sigma.abs();
    c1 * a <= xi_sq && xi_sq <= c2 * a
}

/// `⟨ξ₁⟩²` divided by each of the three right-hand brackets (without `c`).
pub fn inequality_ratios(s: &FrequencySample, c1: f64, c2: f64) -> [f64; 3] {
    let lhs = 1.0 + norm_sq(s.xi1);
    let (sg, s1, s2) = (s.sigma(), s.sigma1(), s.sigma2());
    let (b, b1, b2) = (bracket(sg), bracket(s1), bracket(s2));
    let ind1 = if in_band(c1, c2, s1, norm_sq(s.xi1)) {
        1.0
    } else {
        0.0
    };
    let ind = if in_band(c1, c2, sg, norm_sq(s.xi())) {
        1.0
    } else {
        0.0
    };
    [
        lhs / (b + b1 + b2),
        lhs / (b + b2 + b1 * ind1),
        lhs / (b1 + b2 + b * ind),
    ]
}

pub fn inequality_check_31_33(
    samples: &[FrequencySample],
    region: Region,
    constants: InequalityConstants,
) -> Result<InequalityReport> {
    let mut satisfied = Vec::with_capacity(samples.len());
    let mut min_c = [0.0f64; 3];
    for (i, s) in samples.iter().enumerate() {
        if !region.contains(s) {
            return Err(Error::InvalidArgument(format!(
                "sample {i} lies outside |ξ₁| ≥ {}|ξ₂|",
                region.ratio
            )));
        }
        let r = inequality_ratios(s, constants.c1, constants.c2);
        let mut flags = [true; 3];
        for j in 0..3 {
            min_c[j] = min_c[j].max(r[j]);
            flags[j] = r[j] <= constants.c * (1.0 + INEQUALITY_SLACK);
        }
        satisfied.push(flags);
    }
    Ok(InequalityReport {
        constants,
        satisfied,
        min_c,
    })
}

/// Random samples in `|ξ₁| ≥ 2|ξ₂|` in dimension `dim`. Frequencies are
/// log-spread up to `xi_max`; a third of the time variables are placed on the
/// characteristic surfaces to probe the small-modulation corners.
pub fn random_samples(dim: usize, count: usize, xi_max: f64, seed: u64) -> Vec<FrequencySample> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dim = dim.clamp(1, 3);
    let dir = |rng: &mut ChaCha8Rng| -> [f64; 3] {
        loop {
            let mut v = [0.0; 3];
            for c in v.iter_mut().take(dim) {
                *c = rng.gen_range(-1.0..1.0);
            }
            let n = norm_sq(v).sqrt();
            if n > 1e-3 && n <= 1.0 {
                return [v[0] / n, v[1] / n, v[2] / n];
            }
        }
    };
    (0..count)
        .map(|_| {
            let r1 = if rng.gen_bool(0.1) {
                rng.gen_range(0.0..1.0)
            } else {
                (rng.gen_range(0.0..1.0f64) * (1.0 + xi_max).ln()).exp() - 1.0
            };
            let r2 = r1 * 0.5 * rng.gen_range(0.0..1.0f64).powf(0.5);
            let d1 = dir(&mut rng);
            let d2 = dir(&mut rng);
            let xi1 = [d1[0] * r1, d1[1] * r1, d1[2] * r1];
            let xi2 = [d2[0] * r2, d2[1] * r2, d2[2] * r2];
            let sign: i8 = if rng.gen_bool(0.5) { 1 } else { -1 };
            let scale = 1.0 + r1 * r1;
            let jitter = |rng: &mut ChaCha8Rng| {
                rng.gen_range(-1.0..1.0) * scale * rng.gen_range(0.0..1.0f64).powi(3)
            };
            let tau1 = match rng.gen_range(0..3) {
                0 => -norm_sq(xi1) + jitter(&mut rng),
                _ => jitter(&mut rng) * 2.0,
            };
            let tau2 = match rng.gen_range(0..3) {
                0 => -norm_sq(xi2) + jitter(&mut rng),
                1 => {
                    // put σ near zero
                    let xi = sub(xi1, xi2);
                    tau1 + sign_f(sign) * norm_sq(xi).sqrt() + jitter(&mut rng) * 1e-3
                }
                _ => jitter(&mut rng) * 2.0,
            };
            FrequencySample {
                xi1,
                xi2,
                tau1,
                tau2,
                sign,
            }
        })
        .collect()
}

/// Largest `⟨ξ₁⟩²/bracket` ratio per inequality over `count` random samples
/// in each dimension 2 and 3; with the default `c₁, c₂` this stays below the
/// shipped `c`.
pub fn sweep_constants(count: usize, xi_max: f64, seed: u64) -> [f64; 3] {
    let k = InequalityConstants::default();
    let mut worst = [0.0f64; 3];
    for dim in [2, 3] {
        for s in random_samples(dim, count, xi_max, seed ^ dim as u64) {
            let r = inequality_ratios(&s, k.c1, k.c2);
            for j in 0..3 {
                worst[j] = worst[j].max(r[j]);
            }
        }
    }
    worst
}
