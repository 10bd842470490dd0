//! The plateau cutoff ψ and its rescalings ψ_δ(t) = ψ(t/δ).
//!
//! ```text
//! ψ(t) = 1                                   |t| ≤ 1
//!      = g(2−|t|) / (g(2−|t|) + g(|t|−1))    1 < |t| < 2
//!      = 0                                   |t| ≥ 2
//! g(s) = exp(−1/s) for s > 0, 0 otherwise
//! ```

use super::spacetime::SpaceTimeField;
use crate::error::{Error, Result};

fn g(s: f64) -> f64 {
    if s > 0.0 {
        (-1.0 / s).exp()
    } else {
        0.0
    }
}

pub fn psi(t: f64) -> f64 {
    let a = t.abs();
    if a <= 1.0 {
        1.0
    } else if a >= 2.0 {
        0.0
    } else {
        let up = g(2.0 - a);
        up / (up + g(a - 1.0))
    }
}

pub fn psi_delta(t: f64, delta: f64) -> f64 {
    psi(t / delta)
}

/// Multiplies `f` by ψ_δ in time; physical output.
pub fn time_window(f: &SpaceTimeField, delta: f64) -> Result<SpaceTimeField> {
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "window width must lie in (0, 1], got {delta}"
        )));
    }
    if 2.0 * delta > 0.5 * f.extent() {
        return Err(Error::InvalidArgument(format!(
            "window support (−{}, {}) exceeds the time axis of extent {}",
            2.0 * delta,
            2.0 * delta,
            f.extent()
        )));
    }
    let mut out = f.to_physical();
    let n = out.grid().len();
    for j in 0..out.n_time() {
        let w = psi_delta(out.time(j), delta);
        for v in &mut out.values_mut()[j * n..(j + 1) * n] {
            *v *= w;
        }
    }
    Ok(out)
}
