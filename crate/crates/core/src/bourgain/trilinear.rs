//! Weighted trilinear sums over the space-time lattice.
//!
//! ```text
//! S = Σ_{(ξ₁,τ₁),(ξ₂,τ₂)} |v̂(ξ,τ) v̂₁(ξ₁,τ₁) v̂₂(ξ₂,τ₂)| / (⟨σ⟩^a ⟨σ₁⟩^{a₁} ⟨σ₂⟩^{a₂} W)
//! ```
//!
//! with `ξ = ξ₁−ξ₂`, `τ = τ₁−τ₂` taken without wrap-around (terms whose
//! difference leaves the lattice are dropped) and `W = ⟨ξ⟩^m`, `⟨ξ₂⟩^m` or
//! `|ξ₂|^m`. Coefficients are rescaled to the unitary continuum transform, so
//! the sum carries the factor `(2π)^{(d+1)/2} Lᵈ T_ext`. The double sum is a
//! linear correlation and is evaluated with zero-padded FFTs.

use num_complex::Complex64;
use rustfft::FftDirection;
use serde::{Deserialize, Serialize};

use super::norms::{bracket, Dispersion};
use super::spacetime::SpaceTimeField;
use crate::error::{Error, Result};
use crate::spectral::fft;

/// Default bound on `Nᵈ·n_t` per operand.
pub const TRILINEAR_LATTICE_CAP: usize = 1 << 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DenominatorStyle {
    BracketXi,
    BracketXi2,
    HomogeneousXi2,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrilinearWeights {
    pub a: f64,
    pub a1: f64,
    pub a2: f64,
    pub m: f64,
}

pub fn trilinear_integral(
    v: &SpaceTimeField,
    v1: &SpaceTimeField,
    v2: &SpaceTimeField,
    w: TrilinearWeights,
    dispersion: Dispersion,
    style: DenominatorStyle,
) -> Result<f64> {
    trilinear_integral_capped(v, v1, v2, w, dispersion, style, TRILINEAR_LATTICE_CAP)
}

pub fn trilinear_integral_capped(
    v: &SpaceTimeField,
    v1: &SpaceTimeField,
    v2: &SpaceTimeField,
    w: TrilinearWeights,
    dispersion: Dispersion,
    style: DenominatorStyle,
    cap: usize,
) -> Result<f64> {
    v.check_same_lattice(v1)?;
    v.check_same_lattice(v2)?;
    let g = *v.grid();
    let points = g.len() * v.n_time();
    if points > cap {
        return Err(Error::LatticeCap { points, cap });
    }
    let (s, s1, s2) = (v.to_spectral(), v1.to_spectral(), v2.to_spectral());
    let d = g.dimension();
    let n = g.points_per_axis();
    let nt = v.n_time();
    let xi_sq = g.xi_sq_table();

    // padded lattice: time axis first, then the spatial axes
    let mut shape = vec![2 * nt];
    shape.extend(std::iter::repeat(2 * n).take(d));
    let total: usize = shape.iter().product();
    let padded_index = |k: usize, i: usize| -> usize {
        let mut idx = s.time_mode(k).rem_euclid(2 * nt as i64) as usize;
        let m = g.modes(i);
        for &c in m.iter().take(d) {
            idx = idx * 2 * n + c.rem_euclid(2 * n as i64) as usize;
        }
        idx
    };

    let zero = Complex64::new(0.0, 0.0);
    let mut a = vec![zero; total];
    let mut a2 = vec![zero; total];
    for k in 0..nt {
        let tau = s.tau(k);
        for i in 0..g.len() {
            let q = xi_sq[i];
            let c = s.slice(k)[i].norm();
            if c != 0.0 {
                let mut wt = bracket(dispersion.sigma(tau, q)).powf(-w.a);
                if style == DenominatorStyle::BracketXi {
                    wt *= (1.0 + q).powf(-0.5 * w.m);
                }
                a[padded_index(k, i)] = Complex64::new(c * wt, 0.0);
            }
            let c2 = s2.slice(k)[i].norm();
            if c2 != 0.0 {
                let mut wt = bracket(tau + q).powf(-w.a2);
                match style {
                    DenominatorStyle::BracketXi => {}
                    DenominatorStyle::BracketXi2 => wt *= (1.0 + q).powf(-0.5 * w.m),
                    DenominatorStyle::HomogeneousXi2 => {
                        wt = if q == 0.0 {
                            0.0
                        } else {
                            wt * q.powf(-0.5 * w.m)
                        };
                    }
                }
                a2[padded_index(k, i)] = Complex64::new(c2 * wt, 0.0);
            }
        }
    }
    let axes: Vec<usize> = (0..shape.len()).collect();
    fft::transform_axes(&mut a, &shape, &axes, FftDirection::Forward);
    fft::transform_axes(&mut a2, &shape, &axes, FftDirection::Forward);
    for (x, y) in a.iter_mut().zip(&a2) {
        *x *= y;
    }
    fft::transform_axes(&mut a, &shape, &axes, FftDirection::Inverse);
    let inv_total = 1.0 / total as f64;

    let mut sum = 0.0;
    for k in 0..nt {
        let tau = s1.tau(k);
        for i in 0..g.len() {
            let c1 = s1.slice(k)[i].norm();
            if c1 != 0.0 {
                let conv = a[padded_index(k, i)].re * inv_total;
                sum += c1 * bracket(tau + xi_sq[i]).powf(-w.a1) * conv.max(0.0);
            }
        }
    }
    let factor =
        (2.0 * std::f64::consts::PI).powf(0.5 * (d as f64 + 1.0)) * g.volume() * v.extent();
    Ok(sum * factor)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bourgain::spacetime::StRepresentation;
    use crate::spectral::Grid;
    use std::f64::consts::PI;

    #[test]
    fn three_spikes() {
        let g = Grid::new(2, 8, 2.0 * PI).unwrap();
        let (nt, dt) = (8, 0.5);
        let put = |m: [i64; 3], k: usize, amp: f64| {
            let mut f = SpaceTimeField::zeros(g, nt, dt, StRepresentation::SpectralXt).unwrap();
            f.values_mut()[k * g.len() + g.flat_of_modes(m)] = Complex64::new(0.0, amp);
            f
        };
        // ξ₁ = (2,1), ξ₂ = (1,−1) → ξ = (1,2); τ-index 3 − 1 = 2
        let v1 = put([2, 1, 0], 3, 2.0);
        let v2 = put([1, -1, 0], 1, 3.0);
        let v = put([1, 2, 0], 2, 0.5);
        let w = TrilinearWeights {
            a: 0.5,
            a1: 0.25,
            a2: 0.3,
            m: 1.0,
        };
        let got = trilinear_integral(
            &v,
            &v1,
            &v2,
            w,
            Dispersion::WavePlus,
            DenominatorStyle::BracketXi,
        )
        .unwrap();
        let dtau = 2.0 * PI / (nt as f64 * dt);
        let sigma = 2.0 * dtau + 5f64.sqrt();
        let s1 = 3.0 * dtau + 5.0;
        let s2 = dtau + 2.0;
        let weight =
            bracket(sigma).powf(0.5) * bracket(s1).powf(0.25) * bracket(s2).powf(0.3) * 6f64.sqrt();
        let expect = 3.0 / weight * (2.0 * PI).powf(1.5) * g.volume() * nt as f64 * dt;
        assert!((got - expect).abs() < 1e-12 * expect, "{got} vs {expect}");

        // shifting v off the difference lattice point gives 0
        let v_off = put([1, 2, 0], 3, 0.5);
        let z = trilinear_integral(
            &v_off,
            &v1,
            &v2,
            w,
            Dispersion::WavePlus,
            DenominatorStyle::BracketXi,
        )
        .unwrap();
        assert!(z.abs() < 1e-12 * expect);
    }

    #[test]
    fn cap_is_enforced() {
        let g = Grid::new(2, 8, 1.0).unwrap();
        let f = SpaceTimeField::zeros(g, 8, 0.1, StRepresentation::Physical).unwrap();
        let w = TrilinearWeights {
            a: 0.0,
            a1: 0.0,
            a2: 0.0,
            m: 0.0,
        };
        assert!(matches!(
            trilinear_integral_capped(
                &f,
                &f,
                &f,
                w,
                Dispersion::Schrodinger,
                DenominatorStyle::BracketXi,
                100
            ),
            Err(Error::LatticeCap { .. })
        ));
    }
}
