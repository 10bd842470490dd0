//! Oracles shared by several test targets.
#![allow(dead_code)]

use mzak::bourgain::*;
use mzak::spectral::Grid;
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

pub fn random_spectral(
    g: Grid,
    nt: usize,
    dt: f64,
    rng: &mut ChaCha8Rng,
    sparsity: f64,
) -> SpaceTimeField {
    let v = (0..g.len() * nt)
        .map(|_| {
            if rng.gen_bool(sparsity) {
                Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .collect();
    SpaceTimeField::from_values(g, nt, dt, StRepresentation::SpectralXt, v).unwrap()
}

/// Direct quadruple loop over (ξ₁,τ₁,ξ₂,τ₂).
pub fn naive_trilinear(
    v: &SpaceTimeField,
    v1: &SpaceTimeField,
    v2: &SpaceTimeField,
    w: TrilinearWeights,
    disp: Dispersion,
    style: DenominatorStyle,
) -> f64 {
    let g = *v.grid();
    let n = g.len();
    let nt = v.n_time() as i64;
    let half = g.points_per_axis() as i64 / 2;
    let ext = v.n_time() as f64 * v.dt();
    let unit = g.wavenumber_unit();
    let tmode = |k: usize| {
        if (k as i64) < nt / 2 {
            k as i64
        } else {
            k as i64 - nt
        }
    };
    let br = |x: f64| (1.0 + x * x).sqrt();
    let mut sum = 0.0;
    for k1 in 0..v.n_time() {
        for i1 in 0..n {
            let c1 = v1.values()[k1 * n + i1];
            if c1.norm() == 0.0 {
                continue;
            }
            let m1 = g.modes(i1);
            for k2 in 0..v.n_time() {
                for i2 in 0..n {
                    let c2 = v2.values()[k2 * n + i2];
                    if c2.norm() == 0.0 {
                        continue;
                    }
                    let m2 = g.modes(i2);
                    let m = [m1[0] - m2[0], m1[1] - m2[1], m1[2] - m2[2]];
                    let km = tmode(k1) - tmode(k2);
                    if m.iter().any(|c| *c < -half || *c >= half) || km < -nt / 2 || km >= nt / 2 {
                        continue;
                    }
                    let c = v.values()[km.rem_euclid(nt) as usize * n + g.flat_of_modes(m)];
                    let q = |mm: [i64; 3]| {
                        (mm[0] * mm[0] + mm[1] * mm[1] + mm[2] * mm[2]) as f64 * unit * unit
                    };
                    let (q, q1, q2) = (q(m), q(m1), q(m2));
                    if style == DenominatorStyle::HomogeneousXi2 && q2 == 0.0 {
                        continue;
                    }
                    let tau = |kk: i64| 2.0 * PI * kk as f64 / ext;
                    let sigma = match disp {
                        Dispersion::Schrodinger => tau(km) + q,
                        Dispersion::WavePlus => tau(km) + q.sqrt(),
                        Dispersion::WaveMinus => tau(km) - q.sqrt(),
                    };
                    let s1 = tau(tmode(k1)) + q1;
                    let s2 = tau(tmode(k2)) + q2;
                    let wm = match style {
                        DenominatorStyle::BracketXi => (1.0 + q).sqrt().powf(w.m),
                        DenominatorStyle::BracketXi2 => (1.0 + q2).sqrt().powf(w.m),
                        DenominatorStyle::HomogeneousXi2 => q2.sqrt().powf(w.m),
                    };
                    let den = br(sigma).powf(w.a) * br(s1).powf(w.a1) * br(s2).powf(w.a2) * wm;
                    sum += c.norm() * c1.norm() * c2.norm() / den;
                }
            }
        }
    }
    sum * (2.0 * PI).powf(1.5) * g.volume() * ext
}
