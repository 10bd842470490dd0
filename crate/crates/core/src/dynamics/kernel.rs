//! Table-driven evaluation of `C = [φ, χ]` and `W = [φ̄, φ]` for the
//! steppers.
//!
//! For a unit vector `ê` completed to a right-handed orthonormal frame
//! `(u₁, u₂, ê)`, `(∇a × ∇b)·ê = ∂ᵤ₁a ∂ᵤ₂b − ∂ᵤ₂a ∂ᵤ₁b`, so both brackets only
//! need two directional derivatives per field. In 2D the frame is the
//! coordinate axes. The two real derivatives of `χ` share one transform.

use num_complex::Complex64;

use super::state::Geometry;
use crate::spectral::{fft, Grid};

#[derive(Debug, Clone)]
pub(crate) struct BracketKernel {
    shape: Vec<usize>,
    /// `iξ·u₁`, `iξ·u₂` per lattice point (zero on Nyquist-touching modes).
    du1: Vec<Complex64>,
    du2: Vec<Complex64>,
    /// 1 on kept modes, 0 on the mean, the Nyquist band and (if dealiasing)
    /// the upper third.
    mask: Vec<f64>,
    /// `|e|` in 3D, 1 in 2D.
    gain: f64,
}

/// `(u₁, u₂)` with `(u₁, u₂, ê)` right-handed and orthonormal.
pub(crate) fn frame(e: [f64; 3]) -> Option<([f64; 3], [f64; 3], f64)> {
    let norm = (e[0] * e[0] + e[1] * e[1] + e[2] * e[2]).sqrt();
    if norm == 0.0 {
        return None;
    }
    let n = e.map(|c| c / norm);
    let cross = |a: [f64; 3], b: [f64; 3]| {
        [
            a[1] * b[2] - a[2] * b[1],
            a[2] * b[0] - a[0] * b[2],
            a[0] * b[1] - a[1] * b[0],
        ]
    };
    // axis least aligned with ê
    let mut axis = 0;
    for j in 1..3 {
        if n[j].abs() < n[axis].abs() {
            axis = j;
        }
    }
    let mut a = [0.0; 3];
    a[axis] = 1.0;
    let u2 = cross(n, a);
    let l = (u2[0] * u2[0] + u2[1] * u2[1] + u2[2] * u2[2]).sqrt();
    let u2 = u2.map(|c| c / l);
    let u1 = cross(u2, n);
    Some((u1, u2, norm))
}

impl BracketKernel {
    pub(crate) fn new(grid: &Grid, geometry: Geometry, dealias: bool) -> Self {
        let (u1, u2, gain) = match geometry {
            Geometry::Dim2 => ([1.0, 0.0, 0.0], [0.0, 1.0, 0.0], 1.0),
            Geometry::Dim3 { e } => frame(e).unwrap_or(([0.0; 3], [0.0; 3], 0.0)),
        };
        let len = grid.len();
        let mut du1 = Vec::with_capacity(len);
        let mut du2 = Vec::with_capacity(len);
        let mut mask = Vec::with_capacity(len);
        for i in 0..len {
            let nyq = grid.touches_nyquist(i);
            let xi = grid.wavevector(i);
            let dot = |u: [f64; 3]| xi[0] * u[0] + xi[1] * u[1] + xi[2] * u[2];
            if nyq {
                du1.push(Complex64::new(0.0, 0.0));
                du2.push(Complex64::new(0.0, 0.0));
            } else {
                du1.push(Complex64::new(0.0, dot(u1)));
                du2.push(Complex64::new(0.0, dot(u2)));
            }
            let keep = i != 0 && !nyq && (!dealias || grid.retained(i));
            mask.push(if keep { 1.0 } else { 0.0 });
        }
        Self {
            shape: grid.shape(),
            du1,
            du2,
            mask,
            gain,
        }
    }

    /// Spectral `(C, W)` from spectral `φ̂`, `χ̂`, projected onto the kept
    /// modes; read them back with [`KernelScratch::result`].
    pub(crate) fn brackets(&self, phi: &[Complex64], chi: &[Complex64], s: &mut KernelScratch) {
        let n = phi.len();
        let KernelScratch { a1, a2, b, c, w } = s;
        for i in 0..n {
            a1[i] = phi[i] * self.du1[i];
            a2[i] = phi[i] * self.du2[i];
            // ∂ᵤ₁χ + i∂ᵤ₂χ, both real in physical space
            b[i] = chi[i] * self.du1[i] + Complex64::i() * (chi[i] * self.du2[i]);
        }
        fft::inverse(a1, &self.shape);
        fft::inverse(a2, &self.shape);
        fft::inverse(b, &self.shape);
        let g = self.gain;
        for i in 0..n {
            let (b1, b2) = (b[i].re, b[i].im);
            c[i] = (a1[i] * b2 - a2[i] * b1) * g;
            let q = a1[i].conj() * a2[i];
            w[i] = Complex64::new(0.0, 2.0 * q.im * g);
        }
        fft::forward(c, &self.shape);
        fft::forward(w, &self.shape);
        for i in 0..n {
            c[i] *= self.mask[i];
            w[i] *= self.mask[i];
        }
    }
}

/// Buffers for [`BracketKernel::brackets`].
#[derive(Debug, Clone)]
pub(crate) struct KernelScratch {
    a1: Vec<Complex64>,
    a2: Vec<Complex64>,
    b: Vec<Complex64>,
    c: Vec<Complex64>,
    w: Vec<Complex64>,
}

impl KernelScratch {
    pub(crate) fn new(n: usize) -> Self {
        let z = vec![Complex64::new(0.0, 0.0); n];
        Self {
            a1: z.clone(),
            a2: z.clone(),
            b: z.clone(),
            c: z.clone(),
            w: z,
        }
    }

    /// `(Ĉ, Ŵ)` from the last evaluation.
    pub(crate) fn result(&self) -> (&[Complex64], &[Complex64]) {
        (&self.c, &self.w)
    }
}
