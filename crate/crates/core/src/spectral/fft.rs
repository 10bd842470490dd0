//! Multi-dimensional FFTs over row-major buffers, built from cached 1D
//! `rustfft` plans.

use std::cell::RefCell;
use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use num_complex::Complex64;
use once_cell::sync::Lazy;
use rustfft::{Fft, FftDirection, FftPlanner};

static PLANS: Lazy<Mutex<HashMap<(usize, bool), Arc<dyn Fft<f64>>>>> =
    Lazy::new(|| Mutex::new(HashMap::new()));

fn plan(len: usize, direction: FftDirection) -> Arc<dyn Fft<f64>> {
    let forward = matches!(direction, FftDirection::Forward);
    let mut cache = PLANS.lock().expect("fft plan cache poisoned");
    cache
        .entry((len, forward))
        .or_insert_with(|| FftPlanner::new().plan_fft(len, direction))
        .clone()
}

thread_local! {
    static BUFFERS: RefCell<(Vec<Complex64>, Vec<Complex64>)> = const { RefCell::new((Vec::new(), Vec::new())) };
}

/// Columns moved per gather/scatter tile.
const TILE: usize = 16;

/// Unnormalized transform of `data` (row-major with `shape`) along each axis
/// listed in `axes`.
pub fn transform_axes(
    data: &mut [Complex64],
    shape: &[usize],
    axes: &[usize],
    direction: FftDirection,
) {
    let total: usize = shape.iter().product();
    assert_eq!(data.len(), total, "buffer does not match shape");
    BUFFERS.with(|cell| {
        let mut guard = cell.borrow_mut();
        let (lines, scratch) = &mut *guard;
        for &axis in axes {
            let len = shape[axis];
            if len == 1 {
                continue;
            }
            let fft = plan(len, direction);
            let need = fft.get_inplace_scratch_len();
            if scratch.len() < need {
                scratch.resize(need, Complex64::new(0.0, 0.0));
            }
            let stride: usize = shape[axis + 1..].iter().product();
            if stride == 1 {
                fft.process_with_scratch(data, &mut scratch[..need]);
                continue;
            }
            if lines.len() < total {
                lines.resize(total, Complex64::new(0.0, 0.0));
            }
            let outer = total / (len * stride);
            // gather lines along `axis` into contiguous rows, tile by tile
            for o in 0..outer {
                let base = o * len * stride;
                let out = &mut lines[base..base + len * stride];
                for t0 in (0..stride).step_by(TILE) {
                    let t1 = (t0 + TILE).min(stride);
                    for j in 0..len {
                        let row = &data[base + j * stride + t0..base + j * stride + t1];
                        for (c, v) in row.iter().enumerate() {
                            out[(t0 + c) * len + j] = *v;
                        }
                    }
                }
            }
            fft.process_with_scratch(&mut lines[..total], &mut scratch[..need]);
            for o in 0..outer {
                let base = o * len * stride;
                let src = &lines[base..base + len * stride];
                for t0 in (0..stride).step_by(TILE) {
                    let t1 = (t0 + TILE).min(stride);
                    for j in 0..len {
                        let row = &mut data[base + j * stride + t0..base + j * stride + t1];
                        for (c, v) in row.iter_mut().enumerate() {
                            *v = src[(t0 + c) * len + j];
                        }
                    }
                }
            }
        }
    });
}

/// Forward transform over all axes, scaled by `1/len` so the output holds
/// Fourier coefficients.
pub fn forward(data: &mut [Complex64], shape: &[usize]) {
    let axes: Vec<usize> = (0..shape.len()).collect();
    transform_axes(data, shape, &axes, FftDirection::Forward);
    let scale = 1.0 / data.len() as f64;
    for v in data.iter_mut() {
        *v *= scale;
    }
}

/// Inverse of [`forward`]: synthesizes samples from Fourier coefficients.
pub fn inverse(data: &mut [Complex64], shape: &[usize]) {
    let axes: Vec<usize> = (0..shape.len()).collect();
    transform_axes(data, shape, &axes, FftDirection::Inverse);
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive_dft(data: &[Complex64], shape: &[usize]) -> Vec<Complex64> {
        // brute-force coefficient sum, 3 axes max
        let total = data.len();
        let mut s = shape.to_vec();
        while s.len() < 3 {
            s.push(1);
        }
        let idx = |f: usize| [f / (s[1] * s[2]), (f / s[2]) % s[1], f % s[2]];
        let mut out = vec![Complex64::new(0.0, 0.0); total];
        for (k, o) in out.iter_mut().enumerate() {
            let kk = idx(k);
            for (x, v) in data.iter().enumerate() {
                let xx = idx(x);
                let mut phase = 0.0;
                for a in 0..3 {
                    phase += (kk[a] * xx[a]) as f64 / s[a] as f64;
                }
                *o += v * Complex64::from_polar(1.0, -2.0 * std::f64::consts::PI * phase);
            }
            *o /= total as f64;
        }
        out
    }

    #[test]
    fn matches_naive_dft_on_anisotropic_shape() {
        let shape = [4, 6, 8];
        let data: Vec<Complex64> = (0..192)
            .map(|i| Complex64::new((i as f64 * 0.37).sin(), (i as f64 * 0.11).cos()))
            .collect();
        let mut fast = data.clone();
        forward(&mut fast, &shape);
        let slow = naive_dft(&data, &shape);
        for (a, b) in fast.iter().zip(&slow) {
            assert!((a - b).norm() < 1e-12);
        }
        inverse(&mut fast, &shape);
        for (a, b) in fast.iter().zip(&data) {
            assert!((a - b).norm() < 1e-12);
        }
    }
}
