//! Space-time fields on `torus × [−n_t·dt/2, n_t·dt/2)`.
//!
//! Samples sit at `t_j = (j − n_t/2)·dt`. The spectral representation holds
//! coefficients
//!
//! ```text
//! c(m, k) = (Nᵈ n_t)⁻¹ Σ_{x, j} f(x, t_j) e^{−i(ξ·x + τ_k t_j)},   τ_k = 2πk/(n_t dt)
//! ```
//!
//! with `k ∈ [−n_t/2, n_t/2)`. Storage is time-major: index `j·Nᵈ + s`.

use num_complex::Complex64;
use rustfft::FftDirection;

use crate::error::{Error, Result};
use crate::spectral::{fft, Field, Grid, Representation};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StRepresentation {
    Physical,
    SpectralXt,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpaceTimeField {
    grid: Grid,
    n_time: usize,
    dt: f64,
    repr: StRepresentation,
    values: Vec<Complex64>,
}

impl SpaceTimeField {
    pub fn zeros(grid: Grid, n_time: usize, dt: f64, repr: StRepresentation) -> Result<Self> {
        if n_time < 8 || n_time % 2 != 0 {
            return Err(Error::InvalidArgument(format!(
                "n_time must be even and >= 8, got {n_time}"
            )));
        }
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "dt must be positive, got {dt}"
            )));
        }
        Ok(Self {
            grid,
            n_time,
            dt,
            repr,
            values: vec![Complex64::new(0.0, 0.0); grid.len() * n_time],
        })
    }

    /// Samples `f(x, t)` on the space-time lattice.
    pub fn from_fn(
        grid: Grid,
        n_time: usize,
        dt: f64,
        f: impl Fn([f64; 3], f64) -> Complex64,
    ) -> Result<Self> {
        let mut s = Self::zeros(grid, n_time, dt, StRepresentation::Physical)?;
        let n = grid.len();
        for j in 0..n_time {
            let t = s.time(j);
            for i in 0..n {
                s.values[j * n + i] = f(grid.position(i), t);
            }
        }
        Ok(s)
    }

    /// Stacks one spectral spatial field per time sample, produced by `f(t)`.
    pub fn from_slices(
        grid: Grid,
        n_time: usize,
        dt: f64,
        mut f: impl FnMut(f64) -> Field,
    ) -> Result<Self> {
        let mut s = Self::zeros(grid, n_time, dt, StRepresentation::Physical)?;
        let n = grid.len();
        for j in 0..n_time {
            let slice = f(s.time(j)).into_physical();
            if *slice.grid() != grid {
                return Err(Error::GridMismatch);
            }
            s.values[j * n..(j + 1) * n].copy_from_slice(slice.values());
        }
        Ok(s)
    }

    pub fn from_values(
        grid: Grid,
        n_time: usize,
        dt: f64,
        repr: StRepresentation,
        values: Vec<Complex64>,
    ) -> Result<Self> {
        let mut s = Self::zeros(grid, n_time, dt, repr)?;
        if values.len() != s.values.len() {
            return Err(Error::InvalidArgument(format!(
                "expected {} values, got {}",
                s.values.len(),
                values.len()
            )));
        }
        s.values = values;
        Ok(s)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn n_time(&self) -> usize {
        self.n_time
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// `n_t · dt`.
    pub fn extent(&self) -> f64 {
        self.n_time as f64 * self.dt
    }

    pub fn representation(&self) -> StRepresentation {
        self.repr
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn time(&self, j: usize) -> f64 {
        (j as f64 - (self.n_time / 2) as f64) * self.dt
    }

    /// Signed temporal mode of index `k`.
    pub fn time_mode(&self, k: usize) -> i64 {
        let n = self.n_time as i64;
        let k = k as i64;
        if k < n / 2 {
            k
        } else {
            k - n
        }
    }

    pub fn tau(&self, k: usize) -> f64 {
        2.0 * std::f64::consts::PI * self.time_mode(k) as f64 / self.extent()
    }

    fn shape(&self) -> Vec<usize> {
        let mut s = vec![self.n_time];
        s.extend(self.grid.shape());
        s
    }

    /// Spatial slice at time index `j`, in the current representation.
    pub fn slice(&self, j: usize) -> &[Complex64] {
        let n = self.grid.len();
        &self.values[j * n..(j + 1) * n]
    }

    pub fn into_spectral(mut self) -> Self {
        if self.repr == StRepresentation::Physical {
            let shape = self.shape();
            let axes: Vec<usize> = (0..shape.len()).collect();
            fft::transform_axes(&mut self.values, &shape, &axes, FftDirection::Forward);
            let scale = 1.0 / self.values.len() as f64;
            let n = self.grid.len();
            for k in 0..self.n_time {
                // shift to centred times: e^{−iτ_k t_0} = (−1)^k
                let sign = if k % 2 == 0 { scale } else { -scale };
                for v in &mut self.values[k * n..(k + 1) * n] {
                    *v *= sign;
                }
            }
            self.repr = StRepresentation::SpectralXt;
        }
        self
    }

    pub fn into_physical(mut self) -> Self {
        if self.repr == StRepresentation::SpectralXt {
            let n = self.grid.len();
            for k in (1..self.n_time).step_by(2) {
                for v in &mut self.values[k * n..(k + 1) * n] {
                    *v = -*v;
                }
            }
            let shape = self.shape();
            let axes: Vec<usize> = (0..shape.len()).collect();
            fft::transform_axes(&mut self.values, &shape, &axes, FftDirection::Inverse);
            self.repr = StRepresentation::Physical;
        }
        self
    }

    pub fn to_spectral(&self) -> Self {
        self.clone().into_spectral()
    }

    pub fn to_physical(&self) -> Self {
        self.clone().into_physical()
    }

    pub fn check_same_lattice(&self, other: &Self) -> Result<()> {
        if self.grid != other.grid || self.n_time != other.n_time || self.dt != other.dt {
            return Err(Error::GridMismatch);
        }
        Ok(())
    }

    /// Multiplies every spectral coefficient by `symbol(ξ)`; keeps the
    /// representation.
    pub fn apply_spatial(&self, symbol: impl Fn([f64; 3]) -> Complex64) -> Self {
        let repr = self.repr;
        let mut s = self.to_spectral();
        let n = self.grid.len();
        let table: Vec<Complex64> = (0..n).map(|i| symbol(self.grid.wavevector(i))).collect();
        for k in 0..self.n_time {
            for (v, w) in s.values[k * n..(k + 1) * n].iter_mut().zip(&table) {
                *v *= w;
            }
        }
        match repr {
            StRepresentation::Physical => s.into_physical(),
            StRepresentation::SpectralXt => s,
        }
    }

    /// `∂_axis` (Nyquist coefficient zeroed).
    pub fn partial(&self, axis: usize) -> Result<Self> {
        if axis >= self.grid.dimension() {
            return Err(Error::InvalidArgument(format!("axis {axis} out of range")));
        }
        let g = self.grid;
        let k = g.wavenumber_unit();
        let nyq = g.nyquist_mode();
        Ok(self.apply_spatial(|xi| {
            let m = (xi[axis] / k).round() as i64;
            if m == nyq {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::new(0.0, xi[axis])
            }
        }))
    }

    /// Pointwise product in physical space.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_same_lattice(other)?;
        let a = self.to_physical();
        let b = other.to_physical();
        let values = a.values.iter().zip(&b.values).map(|(x, y)| x * y).collect();
        Ok(Self { values, ..a })
    }

    /// Pointwise complex conjugate, physical output.
    pub fn conj(&self) -> Self {
        let mut a = self.to_physical();
        for v in &mut a.values {
            *v = v.conj();
        }
        a
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        let mut a = self.clone();
        for v in &mut a.values {
            *v = f(*v);
        }
        a
    }

    /// Zeroes the spatial mean of every time slice; spectral output.
    pub fn remove_spatial_mean(&self) -> Self {
        let mut s = self.to_spectral();
        let n = self.grid.len();
        for k in 0..self.n_time {
            s.values[k * n] = Complex64::new(0.0, 0.0);
        }
        s
    }

    /// `Σ_x,t |f|² · cell · dt`.
    pub fn l2_norm(&self) -> f64 {
        let s: f64 = self.values.iter().map(|v| v.norm_sqr()).sum();
        let factor = match self.repr {
            StRepresentation::Physical => self.grid.cell_volume() * self.dt,
            StRepresentation::SpectralXt => self.grid.volume() * self.extent(),
        };
        (s * factor).sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Spatial field at time index `j` as a [`Field`] in the matching
    /// representation (physical only).
    pub fn slice_field(&self, j: usize) -> Result<Field> {
        if self.repr != StRepresentation::Physical {
            return Err(Error::InvalidArgument(
                "slice_field needs a physical field".into(),
            ));
        }
        Field::from_values(self.grid, Representation::Physical, self.slice(j).to_vec())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn plane_wave_is_a_single_spike() {
        let g = Grid::new(2, 8, 2.0 * PI).unwrap();
        let (nt, dt) = (16, 0.25);
        let tau0 = 2.0 * PI * 3.0 / (nt as f64 * dt);
        let f = SpaceTimeField::from_fn(g, nt, dt, |x, t| {
            Complex64::from_polar(2.0, x[0] - 2.0 * x[1] + tau0 * t)
        })
        .unwrap()
        .into_spectral();
        let n = g.len();
        let target = 3 * n + g.flat_of_modes([1, -2, 0]);
        for (i, v) in f.values().iter().enumerate() {
            let expect = if i == target { 2.0 } else { 0.0 };
            assert!((v.norm() - expect).abs() < 1e-12, "index {i}");
        }
        assert!((f.values()[target] - Complex64::new(2.0, 0.0)).norm() < 1e-12);
        assert!((f.tau(3) - tau0).abs() < 1e-15);
    }

    #[test]
    fn round_trip_and_parseval() {
        let g = Grid::new(3, 8, 1.3).unwrap();
        let f = SpaceTimeField::from_fn(g, 8, 0.1, |x, t| {
            Complex64::new((x[0] * 3.0 + t).sin(), (x[2] - 2.0 * t).cos() * x[1])
        })
        .unwrap();
        let s = f.to_spectral();
        assert!((s.l2_norm() - f.l2_norm()).abs() < 1e-12 * f.l2_norm());
        let back = s.into_physical();
        for (a, b) in back.values().iter().zip(f.values()) {
            assert!((a - b).norm() < 1e-12);
        }
    }
}
