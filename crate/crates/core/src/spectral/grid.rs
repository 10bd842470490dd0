use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Uniform periodic grid on the torus `[0, L)^d`, `d ∈ {2, 3}`.
///
/// Points are stored row-major with axis 0 slowest. The frequency lattice
/// assigns index `i` on an axis the integer mode `m = i` for `i < N/2` and
/// `m = i - N` otherwise, so each axis carries `m ∈ [-N/2, N/2)` and the
/// physical wavenumber is `ξ = (2π/L) m`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    dimension: usize,
    n: usize,
    period: f64,
}

impl Grid {
    pub fn new(dimension: usize, points_per_axis: usize, period: f64) -> Result<Self> {
        if dimension != 2 && dimension != 3 {
            return Err(Error::InvalidGrid(format!(
                "dimension must be 2 or 3, got {dimension}"
            )));
        }
        if points_per_axis < 8 || points_per_axis % 2 != 0 {
            return Err(Error::InvalidGrid(format!(
                "points_per_axis must be even and >= 8, got {points_per_axis}"
            )));
        }
        if !(period.is_finite() && period > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "period must be positive and finite, got {period}"
            )));
        }
        Ok(Self {
            dimension,
            n: points_per_axis,
            period,
        })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn points_per_axis(&self) -> usize {
        self.n
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    /// Total number of grid points, `N^d`.
    pub fn len(&self) -> usize {
        self.n.pow(self.dimension as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn shape(&self) -> Vec<usize> {
        vec![self.n; self.dimension]
    }

    pub fn spacing(&self) -> f64 {
        self.period / self.n as f64
    }

    /// Quadrature weight `(L/N)^d` of one grid cell.
    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.dimension as i32)
    }

    /// Torus volume `L^d`; this is also the spectral measure of the
    /// coefficient convention (see [`crate::spectral::Field`]).
    pub fn volume(&self) -> f64 {
        self.period.powi(self.dimension as i32)
    }

    pub fn wavenumber_unit(&self) -> f64 {
        2.0 * PI / self.period
    }

    /// Signed lattice mode of axis index `i`.
    #[inline]
    pub fn mode_of(&self, i: usize) -> i64 {
        let n = self.n as i64;
        let i = i as i64;
        if i < n / 2 {
            i
        } else {
            i - n
        }
    }

    /// Axis index holding signed mode `m`, wrapping periodically.
    #[inline]
    pub fn index_of_mode(&self, m: i64) -> usize {
        m.rem_euclid(self.n as i64) as usize
    }

    #[inline]
    pub fn nyquist_mode(&self) -> i64 {
        -(self.n as i64) / 2
    }

    /// Per-axis indices of a flat index; unused trailing axes are zero.
    #[inline]
    pub fn unravel(&self, flat: usize) -> [usize; 3] {
        let n = self.n;
        match self.dimension {
            2 => [flat / n, flat % n, 0],
            _ => [flat / (n * n), (flat / n) % n, flat % n],
        }
    }

    #[inline]
    pub fn ravel(&self, idx: [usize; 3]) -> usize {
        let n = self.n;
        match self.dimension {
            2 => idx[0] * n + idx[1],
            _ => (idx[0] * n + idx[1]) * n + idx[2],
        }
    }

    /// Signed integer modes at a flat index.
    #[inline]
    pub fn modes(&self, flat: usize) -> [i64; 3] {
        let idx = self.unravel(flat);
        let mut m = [0i64; 3];
        for (axis, slot) in m.iter_mut().enumerate().take(self.dimension) {
            *slot = self.mode_of(idx[axis]);
        }
        m
    }

    /// Flat index of the mode vector `m`, wrapping each component.
    pub fn flat_of_modes(&self, m: [i64; 3]) -> usize {
        let mut idx = [0usize; 3];
        for (axis, slot) in idx.iter_mut().enumerate().take(self.dimension) {
            *slot = self.index_of_mode(m[axis]);
        }
        self.ravel(idx)
    }

    /// Wavevector `ξ = (2π/L) m` at a flat index.
    #[inline]
    pub fn wavevector(&self, flat: usize) -> [f64; 3] {
        let m = self.modes(flat);
        let k = self.wavenumber_unit();
        [m[0] as f64 * k, m[1] as f64 * k, m[2] as f64 * k]
    }

    #[inline]
    pub fn xi_sq(&self, flat: usize) -> f64 {
        let xi = self.wavevector(flat);
        xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2]
    }

    /// Physical coordinates of a flat index.
    #[inline]
    pub fn position(&self, flat: usize) -> [f64; 3] {
        let idx = self.unravel(flat);
        let h = self.spacing();
        let mut x = [0.0; 3];
        for (axis, slot) in x.iter_mut().enumerate().take(self.dimension) {
            *slot = idx[axis] as f64 * h;
        }
        x
    }

    /// True if any component of the mode at `flat` sits on the Nyquist index.
    #[inline]
    pub fn touches_nyquist(&self, flat: usize) -> bool {
        let m = self.modes(flat);
        let nyq = self.nyquist_mode();
        m.iter().take(self.dimension).any(|&c| c == nyq)
    }

    /// 2/3-rule retention test: every `|m_j| <= N/3`.
    #[inline]
    pub fn retained(&self, flat: usize) -> bool {
        let m = self.modes(flat);
        let n = self.n as i64;
        m.iter().take(self.dimension).all(|&c| 3 * c.abs() <= n)
    }

    /// `|ξ|²` for every lattice point.
    pub fn xi_sq_table(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.xi_sq(i)).collect()
    }

    /// Grid with the same period and dimension and a different resolution.
    pub fn with_points(&self, points_per_axis: usize) -> Result<Self> {
        Self::new(self.dimension, points_per_axis, self.period)
    }

    /// The same lattice one dimension up or down; used by the 3D→2D slice
    /// comparisons.
    pub fn with_dimension(&self, dimension: usize) -> Result<Self> {
        Self::new(dimension, self.n, self.period)
    }
}
