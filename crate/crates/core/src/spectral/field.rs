use num_complex::Complex64;

use super::fft;
use super::grid::Grid;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Representation {
    Physical,
    Spectral,
}

impl Representation {
    pub fn tag(self) -> u8 {
        match self {
            Representation::Physical => 0,
            Representation::Spectral => 1,
        }
    }

    pub fn from_tag(tag: u8) -> Option<Self> {
        match tag {
            0 => Some(Representation::Physical),
            1 => Some(Representation::Spectral),
            _ => None,
        }
    }
}

/// Complex samples on a [`Grid`], tagged with their representation.
///
/// Spectral values are Fourier coefficients:
///
/// ```text
/// c(m) = N^{-d} Σ_x f(x) e^{-i ξ(m)·x},      f(x) = Σ_m c(m) e^{i ξ(m)·x}
/// ```
///
/// so a plane wave `e^{i ξ₀·x}` has a unit coefficient at `ξ₀` and Parseval
/// reads `Σ_x |f(x)|² (L/N)^d = L^d Σ_m |c(m)|²`. The spectral measure is
/// therefore `L^d` per lattice point.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    grid: Grid,
    repr: Representation,
    values: Vec<Complex64>,
}

impl Field {
    pub fn zeros(grid: Grid, repr: Representation) -> Self {
        Self {
            grid,
            repr,
            values: vec![Complex64::new(0.0, 0.0); grid.len()],
        }
    }

    pub fn from_values(grid: Grid, repr: Representation, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidArgument(format!(
                "expected {} values, got {}",
                grid.len(),
                values.len()
            )));
        }
        Ok(Self { grid, repr, values })
    }

    /// Samples `f` at every grid point (physical representation).
    pub fn from_fn(grid: Grid, mut f: impl FnMut([f64; 3]) -> Complex64) -> Self {
        let values = (0..grid.len()).map(|i| f(grid.position(i))).collect();
        Self {
            grid,
            repr: Representation::Physical,
            values,
        }
    }

    /// Builds a spectral field from a function of the integer mode vector.
    pub fn from_modes(grid: Grid, mut f: impl FnMut([i64; 3]) -> Complex64) -> Self {
        let values = (0..grid.len()).map(|i| f(grid.modes(i))).collect();
        Self {
            grid,
            repr: Representation::Spectral,
            values,
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn representation(&self) -> Representation {
        self.repr
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn forward_transform(&self) -> Result<Field> {
        self.expect(Representation::Physical)?;
        let mut values = self.values.clone();
        fft::forward(&mut values, &self.grid.shape());
        Ok(Field {
            grid: self.grid,
            repr: Representation::Spectral,
            values,
        })
    }

    pub fn inverse_transform(&self) -> Result<Field> {
        self.expect(Representation::Spectral)?;
        let mut values = self.values.clone();
        fft::inverse(&mut values, &self.grid.shape());
        Ok(Field {
            grid: self.grid,
            repr: Representation::Physical,
            values,
        })
    }

    /// Converts to spectral in place when needed.
    pub fn into_spectral(mut self) -> Field {
        if self.repr == Representation::Physical {
            fft::forward(&mut self.values, &self.grid.shape());
            self.repr = Representation::Spectral;
        }
        self
    }

    pub fn into_physical(mut self) -> Field {
        if self.repr == Representation::Spectral {
            fft::inverse(&mut self.values, &self.grid.shape());
            self.repr = Representation::Physical;
        }
        self
    }

    pub fn to_spectral(&self) -> Field {
        self.clone().into_spectral()
    }

    pub fn to_physical(&self) -> Field {
        self.clone().into_physical()
    }

    pub fn expect(&self, repr: Representation) -> Result<()> {
        if self.repr != repr {
            return Err(Error::Representation {
                expected: repr,
                found: self.repr,
            });
        }
        Ok(())
    }

    pub fn check_same_grid(&self, other: &Field) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        Ok(())
    }

    /// `∫ |f|² dx` computed in whichever representation the field is held.
    pub fn norm_sq(&self) -> f64 {
        let s: f64 = self.values.iter().map(|v| v.norm_sqr()).sum();
        match self.repr {
            Representation::Physical => s * self.grid.cell_volume(),
            Representation::Spectral => s * self.grid.volume(),
        }
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// `∫ f ḡ dx`; both fields must share grid and representation.
    pub fn inner(&self, other: &Field) -> Result<Complex64> {
        self.check_same_grid(other)?;
        other.expect(self.repr)?;
        let s: Complex64 = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a * b.conj())
            .sum();
        Ok(match self.repr {
            Representation::Physical => s * self.grid.cell_volume(),
            Representation::Spectral => s * self.grid.volume(),
        })
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Largest imaginary part in physical space.
    pub fn max_imag(&self) -> f64 {
        self.to_physical()
            .values
            .iter()
            .map(|v| v.im.abs())
            .fold(0.0, f64::max)
    }

    /// Spatial mean `L^{-d} ∫ f dx`, i.e. the zero-mode coefficient.
    pub fn mean(&self) -> Complex64 {
        match self.repr {
            Representation::Spectral => self.values[0],
            Representation::Physical => {
                self.values.iter().sum::<Complex64>() / self.values.len() as f64
            }
        }
    }

    /// Pointwise complex conjugate of the represented function. In spectral
    /// form this is `c(m) -> conj(c(-m))`.
    pub fn conj(&self) -> Field {
        match self.repr {
            Representation::Physical => Field {
                grid: self.grid,
                repr: self.repr,
                values: self.values.iter().map(|v| v.conj()).collect(),
            },
            Representation::Spectral => {
                let g = self.grid;
                let values = (0..g.len())
                    .map(|i| {
                        let m = g.modes(i);
                        self.values[g.flat_of_modes([-m[0], -m[1], -m[2]])].conj()
                    })
                    .collect();
                Field {
                    grid: g,
                    repr: self.repr,
                    values,
                }
            }
        }
    }

    /// Largest violation of `c(-m) = conj(c(m))` relative to the largest
    /// coefficient; zero for a real-valued function.
    pub fn hermitian_residual(&self) -> f64 {
        let spec = self.to_spectral();
        let g = spec.grid;
        let scale = spec.max_abs().max(f64::MIN_POSITIVE);
        (0..g.len())
            .map(|i| {
                let m = g.modes(i);
                let j = g.flat_of_modes([-m[0], -m[1], -m[2]]);
                (spec.values[j] - spec.values[i].conj()).norm()
            })
            .fold(0.0, f64::max)
            / scale
    }

    /// Zero the mean (spectral zero mode) in place, keeping the representation.
    pub fn remove_mean(&mut self) {
        match self.repr {
            Representation::Spectral => self.values[0] = Complex64::new(0.0, 0.0),
            Representation::Physical => {
                let mean = self.mean();
                for v in self.values.iter_mut() {
                    *v -= mean;
                }
            }
        }
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Field {
        Field {
            grid: self.grid,
            repr: self.repr,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn scale(&self, s: Complex64) -> Field {
        self.map(|v| v * s)
    }

    fn zip_with(
        &self,
        other: &Field,
        f: impl Fn(Complex64, Complex64) -> Complex64,
    ) -> Result<Field> {
        self.check_same_grid(other)?;
        other.expect(self.repr)?;
        Ok(Field {
            grid: self.grid,
            repr: self.repr,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    pub fn add(&self, other: &Field) -> Result<Field> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Field) -> Result<Field> {
        self.zip_with(other, |a, b| a - b)
    }

    /// `self + s * other`.
    pub fn axpy(&self, s: Complex64, other: &Field) -> Result<Field> {
        self.zip_with(other, |a, b| a + s * b)
    }

    /// Pointwise product in physical space; the result is physical.
    pub fn mul_pointwise(&self, other: &Field) -> Result<Field> {
        self.check_same_grid(other)?;
        let a = self.to_physical();
        let b = other.to_physical();
        a.zip_with(&b, |x, y| x * y)
    }

    /// Relative L² distance `‖a − b‖ / ‖b‖` (absolute when `b = 0`).
    pub fn relative_distance(&self, other: &Field) -> Result<f64> {
        let b = other.to_spectral();
        let diff = self.to_spectral().sub(&b)?;
        let denom = b.norm();
        Ok(if denom > 0.0 {
            diff.norm() / denom
        } else {
            diff.norm()
        })
    }

    /// Largest pointwise deviation in physical space.
    pub fn max_abs_diff(&self, other: &Field) -> Result<f64> {
        let a = self.to_physical();
        let b = other.to_physical();
        a.check_same_grid(&b)?;
        Ok(a.values
            .iter()
            .zip(&b.values)
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max))
    }

    pub fn is_finite(&self) -> bool {
        self.values
            .iter()
            .all(|v| v.re.is_finite() && v.im.is_finite())
    }
}
