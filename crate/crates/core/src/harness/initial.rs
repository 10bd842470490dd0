//! Initial-data recipes.
//!
//! `gaussian_packet` builds, with `g_s(x) = exp(−|x − c|²/(2(s·w)²))` on the
//! periodic box,
//!
//! ```text
//! φ₀ = a · g_1(x) · e^{i k·x}
//! χ₀ = b · g_{r₀}(x − s)
//! χ₁ = b · ρ · g_{r₁}(x) · (x₂ − c₂)
//! ```
//!
//! The shift `s` makes `χ₀` overlap `φ₀` asymmetrically, so the cubic
//! energy term does not vanish.

use std::path::PathBuf;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dynamics::{checkpoint, Geometry, State};
use crate::error::{Error, Result};
use crate::spectral::{Field, Grid};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialData {
    GaussianPacket {
        /// Defaults to the box centre.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        center: Option<[f64; 3]>,
        /// Defaults to a tenth of the period.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        width: Option<f64>,
        amplitude: f64,
        /// Carrier mode of `φ₀` (integer lattice coordinates).
        #[serde(default = "default_carrier")]
        carrier: [i64; 3],
        /// Defaults to `amplitude`.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        chi_amplitude: Option<f64>,
        #[serde(default = "default_chi_shift")]
        chi_shift: [f64; 3],
        #[serde(default = "default_chi_width")]
        chi_width: f64,
        #[serde(default = "default_rate_width")]
        rate_width: f64,
        #[serde(default = "default_rate")]
        rate: f64,
    },
    SingleMode {
        mode: [i64; 3],
        amplitude: f64,
        /// Optional cosine mode for `χ₀`.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        chi_mode: Option<[i64; 3]>,
        #[serde(default)]
        chi_amplitude: f64,
    },
    FromFile {
        path: PathBuf,
    },
}

fn default_carrier() -> [i64; 3] {
    [2, 0, 0]
}

fn default_chi_shift() -> [f64; 3] {
    [0.3, 0.6, 0.9]
}

fn default_chi_width() -> f64 {
    1.2
}

fn default_rate_width() -> f64 {
    0.9
}

fn default_rate() -> f64 {
    0.5
}

impl Default for InitialData {
    fn default() -> Self {
        InitialData::GaussianPacket {
            center: None,
            width: None,
            amplitude: 0.1,
            carrier: default_carrier(),
            chi_amplitude: None,
            chi_shift: default_chi_shift(),
            chi_width: default_chi_width(),
            rate_width: default_rate_width(),
            rate: default_rate(),
        }
    }
}

impl InitialData {
    pub fn validate(&self, grid: &Grid) -> Result<()> {
        let finite = |x: f64, what: &str| {
            if x.is_finite() {
                Ok(())
            } else {
                Err(Error::Config(format!("initial.{what} must be finite")))
            }
        };
        match self {
            InitialData::GaussianPacket {
                width,
                amplitude,
                chi_amplitude,
                chi_width,
                rate_width,
                rate,
                ..
            } => {
                finite(*amplitude, "amplitude")?;
                finite(chi_amplitude.unwrap_or(0.0), "chi_amplitude")?;
                finite(*rate, "rate")?;
                for (v, what) in [
                    (width.unwrap_or(1.0), "width"),
                    (*chi_width, "chi_width"),
                    (*rate_width, "rate_width"),
                ] {
                    if !(v.is_finite() && v > 0.0) {
                        return Err(Error::Config(format!("initial.{what} must be positive")));
                    }
                }
            }
            InitialData::SingleMode {
                mode,
                amplitude,
                chi_amplitude,
                chi_mode,
            } => {
                finite(*amplitude, "amplitude")?;
                finite(*chi_amplitude, "chi_amplitude")?;
                let half = grid.points_per_axis() as i64 / 2;
                for m in std::iter::once(mode).chain(chi_mode.iter()) {
                    if m.iter().any(|c| c.abs() >= half) {
                        return Err(Error::Config(format!(
                            "initial mode {m:?} is not resolved by N = {}",
                            2 * half
                        )));
                    }
                }
            }
            InitialData::FromFile { .. } => {}
        }
        Ok(())
    }

    /// Same recipe with amplitudes multiplied by `s` (files are unchanged).
    pub fn scaled(&self, s: f64) -> Self {
        let mut out = self.clone();
        match &mut out {
            InitialData::GaussianPacket {
                amplitude,
                chi_amplitude,
                ..
            } => {
                let b = chi_amplitude.unwrap_or(*amplitude);
                *amplitude *= s;
                *chi_amplitude = Some(b * s);
            }
            InitialData::SingleMode {
                amplitude,
                chi_amplitude,
                ..
            } => {
                *amplitude *= s;
                *chi_amplitude *= s;
            }
            InitialData::FromFile { .. } => {}
        }
        out
    }

    /// Builds the initial state; `from_file` reads a checkpoint and keeps its
    /// time stamp.
    pub fn build(&self, grid: Grid, geometry: Geometry, dealias: bool) -> Result<State> {
        let d = grid.dimension();
        let l = grid.period();
        match self {
            InitialData::GaussianPacket {
                center,
                width,
                amplitude,
                carrier,
                chi_amplitude,
                chi_shift,
                chi_width,
                rate_width,
                rate,
            } => {
                let c = center.unwrap_or([l / 2.0; 3]);
                let w = width.unwrap_or(l / 10.0);
                let b = chi_amplitude.unwrap_or(*amplitude);
                let unit = grid.wavenumber_unit();
                let gauss = move |x: [f64; 3], s: f64, shift: [f64; 3]| {
                    let r2: f64 = (0..d).map(|j| (x[j] - c[j] - shift[j]).powi(2)).sum();
                    (-r2 / (2.0 * (w * s).powi(2))).exp()
                };
                let phi = Field::from_fn(grid, |x| {
                    let phase: f64 = (0..d).map(|j| carrier[j] as f64 * unit * x[j]).sum();
                    Complex64::from_polar(amplitude * gauss(x, 1.0, [0.0; 3]), phase)
                });
                let chi0 = Field::from_fn(grid, |x| {
                    Complex64::new(b * gauss(x, *chi_width, *chi_shift), 0.0)
                });
                let chi1 = Field::from_fn(grid, |x| {
                    Complex64::new(
                        b * rate * gauss(x, *rate_width, [0.0; 3]) * (x[1] - c[1]),
                        0.0,
                    )
                });
                State::from_data(&phi, &chi0, &chi1, geometry, dealias)
            }
            InitialData::SingleMode {
                mode,
                amplitude,
                chi_mode,
                chi_amplitude,
            } => {
                let phi = Field::from_modes(grid, |m| {
                    if m == *mode {
                        Complex64::new(*amplitude, 0.0)
                    } else {
                        Complex64::new(0.0, 0.0)
                    }
                });
                let chi0 = match chi_mode {
                    Some(cm) => Field::from_modes(grid, |m| {
                        let neg = [-cm[0], -cm[1], -cm[2]];
                        if m == *cm || m == neg {
                            Complex64::new(0.5 * chi_amplitude, 0.0)
                        } else {
                            Complex64::new(0.0, 0.0)
                        }
                    }),
                    None => Field::zeros(grid, crate::spectral::Representation::Spectral),
                };
                let zero = Field::zeros(grid, crate::spectral::Representation::Spectral);
                State::from_data(&phi, &chi0, &zero, geometry, dealias)
            }
            InitialData::FromFile { path } => {
                let ck = checkpoint::load(path)?;
                if *ck.state.grid() != grid || ck.state.geometry != geometry {
                    return Err(Error::Config(format!(
                        "{} does not match the configured grid/geometry",
                        path.display()
                    )));
                }
                Ok(ck.state)
            }
        }
    }
}
