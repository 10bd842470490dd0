//! Run configuration: one TOML document with an explicit schema version.
//!
//! ```toml
//! schema_version = 1
//! mode = "simulate"          # simulate | invariants | bourgain_check | convergence | trap_check
//! seed = 7
//! output_dir = "out"
//!
//! [grid]
//! dimension = 2
//! points = 64
//! period = 6.283185307179586
//! e = [0.0, 0.0, 1.0]        # 3D only
//!
//! [sim]                      # dt, t_end, integrator, dealias, nonlinearity_enabled, checkpoint_stride
//! dt = 1e-3
//! t_end = 1.0
//!
//! [initial]
//! kind = "gaussian_packet"   # gaussian_packet | single_mode | from_file
//! amplitude = 0.1
//! ```
//!
//! Sections `[checks]`, `[trap]`, `[convergence]` and `[bourgain]` tune the
//! corresponding modes. Unknown keys are rejected everywhere.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::initial::InitialData;
use crate::bourgain::{
    check_admissible, BilinearParams, LemmaId, DEFAULT_PLUS, TRILINEAR_LATTICE_CAP,
};
use crate::dynamics::{Geometry, Integrator, SimConfig};
use crate::error::{Error, Result};
use crate::spectral::Grid;

pub const SCHEMA_VERSION: u32 = 1;

/// Seeds are TOML integers, hence signed 64-bit.
pub const MAX_SEED: u64 = i64::MAX as u64;

/// Environment variable that overrides `output_dir`.
pub const OUT_ENV: &str = "MZAK_OUT";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Simulate,
    Invariants,
    BourgainCheck,
    Convergence,
    TrapCheck,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Simulate => "simulate",
            Mode::Invariants => "invariants",
            Mode::BourgainCheck => "bourgain_check",
            Mode::Convergence => "convergence",
            Mode::TrapCheck => "trap_check",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    pub dimension: usize,
    pub points: usize,
    pub period: f64,
    /// Direction of the 3D bracket; ignored in 2D.
    pub e: [f64; 3],
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            dimension: 2,
            points: 64,
            period: 2.0 * std::f64::consts::PI,
            e: [0.0, 0.0, 1.0],
        }
    }
}

impl GridConfig {
    pub fn grid(&self) -> Result<Grid> {
        Grid::new(self.dimension, self.points, self.period)
    }

    pub fn geometry(&self) -> Geometry {
        if self.dimension == 3 {
            Geometry::Dim3 { e: self.e }
        } else {
            Geometry::Dim2
        }
    }
}

/// Thresholds whose violation turns a run into exit status 4.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Checks {
    pub i1_drift_max: f64,
    pub i2_drift_max: f64,
    pub conjugacy_max: f64,
}

impl Default for Checks {
    fn default() -> Self {
        Self {
            i1_drift_max: 1e-6,
            i2_drift_max: 1e-4,
            conjugacy_max: 1e-10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrapConfig {
    pub ensemble_size: usize,
    /// Overrides the default mode band of the c₀ ensemble.
    pub band: Option<i64>,
    /// When set, the initial amplitude is rescaled so that `Ẽ ≈ fraction/(4c₀)`.
    pub fraction: Option<f64>,
}

impl Default for TrapConfig {
    fn default() -> Self {
        Self {
            ensemble_size: 200,
            band: None,
            fraction: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConvergenceConfig {
    pub integrators: Vec<Integrator>,
    /// Coarsest step; each level halves it.
    pub dt: f64,
    pub levels: usize,
    pub t_end: f64,
    /// Minimum observed order per integrator, checked on the finest pair.
    pub min_order: Vec<f64>,
}

impl Default for ConvergenceConfig {
    fn default() -> Self {
        Self {
            integrators: vec![Integrator::Strang, Integrator::InteractionRk4],
            dt: 0.01,
            levels: 3,
            t_end: 0.5,
            min_order: vec![1.9, 3.7],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BourgainConfig {
    /// Lemma names; empty means every lemma admissible at the parameters.
    pub lemmas: Vec<String>,
    pub k: f64,
    pub l: f64,
    pub epsilon: f64,
    pub delta: f64,
    pub t: f64,
    pub sign: i8,
    pub plus: f64,
    pub axis: usize,
    pub ensemble_size: usize,
    pub n_time: usize,
    pub dt: f64,
    pub band: i64,
    /// Repeat the ensemble after one dyadic refinement.
    pub refine: bool,
    /// If non-empty, scan these `T` values and fit the exponent.
    pub t_list: Vec<f64>,
    pub max_refinement_factor: f64,
    pub min_theta: f64,
}

impl Default for BourgainConfig {
    fn default() -> Self {
        let p = BilinearParams::default();
        Self {
            lemmas: Vec::new(),
            k: p.k,
            l: p.l,
            epsilon: p.epsilon,
            delta: p.delta,
            t: p.t,
            sign: p.sign,
            plus: DEFAULT_PLUS,
            axis: p.axis,
            ensemble_size: 100,
            n_time: 128,
            dt: 0.05,
            band: 3,
            refine: true,
            t_list: Vec::new(),
            max_refinement_factor: 2.0,
            min_theta: -0.05,
        }
    }
}

impl BourgainConfig {
    pub fn params(&self) -> BilinearParams {
        BilinearParams {
            k: self.k,
            l: self.l,
            epsilon: self.epsilon,
            delta: self.delta,
            t: self.t,
            sign: self.sign,
            plus: self.plus,
            axis: self.axis,
        }
    }

    /// Listed lemmas, or all admissible ones in `dim` dimensions.
    pub fn lemma_ids(&self, dim: usize) -> Result<Vec<LemmaId>> {
        if self.lemmas.is_empty() {
            let all = LemmaId::admissible_for(dim, &self.params());
            if all.is_empty() {
                return Err(Error::Config(format!(
                    "no lemma is admissible at (k,l)=({},{}) in {dim}D",
                    self.k, self.l
                )));
            }
            return Ok(all);
        }
        self.lemmas
            .iter()
            .map(|s| {
                s.parse()
                    .map_err(|e: Error| Error::Config(format!("bourgain.lemmas: {e}")))
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema_version: u32,
    pub mode: Mode,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    /// Checkpoint to continue from (simulate and invariants modes).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub resume_from: Option<PathBuf>,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub sim: SimConfig,
    #[serde(default)]
    pub initial: InitialData,
    #[serde(default)]
    pub checks: Checks,
    #[serde(default)]
    pub trap: TrapConfig,
    #[serde(default)]
    pub convergence: ConvergenceConfig,
    #[serde(default)]
    pub bourgain: BourgainConfig,
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

impl RunConfig {
    /// Minimal config for `mode` with every section at its default.
    pub fn new(mode: Mode) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            mode,
            seed: 0,
            output_dir: default_output_dir(),
            resume_from: None,
            grid: GridConfig::default(),
            sim: SimConfig::default(),
            initial: InitialData::default(),
            checks: Checks::default(),
            trap: TrapConfig::default(),
            convergence: ConvergenceConfig::default(),
            bourgain: BourgainConfig::default(),
        }
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    /// First 8 bytes (little endian) of SHA-256 over the canonical TOML
    /// serialization, excluding `output_dir`.
    pub fn hash(&self) -> u64 {
        let mut canon = self.clone();
        canon.output_dir = PathBuf::new();
        let text = canon.to_toml().unwrap_or_default();
        let digest = Sha256::digest(text.as_bytes());
        u64::from_le_bytes(digest[..8].try_into().expect("8 bytes"))
    }

    pub fn validate(&self) -> Result<()> {
        let cfg = |e: Error| match e {
            Error::Config(m) => Error::Config(m),
            other => Error::Config(other.to_string()),
        };
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::Config(format!(
                "schema_version {} is not supported (expected {SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        if self.seed > MAX_SEED {
            return Err(Error::Config(format!(
                "seed must be <= {MAX_SEED}, got {}",
                self.seed
            )));
        }
        let grid = self.grid.grid().map_err(cfg)?;
        if self.grid.dimension == 3 {
            let e = self.grid.e;
            if !(e.iter().all(|c| c.is_finite()) && e.iter().any(|c| *c != 0.0)) {
                return Err(Error::Config(format!(
                    "grid.e must be a nonzero finite vector, got {e:?}"
                )));
            }
        }
        self.sim.validate().map_err(cfg)?;
        self.initial.validate(&grid).map_err(cfg)?;
        match self.mode {
            Mode::TrapCheck => {
                if self.trap.ensemble_size < 100 {
                    return Err(Error::Config("trap.ensemble_size must be >= 100".into()));
                }
                if let Some(f) = self.trap.fraction {
                    if !(f > 0.0 && f < 1.0) {
                        return Err(Error::Config(format!(
                            "trap.fraction must lie in (0, 1), got {f}"
                        )));
                    }
                }
            }
            Mode::Convergence => {
                let c = &self.convergence;
                if c.levels < 3 {
                    return Err(Error::Config("convergence.levels must be >= 3".into()));
                }
                if !(c.dt > 0.0 && c.t_end > 0.0) {
                    return Err(Error::Config(
                        "convergence.dt and convergence.t_end must be positive".into(),
                    ));
                }
                let steps = c.t_end / c.dt;
                if (steps - steps.round()).abs() > 1e-9 * steps.max(1.0) {
                    return Err(Error::Config(
                        "convergence.t_end must be a multiple of convergence.dt".into(),
                    ));
                }
                if c.integrators.is_empty() {
                    return Err(Error::Config("convergence.integrators is empty".into()));
                }
                if !c.min_order.is_empty() && c.min_order.len() != c.integrators.len() {
                    return Err(Error::Config(
                        "convergence.min_order must match convergence.integrators".into(),
                    ));
                }
            }
            Mode::BourgainCheck => {
                let b = &self.bourgain;
                let p = b.params();
                for lemma in b.lemma_ids(self.grid.dimension)? {
                    check_admissible(lemma, &p).map_err(cfg)?;
                    if lemma.dimension() != self.grid.dimension {
                        return Err(Error::Config(format!(
                            "lemma {lemma} is stated in {}D, grid is {}D",
                            lemma.dimension(),
                            self.grid.dimension
                        )));
                    }
                }
                if b.ensemble_size == 0 {
                    return Err(Error::Config("bourgain.ensemble_size must be >= 1".into()));
                }
                if b.n_time < 8 || b.n_time % 2 != 0 || !(b.dt.is_finite() && b.dt > 0.0) {
                    return Err(Error::Config(
                        "bourgain.n_time must be even and >= 8, bourgain.dt positive".into(),
                    ));
                }
                let levels = if b.refine { 2 } else { 1 };
                let mut points = grid.len() * b.n_time;
                for level in 0..levels {
                    if points > TRILINEAR_LATTICE_CAP {
                        return Err(Error::Config(format!(
                            "bourgain lattice of {points} space-time points{} exceeds {TRILINEAR_LATTICE_CAP}; lower grid.points or bourgain.n_time",
                            if level == 1 { " after refinement" } else { "" }
                        )));
                    }
                    points <<= grid.dimension() + 1;
                }
                if !b.t_list.is_empty() && b.t_list.len() < 3 {
                    return Err(Error::Config(
                        "bourgain.t_list needs at least 3 values".into(),
                    ));
                }
            }
            Mode::Simulate | Mode::Invariants => {}
        }
        Ok(())
    }
}

/// Parses and validates a config document. Unknown keys, type mismatches
/// and inadmissible estimate parameters are reported as config errors.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let cfg: RunConfig =
        toml::from_str(text).map_err(|e| Error::Config(e.to_string().trim().to_string()))?;
    cfg.validate()?;
    Ok(cfg)
}

pub fn load_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    parse_config(&text)
}
