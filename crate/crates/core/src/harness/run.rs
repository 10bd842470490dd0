//! Mode dispatch. Every mode writes into `config.output_dir`:
//!
//! | mode             | artifacts                                                        |
//! |------------------|------------------------------------------------------------------|
//! | `simulate`       | `checkpoints/ckpt_<step>.bin`, `invariants.csv`, `summary.txt`   |
//! | `invariants`     | `invariants.csv`, `summary.txt`                                  |
//! | `trap_check`     | `invariants.csv`, `trap.csv`, `trap_report.json`, `summary.txt`  |
//! | `convergence`    | `convergence.csv`, `summary.txt`                                 |
//! | `bourgain_check` | `estimate_<lemma>[_refined].csv`, `theta_<lemma>.csv`, `summary.txt` |

use std::path::{Path, PathBuf};

use serde::Serialize;

use super::config::{Mode, RunConfig};
use super::initial::InitialData;
use super::report::{
    emit_json, emit_report, emit_summary, lemma_slug, ConvergenceRow, ConvergenceTable,
    ReportFormat, RunInfo,
};
use crate::bourgain::{ratio_ensemble, theta_scan_many, EnsembleSpec, EstimateReport};
use crate::dynamics::checkpoint::{self, Checkpointer};
use crate::dynamics::{evolve, evolve_from, Observer, SimConfig, State};
use crate::error::{Error, Result};
use crate::invariants::{
    estimate_c0_with, measure, trap_check, C0Options, InvariantRecorder, InvariantSeries,
};

/// Errors below this are treated as round-off when measuring orders.
pub const ROUNDOFF_FLOOR: f64 = 1e-13;

/// What a successful run produced. Non-empty `violations` maps to exit
/// status 4.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Outcome {
    pub mode: Mode,
    pub artifacts: Vec<PathBuf>,
    pub violations: Vec<String>,
}

impl Outcome {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn exit_code(&self) -> i32 {
        if self.passed() {
            0
        } else {
            4
        }
    }
}

/// Largest conjugacy residual and relative imaginary part of `χ` seen.
#[derive(Debug, Default)]
struct StructureMonitor {
    conjugacy: f64,
    reality: f64,
}

impl Observer for StructureMonitor {
    fn observe(&mut self, _step: u64, state: &State) -> Result<()> {
        self.conjugacy = self.conjugacy.max(state.conjugacy_residual());
        let (chi, _) = state.chi_pair()?;
        let chi = chi.to_physical();
        let scale = chi.max_abs();
        let imag = chi.max_imag();
        self.reality = self
            .reality
            .max(if scale > 0.0 { imag / scale } else { imag });
        Ok(())
    }
}

/// Initial state and its step index: a checkpoint when resuming, otherwise
/// the configured recipe at step 0.
pub fn initial_state(config: &RunConfig) -> Result<(State, u64)> {
    let grid = config.grid.grid()?;
    let geometry = config.grid.geometry();
    match &config.resume_from {
        Some(path) => {
            let ck = checkpoint::load(path)?;
            if *ck.state.grid() != grid || ck.state.geometry != geometry {
                return Err(Error::Config(format!(
                    "checkpoint {} does not match the configured grid/geometry",
                    path.display()
                )));
            }
            Ok((ck.state, ck.step))
        }
        None => Ok((config.initial.build(grid, geometry, config.sim.dealias)?, 0)),
    }
}

pub fn run(config: &RunConfig) -> Result<Outcome> {
    config.validate()?;
    let dir = config.output_dir.as_path();
    let info = RunInfo::new(config);
    match config.mode {
        Mode::Simulate => simulate(config, dir, &info, true),
        Mode::Invariants => simulate(config, dir, &info, false),
        Mode::TrapCheck => trap(config, dir, &info),
        Mode::Convergence => convergence(config, dir, &info),
        Mode::BourgainCheck => bourgain(config, dir, &info),
    }
}

fn simulate(
    config: &RunConfig,
    dir: &Path,
    info: &RunInfo,
    write_checkpoints: bool,
) -> Result<Outcome> {
    let (state, first_step) = initial_state(config)?;
    let mut recorder = InvariantRecorder::default();
    let mut monitor = StructureMonitor::default();
    let ck_dir = dir.join("checkpoints");
    let mut ck = Checkpointer::new(&ck_dir, info.config_hash);
    let traj = if write_checkpoints {
        std::fs::create_dir_all(&ck_dir)?;
        evolve_from(
            state,
            first_step,
            &config.sim,
            &mut [&mut recorder, &mut monitor, &mut ck],
        )?
    } else {
        evolve_from(
            state,
            first_step,
            &config.sim,
            &mut [&mut recorder, &mut monitor],
        )?
    };
    let series = recorder.series;
    let mut artifacts = ck.written.clone();
    artifacts.push(emit_report(
        dir,
        "invariants",
        &series,
        ReportFormat::Csv,
        info,
    )?);

    let mut violations = Vec::new();
    if config.mode == Mode::Invariants {
        let c = &config.checks;
        if !(series.i1_drift() <= c.i1_drift_max) {
            violations.push(format!(
                "I1 drift {:.3e} exceeds {:.3e}",
                series.i1_drift(),
                c.i1_drift_max
            ));
        }
        if !(series.i2_drift() <= c.i2_drift_max) {
            violations.push(format!(
                "I2 drift {:.3e} exceeds {:.3e}",
                series.i2_drift(),
                c.i2_drift_max
            ));
        }
        if !(monitor.conjugacy <= c.conjugacy_max) {
            violations.push(format!(
                "conjugacy residual {:.3e} exceeds {:.3e}",
                monitor.conjugacy, c.conjugacy_max
            ));
        }
        if !(monitor.reality <= c.conjugacy_max) {
            violations.push(format!(
                "chi reality residual {:.3e} exceeds {:.3e}",
                monitor.reality, c.conjugacy_max
            ));
        }
    }
    let mut lines = vec![
        format!("steps = {}", traj.steps),
        format!("first_step = {first_step}"),
        format!("t_final = {}", traj.final_state.t),
        format!("conjugacy_max = {:.6e}", monitor.conjugacy),
        format!("chi_reality_max = {:.6e}", monitor.reality),
    ];
    lines.extend(super::report::Tabular::summary_lines(&series));
    lines.extend(violations.iter().map(|v| format!("violation: {v}")));
    artifacts.push(emit_summary(dir, info, &lines)?);
    Ok(Outcome {
        mode: config.mode,
        artifacts,
        violations,
    })
}

fn record(state: State, sim: &SimConfig) -> Result<InvariantSeries> {
    let mut recorder = InvariantRecorder::default();
    evolve(state, sim, &mut [&mut recorder])?;
    Ok(recorder.series)
}

/// `c₀` for the config's grid, drawn with the config's seed and band.
pub fn trap_c0(config: &RunConfig) -> Result<(f64, C0Options)> {
    let grid = config.grid.grid()?;
    let mut opts = C0Options::for_grid(&grid);
    opts.seed = config.seed;
    if let Some(b) = config.trap.band {
        opts.band = b;
    }
    let c0 = estimate_c0_with(
        &grid,
        config.grid.geometry(),
        config.trap.ensemble_size,
        opts,
    )?;
    Ok((c0, opts))
}

/// The configured initial data, rescaled when `trap.fraction` is set so
/// that `Ẽ ≈ fraction/(4c₀)`, with the scale applied.
pub fn trap_initial(config: &RunConfig, c0: f64) -> Result<(InitialData, Option<f64>)> {
    let Some(f) = config.trap.fraction else {
        return Ok((config.initial.clone(), None));
    };
    let grid = config.grid.grid()?;
    let state = config
        .initial
        .build(grid, config.grid.geometry(), config.sim.dealias)?;
    let e1 = measure(&state)?.e_tilde();
    if e1 <= 0.0 {
        return Ok((config.initial.clone(), None));
    }
    // Ẽ is quadratic in the amplitude to leading order
    let s = (0.25 * f / (c0 * e1)).sqrt();
    Ok((config.initial.scaled(s), Some(s)))
}

fn trap(config: &RunConfig, dir: &Path, info: &RunInfo) -> Result<Outcome> {
    let grid = config.grid.grid()?;
    let geometry = config.grid.geometry();
    let (c0, opts) = trap_c0(config)?;
    let (initial, scale) = trap_initial(config, c0)?;
    let mut lines = vec![
        format!("c0 = {c0:.16e}"),
        format!("c0_band = {}", opts.band),
    ];
    if let Some(s) = scale {
        lines.push(format!("amplitude_scale = {s:.16e}"));
    }
    let state = initial.build(grid, geometry, config.sim.dealias)?;
    let series = record(state, &config.sim)?;
    let report = trap_check(&series, c0)?;
    let mut artifacts = vec![
        emit_report(dir, "invariants", &series, ReportFormat::Csv, info)?,
        emit_report(dir, "trap", &report, ReportFormat::Csv, info)?,
        emit_json(dir, "trap_report", &report)?,
    ];
    let mut violations = Vec::new();
    if !report.holds() {
        violations.push(report.summary());
    }
    lines.extend(super::report::Tabular::summary_lines(&report));
    artifacts.push(emit_summary(dir, info, &lines)?);
    Ok(Outcome {
        mode: config.mode,
        artifacts,
        violations,
    })
}

fn relative_state_distance(a: &State, b: &State) -> Result<f64> {
    let mut num = 0.0;
    let mut den = 0.0;
    for (x, y) in [(&a.phi, &b.phi), (&a.chi_plus, &b.chi_plus)] {
        num += x.to_spectral().sub(&y.to_spectral())?.norm_sq();
        den += y.norm_sq();
    }
    Ok(if den > 0.0 {
        (num / den).sqrt()
    } else {
        num.sqrt()
    })
}

/// Self-convergence table: each integrator at `dt, dt/2, …` compared with
/// the next finer run.
pub fn convergence_table(config: &RunConfig) -> Result<ConvergenceTable> {
    let grid = config.grid.grid()?;
    let geometry = config.grid.geometry();
    let c = &config.convergence;
    let initial = config.initial.build(grid, geometry, config.sim.dealias)?;
    let mut table = ConvergenceTable::default();
    for &integrator in &c.integrators {
        let finals = (0..c.levels)
            .map(|j| {
                let sim = SimConfig {
                    dt: c.dt / (1u64 << j) as f64,
                    t_end: c.t_end,
                    integrator,
                    checkpoint_stride: u64::MAX,
                    ..config.sim.clone()
                };
                Ok(evolve(initial.clone(), &sim, &mut [])?.final_state)
            })
            .collect::<Result<Vec<State>>>()?;
        let errors = finals
            .windows(2)
            .map(|w| relative_state_distance(&w[0], &w[1]))
            .collect::<Result<Vec<f64>>>()?;
        for (j, &e) in errors.iter().enumerate() {
            let order = errors
                .get(j + 1)
                .filter(|&&f| f > ROUNDOFF_FLOOR && e > ROUNDOFF_FLOOR)
                .map(|f| (e / f).log2());
            table.rows.push(ConvergenceRow {
                integrator,
                dt: c.dt / (1u64 << j) as f64,
                error: e,
                order,
            });
        }
    }
    Ok(table)
}

fn convergence(config: &RunConfig, dir: &Path, info: &RunInfo) -> Result<Outcome> {
    let table = convergence_table(config)?;
    let c = &config.convergence;
    let mut violations = Vec::new();
    for (i, &min) in c.integrators.iter().zip(&c.min_order) {
        match table.finest_order(*i) {
            Some(o) if o >= min => {}
            Some(o) => violations.push(format!("{i:?}: order {o:.3} below {min}")),
            None => violations.push(format!("{i:?}: order not measurable above round-off")),
        }
    }
    let mut lines = super::report::Tabular::summary_lines(&table);
    lines.extend(violations.iter().map(|v| format!("violation: {v}")));
    let artifacts = vec![
        emit_report(dir, "convergence", &table, ReportFormat::Csv, info)?,
        emit_summary(dir, info, &lines)?,
    ];
    Ok(Outcome {
        mode: config.mode,
        artifacts,
        violations,
    })
}

fn bourgain(config: &RunConfig, dir: &Path, info: &RunInfo) -> Result<Outcome> {
    let b = &config.bourgain;
    let spec = EnsembleSpec {
        grid: config.grid.grid()?,
        n_time: b.n_time,
        dt: b.dt,
        band: b.band,
        size: b.ensemble_size,
        seed: config.seed,
    };
    let p = b.params();
    let lemmas = b.lemma_ids(config.grid.dimension)?;
    let mut artifacts = Vec::new();
    let mut violations = Vec::new();
    let mut lines = vec![
        "ratios on the periodic lattice are consistency evidence, not a verification".to_string(),
    ];
    let coarse = ratio_ensemble(&lemmas, &p, &spec)?;
    let emit =
        |r: &EstimateReport, stem: String| emit_report(dir, &stem, r, ReportFormat::Csv, info);
    for r in &coarse {
        artifacts.push(emit(r, format!("estimate_{}", lemma_slug(r.lemma_id)))?);
        lines.push(r.summary().trim_start_matches("# ").to_string());
    }
    if b.refine {
        let fine = ratio_ensemble(&lemmas, &p, &spec.refined()?)?;
        for (c, f) in coarse.iter().zip(&fine) {
            artifacts.push(emit(
                f,
                format!("estimate_{}_refined", lemma_slug(f.lemma_id)),
            )?);
            let factor = if c.max_ratio > 0.0 && f.max_ratio > 0.0 {
                (f.max_ratio / c.max_ratio).max(c.max_ratio / f.max_ratio)
            } else if c.max_ratio == f.max_ratio {
                1.0
            } else {
                f64::INFINITY
            };
            lines.push(format!(
                "lemma={} refinement_factor={factor:.6}",
                c.lemma_id
            ));
            if !(factor < b.max_refinement_factor) {
                violations.push(format!(
                    "lemma {}: max ratio changes by x{factor:.3} under refinement",
                    c.lemma_id
                ));
            }
        }
    }
    if !b.t_list.is_empty() {
        for r in theta_scan_many(&lemmas, &p, &b.t_list, &spec)? {
            artifacts.push(emit(&r, format!("theta_{}", lemma_slug(r.lemma_id)))?);
            let theta = r.theta_fit.unwrap_or(f64::NAN);
            lines.push(format!("lemma={} theta_fit={theta:.6}", r.lemma_id));
            if !(theta > b.min_theta) {
                violations.push(format!(
                    "lemma {}: theta_fit {theta:.4} not above {}",
                    r.lemma_id, b.min_theta
                ));
            }
        }
    }
    lines.extend(violations.iter().map(|v| format!("violation: {v}")));
    artifacts.push(emit_summary(dir, info, &lines)?);
    Ok(Outcome {
        mode: config.mode,
        artifacts,
        violations,
    })
}
