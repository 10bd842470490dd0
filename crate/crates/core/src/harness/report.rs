//! Report emission. CSV columns are fixed per report kind and floats are
//! written with 17 significant digits; summaries start with a header
//! carrying the crate version, mode, config hash and seed, and contain no
//! timestamps, so re-emitting a result reproduces the file byte for byte.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::config::{Mode, RunConfig};
use crate::bourgain::{EstimateReport, LemmaId};
use crate::dynamics::Integrator;
use crate::error::{Error, Result};
use crate::invariants::{InvariantSeries, TrapReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    SummaryText,
}

/// Provenance written at the top of every summary.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunInfo {
    pub version: &'static str,
    pub mode: &'static str,
    pub config_hash: u64,
    pub seed: u64,
}

impl RunInfo {
    pub fn new(config: &RunConfig) -> Self {
        Self {
            version: env!("CARGO_PKG_VERSION"),
            mode: config.mode.name(),
            config_hash: config.hash(),
            seed: config.seed,
        }
    }

    pub fn for_mode(mode: Mode, config_hash: u64, seed: u64) -> Self {
        Self {
            version: env!("CARGO_PKG_VERSION"),
            mode: mode.name(),
            config_hash,
            seed,
        }
    }

    fn header(&self) -> String {
        format!(
            "mzak {}\nmode = {}\nconfig_hash = {:016x}\nseed = {}\n",
            self.version, self.mode, self.config_hash, self.seed
        )
    }
}

/// Anything that can be written as a table and as summary lines.
pub trait Tabular {
    fn write_csv(&self, w: &mut dyn Write) -> Result<()>;
    fn summary_lines(&self) -> Vec<String>;
}

impl Tabular for InvariantSeries {
    fn write_csv(&self, mut w: &mut dyn Write) -> Result<()> {
        InvariantSeries::write_csv(self, &mut w)
    }

    fn summary_lines(&self) -> Vec<String> {
        let mut out = vec![format!("samples = {}", self.len())];
        if let (Some(t0), Some(t1)) = (self.times.first(), self.times.last()) {
            out.push(format!("t = [{t0}, {t1}]"));
            out.push(format!("I1_drift = {:.6e}", self.i1_drift()));
            out.push(format!("I2_drift = {:.6e}", self.i2_drift()));
            let m_max = self.m.iter().cloned().fold(0.0, f64::max);
            out.push(format!("m_max = {m_max:.6e}"));
        }
        out
    }
}

impl Tabular for EstimateReport {
    fn write_csv(&self, w: &mut dyn Write) -> Result<()> {
        EstimateReport::write_csv(self, w)
    }

    fn summary_lines(&self) -> Vec<String> {
        vec![self.summary().trim_start_matches("# ").to_string()]
    }
}

impl Tabular for TrapReport {
    fn write_csv(&self, w: &mut dyn Write) -> Result<()> {
        writeln!(w, "sample,m_below_m1,m_below_m0")?;
        for (k, b0) in self.below_m0.iter().enumerate() {
            let b1 = self
                .satisfied
                .get(k)
                .map_or("NA".to_string(), |b| b.to_string());
            writeln!(w, "{k},{b1},{b0}")?;
        }
        Ok(())
    }

    fn summary_lines(&self) -> Vec<String> {
        vec![self.summary(), format!("holds = {}", self.holds())]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub integrator: Integrator,
    pub dt: f64,
    /// Relative L² distance to the run at `dt/2`.
    pub error: f64,
    /// `log₂` of the error ratio to the next finer row.
    pub order: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ConvergenceTable {
    pub rows: Vec<ConvergenceRow>,
}

impl ConvergenceTable {
    /// Order measured on the finest pair of `integrator`.
    pub fn finest_order(&self, integrator: Integrator) -> Option<f64> {
        self.rows
            .iter()
            .rev()
            .filter(|r| r.integrator == integrator)
            .find_map(|r| r.order)
    }
}

fn integrator_name(i: Integrator) -> &'static str {
    match i {
        Integrator::Strang => "strang",
        Integrator::InteractionRk4 => "interaction_rk4",
        Integrator::ReferenceRk4SecondOrder => "reference_rk4_second_order",
    }
}

impl Tabular for ConvergenceTable {
    fn write_csv(&self, w: &mut dyn Write) -> Result<()> {
        writeln!(w, "integrator,dt,error,order")?;
        for r in &self.rows {
            let order = r.order.map_or("NA".to_string(), |o| format!("{o:.16e}"));
            writeln!(
                w,
                "{},{:.16e},{:.16e},{}",
                integrator_name(r.integrator),
                r.dt,
                r.error,
                order
            )?;
        }
        Ok(())
    }

    fn summary_lines(&self) -> Vec<String> {
        let mut seen: Vec<Integrator> = Vec::new();
        for r in &self.rows {
            if !seen.contains(&r.integrator) {
                seen.push(r.integrator);
            }
        }
        seen.into_iter()
            .map(|i| {
                let o = self
                    .finest_order(i)
                    .map_or("NA".to_string(), |o| format!("{o:.4}"));
                format!("{}: finest order = {o}", integrator_name(i))
            })
            .collect()
    }
}

/// File-system name of a lemma: `E''` becomes `e_double_prime`.
pub fn lemma_slug(l: LemmaId) -> String {
    l.name()
        .to_lowercase()
        .replace("''", "_double_prime")
        .replace('\'', "_prime")
        .replace('~', "_tilde")
}

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| {
        Error::Io(std::io::Error::new(
            e.kind(),
            format!("cannot create {}: {e}", dir.display()),
        ))
    })
}

/// Writes `results` to `dir/<stem>.csv` or `dir/<stem>.txt` and returns the
/// path. An existing file is replaced.
pub fn emit_report(
    dir: &Path,
    stem: &str,
    results: &dyn Tabular,
    format: ReportFormat,
    info: &RunInfo,
) -> Result<PathBuf> {
    create_dir(dir)?;
    let path = match format {
        ReportFormat::Csv => dir.join(format!("{stem}.csv")),
        ReportFormat::SummaryText => dir.join(format!("{stem}.txt")),
    };
    let mut w = BufWriter::new(fs::File::create(&path)?);
    match format {
        ReportFormat::Csv => results.write_csv(&mut w)?,
        ReportFormat::SummaryText => {
            w.write_all(info.header().as_bytes())?;
            for line in results.summary_lines() {
                writeln!(w, "{line}")?;
            }
        }
    }
    w.flush()?;
    Ok(path)
}

/// Writes the run-level summary: header, then free-form lines.
pub fn emit_summary(dir: &Path, info: &RunInfo, lines: &[String]) -> Result<PathBuf> {
    create_dir(dir)?;
    let path = dir.join("summary.txt");
    let mut text = info.header();
    for l in lines {
        text.push_str(l);
        text.push('\n');
    }
    fs::write(&path, text)?;
    Ok(path)
}

/// Writes `value` as pretty JSON to `dir/<stem>.json`.
pub fn emit_json<T: Serialize>(dir: &Path, stem: &str, value: &T) -> Result<PathBuf> {
    create_dir(dir)?;
    let path = dir.join(format!("{stem}.json"));
    let text = serde_json::to_string_pretty(value).map_err(|e| Error::Format(e.to_string()))?;
    fs::write(&path, text + "\n")?;
    Ok(path)
}
