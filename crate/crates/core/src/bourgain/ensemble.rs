//! Random windowed test fields, ensemble ratio statistics and the `T`-scan.

use std::io::Write;

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::bilinear::{check_admissible, BilinearParams, LemmaId, PairSpectra};
use super::spacetime::SpaceTimeField;
use super::window::psi_delta;
use crate::error::{Error, Result};
use crate::spectral::{Field, Grid, Representation};

pub const CSV_HEADER: &str = "sample_id,T,ratio";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnsembleSpec {
    pub grid: Grid,
    pub n_time: usize,
    pub dt: f64,
    /// Modes with every `|m_j| ≤ band`.
    pub band: i64,
    pub size: usize,
    pub seed: u64,
}

impl EnsembleSpec {
    /// 2D, `N = 16`, band 3, `n_t = 128` over a time extent of 6.4.
    pub fn coarse_2d(size: usize, seed: u64) -> Self {
        Self {
            grid: Grid::new(2, 16, 2.0 * std::f64::consts::PI).expect("valid grid"),
            n_time: 128,
            dt: 0.05,
            band: 3,
            size,
            seed,
        }
    }

    /// 3D, `N = 8`, band 1, `n_t = 128` over a time extent of 6.4.
    pub fn coarse_3d(size: usize, seed: u64) -> Self {
        Self {
            grid: Grid::new(3, 8, 2.0 * std::f64::consts::PI).expect("valid grid"),
            band: 1,
            ..Self::coarse_2d(size, seed)
        }
    }

    /// One dyadic refinement `(N, n_t) → (2N, 2n_t)` at fixed extent.
    pub fn refined(&self) -> Result<Self> {
        Ok(Self {
            grid: self.grid.with_points(2 * self.grid.points_per_axis())?,
            n_time: 2 * self.n_time,
            dt: 0.5 * self.dt,
            ..*self
        })
    }

    fn validate(&self) -> Result<()> {
        if self.size == 0 {
            return Err(Error::InvalidArgument("empty ensemble".into()));
        }
        if self.band < 1 || 4 * self.band >= self.grid.points_per_axis() as i64 {
            return Err(Error::InvalidArgument(format!(
                "band {} must satisfy 1 ≤ band < N/4 so products stay unaliased",
                self.band
            )));
        }
        Ok(())
    }
}

/// Per-member random data: mode amplitudes for φ and χ plus a slow amplitude
/// modulation in time, so members are not exact free waves.
struct Member {
    modes: Vec<[i64; 3]>,
    phi: Vec<Complex64>,
    chi: Vec<Complex64>,
    omega: Vec<f64>,
    rho: f64,
}

impl Member {
    fn draw(spec: &EnsembleSpec, id: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
        rng.set_stream(id);
        let d = spec.grid.dimension();
        let k = spec.band;
        let mut modes = Vec::new();
        let ranges: Vec<std::ops::RangeInclusive<i64>> =
            (0..3).map(|j| if j < d { -k..=k } else { 0..=0 }).collect();
        for a in ranges[0].clone() {
            for b in ranges[1].clone() {
                for c in ranges[2].clone() {
                    if (a, b, c) != (0, 0, 0) {
                        modes.push([a, b, c]);
                    }
                }
            }
        }
        let decay = rng.gen_range(0.0..2.0);
        let rho = if rng.gen_bool(0.5) {
            0.0
        } else {
            rng.gen_range(0.0..0.9)
        };
        let amp = |m: &[i64; 3], rng: &mut ChaCha8Rng| {
            let r = ((m[0] * m[0] + m[1] * m[1] + m[2] * m[2]) as f64 + 1.0).powf(-0.5 * decay);
            Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * r
        };
        let phi = modes.iter().map(|m| amp(m, &mut rng)).collect();
        let chi = modes.iter().map(|m| amp(m, &mut rng)).collect();
        let omega = modes.iter().map(|_| rng.gen_range(-6.0..6.0)).collect();
        Self {
            modes,
            phi,
            chi,
            omega,
            rho,
        }
    }

    /// `D` applied to the windowed fields, physical.
    fn derivatives(
        &self,
        spec: &EnsembleSpec,
        p: &BilinearParams,
    ) -> Result<(SpaceTimeField, SpaceTimeField)> {
        let g = spec.grid;
        let unit = g.wavenumber_unit();
        let sign = if p.sign >= 0 { 1.0 } else { -1.0 };
        let flats: Vec<usize> = self.modes.iter().map(|m| g.flat_of_modes(*m)).collect();
        let build = |coef: &[Complex64], chi: bool| {
            SpaceTimeField::from_slices(g, spec.n_time, spec.dt, |t| {
                let w = psi_delta(t, p.t);
                let mut f = Field::zeros(g, Representation::Spectral);
                if w != 0.0 {
                    for (j, m) in self.modes.iter().enumerate() {
                        let xi: Vec<f64> = m.iter().map(|&c| c as f64 * unit).collect();
                        let q: f64 = xi.iter().map(|x| x * x).sum();
                        let freq = if chi { -sign * q.sqrt() } else { -q };
                        let envelope = 1.0 + self.rho * (self.omega[j] * t).cos();
                        f.values_mut()[flats[j]] = Complex64::new(0.0, xi[p.axis])
                            * coef[j]
                            * Complex64::from_polar(w * envelope, freq * t);
                    }
                }
                f
            })
        };
        Ok((build(&self.phi, false)?, build(&self.chi, true)?))
    }
}

/// Windowed `(φ, χ)` of ensemble member `id`, for use with
/// [`super::bilinear_ratio`].
pub fn member_fields(
    spec: &EnsembleSpec,
    id: u64,
    p: &BilinearParams,
) -> Result<(SpaceTimeField, SpaceTimeField)> {
    spec.validate()?;
    let m = Member::draw(spec, id);
    let (dphi, dchi) = m.derivatives(spec, p)?;
    // undo D on the finite mode set
    let undo = |f: &SpaceTimeField| {
        f.apply_spatial(|xi| {
            if xi[p.axis] == 0.0 {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::new(0.0, -1.0 / xi[p.axis])
            }
        })
    };
    Ok((undo(&dphi), undo(&dchi)))
}

fn member_spectra(spec: &EnsembleSpec, id: u64, p: &BilinearParams) -> Result<PairSpectra> {
    let (dphi, dchi) = Member::draw(spec, id).derivatives(spec, p)?;
    PairSpectra::from_derivatives(&dphi, &dchi)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    pub lemma_id: LemmaId,
    pub parameters: BilinearParams,
    pub sample_count: usize,
    pub sample_ids: Vec<u64>,
    pub t_values: Vec<f64>,
    pub ratios: Vec<f64>,
    pub max_ratio: f64,
    pub mean_ratio: f64,
    pub theta_fit: Option<f64>,
}

impl EstimateReport {
    fn new(
        lemma: LemmaId,
        parameters: BilinearParams,
        rows: Vec<(u64, f64, f64)>,
        theta_fit: Option<f64>,
    ) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::InvalidArgument("empty ensemble".into()));
        }
        if let Some(r) = rows.iter().find(|r| !(r.2.is_finite() && r.2 >= 0.0)) {
            return Err(Error::InvalidArgument(format!(
                "lemma {lemma}: sample {} produced ratio {}",
                r.0, r.2
            )));
        }
        let ratios: Vec<f64> = rows.iter().map(|r| r.2).collect();
        let max_ratio = ratios.iter().cloned().fold(0.0, f64::max);
        let mean_ratio = ratios.iter().sum::<f64>() / ratios.len() as f64;
        Ok(Self {
            lemma_id: lemma,
            parameters,
            sample_count: ratios.len(),
            sample_ids: rows.iter().map(|r| r.0).collect(),
            t_values: rows.iter().map(|r| r.1).collect(),
            ratios,
            max_ratio,
            mean_ratio,
            theta_fit,
        })
    }

    pub fn summary(&self) -> String {
        let p = &self.parameters;
        let theta = self
            .theta_fit
            .map_or("NA".to_string(), |t| format!("{t:.6}"));
        format!(
            "# lemma={} k={} l={} epsilon={} delta={} T={} sign={} samples={} max_ratio={:.6e} mean_ratio={:.6e} theta_fit={}",
            self.lemma_id, p.k, p.l, p.epsilon, p.delta, p.t, p.sign, self.sample_count, self.max_ratio, self.mean_ratio, theta
        )
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "{CSV_HEADER}")?;
        for ((id, t), r) in self.sample_ids.iter().zip(&self.t_values).zip(&self.ratios) {
            writeln!(w, "{id},{t},{r:.16e}")?;
        }
        writeln!(w, "{}", self.summary())?;
        Ok(())
    }

    /// Largest ratio among samples taken at `t`.
    pub fn max_at(&self, t: f64) -> f64 {
        self.t_values
            .iter()
            .zip(&self.ratios)
            .filter(|(s, _)| **s == t)
            .map(|(_, r)| *r)
            .fold(0.0, f64::max)
    }
}

fn rows_for(
    lemmas: &[LemmaId],
    p: &BilinearParams,
    spec: &EnsembleSpec,
) -> Result<Vec<Vec<(u64, f64, f64)>>> {
    let per_member: Vec<Vec<f64>> = (0..spec.size as u64)
        .into_par_iter()
        .map(|id| {
            let s = member_spectra(spec, id, p)?;
            Ok(lemmas.iter().map(|l| s.ratio(*l, p)).collect())
        })
        .collect::<Result<_>>()?;
    Ok((0..lemmas.len())
        .map(|j| {
            per_member
                .iter()
                .enumerate()
                .map(|(id, r)| (id as u64, p.t, r[j]))
                .collect()
        })
        .collect())
}

fn check_lemmas(lemmas: &[LemmaId], p: &BilinearParams, spec: &EnsembleSpec) -> Result<()> {
    spec.validate()?;
    if p.axis >= spec.grid.dimension() {
        return Err(Error::InvalidArgument(format!(
            "derivative axis {} out of range",
            p.axis
        )));
    }
    if 4.0 * p.t > spec.n_time as f64 * spec.dt {
        return Err(Error::InvalidArgument(format!(
            "support |t| < {} does not fit the time extent {}",
            2.0 * p.t,
            spec.n_time as f64 * spec.dt
        )));
    }
    for &l in lemmas {
        check_admissible(l, p)?;
        if l.dimension() != spec.grid.dimension() {
            return Err(Error::Inadmissible {
                lemma: l.name().to_string(),
                constraint: format!(
                    "dimension {} required, got {}",
                    l.dimension(),
                    spec.grid.dimension()
                ),
            });
        }
    }
    Ok(())
}

/// Ratios of every lemma in `lemmas` over one ensemble at `p.t`; the pair
/// spectra are shared across lemmas.
pub fn ratio_ensemble(
    lemmas: &[LemmaId],
    p: &BilinearParams,
    spec: &EnsembleSpec,
) -> Result<Vec<EstimateReport>> {
    check_lemmas(lemmas, p, spec)?;
    rows_for(lemmas, p, spec)?
        .into_iter()
        .zip(lemmas)
        .map(|(rows, l)| EstimateReport::new(*l, *p, rows, None))
        .collect()
}

/// Least-squares slope of `log v` against `log t`.
pub fn fit_theta(t: &[f64], v: &[f64]) -> Result<f64> {
    if t.len() != v.len() || t.len() < 3 {
        return Err(Error::InvalidArgument(format!(
            "need at least 3 (T, ratio) points, got {}",
            t.len().min(v.len())
        )));
    }
    if t.iter().chain(v).any(|x| !(x.is_finite() && *x > 0.0)) {
        return Err(Error::InvalidArgument(
            "fit needs positive finite values".into(),
        ));
    }
    let x: Vec<f64> = t.iter().map(|a| a.ln()).collect();
    let y: Vec<f64> = v.iter().map(|a| a.ln()).collect();
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidArgument("T values must differ".into()));
    }
    let sxy: f64 = x.iter().zip(&y).map(|(a, b)| (a - mx) * (b - my)).sum();
    Ok(sxy / sxx)
}

/// One report per lemma with samples at every `T` and the fitted exponent
/// of the per-`T` maximum.
pub fn theta_scan_many(
    lemmas: &[LemmaId],
    p: &BilinearParams,
    t_list: &[f64],
    spec: &EnsembleSpec,
) -> Result<Vec<EstimateReport>> {
    if t_list.len() < 3 {
        return Err(Error::InvalidArgument(format!(
            "theta scan needs at least 3 T values, got {}",
            t_list.len()
        )));
    }
    if t_list.windows(2).any(|w| !(w[1] > w[0]))
        || !(t_list[0] > 0.0)
        || t_list[t_list.len() - 1] > 1.0
    {
        return Err(Error::InvalidArgument(
            "T values must increase within (0, 1]".into(),
        ));
    }
    let mut all: Vec<Vec<(u64, f64, f64)>> = vec![Vec::new(); lemmas.len()];
    for &t in t_list {
        let pt = BilinearParams { t, ..*p };
        check_lemmas(lemmas, &pt, spec)?;
        for (acc, rows) in all.iter_mut().zip(rows_for(lemmas, &pt, spec)?) {
            acc.extend(rows);
        }
    }
    all.into_iter()
        .zip(lemmas)
        .map(|(rows, l)| {
            let maxima: Vec<f64> = t_list
                .iter()
                .map(|&t| {
                    rows.iter()
                        .filter(|r| r.1 == t)
                        .map(|r| r.2)
                        .fold(0.0, f64::max)
                })
                .collect();
            let theta = fit_theta(t_list, &maxima)?;
            EstimateReport::new(*l, *p, rows, Some(theta))
        })
        .collect()
}

pub fn theta_scan(
    lemma: LemmaId,
    p: &BilinearParams,
    t_list: &[f64],
    spec: &EnsembleSpec,
) -> Result<EstimateReport> {
    Ok(theta_scan_many(&[lemma], p, t_list, spec)?.remove(0))
}
