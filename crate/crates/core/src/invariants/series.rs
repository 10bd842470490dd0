use std::io::Write;

use super::quantities::{measure, InvariantSample};
use crate::dynamics::{Observer, State};
use crate::error::{Error, Result};

/// Time series of the invariants. `cubic` keeps the signed cubic term that
/// `Ẽ` needs; it is not part of the CSV.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct InvariantSeries {
    pub times: Vec<f64>,
    pub i1: Vec<f64>,
    pub i2: Vec<f64>,
    pub m: Vec<f64>,
    pub cubic: Vec<f64>,
}

pub const CSV_HEADER: &str = "t,I1,I2,m";

impl InvariantSeries {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn push(&mut self, s: InvariantSample) -> Result<()> {
        if let Some(&last) = self.times.last() {
            if s.t <= last {
                return Err(Error::InvalidArgument(format!(
                    "sample time {} does not follow {}",
                    s.t, last
                )));
            }
        }
        self.times.push(s.t);
        self.i1.push(s.i1);
        self.i2.push(s.i2);
        self.m.push(s.m);
        self.cubic.push(s.cubic);
        Ok(())
    }

    pub fn sample(&self, k: usize) -> InvariantSample {
        InvariantSample {
            t: self.times[k],
            i1: self.i1[k],
            i2: self.i2[k],
            m: self.m[k],
            cubic: self.cubic[k],
        }
    }

    /// `max_k |q_k − q_0| / |q_0|`.
    pub fn relative_drift(values: &[f64]) -> f64 {
        let Some(&first) = values.first() else {
            return 0.0;
        };
        let dev = values.iter().map(|v| (v - first).abs()).fold(0.0, f64::max);
        if first == 0.0 {
            dev
        } else {
            dev / first.abs()
        }
    }

    pub fn i1_drift(&self) -> f64 {
        Self::relative_drift(&self.i1)
    }

    pub fn i2_drift(&self) -> f64 {
        Self::relative_drift(&self.i2)
    }

    /// Header plus one row per sample, 17 significant digits.
    pub fn write_csv<W: Write>(&self, w: &mut W) -> Result<()> {
        writeln!(w, "{CSV_HEADER}")?;
        for k in 0..self.len() {
            writeln!(
                w,
                "{:.16e},{:.16e},{:.16e},{:.16e}",
                self.times[k], self.i1[k], self.i2[k], self.m[k]
            )?;
        }
        Ok(())
    }
}

/// Observer appending one [`InvariantSample`] per call.
#[derive(Debug, Default)]
pub struct InvariantRecorder {
    pub series: InvariantSeries,
}

impl Observer for InvariantRecorder {
    fn observe(&mut self, _step: u64, state: &State) -> Result<()> {
        self.series.push(measure(state)?)
    }
}
