//! Checkpoint files: a fixed header followed by three field snapshots
//! (`φ`, `χ₊`, `χ₋`).
//!
//! | bytes | content                                   |
//! |-------|-------------------------------------------|
//! | 4     | magic `MZCK`                              |
//! | 4     | version (u32, currently 1)                |
//! | 8     | t (f64)                                   |
//! | 8     | step index (u64)                          |
//! | 8     | config hash (u64)                         |
//! | 1     | geometry (2 or 3)                         |
//! | 24    | e (3 × f64, zero in 2D)                   |

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};

use super::integrate::Observer;
use super::state::{Geometry, State};
use crate::error::{Error, Result};
use crate::spectral::snapshot;

pub const CHECKPOINT_MAGIC: &[u8; 4] = b"MZCK";
pub const CHECKPOINT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint {
    pub step: u64,
    pub config_hash: u64,
    pub state: State,
}

pub fn write_checkpoint<W: Write>(w: &mut W, ck: &Checkpoint) -> Result<()> {
    w.write_all(CHECKPOINT_MAGIC)?;
    w.write_u32::<LittleEndian>(CHECKPOINT_VERSION)?;
    w.write_f64::<LittleEndian>(ck.state.t)?;
    w.write_u64::<LittleEndian>(ck.step)?;
    w.write_u64::<LittleEndian>(ck.config_hash)?;
    let geom = ck.state.geometry;
    w.write_u8(geom.dimension() as u8)?;
    for c in geom.e().unwrap_or([0.0; 3]) {
        w.write_f64::<LittleEndian>(c)?;
    }
    let [p, a, b] = ck.state.spectral_parts();
    snapshot::write_field(w, &p)?;
    snapshot::write_field(w, &a)?;
    snapshot::write_field(w, &b)?;
    Ok(())
}

pub fn read_checkpoint<R: Read>(r: &mut R) -> Result<Checkpoint> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != CHECKPOINT_MAGIC {
        return Err(Error::Format(format!("bad checkpoint magic {magic:?}")));
    }
    let version = r.read_u32::<LittleEndian>()?;
    if version != CHECKPOINT_VERSION {
        return Err(Error::Format(format!(
            "unsupported checkpoint version {version}"
        )));
    }
    let t = r.read_f64::<LittleEndian>()?;
    let step = r.read_u64::<LittleEndian>()?;
    let config_hash = r.read_u64::<LittleEndian>()?;
    let dim = r.read_u8()?;
    let mut e = [0.0; 3];
    for c in e.iter_mut() {
        *c = r.read_f64::<LittleEndian>()?;
    }
    let geometry = match dim {
        2 => Geometry::Dim2,
        3 => Geometry::Dim3 { e },
        other => return Err(Error::Format(format!("bad geometry tag {other}"))),
    };
    let phi = snapshot::read_field(r)?;
    let chi_plus = snapshot::read_field(r)?;
    let chi_minus = snapshot::read_field(r)?;
    phi.check_same_grid(&chi_plus)
        .and_then(|_| phi.check_same_grid(&chi_minus))
        .map_err(|_| Error::Format("checkpoint fields disagree on grid".into()))?;
    if phi.grid().dimension() != geometry.dimension() {
        return Err(Error::Format(
            "checkpoint geometry disagrees with grid".into(),
        ));
    }
    Ok(Checkpoint {
        step,
        config_hash,
        state: State {
            t,
            phi,
            chi_plus,
            chi_minus,
            geometry,
        },
    })
}

pub fn save(path: &Path, ck: &Checkpoint) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_checkpoint(&mut w, ck)?;
    w.flush()?;
    Ok(())
}

pub fn load(path: &Path) -> Result<Checkpoint> {
    read_checkpoint(&mut BufReader::new(File::open(path)?))
}

/// Observer writing `ckpt_<step>.bin` into a directory.
#[derive(Debug)]
pub struct Checkpointer {
    dir: PathBuf,
    config_hash: u64,
    pub written: Vec<PathBuf>,
}

impl Checkpointer {
    pub fn new(dir: impl Into<PathBuf>, config_hash: u64) -> Self {
        Self {
            dir: dir.into(),
            config_hash,
            written: Vec::new(),
        }
    }

    pub fn path_for(dir: &Path, step: u64) -> PathBuf {
        dir.join(format!("ckpt_{step:08}.bin"))
    }
}

impl Observer for Checkpointer {
    fn observe(&mut self, step: u64, state: &State) -> Result<()> {
        let path = Self::path_for(&self.dir, step);
        save(
            &path,
            &Checkpoint {
                step,
                config_hash: self.config_hash,
                state: state.clone(),
            },
        )?;
        self.written.push(path);
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{Field, Grid};
    use num_complex::Complex64;

    #[test]
    fn round_trip_is_exact() {
        let g = Grid::new(3, 8, 1.5).unwrap();
        let f = |s: f64| Field::from_fn(g, move |x| Complex64::new((x[0] * s).sin(), x[2] * s));
        let ck = Checkpoint {
            step: 42,
            config_hash: 0xdead_beef,
            state: State {
                t: 0.125,
                phi: f(1.0).into_spectral(),
                chi_plus: f(2.0).into_spectral(),
                chi_minus: f(3.0).into_spectral(),
                geometry: Geometry::Dim3 { e: [0.0, 0.6, 0.8] },
            },
        };
        let mut buf = Vec::new();
        write_checkpoint(&mut buf, &ck).unwrap();
        assert_eq!(
            buf.len(),
            4 + 4 + 8 + 8 + 8 + 1 + 24 + 3 * snapshot::snapshot_len(&g)
        );
        assert_eq!(read_checkpoint(&mut buf.as_slice()).unwrap(), ck);
        buf[0] = b'X';
        assert!(matches!(
            read_checkpoint(&mut buf.as_slice()),
            Err(Error::Format(_))
        ));
    }
}
