//! Binary field snapshots.
//!
//! Layout (all little-endian):
//!
//! | bytes | content                                  |
//! |-------|------------------------------------------|
//! | 4     | magic `MZAK`                             |
//! | 4     | format version (u32, currently 1)        |
//! | 4     | dimension (u32)                          |
//! | 4     | points per axis N (u32)                  |
//! | 8     | period L (f64)                           |
//! | 1     | representation (0 physical, 1 spectral)  |
//! | 16·Nᵈ | interleaved (re, im) f64, row-major      |

use std::io::{Read, Write};

use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};
use num_complex::Complex64;

use super::field::{Field, Representation};
use super::grid::Grid;
use crate::error::{Error, Result};

pub const SNAPSHOT_MAGIC: &[u8; 4] = b"MZAK";
pub const SNAPSHOT_VERSION: u32 = 1;

pub fn write_field<W: Write>(w: &mut W, field: &Field) -> Result<()> {
    let g = field.grid();
    w.write_all(SNAPSHOT_MAGIC)?;
    w.write_u32::<LittleEndian>(SNAPSHOT_VERSION)?;
    w.write_u32::<LittleEndian>(g.dimension() as u32)?;
    w.write_u32::<LittleEndian>(g.points_per_axis() as u32)?;
    w.write_f64::<LittleEndian>(g.period())?;
    w.write_u8(field.representation().tag())?;
    for v in field.values() {
        w.write_f64::<LittleEndian>(v.re)?;
        w.write_f64::<LittleEndian>(v.im)?;
    }
    Ok(())
}

pub fn read_field<R: Read>(r: &mut R) -> Result<Field> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != SNAPSHOT_MAGIC {
        return Err(Error::Format(format!("bad magic {magic:?}")));
    }
    let version = r.read_u32::<LittleEndian>()?;
    if version != SNAPSHOT_VERSION {
        return Err(Error::Format(format!("unsupported version {version}")));
    }
    let dimension = r.read_u32::<LittleEndian>()? as usize;
    let n = r.read_u32::<LittleEndian>()? as usize;
    let period = r.read_f64::<LittleEndian>()?;
    let grid = Grid::new(dimension, n, period).map_err(|e| Error::Format(e.to_string()))?;
    let tag = r.read_u8()?;
    let repr = Representation::from_tag(tag)
        .ok_or_else(|| Error::Format(format!("unknown representation tag {tag}")))?;
    let mut values = Vec::with_capacity(grid.len());
    for _ in 0..grid.len() {
        let re = r.read_f64::<LittleEndian>()?;
        let im = r.read_f64::<LittleEndian>()?;
        values.push(Complex64::new(re, im));
    }
    Field::from_values(grid, repr, values)
}

/// Serialized size of a snapshot of `grid` in bytes.
pub fn snapshot_len(grid: &Grid) -> usize {
    4 + 4 + 4 + 4 + 8 + 1 + 16 * grid.len()
}
