//! `RWV1` binary field snapshots.
//!
//! Layout: magic `RWV1`, then little-endian `u32` version, `M`, `R`, then `M³`
//! pairs of little-endian `f64` (re, im) in storage order.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use num_complex::Complex64;

use super::{GridSpec, SpectralError, SpectralField};

pub const SNAPSHOT_MAGIC: &[u8; 4] = b"RWV1";
const VERSION: u32 = 1;

pub fn write_snapshot(field: &SpectralField, mut w: impl Write) -> Result<(), SpectralError> {
    let grid = field.grid();
    w.write_all(SNAPSHOT_MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    w.write_all(&(grid.points() as u32).to_le_bytes())?;
    w.write_all(&(grid.oversampling() as u32).to_le_bytes())?;
    let mut buf = Vec::with_capacity(16 * field.coefficients().len());
    for c in field.coefficients() {
        buf.extend_from_slice(&c.re.to_le_bytes());
        buf.extend_from_slice(&c.im.to_le_bytes());
    }
    w.write_all(&buf)?;
    Ok(())
}

fn read_u32(r: &mut impl Read) -> Result<u32, SpectralError> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

/// Reads a snapshot; the dealias fraction is not stored and takes the default.
pub fn read_snapshot(mut r: impl Read) -> Result<SpectralField, SpectralError> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != SNAPSHOT_MAGIC {
        return Err(SpectralError::Snapshot(format!("bad magic {magic:?}")));
    }
    let version = read_u32(&mut r)?;
    if version != VERSION {
        return Err(SpectralError::Snapshot(format!("unsupported version {version}")));
    }
    let m = read_u32(&mut r)? as usize;
    let rr = read_u32(&mut r)? as usize;
    let grid = GridSpec::new(m, rr)?;
    let mut bytes = vec![0u8; 16 * grid.len()];
    r.read_exact(&mut bytes)?;
    let coefficients = bytes
        .chunks_exact(16)
        .map(|ch| {
            let re = f64::from_le_bytes(ch[..8].try_into().unwrap());
            let im = f64::from_le_bytes(ch[8..].try_into().unwrap());
            Complex64::new(re, im)
        })
        .collect();
    SpectralField::from_coefficients(grid, coefficients)
}

pub fn save_snapshot(field: &SpectralField, path: impl AsRef<Path>) -> Result<(), SpectralError> {
    let mut w = BufWriter::new(File::create(path)?);
    write_snapshot(field, &mut w)?;
    w.flush()?;
    Ok(())
}

pub fn load_snapshot(path: impl AsRef<Path>) -> Result<SpectralField, SpectralError> {
    read_snapshot(BufReader::new(File::open(path)?))
}
