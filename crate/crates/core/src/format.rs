//! Versioned binary model file.
//!
//! Layout, all integers `u64` and all reals `f64`, little-endian:
//!
//! ```text
//! "LGPIF1"            6-byte magic
//! version             currently 1
//! d
//! lower[d]  spacing  counts[d]
//! sigma_se  lengthscales[d]  sigma_y  r  r_star
//! y_mean  n_measurements
//! n_iota   { index value }          sorted by index
//! n_imat   { i j value }            i <= j, sorted lexicographically
//! ```

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::grid::UniformGrid;
use crate::kernel::HyperParams;
use crate::trainer::{InformationState, InformationView};

pub const MAGIC: &[u8; 6] = b"LGPIF1";
pub const VERSION: u64 = 1;

// refuse absurd headers before allocating
const MAX_DIM: u64 = 64;

fn put_u64<W: Write>(w: &mut W, v: u64) -> Result<()> {
    w.write_all(&v.to_le_bytes())?;
    Ok(())
}

fn put_f64<W: Write>(w: &mut W, v: f64) -> Result<()> {
    w.write_all(&v.to_le_bytes())?;
    Ok(())
}

fn get_u64<R: Read>(r: &mut R) -> Result<u64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b).map_err(truncated)?;
    Ok(u64::from_le_bytes(b))
}

fn get_f64<R: Read>(r: &mut R) -> Result<f64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b).map_err(truncated)?;
    Ok(f64::from_le_bytes(b))
}

fn truncated(e: std::io::Error) -> Error {
    if e.kind() == std::io::ErrorKind::UnexpectedEof {
        Error::Format("file is truncated".into())
    } else {
        Error::Io(e)
    }
}

pub fn write_state<W: Write>(w: &mut W, state: &InformationState) -> Result<()> {
    let grid = state.grid();
    let hp = state.hyper();
    w.write_all(MAGIC)?;
    put_u64(w, VERSION)?;
    put_u64(w, grid.dim() as u64)?;
    for &v in grid.lower() {
        put_f64(w, v)?;
    }
    put_f64(w, grid.spacing())?;
    for &c in grid.counts() {
        put_u64(w, c as u64)?;
    }
    put_f64(w, hp.sigma_se())?;
    for &l in hp.lengthscales() {
        put_f64(w, l)?;
    }
    put_f64(w, hp.sigma_y())?;
    put_f64(w, hp.r())?;
    put_f64(w, hp.r_star())?;
    put_f64(w, state.y_mean())?;
    put_u64(w, state.n_measurements())?;

    let iota = state.iota_entries();
    put_u64(w, iota.len() as u64)?;
    for (j, v) in iota {
        put_u64(w, j as u64)?;
        put_f64(w, v)?;
    }
    let imat = state.imat_entries();
    put_u64(w, imat.len() as u64)?;
    for (i, j, v) in imat {
        put_u64(w, i as u64)?;
        put_u64(w, j as u64)?;
        put_f64(w, v)?;
    }
    Ok(())
}

pub fn read_state<R: Read>(r: &mut R) -> Result<InformationState> {
    let mut magic = [0u8; 6];
    r.read_exact(&mut magic).map_err(truncated)?;
    if &magic != MAGIC {
        return Err(Error::Format("not an LGPIF1 model file".into()));
    }
    let version = get_u64(r)?;
    if version != VERSION {
        return Err(Error::Format(format!("unsupported format version {version}")));
    }
    let d = get_u64(r)?;
    if d == 0 || d > MAX_DIM {
        return Err(Error::Format(format!("implausible dimension {d}")));
    }
    let d = d as usize;
    let lower = (0..d).map(|_| get_f64(r)).collect::<Result<Vec<_>>>()?;
    let spacing = get_f64(r)?;
    let counts = (0..d).map(|_| get_u64(r).map(|c| c as usize)).collect::<Result<Vec<_>>>()?;
    let grid = UniformGrid::new(lower, spacing, counts).map_err(|e| Error::Format(e.to_string()))?;

    let sigma_se = get_f64(r)?;
    let lengthscales = (0..d).map(|_| get_f64(r)).collect::<Result<Vec<_>>>()?;
    let sigma_y = get_f64(r)?;
    let radius = get_f64(r)?;
    let r_star = get_f64(r)?;
    let hp = HyperParams::new_general(sigma_se, lengthscales, sigma_y, radius, r_star)
        .map_err(|e| Error::Format(e.to_string()))?;
    let y_mean = get_f64(r)?;
    let n_measurements = get_u64(r)?;

    let n_iota = get_u64(r)?;
    if n_iota > grid.len() as u64 {
        return Err(Error::Format(format!("{n_iota} information-vector entries for {} centers", grid.len())));
    }
    let mut iota = Vec::with_capacity(n_iota as usize);
    let mut prev = None;
    for _ in 0..n_iota {
        let j = get_u64(r)? as usize;
        if prev.is_some_and(|p| j <= p) {
            return Err(Error::Format("information-vector entries are not strictly sorted".into()));
        }
        prev = Some(j);
        iota.push((j, get_f64(r)?));
    }

    let n_imat = get_u64(r)?;
    let mut imat = Vec::with_capacity(n_imat.min(1 << 24) as usize);
    let mut prev = None;
    for _ in 0..n_imat {
        let i = get_u64(r)? as usize;
        let j = get_u64(r)? as usize;
        if prev.is_some_and(|p| (i, j) <= p) {
            return Err(Error::Format("information-matrix entries are not strictly sorted".into()));
        }
        prev = Some((i, j));
        imat.push((i, j, get_f64(r)?));
    }
    let mut trailing = [0u8; 1];
    if r.read(&mut trailing)? != 0 {
        return Err(Error::Format("trailing bytes after information matrix".into()));
    }
    InformationState::from_parts(grid, hp, y_mean, n_measurements, &iota, &imat)
}

pub fn save(path: impl AsRef<Path>, state: &InformationState) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_state(&mut w, state)?;
    w.flush()?;
    Ok(())
}

pub fn load(path: impl AsRef<Path>) -> Result<InformationState> {
    read_state(&mut BufReader::new(File::open(path)?))
}
