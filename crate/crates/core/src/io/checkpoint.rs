//! Binary checkpoint: fixed little-endian header, SHA-256 of the payload, then `v1` and `v2`.
//!
//! | offset | size | field |
//! |---|---|---|
//! | 0 | 8 | magic `HGSCKPT\0` |
//! | 8 | 4 | format version (u32) |
//! | 12 | 1 | geometry (0 cube, 1 radial) |
//! | 13 | 1 | precision (0 double, 1 single) |
//! | 14 | 2 | reserved, zero |
//! | 16 | 8 | N (u64) |
//! | 24 | 8 | L (f64) |
//! | 32 | 8 | t (f64) |
//! | 40 | 8 | step (u64) |
//! | 48 | 8 | payload length in bytes (u64) |
//! | 56 | 32 | SHA-256 of the payload |
//! | 88 | .. | payload |

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::field::FieldState;
use crate::grid::{Geometry, GridSpec};
use crate::real::{Precision, Real};

pub const MAGIC: &[u8; 8] = b"HGSCKPT\0";
pub const VERSION: u32 = 1;
pub const HEADER_LEN: usize = 88;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CheckpointHeader {
    pub version: u32,
    pub grid: GridSpec,
    pub precision: Precision,
    pub t: f64,
    pub step: u64,
    pub payload_len: u64,
    pub checksum: [u8; 32],
}

fn corrupt(field: &'static str, message: impl Into<String>) -> Error {
    Error::CorruptCheckpoint { field, message: message.into() }
}

pub fn save_checkpoint<T: Real>(state: &FieldState<T>, grid: &GridSpec, path: &Path) -> Result<()> {
    state.check_extents(grid)?;
    let width = T::PRECISION.byte_width();
    let mut payload = Vec::with_capacity(2 * grid.len() * width);
    for v in state.v1.iter().chain(&state.v2) {
        v.write_le(&mut payload);
    }
    let mut head = Vec::with_capacity(HEADER_LEN);
    head.extend_from_slice(MAGIC);
    head.extend_from_slice(&VERSION.to_le_bytes());
    head.push(match grid.geometry() {
        Geometry::Cube3D => 0,
        Geometry::Radial1D => 1,
    });
    head.push(match T::PRECISION {
        Precision::Double => 0,
        Precision::Single => 1,
    });
    head.extend_from_slice(&[0, 0]);
    head.extend_from_slice(&(grid.n() as u64).to_le_bytes());
    head.extend_from_slice(&grid.scale().to_le_bytes());
    head.extend_from_slice(&state.t.to_le_bytes());
    head.extend_from_slice(&state.step.to_le_bytes());
    head.extend_from_slice(&(payload.len() as u64).to_le_bytes());
    head.extend_from_slice(&Sha256::digest(&payload));
    debug_assert_eq!(head.len(), HEADER_LEN);
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let io = |e| Error::io(path, e);
    let mut f = File::create(path).map_err(io)?;
    f.write_all(&head).map_err(io)?;
    f.write_all(&payload).map_err(io)?;
    f.sync_all().map_err(io)
}

fn parse_header(h: &[u8]) -> Result<CheckpointHeader> {
    if h.len() < HEADER_LEN {
        return Err(corrupt("header", format!("{} bytes, expected {HEADER_LEN}", h.len())));
    }
    if &h[0..8] != MAGIC {
        return Err(corrupt("magic", "not a checkpoint file"));
    }
    let u64_at = |o: usize| u64::from_le_bytes(h[o..o + 8].try_into().unwrap());
    let f64_at = |o: usize| f64::from_le_bytes(h[o..o + 8].try_into().unwrap());
    let version = u32::from_le_bytes(h[8..12].try_into().unwrap());
    if version != VERSION {
        return Err(corrupt("version", format!("unsupported version {version}")));
    }
    let geometry = match h[12] {
        0 => Geometry::Cube3D,
        1 => Geometry::Radial1D,
        g => return Err(corrupt("geometry", format!("unknown code {g}"))),
    };
    let precision = match h[13] {
        0 => Precision::Double,
        1 => Precision::Single,
        p => return Err(corrupt("precision", format!("unknown code {p}"))),
    };
    let n = usize::try_from(u64_at(16)).map_err(|_| corrupt("n", "out of range"))?;
    let grid = GridSpec::new(n, f64_at(24), geometry).map_err(|e| corrupt("grid", e.to_string()))?;
    let t = f64_at(32);
    if !t.is_finite() {
        return Err(corrupt("t", "non-finite time"));
    }
    let payload_len = u64_at(48);
    let expected = 2 * grid.len() as u64 * precision.byte_width() as u64;
    if payload_len != expected {
        return Err(corrupt("payload_len", format!("{payload_len} bytes, expected {expected}")));
    }
    Ok(CheckpointHeader {
        version,
        grid,
        precision,
        t,
        step: u64_at(40),
        payload_len,
        checksum: h[56..88].try_into().unwrap(),
    })
}

/// Reads and validates only the header.
pub fn peek_checkpoint(path: &Path) -> Result<CheckpointHeader> {
    let mut f = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut h = Vec::with_capacity(HEADER_LEN);
    Read::take(&mut f, HEADER_LEN as u64).read_to_end(&mut h).map_err(|e| Error::io(path, e))?;
    parse_header(&h)
}

/// Loads a checkpoint written with the same precision as `T`; no silent widening.
pub fn load_checkpoint<T: Real>(path: &Path) -> Result<(FieldState<T>, GridSpec)> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    let head = parse_header(&bytes)?;
    if head.precision != T::PRECISION {
        return Err(Error::PrecisionMismatch {
            expected: T::PRECISION.name(),
            found: head.precision.name(),
        });
    }
    let payload = &bytes[HEADER_LEN..];
    if payload.len() as u64 != head.payload_len {
        return Err(corrupt(
            "payload",
            format!("{} bytes present, header declares {}", payload.len(), head.payload_len),
        ));
    }
    if Sha256::digest(payload).as_slice() != head.checksum {
        return Err(corrupt("checksum", "payload digest mismatch"));
    }
    let width = head.precision.byte_width();
    let len = head.grid.len();
    let mut vals = payload.chunks_exact(width).map(T::read_le);
    let v1: Vec<T> = vals.by_ref().take(len).collect();
    let v2: Vec<T> = vals.collect();
    Ok((FieldState { v1, v2, t: head.t, step: head.step }, head.grid))
}
