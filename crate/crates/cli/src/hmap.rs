//! `HMAP` square matrix files.
//!
//! Layout: the ASCII magic `HMAP`, a version byte `0x01`, the dimension as a
//! little-endian `u32`, then `dim * dim` little-endian `f64` values row by row.

use std::fs;
use std::io::{self, Read, Write};
use std::path::Path;

use thiserror::Error;
use vrptw_cg_core::heatmap::{HeatError, ProbMatrix};
use vrptw_cg_core::Matrix;

pub const MAGIC: [u8; 4] = *b"HMAP";
pub const VERSION: u8 = 1;
const HEADER: usize = 9;

#[derive(Debug, Error)]
pub enum HmapError {
    #[error("io: {0}")]
    Io(#[from] io::Error),
    #[error("bad magic bytes {0:?}")]
    Magic([u8; 4]),
    #[error("unsupported version {0}")]
    Version(u8),
    #[error("expected {expected} bytes, found {found}")]
    Size { expected: usize, found: usize },
    #[error("matrix dimension {found} does not match the instance ({expected})")]
    Dimension { expected: usize, found: usize },
    #[error("entry ({row}, {col}) is not finite")]
    NotFinite { row: usize, col: usize },
    #[error(transparent)]
    Heat(#[from] HeatError),
}

pub fn encode(matrix: &Matrix<f64>) -> Vec<u8> {
    let dim = matrix.dim();
    let mut out = Vec::with_capacity(HEADER + 8 * dim * dim);
    out.extend_from_slice(&MAGIC);
    out.push(VERSION);
    out.extend_from_slice(&(dim as u32).to_le_bytes());
    for v in matrix.as_slice() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

/// Parses a whole file. Values are returned as stored, NaN included.
pub fn decode(bytes: &[u8]) -> Result<Matrix<f64>, HmapError> {
    if bytes.len() < HEADER {
        return Err(HmapError::Size {
            expected: HEADER,
            found: bytes.len(),
        });
    }
    let magic: [u8; 4] = bytes[..4].try_into().expect("four bytes");
    if magic != MAGIC {
        return Err(HmapError::Magic(magic));
    }
    if bytes[4] != VERSION {
        return Err(HmapError::Version(bytes[4]));
    }
    let dim = u32::from_le_bytes(bytes[5..9].try_into().expect("four bytes")) as usize;
    let expected = dim
        .checked_mul(dim)
        .and_then(|c| c.checked_mul(8))
        .and_then(|c| c.checked_add(HEADER))
        .unwrap_or(usize::MAX);
    if bytes.len() != expected {
        return Err(HmapError::Size {
            expected,
            found: bytes.len(),
        });
    }
    let data = bytes[HEADER..]
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("eight bytes")))
        .collect();
    Ok(Matrix::from_vec(dim, data).expect("length checked"))
}

pub fn write<W: Write>(mut out: W, matrix: &Matrix<f64>) -> io::Result<()> {
    out.write_all(&encode(matrix))
}

pub fn read<R: Read>(mut input: R) -> Result<Matrix<f64>, HmapError> {
    let mut bytes = Vec::new();
    input.read_to_end(&mut bytes)?;
    decode(&bytes)
}

pub fn save(path: &Path, matrix: &Matrix<f64>) -> Result<(), HmapError> {
    fs::write(path, encode(matrix))?;
    Ok(())
}

pub fn load(path: &Path) -> Result<Matrix<f64>, HmapError> {
    decode(&fs::read(path)?)
}

/// Checks a decoded matrix against the instance size and turns it into a
/// probability matrix. Rows off by at most
/// [`RENORMALIZE_TOLERANCE`](vrptw_cg_core::heatmap::RENORMALIZE_TOLERANCE)
/// are rescaled; anything further off is rejected.
pub fn to_prob(matrix: Matrix<f64>, expected_dim: usize) -> Result<ProbMatrix, HmapError> {
    if matrix.dim() != expected_dim {
        return Err(HmapError::Dimension {
            expected: expected_dim,
            found: matrix.dim(),
        });
    }
    if let Some(k) = matrix.as_slice().iter().position(|v| !v.is_finite()) {
        return Err(HmapError::NotFinite {
            row: k / expected_dim,
            col: k % expected_dim,
        });
    }
    Ok(ProbMatrix::renormalized(matrix)?)
}

/// Loads a probability matrix for an instance with `expected_dim` nodes.
pub fn load_t(path: &Path, expected_dim: usize) -> Result<ProbMatrix, HmapError> {
    to_prob(load(path)?, expected_dim)
}
