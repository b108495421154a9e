use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{Geometry, GridSpec};
use crate::real::Real;

/// The pair `(φ, φ_t)` on the lattice at simulation time `t`.
///
/// `step` is the number of time steps taken; the driver keeps `t = step * dt`.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldState<T> {
    pub v1: Vec<T>,
    pub v2: Vec<T>,
    pub t: f64,
    pub step: u64,
}

impl<T: Real> FieldState<T> {
    pub fn zeros(grid: &GridSpec) -> Self {
        Self {
            v1: vec![T::zero(); grid.len()],
            v2: vec![T::zero(); grid.len()],
            t: 0.0,
            step: 0,
        }
    }

    pub fn check_extents(&self, grid: &GridSpec) -> Result<()> {
        for len in [self.v1.len(), self.v2.len()] {
            if len != grid.len() {
                return Err(Error::ExtentMismatch {
                    expected: grid.len(),
                    actual: len,
                });
            }
        }
        Ok(())
    }

    /// Pins boundary entries to zero: every face in 3D, only `r = 1` radially (`φ_t` too).
    pub fn zero_boundary(&mut self, grid: &GridSpec) {
        zero_boundary(&mut self.v1, grid);
        zero_boundary(&mut self.v2, grid);
    }
}

pub(crate) fn zero_boundary<T: Real>(a: &mut [T], grid: &GridSpec) {
    let n = grid.n();
    match grid.geometry() {
        Geometry::Radial1D => a[n] = T::zero(),
        Geometry::Cube3D => {
            let s = n + 1;
            let plane = s * s;
            a[..plane].fill(T::zero());
            a[n * plane..].fill(T::zero());
            for z in 1..n {
                let p = &mut a[z * plane..(z + 1) * plane];
                p[..s].fill(T::zero());
                p[n * s..].fill(T::zero());
                for y in 1..n {
                    p[y * s] = T::zero();
                    p[y * s + n] = T::zero();
                }
            }
        }
    }
}

/// Largest `|φ|` over all nodes. Fails on the first non-finite entry.
pub fn max_abs<T: Real>(state: &FieldState<T>) -> Result<f64> {
    max_abs_slice(&state.v1)
}

pub fn max_abs_slice<T: Real>(a: &[T]) -> Result<f64> {
    let chunk = chunk_len(a.len());
    let (m, bad) = a
        .par_chunks(chunk)
        .enumerate()
        .map(|(c, part)| {
            let mut m = 0.0f64;
            for (i, v) in part.iter().enumerate() {
                let v = v.as_f64();
                if !v.is_finite() {
                    return (m, Some(c * chunk + i));
                }
                m = m.max(v.abs());
            }
            (m, None)
        })
        .reduce(
            || (0.0, None),
            |a, b| {
                let bad = match (a.1, b.1) {
                    (Some(x), Some(y)) => Some(x.min(y)),
                    (x, y) => x.or(y),
                };
                (a.0.max(b.0), bad)
            },
        );
    match bad {
        Some(index) => Err(Error::NonFinite { index }),
        None => Ok(m),
    }
}

/// Fixed partition size for parallel reductions, chosen from the data length only.
pub(crate) fn chunk_len(len: usize) -> usize {
    (len / 64).max(4096).min(len.max(1))
}
