//! Fourth-order finite-difference spatial operators.
//!
//! Reads outside the lattice are zero-extended in 3D and near `r = 1`; at `r = 0`
//! the radial operator uses the even reflection `φ(-r) = φ(r)`.

use rayon::prelude::*;

use crate::error::Result;
use crate::grid::{Geometry, GridSpec};
use crate::initial::{bump_eval, BumpSpec};
use crate::real::Real;

/// Weights of the 4th-order central second-difference stencil (before the `1/δx²` scale).
pub struct StencilCoefficients;

impl StencilCoefficients {
    pub const SECOND: [f64; 5] = [-1.0 / 12.0, 4.0 / 3.0, -5.0 / 2.0, 4.0 / 3.0, -1.0 / 12.0];
    /// Symmetric one-sided form of `SECOND` at `r = 0` (uses `φ(0), φ(δr), φ(2δr)`).
    pub const ORIGIN: [f64; 3] = [-5.0 / 2.0, 8.0 / 3.0, -1.0 / 6.0];
    /// 4th-order central first difference (before the `1/δx` scale).
    pub const FIRST: [f64; 5] = [1.0 / 12.0, -2.0 / 3.0, 0.0, 2.0 / 3.0, -1.0 / 12.0];
}

/// Pre-scaled 3D weights: center (all three axes combined), distance-1 and distance-2.
#[derive(Debug, Clone, Copy)]
pub(crate) struct CubeWeights<T> {
    pub center: T,
    pub near: T,
    pub far: T,
}

impl<T: Real> CubeWeights<T> {
    pub fn new(grid: &GridSpec, factor: f64) -> Self {
        let s = factor / (grid.spacing() * grid.spacing());
        Self {
            center: T::from_f64(3.0 * StencilCoefficients::SECOND[2] * s),
            near: T::from_f64(StencilCoefficients::SECOND[1] * s),
            far: T::from_f64(StencilCoefficients::SECOND[0] * s),
        }
    }
}

/// Writes `factor * Δ` of row `(y, z)` into `out` (length `n+1`, ends set to 0).
///
/// `zeros` must be an all-zero row of length `n+1`; it stands in for rows beyond the lattice.
pub(crate) fn laplacian_row<T: Real>(
    input: &[T],
    grid: &GridSpec,
    y: usize,
    z: usize,
    w: CubeWeights<T>,
    zeros: &[T],
    out: &mut [T],
) {
    let n = grid.n();
    let s = n + 1;
    out[0] = T::zero();
    out[n] = T::zero();
    if y == 0 || z == 0 || y == n || z == n {
        out.fill(T::zero());
        return;
    }
    let row = |yy: usize, zz: usize| -> &[T] {
        let start = grid.index(0, yy, zz);
        &input[start..start + s]
    };
    let c = row(y, z);
    let ym1 = row(y - 1, z);
    let yp1 = row(y + 1, z);
    let zm1 = row(y, z - 1);
    let zp1 = row(y, z + 1);
    let ym2 = if y >= 2 { row(y - 2, z) } else { zeros };
    let yp2 = if y + 2 <= n { row(y + 2, z) } else { zeros };
    let zm2 = if z >= 2 { row(y, z - 2) } else { zeros };
    let zp2 = if z + 2 <= n { row(y, z + 2) } else { zeros };

    row_kernel(c, [ym1, yp1, zm1, zp1], [ym2, yp2, zm2, zp2], w, out);
}

/// Interior of one output row: `c` is the center row, `near`/`far` the four transverse
/// neighbour rows at distance 1 and 2. Writes `out[1..n]`; `out[0]`, `out[n]` are untouched.
#[inline]
pub(crate) fn row_kernel<T: Real>(c: &[T], near: [&[T]; 4], far: [&[T]; 4], w: CubeWeights<T>, out: &mut [T]) {
    let n = c.len() - 1;
    let point = |x: usize, xm2: T, xp2: T| -> T {
        let nb = c[x - 1] + c[x + 1] + near[0][x] + near[1][x] + near[2][x] + near[3][x];
        let fb = xm2 + xp2 + far[0][x] + far[1][x] + far[2][x] + far[3][x];
        w.center * c[x] + w.near * nb + w.far * fb
    };
    out[1] = point(1, T::zero(), c[3]);
    out[n - 1] = point(n - 1, c[n - 3], T::zero());
    // x in 2..n-1, every operand sliced to the same length so the loop vectorizes
    let m = n - 3;
    let (cm2, cm1, c0, cp1, cp2) = (&c[0..m], &c[1..1 + m], &c[2..2 + m], &c[3..3 + m], &c[4..4 + m]);
    let (a0, a1, a2, a3) = (&near[0][2..2 + m], &near[1][2..2 + m], &near[2][2..2 + m], &near[3][2..2 + m]);
    let (b0, b1, b2, b3) = (&far[0][2..2 + m], &far[1][2..2 + m], &far[2][2..2 + m], &far[3][2..2 + m]);
    let o = &mut out[2..2 + m];
    for i in 0..m {
        let nb = cm1[i] + cp1[i] + a0[i] + a1[i] + a2[i] + a3[i];
        let fb = cm2[i] + cp2[i] + b0[i] + b1[i] + b2[i] + b3[i];
        o[i] = w.center * c0[i] + w.near * nb + w.far * fb;
    }
}

/// 4th-order 3D Laplacian with zero-extension; boundary entries of the result are 0.
pub fn laplacian_3d<T: Real>(field: &[T], grid: &GridSpec) -> Result<Vec<T>> {
    grid.require(Geometry::Cube3D)?;
    let mut out = vec![T::zero(); grid.len()];
    laplacian_3d_into(field, grid, 1.0, &mut out);
    Ok(out)
}

pub(crate) fn laplacian_3d_into<T: Real>(field: &[T], grid: &GridSpec, factor: f64, out: &mut [T]) {
    let s = grid.points_per_axis();
    let w = CubeWeights::new(grid, factor);
    let zeros = vec![T::zero(); s];
    out.par_chunks_mut(s * s).enumerate().for_each(|(z, plane)| {
        for (y, orow) in plane.chunks_mut(s).enumerate() {
            laplacian_row(field, grid, y, z, w, &zeros, orow);
        }
    });
}

/// Radial operator `φ_rr + (2/r) φ_r`, equal to `3 φ_rr(0)` at the origin.
pub fn radial_operator<T: Real>(field: &[T], grid: &GridSpec) -> Result<Vec<T>> {
    grid.require(Geometry::Radial1D)?;
    let mut out = vec![T::zero(); grid.len()];
    radial_operator_into(field, grid, 1.0, &mut out);
    Ok(out)
}

pub(crate) fn radial_operator_into<T: Real>(field: &[T], grid: &GridSpec, factor: f64, out: &mut [T]) {
    let n = grid.n();
    let h = grid.spacing();
    let second = |k: usize| T::from_f64(StencilCoefficients::SECOND[k] * factor / (h * h));
    let first = |k: usize| T::from_f64(StencilCoefficients::FIRST[k] * factor / h);
    let (s0, s1, s2) = (second(2), second(1), second(0));
    let (f1, f2) = (first(3), first(4));
    // φ(j) for j in -2..=n+2 with even reflection at 0 and zero-extension past n
    let at = |j: isize| -> T {
        let j = j.unsigned_abs();
        if j <= n {
            field[j]
        } else {
            T::zero()
        }
    };
    let o = StencilCoefficients::ORIGIN;
    let three = T::from_f64(3.0 * factor / (h * h));
    out[0] = three
        * (T::from_f64(o[0]) * field[0] + T::from_f64(o[1]) * field[1] + T::from_f64(o[2]) * field[2]);
    for j in 1..n {
        let ji = j as isize;
        let (m2, m1, c, p1, p2) = (at(ji - 2), at(ji - 1), field[j], at(ji + 1), at(ji + 2));
        let rr = s0 * c + s1 * (m1 + p1) + s2 * (m2 + p2);
        let r = f1 * (p1 - m1) + f2 * (p2 - m2);
        let two_over_r = T::from_f64(2.0 / grid.coord(j));
        out[j] = rr + two_over_r * r;
    }
    out[n] = T::zero();
}

/// Applies the geometry-appropriate operator scaled by `factor`.
pub(crate) fn apply_operator_into<T: Real>(field: &[T], grid: &GridSpec, factor: f64, out: &mut [T]) {
    match grid.geometry() {
        Geometry::Cube3D => laplacian_3d_into(field, grid, factor, out),
        Geometry::Radial1D => radial_operator_into(field, grid, factor, out),
    }
}

pub fn apply_operator<T: Real>(field: &[T], grid: &GridSpec) -> Vec<T> {
    let mut out = vec![T::zero(); grid.len()];
    apply_operator_into(field, grid, 1.0, &mut out);
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct CrosscheckReport {
    /// `max_j |Δ_3d φ(j, N/2, N/2) - Δ_r φ(j - N/2)|` over `j = N/2..=N`.
    pub max_discrepancy: f64,
    pub samples: usize,
}

/// Compares the 3D Laplacian of a centered bump along the mid-line with the radial operator.
pub fn operator_crosscheck(
    bump: &BumpSpec,
    grid3d: &GridSpec,
    grid1d: &GridSpec,
) -> Result<CrosscheckReport> {
    grid3d.require(Geometry::Cube3D)?;
    grid1d.require(Geometry::Radial1D)?;
    let n = grid3d.n();
    if n % 2 != 0 || (grid1d.spacing() - grid3d.spacing()).abs() > 1e-15 {
        return Err(crate::error::Error::InvalidGrid(
            "crosscheck needs an even cube resolution and matching spacing".into(),
        ));
    }
    let half = n / 2;
    let s = grid3d.points_per_axis();
    let mut cube = vec![0.0f64; grid3d.len()];
    cube.par_chunks_mut(s * s).enumerate().for_each(|(z, plane)| {
        for (y, row) in plane.chunks_mut(s).enumerate() {
            for (x, v) in row.iter_mut().enumerate() {
                *v = bump_eval([grid3d.coord(x), grid3d.coord(y), grid3d.coord(z)], bump);
            }
        }
    });
    let radial_bump = BumpSpec {
        center: [0.0; 3],
        ..*bump
    };
    let line: Vec<f64> = (0..grid1d.points_per_axis())
        .map(|j| bump_eval([grid1d.coord(j), 0.0, 0.0], &radial_bump))
        .collect();
    let lap3 = laplacian_3d(&cube, grid3d)?;
    let lap1 = radial_operator(&line, grid1d)?;
    let mut max_discrepancy = 0.0f64;
    let mut samples = 0;
    for j in half..=n {
        let r = j - half;
        if r > grid1d.n() {
            break;
        }
        let d = (lap3[grid3d.index(j, half, half)] - lap1[r]).abs();
        max_discrepancy = max_discrepancy.max(d);
        samples += 1;
    }
    Ok(CrosscheckReport {
        max_discrepancy,
        samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_to_zero_and_recover_second_moment() {
        let w = StencilCoefficients::SECOND;
        assert_eq!(w.iter().sum::<f64>().abs() < 1e-15, true);
        let m2: f64 = w.iter().enumerate().map(|(k, c)| c * ((k as f64 - 2.0).powi(2))).sum();
        assert!((m2 - 2.0).abs() < 1e-14);
        let o = StencilCoefficients::ORIGIN;
        assert!(o.iter().sum::<f64>().abs() < 1e-15);
    }

    #[test]
    fn geometry_is_checked() {
        let cube = GridSpec::cube(10, 1.0).unwrap();
        let rad = GridSpec::radial(10, 1.0).unwrap();
        assert!(laplacian_3d(&vec![0.0; rad.len()], &rad).is_err());
        assert!(radial_operator(&vec![0.0; cube.len()], &cube).is_err());
    }

    #[test]
    fn zero_field_gives_zero() {
        let g = GridSpec::cube(12, 1.0).unwrap();
        let out = laplacian_3d(&vec![0.0f64; g.len()], &g).unwrap();
        assert!(out.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn origin_of_constant_data_is_zero() {
        let g = GridSpec::radial(16, 1.0).unwrap();
        let mut f = vec![1.0f64; g.len()];
        f[16] = 0.0;
        let out = radial_operator(&f, &g).unwrap();
        assert!(out[0].abs() < 1e-9, "{}", out[0]);
    }

    #[test]
    fn radial_quadratic_is_exact() {
        let g = GridSpec::radial(32, 1.0).unwrap();
        let f: Vec<f64> = (0..=32).map(|j| g.coord(j).powi(2)).collect();
        let out = radial_operator(&f, &g).unwrap();
        for (j, v) in out.iter().enumerate().take(31) {
            assert!((v - 6.0).abs() < 1e-9, "j={j} {v}");
        }
    }

    #[test]
    fn isolated_node_center_weight() {
        let g = GridSpec::cube(10, 1.0).unwrap();
        let mut f = vec![0.0f64; g.len()];
        let i = g.index(5, 5, 5);
        f[i] = 1.0;
        let out = laplacian_3d(&f, &g).unwrap();
        assert!((out[i] + 7.5 * 100.0).abs() < 1e-10);
        assert!((out[g.index(6, 5, 5)] - 4.0 / 3.0 * 100.0).abs() < 1e-10);
        assert!((out[g.index(5, 3, 5)] + 100.0 / 12.0).abs() < 1e-10);
    }
}
