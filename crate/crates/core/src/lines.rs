//! One-dimensional cuts through the lattice and grid-to-grid comparison.

use serde::{Deserialize, Serialize};

use crate::driver::RunResult;
use crate::error::{Error, Result};
use crate::field::FieldState;
use crate::grid::{Geometry, GridSpec};
use crate::real::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LineKind {
    /// `v1[j, N/2, N/2]`, `j = 0..=N`.
    MidlineX,
    /// Corner to corner, `round(N√3) + 1` equally spaced samples.
    MainDiagonal,
}

impl LineKind {
    pub fn name(self) -> &'static str {
        match self {
            LineKind::MidlineX => "midline_x",
            LineKind::MainDiagonal => "main_diagonal",
        }
    }
}

/// Samples at equally spaced arc parameters starting from 0.
#[derive(Debug, Clone, PartialEq)]
pub struct LineSeries {
    pub arc: Vec<f64>,
    pub phi: Vec<f64>,
}

impl LineSeries {
    pub fn len(&self) -> usize {
        self.phi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phi.is_empty()
    }

    fn spacing(&self) -> f64 {
        self.arc[1] - self.arc[0]
    }
}

pub fn extract_line<T: Real>(state: &FieldState<T>, grid: &GridSpec, which: LineKind) -> Result<LineSeries> {
    grid.require(Geometry::Cube3D)?;
    state.check_extents(grid)?;
    let n = grid.n();
    match which {
        LineKind::MidlineX => {
            let h = n / 2;
            Ok(LineSeries {
                arc: (0..=n).map(|j| grid.coord(j)).collect(),
                phi: (0..=n).map(|j| state.v1[grid.index(j, h, h)].as_f64()).collect(),
            })
        }
        LineKind::MainDiagonal => {
            let len = 3f64.sqrt();
            let m = (n as f64 * len).round() as usize + 1;
            let mut arc = Vec::with_capacity(m);
            let mut phi = Vec::with_capacity(m);
            for k in 0..m {
                let s = len * k as f64 / (m - 1) as f64;
                let u = (k as f64 / (m - 1) as f64) * n as f64;
                arc.push(s);
                phi.push(trilinear(&state.v1, grid, [u, u, u]));
            }
            Ok(LineSeries { arc, phi })
        }
    }
}

/// The radial profile `v1[j]` against `r_j`.
pub fn radial_profile<T: Real>(state: &FieldState<T>, grid: &GridSpec) -> Result<LineSeries> {
    grid.require(Geometry::Radial1D)?;
    state.check_extents(grid)?;
    Ok(LineSeries {
        arc: (0..=grid.n()).map(|j| grid.coord(j)).collect(),
        phi: state.v1.iter().map(|v| v.as_f64()).collect(),
    })
}

/// Trilinear interpolation at lattice coordinates `u` (units of cells).
fn trilinear<T: Real>(a: &[T], grid: &GridSpec, u: [f64; 3]) -> f64 {
    let n = grid.n();
    let mut i = [0usize; 3];
    let mut f = [0f64; 3];
    for d in 0..3 {
        let c = u[d].clamp(0.0, n as f64);
        let k = (c.floor() as usize).min(n - 1);
        i[d] = k;
        f[d] = c - k as f64;
    }
    let mut acc = 0.0;
    for dz in 0..2 {
        for dy in 0..2 {
            for dx in 0..2 {
                let w = (if dx == 1 { f[0] } else { 1.0 - f[0] })
                    * (if dy == 1 { f[1] } else { 1.0 - f[1] })
                    * (if dz == 1 { f[2] } else { 1.0 - f[2] });
                if w != 0.0 {
                    acc += w * a[grid.index(i[0] + dx, i[1] + dy, i[2] + dz)].as_f64();
                }
            }
        }
    }
    acc
}

/// Cubic Lagrange interpolation of a uniform series at arc parameter `s`.
pub fn interpolate(series: &LineSeries, s: f64) -> f64 {
    let m = series.len();
    if m < 4 {
        return series.phi[0];
    }
    let h = series.spacing();
    let u = (s - series.arc[0]) / h;
    let k = u.round();
    if (u - k).abs() < 1e-9 && k >= 0.0 && (k as usize) < m {
        return series.phi[k as usize];
    }
    let base = (u.floor() as isize - 1).clamp(0, m as isize - 4) as usize;
    let mut acc = 0.0;
    for a in 0..4 {
        let mut w = 1.0;
        for b in 0..4 {
            if a != b {
                w *= (u - (base + b) as f64) / (a as f64 - b as f64);
            }
        }
        acc += w * series.phi[base + a];
    }
    acc
}

/// Pointwise `coarse − fine` at the coarse parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct DifferenceSeries {
    pub arc: Vec<f64>,
    pub diff: Vec<f64>,
    /// Fine values interpolated onto the coarse parameters.
    pub reference: Vec<f64>,
    pub max_norm: f64,
    pub argmax: usize,
}

pub fn compare_lines(coarse: &LineSeries, fine: &LineSeries) -> Result<DifferenceSeries> {
    let end_c = *coarse.arc.last().ok_or(Error::IncompatibleRuns("empty line".into()))?;
    let end_f = *fine.arc.last().ok_or(Error::IncompatibleRuns("empty line".into()))?;
    if (end_c - end_f).abs() > 1e-12 || coarse.len() < 2 || fine.len() < 4 {
        return Err(Error::IncompatibleRuns("lines span different parameter ranges".into()));
    }
    let reference: Vec<f64> = coarse.arc.iter().map(|&s| interpolate(fine, s)).collect();
    let diff: Vec<f64> = coarse.phi.iter().zip(&reference).map(|(c, f)| c - f).collect();
    let (argmax, max_norm) = diff
        .iter()
        .map(|d| d.abs())
        .enumerate()
        .fold((0, 0.0), |(bi, bv), (i, v)| if v > bv { (i, v) } else { (bi, bv) });
    Ok(DifferenceSeries {
        arc: coarse.arc.clone(),
        diff,
        reference,
        max_norm,
        argmax,
    })
}

/// Compares the final states of two cube runs of the same experiment along a line.
pub fn compare_grids<T: Real>(coarse: &RunResult<T>, fine: &RunResult<T>, which: LineKind) -> Result<DifferenceSeries> {
    let (pc, pf) = (&coarse.params, &fine.params);
    if pc.mu2 != pf.mu2 || pc.lambda != pf.lambda || pc.precision != pf.precision {
        return Err(Error::IncompatibleRuns("physical parameters differ".into()));
    }
    if coarse.grid.scale() != fine.grid.scale() || coarse.grid.geometry() != fine.grid.geometry() {
        return Err(Error::IncompatibleRuns("grid scaling or geometry differs".into()));
    }
    if coarse.initial != fine.initial {
        return Err(Error::IncompatibleRuns("initial data differ".into()));
    }
    if (coarse.final_state.t - fine.final_state.t).abs() > 1e-9 {
        return Err(Error::IncompatibleRuns(format!(
            "final times differ: {} vs {}",
            coarse.final_state.t, fine.final_state.t
        )));
    }
    let a = extract_line(&coarse.final_state, &coarse.grid, which)?;
    let b = extract_line(&fine.final_state, &fine.grid, which)?;
    compare_lines(&a, &b)
}

/// Indices whose `|slope|` is in the top decile of the series (central differences).
pub fn top_decile_slope(series: &[f64], h: f64) -> Vec<usize> {
    let m = series.len();
    if m < 3 {
        return (0..m).collect();
    }
    let slope: Vec<f64> = (0..m)
        .map(|i| {
            let (a, b) = (i.saturating_sub(1), (i + 1).min(m - 1));
            ((series[b] - series[a]) / ((b - a) as f64 * h)).abs()
        })
        .collect();
    let mut sorted = slope.clone();
    sorted.sort_by(f64::total_cmp);
    let cut = sorted[((m as f64) * 0.9).floor() as usize];
    (0..m).filter(|&i| slope[i] >= cut).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::initial::{build_initial, BumpSpec, InitialData, Term};

    fn centered(n: usize, a: f64) -> (GridSpec, FieldState<f64>) {
        let g = GridSpec::cube(n, 5.0).unwrap();
        let d = InitialData {
            phi0: vec![Term::bump(BumpSpec::new([0.5; 3], 0.3, a).unwrap())],
            phi1: vec![],
        };
        let s = build_initial(&d, &g).unwrap();
        (g, s)
    }

    #[test]
    fn zero_field_lines() {
        let g = GridSpec::cube(10, 5.0).unwrap();
        let s = FieldState::<f64>::zeros(&g);
        for k in [LineKind::MidlineX, LineKind::MainDiagonal] {
            assert!(extract_line(&s, &g, k).unwrap().phi.iter().all(|&v| v == 0.0));
        }
    }

    #[test]
    fn midline_is_symmetric_with_central_peak() {
        let (g, s) = centered(32, 3.0);
        let l = extract_line(&s, &g, LineKind::MidlineX).unwrap();
        assert_eq!(l.len(), 33);
        assert_eq!(l.phi[16], 3.0);
        for j in 0..=32 {
            assert_eq!(l.phi[j], l.phi[32 - j]);
        }
    }

    #[test]
    fn diagonal_sample_count() {
        let g = GridSpec::cube(500, 5.0).unwrap();
        let m = (500.0 * 3f64.sqrt()).round() as usize + 1;
        assert_eq!(m, 867);
        let (g2, s) = centered(20, 1.0);
        let l = extract_line(&s, &g2, LineKind::MainDiagonal).unwrap();
        assert_eq!(l.len(), (20.0 * 3f64.sqrt()).round() as usize + 1);
        assert!((l.arc.last().unwrap() - 3f64.sqrt()).abs() < 1e-15);
        assert_eq!(g.n(), 500);
    }

    #[test]
    fn trilinear_reproduces_linear_fields() {
        let g = GridSpec::cube(10, 5.0).unwrap();
        let mut s = FieldState::<f64>::zeros(&g);
        for z in 0..=10 {
            for y in 0..=10 {
                for x in 0..=10 {
                    s.v1[g.index(x, y, z)] = 1.0 + 2.0 * x as f64 - 0.5 * y as f64 + 0.25 * z as f64;
                }
            }
        }
        let v = trilinear(&s.v1, &g, [3.3, 7.1, 0.4]);
        assert!((v - (1.0 + 6.6 - 3.55 + 0.1)).abs() < 1e-12);
    }

    #[test]
    fn cubic_interpolation_is_exact_on_cubics() {
        let arc: Vec<f64> = (0..=20).map(|j| j as f64 / 20.0).collect();
        let phi = arc.iter().map(|s| s * s * s - s).collect();
        let l = LineSeries { arc, phi };
        for s in [0.013, 0.5, 0.777, 0.99] {
            assert!((interpolate(&l, s) - (s * s * s - s)).abs() < 1e-14);
        }
    }

    #[test]
    fn identical_lines_compare_to_zero() {
        let (g, s) = centered(24, 1.0);
        let l = extract_line(&s, &g, LineKind::MidlineX).unwrap();
        let d = compare_lines(&l, &l).unwrap();
        assert_eq!(d.max_norm, 0.0);
    }

    #[test]
    fn top_decile_marks_steepest_points() {
        let xs: Vec<f64> = (0..100).map(|i| (i as f64 / 10.0).tanh()).collect();
        let idx = top_decile_slope(&xs, 0.1);
        assert!(idx.contains(&0) && idx.len() >= 10 && idx.len() < 15);
    }
}
