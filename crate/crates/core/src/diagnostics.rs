//! Scalar monitors sampled during a run.

use rayon::prelude::*;

use crate::bubbles::{detect_bubbles, BubbleCensus, DEFAULT_EPS_REL};
use crate::error::Result;
use crate::field::{max_abs, max_abs_slice, FieldState};
use crate::grid::{Geometry, GridSpec};
use crate::integrator::{cfl_from_max, wave_coefficient, CflStatus, SimParams};
use crate::real::Real;
use crate::stencil::apply_operator;

#[derive(Debug, Clone, PartialEq)]
pub struct DiagnosticsRecord {
    pub t: f64,
    pub step: u64,
    pub integral_phi: f64,
    pub integral_phi3: f64,
    pub max_abs_phi: f64,
    pub p: f64,
    pub bubbles: BubbleCensus,
    pub cfl: CflStatus,
}

/// Deterministic weighted sum: planes (or fixed chunks) are reduced in order.
fn weighted_sum<T: Real>(a: &[T], grid: &GridSpec, f: impl Fn(f64) -> f64 + Sync) -> f64 {
    match grid.geometry() {
        Geometry::Cube3D => {
            let plane = grid.points_per_axis() * grid.points_per_axis();
            let parts: Vec<f64> = a
                .par_chunks(plane)
                .map(|p| p.iter().map(|v| f(v.as_f64())).sum::<f64>())
                .collect();
            parts.iter().sum::<f64>() * grid.cell_measure()
        }
        Geometry::Radial1D => {
            let h = grid.spacing();
            let s: f64 = a
                .iter()
                .enumerate()
                .map(|(j, v)| {
                    let r = grid.coord(j);
                    r * r * f(v.as_f64())
                })
                .sum();
            4.0 * std::f64::consts::PI * s * h
        }
    }
}

/// `∫ φ dx`: `δx³ Σ v1` on the cube, `4π Σ r² v1 δr` radially.
pub fn integral_phi<T: Real>(state: &FieldState<T>, grid: &GridSpec) -> Result<f64> {
    max_abs(state)?;
    Ok(weighted_sum(&state.v1, grid, |v| v))
}

/// `∫ φ³ dx`, same quadrature as [`integral_phi`].
pub fn integral_phi3<T: Real>(state: &FieldState<T>, grid: &GridSpec) -> Result<f64> {
    max_abs(state)?;
    Ok(weighted_sum(&state.v1, grid, |v| v * v * v))
}

/// `P(t) = e^{-2t} / L² · max |Δ v1|`.
pub fn smoothness_p<T: Real>(state: &FieldState<T>, grid: &GridSpec) -> Result<f64> {
    state.check_extents(grid)?;
    max_abs(state)?;
    let lap = apply_operator(&state.v1, grid);
    Ok(wave_coefficient(state.t, grid) * max_abs_slice(&lap)?)
}

/// Full record for one sample; the bubble dead zone is `eps_rel * max|φ|`.
pub fn record<T: Real>(
    state: &FieldState<T>,
    grid: &GridSpec,
    params: &SimParams,
    eps_rel: f64,
) -> Result<DiagnosticsRecord> {
    let max_abs_phi = max_abs(state)?;
    Ok(DiagnosticsRecord {
        t: state.t,
        step: state.step,
        integral_phi: weighted_sum(&state.v1, grid, |v| v),
        integral_phi3: weighted_sum(&state.v1, grid, |v| v * v * v),
        max_abs_phi,
        p: smoothness_p(state, grid)?,
        bubbles: detect_bubbles(state, grid, eps_rel * max_abs_phi),
        cfl: cfl_from_max(max_abs_phi, grid, params),
    })
}

/// [`record`] with the default dead zone.
pub fn record_default<T: Real>(state: &FieldState<T>, grid: &GridSpec, params: &SimParams) -> Result<DiagnosticsRecord> {
    record(state, grid, params, DEFAULT_EPS_REL)
}
