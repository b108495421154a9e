//! The unforced damped Duffing equation `φ'' + 3φ' = μ²φ − λφ³` and the bubble predicate.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::initial::InitialData;
use crate::integrator::rk4_reuse;

/// Damping coefficient: the spatial dimension 3.
pub const DAMPING: f64 = 3.0;

/// Distance to an equilibrium that counts as arrival.
pub const CAPTURE_TOL: f64 = 1e-6;

pub const DEFAULT_T_MAX: f64 = 50.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DuffingParams {
    mu2: f64,
    lambda: f64,
}

impl DuffingParams {
    pub fn new(mu2: f64, lambda: f64) -> Result<Self> {
        if !(mu2.is_finite() && mu2 > 0.0 && lambda.is_finite() && lambda > 0.0) {
            return Err(Error::InvalidParams(format!(
                "Duffing reference needs mu2 > 0 and lambda > 0, got mu2={mu2}, lambda={lambda}"
            )));
        }
        Ok(DuffingParams { mu2, lambda })
    }

    pub fn mu2(&self) -> f64 {
        self.mu2
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// `(φ_t, μ²φ − λφ³ − 3φ_t)`.
    #[inline]
    pub fn rhs(&self, y: [f64; 2]) -> [f64; 2] {
        [y[1], self.mu2 * y[0] - self.lambda * y[0] * y[0] * y[0] - DAMPING * y[1]]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Equilibria {
    pub stable_pos: f64,
    pub stable_neg: f64,
    pub unstable_zero: f64,
}

pub fn equilibria(params: &DuffingParams) -> Equilibria {
    let e = (params.mu2 / params.lambda).sqrt();
    Equilibria {
        stable_pos: e,
        stable_neg: -e,
        unstable_zero: 0.0,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Basin {
    StablePos,
    StableNeg,
    UnstableZero,
    Undecided,
}

impl Basin {
    pub fn label(self) -> &'static str {
        match self {
            Basin::StablePos => "stable_pos",
            Basin::StableNeg => "stable_neg",
            Basin::UnstableZero => "unstable_zero",
            Basin::Undecided => "undecided",
        }
    }

    /// The label of the mirrored point `(−φ, −φ_t)`.
    pub fn mirrored(self) -> Basin {
        match self {
            Basin::StablePos => Basin::StableNeg,
            Basin::StableNeg => Basin::StablePos,
            b => b,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub t: Vec<f64>,
    pub phi: Vec<f64>,
    pub phi_t: Vec<f64>,
    pub basin: Basin,
}

#[inline]
fn rk4(p: &DuffingParams, y: [f64; 2], dt: f64) -> [f64; 2] {
    rk4_reuse(|_, y| p.rhs(y), 0.0, y, dt)
}

fn classify_point(p: &DuffingParams, y: [f64; 2]) -> Basin {
    let e = equilibria(p);
    let near = |x: f64| (y[0] - x).abs() <= CAPTURE_TOL && y[1].abs() <= CAPTURE_TOL;
    if near(e.stable_pos) {
        Basin::StablePos
    } else if near(e.stable_neg) {
        Basin::StableNeg
    } else if near(e.unstable_zero) {
        Basin::UnstableZero
    } else {
        Basin::Undecided
    }
}

fn check_step(dt: f64, t_max: f64) -> Result<u64> {
    if !(dt.is_finite() && dt > 0.0 && t_max.is_finite() && t_max >= 0.0) {
        return Err(Error::InvalidParams(format!("need dt > 0 and t_max >= 0, got dt={dt}, t_max={t_max}")));
    }
    Ok(((t_max / dt) - 1e-9).ceil().max(0.0) as u64)
}

/// RK4 trajectory from `y0 = (φ, φ_t)` with fixed step `dt` up to `t_max`.
pub fn integrate_duffing(y0: [f64; 2], params: &DuffingParams, dt: f64, t_max: f64) -> Result<Trajectory> {
    let steps = check_step(dt, t_max)?;
    let mut tr = Trajectory {
        t: vec![0.0],
        phi: vec![y0[0]],
        phi_t: vec![y0[1]],
        basin: Basin::Undecided,
    };
    let mut y = y0;
    for k in 1..=steps {
        y = rk4(params, y, dt);
        if !(y[0].is_finite() && y[1].is_finite()) {
            return Err(Error::NonFinite { index: k as usize });
        }
        tr.t.push(k as f64 * dt);
        tr.phi.push(y[0]);
        tr.phi_t.push(y[1]);
    }
    tr.basin = classify_point(params, y);
    Ok(tr)
}

/// Terminal classification only, without storing the trajectory.
pub fn classify(y0: [f64; 2], params: &DuffingParams, dt: f64, t_max: f64) -> Result<Basin> {
    let steps = check_step(dt, t_max)?;
    let mut y = y0;
    for k in 1..=steps {
        y = rk4(params, y, dt);
        if !(y[0].is_finite() && y[1].is_finite()) {
            return Err(Error::NonFinite { index: k as usize });
        }
    }
    Ok(classify_point(params, y))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PortraitSample {
    pub phi0: f64,
    pub phi1: f64,
    pub basin: Basin,
}

/// Classifies every `(φ0, φ1)` sample. Non-finite trajectories are labelled undecided.
pub fn phase_portrait(params: &DuffingParams, samples: &[[f64; 2]], dt: f64, t_max: f64) -> Result<Vec<PortraitSample>> {
    check_step(dt, t_max)?;
    Ok(samples
        .par_iter()
        .map(|&y| PortraitSample {
            phi0: y[0],
            phi1: y[1],
            basin: classify(y, params, dt, t_max).unwrap_or(Basin::Undecided),
        })
        .collect())
}

/// Tensor grid of `m × m` samples over `[lo, hi]²`, `φ0` fastest.
pub fn sample_grid(lo: f64, hi: f64, m: usize) -> Vec<[f64; 2]> {
    let at = |i: usize| if m == 1 { lo } else { lo + (hi - lo) * i as f64 / (m - 1) as f64 };
    (0..m).flat_map(|j| (0..m).map(move |i| [at(i), at(j)])).collect()
}

/// `n/2 + √(n²/4 + μ²)` with `n = 3`.
pub fn predicate_coefficient(mu2: f64) -> f64 {
    1.5 + (2.25 + mu2).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PredicateOutcome {
    SatisfiedOnSupport,
    /// `witness` is the first failing node, or `None` when the support is empty.
    Violated { witness: Option<[f64; 3]> },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PredicateReport {
    pub coefficient: f64,
    pub outcome: PredicateOutcome,
    /// `∫ φ0³ dx` on the lattice.
    pub integral_phi0_cubed: f64,
    pub support_nodes: usize,
}

impl PredicateReport {
    pub fn satisfied(&self) -> bool {
        self.outcome == PredicateOutcome::SatisfiedOnSupport
    }
}

/// Checks `c·φ0 + φ1 < 0` on every node where `φ0` or `φ1` is a normal nonzero number.
pub fn bubble_predicate(data: &InitialData, mu2: f64, grid: &GridSpec) -> Result<PredicateReport> {
    grid.require(crate::grid::Geometry::Cube3D)?;
    data.validate(grid.geometry())?;
    let c = predicate_coefficient(mu2);
    let s = grid.points_per_axis();
    let h3 = grid.cell_measure();
    let parts: Vec<(Option<[f64; 3]>, usize, f64)> = (0..s)
        .into_par_iter()
        .map(|z| {
            let mut witness = None;
            let mut count = 0;
            let mut cube = 0.0;
            for y in 0..s {
                for x in 0..s {
                    let p = [grid.coord(x), grid.coord(y), grid.coord(z)];
                    let (a, b) = (data.eval_phi0(p), data.eval_phi1(p));
                    cube += a * a * a;
                    if a.abs() < f64::MIN_POSITIVE && b.abs() < f64::MIN_POSITIVE {
                        continue;
                    }
                    count += 1;
                    if witness.is_none() && !(c * a + b < 0.0) {
                        witness = Some(p);
                    }
                }
            }
            (witness, count, cube)
        })
        .collect();
    let support_nodes = parts.iter().map(|p| p.1).sum();
    let integral_phi0_cubed = parts.iter().map(|p| p.2).sum::<f64>() * h3;
    let witness = parts.iter().find_map(|p| p.0);
    let outcome = match (support_nodes, witness) {
        (0, _) => PredicateOutcome::Violated { witness: None },
        (_, Some(w)) => PredicateOutcome::Violated { witness: Some(w) },
        (_, None) => PredicateOutcome::SatisfiedOnSupport,
    };
    Ok(PredicateReport {
        coefficient: c,
        outcome,
        integral_phi0_cubed,
        support_nodes,
    })
}
