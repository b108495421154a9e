//! Compactly supported initial data built from smooth bump functions.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{zero_boundary, FieldState};
use crate::grid::{Geometry, GridSpec};
use crate::real::Real;

/// Stencil halo width in cells.
pub const HALO_CELLS: usize = 2;

const CUBE_CENTER: [f64; 3] = [0.5, 0.5, 0.5];

/// `A * exp(1/R^2 - 1/(R^2 - |x-C|^2))` inside the ball `|x-C| < R`, zero outside.
///
/// For radial grids only the first coordinate of `center` is used, as the radius of the
/// bump's center.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BumpSpec {
    pub center: [f64; 3],
    pub radius: f64,
    #[serde(default = "one")]
    pub amplitude: f64,
}

fn one() -> f64 {
    1.0
}

impl BumpSpec {
    /// A bump in the unit cube; its support ball must lie strictly inside `[0,1]^3`.
    pub fn new(center: [f64; 3], radius: f64, amplitude: f64) -> Result<Self> {
        let b = Self {
            center,
            radius,
            amplitude,
        };
        b.validate(Geometry::Cube3D)?;
        Ok(b)
    }

    /// A bump on the radial interval centered at radius `center` (0 for a centered ball).
    pub fn radial(center: f64, radius: f64, amplitude: f64) -> Result<Self> {
        let b = Self {
            center: [center, 0.0, 0.0],
            radius,
            amplitude,
        };
        b.validate(Geometry::Radial1D)?;
        Ok(b)
    }

    pub fn validate(&self, geometry: Geometry) -> Result<()> {
        let r = self.radius;
        if !(r.is_finite() && r > 0.0 && r < 1.0) {
            return Err(Error::InvalidBump(format!("radius must lie in (0,1), got {r}")));
        }
        if !self.amplitude.is_finite() || self.center.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidBump("non-finite center or amplitude".into()));
        }
        if self.boundary_distance(geometry) <= 0.0 {
            return Err(Error::InvalidBump(format!(
                "support of radius {r} around {:?} is not strictly inside the domain",
                self.center
            )));
        }
        if geometry == Geometry::Radial1D && self.center[0] < 0.0 {
            return Err(Error::InvalidBump("radial center must be >= 0".into()));
        }
        Ok(())
    }

    /// Distance from the support ball to the nearest domain boundary (negative if it crosses).
    pub fn boundary_distance(&self, geometry: Geometry) -> f64 {
        match geometry {
            Geometry::Cube3D => {
                self.center
                    .iter()
                    .map(|&c| c.min(1.0 - c))
                    .fold(f64::INFINITY, f64::min)
                    - self.radius
            }
            Geometry::Radial1D => 1.0 - (self.center[0] + self.radius),
        }
    }

    pub fn scaled(&self, k: f64) -> Self {
        Self {
            amplitude: self.amplitude * k,
            ..*self
        }
    }
}

#[inline]
pub fn bump_eval(x: [f64; 3], spec: &BumpSpec) -> f64 {
    let d2 = (x[0] - spec.center[0]).powi(2)
        + (x[1] - spec.center[1]).powi(2)
        + (x[2] - spec.center[2]).powi(2);
    let r2 = spec.radius * spec.radius;
    if d2 < r2 {
        spec.amplitude * (1.0 / r2 - 1.0 / (r2 - d2)).exp()
    } else {
        0.0
    }
}

/// One additive term: `weight * prod(factors) * (sin(2πx) if sin_x)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Term {
    #[serde(default = "one")]
    pub weight: f64,
    #[serde(default)]
    pub sin_x: bool,
    pub bumps: Vec<BumpSpec>,
}

impl Term {
    pub fn bump(b: BumpSpec) -> Self {
        Self {
            weight: 1.0,
            sin_x: false,
            bumps: vec![b],
        }
    }

    pub fn weighted(mut self, w: f64) -> Self {
        self.weight *= w;
        self
    }

    #[inline]
    pub fn eval(&self, x: [f64; 3]) -> f64 {
        let mut v = self.weight;
        for b in &self.bumps {
            if v == 0.0 {
                return 0.0;
            }
            v *= bump_eval(x, b);
        }
        if self.sin_x {
            v *= (2.0 * PI * x[0]).sin();
        }
        v
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialData {
    #[serde(default)]
    pub phi0: Vec<Term>,
    #[serde(default)]
    pub phi1: Vec<Term>,
}

impl InitialData {
    pub fn validate(&self, geometry: Geometry) -> Result<()> {
        for t in self.phi0.iter().chain(&self.phi1) {
            if t.bumps.is_empty() {
                return Err(Error::InvalidBump(
                    "a term needs at least one bump factor to be compactly supported".into(),
                ));
            }
            if !t.weight.is_finite() {
                return Err(Error::InvalidBump("non-finite term weight".into()));
            }
            if t.sin_x && geometry == Geometry::Radial1D {
                return Err(Error::InvalidBump(
                    "sin(2πx) modulation is only defined on the cube".into(),
                ));
            }
            for b in &t.bumps {
                b.validate(geometry)?;
            }
        }
        Ok(())
    }

    pub fn eval_phi0(&self, x: [f64; 3]) -> f64 {
        self.phi0.iter().map(|t| t.eval(x)).sum()
    }

    pub fn eval_phi1(&self, x: [f64; 3]) -> f64 {
        self.phi1.iter().map(|t| t.eval(x)).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.phi0.is_empty() && self.phi1.is_empty()
    }

    /// Rewrites cube data centered at `(0.5,0.5,0.5)` as radial data centered at `r = 0`.
    pub fn to_radial(&self) -> Result<Self> {
        let conv = |terms: &[Term]| -> Result<Vec<Term>> {
            terms
                .iter()
                .map(|t| {
                    if t.sin_x {
                        return Err(Error::NotRadial("term carries sin(2πx) modulation".into()));
                    }
                    let bumps = t
                        .bumps
                        .iter()
                        .map(|b| {
                            let off = b
                                .center
                                .iter()
                                .zip(CUBE_CENTER)
                                .map(|(c, m)| (c - m).abs())
                                .fold(0.0, f64::max);
                            if off > 1e-12 {
                                return Err(Error::NotRadial(format!(
                                    "bump centered at {:?}",
                                    b.center
                                )));
                            }
                            Ok(BumpSpec {
                                center: [0.0; 3],
                                ..*b
                            })
                        })
                        .collect::<Result<Vec<_>>>()?;
                    Ok(Term { bumps, ..t.clone() })
                })
                .collect()
        };
        Ok(Self {
            phi0: conv(&self.phi0)?,
            phi1: conv(&self.phi1)?,
        })
    }
}

/// Validates the data and requires every bump support to stay [`HALO_CELLS`] cells clear of
/// the boundary.
pub fn check_support(data: &InitialData, grid: &GridSpec) -> Result<()> {
    data.validate(grid.geometry())?;
    let margin = HALO_CELLS as f64 * grid.spacing();
    for (term, t) in data.phi0.iter().chain(&data.phi1).enumerate() {
        for b in &t.bumps {
            if b.boundary_distance(grid.geometry()) < margin {
                return Err(Error::SupportTouchesBoundary { term, margin });
            }
        }
    }
    Ok(())
}

/// Samples the initial data at every lattice node (time 0, step 0).
pub fn build_initial<T: Real>(data: &InitialData, grid: &GridSpec) -> Result<FieldState<T>> {
    check_support(data, grid)?;
    let mut state = FieldState::<T>::zeros(grid);
    sample(&mut state.v1, grid, |x| data.eval_phi0(x));
    sample(&mut state.v2, grid, |x| data.eval_phi1(x));
    zero_boundary(&mut state.v1, grid);
    zero_boundary(&mut state.v2, grid);
    Ok(state)
}

fn sample<T: Real>(out: &mut [T], grid: &GridSpec, f: impl Fn([f64; 3]) -> f64 + Sync) {
    let s = grid.points_per_axis();
    match grid.geometry() {
        Geometry::Radial1D => {
            for (j, v) in out.iter_mut().enumerate() {
                *v = T::from_f64(f([grid.coord(j), 0.0, 0.0]));
            }
        }
        Geometry::Cube3D => {
            out.par_chunks_mut(s * s).enumerate().for_each(|(z, plane)| {
                let zc = grid.coord(z);
                for (y, row) in plane.chunks_mut(s).enumerate() {
                    let yc = grid.coord(y);
                    for (x, v) in row.iter_mut().enumerate() {
                        *v = T::from_f64(f([grid.coord(x), yc, zc]));
                    }
                }
            });
        }
    }
}
