//! First-order system `v' = f(t, v)` and the classical RK4 stepper.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{max_abs, FieldState};
use crate::grid::{Geometry, GridSpec};
use crate::real::{Precision, Real};
use crate::stencil::{radial_operator_into, CubeWeights};

/// Physics and numerics of one run. The scaling `L` lives on [`GridSpec`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimParams {
    pub mu2: f64,
    pub lambda: f64,
    pub dt: f64,
    pub t_end: f64,
    pub sample_every: u64,
    pub precision: Precision,
}

impl SimParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::InvalidParams(format!("dt must be > 0, got {}", self.dt)));
        }
        if !(self.t_end.is_finite() && self.t_end > 0.0) {
            return Err(Error::InvalidParams(format!(
                "t_end must be > 0, got {}",
                self.t_end
            )));
        }
        if self.sample_every == 0 {
            return Err(Error::InvalidParams("sample_every must be >= 1".into()));
        }
        if !(self.mu2.is_finite() && self.lambda.is_finite()) {
            return Err(Error::InvalidParams("mu2 and lambda must be finite".into()));
        }
        Ok(())
    }

    /// Number of steps needed to reach `t_end`.
    pub fn total_steps(&self) -> u64 {
        ((self.t_end / self.dt) - 1e-9).ceil().max(0.0) as u64
    }
}

/// Default time step: `δx / 20`.
pub fn default_dt(grid: &GridSpec) -> f64 {
    grid.spacing() / 20.0
}

/// Coefficient `e^{-2t} / L²` of the spatial operator.
#[inline]
pub fn wave_coefficient(t: f64, grid: &GridSpec) -> f64 {
    (-2.0 * t).exp() / (grid.scale() * grid.scale())
}

/// RK4 temporaries for the register-reuse scheme plus one scratch lattice for stage values.
#[derive(Debug, Clone)]
pub struct StepWorkspace<T> {
    pub k1: (Vec<T>, Vec<T>),
    pub k2: (Vec<T>, Vec<T>),
    pub k3: (Vec<T>, Vec<T>),
    stage: Vec<T>,
    rings: Rings<T>,
    zeros: Vec<T>,
}

impl<T: Real> StepWorkspace<T> {
    pub fn new(grid: &GridSpec) -> Self {
        let z = || vec![T::zero(); grid.len()];
        Self {
            k1: (z(), z()),
            k2: (z(), z()),
            k3: (z(), z()),
            stage: Vec::with_capacity(if grid.geometry() == Geometry::Radial1D { grid.len() } else { 0 }),
            rings: Rings::new(grid),
            zeros: vec![T::zero(); grid.points_per_axis()],
        }
    }

    pub fn matches(&self, grid: &GridSpec) -> bool {
        self.k1.0.len() == grid.len()
    }
}

/// Pointwise reaction part: `μ²u − λu³ − 3w`.
#[derive(Clone, Copy)]
struct Reaction<T> {
    mu2: T,
    lambda: T,
    damping: T,
    cube_floor: T,
}

impl<T: Real> Reaction<T> {
    fn new(p: &SimParams) -> Self {
        Self {
            mu2: T::from_f64(p.mu2),
            lambda: T::from_f64(p.lambda),
            damping: T::from_f64(3.0),
            cube_floor: cube_floor(),
        }
    }

    #[inline(always)]
    fn eval(&self, u: T, w: T) -> T {
        // below the floor u³ would underflow through subnormals (very slow on x86)
        let cube = if u.abs() > self.cube_floor {
            u * u * u
        } else {
            T::zero()
        };
        self.mu2 * u - self.lambda * cube - self.damping * w
    }
}

/// Smallest `|u|` whose cube stays comfortably normal.
fn cube_floor<T: Real>() -> T {
    T::from_f64(4.0) * T::min_positive_value().cbrt() * T::from_f64(16.0)
}

/// Stage input `(v1 + a*k.0, v2 + a*k.1)`; `None` means the state itself.
type StageShift<'a, T> = Option<(&'a (Vec<T>, Vec<T>), T)>;

/// Radial stage evaluation: materializes the stage `φ` into `stage`, then applies `f`.
fn radial_stage<T: Real>(
    t: f64,
    state: &FieldState<T>,
    shift: StageShift<'_, T>,
    params: &SimParams,
    grid: &GridSpec,
    stage: &mut Vec<T>,
    out: &mut (Vec<T>, Vec<T>),
) {
    stage.clear();
    match shift {
        None => stage.extend_from_slice(&state.v1),
        Some((k, a)) => stage.extend(state.v1.iter().zip(&k.0).map(|(&v, &k)| v + a * k)),
    }
    let react = Reaction::new(params);
    let (o1, o2) = (&mut out.0, &mut out.1);
    radial_operator_into(stage, grid, wave_coefficient(t, grid), o2);
    let n = grid.n();
    for j in 0..=n {
        let w = match shift {
            None => state.v2[j],
            Some((k, a)) => state.v2[j] + a * k.1[j],
        };
        o1[j] = w;
        o2[j] = o2[j] + react.eval(stage[j], w);
    }
    o1[n] = T::zero();
    o2[n] = T::zero();
}

/// Planes per parallel work item in 3D; depends on nothing but this constant.
const SLAB_PLANES: usize = 32;
/// Planes `z-2..=z+2` kept by the rolling stage buffer.
const RING: usize = 5;

struct CubeStage<'a, T> {
    v1: &'a [T],
    v2: &'a [T],
    shift: Option<(&'a [T], &'a [T], T)>,
    weights: CubeWeights<T>,
    react: Reaction<T>,
}

/// Walks the rows of planes `z0..z1`, handing `(row offset, f1 row, f2 row)` to `finish`.
///
/// Stage values `v1 + a*k.0` are built plane by plane in `ring`, so a stage never
/// materializes a full lattice.
fn cube_slab<T: Real>(
    grid: &GridSpec,
    stage: &CubeStage<'_, T>,
    z0: usize,
    z1: usize,
    ring: &mut [T],
    zeros: &[T],
    mut finish: impl FnMut(usize, &[T], &[T]),
) {
    let n = grid.n();
    let s = n + 1;
    let plane = s * s;
    let mut f1 = vec![T::zero(); s];
    let mut f2 = vec![T::zero(); s];
    let mut slot_plane = [usize::MAX; RING];
    let fill = |ring: &mut [T], slot_plane: &mut [usize; RING], p: usize| {
        let slot = p % RING;
        if slot_plane[slot] == p {
            return;
        }
        let dst = &mut ring[slot * plane..(slot + 1) * plane];
        let src = &stage.v1[p * plane..(p + 1) * plane];
        match stage.shift {
            None => dst.copy_from_slice(src),
            Some((k, _, a)) => {
                let k = &k[p * plane..(p + 1) * plane];
                for ((d, &v), &k) in dst.iter_mut().zip(src).zip(k) {
                    *d = v + a * k;
                }
            }
        }
        slot_plane[slot] = p;
    };
    for z in z0..z1 {
        let base = z * plane;
        if z == 0 || z == n {
            for y in 0..s {
                finish(base + y * s, zeros, zeros);
            }
            continue;
        }
        for p in z.saturating_sub(2)..=(z + 2).min(n) {
            fill(ring, &mut slot_plane, p);
        }
        let plane_at = |p: isize| -> Option<&[T]> {
            if p < 0 || p as usize > n {
                None
            } else {
                let slot = p as usize % RING;
                Some(&ring[slot * plane..(slot + 1) * plane])
            }
        };
        let zi = z as isize;
        let planes = [
            plane_at(zi - 2),
            plane_at(zi - 1),
            plane_at(zi),
            plane_at(zi + 1),
            plane_at(zi + 2),
        ];
        let center = planes[2].expect("interior plane");
        for y in 0..s {
            let off = base + y * s;
            if y == 0 || y == n {
                finish(off, zeros, zeros);
                continue;
            }
            laplacian_row_planes(&planes, y, s, stage.weights, zeros, &mut f2);
            let u = &center[y * s..(y + 1) * s];
            let v2 = &stage.v2[off..off + s];
            let react = stage.react;
            match stage.shift {
                None => {
                    for (((f1, f2), &u), &w) in f1.iter_mut().zip(f2.iter_mut()).zip(u).zip(v2) {
                        *f1 = w;
                        *f2 = *f2 + react.eval(u, w);
                    }
                }
                Some((_, k, a)) => {
                    let k = &k[off..off + s];
                    for ((((f1, f2), &u), &v), &k) in
                        f1.iter_mut().zip(f2.iter_mut()).zip(u).zip(v2).zip(k)
                    {
                        let w = v + a * k;
                        *f1 = w;
                        *f2 = *f2 + react.eval(u, w);
                    }
                }
            }
            f1[0] = T::zero();
            f1[n] = T::zero();
            f2[0] = T::zero();
            f2[n] = T::zero();
            finish(off, &f1, &f2);
        }
    }
}

/// Same arithmetic as [`laplacian_row`], reading rows from a window of five planes.
fn laplacian_row_planes<'a, T: Real>(
    planes: &[Option<&'a [T]>; 5],
    y: usize,
    s: usize,
    w: CubeWeights<T>,
    zeros: &'a [T],
    out: &mut [T],
) {
    fn pick<'a, T>(p: Option<&'a [T]>, yy: isize, s: usize, zeros: &'a [T]) -> &'a [T] {
        match p {
            Some(p) if yy >= 0 && (yy as usize) < s => {
                let yy = yy as usize;
                &p[yy * s..(yy + 1) * s]
            }
            _ => zeros,
        }
    }
    let row = |p: Option<&'a [T]>, yy: isize| -> &'a [T] { pick(p, yy, s, zeros) };
    let yi = y as isize;
    let c = row(planes[2], yi);
    let ym1 = row(planes[2], yi - 1);
    let yp1 = row(planes[2], yi + 1);
    let ym2 = row(planes[2], yi - 2);
    let yp2 = row(planes[2], yi + 2);
    let zm1 = row(planes[1], yi);
    let zp1 = row(planes[3], yi);
    let zm2 = row(planes[0], yi);
    let zp2 = row(planes[4], yi);
    crate::stencil::row_kernel(c, [ym1, yp1, zm1, zp1], [ym2, yp2, zm2, zp2], w, out);
}

/// Per-slab scratch for the 3D path.
#[derive(Debug, Clone)]
struct Rings<T> {
    buffers: Vec<Vec<T>>,
}

impl<T: Real> Rings<T> {
    fn new(grid: &GridSpec) -> Self {
        let s = grid.points_per_axis();
        let slabs = s.div_ceil(SLAB_PLANES);
        Self {
            buffers: (0..slabs).map(|_| vec![T::zero(); RING * s * s]).collect(),
        }
    }
}

fn cube_stage<'a, T: Real>(
    t: f64,
    state: &'a FieldState<T>,
    shift: StageShift<'a, T>,
    params: &SimParams,
    grid: &GridSpec,
) -> CubeStage<'a, T> {
    CubeStage {
        v1: &state.v1,
        v2: &state.v2,
        shift: shift.map(|(k, a)| (&k.0[..], &k.1[..], a)),
        weights: CubeWeights::new(grid, wave_coefficient(t, grid)),
        react: Reaction::new(params),
    }
}

/// `out <- f(stage)` over the cube, slab-parallel.
fn cube_store<T: Real>(
    grid: &GridSpec,
    stage: &CubeStage<'_, T>,
    rings: &mut Rings<T>,
    zeros: &[T],
    out: &mut (Vec<T>, Vec<T>),
) {
    let s = grid.points_per_axis();
    let slab = SLAB_PLANES * s * s;
    out.0
        .par_chunks_mut(slab)
        .zip(out.1.par_chunks_mut(slab))
        .zip(rings.buffers.par_iter_mut())
        .enumerate()
        .for_each(|(i, ((o1, o2), ring))| {
            let z0 = i * SLAB_PLANES;
            let z1 = (z0 + SLAB_PLANES).min(s);
            let start = z0 * s * s;
            cube_slab(grid, stage, z0, z1, ring, zeros, |off, f1, f2| {
                let r = off - start;
                o1[r..r + s].copy_from_slice(f1);
                o2[r..r + s].copy_from_slice(f2);
            });
        });
}

/// Right-hand side `(f1, f2) = (v2, μ²v1 − λv1³ − 3v2 + e^{-2t}/L² Δv1)`.
pub fn rhs<T: Real>(
    t: f64,
    state: &FieldState<T>,
    params: &SimParams,
    grid: &GridSpec,
) -> Result<(Vec<T>, Vec<T>)> {
    state.check_extents(grid)?;
    let mut out = (vec![T::zero(); grid.len()], vec![T::zero(); grid.len()]);
    match grid.geometry() {
        Geometry::Radial1D => radial_stage(t, state, None, params, grid, &mut Vec::new(), &mut out),
        Geometry::Cube3D => {
            let zeros = vec![T::zero(); grid.points_per_axis()];
            let stage = cube_stage(t, state, None, params, grid);
            cube_store(grid, &stage, &mut Rings::new(grid), &zeros, &mut out);
        }
    }
    check_finite(&out.0)?;
    check_finite(&out.1)?;
    Ok(out)
}

fn check_finite<T: Real>(a: &[T]) -> Result<()> {
    crate::field::max_abs_slice(a).map(|_| ())
}

/// One RK4 step in the register-reuse form:
///
/// ```text
/// k1 <- f(t, v)
/// k2 <- f(t + dt/2, v + k1 dt/2)
/// k1 <- k1 + 2 k2
/// k3 <- f(t + dt/2, v + k2 dt/2)
/// k2 <- f(t + dt, v + k3 dt)
/// v  <- v + (k1 + 2 k3 + k2) dt / 6
/// ```
///
/// In 3D the `k1` update rides along with the `k3` pass and the final combination with
/// the last stage; every node still sees exactly the arithmetic above.
///
/// Time is set to `(step + 1) * dt`. Non-finite values are not checked here; the driver
/// checks the state after each step.
pub fn rk4_step<T: Real>(
    state: &mut FieldState<T>,
    params: &SimParams,
    grid: &GridSpec,
    ws: &mut StepWorkspace<T>,
) -> Result<()> {
    state.check_extents(grid)?;
    if !ws.matches(grid) {
        return Err(Error::ExtentMismatch {
            expected: grid.len(),
            actual: ws.k1.0.len(),
        });
    }
    match grid.geometry() {
        Geometry::Radial1D => rk4_step_radial(state, params, grid, ws),
        Geometry::Cube3D => rk4_step_cube(state, params, grid, ws),
    }
    state.step += 1;
    state.t = state.step as f64 * params.dt;
    Ok(())
}

fn rk4_step_radial<T: Real>(
    state: &mut FieldState<T>,
    params: &SimParams,
    grid: &GridSpec,
    ws: &mut StepWorkspace<T>,
) {
    let dt = params.dt;
    let t = state.t;
    let half = T::from_f64(0.5 * dt);
    let full = T::from_f64(dt);
    let two = T::from_f64(2.0);
    let StepWorkspace {
        k1, k2, k3, stage, ..
    } = ws;
    radial_stage(t, state, None, params, grid, stage, k1);
    radial_stage(t + 0.5 * dt, state, Some((k1, half)), params, grid, stage, k2);
    for (a, b) in [(&mut k1.0, &k2.0), (&mut k1.1, &k2.1)] {
        for (a, &b) in a.iter_mut().zip(b) {
            *a = *a + two * b;
        }
    }
    radial_stage(t + 0.5 * dt, state, Some((k2, half)), params, grid, stage, k3);
    radial_stage(t + dt, state, Some((k3, full)), params, grid, stage, k2);
    let sixth = T::from_f64(dt / 6.0);
    for (v, a, b, c) in [
        (&mut state.v1, &k1.0, &k3.0, &k2.0),
        (&mut state.v2, &k1.1, &k3.1, &k2.1),
    ] {
        for (j, v) in v.iter_mut().enumerate() {
            *v = *v + (a[j] + two * b[j] + c[j]) * sixth;
        }
    }
}

fn rk4_step_cube<T: Real>(
    state: &mut FieldState<T>,
    params: &SimParams,
    grid: &GridSpec,
    ws: &mut StepWorkspace<T>,
) {
    let dt = params.dt;
    let t = state.t;
    let half = T::from_f64(0.5 * dt);
    let full = T::from_f64(dt);
    let two = T::from_f64(2.0);
    let sixth = T::from_f64(dt / 6.0);
    let s = grid.points_per_axis();
    let slab = SLAB_PLANES * s * s;
    let StepWorkspace {
        k1,
        k2,
        k3,
        rings,
        zeros,
        ..
    } = ws;

    let st = cube_stage(t, state, None, params, grid);
    cube_store(grid, &st, rings, zeros, k1);
    let st = cube_stage(t + 0.5 * dt, state, Some((k1, half)), params, grid);
    cube_store(grid, &st, rings, zeros, k2);

    // k3 <- f(v + k2 dt/2) together with k1 <- k1 + 2 k2
    let st = cube_stage(t + 0.5 * dt, state, Some((k2, half)), params, grid);
    let (k2a, k2b) = (&k2.0, &k2.1);
    k3.0.par_chunks_mut(slab)
        .zip(k3.1.par_chunks_mut(slab))
        .zip(k1.0.par_chunks_mut(slab))
        .zip(k1.1.par_chunks_mut(slab))
        .zip(rings.buffers.par_iter_mut())
        .enumerate()
        .for_each(|(i, ((((o1, o2), a1), a2), ring))| {
            let z0 = i * SLAB_PLANES;
            let z1 = (z0 + SLAB_PLANES).min(s);
            let start = z0 * s * s;
            cube_slab(grid, &st, z0, z1, ring, zeros, |off, f1, f2| {
                let r = off - start;
                o1[r..r + s].copy_from_slice(f1);
                o2[r..r + s].copy_from_slice(f2);
                for (a, &k) in a1[r..r + s].iter_mut().zip(&k2a[off..off + s]) {
                    *a = *a + two * k;
                }
                for (a, &k) in a2[r..r + s].iter_mut().zip(&k2b[off..off + s]) {
                    *a = *a + two * k;
                }
            });
        });

    // k4 <- f(v + k3 dt) and v <- v + (k1 + 2 k3 + k4) dt/6, written into k2's storage
    let st = cube_stage(t + dt, state, Some((k3, full)), params, grid);
    let (k1a, k1b, k3a, k3b) = (&k1.0, &k1.1, &k3.0, &k3.1);
    let (v1, v2) = (&state.v1, &state.v2);
    k2.0.par_chunks_mut(slab)
        .zip(k2.1.par_chunks_mut(slab))
        .zip(rings.buffers.par_iter_mut())
        .enumerate()
        .for_each(|(i, ((n1, n2), ring))| {
            let z0 = i * SLAB_PLANES;
            let z1 = (z0 + SLAB_PLANES).min(s);
            let start = z0 * s * s;
            cube_slab(grid, &st, z0, z1, ring, zeros, |off, f1, f2| {
                let r = off - start;
                let g = off..off + s;
                for (dst, src, a, b, f) in [
                    (&mut n1[r..r + s], &v1[g.clone()], &k1a[g.clone()], &k3a[g.clone()], f1),
                    (&mut n2[r..r + s], &v2[g.clone()], &k1b[g.clone()], &k3b[g.clone()], f2),
                ] {
                    for ((((d, &v), &a), &b), &f) in dst.iter_mut().zip(src).zip(a).zip(b).zip(f) {
                        *d = v + (a + two * b + f) * sixth;
                    }
                }
            });
        });
    std::mem::swap(&mut state.v1, &mut k2.0);
    std::mem::swap(&mut state.v2, &mut k2.1);
}

/// Register-reuse RK4 step for a small ODE system `y' = f(t, y)`.
pub fn rk4_reuse<const D: usize>(f: impl Fn(f64, [f64; D]) -> [f64; D], t: f64, y: [f64; D], dt: f64) -> [f64; D] {
    let shift = |k: &[f64; D], a: f64| -> [f64; D] { std::array::from_fn(|i| y[i] + a * k[i]) };
    let mut k1 = f(t, y);
    let mut k2 = f(t + 0.5 * dt, shift(&k1, 0.5 * dt));
    for i in 0..D {
        k1[i] += 2.0 * k2[i];
    }
    let k3 = f(t + 0.5 * dt, shift(&k2, 0.5 * dt));
    k2 = f(t + dt, shift(&k3, dt));
    std::array::from_fn(|i| y[i] + (k1[i] + 2.0 * k3[i] + k2[i]) * (dt / 6.0))
}

/// Textbook RK4 with four separate stage vectors, built on the public [`rhs`].
pub fn rk4_step_textbook<T: Real>(
    state: &FieldState<T>,
    params: &SimParams,
    grid: &GridSpec,
) -> Result<FieldState<T>> {
    let dt = params.dt;
    let t = state.t;
    let shifted = |k: &(Vec<T>, Vec<T>), a: f64| -> FieldState<T> {
        let a = T::from_f64(a);
        FieldState {
            v1: state.v1.iter().zip(&k.0).map(|(&v, &k)| v + a * k).collect(),
            v2: state.v2.iter().zip(&k.1).map(|(&v, &k)| v + a * k).collect(),
            t: state.t,
            step: state.step,
        }
    };
    let k1 = rhs(t, state, params, grid)?;
    let k2 = rhs(t + 0.5 * dt, &shifted(&k1, 0.5 * dt), params, grid)?;
    let k3 = rhs(t + 0.5 * dt, &shifted(&k2, 0.5 * dt), params, grid)?;
    let k4 = rhs(t + dt, &shifted(&k3, dt), params, grid)?;
    let sixth = T::from_f64(dt / 6.0);
    let two = T::from_f64(2.0);
    let combine = |v: &[T], a: &[T], b: &[T], c: &[T], d: &[T]| -> Vec<T> {
        (0..v.len())
            .map(|i| v[i] + (a[i] + two * b[i] + two * c[i] + d[i]) * sixth)
            .collect()
    };
    Ok(FieldState {
        v1: combine(&state.v1, &k1.0, &k2.0, &k3.0, &k4.0),
        v2: combine(&state.v2, &k1.1, &k2.1, &k3.1, &k4.1),
        t: (state.step + 1) as f64 * dt,
        step: state.step + 1,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CflStatus {
    Pass { bound: f64, observed: f64 },
    Fail { bound: f64, observed: f64 },
}

impl CflStatus {
    pub fn passed(&self) -> bool {
        matches!(self, CflStatus::Pass { .. })
    }

    pub fn label(&self) -> &'static str {
        if self.passed() {
            "pass"
        } else {
            "fail"
        }
    }
}

/// `|φ| < δx / (√3 δt)`.
pub fn cfl_bound(grid: &GridSpec, params: &SimParams) -> f64 {
    grid.spacing() / (3f64.sqrt() * params.dt)
}

pub fn cfl_from_max(max_abs_phi: f64, grid: &GridSpec, params: &SimParams) -> CflStatus {
    let bound = cfl_bound(grid, params);
    if max_abs_phi < bound {
        CflStatus::Pass {
            bound,
            observed: max_abs_phi,
        }
    } else {
        CflStatus::Fail {
            bound,
            observed: max_abs_phi,
        }
    }
}

/// CFL status of a state; a non-finite field fails with an infinite observation.
pub fn cfl_check<T: Real>(state: &FieldState<T>, grid: &GridSpec, params: &SimParams) -> CflStatus {
    let observed = max_abs(state).unwrap_or(f64::INFINITY);
    cfl_from_max(observed, grid, params)
}
