//! C ABI over `higgs-core`.
//!
//! Simulations are opaque `HgSim` handles created by `hg_sim_new_*` and released with
//! `hg_sim_free`. Every fallible call returns an `HgStatus`; on failure the message is
//! kept per thread and can be fetched with `hg_last_error_message`. Only double precision
//! is exposed.

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use higgs_core::config::{load_config, ExperimentConfig};
use higgs_core::driver::{stop_condition, StopReason};
use higgs_core::grid::Geometry;
use higgs_core::integrator::{rk4_step, StepWorkspace};
use higgs_core::io::save_checkpoint;
use higgs_core::{build_initial, bump_eval, max_abs, BumpSpec, Error, FieldState, Precision};

/// Result codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HgStatus {
    HgOk = 0,
    HgErrNull = 1,
    HgErrInvalid = 2,
    HgErrConfig = 3,
    HgErrNonFinite = 4,
    HgErrIo = 5,
    HgErrBuffer = 6,
    HgErrPanic = 7,
}

/// Run state reported by `hg_sim_step`.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HgStop {
    HgRunning = 0,
    HgCompleted = 1,
    HgBlowUp = 2,
    HgHaloReached = 3,
}

/// Opaque simulation handle.
pub struct HgSim {
    cfg: ExperimentConfig,
    state: FieldState<f64>,
    ws: StepWorkspace<f64>,
    stop: Option<StopReason>,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: impl Into<String>) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg.into());
}

fn status_of(e: &Error) -> HgStatus {
    match e {
        Error::Parse(_) | Error::Validation { .. } => HgStatus::HgErrConfig,
        Error::NonFinite { .. } => HgStatus::HgErrNonFinite,
        Error::Io { .. } | Error::CorruptCheckpoint { .. } => HgStatus::HgErrIo,
        _ => HgStatus::HgErrInvalid,
    }
}

fn guard(f: impl FnOnce() -> Result<(), HgStatus>) -> HgStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => HgStatus::HgOk,
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("internal panic");
            HgStatus::HgErrPanic
        }
    }
}

fn fail(e: Error) -> HgStatus {
    let s = status_of(&e);
    set_error(e.to_string());
    s
}

unsafe fn str_arg<'a>(p: *const c_char) -> Result<&'a str, HgStatus> {
    if p.is_null() {
        set_error("null string argument");
        return Err(HgStatus::HgErrNull);
    }
    CStr::from_ptr(p).to_str().map_err(|_| {
        set_error("string argument is not UTF-8");
        HgStatus::HgErrInvalid
    })
}

fn new_sim(cfg: ExperimentConfig) -> Result<Box<HgSim>, HgStatus> {
    if cfg.params.precision != Precision::Double {
        set_error("only double precision is available through the C ABI");
        return Err(HgStatus::HgErrInvalid);
    }
    let state = build_initial::<f64>(&cfg.initial, &cfg.grid).map_err(fail)?;
    let ws = StepWorkspace::new(&cfg.grid);
    let stop = stop_condition(&state, &cfg.grid, &cfg.params, &cfg.monitors);
    Ok(Box::new(HgSim { cfg, state, ws, stop }))
}

unsafe fn emit(out: *mut *mut HgSim, sim: Box<HgSim>) {
    *out = Box::into_raw(sim);
}

/// Creates a simulation from a preset name (`"example1"` … `"example7"`).
/// `n = 0` keeps the default resolution; `radial != 0` selects the radial reduction.
///
/// # Safety
/// `name` must be a valid NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hg_sim_new_preset(name: *const c_char, n: usize, radial: i32, out: *mut *mut HgSim) -> HgStatus {
    guard(|| {
        if out.is_null() {
            set_error("null output handle");
            return Err(HgStatus::HgErrNull);
        }
        let name = str_arg(name)?;
        let geometry = if radial != 0 { Geometry::Radial1D } else { Geometry::Cube3D };
        let cfg = ExperimentConfig::from_preset(name, (n > 0).then_some(n), geometry).map_err(fail)?;
        emit(out, new_sim(cfg)?);
        Ok(())
    })
}

/// Creates a simulation from TOML config text.
///
/// # Safety
/// `text` must be a valid NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hg_sim_new_from_config(text: *const c_char, out: *mut *mut HgSim) -> HgStatus {
    guard(|| {
        if out.is_null() {
            set_error("null output handle");
            return Err(HgStatus::HgErrNull);
        }
        let cfg = load_config(str_arg(text)?).map_err(fail)?;
        emit(out, new_sim(cfg)?);
        Ok(())
    })
}

/// Advances by up to `steps` RK4 steps, stopping early at `t_end` or a stop condition.
/// The run state is written to `stop` when it is non-null.
///
/// # Safety
/// `sim` must come from `hg_sim_new_*`; `stop` may be null.
#[no_mangle]
pub unsafe extern "C" fn hg_sim_step(sim: *mut HgSim, steps: u64, stop: *mut HgStop) -> HgStatus {
    guard(|| {
        let sim = sim.as_mut().ok_or_else(|| {
            set_error("null handle");
            HgStatus::HgErrNull
        })?;
        let total = sim.cfg.params.total_steps();
        let mut left = steps;
        while left > 0 && sim.stop.is_none() && sim.state.step < total {
            rk4_step(&mut sim.state, &sim.cfg.params, &sim.cfg.grid, &mut sim.ws).map_err(fail)?;
            sim.stop = stop_condition(&sim.state, &sim.cfg.grid, &sim.cfg.params, &sim.cfg.monitors);
            left -= 1;
        }
        if !stop.is_null() {
            *stop = match sim.stop {
                None if sim.state.step >= total => HgStop::HgCompleted,
                None => HgStop::HgRunning,
                Some(StopReason::Completed) => HgStop::HgCompleted,
                Some(StopReason::HaloReached { .. }) => HgStop::HgHaloReached,
                Some(_) => HgStop::HgBlowUp,
            };
        }
        Ok(())
    })
}

/// Current time, or NaN for a null handle.
///
/// # Safety
/// `sim` must come from `hg_sim_new_*` or be null.
#[no_mangle]
pub unsafe extern "C" fn hg_sim_time(sim: *const HgSim) -> f64 {
    sim.as_ref().map_or(f64::NAN, |s| s.state.t)
}

/// Number of lattice values copied by `hg_sim_copy_phi`, or 0 for a null handle.
///
/// # Safety
/// `sim` must come from `hg_sim_new_*` or be null.
#[no_mangle]
pub unsafe extern "C" fn hg_sim_len(sim: *const HgSim) -> usize {
    sim.as_ref().map_or(0, |s| s.state.v1.len())
}

/// Writes `max |phi|` to `out`.
///
/// # Safety
/// `sim` must come from `hg_sim_new_*`; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn hg_sim_max_abs(sim: *const HgSim, out: *mut f64) -> HgStatus {
    guard(|| {
        let (Some(sim), false) = (sim.as_ref(), out.is_null()) else {
            set_error("null argument");
            return Err(HgStatus::HgErrNull);
        };
        *out = max_abs(&sim.state).map_err(fail)?;
        Ok(())
    })
}

/// Copies `phi` (x fastest) into `buf`, which must hold `hg_sim_len` values.
///
/// # Safety
/// `buf` must point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn hg_sim_copy_phi(sim: *const HgSim, buf: *mut f64, len: usize) -> HgStatus {
    guard(|| {
        let (Some(sim), false) = (sim.as_ref(), buf.is_null()) else {
            set_error("null argument");
            return Err(HgStatus::HgErrNull);
        };
        let src = &sim.state.v1;
        if len < src.len() {
            set_error(format!("buffer holds {len} values, need {}", src.len()));
            return Err(HgStatus::HgErrBuffer);
        }
        ptr::copy_nonoverlapping(src.as_ptr(), buf, src.len());
        Ok(())
    })
}

/// Writes a checkpoint of the current state.
///
/// # Safety
/// `sim` must come from `hg_sim_new_*`; `path` must be a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn hg_sim_save_checkpoint(sim: *const HgSim, path: *const c_char) -> HgStatus {
    guard(|| {
        let sim = sim.as_ref().ok_or_else(|| {
            set_error("null handle");
            HgStatus::HgErrNull
        })?;
        let path = str_arg(path)?;
        save_checkpoint(&sim.state, &sim.cfg.grid, std::path::Path::new(path)).map_err(fail)
    })
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `sim` must come from `hg_sim_new_*` and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn hg_sim_free(sim: *mut HgSim) {
    if !sim.is_null() {
        drop(Box::from_raw(sim));
    }
}

/// `A exp(1/R² − 1/(R² − |x−c|²))` inside the ball, 0 outside.
#[no_mangle]
pub extern "C" fn hg_bump_eval(x: f64, y: f64, z: f64, cx: f64, cy: f64, cz: f64, radius: f64, amplitude: f64) -> f64 {
    let b = BumpSpec { center: [cx, cy, cz], radius, amplitude };
    bump_eval([x, y, z], &b)
}

/// Writes `(+√(μ²/λ), −√(μ²/λ), 0)` to `out[0..3]`.
///
/// # Safety
/// `out` must point to three writable doubles.
#[no_mangle]
pub unsafe extern "C" fn hg_duffing_equilibria(mu2: f64, lambda: f64, out: *mut f64) -> HgStatus {
    guard(|| {
        if out.is_null() {
            set_error("null output");
            return Err(HgStatus::HgErrNull);
        }
        let p = higgs_core::duffing::DuffingParams::new(mu2, lambda).map_err(fail)?;
        let e = higgs_core::duffing::equilibria(&p);
        *out = e.stable_pos;
        *out.add(1) = e.stable_neg;
        *out.add(2) = e.unstable_zero;
        Ok(())
    })
}

/// CFL bound `δx / (√3 δt)`.
#[no_mangle]
pub extern "C" fn hg_cfl_bound(dx: f64, dt: f64) -> f64 {
    dx / (3f64.sqrt() * dt)
}

/// Copies the last error message of this thread into `buf` (NUL-terminated, truncated to
/// `len`). Returns the full message length in bytes.
///
/// # Safety
/// `buf` must point to `len` writable bytes or be null.
#[no_mangle]
pub unsafe extern "C" fn hg_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && len > 0 {
            let k = msg.len().min(len - 1);
            ptr::copy_nonoverlapping(msg.as_ptr() as *const c_char, buf, k);
            *buf.add(k) = 0;
        }
        msg.len()
    })
}
