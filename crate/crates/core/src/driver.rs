//! Time loop with stop conditions and sampled diagnostics.

use crate::bubbles::DEFAULT_EPS_REL;
use crate::diagnostics::{record, DiagnosticsRecord};
use crate::error::{Error, Result};
use crate::field::{max_abs, FieldState};
use crate::grid::{Geometry, GridSpec};
use crate::initial::{build_initial, InitialData, HALO_CELLS};
use crate::integrator::{cfl_bound, rk4_step, SimParams, StepWorkspace};
use crate::real::Real;

/// Why the time loop ended.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StopReason {
    Completed,
    NonFinite { index: usize },
    CflViolation { bound: f64, observed: f64 },
    HaloReached { value: f64 },
}

impl StopReason {
    /// NaN/Inf or a CFL violation.
    pub fn is_blow_up(&self) -> bool {
        matches!(self, StopReason::NonFinite { .. } | StopReason::CflViolation { .. })
    }

    pub fn label(&self) -> &'static str {
        match self {
            StopReason::Completed => "completed",
            StopReason::NonFinite { .. } => "blow-up (non-finite)",
            StopReason::CflViolation { .. } => "blow-up (cfl)",
            StopReason::HaloReached { .. } => "halo reached",
        }
    }
}

/// Thresholds for the run monitors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Monitors {
    /// Bubble dead zone relative to `max|φ|`.
    pub eps_rel: f64,
    /// Largest `|φ|` tolerated within [`HALO_CELLS`] cells of the boundary.
    pub halo_tol: f64,
}

/// Default halo tolerance.
pub const DEFAULT_HALO_TOL: f64 = 1e-6;

impl Default for Monitors {
    fn default() -> Self {
        Monitors {
            eps_rel: DEFAULT_EPS_REL,
            halo_tol: DEFAULT_HALO_TOL,
        }
    }
}

/// Read-only hooks invoked by the driver.
pub trait Observer<T: Real> {
    fn on_step(&mut self, _state: &FieldState<T>, _grid: &GridSpec) -> Result<()> {
        Ok(())
    }

    fn on_sample(&mut self, _record: &DiagnosticsRecord, _state: &FieldState<T>, _grid: &GridSpec) -> Result<()> {
        Ok(())
    }
}

impl<T: Real> Observer<T> for () {}

#[derive(Debug, Clone)]
pub struct RunResult<T> {
    pub grid: GridSpec,
    pub params: SimParams,
    pub initial: InitialData,
    pub final_state: FieldState<T>,
    pub stop_reason: StopReason,
    pub stop_time: f64,
    pub records: Vec<DiagnosticsRecord>,
    /// First sampled time with `∫φ³ < 0`.
    pub cubic_violation_time: Option<f64>,
}

/// Largest `|v1|` on interior nodes within `halo` cells of the boundary.
pub fn halo_max<T: Real>(state: &FieldState<T>, grid: &GridSpec, halo: usize) -> f64 {
    let n = grid.n();
    let near = |c: usize| c >= 1 && (c <= halo || c + halo >= n) && c < n;
    let mut m = 0.0f64;
    match grid.geometry() {
        Geometry::Radial1D => {
            for j in n.saturating_sub(halo)..n {
                m = m.max(state.v1[j].as_f64().abs());
            }
        }
        Geometry::Cube3D => {
            for z in 1..n {
                for y in 1..n {
                    let row = grid.index(0, y, z);
                    if near(z) || near(y) {
                        for x in 1..n {
                            m = m.max(state.v1[row + x].as_f64().abs());
                        }
                    } else {
                        for x in (1..=halo).chain(n - halo..n) {
                            m = m.max(state.v1[row + x].as_f64().abs());
                        }
                    }
                }
            }
        }
    }
    m
}

/// Builds the initial state and runs to `t_end` or the first stop condition.
pub fn run_simulation<T: Real>(
    initial: &InitialData,
    params: &SimParams,
    grid: &GridSpec,
    monitors: &Monitors,
    observer: &mut dyn Observer<T>,
) -> Result<RunResult<T>> {
    params.validate()?;
    initial.validate(grid.geometry())?;
    let state = build_initial::<T>(initial, grid)?;
    advance(state, initial, params, grid, monitors, observer)
}

/// Continues an existing state (e.g. from a checkpoint) to `t_end`.
pub fn advance<T: Real>(
    mut state: FieldState<T>,
    initial: &InitialData,
    params: &SimParams,
    grid: &GridSpec,
    monitors: &Monitors,
    observer: &mut dyn Observer<T>,
) -> Result<RunResult<T>> {
    params.validate()?;
    state.check_extents(grid)?;
    if params.precision != T::PRECISION {
        return Err(Error::PrecisionMismatch {
            expected: params.precision.name(),
            found: T::PRECISION.name(),
        });
    }
    let total = params.total_steps();
    let bound = cfl_bound(grid, params);
    let mut ws = StepWorkspace::new(grid);
    let mut records = Vec::new();
    let mut cubic_violation_time = None;

    let mut sample = |state: &FieldState<T>, records: &mut Vec<DiagnosticsRecord>, observer: &mut dyn Observer<T>| -> Result<()> {
        let r = record(state, grid, params, monitors.eps_rel)?;
        if cubic_violation_time.is_none() && r.integral_phi3 < 0.0 {
            cubic_violation_time = Some(r.t);
        }
        observer.on_sample(&r, state, grid)?;
        records.push(r);
        Ok(())
    };

    let mut stop = check(&state, grid, bound, monitors);
    if !matches!(stop, Some(StopReason::NonFinite { .. })) {
        sample(&state, &mut records, observer)?;
    }
    while stop.is_none() && state.step < total {
        rk4_step(&mut state, params, grid, &mut ws)?;
        stop = check(&state, grid, bound, monitors);
        observer.on_step(&state, grid)?;
        let due = state.step % params.sample_every == 0 || state.step == total || stop.is_some();
        if due && !matches!(stop, Some(StopReason::NonFinite { .. })) {
            sample(&state, &mut records, observer)?;
        }
    }
    let stop_time = state.t;
    Ok(RunResult {
        grid: *grid,
        params: *params,
        initial: initial.clone(),
        final_state: state,
        stop_reason: stop.unwrap_or(StopReason::Completed),
        stop_time,
        records,
        cubic_violation_time,
    })
}

/// First stop condition met by `state`, if any: non-finite values, CFL violation, halo.
pub fn stop_condition<T: Real>(
    state: &FieldState<T>,
    grid: &GridSpec,
    params: &SimParams,
    monitors: &Monitors,
) -> Option<StopReason> {
    check(state, grid, cfl_bound(grid, params), monitors)
}

fn check<T: Real>(state: &FieldState<T>, grid: &GridSpec, bound: f64, monitors: &Monitors) -> Option<StopReason> {
    match max_abs(state) {
        Err(Error::NonFinite { index }) => return Some(StopReason::NonFinite { index }),
        Err(_) => unreachable!("max_abs only reports non-finite values"),
        Ok(m) if m >= bound => return Some(StopReason::CflViolation { bound, observed: m }),
        Ok(_) => {}
    }
    if let Err(Error::NonFinite { index }) = crate::field::max_abs_slice(&state.v2) {
        return Some(StopReason::NonFinite { index });
    }
    let h = halo_max(state, grid, HALO_CELLS);
    (h > monitors.halo_tol).then_some(StopReason::HaloReached { value: h })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::initial::{BumpSpec, Term};
    use crate::real::Precision;

    fn params(mu2: f64, lambda: f64, dt: f64, t_end: f64) -> SimParams {
        SimParams {
            mu2,
            lambda,
            dt,
            t_end,
            sample_every: 5,
            precision: Precision::Double,
        }
    }

    fn bump(a: f64, r: f64) -> Term {
        Term::bump(BumpSpec::new([0.5; 3], r, a).unwrap())
    }

    #[test]
    fn zero_data_runs_to_end_with_zero_diagnostics() {
        let g = GridSpec::cube(12, 5.0).unwrap();
        let data = InitialData {
            phi0: vec![],
            phi1: vec![],
        };
        let r = run_simulation::<f64>(&data, &params(9.0, 2.0, 0.01, 0.2), &g, &Monitors::default(), &mut ()).unwrap();
        assert_eq!(r.stop_reason, StopReason::Completed);
        assert_eq!(r.final_state.step, 20);
        assert!((r.stop_time - 0.2).abs() < 1e-15);
        assert_eq!(r.records.len(), 5);
        for rec in &r.records {
            assert_eq!((rec.integral_phi, rec.max_abs_phi, rec.p, rec.bubbles.count), (0.0, 0.0, 0.0, 0));
        }
    }

    #[test]
    fn cfl_violation_stops_the_run() {
        let g = GridSpec::cube(16, 1e3).unwrap();
        let data = InitialData {
            phi0: vec![bump(2.0, 0.2)],
            phi1: vec![bump(10.0, 0.2)],
        };
        // negligible coupling: every node follows the blowing-up ODE; bound ≈ 2.4
        let m = Monitors {
            halo_tol: f64::INFINITY,
            ..Monitors::default()
        };
        let r = run_simulation::<f64>(&data, &params(1.0, -1.0, 0.015, 3.0), &g, &m, &mut ()).unwrap();
        assert!(r.stop_reason.is_blow_up(), "{:?}", r.stop_reason);
        assert!(r.stop_time < 3.0);
        assert!(!r.records.last().unwrap().cfl.passed());
    }

    #[test]
    fn halo_stop() {
        let g = GridSpec::cube(16, 5.0).unwrap();
        let data = InitialData {
            phi0: vec![bump(1.0, 0.35)],
            phi1: vec![],
        };
        let m = Monitors {
            halo_tol: 1e-300,
            ..Monitors::default()
        };
        let r = run_simulation::<f64>(&data, &params(9.0, 2.0, 0.003, 1.0), &g, &m, &mut ()).unwrap();
        assert!(matches!(r.stop_reason, StopReason::HaloReached { .. }));
    }

    #[test]
    fn reruns_are_bit_identical() {
        let g = GridSpec::cube(20, 5.0).unwrap();
        let data = InitialData {
            phi0: vec![bump(1.0, 0.3)],
            phi1: vec![bump(-5.0, 0.3)],
        };
        let p = params(9.0, 2.0, 0.0025, 0.1);
        let a = run_simulation::<f64>(&data, &p, &g, &Monitors::default(), &mut ()).unwrap();
        let b = run_simulation::<f64>(&data, &p, &g, &Monitors::default(), &mut ()).unwrap();
        assert_eq!(a.records, b.records);
        assert!(a.final_state.v1.iter().zip(&b.final_state.v1).all(|(x, y)| x.to_bits() == y.to_bits()));
    }

    #[test]
    fn split_run_matches_single_run() {
        let g = GridSpec::cube(16, 5.0).unwrap();
        let data = InitialData {
            phi0: vec![bump(1.0, 0.3)],
            phi1: vec![],
        };
        let full = run_simulation::<f64>(&data, &params(9.0, 2.0, 0.005, 0.1), &g, &Monitors::default(), &mut ()).unwrap();
        let half = run_simulation::<f64>(&data, &params(9.0, 2.0, 0.005, 0.05), &g, &Monitors::default(), &mut ()).unwrap();
        let rest = advance(half.final_state, &data, &params(9.0, 2.0, 0.005, 0.1), &g, &Monitors::default(), &mut ()).unwrap();
        assert_eq!(rest.final_state, full.final_state);
    }

    struct Count(usize, usize);
    impl Observer<f64> for Count {
        fn on_step(&mut self, _: &FieldState<f64>, _: &GridSpec) -> Result<()> {
            self.0 += 1;
            Ok(())
        }
        fn on_sample(&mut self, _: &DiagnosticsRecord, _: &FieldState<f64>, _: &GridSpec) -> Result<()> {
            self.1 += 1;
            Ok(())
        }
    }

    #[test]
    fn observer_sees_every_step() {
        let g = GridSpec::cube(12, 5.0).unwrap();
        let data = InitialData {
            phi0: vec![],
            phi1: vec![],
        };
        let mut c = Count(0, 0);
        run_simulation::<f64>(&data, &params(9.0, 2.0, 0.01, 0.12), &g, &Monitors::default(), &mut c).unwrap();
        assert_eq!((c.0, c.1), (12, 4));
    }
}
