//! Solver and diagnostics for the semilinear Klein–Gordon equation with Higgs potential
//! in de Sitter spacetime,
//!
//! ```text
//! φ_tt − (e^{−2t}/L²) Δφ + 3φ_t = μ²φ − λφ³   on [0,1]³, φ = 0 on the boundary,
//! ```
//!
//! discretized with 4th-order central differences in space and classical RK4 in time,
//! together with its radial reduction and the limiting damped Duffing equation.

pub mod bubbles;
pub mod cli;
pub mod config;
pub mod diagnostics;
pub mod driver;
pub mod duffing;
pub mod error;
pub mod experiment;
pub mod field;
pub mod grid;
pub mod initial;
pub mod io;
pub mod integrator;
pub mod lines;
pub mod real;
pub mod stencil;

pub use bubbles::{detect_bubbles, Bubble, BubbleCensus};
pub use diagnostics::{integral_phi, integral_phi3, smoothness_p, DiagnosticsRecord};
pub use driver::{advance, run_simulation, Monitors, Observer, RunResult, StopReason};
pub use error::{Error, Result};
pub use field::{max_abs, FieldState};
pub use grid::{Geometry, GridSpec};
pub use initial::{bump_eval, build_initial, BumpSpec, InitialData, Term};
pub use integrator::{cfl_check, rhs, rk4_reuse, rk4_step, rk4_step_textbook, CflStatus, SimParams, StepWorkspace};
pub use lines::{compare_grids, compare_lines, extract_line, radial_profile, DifferenceSeries, LineKind, LineSeries};
pub use real::{Precision, Real};
