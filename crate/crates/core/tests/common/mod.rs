#![allow(dead_code)]

pub mod infra;

use higgs_core::duffing::{integrate_duffing, DuffingParams};
use higgs_core::integrator::{rk4_step, rk4_step_textbook, StepWorkspace};
use higgs_core::stencil::{laplacian_3d, radial_operator};
use higgs_core::{build_initial, BumpSpec, FieldState, GridSpec, InitialData, Precision, SimParams, Term};

/// Least-squares slope of `log(err)` against `log(h)`.
pub fn loglog_slope(h: &[f64], err: &[f64]) -> f64 {
    let x: Vec<f64> = h.iter().map(|v| v.ln()).collect();
    let y: Vec<f64> = err.iter().map(|v| v.ln()).collect();
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(&y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

fn pow(x: f64, k: i32) -> f64 {
    if k < 0 {
        0.0
    } else {
        x.powi(k)
    }
}

/// Max over all monomials `x^a y^b z^c` (`a, b, c <= 5`) of the absolute Laplacian error at
/// nodes whose stencil stays inside the lattice.
pub fn cube_monomial_error(n: usize) -> f64 {
    let g = GridSpec::cube(n, 1.0).unwrap();
    let s = g.points_per_axis();
    let mut worst = 0.0f64;
    for a in 0..=5i32 {
        for b in 0..=5i32 {
            for c in 0..=5i32 {
                let mut f = vec![0.0f64; g.len()];
                for z in 0..s {
                    for y in 0..s {
                        for x in 0..s {
                            f[g.index(x, y, z)] = pow(g.coord(x), a) * pow(g.coord(y), b) * pow(g.coord(z), c);
                        }
                    }
                }
                let lap = laplacian_3d(&f, &g).unwrap();
                for z in 2..=n - 2 {
                    for y in 2..=n - 2 {
                        for x in 2..=n - 2 {
                            let (px, py, pz) = (g.coord(x), g.coord(y), g.coord(z));
                            let exact = (a * (a - 1)) as f64 * pow(px, a - 2) * pow(py, b) * pow(pz, c)
                                + (b * (b - 1)) as f64 * pow(px, a) * pow(py, b - 2) * pow(pz, c)
                                + (c * (c - 1)) as f64 * pow(px, a) * pow(py, b) * pow(pz, c - 2);
                            worst = worst.max((lap[g.index(x, y, z)] - exact).abs());
                        }
                    }
                }
            }
        }
    }
    worst
}

/// Max absolute error of the radial operator on `r^k`, `k <= 4`, at interior nodes, and on
/// the even monomials `1, r², r⁴` at every node whose stencil stays below `r = 1`
/// (including `r = 0` and the reflected node `j = 1`).
pub fn radial_monomial_error(n: usize) -> f64 {
    let g = GridSpec::radial(n, 1.0).unwrap();
    let mut worst = 0.0f64;
    for k in 0..=4i32 {
        let f: Vec<f64> = (0..=n).map(|j| pow(g.coord(j), k)).collect();
        let out = radial_operator(&f, &g).unwrap();
        let first = if k % 2 == 0 { 0 } else { 2 };
        for (j, v) in out.iter().enumerate().take(n - 1).skip(first) {
            let r = g.coord(j);
            let exact = if k < 2 { if k == 1 { 2.0 / r } else { 0.0 } } else { (k * (k + 1)) as f64 * pow(r, k - 2) };
            worst = worst.max((v - exact).abs());
        }
    }
    worst
}

/// Max error of the 3D Laplacian of `sin(2πx) sin(2πy) sin(2πz)` against `-12π²` times the
/// field, over nodes whose stencil stays inside the lattice.
pub fn trig_laplacian_error(n: usize) -> f64 {
    let g = GridSpec::cube(n, 1.0).unwrap();
    let s = g.points_per_axis();
    let tau = std::f64::consts::TAU;
    let sines: Vec<f64> = (0..s).map(|j| (tau * g.coord(j)).sin()).collect();
    let mut f = vec![0.0f64; g.len()];
    for z in 0..s {
        for y in 0..s {
            for x in 0..s {
                f[g.index(x, y, z)] = sines[x] * sines[y] * sines[z];
            }
        }
    }
    let lap = laplacian_3d(&f, &g).unwrap();
    let k = -3.0 * tau * tau;
    let mut worst = 0.0f64;
    for z in 2..=n - 2 {
        for y in 2..=n - 2 {
            for x in 2..=n - 2 {
                let i = g.index(x, y, z);
                worst = worst.max((lap[i] - k * f[i]).abs());
            }
        }
    }
    worst
}

/// Observed spatial order over `ns` and the errors.
pub fn spatial_order(ns: &[usize]) -> (f64, Vec<f64>) {
    let errs: Vec<f64> = ns.iter().map(|&n| trig_laplacian_error(n)).collect();
    let h: Vec<f64> = ns.iter().map(|&n| 1.0 / n as f64).collect();
    (loglog_slope(&h, &errs), errs)
}

pub const SURROGATE_MU2: f64 = 9.0;
pub const SURROGATE_LAMBDA: f64 = 2.0;
pub const SURROGATE_Y0: [f64; 2] = [0.5, 0.25];

/// Single-node state on a huge-`L` lattice, advanced to `t = 1` with step `dt`; returns
/// `(v1, v2)` at the node.
pub fn surrogate_run(dt: f64) -> [f64; 2] {
    let g = GridSpec::cube(10, 1e9).unwrap();
    let p = SimParams { mu2: SURROGATE_MU2, lambda: SURROGATE_LAMBDA, dt, t_end: 1.0, sample_every: 1, precision: Precision::Double };
    let mut s = FieldState::<f64>::zeros(&g);
    let i = g.index(5, 5, 5);
    s.v1[i] = SURROGATE_Y0[0];
    s.v2[i] = SURROGATE_Y0[1];
    let mut ws = StepWorkspace::new(&g);
    for _ in 0..p.total_steps() {
        rk4_step(&mut s, &p, &g, &mut ws).unwrap();
    }
    assert!((s.t - 1.0).abs() < 1e-12);
    [s.v1[i], s.v2[i]]
}

/// Observed temporal order over `dts` against a fine Duffing reference, and the errors.
pub fn temporal_order(dts: &[f64]) -> (f64, Vec<f64>) {
    let dp = DuffingParams::new(SURROGATE_MU2, SURROGATE_LAMBDA).unwrap();
    let tr = integrate_duffing(SURROGATE_Y0, &dp, 1e-5, 1.0).unwrap();
    let reference = [*tr.phi.last().unwrap(), *tr.phi_t.last().unwrap()];
    let errs: Vec<f64> = dts
        .iter()
        .map(|&dt| {
            let y = surrogate_run(dt);
            (y[0] - reference[0]).abs().max((y[1] - reference[1]).abs())
        })
        .collect();
    (loglog_slope(dts, &errs), errs)
}

/// Two off-center bumps in `φ0` and one in `φ1`.
pub fn random_bump_data() -> InitialData {
    let b = |c: [f64; 3], r, a| Term::bump(BumpSpec::new(c, r, a).unwrap());
    InitialData {
        phi0: vec![b([0.45, 0.52, 0.5], 0.3, 1.7), b([0.6, 0.4, 0.55], 0.2, -0.9)],
        phi1: vec![b([0.5, 0.55, 0.47], 0.25, 2.3)],
    }
}

/// Max relative deviation between the reuse and textbook RK4 forms after `steps` steps.
pub fn reuse_vs_textbook(grid: &GridSpec, steps: usize) -> f64 {
    let data = if grid.geometry() == higgs_core::Geometry::Radial1D {
        let b = |c: f64, r, a| Term::bump(BumpSpec::radial(c, r, a).unwrap());
        InitialData { phi0: vec![b(0.0, 0.4, 1.7)], phi1: vec![b(0.2, 0.15, -2.0)] }
    } else {
        random_bump_data()
    };
    let p = SimParams {
        mu2: 9.0,
        lambda: 2.0,
        dt: grid.spacing() / 20.0,
        t_end: 1.0,
        sample_every: 1,
        precision: Precision::Double,
    };
    let mut a = build_initial::<f64>(&data, grid).unwrap();
    let mut b = a.clone();
    let mut ws = StepWorkspace::new(grid);
    for _ in 0..steps {
        rk4_step(&mut a, &p, grid, &mut ws).unwrap();
        b = rk4_step_textbook(&b, &p, grid).unwrap();
    }
    let scale = a.v1.iter().chain(&a.v2).fold(0.0f64, |m, v| m.max(v.abs()));
    let dev = a.v1.iter().zip(&b.v1).chain(a.v2.iter().zip(&b.v2)).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
    dev / scale
}
