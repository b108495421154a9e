mod common;

use higgs_core::stencil::{laplacian_3d, operator_crosscheck};
use higgs_core::{bump_eval, BumpSpec, GridSpec};
use proptest::prelude::*;

use common::{cube_monomial_error, radial_monomial_error, spatial_order};

#[test]
fn cube_stencil_exact_on_low_degree_monomials() {
    let err = cube_monomial_error(12);
    assert!(err <= 1e-12, "max error {err:e}");
}

#[test]
fn radial_operator_exact_on_low_degree_monomials() {
    let err = radial_monomial_error(16);
    assert!(err <= 1e-12, "max error {err:e}");
}

#[test]
fn cube_quadratic_gives_six() {
    let g = GridSpec::cube(16, 1.0).unwrap();
    let s = g.points_per_axis();
    let mut f = vec![0.0; g.len()];
    for z in 0..s {
        for y in 0..s {
            for x in 0..s {
                f[g.index(x, y, z)] = g.coord(x).powi(2) + g.coord(y).powi(2) + g.coord(z).powi(2);
            }
        }
    }
    let lap = laplacian_3d(&f, &g).unwrap();
    for z in 2..=14 {
        for y in 2..=14 {
            for x in 2..=14 {
                assert!((lap[g.index(x, y, z)] - 6.0).abs() < 1e-10);
            }
        }
    }
}

#[test]
fn trigonometric_spatial_order() {
    let (order, errs) = spatial_order(&[32, 64, 128]);
    assert!(errs.windows(2).all(|w| w[1] < w[0]), "{errs:?}");
    assert!(order >= 3.7, "observed order {order} ({errs:?})");
}

fn crosscheck(n: usize) -> f64 {
    let bump = BumpSpec::new([0.5; 3], 0.3, 1.0).unwrap();
    let g3 = GridSpec::cube(n, 1.0).unwrap();
    let g1 = GridSpec::radial(n, 1.0).unwrap();
    operator_crosscheck(&bump, &g3, &g1).unwrap().max_discrepancy
}

#[test]
fn radial_and_cube_operators_agree_on_centered_bump() {
    let d64 = crosscheck(64);
    let d128 = crosscheck(128);
    // measured 1.8748e-2 at N=128
    assert!(d128 < 1.88e-2, "N=128 discrepancy {d128:e}");
    assert!(d64 / d128 >= 8.0, "refinement ratio {}", d64 / d128);
}

#[test]
fn crosscheck_of_zero_field_is_zero() {
    let bump = BumpSpec::new([0.5; 3], 0.3, 0.0).unwrap();
    let g3 = GridSpec::cube(32, 1.0).unwrap();
    let g1 = GridSpec::radial(32, 1.0).unwrap();
    assert_eq!(operator_crosscheck(&bump, &g3, &g1).unwrap().max_discrepancy, 0.0);
}

/// Exact `φ'' + 2φ'/r` of the unit bump of radius `rr` centered at the origin.
fn bump_laplacian(r: f64, rr: f64) -> f64 {
    if r >= rr {
        return 0.0;
    }
    let q = rr * rr - r * r;
    let f = (1.0 / (rr * rr) - 1.0 / q).exp();
    let g1 = -2.0 * r / (q * q);
    let g2 = -2.0 / (q * q) - 8.0 * r * r / (q * q * q);
    let f2 = f * (g2 + g1 * g1);
    if r == 0.0 {
        3.0 * f2
    } else {
        f2 + 2.0 * f * g1 / r
    }
}

#[test]
fn radial_operator_converges_to_exact_bump_laplacian() {
    let errs: Vec<f64> = [32usize, 64, 128]
        .iter()
        .map(|&n| {
            let g = GridSpec::radial(n, 1.0).unwrap();
            let b = BumpSpec::radial(0.0, 0.3, 1.0).unwrap();
            let line: Vec<f64> = (0..=n).map(|j| bump_eval([g.coord(j), 0.0, 0.0], &b)).collect();
            let out = higgs_core::stencil::radial_operator(&line, &g).unwrap();
            (0..=n).fold(0.0f64, |m, j| m.max((out[j] - bump_laplacian(g.coord(j), 0.3)).abs()))
        })
        .collect();
    let h = [1.0 / 32.0, 1.0 / 64.0, 1.0 / 128.0];
    let order = common::loglog_slope(&h[1..], &errs[1..]);
    assert!(order >= 3.7, "order {order} ({errs:?})");
}

fn sample(g: &GridSpec, f: impl Fn([f64; 3]) -> f64) -> Vec<f64> {
    let s = g.points_per_axis();
    let mut out = vec![0.0; g.len()];
    for z in 0..s {
        for y in 0..s {
            for x in 0..s {
                out[g.index(x, y, z)] = f([g.coord(x), g.coord(y), g.coord(z)]);
            }
        }
    }
    out
}

/// Applies one of the 48 cube symmetries (axis permutation `perm`, reflections `flip`).
fn transform(g: &GridSpec, f: &[f64], perm: [usize; 3], flip: [bool; 3]) -> Vec<f64> {
    let n = g.n();
    let s = g.points_per_axis();
    let mut out = vec![0.0; g.len()];
    for z in 0..s {
        for y in 0..s {
            for x in 0..s {
                let p = [x, y, z];
                let mut q = [p[perm[0]], p[perm[1]], p[perm[2]]];
                for a in 0..3 {
                    if flip[a] {
                        q[a] = n - q[a];
                    }
                }
                out[g.index(q[0], q[1], q[2])] = f[g.index(x, y, z)];
            }
        }
    }
    out
}

const PERMS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn laplacian_is_linear(a in -3.0f64..3.0, b in -3.0f64..3.0, cx in 0.35f64..0.65, r in 0.1f64..0.3) {
        let g = GridSpec::cube(20, 1.0).unwrap();
        let bf = BumpSpec::new([cx, 0.5, 0.45], r, 1.0).unwrap();
        let bg = BumpSpec::new([0.5, 0.55, cx], 0.3, -2.0).unwrap();
        let f = sample(&g, |x| bump_eval(x, &bf));
        let h = sample(&g, |x| bump_eval(x, &bg));
        let comb: Vec<f64> = f.iter().zip(&h).map(|(u, v)| a * u + b * v).collect();
        let lf = laplacian_3d(&f, &g).unwrap();
        let lh = laplacian_3d(&h, &g).unwrap();
        let lc = laplacian_3d(&comb, &g).unwrap();
        let scale = lf.iter().zip(&lh).fold(0.0f64, |m, (u, v)| m.max((a * u).abs() + (b * v).abs()));
        for i in 0..g.len() {
            prop_assert!((lc[i] - (a * lf[i] + b * lh[i])).abs() <= 1e-13 * scale.max(1e-300));
        }
    }

    #[test]
    fn laplacian_commutes_with_cube_symmetries(r in 0.15f64..0.45, amp in -3.0f64..3.0, p in 0usize..6, fl in 0u8..8) {
        let g = GridSpec::cube(16, 1.0).unwrap();
        let bump = BumpSpec::new([0.5; 3], r, amp).unwrap();
        let f = sample(&g, |x| bump_eval(x, &bump));
        let lap = laplacian_3d(&f, &g).unwrap();
        let flip = [fl & 1 != 0, fl & 2 != 0, fl & 4 != 0];
        let moved = transform(&g, &lap, PERMS[p], flip);
        let scale = lap.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for i in 0..g.len() {
            prop_assert!((moved[i] - lap[i]).abs() <= 1e-12 * scale);
        }
    }

    #[test]
    fn zero_extension_matches_padded_lattice(cx in 0.4f64..0.6, r in 0.1f64..0.3, amp in -2.0f64..2.0) {
        let n = 20;
        let g = GridSpec::cube(n, 1.0).unwrap();
        let big = GridSpec::cube(n + 4, 1.0).unwrap();
        let bump = BumpSpec::new([cx, 0.5, 0.5], r, amp).unwrap();
        let f = sample(&g, |x| bump_eval(x, &bump));
        let mut padded = vec![0.0; big.len()];
        for z in 0..=n {
            for y in 0..=n {
                for x in 0..=n {
                    padded[big.index(x + 2, y + 2, z + 2)] = f[g.index(x, y, z)];
                }
            }
        }
        let lap = laplacian_3d(&f, &g).unwrap();
        let lap_big = laplacian_3d(&padded, &big).unwrap();
        let rescale = (big.spacing() / g.spacing()).powi(2);
        let scale = lap.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for z in 1..n {
            for y in 1..n {
                for x in 1..n {
                    let d = lap[g.index(x, y, z)] - lap_big[big.index(x + 2, y + 2, z + 2)] * rescale;
                    prop_assert!(d.abs() <= 1e-13 * scale);
                }
            }
        }
    }
}

