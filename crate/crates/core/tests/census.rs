use higgs_core::{build_initial, detect_bubbles, BumpSpec, FieldState, GridSpec, InitialData, Term};
use proptest::prelude::*;

const PERMS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];

fn transform(g: &GridSpec, f: &[f64], perm: [usize; 3], flip: [bool; 3]) -> Vec<f64> {
    let n = g.n();
    let mut out = vec![0.0; g.len()];
    for (i, &v) in f.iter().enumerate() {
        let (x, y, z) = g.unindex(i);
        let p = [x, y, z];
        let mut q = [p[perm[0]], p[perm[1]], p[perm[2]]];
        for a in 0..3 {
            if flip[a] {
                q[a] = n - q[a];
            }
        }
        out[g.index(q[0], q[1], q[2])] = v;
    }
    out
}

/// Two shells: each is a positive bump with a stronger, narrower negative core.
fn shells(c1: [f64; 3], c2: [f64; 3], r: f64) -> InitialData {
    let b = |c, rad, a| Term::bump(BumpSpec::new(c, rad, a).unwrap());
    InitialData {
        phi0: vec![b(c1, r, 1.0), b(c1, 0.75 * r, -4.0), b(c2, r, 1.0), b(c2, 0.75 * r, -4.0)],
        phi1: vec![],
    }
}

fn signature(state: &FieldState<f64>, g: &GridSpec) -> (usize, Vec<(usize, u64)>) {
    let eps = 1e-9 * state.v1.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let c = detect_bubbles(state, g, eps);
    let mut b: Vec<(usize, u64)> = c.bubbles.iter().map(|b| (b.interface_nodes, (b.effective_radius * 1e9).round() as u64)).collect();
    b.sort();
    (c.count, b)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn census_is_invariant_under_cube_symmetries(
        x1 in 0.28f64..0.4, y1 in 0.28f64..0.72, x2 in 0.6f64..0.72, z2 in 0.28f64..0.72,
        r in 0.14f64..0.2, p in 0usize..6, fl in 0u8..8,
    ) {
        let g = GridSpec::cube(32, 1.0).unwrap();
        let data = shells([x1, y1, 0.5], [x2, 0.5, z2], r);
        let s = build_initial::<f64>(&data, &g).unwrap();
        let mut moved = s.clone();
        moved.v1 = transform(&g, &s.v1, PERMS[p], [fl & 1 != 0, fl & 2 != 0, fl & 4 != 0]);
        let a = signature(&s, &g);
        prop_assert!(a.0 >= 1);
        prop_assert_eq!(a, signature(&moved, &g));
    }

    #[test]
    fn census_count_is_invariant_under_sign_flip(x1 in 0.28f64..0.4, x2 in 0.6f64..0.72, r in 0.14f64..0.2) {
        let g = GridSpec::cube(32, 1.0).unwrap();
        let s = build_initial::<f64>(&shells([x1, 0.5, 0.5], [x2, 0.5, 0.5], r), &g).unwrap();
        let mut flipped = s.clone();
        flipped.v1.iter_mut().for_each(|v| *v = -*v);
        let a = signature(&s, &g);
        let b = signature(&flipped, &g);
        prop_assert_eq!(a.0, b.0);
        let wa: Vec<usize> = a.1.iter().map(|x| x.0).collect();
        let wb: Vec<usize> = b.1.iter().map(|x| x.0).collect();
        prop_assert_eq!(wa, wb);
    }
}

#[test]
fn separated_shells_give_two_bubbles() {
    let g = GridSpec::cube(48, 1.0).unwrap();
    let s = build_initial::<f64>(&shells([0.3, 0.5, 0.5], [0.7, 0.5, 0.5], 0.17), &g).unwrap();
    assert_eq!(signature(&s, &g).0, 2);
}

#[test]
fn overlapping_shells_merge() {
    let g = GridSpec::cube(48, 1.0).unwrap();
    let s = build_initial::<f64>(&shells([0.46, 0.5, 0.5], [0.54, 0.5, 0.5], 0.17), &g).unwrap();
    assert_eq!(signature(&s, &g).0, 1);
}
