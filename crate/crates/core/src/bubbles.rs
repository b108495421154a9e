//! Bubble census: walls are nodes where the field changes sign against a 6-neighbour,
//! grouped into 26-connected components.

use rayon::prelude::*;

use crate::field::FieldState;
use crate::grid::{Geometry, GridSpec};
use crate::real::Real;

#[derive(Debug, Clone, PartialEq)]
pub struct Bubble {
    pub interface_nodes: usize,
    pub bbox_min: [usize; 3],
    pub bbox_max: [usize; 3],
    /// `(3 V_neg / 4π)^{1/3}` in 3D; the wall radius on radial grids.
    pub effective_radius: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct BubbleCensus {
    pub count: usize,
    pub bubbles: Vec<Bubble>,
}

/// Default dead zone: `1e-9 * max|φ|`.
pub const DEFAULT_EPS_REL: f64 = 1e-9;

pub fn detect_bubbles<T: Real>(state: &FieldState<T>, grid: &GridSpec, eps_zero: f64) -> BubbleCensus {
    match grid.geometry() {
        Geometry::Cube3D => census_cube(&state.v1, grid, eps_zero),
        Geometry::Radial1D => census_radial(&state.v1, grid, eps_zero),
    }
}

#[inline]
fn sign<T: Real>(v: T, eps: f64) -> i8 {
    let v = v.as_f64();
    if v > eps {
        1
    } else if v < -eps {
        -1
    } else {
        0
    }
}

fn census_radial<T: Real>(phi: &[T], grid: &GridSpec, eps: f64) -> BubbleCensus {
    let mut bubbles = Vec::new();
    let mut last: Option<(usize, i8)> = None;
    for (j, &v) in phi.iter().enumerate() {
        let sj = sign(v, eps);
        if sj == 0 {
            continue;
        }
        if let Some((i, si)) = last {
            if si != sj {
                let (a, b) = (phi[i].as_f64(), v.as_f64());
                let r = grid.coord(i) + (grid.coord(j) - grid.coord(i)) * a / (a - b);
                bubbles.push(Bubble {
                    interface_nodes: 2,
                    bbox_min: [i, 0, 0],
                    bbox_max: [j, 0, 0],
                    effective_radius: r,
                });
            }
        }
        last = Some((j, sj));
    }
    BubbleCensus {
        count: bubbles.len(),
        bubbles,
    }
}

fn census_cube<T: Real>(phi: &[T], grid: &GridSpec, eps: f64) -> BubbleCensus {
    let n = grid.n();
    let s = n + 1;
    let plane = s * s;
    let signs: Vec<i8> = phi.par_iter().map(|&v| sign(v, eps)).collect();
    let mut marked = vec![false; phi.len()];
    marked.par_chunks_mut(plane).enumerate().for_each(|(z, out)| {
        for y in 0..s {
            for x in 0..s {
                let i = x + s * y + plane * z;
                let si = signs[i];
                if si == 0 {
                    continue;
                }
                let opp = -si;
                out[x + s * y] = if x > 0 && y > 0 && z > 0 && x < n && y < n && z < n {
                    signs[i - 1] == opp
                        || signs[i + 1] == opp
                        || signs[i - s] == opp
                        || signs[i + s] == opp
                        || signs[i - plane] == opp
                        || signs[i + plane] == opp
                } else {
                    let c = [x, y, z];
                    let stride = [1, s, plane];
                    (0..3).any(|a| {
                        (c[a] > 0 && signs[i - stride[a]] == opp) || (c[a] < n && signs[i + stride[a]] == opp)
                    })
                };
            }
        }
    });

    let h3 = grid.cell_measure();
    let mut bubbles = Vec::new();
    let mut seen = vec![false; phi.len()];
    let mut stack = Vec::new();
    for start in 0..phi.len() {
        if !marked[start] || seen[start] {
            continue;
        }
        seen[start] = true;
        stack.push(start);
        let mut count = 0;
        let mut lo = [usize::MAX; 3];
        let mut hi = [0usize; 3];
        while let Some(i) = stack.pop() {
            count += 1;
            let (x, y, z) = grid.unindex(i);
            for (a, c) in [x, y, z].into_iter().enumerate() {
                lo[a] = lo[a].min(c);
                hi[a] = hi[a].max(c);
            }
            for dz in -1isize..=1 {
                for dy in -1isize..=1 {
                    for dx in -1isize..=1 {
                        let (nx, ny, nz) = (x as isize + dx, y as isize + dy, z as isize + dz);
                        if nx < 0 || ny < 0 || nz < 0 || nx > n as isize || ny > n as isize || nz > n as isize {
                            continue;
                        }
                        let j = grid.index(nx as usize, ny as usize, nz as usize);
                        if marked[j] && !seen[j] {
                            seen[j] = true;
                            stack.push(j);
                        }
                    }
                }
            }
        }
        let mut negative = 0usize;
        for z in lo[2]..=hi[2] {
            for y in lo[1]..=hi[1] {
                let row = grid.index(0, y, z);
                negative += signs[row + lo[0]..=row + hi[0]].iter().filter(|&&v| v < 0).count();
            }
        }
        let volume = negative as f64 * h3;
        bubbles.push(Bubble {
            interface_nodes: count,
            bbox_min: lo,
            bbox_max: hi,
            effective_radius: (3.0 * volume / (4.0 * std::f64::consts::PI)).cbrt(),
        });
    }
    BubbleCensus {
        count: bubbles.len(),
        bubbles,
    }
}
