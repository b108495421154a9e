use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Smallest admissible resolution: the 5-point stencil needs two halo layers plus interior.
pub const MIN_RESOLUTION: usize = 9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
pub enum Geometry {
    #[default]
    #[serde(rename = "cube")]
    Cube3D,
    #[serde(rename = "radial")]
    Radial1D,
}

/// Uniform lattice over the unit cube `[0,1]^3` (or the unit radial interval).
///
/// `n` counts intervals per axis; nodes are indexed `0..=n` and both ends are stored.
/// Flat storage is x-fastest: `idx = x + (n+1) * (y + (n+1) * z)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    n: usize,
    scale: f64,
    geometry: Geometry,
}

impl GridSpec {
    pub fn new(n: usize, scale: f64, geometry: Geometry) -> Result<Self> {
        if n < MIN_RESOLUTION {
            return Err(Error::InvalidGrid(format!(
                "resolution {n} is below the minimum {MIN_RESOLUTION}"
            )));
        }
        if !(scale.is_finite() && scale > 0.0) {
            return Err(Error::InvalidGrid(format!("scaling L must be > 0, got {scale}")));
        }
        Ok(Self { n, scale, geometry })
    }

    pub fn cube(n: usize, scale: f64) -> Result<Self> {
        Self::new(n, scale, Geometry::Cube3D)
    }

    pub fn radial(n: usize, scale: f64) -> Result<Self> {
        Self::new(n, scale, Geometry::Radial1D)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Scaling factor `L` of the rescaled equation.
    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn geometry(&self) -> Geometry {
        self.geometry
    }

    pub fn spacing(&self) -> f64 {
        1.0 / self.n as f64
    }

    pub fn points_per_axis(&self) -> usize {
        self.n + 1
    }

    pub fn len(&self) -> usize {
        let s = self.points_per_axis();
        match self.geometry {
            Geometry::Cube3D => s * s * s,
            Geometry::Radial1D => s,
        }
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Coordinate of lattice index `j` along an axis. Exact at both ends.
    #[inline]
    pub fn coord(&self, j: usize) -> f64 {
        j as f64 / self.n as f64
    }

    #[inline]
    pub fn index(&self, x: usize, y: usize, z: usize) -> usize {
        let s = self.n + 1;
        x + s * (y + s * z)
    }

    #[inline]
    pub fn unindex(&self, idx: usize) -> (usize, usize, usize) {
        let s = self.n + 1;
        (idx % s, (idx / s) % s, idx / (s * s))
    }

    /// True when any coordinate of the node lies on the domain boundary.
    #[inline]
    pub fn is_boundary(&self, x: usize, y: usize, z: usize) -> bool {
        x == 0 || y == 0 || z == 0 || x == self.n || y == self.n || z == self.n
    }

    /// True when the node lies within `halo` cells of the boundary (boundary included).
    #[inline]
    pub fn in_halo(&self, x: usize, y: usize, z: usize, halo: usize) -> bool {
        let lo = halo;
        let hi = self.n - halo;
        x <= lo || y <= lo || z <= lo || x >= hi || y >= hi || z >= hi
    }

    pub fn require(&self, geometry: Geometry) -> Result<()> {
        if self.geometry == geometry {
            Ok(())
        } else {
            Err(Error::GeometryMismatch {
                expected: geometry,
                actual: self.geometry,
            })
        }
    }

    /// Cell volume used by quadrature (`δx³` in 3D, `δr` radially).
    pub fn cell_measure(&self) -> f64 {
        let h = self.spacing();
        match self.geometry {
            Geometry::Cube3D => h * h * h,
            Geometry::Radial1D => h,
        }
    }
}
