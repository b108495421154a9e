use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::field::FieldState;
use crate::grid::{Geometry, GridSpec};
use crate::real::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum VolumeEncoding {
    /// One `{:.16e}` value per line, scalar type `double`.
    #[default]
    Ascii,
    /// Big-endian 32-bit floats, scalar type `float`.
    Binary,
}

/// Writes `v1` as a legacy VTK structured-points file, x fastest.
pub fn write_volume<T: Real>(state: &FieldState<T>, grid: &GridSpec, path: &Path, encoding: VolumeEncoding) -> Result<()> {
    grid.require(Geometry::Cube3D)?;
    state.check_extents(grid)?;
    write_lattice(&state.v1, grid.n(), state.t, path, encoding)
}

/// Same format for any cubic lattice of `(n+1)³` values over the unit cube.
pub fn write_lattice<T: Real>(values: &[T], n: usize, t: f64, path: &Path, encoding: VolumeEncoding) -> Result<()> {
    let s = n + 1;
    if n == 0 || values.len() != s * s * s {
        return Err(Error::ExtentMismatch { expected: s * s * s, actual: values.len() });
    }
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let io = |e| Error::io(path, e);
    let mut w = BufWriter::new(File::create(path).map_err(io)?);
    let h = 1.0 / n as f64;
    let (mode, ty) = match encoding {
        VolumeEncoding::Ascii => ("ASCII", "double"),
        VolumeEncoding::Binary => ("BINARY", "float"),
    };
    write!(
        w,
        "# vtk DataFile Version 3.0\n\
         phi t={:.16e}\n\
         {mode}\n\
         DATASET STRUCTURED_POINTS\n\
         DIMENSIONS {s} {s} {s}\n\
         ORIGIN 0 0 0\n\
         SPACING {h:e} {h:e} {h:e}\n\
         POINT_DATA {}\n\
         SCALARS phi {ty} 1\n\
         LOOKUP_TABLE default\n",
        t,
        values.len()
    )
    .map_err(io)?;
    match encoding {
        VolumeEncoding::Ascii => {
            for v in values {
                writeln!(w, "{:.16e}", v.as_f64()).map_err(io)?;
            }
        }
        VolumeEncoding::Binary => {
            for v in values {
                w.write_all(&(v.as_f64() as f32).to_be_bytes()).map_err(io)?;
            }
            w.write_all(b"\n").map_err(io)?;
        }
    }
    w.flush().map_err(io)
}
