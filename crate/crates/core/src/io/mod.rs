//! Output formats: CSV series, legacy structured-points volumes and binary checkpoints.

pub mod checkpoint;
pub mod csv;
pub mod vtk;

pub use checkpoint::{load_checkpoint, peek_checkpoint, save_checkpoint, CheckpointHeader};
pub use csv::{read_line_csv, write_line_csv, write_portrait_csv, DiagnosticsCsv, DIAGNOSTICS_HEADER};
pub use vtk::{write_lattice, write_volume, VolumeEncoding};
