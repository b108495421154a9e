//! Runs an [`ExperimentConfig`] end to end and writes its artifacts.

use std::path::{Path, PathBuf};

use crate::config::ExperimentConfig;
use crate::diagnostics::DiagnosticsRecord;
use crate::driver::{advance, run_simulation, Observer, RunResult, StopReason};
use crate::error::Result;
use crate::field::FieldState;
use crate::grid::{Geometry, GridSpec};
use crate::io::{save_checkpoint, write_line_csv, write_volume, DiagnosticsCsv, VolumeEncoding};
use crate::lines::{extract_line, radial_profile};
use crate::real::Real;

/// Writes the diagnostics series as it is produced and volume dumps at requested times.
pub struct FileSink {
    csv: DiagnosticsCsv,
    dir: PathBuf,
    pending: Vec<f64>,
    half_dt: f64,
    encoding: VolumeEncoding,
    skip_next: bool,
    pub written: Vec<PathBuf>,
}

impl FileSink {
    pub fn new(cfg: &ExperimentConfig, append: bool) -> Result<Self> {
        let path = cfg.output_dir.join("diagnostics.csv");
        let csv = if append { DiagnosticsCsv::append(&path)? } else { DiagnosticsCsv::create(&path)? };
        let mut pending = cfg.volume_times.clone();
        pending.sort_by(f64::total_cmp);
        Ok(Self {
            csv,
            dir: cfg.output_dir.clone(),
            pending,
            half_dt: 0.5 * cfg.params.dt,
            encoding: if cfg.volume_binary { VolumeEncoding::Binary } else { VolumeEncoding::Ascii },
            skip_next: false,
            written: vec![],
        })
    }

    fn dump_volumes<T: Real>(&mut self, state: &FieldState<T>, grid: &GridSpec) -> Result<()> {
        while let Some(&t) = self.pending.first() {
            if state.t + self.half_dt < t {
                break;
            }
            self.pending.remove(0);
            if (state.t - t).abs() <= self.half_dt {
                let p = self.dir.join(format!("volume_t{t:.4}.vtk"));
                write_volume(state, grid, &p, self.encoding)?;
                self.written.push(p);
            }
        }
        Ok(())
    }
}

impl<T: Real> Observer<T> for FileSink {
    fn on_step(&mut self, state: &FieldState<T>, grid: &GridSpec) -> Result<()> {
        self.dump_volumes(state, grid)
    }

    fn on_sample(&mut self, record: &DiagnosticsRecord, state: &FieldState<T>, grid: &GridSpec) -> Result<()> {
        if state.step == 0 {
            self.dump_volumes(state, grid)?;
        }
        if std::mem::take(&mut self.skip_next) {
            return Ok(());
        }
        self.csv.push(record)
    }
}

/// Outcome of an experiment together with the files it produced.
pub struct Outcome<T> {
    pub result: RunResult<T>,
    pub files: Vec<PathBuf>,
}

/// Line cuts (or the radial profile) and a checkpoint of the final state.
fn write_final<T: Real>(cfg: &ExperimentConfig, r: &RunResult<T>, files: &mut Vec<PathBuf>) -> Result<()> {
    let dir = &cfg.output_dir;
    match cfg.grid.geometry() {
        Geometry::Cube3D => {
            for kind in &cfg.lines {
                let p = dir.join(format!("line_{}.csv", kind.name()));
                write_line_csv(&extract_line(&r.final_state, &r.grid, *kind)?, &p)?;
                files.push(p);
            }
        }
        Geometry::Radial1D => {
            let p = dir.join("radial_profile.csv");
            write_line_csv(&radial_profile(&r.final_state, &r.grid)?, &p)?;
            files.push(p);
        }
    }
    let p = dir.join("checkpoint.bin");
    save_checkpoint(&r.final_state, &r.grid, &p)?;
    files.push(p);
    let p = dir.join("summary.txt");
    std::fs::write(&p, summary(r)).map_err(|e| crate::error::Error::io(&p, e))?;
    files.push(p);
    Ok(())
}

pub fn summary<T: Real>(r: &RunResult<T>) -> String {
    let mut s = format!("stop_reason: {}\nstop_time: {}\nsteps: {}\n", r.stop_reason.label(), r.stop_time, r.final_state.step);
    match r.stop_reason {
        StopReason::CflViolation { bound, observed } => s += &format!("cfl_bound: {bound}\ncfl_observed: {observed}\n"),
        StopReason::HaloReached { value } => s += &format!("halo_value: {value}\n"),
        StopReason::NonFinite { index } => s += &format!("non_finite_index: {index}\n"),
        StopReason::Completed => {}
    }
    if let Some(t) = r.cubic_violation_time {
        s += &format!("integral_phi3_negative_from: {t}\n");
    }
    s
}

pub fn run_experiment<T: Real>(cfg: &ExperimentConfig) -> Result<Outcome<T>> {
    let mut sink = FileSink::new(cfg, false)?;
    let result = run_simulation::<T>(&cfg.initial, &cfg.params, &cfg.grid, &cfg.monitors, &mut sink)?;
    let mut files = vec![sink.csv.path().to_path_buf()];
    files.append(&mut sink.written);
    write_final(cfg, &result, &mut files)?;
    Ok(Outcome { result, files })
}

/// Continues from a checkpoint, appending to the existing diagnostics series.
pub fn resume_experiment<T: Real>(cfg: &ExperimentConfig, checkpoint: &Path) -> Result<Outcome<T>> {
    let (state, grid) = crate::io::load_checkpoint::<T>(checkpoint)?;
    if grid != cfg.grid {
        return Err(crate::error::Error::IncompatibleRuns(format!(
            "checkpoint grid {grid:?} differs from config grid {:?}",
            cfg.grid
        )));
    }
    let mut sink = FileSink::new(cfg, true)?;
    sink.pending.retain(|&t| t > state.t + sink.half_dt);
    // the resumed state was already recorded as the last row
    sink.skip_next = true;
    let result = advance::<T>(state, &cfg.initial, &cfg.params, &cfg.grid, &cfg.monitors, &mut sink)?;
    let mut files = vec![sink.csv.path().to_path_buf()];
    files.append(&mut sink.written);
    write_final(cfg, &result, &mut files)?;
    Ok(Outcome { result, files })
}
