//! Format and reproducibility checks shared by the IO tests and the acceptance suite.

use std::path::{Path, PathBuf};

use higgs_core::bubbles::BubbleCensus;
use higgs_core::config::{load_config, ExperimentConfig, PRESET_NAMES};
use higgs_core::duffing::{Basin, PortraitSample};
use higgs_core::io::{
    load_checkpoint, read_line_csv, save_checkpoint, write_lattice, write_line_csv, write_portrait_csv, DiagnosticsCsv,
    VolumeEncoding,
};
use higgs_core::{
    build_initial, rk4_step, run_simulation, CflStatus, DiagnosticsRecord, FieldState, Geometry, LineSeries, Real,
    StepWorkspace,
};

pub fn golden(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

fn same_bytes(written: &Path, name: &str) -> Result<(), String> {
    let a = std::fs::read(written).map_err(|e| e.to_string())?;
    let b = std::fs::read(golden(name)).map_err(|e| e.to_string())?;
    if a == b {
        Ok(())
    } else {
        let at = a.iter().zip(&b).position(|(x, y)| x != y).unwrap_or(a.len().min(b.len()));
        Err(format!("{name}: first difference at byte {at} (lengths {} vs {})", a.len(), b.len()))
    }
}

/// Writes every golden fixture into `dir` and compares byte for byte.
pub fn golden_files(dir: &Path) -> Result<(), String> {
    let s = 5;
    let vals: Vec<f64> = (0..s * s * s)
        .map(|idx| {
            let (i, j, k) = (idx % s, (idx / s) % s, idx / (s * s));
            (i as f64 - 2.0 * j as f64 + 3.0 * k as f64) / 8.0
        })
        .collect();
    let err = |e: higgs_core::Error| e.to_string();
    let p = dir.join("a.vtk");
    write_lattice(&vals, 4, 0.25, &p, VolumeEncoding::Ascii).map_err(err)?;
    same_bytes(&p, "volume_n4_ascii.vtk")?;
    let p = dir.join("b.vtk");
    write_lattice(&vals, 4, 0.25, &p, VolumeEncoding::Binary).map_err(err)?;
    same_bytes(&p, "volume_n4_binary.vtk")?;

    let series = LineSeries { arc: vec![0.0, 0.5, 1.0], phi: vec![0.1, -2.0, 3e-20] };
    let p = dir.join("line.csv");
    write_line_csv(&series, &p).map_err(err)?;
    same_bytes(&p, "line.csv")?;
    if read_line_csv(&p).map_err(err)? != series {
        return Err("line.csv does not read back bit-exactly".into());
    }

    let portrait = [
        PortraitSample { phi0: 1.5, phi1: -0.75, basin: Basin::StableNeg },
        PortraitSample { phi0: 0.0, phi1: 0.0, basin: Basin::UnstableZero },
        PortraitSample { phi0: 2.0, phi1: 1.0, basin: Basin::StablePos },
    ];
    let p = dir.join("portrait.csv");
    write_portrait_csv(&portrait, &p).map_err(err)?;
    same_bytes(&p, "portrait.csv")?;

    let p = dir.join("diagnostics.csv");
    let mut csv = DiagnosticsCsv::create(&p).map_err(err)?;
    let rec = |t, a, m, pp, count, cfl| DiagnosticsRecord {
        t,
        step: 0,
        integral_phi: a,
        integral_phi3: 0.0,
        max_abs_phi: m,
        p: pp,
        bubbles: BubbleCensus { count, bubbles: vec![] },
        cfl,
    };
    csv.push(&rec(0.0, 0.0, 0.0, 0.0, 0, CflStatus::Pass { bound: 1.0, observed: 0.0 })).map_err(err)?;
    csv.push(&rec(0.125, 0.0625, 2.25, 1.0 / 3.0, 2, CflStatus::Fail { bound: 1.0, observed: 2.25 })).map_err(err)?;
    drop(csv);
    same_bytes(&p, "diagnostics.csv")
}

fn checkpoint_case<T: Real>(dir: &Path, preset: &str, geometry: Geometry, n: usize) -> Result<(), String> {
    let cfg = ExperimentConfig::from_preset(preset, Some(n), geometry).map_err(|e| e.to_string())?;
    let mut s: FieldState<T> = build_initial(&cfg.initial, &cfg.grid).map_err(|e| e.to_string())?;
    let mut ws = StepWorkspace::new(&cfg.grid);
    let mut p = cfg.params;
    p.precision = T::PRECISION;
    for _ in 0..7 {
        rk4_step(&mut s, &p, &cfg.grid, &mut ws).map_err(|e| e.to_string())?;
    }
    let path = dir.join(format!("{preset}_{}_{}.bin", n, T::PRECISION.name()));
    save_checkpoint(&s, &cfg.grid, &path).map_err(|e| e.to_string())?;
    let (back, grid) = load_checkpoint::<T>(&path).map_err(|e| e.to_string())?;
    let bits = |a: &[T], b: &[T]| a.iter().zip(b).all(|(x, y)| x.to_f64().map(f64::to_bits) == y.to_f64().map(f64::to_bits));
    if grid != cfg.grid || back.t != s.t || back.step != s.step || !bits(&back.v1, &s.v1) || !bits(&back.v2, &s.v2) {
        return Err(format!("checkpoint round trip differs for {preset} N={n}"));
    }
    Ok(())
}

pub fn checkpoint_round_trip(dir: &Path) -> Result<(), String> {
    checkpoint_case::<f64>(dir, "example3", Geometry::Cube3D, 24)?;
    checkpoint_case::<f32>(dir, "example7", Geometry::Cube3D, 24)?;
    checkpoint_case::<f64>(dir, "example5", Geometry::Radial1D, 64)
}

pub fn config_round_trip() -> Result<(), String> {
    for name in PRESET_NAMES {
        for geometry in [Geometry::Cube3D, Geometry::Radial1D] {
            let Ok(cfg) = ExperimentConfig::from_preset(name, Some(32), geometry) else {
                continue;
            };
            let text = cfg.to_toml().map_err(|e| e.to_string())?;
            let back = load_config(&text).map_err(|e| format!("{name}: {e}"))?;
            if back != cfg {
                return Err(format!("{name} ({geometry:?}) does not round-trip"));
            }
        }
    }
    Ok(())
}

/// Runs the same short experiment twice and compares every record and the final state bitwise.
pub fn deterministic_rerun() -> Result<(), String> {
    let mut cfg = ExperimentConfig::from_preset("example7", Some(32), Geometry::Cube3D).map_err(|e| e.to_string())?;
    cfg.params.t_end = 40.0 * cfg.params.dt;
    cfg.params.sample_every = 5;
    let run = || run_simulation::<f64>(&cfg.initial, &cfg.params, &cfg.grid, &cfg.monitors, &mut ()).map_err(|e| e.to_string());
    let (a, b) = (run()?, run()?);
    let same = a.records.len() == b.records.len()
        && a.records.iter().zip(&b.records).all(|(x, y)| format!("{x:?}") == format!("{y:?}"))
        && a.final_state.v1.iter().zip(&b.final_state.v1).all(|(x, y)| x.to_bits() == y.to_bits())
        && a.final_state.v2.iter().zip(&b.final_state.v2).all(|(x, y)| x.to_bits() == y.to_bits());
    if same {
        Ok(())
    } else {
        Err("reruns differ".into())
    }
}
