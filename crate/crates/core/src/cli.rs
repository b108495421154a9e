//! Command-line front end. Exit codes: 0 completed, 2 solver stop, 1 usage or config error.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::config::{preset, ExperimentConfig, RawConfig, PRESET_NAMES};
use crate::driver::{run_simulation, StopReason};
use crate::duffing::{equilibria, integrate_duffing, phase_portrait, sample_grid, DuffingParams, DEFAULT_T_MAX};
use crate::error::{Error, Result};
use crate::experiment::{resume_experiment, run_experiment, summary, Outcome};
use crate::grid::Geometry;
use crate::io::{peek_checkpoint, write_line_csv, write_portrait_csv};
use crate::lines::{compare_grids, top_decile_slope, LineKind, LineSeries};
use crate::real::{Precision, Real};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_SOLVER_STOP: i32 = 2;

/// Environment variable that fixes the worker thread count.
pub const THREADS_ENV: &str = "HIGGS_THREADS";

#[derive(Parser, Debug)]
#[command(name = "higgs", version, about = "Higgs-potential Klein-Gordon solver in de Sitter spacetime")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run a 3D experiment from a config file or preset.
    Run(RunArgs),
    /// Run the radial reduction of a centered experiment.
    Radial(RunArgs),
    /// Grid-convergence study against a finer reference run.
    Compare(CompareArgs),
    /// Duffing reference: equilibria, trajectories, phase portrait.
    Duffing(DuffingArgs),
    /// List the built-in presets.
    Presets,
    /// Continue a run from a checkpoint.
    Resume(ResumeArgs),
}

#[derive(Args, Debug)]
struct RunArgs {
    /// TOML config file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Preset name (example1 ... example7).
    #[arg(long)]
    preset: Option<String>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    t_end: Option<f64>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long, value_enum)]
    precision: Option<PrecisionArg>,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct CompareArgs {
    #[arg(long, default_value = "example1")]
    preset: String,
    /// Coarse resolutions.
    #[arg(long, value_delimiter = ',', default_values_t = [64usize, 96, 128])]
    ns: Vec<usize>,
    /// Reference resolution.
    #[arg(long, default_value_t = 160)]
    reference: usize,
    #[arg(long, default_value_t = 1.0)]
    t: f64,
    #[arg(long, value_enum, default_value_t = LineArg::MidlineX)]
    line: LineArg,
    #[arg(long, default_value = "out/compare")]
    output: PathBuf,
}

#[derive(Args, Debug)]
struct DuffingArgs {
    #[arg(long)]
    mu2: f64,
    #[arg(long)]
    lambda: f64,
    /// Print the equilibria.
    #[arg(long)]
    equilibria: bool,
    /// Integrate from `phi,phi_t` and print the terminal classification.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    from: Option<Vec<f64>>,
    /// Write a phase-portrait CSV over [-range, range]^2.
    #[arg(long)]
    portrait: Option<PathBuf>,
    #[arg(long, default_value_t = 3.0)]
    range: f64,
    #[arg(long, default_value_t = 41)]
    samples: usize,
    #[arg(long, default_value_t = 1e-3)]
    dt: f64,
    #[arg(long, default_value_t = DEFAULT_T_MAX)]
    t_max: f64,
    /// Trajectory CSV for `--from` (columns t,phi,phi_t).
    #[arg(long)]
    trajectory: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ResumeArgs {
    #[arg(long)]
    checkpoint: PathBuf,
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    preset: Option<String>,
    #[arg(long)]
    t_end: Option<f64>,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum PrecisionArg {
    Double,
    Single,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum LineArg {
    MidlineX,
    MainDiagonal,
}

impl From<LineArg> for LineKind {
    fn from(l: LineArg) -> Self {
        match l {
            LineArg::MidlineX => LineKind::MidlineX,
            LineArg::MainDiagonal => LineKind::MainDiagonal,
        }
    }
}

/// Applies `HIGGS_THREADS` to the global pool; ignored if the pool already exists.
pub fn configure_threads() -> Result<()> {
    if let Ok(v) = std::env::var(THREADS_ENV) {
        let n: usize = v
            .parse()
            .map_err(|_| Error::InvalidParams(format!("{THREADS_ENV} must be a positive integer, got `{v}`")))?;
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Ok(())
}

fn build_config(
    config: &Option<PathBuf>,
    preset_name: &Option<String>,
    geometry: Geometry,
    edit: impl FnOnce(&mut RawConfig),
) -> Result<ExperimentConfig> {
    let (mut raw, text) = match config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
            let raw: RawConfig = toml::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
            (raw, text)
        }
        None => (RawConfig::default(), String::new()),
    };
    if preset_name.is_some() {
        raw.preset = preset_name.clone();
    }
    if raw.preset.is_none() && config.is_none() {
        return Err(Error::InvalidParams("give --config or --preset".into()));
    }
    if geometry == Geometry::Radial1D {
        raw.geometry = Some(Geometry::Radial1D);
    }
    edit(&mut raw);
    crate::config::resolve(&raw, &text)
}

fn exit_code<T>(r: &Outcome<T>) -> i32 {
    if r.result.stop_reason == StopReason::Completed {
        EXIT_OK
    } else {
        EXIT_SOLVER_STOP
    }
}

fn report<T: Real>(cfg: &ExperimentConfig, out: &Outcome<T>) -> i32 {
    print!("{}", summary(&out.result));
    println!("output: {}", cfg.output_dir.display());
    exit_code(out)
}

fn cmd_run(args: &RunArgs, geometry: Geometry) -> Result<i32> {
    let cfg = build_config(&args.config, &args.preset, geometry, |raw| {
        raw.n = args.n.or(raw.n);
        raw.t_end = args.t_end.or(raw.t_end);
        raw.dt = args.dt.or(raw.dt);
        if let Some(p) = args.precision {
            raw.precision = Some(match p {
                PrecisionArg::Double => Precision::Double,
                PrecisionArg::Single => Precision::Single,
            });
        }
        if let Some(o) = &args.output {
            raw.output_dir = Some(o.clone());
        }
    })?;
    std::fs::create_dir_all(&cfg.output_dir).map_err(|e| Error::io(&cfg.output_dir, e))?;
    let cfg_path = cfg.output_dir.join("config.toml");
    std::fs::write(&cfg_path, cfg.to_toml()?).map_err(|e| Error::io(&cfg_path, e))?;
    Ok(match cfg.params.precision {
        Precision::Double => report(&cfg, &run_experiment::<f64>(&cfg)?),
        Precision::Single => report(&cfg, &run_experiment::<f32>(&cfg)?),
    })
}

fn cmd_resume(args: &ResumeArgs) -> Result<i32> {
    let head = peek_checkpoint(&args.checkpoint)?;
    let cfg = build_config(&args.config, &args.preset, head.grid.geometry(), |raw| {
        raw.n = Some(head.grid.n());
        raw.scale = Some(head.grid.scale());
        raw.precision = Some(head.precision);
        raw.t_end = args.t_end.or(raw.t_end);
        if let Some(o) = &args.output {
            raw.output_dir = Some(o.clone());
        }
    })?;
    Ok(match head.precision {
        Precision::Double => report(&cfg, &resume_experiment::<f64>(&cfg, &args.checkpoint)?),
        Precision::Single => report(&cfg, &resume_experiment::<f32>(&cfg, &args.checkpoint)?),
    })
}

fn cmd_compare(args: &CompareArgs) -> Result<i32> {
    let which = LineKind::from(args.line);
    let run = |n: usize| -> Result<crate::driver::RunResult<f64>> {
        let mut cfg = ExperimentConfig::from_preset(&args.preset, Some(n), Geometry::Cube3D)?;
        cfg.params.t_end = args.t;
        let r = run_simulation::<f64>(&cfg.initial, &cfg.params, &cfg.grid, &cfg.monitors, &mut ())?;
        if r.stop_reason != StopReason::Completed {
            return Err(Error::IncompatibleRuns(format!("N={n} stopped early: {}", r.stop_reason.label())));
        }
        eprintln!("N={n} done");
        Ok(r)
    };
    let reference = run(args.reference)?;
    std::fs::create_dir_all(&args.output).map_err(|e| Error::io(&args.output, e))?;
    let mut table = String::from("n,max_norm,argmax_arc,in_high_slope\n");
    println!("{:>6} {:>24} {:>12} {:>14}", "N", "max|diff|", "argmax", "high-slope");
    for &n in &args.ns {
        let coarse = run(n)?;
        let d = compare_grids(&coarse, &reference, which)?;
        let h = d.arc[1] - d.arc[0];
        let steep = top_decile_slope(&d.reference, h).contains(&d.argmax);
        table += &format!("{n},{:.16e},{:.16e},{steep}\n", d.max_norm, d.arc[d.argmax]);
        println!("{n:>6} {:>24.16e} {:>12.6} {:>14}", d.max_norm, d.arc[d.argmax], steep);
        write_line_csv(
            &LineSeries { arc: d.arc.clone(), phi: d.diff.clone() },
            &args.output.join(format!("diff_n{n}.csv")),
        )?;
    }
    let p = args.output.join("compare.csv");
    std::fs::write(&p, table).map_err(|e| Error::io(&p, e))?;
    Ok(EXIT_OK)
}

fn cmd_duffing(args: &DuffingArgs) -> Result<i32> {
    let p = DuffingParams::new(args.mu2, args.lambda)?;
    let show_all = !args.equilibria && args.from.is_none() && args.portrait.is_none();
    if args.equilibria || show_all {
        let e = equilibria(&p);
        println!("stable_pos {:.4}", e.stable_pos);
        println!("stable_neg {:.4}", e.stable_neg);
        println!("unstable_zero {}", e.unstable_zero);
    }
    if let Some(y) = &args.from {
        if y.len() != 2 {
            return Err(Error::InvalidParams("--from takes `phi,phi_t`".into()));
        }
        let tr = integrate_duffing([y[0], y[1]], &p, args.dt, args.t_max)?;
        println!(
            "from ({}, {}) -> {} (phi={:.12}, phi_t={:.3e} at t={})",
            y[0],
            y[1],
            tr.basin.label(),
            tr.phi.last().unwrap(),
            tr.phi_t.last().unwrap(),
            tr.t.last().unwrap()
        );
        if let Some(path) = &args.trajectory {
            let mut s = String::from("t,phi,phi_t\n");
            for i in 0..tr.t.len() {
                s += &format!("{:.16e},{:.16e},{:.16e}\n", tr.t[i], tr.phi[i], tr.phi_t[i]);
            }
            std::fs::write(path, s).map_err(|e| Error::io(path, e))?;
        }
    }
    if let Some(path) = &args.portrait {
        let samples = sample_grid(-args.range, args.range, args.samples);
        let map = phase_portrait(&p, &samples, args.dt, args.t_max)?;
        write_portrait_csv(&map, path)?;
        println!("portrait: {} samples -> {}", map.len(), path.display());
    }
    Ok(EXIT_OK)
}

fn cmd_presets() -> i32 {
    for name in PRESET_NAMES {
        let p = preset(name).expect("listed preset exists");
        println!(
            "{name}: mu2={} lambda={} t_end={} line={} | {}",
            p.mu2,
            p.lambda,
            p.t_end,
            p.lines.iter().map(|l| l.name()).collect::<Vec<_>>().join(","),
            p.summary
        );
    }
    EXIT_OK
}

/// Parses `argv` (program name first) and runs the chosen command.
pub fn cli_main<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
        }
    };
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return EXIT_ERROR;
    }
    let r = match &cli.command {
        Command::Run(a) => cmd_run(a, Geometry::Cube3D),
        Command::Radial(a) => cmd_run(a, Geometry::Radial1D),
        Command::Compare(a) => cmd_compare(a),
        Command::Duffing(a) => cmd_duffing(a),
        Command::Presets => Ok(cmd_presets()),
        Command::Resume(a) => cmd_resume(a),
    };
    match r {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_ERROR
        }
    }
}
