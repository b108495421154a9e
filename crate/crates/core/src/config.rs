//! Experiment configuration: a TOML key–value file holding a preset name and/or explicit
//! settings. Explicit keys override the preset.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::driver::Monitors;
use crate::error::{Error, Result};
use crate::grid::{Geometry, GridSpec, MIN_RESOLUTION};
use crate::initial::{check_support, BumpSpec, InitialData, Term};
use crate::integrator::{default_dt, SimParams};
use crate::lines::LineKind;
use crate::real::Precision;

/// Desk-scale default resolution.
pub const DEFAULT_N: usize = 128;
pub const DEFAULT_SCALE: f64 = 5.0;
/// Default diagnostic cadence in time units.
pub const DEFAULT_SAMPLE_INTERVAL: f64 = 0.01;

/// The file format as written by users; every key is optional.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub geometry: Option<Geometry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu2: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_end: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sample_every: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub precision: Option<Precision>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub halo_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps_rel: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lines: Option<Vec<LineKind>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub volume_times: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub volume_binary: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi0: Option<Vec<Term>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi1: Option<Vec<Term>>,
}

/// A fully resolved and validated experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub name: String,
    pub grid: GridSpec,
    pub params: SimParams,
    pub initial: InitialData,
    pub monitors: Monitors,
    pub output_dir: PathBuf,
    pub lines: Vec<LineKind>,
    pub volume_times: Vec<f64>,
    pub volume_binary: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Preset {
    pub name: &'static str,
    pub summary: &'static str,
    pub mu2: f64,
    pub lambda: f64,
    pub t_end: f64,
    pub initial: InitialData,
    pub lines: Vec<LineKind>,
}

pub const PRESET_NAMES: [&str; 7] = [
    "example1", "example2", "example3", "example4", "example5", "example6", "example7",
];

const C: [f64; 3] = [0.5; 3];

fn b(center: [f64; 3], r: f64, a: f64) -> Term {
    Term::bump(BumpSpec { center, radius: r, amplitude: a })
}

pub fn preset(name: &str) -> Option<Preset> {
    let mid = vec![LineKind::MidlineX];
    let p = match name {
        "example1" => Preset {
            name: "example1",
            summary: "grid convergence: phi0 = 3B(c,0.3), phi1 = 0",
            mu2: 9.0,
            lambda: 2.0,
            t_end: 2.0,
            initial: InitialData { phi0: vec![b(C, 0.3, 3.0)], phi1: vec![] },
            lines: mid,
        },
        "example2" => Preset {
            name: "example2",
            summary: "blow-up with sign-flipped potential: phi0 = 2B(c,0.2), phi1 = 10B(c,0.2)",
            mu2: 1.0,
            lambda: -1.0,
            t_end: 3.3,
            initial: InitialData { phi0: vec![b(C, 0.2, 2.0)], phi1: vec![b(C, 0.2, 10.0)] },
            lines: mid,
        },
        "example3" => Preset {
            name: "example3",
            summary: "bubble formation: phi0 = B(c,0.3), phi1 = -5B(c,0.3)",
            mu2: 9.0,
            lambda: 2.0,
            t_end: 1.0,
            initial: InitialData { phi0: vec![b(C, 0.3, 1.0)], phi1: vec![b(C, 0.3, -5.0)] },
            lines: mid,
        },
        "example4" => Preset {
            name: "example4",
            summary: "long-time Duffing limit of the bubble data: phi0 = B(c,0.3), phi1 = -5B(c,0.3)",
            mu2: 9.0,
            lambda: 2.0,
            t_end: 7.0,
            initial: InitialData { phi0: vec![b(C, 0.3, 1.0)], phi1: vec![b(C, 0.3, -5.0)] },
            lines: mid,
        },
        "example5" => Preset {
            name: "example5",
            summary: "no bubble, plateau at +sqrt(mu2/lambda): phi0 = 3B(c,0.3), phi1 = 0",
            mu2: 9.0,
            lambda: 2.0,
            t_end: 7.0,
            initial: InitialData { phi0: vec![b(C, 0.3, 3.0)], phi1: vec![] },
            lines: mid,
        },
        "example6" => Preset {
            name: "example6",
            summary: "oscillating data: phi0 = -10 B(c,0.3) B(0.55,0.3) sin(2 pi x), phi1 = 5B(c,0.3)",
            mu2: 9.0,
            lambda: 2.0,
            t_end: 4.0,
            initial: InitialData {
                phi0: vec![Term {
                    weight: -10.0,
                    sin_x: true,
                    bumps: vec![
                        BumpSpec { center: C, radius: 0.3, amplitude: 1.0 },
                        BumpSpec { center: [0.55; 3], radius: 0.3, amplitude: 1.0 },
                    ],
                }],
                phi1: vec![b(C, 0.3, 5.0)],
            },
            lines: mid,
        },
        "example7" => Preset {
            name: "example7",
            summary: "two bubbles merging: phi0 = B(0.4,0.2) + B(0.6,0.2), phi1 = -5 phi0",
            mu2: 0.1,
            lambda: 0.1,
            t_end: 3.0,
            initial: InitialData {
                phi0: vec![b([0.4; 3], 0.2, 1.0), b([0.6; 3], 0.2, 1.0)],
                phi1: vec![b([0.4; 3], 0.2, -5.0), b([0.6; 3], 0.2, -5.0)],
            },
            lines: vec![LineKind::MainDiagonal],
        },
        _ => return None,
    };
    Some(p)
}

/// Default `sample_every` for a time step: about [`DEFAULT_SAMPLE_INTERVAL`] time units.
pub fn default_sample_every(dt: f64) -> u64 {
    ((DEFAULT_SAMPLE_INTERVAL / dt).round() as u64).max(1)
}

/// 1-based position of `key` as an assignment or table header in `text`.
pub fn locate_key(text: &str, key: &str) -> Option<(usize, usize)> {
    for (i, line) in text.lines().enumerate() {
        let trimmed = line.trim_start();
        let col = line.len() - trimmed.len() + 1;
        if let Some(rest) = trimmed.strip_prefix(key) {
            if rest.trim_start().starts_with('=') {
                return Some((i + 1, col));
            }
        }
        let header = trimmed.trim_start_matches('[').trim_end().trim_end_matches(']').trim();
        if trimmed.starts_with('[') && header == key {
            return Some((i + 1, col));
        }
    }
    None
}

fn invalid(text: &str, key: &str, message: impl Into<String>) -> Error {
    Error::Validation {
        key: key.to_string(),
        location: locate_key(text, key),
        message: message.into(),
    }
}

pub fn load_config(text: &str) -> Result<ExperimentConfig> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    resolve(&raw, text)
}

pub fn load_config_file(path: &std::path::Path) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    load_config(&text)
}

/// Resolves a raw config against its preset and validates it. `text` is used for locations.
pub fn resolve(raw: &RawConfig, text: &str) -> Result<ExperimentConfig> {
    let base = match &raw.preset {
        Some(name) => Some(preset(name).ok_or_else(|| {
            invalid(text, "preset", format!("unknown preset `{name}`; expected one of {}", PRESET_NAMES.join(", ")))
        })?),
        None => None,
    };
    let name = raw
        .name
        .clone()
        .or_else(|| raw.preset.clone())
        .unwrap_or_else(|| "custom".to_string());
    let geometry = raw.geometry.unwrap_or_default();
    let n = raw.n.unwrap_or(DEFAULT_N);
    if n < MIN_RESOLUTION {
        return Err(invalid(text, "n", format!("must be at least {MIN_RESOLUTION}, got {n}")));
    }
    let scale = raw.scale.unwrap_or(DEFAULT_SCALE);
    let grid = GridSpec::new(n, scale, geometry).map_err(|e| invalid(text, "scale", e.to_string()))?;

    let mu2 = raw.mu2.or(base.as_ref().map(|p| p.mu2)).ok_or_else(|| invalid(text, "mu2", "required without a preset"))?;
    let lambda = raw
        .lambda
        .or(base.as_ref().map(|p| p.lambda))
        .ok_or_else(|| invalid(text, "lambda", "required without a preset"))?;
    let t_end = raw
        .t_end
        .or(base.as_ref().map(|p| p.t_end))
        .ok_or_else(|| invalid(text, "t_end", "required without a preset"))?;
    let dt = raw.dt.unwrap_or_else(|| default_dt(&grid));
    for (key, v) in [("mu2", mu2), ("lambda", lambda)] {
        if !v.is_finite() {
            return Err(invalid(text, key, format!("must be finite, got {v}")));
        }
    }
    for (key, v) in [("dt", dt), ("t_end", t_end)] {
        if !(v.is_finite() && v > 0.0) {
            return Err(invalid(text, key, format!("must be > 0, got {v}")));
        }
    }
    let sample_every = raw.sample_every.unwrap_or_else(|| default_sample_every(dt));
    if sample_every == 0 {
        return Err(invalid(text, "sample_every", "must be >= 1"));
    }
    let params = SimParams {
        mu2,
        lambda,
        dt,
        t_end,
        sample_every,
        precision: raw.precision.unwrap_or_default(),
    };

    let defaults = Monitors::default();
    let monitors = Monitors {
        eps_rel: raw.eps_rel.unwrap_or(defaults.eps_rel),
        halo_tol: raw.halo_tol.unwrap_or(defaults.halo_tol),
    };
    for (key, v) in [("eps_rel", monitors.eps_rel), ("halo_tol", monitors.halo_tol)] {
        if v.is_nan() || v < 0.0 {
            return Err(invalid(text, key, format!("must be >= 0, got {v}")));
        }
    }

    let explicit = raw.phi0.is_some() || raw.phi1.is_some();
    let mut initial = InitialData {
        phi0: raw.phi0.clone().unwrap_or_default(),
        phi1: raw.phi1.clone().unwrap_or_default(),
    };
    if !explicit {
        if let Some(p) = &base {
            initial = p.initial.clone();
            if geometry == Geometry::Radial1D {
                initial = initial.to_radial().map_err(|e| invalid(text, "geometry", e.to_string()))?;
            }
        }
    }
    for (key, part) in [
        ("phi0", InitialData { phi0: initial.phi0.clone(), phi1: vec![] }),
        ("phi1", InitialData { phi0: vec![], phi1: initial.phi1.clone() }),
    ] {
        check_support(&part, &grid).map_err(|e| invalid(text, key, e.to_string()))?;
    }

    let lines = match (&raw.lines, geometry) {
        (Some(l), Geometry::Cube3D) => l.clone(),
        (Some(l), Geometry::Radial1D) if !l.is_empty() => {
            return Err(invalid(text, "lines", "line cuts need cube geometry; radial runs write the radial profile"))
        }
        (_, Geometry::Radial1D) => vec![],
        (None, Geometry::Cube3D) => base.as_ref().map(|p| p.lines.clone()).unwrap_or_else(|| vec![LineKind::MidlineX]),
    };
    let volume_times = raw.volume_times.clone().unwrap_or_default();
    if let Some(t) = volume_times.iter().find(|t| !(t.is_finite() && **t >= 0.0 && **t <= t_end)) {
        return Err(invalid(text, "volume_times", format!("time {t} outside [0, t_end]")));
    }
    if !volume_times.is_empty() && geometry == Geometry::Radial1D {
        return Err(invalid(text, "volume_times", "volume dumps need cube geometry"));
    }
    let output_dir = raw.output_dir.clone().unwrap_or_else(|| PathBuf::from("out").join(&name));
    Ok(ExperimentConfig {
        name,
        grid,
        params,
        initial,
        monitors,
        output_dir,
        lines,
        volume_times,
        volume_binary: raw.volume_binary.unwrap_or(false),
    })
}

impl ExperimentConfig {
    /// A config for a preset with optional resolution and geometry overrides.
    pub fn from_preset(name: &str, n: Option<usize>, geometry: Geometry) -> Result<Self> {
        let raw = RawConfig {
            preset: Some(name.to_string()),
            n,
            geometry: Some(geometry),
            ..RawConfig::default()
        };
        resolve(&raw, "")
    }

    /// Every setting written out explicitly.
    pub fn to_raw(&self) -> RawConfig {
        RawConfig {
            preset: None,
            name: Some(self.name.clone()),
            geometry: Some(self.grid.geometry()),
            n: Some(self.grid.n()),
            scale: Some(self.grid.scale()),
            mu2: Some(self.params.mu2),
            lambda: Some(self.params.lambda),
            dt: Some(self.params.dt),
            t_end: Some(self.params.t_end),
            sample_every: Some(self.params.sample_every),
            precision: Some(self.params.precision),
            halo_tol: Some(self.monitors.halo_tol),
            eps_rel: Some(self.monitors.eps_rel),
            output_dir: Some(self.output_dir.clone()),
            lines: Some(self.lines.clone()),
            volume_times: Some(self.volume_times.clone()),
            volume_binary: Some(self.volume_binary),
            phi0: Some(self.initial.phi0.clone()),
            phi1: Some(self.initial.phi1.clone()),
        }
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(&self.to_raw()).map_err(|e| Error::Parse(e.to_string()))
    }
}
