use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::diagnostics::DiagnosticsRecord;
use crate::duffing::PortraitSample;
use crate::error::{Error, Result};
use crate::lines::LineSeries;

pub const DIAGNOSTICS_HEADER: &str = "t,integral_phi,max_abs_phi,P,bubble_count,cfl";
pub const LINE_HEADER: &str = "index,arc_param,phi";
pub const PORTRAIT_HEADER: &str = "phi0,phi1,label";

/// 17 significant digits, exponent form.
fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    Ok(BufWriter::new(File::create(path).map_err(|e| Error::io(path, e))?))
}

pub fn write_line_csv(series: &LineSeries, path: &Path) -> Result<()> {
    if let Some(index) = series.phi.iter().chain(&series.arc).position(|v| !v.is_finite()) {
        return Err(Error::NonFinite { index: index % series.len().max(1) });
    }
    let mut w = create(path)?;
    let io = |e| Error::io(path, e);
    writeln!(w, "{LINE_HEADER}").map_err(io)?;
    for (i, (s, v)) in series.arc.iter().zip(&series.phi).enumerate() {
        writeln!(w, "{i},{},{}", num(*s), num(*v)).map_err(io)?;
    }
    w.flush().map_err(io)
}

pub fn read_line_csv(path: &Path) -> Result<LineSeries> {
    let f = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut lines = BufReader::new(f).lines();
    let header = lines.next().transpose().map_err(|e| Error::io(path, e))?;
    if header.as_deref() != Some(LINE_HEADER) {
        return Err(Error::Parse(format!("{}: missing header `{LINE_HEADER}`", path.display())));
    }
    let mut out = LineSeries { arc: vec![], phi: vec![] };
    for (k, line) in lines.enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        let cols: Vec<&str> = line.split(',').collect();
        let bad = || Error::Parse(format!("{}: malformed row {}", path.display(), k + 2));
        if cols.len() != 3 {
            return Err(bad());
        }
        out.arc.push(cols[1].parse().map_err(|_| bad())?);
        out.phi.push(cols[2].parse().map_err(|_| bad())?);
    }
    Ok(out)
}

pub fn write_portrait_csv(samples: &[PortraitSample], path: &Path) -> Result<()> {
    let mut w = create(path)?;
    let io = |e| Error::io(path, e);
    writeln!(w, "{PORTRAIT_HEADER}").map_err(io)?;
    for s in samples {
        writeln!(w, "{},{},{}", num(s.phi0), num(s.phi1), s.basin.label()).map_err(io)?;
    }
    w.flush().map_err(io)
}

/// Append-only diagnostics series, flushed after every row.
pub struct DiagnosticsCsv {
    out: BufWriter<File>,
    path: PathBuf,
}

impl DiagnosticsCsv {
    /// Starts a fresh file with the header.
    pub fn create(path: &Path) -> Result<Self> {
        let mut out = create(path)?;
        writeln!(out, "{DIAGNOSTICS_HEADER}").map_err(|e| Error::io(path, e))?;
        out.flush().map_err(|e| Error::io(path, e))?;
        Ok(Self { out, path: path.to_path_buf() })
    }

    /// Appends to an existing series, writing the header only if the file is new or empty.
    pub fn append(path: &Path) -> Result<Self> {
        let fresh = std::fs::metadata(path).map(|m| m.len() == 0).unwrap_or(true);
        if fresh {
            return Self::create(path);
        }
        let f = OpenOptions::new().append(true).open(path).map_err(|e| Error::io(path, e))?;
        Ok(Self { out: BufWriter::new(f), path: path.to_path_buf() })
    }

    pub fn push(&mut self, r: &DiagnosticsRecord) -> Result<()> {
        let io = |e| Error::io(&self.path, e);
        writeln!(
            self.out,
            "{},{},{},{},{},{}",
            num(r.t),
            num(r.integral_phi),
            num(r.max_abs_phi),
            num(r.p),
            r.bubbles.count,
            r.cfl.label()
        )
        .map_err(io)?;
        self.out.flush().map_err(io)
    }

    pub fn path(&self) -> &Path {
        &self.path
    }
}
