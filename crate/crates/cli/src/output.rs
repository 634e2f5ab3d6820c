//! CSV tables, gnuplot scripts and the run manifest.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::{Realized, RunConfig};
use crate::error::{CliError, Result};

/// Column-major numeric table with a `name [unit]` header.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CsvTable {
    headers: Vec<String>,
    columns: Vec<Vec<f64>>,
}

impl CsvTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn column(mut self, name: &str, unit: &str, values: Vec<f64>) -> Self {
        if let Some(first) = self.columns.first() {
            assert_eq!(first.len(), values.len(), "column {name} has the wrong length");
        }
        self.headers.push(format!("{name} [{unit}]"));
        self.columns.push(values);
        self
    }

    pub fn headers(&self) -> &[String] {
        &self.headers
    }

    /// 1-based column index for plot scripts.
    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.headers
            .iter()
            .position(|h| h.split(" [").next() == Some(name))
            .map(|i| i + 1)
    }

    pub fn rows(&self) -> usize {
        self.columns.first().map_or(0, Vec::len)
    }

    /// Shortest round-trip float formatting keeps the output byte-stable.
    pub fn render(&self) -> String {
        let mut out = self.headers.join(",");
        out.push('\n');
        for r in 0..self.rows() {
            for (c, col) in self.columns.iter().enumerate() {
                if c > 0 {
                    out.push(',');
                }
                let _ = write!(out, "{:e}", col[r]);
            }
            out.push('\n');
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    Linear,
    Log,
}

#[derive(Debug, Clone)]
pub struct Panel {
    pub title: String,
    pub x: usize,
    pub series: Vec<(usize, String)>,
    pub x_axis: Axis,
    pub y_axis: Axis,
}

/// Gnuplot commands that draw `panels` from `csv` alone.
pub fn plot_script(csv: &str, table: &CsvTable, panels: &[Panel]) -> String {
    let mut s = String::new();
    let png = csv.trim_end_matches(".csv");
    let _ = writeln!(s, "set datafile separator ','");
    let _ = writeln!(s, "set terminal pngcairo size {},{}", 640 * panels.len().min(2), 420 * panels.len().div_ceil(2));
    let _ = writeln!(s, "set output '{png}.png'");
    if panels.len() > 1 {
        let _ = writeln!(s, "set multiplot layout {},{}", panels.len().div_ceil(2), panels.len().min(2));
    }
    for p in panels {
        let _ = writeln!(s, "set title '{}'", p.title);
        let _ = writeln!(s, "set xlabel '{}'", table.headers()[p.x - 1]);
        let _ = writeln!(s, "{}set logscale x", if p.x_axis == Axis::Log { "" } else { "un" });
        let _ = writeln!(s, "{}set logscale y", if p.y_axis == Axis::Log { "" } else { "un" });
        let lines: Vec<String> = p
            .series
            .iter()
            .map(|(col, label)| format!("'{csv}' using {}:{col} skip 1 with lines title '{label}'", p.x))
            .collect();
        let _ = writeln!(s, "plot {}", lines.join(", \\\n     "));
    }
    if panels.len() > 1 {
        let _ = writeln!(s, "unset multiplot");
    }
    s
}

#[derive(Debug, Clone, Serialize)]
pub struct Artifact {
    pub path: String,
    pub bytes: u64,
    pub sha256: String,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct Metrics {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub condition_estimate: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual_direct: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual_coupled: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d_thin: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d_thick: Option<f64>,
    /// Largest absolute error on nodes left out of the thin-line metric.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d_thin_excluded_max_error: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub forward_rel_l2: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub special_rel_l2: Option<f64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub failed_points: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunRecord {
    pub label: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub realized: Realized,
    pub metrics: Metrics,
    pub config: RunConfig,
}

#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub status: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    pub wall_clock_seconds: f64,
    pub assumptions: Vec<String>,
    pub notes: Vec<String>,
    pub runs: Vec<RunRecord>,
    pub artifacts: Vec<Artifact>,
}

pub const MANIFEST_NAME: &str = "manifest.toml";

impl Manifest {
    pub fn new(preset: Option<&str>) -> Self {
        Self {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            status: "ok".into(),
            preset: preset.map(str::to_string),
            wall_clock_seconds: 0.0,
            assumptions: Vec::new(),
            notes: Vec::new(),
            runs: Vec::new(),
            artifacts: Vec::new(),
        }
    }

    pub fn write(&self, dir: &Path) -> Result<PathBuf> {
        let path = dir.join(MANIFEST_NAME);
        let text = toml::to_string(self).map_err(|e| CliError::Numerical(format!("manifest: {e}")))?;
        fs::write(&path, text).map_err(|e| CliError::io(&path, e))?;
        Ok(path)
    }
}

/// Writes artifacts into one directory and remembers their checksums.
#[derive(Debug)]
pub struct ArtifactWriter {
    dir: PathBuf,
    artifacts: Vec<Artifact>,
}

impl ArtifactWriter {
    pub fn create(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            artifacts: Vec::new(),
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn write(&mut self, name: &str, bytes: &[u8]) -> Result<()> {
        let path = self.dir.join(name);
        fs::write(&path, bytes).map_err(|e| CliError::io(&path, e))?;
        self.record(name, bytes);
        Ok(())
    }

    /// Registers a file written by someone else.
    pub fn adopt(&mut self, path: &Path) -> Result<()> {
        let bytes = fs::read(path).map_err(|e| CliError::io(path, e))?;
        let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
        self.record(&name, &bytes);
        Ok(())
    }

    pub fn table(&mut self, name: &str, table: &CsvTable, panels: &[Panel]) -> Result<()> {
        self.write(name, table.render().as_bytes())?;
        let script = plot_script(name, table, panels);
        self.write(&name.replace(".csv", ".gp"), script.as_bytes())
    }

    fn record(&mut self, name: &str, bytes: &[u8]) {
        self.artifacts.retain(|a| a.path != name);
        self.artifacts.push(Artifact {
            path: name.to_string(),
            bytes: bytes.len() as u64,
            sha256: sha256_hex(bytes),
        });
    }

    pub fn into_artifacts(self) -> Vec<Artifact> {
        self.artifacts
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().fold(String::with_capacity(64), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}
