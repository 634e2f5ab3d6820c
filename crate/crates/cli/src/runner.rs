//! Orchestration: plan, compute, write artifacts, write the manifest last.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use paraxial_inverse::{assemble_m, UniformGrid};

use crate::config::{Experiment, Plan, RunConfig};
use crate::data::{dump_matrix, format_image_data};
use crate::error::{CliError, Result};
use crate::experiment::{self, Computed};
use crate::output::{ArtifactWriter, Axis, Manifest, Panel, RunRecord};
use crate::presets::{self, Figure, PresetScale};

#[derive(Debug)]
pub struct RunReport {
    pub manifest: Manifest,
    pub manifest_path: PathBuf,
}

impl RunReport {
    pub fn exit_code(&self) -> i32 {
        if self.manifest.status == "ok" {
            0
        } else {
            3
        }
    }
}

/// Reads a config, or the config echo inside a manifest, from `path`.
pub enum Source {
    Config(RunConfig),
    Preset { figure: Figure, out: PathBuf },
}

pub fn read_source(path: &Path) -> Result<Source> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let config_err = |message: String| CliError::Config {
        path: path.to_path_buf(),
        message,
    };
    let value: toml::Table = text.parse().map_err(|e: toml::de::Error| config_err(e.to_string()))?;
    if !(value.contains_key("tool") && value.contains_key("runs")) {
        return RunConfig::from_toml(&text, path).map(Source::Config);
    }
    // A manifest from an earlier run: replay what it records.
    let runs = value["runs"].as_array().cloned().unwrap_or_default();
    let config_of = |run: &toml::Value| -> Result<RunConfig> {
        let c = run.get("config").cloned().ok_or_else(|| config_err("manifest run has no config".into()))?;
        c.try_into().map_err(|e: toml::de::Error| config_err(e.to_string()))
    };
    if let Some(name) = value.get("preset").and_then(|p| p.as_str()) {
        let figure: Figure = name.parse().map_err(config_err)?;
        let first = runs.first().ok_or_else(|| config_err("manifest has no runs".into()))?;
        return Ok(Source::Preset {
            figure,
            out: config_of(first)?.output_dir,
        });
    }
    match runs.as_slice() {
        [run] => config_of(run).map(Source::Config),
        _ => Err(config_err(format!("expected exactly one run in the manifest, found {}", runs.len()))),
    }
}

pub fn base_dir(path: &Path) -> PathBuf {
    path.parent().map(Path::to_path_buf).unwrap_or_default()
}

/// Validates and runs `path`, which may hold a config or a manifest.
pub fn run_path(path: &Path) -> Result<RunReport> {
    match read_source(path)? {
        Source::Config(c) => run(&Plan::new(c, &base_dir(path))?),
        Source::Preset { figure, out } => presets::run_preset(figure, &out, PresetScale::REFERENCE),
    }
}

pub fn run(plan: &Plan) -> Result<RunReport> {
    let start = Instant::now();
    let mut w = ArtifactWriter::create(&plan.config.output_dir)?;
    let mut manifest = Manifest::new(None);
    manifest.assumptions = plan.assumptions.clone();
    let record = execute(plan, &mut w, "")?;
    if record.error.is_some() || !record.metrics.failed_points.is_empty() {
        manifest.status = "numerical_failure".into();
    }
    manifest.runs.push(record);
    finish(manifest, w, start)
}

pub(crate) fn finish(mut manifest: Manifest, w: ArtifactWriter, start: Instant) -> Result<RunReport> {
    let dir = w.dir().to_path_buf();
    manifest.artifacts = w.into_artifacts();
    manifest.wall_clock_seconds = start.elapsed().as_secs_f64();
    let manifest_path = manifest.write(&dir)?;
    Ok(RunReport {
        manifest,
        manifest_path,
    })
}

/// Single-config artifacts, file names prefixed by `prefix`.
pub(crate) fn execute(plan: &Plan, w: &mut ArtifactWriter, prefix: &str) -> Result<RunRecord> {
    let mut record = RunRecord {
        label: plan.setup.model.name().to_string(),
        error: None,
        realized: plan.realized(),
        metrics: Default::default(),
        config: plan.config.clone(),
    };
    if plan.config.dump_matrix {
        let m = assemble_m(&plan.grid, plan.setup.corner_mode, plan.setup.clamp_value)
            .map_err(|e| CliError::Numerical(e.to_string()))?;
        for path in dump_matrix(&m, w.dir(), &format!("{prefix}matrix_m"))? {
            w.adopt(&path)?;
        }
    }
    let computed = match experiment::compute(plan) {
        Ok(c) => c,
        Err(e) => {
            record.error = Some(e.to_string());
            return Ok(record);
        }
    };
    record.metrics = experiment::metrics(&computed);
    let title = format!("{} ({})", plan.setup.model.name(), experiment_name(plan.config.experiment));
    match &computed {
        Computed::Forward { boundary, image, exact } => {
            let t = experiment::image_table(image, exact.as_ref());
            let mut series = vec![(t.index_of("abs2_u").unwrap(), "|u|^2".to_string())];
            if let Some(c) = t.index_of("abs2_exact") {
                series.push((c, "|u|^2 closed form".into()));
            }
            let panel = Panel {
                title: title.clone(),
                x: 1,
                series,
                x_axis: Axis::Linear,
                y_axis: Axis::Linear,
            };
            w.table(&format!("{prefix}image.csv"), &t, &[panel])?;
            let b = experiment::boundary_table(boundary.grid().nodes(), Some(boundary), &[]);
            let panels = experiment::boundary_panels(&b, &title, &["prescribed"]);
            w.table(&format!("{prefix}boundary.csv"), &b, &panels)?;
        }
        Computed::Reconstruct { outcome, image } => {
            let lines = [("direct", &outcome.direct.u0), ("coupled", &outcome.coupled.u0)];
            let b = experiment::boundary_table(plan.grid.nodes(), outcome.truth.as_ref(), &lines);
            let panels = experiment::boundary_panels(&b, &title, &["prescribed", "direct", "coupled"]);
            w.table(&format!("{prefix}boundary.csv"), &b, &panels)?;
            w.write(&format!("{prefix}image_data.csv"), format_image_data(image).as_bytes())?;
        }
        Computed::Sweep(s) => {
            let sweeps = [("", s)];
            let t = experiment::sweep_table(&sweeps, true);
            let panels = experiment::sweep_panels(&t, &title, &sweeps);
            w.table(&format!("{prefix}sweep.csv"), &t, &panels)?;
        }
        Computed::Special { truth, recovered } => {
            let b = experiment::boundary_table(plan.grid.nodes(), truth.as_ref(), &[("recovered", recovered)]);
            let panels = experiment::boundary_panels(&b, &title, &["prescribed", "recovered"]);
            w.table(&format!("{prefix}boundary.csv"), &b, &panels)?;
        }
    }
    Ok(record)
}

pub fn experiment_name(e: Experiment) -> &'static str {
    match e {
        Experiment::Reconstruct => "reconstruct",
        Experiment::SweepTau => "sweep_tau",
        Experiment::SweepDelta => "sweep_delta",
        Experiment::SweepXmax => "sweep_xmax",
        Experiment::ForwardOnly => "forward_only",
        Experiment::SpecialReal => "special_real",
        Experiment::SpecialImag => "special_imag",
    }
}
