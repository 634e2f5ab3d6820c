//! Run configuration: a TOML file whose keys map one-to-one onto [`RunConfig`].

use std::path::{Path, PathBuf};

use paraxial_inverse::analysis::{ExperimentSetup, Model};
use paraxial_inverse::{
    CornerMode, GaussianBeam, ImageLine, ParabolicBeam, PhysicalParams, Regularization, RegularizationMode,
    StepBeam, UniformGrid, XGrid, ZGrid,
};
use serde::{Deserialize, Serialize};

use crate::data::load_image_data;
use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Experiment {
    Reconstruct,
    SweepTau,
    SweepDelta,
    SweepXmax,
    ForwardOnly,
    SpecialReal,
    SpecialImag,
}

impl Experiment {
    pub fn is_sweep(self) -> bool {
        matches!(self, Self::SweepTau | Self::SweepDelta | Self::SweepXmax)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Gaussian,
    Parabolic,
    Step,
    File,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CornerSetting {
    #[default]
    Clamp,
    ExplicitUnit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegularizationSetting {
    #[default]
    Unit,
    Phase,
    Shift,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub experiment: Experiment,
    pub output_dir: PathBuf,
    #[serde(default)]
    pub corner_mode: CornerSetting,
    #[serde(default = "default_clamp")]
    pub clamp_value: f64,
    /// Also write `M` as a binary dump with a text sidecar.
    #[serde(default)]
    pub dump_matrix: bool,
    pub model: ModelConfig,
    pub physical: PhysicalConfig,
    pub boundary_grid: BoundaryGridConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub image_grid: Option<ImageGridConfig>,
    #[serde(default)]
    pub regularization: RegularizationConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepConfig>,
}

fn default_clamp() -> f64 {
    paraxial_inverse::DEFAULT_CLAMP
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub kind: ModelKind,
    /// Gaussian Rayleigh length `L`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rayleigh_length: Option<f64>,
    /// Gaussian waist distance from the image line; defaults to the grid midpoint.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub waist_distance: Option<f64>,
    /// Gaussian transverse frequency; defaults to aiming at the image-window midpoint.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub xi: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub half_length: Option<f64>,
    /// Support center for parabolic and step beams; defaults to the grid midpoint.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub center: Option<f64>,
    /// Longitudinal period `Lambda`; `inf` gives a real amplitude.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub period: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub image_file: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhysicalConfig {
    pub wavelength: f64,
    #[serde(default)]
    pub theta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundaryGridConfig {
    pub z_min: f64,
    pub z_max: f64,
    pub n: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ImageGridConfig {
    pub x_min: f64,
    pub x_max: f64,
    pub n: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegularizationConfig {
    #[serde(default)]
    pub mode: RegularizationSetting,
    #[serde(default)]
    pub delta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    /// `tau`, `delta` or `x_max` values, by experiment.
    pub values: Vec<f64>,
}

impl RunConfig {
    pub fn from_toml(text: &str, origin: &Path) -> Result<Self> {
        toml::from_str(text).map_err(|e| CliError::Config {
            path: origin.to_path_buf(),
            message: e.to_string(),
        })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }
}

/// A configuration checked against every module precondition, with the core
/// objects it describes already built.
#[derive(Debug, Clone)]
pub struct Plan {
    pub config: RunConfig,
    pub params: PhysicalParams,
    pub grid: ZGrid,
    pub setup: ExperimentSetup,
    /// Choices made on the user's behalf, recorded in the manifest.
    pub assumptions: Vec<String>,
}

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Invalid(msg.into())
}

fn core<T>(r: paraxial_inverse::Result<T>) -> Result<T> {
    r.map_err(|e| invalid(e.to_string()))
}

fn forbid(kind: &str, name: &str, value: bool) -> Result<()> {
    if value {
        return Err(invalid(format!("model.{name} does not apply to the {kind} model")));
    }
    Ok(())
}

fn require(name: &str, v: Option<f64>) -> Result<f64> {
    v.ok_or_else(|| invalid(format!("model.{name} is required")))
}

impl Plan {
    /// Validates `config`; relative `image_file` paths resolve against `base_dir`.
    pub fn new(config: RunConfig, base_dir: &Path) -> Result<Self> {
        let c = &config;
        let params = core(PhysicalParams::new(c.physical.wavelength, c.physical.theta))?;
        if c.physical.theta != 0.0 && c.experiment != Experiment::ForwardOnly {
            return Err(invalid("an inclined boundary (theta != 0) is supported by forward_only only"));
        }
        let b = c.boundary_grid;
        let grid = core(ZGrid::new(b.z_min, b.z_max, b.n))?;
        if b.n < 4 {
            return Err(invalid(format!("boundary_grid.n must be at least 4, got {}", b.n)));
        }
        if !(c.clamp_value.is_finite() && c.clamp_value > 0.0) {
            return Err(invalid(format!("clamp_value must be positive and finite, got {}", c.clamp_value)));
        }
        let reg_mode = match c.regularization.mode {
            RegularizationSetting::Unit => RegularizationMode::Unit,
            RegularizationSetting::Phase => RegularizationMode::Phase,
            RegularizationSetting::Shift => RegularizationMode::Shift,
        };
        if reg_mode == RegularizationMode::Unit && c.regularization.delta != 0.0 {
            return Err(invalid("regularization.delta must be 0 in unit mode"));
        }
        let regularization = core(Regularization::new(reg_mode, c.regularization.delta))?;
        let corner_mode = match c.corner_mode {
            CornerSetting::Clamp => CornerMode::Clamp,
            CornerSetting::ExplicitUnit => CornerMode::ExplicitUnit,
        };

        match (c.experiment.is_sweep(), &c.sweep) {
            (true, None) => return Err(invalid("sweep experiments need a [sweep] table with values")),
            (false, Some(_)) => return Err(invalid("[sweep] only applies to sweep experiments")),
            (true, Some(s)) if s.values.is_empty() => return Err(invalid("sweep.values is empty")),
            _ => {}
        }
        if let Some(s) = &c.sweep {
            if let Some(v) = s.values.iter().find(|v| !v.is_finite()) {
                return Err(invalid(format!("sweep value {v} is not finite")));
            }
        }
        if c.experiment == Experiment::SweepDelta && reg_mode == RegularizationMode::Unit {
            return Err(invalid("sweep_delta needs regularization.mode = phase or shift"));
        }

        let mut assumptions = Vec::new();
        let m = &c.model;
        let image_grid = match (m.kind, c.image_grid) {
            (ModelKind::File, Some(_)) => return Err(invalid("[image_grid] is taken from the image file; remove it")),
            (ModelKind::File, None) => None,
            (_, None) => return Err(invalid("[image_grid] is required")),
            (_, Some(g)) => Some(core(XGrid::new(g.x_min, g.x_max, g.n))?),
        };
        let mid = 0.5 * (b.z_min + b.z_max);

        let mut measured: Option<ImageLine> = None;
        let model = match m.kind {
            ModelKind::Gaussian => {
                forbid("gaussian", "half_length", m.half_length.is_some())?;
                forbid("gaussian", "center", m.center.is_some())?;
                forbid("gaussian", "period", m.period.is_some())?;
                forbid("gaussian", "image_file", m.image_file.is_some())?;
                let length = require("rayleigh_length", m.rayleigh_length)?;
                let waist = m.waist_distance.unwrap_or_else(|| {
                    assumptions.push(format!("gaussian waist distance z_c = {mid} (grid midpoint)"));
                    mid
                });
                let beam = match m.xi {
                    Some(xi) => core(GaussianBeam::new(&params, length, waist, xi))?,
                    None => {
                        let g = image_grid.expect("checked above");
                        let x_c = 0.5 * (g.x_min() + g.x_max());
                        let beam = core(GaussianBeam::aimed_at(&params, length, waist, x_c))?;
                        assumptions.push(format!(
                            "gaussian xi = {:e} (aimed at image-window midpoint x = {x_c})",
                            beam.xi()
                        ));
                        beam
                    }
                };
                Model::Gaussian(beam)
            }
            ModelKind::Parabolic | ModelKind::Step => {
                let name = if m.kind == ModelKind::Step { "step" } else { "parabolic" };
                forbid(name, "rayleigh_length", m.rayleigh_length.is_some())?;
                forbid(name, "waist_distance", m.waist_distance.is_some())?;
                forbid(name, "xi", m.xi.is_some())?;
                forbid(name, "image_file", m.image_file.is_some())?;
                let a = require("half_length", m.half_length)?;
                let period = require("period", m.period)?;
                let center = m.center.unwrap_or_else(|| {
                    assumptions.push(format!("{name} center z_c = {mid} (grid midpoint)"));
                    mid
                });
                if m.kind == ModelKind::Step {
                    let beam = core(StepBeam::new(a, center, period))?;
                    if !beam.fits(&grid) {
                        return Err(invalid("model.half_length must be below half the boundary span"));
                    }
                    Model::Step(beam)
                } else {
                    let beam = core(ParabolicBeam::new(a, center, period))?;
                    if !beam.fits(&grid) {
                        return Err(invalid("model.half_length must be below half the boundary span"));
                    }
                    Model::Parabolic(beam)
                }
            }
            ModelKind::File => {
                for (name, set) in [
                    ("rayleigh_length", m.rayleigh_length.is_some()),
                    ("waist_distance", m.waist_distance.is_some()),
                    ("xi", m.xi.is_some()),
                    ("half_length", m.half_length.is_some()),
                    ("center", m.center.is_some()),
                    ("period", m.period.is_some()),
                ] {
                    forbid("file", name, set)?;
                }
                let rel = m
                    .image_file
                    .as_ref()
                    .ok_or_else(|| invalid("model.image_file is required for the file model"))?;
                if matches!(c.experiment, Experiment::ForwardOnly) {
                    return Err(invalid("forward_only needs a boundary model, not image data"));
                }
                measured = Some(load_image_data(&base_dir.join(rel))?);
                Model::Measured
            }
        };

        let setup = match measured {
            Some(image) => ExperimentSetup::with_image(params, grid, model, image),
            None => {
                let g = image_grid.expect("checked above");
                if g.x_min() <= 0.0 {
                    return Err(invalid("image_grid.x_min must be positive"));
                }
                if c.experiment == Experiment::ForwardOnly {
                    // The forward experiment computes its own image; no need to build one twice.
                    let placeholder = paraxial_inverse::ComplexLine::zeros(g);
                    ExperimentSetup::with_image(params, grid, model, placeholder)
                } else {
                    core(ExperimentSetup::from_model(params, grid, g, model))?
                }
            }
        };
        let setup = setup.with_regularization(regularization).with_corners(corner_mode, c.clamp_value);

        if c.experiment == Experiment::SweepXmax {
            let x = setup.image.grid();
            if let Some(v) = c.sweep.as_ref().unwrap().values.iter().find(|&&v| v <= x.x_min() || v > x.x_max()) {
                return Err(invalid(format!("sweep x_max {v} outside ({}, {}]", x.x_min(), x.x_max())));
            }
        }
        if c.experiment == Experiment::SweepTau {
            if let Some(v) = c.sweep.as_ref().unwrap().values.iter().find(|&&v| v <= 0.0) {
                return Err(invalid(format!("sweep tau {v} must be positive")));
            }
        }
        Ok(Self {
            params,
            grid,
            setup,
            assumptions,
            config,
        })
    }

    pub fn image_grid(&self) -> &XGrid {
        self.setup.image.grid()
    }

    /// Realized steps, which can differ from rounded nominal values.
    pub fn realized(&self) -> Realized {
        let x = self.image_grid();
        let alpha = self.setup.regularization.alpha();
        Realized {
            n: self.grid.n_intervals(),
            tau: self.grid.tau(),
            image_n: x.n_intervals(),
            h: x.h(),
            x_min: x.x_min(),
            x_max: x.x_max(),
            alpha_re: alpha.re,
            alpha_im: alpha.im,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Realized {
    pub n: usize,
    pub tau: f64,
    pub image_n: usize,
    pub h: f64,
    pub x_min: f64,
    pub x_max: f64,
    pub alpha_re: f64,
    pub alpha_im: f64,
}
