//! Named experiments fig1 to fig10 at the reference parameters.

use std::path::Path;
use std::str::FromStr;
use std::time::Instant;

use paraxial_inverse::analysis::SweepResult;
use paraxial_inverse::UniformGrid;

use crate::config::{
    BoundaryGridConfig, Experiment, ImageGridConfig, ModelConfig, ModelKind, PhysicalConfig, Plan,
    RegularizationConfig, RegularizationSetting, RunConfig, SweepConfig,
};
use crate::error::Result;
use crate::experiment::{self, Computed};
use crate::output::{ArtifactWriter, Axis, CsvTable, Manifest, Panel, RunRecord};
use crate::runner::{finish, RunReport};

pub const Z_MIN: f64 = 90.0;
pub const Z_MAX: f64 = 100.0;
pub const WAVELENGTH: f64 = 0.01;
pub const PERIOD: f64 = 1.0;
pub const X_MIN: f64 = 2.8284;
pub const X_MAX: f64 = 28.284;
pub const RAYLEIGH_LENGTH: f64 = 20.0;
pub const HALF_LENGTH: f64 = 4.8;
/// Rounded nominal steps, reported next to the realized ones.
const NOMINAL_TAU: f64 = 0.00398;
const NOMINAL_H: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Figure {
    Fig1,
    Fig2,
    Fig3,
    Fig4,
    Fig5,
    Fig6,
    Fig7,
    Fig8,
    Fig9,
    Fig10,
}

impl Figure {
    pub const ALL: [Figure; 10] = [
        Figure::Fig1,
        Figure::Fig2,
        Figure::Fig3,
        Figure::Fig4,
        Figure::Fig5,
        Figure::Fig6,
        Figure::Fig7,
        Figure::Fig8,
        Figure::Fig9,
        Figure::Fig10,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Figure::Fig1 => "fig1",
            Figure::Fig2 => "fig2",
            Figure::Fig3 => "fig3",
            Figure::Fig4 => "fig4",
            Figure::Fig5 => "fig5",
            Figure::Fig6 => "fig6",
            Figure::Fig7 => "fig7",
            Figure::Fig8 => "fig8",
            Figure::Fig9 => "fig9",
            Figure::Fig10 => "fig10",
        }
    }

    pub fn experiment(self) -> Experiment {
        match self {
            Figure::Fig1 => Experiment::ForwardOnly,
            Figure::Fig2 | Figure::Fig3 | Figure::Fig5 | Figure::Fig7 => Experiment::Reconstruct,
            Figure::Fig4 | Figure::Fig6 | Figure::Fig8 => Experiment::SweepTau,
            Figure::Fig9 => Experiment::SweepDelta,
            Figure::Fig10 => Experiment::SweepXmax,
        }
    }

    pub fn regularization(self) -> RegularizationConfig {
        let (mode, delta) = match self {
            Figure::Fig1 | Figure::Fig2 | Figure::Fig3 | Figure::Fig4 => (RegularizationSetting::Unit, 0.0),
            Figure::Fig5 | Figure::Fig6 => (RegularizationSetting::Phase, 0.1),
            Figure::Fig7 | Figure::Fig8 => (RegularizationSetting::Shift, 0.01),
            Figure::Fig9 => (RegularizationSetting::Shift, 0.0),
            Figure::Fig10 => (RegularizationSetting::Shift, 0.1),
        };
        RegularizationConfig { mode, delta }
    }
}

impl FromStr for Figure {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Figure::ALL
            .into_iter()
            .find(|f| f.as_str() == s)
            .ok_or_else(|| format!("unknown preset `{s}` (expected fig1 to fig10)"))
    }
}

/// Grid sizes and sweep lengths; [`PresetScale::REFERENCE`] is the full-size setup.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PresetScale {
    pub boundary_n: usize,
    pub image_n: usize,
    pub sweep_points: usize,
    /// Finest sweep grid, as an interval count over the boundary span.
    pub tau_max_n: usize,
}

impl PresetScale {
    pub const REFERENCE: PresetScale = PresetScale {
        boundary_n: 2514,
        image_n: 2828,
        sweep_points: 10,
        tau_max_n: 4000,
    };
}

fn geometric(from: f64, to: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![from];
    }
    let r = (to / from).ln() / (n - 1) as f64;
    (0..n).map(|i| from * (r * i as f64).exp()).collect()
}

fn sweep_values(figure: Figure, scale: PresetScale) -> Option<Vec<f64>> {
    let span = Z_MAX - Z_MIN;
    let n = scale.sweep_points;
    match figure.experiment() {
        Experiment::SweepTau => Some(geometric(span / 50.0, span / scale.tau_max_n as f64, n)),
        Experiment::SweepDelta => {
            let mut v = vec![0.0];
            v.extend(geometric(1e-4, 0.5, n.saturating_sub(1).max(1)));
            Some(v)
        }
        Experiment::SweepXmax => {
            let lowest = X_MIN + 0.1 * (X_MAX - X_MIN);
            Some((0..n).map(|i| X_MAX - (X_MAX - lowest) * i as f64 / (n - 1).max(1) as f64).collect())
        }
        _ => None,
    }
}

pub const MODELS: [ModelKind; 3] = [ModelKind::Gaussian, ModelKind::Parabolic, ModelKind::Step];

/// The config a preset runs for one model; output goes to `out`.
pub fn preset_config(figure: Figure, model: ModelKind, out: &Path, scale: PresetScale) -> RunConfig {
    let model = match model {
        ModelKind::Gaussian => ModelConfig {
            kind: ModelKind::Gaussian,
            rayleigh_length: Some(RAYLEIGH_LENGTH),
            waist_distance: None,
            xi: None,
            half_length: None,
            center: None,
            period: None,
            image_file: None,
        },
        kind => ModelConfig {
            kind,
            rayleigh_length: None,
            waist_distance: None,
            xi: None,
            half_length: Some(HALF_LENGTH),
            center: None,
            period: Some(PERIOD),
            image_file: None,
        },
    };
    RunConfig {
        experiment: figure.experiment(),
        output_dir: out.to_path_buf(),
        corner_mode: Default::default(),
        clamp_value: paraxial_inverse::DEFAULT_CLAMP,
        dump_matrix: false,
        model,
        physical: PhysicalConfig {
            wavelength: WAVELENGTH,
            theta: 0.0,
        },
        boundary_grid: BoundaryGridConfig {
            z_min: Z_MIN,
            z_max: Z_MAX,
            n: scale.boundary_n,
        },
        image_grid: Some(ImageGridConfig {
            x_min: X_MIN,
            x_max: X_MAX,
            n: scale.image_n,
        }),
        regularization: figure.regularization(),
        sweep: sweep_values(figure, scale).map(|values| SweepConfig { values }),
    }
}

fn title(figure: Figure) -> &'static str {
    match figure {
        Figure::Fig1 => "image-line |u|^2",
        Figure::Fig2 => "prescribed vs direct, alpha = 1",
        Figure::Fig3 => "coupled vs direct, alpha = 1",
        Figure::Fig4 => "D(tau), alpha = 1",
        Figure::Fig5 => "coupled vs direct, alpha = exp(0.1i)",
        Figure::Fig6 => "D(tau), alpha = exp(0.1i)",
        Figure::Fig7 => "coupled vs direct, alpha = 1.01",
        Figure::Fig8 => "D(tau), alpha = 1.01",
        Figure::Fig9 => "D(delta), alpha = 1 + delta",
        Figure::Fig10 => "D(x_max), alpha = 1.1",
    }
}

pub fn run_preset(figure: Figure, out: &Path, scale: PresetScale) -> Result<RunReport> {
    let start = Instant::now();
    let mut w = ArtifactWriter::create(out)?;
    let mut manifest = Manifest::new(Some(figure.as_str()));
    let name = figure.as_str();

    let mut results: Vec<(&'static str, Plan, Option<Computed>)> = Vec::new();
    for kind in MODELS {
        let plan = Plan::new(preset_config(figure, kind, out, scale), Path::new("."))?;
        let label = plan.setup.model.name();
        for a in &plan.assumptions {
            if !manifest.assumptions.contains(a) {
                manifest.assumptions.push(a.clone());
            }
        }
        let mut record = RunRecord {
            label: label.to_string(),
            error: None,
            realized: plan.realized(),
            metrics: Default::default(),
            config: plan.config.clone(),
        };
        let computed = match experiment::compute(&plan) {
            Ok(c) => {
                record.metrics = experiment::metrics(&c);
                Some(c)
            }
            Err(e) => {
                record.error = Some(e.to_string());
                None
            }
        };
        if record.error.is_some() || !record.metrics.failed_points.is_empty() {
            manifest.status = "numerical_failure".into();
        }
        manifest.runs.push(record);
        results.push((label, plan, computed));
    }

    let realized = manifest.runs[0].realized;
    manifest.notes.push(format!(
        "nominal tau = {NOMINAL_TAU}, realized tau = {:e} ((z_max - z_min) / N)",
        realized.tau
    ));
    manifest.notes.push(format!(
        "nominal h = {NOMINAL_H}, realized h = {:e} ((x_max - x_min) / N_x); the nominal value is rounded",
        realized.h
    ));

    match figure.experiment() {
        Experiment::ForwardOnly => {
            let x = results[0].1.image_grid().nodes();
            let mut t = CsvTable::new().column("x", "length", x);
            for (label, _, c) in &results {
                if let Some(Computed::Forward { image, .. }) = c {
                    t = experiment::complex_columns(t, label, image.samples());
                }
            }
            let series = results
                .iter()
                .filter_map(|(label, ..)| t.index_of(&format!("abs2_{label}")).map(|c| (c, label.to_string())))
                .collect();
            let panel = Panel {
                title: format!("{name}: {}", title(figure)),
                x: 1,
                series,
                x_axis: Axis::Linear,
                y_axis: Axis::Linear,
            };
            w.table(&format!("{name}.csv"), &t, &[panel])?;
        }
        Experiment::Reconstruct => {
            let tags: &[&str] = if figure == Figure::Fig2 {
                &["prescribed", "direct"]
            } else {
                &["coupled", "direct"]
            };
            for (label, plan, c) in &results {
                if let Some(Computed::Reconstruct { outcome, .. }) = c {
                    let lines = [("direct", &outcome.direct.u0), ("coupled", &outcome.coupled.u0)];
                    let t = experiment::boundary_table(plan.grid.nodes(), outcome.truth.as_ref(), &lines);
                    let panels =
                        experiment::boundary_panels(&t, &format!("{name} {label}: {}", title(figure)), tags);
                    w.table(&format!("{name}_{label}.csv"), &t, &panels)?;
                }
            }
        }
        _ => {
            let sweeps: Vec<(&str, &SweepResult)> = results
                .iter()
                .filter_map(|(label, _, c)| match c {
                    Some(Computed::Sweep(s)) => Some((*label, s)),
                    _ => None,
                })
                .collect();
            let t = experiment::sweep_table(&sweeps, false);
            let panels = experiment::sweep_panels(&t, &format!("{name}: {}", title(figure)), &sweeps);
            w.table(&format!("{name}.csv"), &t, &panels)?;
        }
    }
    finish(manifest, w, start)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for f in Figure::ALL {
            assert_eq!(f.as_str().parse::<Figure>().unwrap(), f);
        }
        assert!("fig11".parse::<Figure>().is_err());
    }

    #[test]
    fn reference_configs_validate() {
        let dir = Path::new("unused");
        for f in Figure::ALL {
            for m in MODELS {
                let c = preset_config(f, m, dir, PresetScale::REFERENCE);
                assert_eq!(c.boundary_grid.n, 2514);
                let plan = Plan::new(c, Path::new(".")).unwrap();
                let r = plan.realized();
                assert!((r.tau - 0.0039777).abs() < 1e-7);
                assert!((r.h - 0.0090013).abs() < 1e-7);
            }
        }
    }

    #[test]
    fn sweep_ranges() {
        let tau = sweep_values(Figure::Fig4, PresetScale::REFERENCE).unwrap();
        assert_eq!(tau.len(), 10);
        assert!((tau[0] - 0.2).abs() < 1e-15 && (tau[9] - 0.0025).abs() < 1e-15);
        let delta = sweep_values(Figure::Fig9, PresetScale::REFERENCE).unwrap();
        assert_eq!(delta[0], 0.0);
        let xmax = sweep_values(Figure::Fig10, PresetScale::REFERENCE).unwrap();
        assert_eq!(xmax[0], X_MAX);
        assert!(xmax.windows(2).all(|w| w[1] < w[0]));
    }
}
