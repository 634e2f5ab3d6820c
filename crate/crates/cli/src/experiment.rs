//! Executes a validated [`Plan`] and turns the result into tables and metrics.

use paraxial_inverse::analysis::{self, Model, Outcome, SweepParameter, SweepResult};
use paraxial_inverse::{
    eval_gaussian_image, fresnel_propagate, inclined_propagate, solve_special_imag, solve_special_real,
    BoundaryLine, Complex64, ComplexLine, ImageLine, UniformGrid,
};

use crate::config::{Experiment, Plan};
use crate::output::{Axis, CsvTable, Metrics, Panel};

#[derive(Debug, Clone)]
pub enum Computed {
    Forward {
        boundary: BoundaryLine,
        image: ImageLine,
        /// Closed-form image, when the model has one.
        exact: Option<ImageLine>,
    },
    Reconstruct {
        outcome: Box<Outcome>,
        image: ImageLine,
    },
    Sweep(SweepResult),
    Special {
        truth: Option<BoundaryLine>,
        recovered: BoundaryLine,
    },
}

pub fn compute(plan: &Plan) -> paraxial_inverse::Result<Computed> {
    let s = &plan.setup;
    let values = || plan.config.sweep.as_ref().map(|w| w.values.clone()).unwrap_or_default();
    Ok(match plan.config.experiment {
        Experiment::ForwardOnly => {
            let boundary = s.model.boundary(&plan.grid).expect("validated: forward needs a model");
            let x = *s.image.grid();
            let image = if plan.params.theta() == 0.0 {
                fresnel_propagate(&boundary, &plan.params, &x)?
            } else {
                let samples = x
                    .nodes()
                    .into_iter()
                    .map(|xi| inclined_propagate(&boundary, &plan.params, (xi, 0.0)))
                    .collect::<paraxial_inverse::Result<Vec<_>>>()?;
                ComplexLine::new(x, samples)?
            };
            let exact = match (&s.model, plan.params.theta() == 0.0) {
                (Model::Gaussian(b), true) => Some(eval_gaussian_image(b, &x)),
                _ => None,
            };
            Computed::Forward {
                boundary,
                image,
                exact,
            }
        }
        Experiment::Reconstruct => Computed::Reconstruct {
            outcome: Box::new(analysis::reconstruct(s, &plan.grid, s.regularization, &s.image)?),
            image: s.image.clone(),
        },
        Experiment::SweepTau => Computed::Sweep(analysis::sweep_tau(s, &values())),
        Experiment::SweepDelta => Computed::Sweep(analysis::sweep_delta(s, &values(), s.regularization.mode)),
        Experiment::SweepXmax => Computed::Sweep(analysis::sweep_xmax(s, &values())),
        Experiment::SpecialReal => Computed::Special {
            truth: s.model.boundary(&plan.grid),
            recovered: solve_special_real(&s.image, &plan.params, &plan.grid)?,
        },
        Experiment::SpecialImag => {
            // Closed-form models are real; the imaginary case uses i times them.
            let i = Complex64::new(0.0, 1.0);
            let (image, truth) = match &s.model {
                Model::Measured => (s.image.clone(), None),
                m => (s.image.scaled(i), m.boundary(&plan.grid).map(|u| u.scaled(i))),
            };
            Computed::Special {
                truth,
                recovered: solve_special_imag(&image, &plan.params, &plan.grid)?,
            }
        }
    })
}

pub fn rel_l2(reference: &[Complex64], other: &[Complex64]) -> f64 {
    let num: f64 = reference.iter().zip(other).map(|(a, b)| (a - b).norm_sqr()).sum();
    let den: f64 = reference.iter().map(|a| a.norm_sqr()).sum();
    (num / den).sqrt()
}

pub fn metrics(c: &Computed) -> Metrics {
    let mut m = Metrics::default();
    match c {
        Computed::Forward { image, exact, .. } => {
            m.forward_rel_l2 = exact.as_ref().map(|e| rel_l2(e.samples(), image.samples()));
        }
        Computed::Reconstruct { outcome, .. } => {
            m.condition_estimate = Some(outcome.direct.condition_estimate);
            m.residual_direct = Some(outcome.direct.residual_norm);
            m.residual_coupled = Some(outcome.coupled.residual_norm);
            m.d_thin = outcome.d_thin.as_ref().map(|r| r.d);
            m.d_thin_excluded_max_error = outcome.d_thin.as_ref().map(|r| r.excluded_max_error);
            m.d_thick = outcome.d_thick.as_ref().map(|r| r.d);
        }
        Computed::Sweep(sweep) => {
            m.failed_points = sweep
                .points
                .iter()
                .filter_map(|p| p.error.as_ref().map(|e| format!("{} = {:e}: {e}", sweep.parameter.as_str(), p.requested)))
                .collect();
        }
        Computed::Special { truth, recovered } => {
            m.special_rel_l2 = truth.as_ref().map(|t| rel_l2(t.samples(), recovered.samples()));
        }
    }
    m
}

fn parts(line: &[Complex64]) -> [Vec<f64>; 3] {
    [
        line.iter().map(|u| u.re).collect(),
        line.iter().map(|u| u.im).collect(),
        line.iter().map(|u| u.norm_sqr()).collect(),
    ]
}

/// Appends `re_<tag>`, `im_<tag>` and `abs2_<tag>` columns.
pub fn complex_columns(table: CsvTable, tag: &str, line: &[Complex64]) -> CsvTable {
    let [re, im, abs2] = parts(line);
    table
        .column(&format!("re_{tag}"), "arb", re)
        .column(&format!("im_{tag}"), "arb", im)
        .column(&format!("abs2_{tag}"), "arb^2", abs2)
}

pub fn boundary_table(
    grid_nodes: Vec<f64>,
    truth: Option<&BoundaryLine>,
    lines: &[(&str, &BoundaryLine)],
) -> CsvTable {
    let mut t = CsvTable::new().column("z", "length", grid_nodes);
    if let Some(u) = truth {
        t = complex_columns(t, "prescribed", u.samples());
    }
    for (tag, u) in lines {
        t = complex_columns(t, tag, u.samples());
    }
    t
}

/// `|u0|^2` and `Re u0` panels for the named series.
pub fn boundary_panels(table: &CsvTable, title: &str, tags: &[&str]) -> Vec<Panel> {
    let pick = |prefix: &str| {
        tags.iter()
            .filter_map(|tag| table.index_of(&format!("{prefix}_{tag}")).map(|c| (c, tag.to_string())))
            .collect::<Vec<_>>()
    };
    vec![
        Panel {
            title: format!("{title}: |u0|^2"),
            x: 1,
            series: pick("abs2"),
            x_axis: Axis::Linear,
            y_axis: Axis::Linear,
        },
        Panel {
            title: format!("{title}: Re u0"),
            x: 1,
            series: pick("re"),
            x_axis: Axis::Linear,
            y_axis: Axis::Linear,
        },
    ]
}

pub fn parameter_unit(p: SweepParameter) -> &'static str {
    match p {
        SweepParameter::Delta => "1",
        SweepParameter::Tau | SweepParameter::XMax => "length",
    }
}

/// One parameter column pair plus D columns per labelled sweep.
pub fn sweep_table(sweeps: &[(&str, &SweepResult)], diagnostics: bool) -> CsvTable {
    let (_, first) = sweeps[0];
    let name = first.parameter.as_str();
    let unit = parameter_unit(first.parameter);
    let mut t = CsvTable::new()
        .column(&format!("{name}_requested"), unit, first.points.iter().map(|p| p.requested).collect())
        .column(name, unit, first.parameter_values());
    for (label, s) in sweeps {
        let suffix = if label.is_empty() { String::new() } else { format!("_{label}") };
        t = t
            .column(&format!("d_thin{suffix}"), "1", s.d_thin())
            .column(&format!("d_thick{suffix}"), "1", s.d_thick());
        if diagnostics {
            let opt = |f: fn(&analysis::SweepPoint) -> Option<f64>| s.points.iter().map(|p| f(p).unwrap_or(f64::NAN)).collect();
            t = t
                .column(&format!("condition_estimate{suffix}"), "1", opt(|p| p.condition_estimate))
                .column(&format!("residual_direct{suffix}"), "1", opt(|p| p.residual_direct))
                .column(&format!("residual_coupled{suffix}"), "1", opt(|p| p.residual_coupled));
        }
    }
    t
}

pub fn sweep_panels(table: &CsvTable, title: &str, sweeps: &[(&str, &SweepResult)]) -> Vec<Panel> {
    let x_axis = match sweeps[0].1.parameter {
        SweepParameter::XMax => Axis::Linear,
        _ => Axis::Log,
    };
    let mut series = Vec::new();
    for (label, _) in sweeps {
        let suffix = if label.is_empty() { String::new() } else { format!("_{label}") };
        for kind in ["d_thin", "d_thick"] {
            if let Some(c) = table.index_of(&format!("{kind}{suffix}")) {
                series.push((c, format!("{kind}{suffix}").replace('_', " ")));
            }
        }
    }
    vec![Panel {
        title: title.to_string(),
        x: 2,
        series,
        x_axis,
        y_axis: Axis::Log,
    }]
}

pub fn image_table(image: &ImageLine, exact: Option<&ImageLine>) -> CsvTable {
    let mut t = complex_columns(CsvTable::new().column("x", "length", image.grid().nodes()), "u", image.samples());
    if let Some(e) = exact {
        t = complex_columns(t, "exact", e.samples());
    }
    t
}
