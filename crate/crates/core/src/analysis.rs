//! Reconstruction quality metrics, parameter sweeps and consistency residuals.

use num_complex::Complex64;

use crate::discretize::{assemble_g, assemble_g_prime, assemble_m, assemble_t, CornerMode, TbcMatrix};
use crate::error::{domain, Error, Result};
use crate::forward::fresnel_propagate;
use crate::grid::{
    BoundaryLine, ComplexLine, ImageLine, PhysicalParams, Regularization, RegularizationMode, XGrid,
    ZGrid,
};
use crate::models::{
    eval_gaussian_boundary, eval_gaussian_image, eval_parabolic_boundary, eval_step_boundary, GaussianBeam,
    ParabolicBeam, StepBeam,
};
use crate::solver::{FactoredSystem, Reconstruction};

/// Nodes whose reference magnitude falls below this fraction of the peak are
/// left out of the normalized sum.
pub const D_THRESHOLD: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq)]
pub struct DifferenceReport {
    pub d: f64,
    pub lhs_label: String,
    pub rhs_label: String,
    pub grid: ZGrid,
    /// Nodes entering the normalized sum.
    pub included: usize,
    /// Largest `|u1 - u2|` over the excluded low-amplitude nodes.
    pub excluded_max_error: f64,
}

/// `sum_n |u1 - u2|^2 / |u1|^2` over nodes where `|u1| > D_THRESHOLD * max |u1|`.
///
/// `u1` is the reference. An all-zero reference is rejected.
pub fn d_metric(u1: &BoundaryLine, u2: &BoundaryLine) -> Result<DifferenceReport> {
    d_metric_labeled(u1, u2, "reference", "candidate")
}

pub fn d_metric_labeled(u1: &BoundaryLine, u2: &BoundaryLine, lhs: &str, rhs: &str) -> Result<DifferenceReport> {
    if u1.grid() != u2.grid() {
        return domain("D metric needs both lines on the same grid");
    }
    let peak = u1.max_abs();
    if peak == 0.0 {
        return Err(Error::Degenerate("reference amplitude is identically zero".into()));
    }
    let cutoff = D_THRESHOLD * peak;
    let mut d = 0.0;
    let mut included = 0;
    let mut excluded_max_error: f64 = 0.0;
    for (a, b) in u1.samples().iter().zip(u2.samples()) {
        let err = (a - b).norm_sqr();
        let mag = a.norm();
        if mag > cutoff {
            d += err / (mag * mag);
            included += 1;
        } else {
            excluded_max_error = excluded_max_error.max(err.sqrt());
        }
    }
    Ok(DifferenceReport {
        d,
        lhs_label: lhs.to_string(),
        rhs_label: rhs.to_string(),
        grid: *u1.grid(),
        included,
        excluded_max_error,
    })
}

/// `||T u0 - du0||_2 / ||du0||_2`.
pub fn tbc_residual(u0: &BoundaryLine, du0: &BoundaryLine, params: &PhysicalParams) -> Result<f64> {
    if u0.grid() != du0.grid() {
        return domain("TBC residual needs both lines on the same grid");
    }
    let denom = du0.norm();
    if denom == 0.0 {
        return Err(Error::Degenerate("derivative line is identically zero".into()));
    }
    let t = assemble_t(u0.grid(), params)?;
    tbc_residual_with(&t, u0, du0, denom)
}

fn tbc_residual_with(t: &TbcMatrix, u0: &BoundaryLine, du0: &BoundaryLine, denom: f64) -> Result<f64> {
    let tu = t.apply(u0.samples())?;
    let num = tu
        .iter()
        .zip(du0.samples())
        .map(|(a, b)| (a - b).norm_sqr())
        .sum::<f64>()
        .sqrt();
    Ok(num / denom)
}

/// Field samples on a uniform `(x, z)` lattice, `values[iz * nx + ix]`.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldPatch {
    pub dx: f64,
    pub dz: f64,
    pub nx: usize,
    pub nz: usize,
    pub values: Vec<Complex64>,
}

impl FieldPatch {
    /// Samples `f(x, z)` on `nx * nz` points starting at `(x0, z0)`.
    pub fn sample(
        (x0, z0): (f64, f64),
        (dx, dz): (f64, f64),
        (nx, nz): (usize, usize),
        f: impl Fn(f64, f64) -> Complex64,
    ) -> Self {
        let mut values = Vec::with_capacity(nx * nz);
        for iz in 0..nz {
            for ix in 0..nx {
                values.push(f(x0 + ix as f64 * dx, z0 + iz as f64 * dz));
            }
        }
        Self {
            dx,
            dz,
            nx,
            nz,
            values,
        }
    }

    fn at(&self, ix: usize, iz: usize) -> Complex64 {
        self.values[iz * self.nx + ix]
    }
}

/// Max-norm of the centered-difference operator `2ik D_z + D_xx` on interior points.
pub fn pwe_residual(patch: &FieldPatch, params: &PhysicalParams) -> Result<f64> {
    if patch.nx < 3 || patch.nz < 3 {
        return domain(format!("PWE residual needs a 3x3 patch, got {}x{}", patch.nx, patch.nz));
    }
    if patch.values.len() != patch.nx * patch.nz {
        return Err(Error::DimensionMismatch {
            expected: patch.nx * patch.nz,
            actual: patch.values.len(),
        });
    }
    if !(patch.dx > 0.0 && patch.dz > 0.0) {
        return domain("patch steps must be positive");
    }
    let two_ik = Complex64::new(0.0, 2.0 * params.k());
    let mut worst: f64 = 0.0;
    for iz in 1..patch.nz - 1 {
        for ix in 1..patch.nx - 1 {
            let dz = (patch.at(ix, iz + 1) - patch.at(ix, iz - 1)) / (2.0 * patch.dz);
            let dxx = (patch.at(ix + 1, iz) - 2.0 * patch.at(ix, iz) + patch.at(ix - 1, iz)) / (patch.dx * patch.dx);
            worst = worst.max((two_ik * dz + dxx).norm());
        }
    }
    Ok(worst)
}

/// Boundary model with a known closed form, or measured data without one.
#[derive(Debug, Clone, PartialEq)]
pub enum Model {
    Gaussian(GaussianBeam),
    Parabolic(ParabolicBeam),
    Step(StepBeam),
    /// Image data only; the thin-line metric is unavailable.
    Measured,
}

impl Model {
    pub fn name(&self) -> &'static str {
        match self {
            Model::Gaussian(_) => "gaussian",
            Model::Parabolic(_) => "parabolic",
            Model::Step(_) => "step",
            Model::Measured => "measured",
        }
    }

    /// The pre-specified boundary amplitude, if the model has one.
    pub fn boundary(&self, grid: &ZGrid) -> Option<BoundaryLine> {
        match self {
            Model::Gaussian(b) => Some(eval_gaussian_boundary(b, grid)),
            Model::Parabolic(b) => Some(eval_parabolic_boundary(b, grid)),
            Model::Step(b) => Some(eval_step_boundary(b, grid)),
            Model::Measured => None,
        }
    }
}

/// Everything an inverse experiment needs besides the swept parameter.
#[derive(Debug, Clone)]
pub struct ExperimentSetup {
    pub params: PhysicalParams,
    pub grid: ZGrid,
    pub model: Model,
    pub image: ImageLine,
    pub regularization: Regularization,
    pub corner_mode: CornerMode,
    pub clamp_value: f64,
}

impl ExperimentSetup {
    /// Builds the image data for `model`: the closed form for the Gaussian,
    /// forward propagation on `grid` for the compactly supported profiles.
    pub fn from_model(params: PhysicalParams, grid: ZGrid, image_grid: XGrid, model: Model) -> Result<Self> {
        let image = match &model {
            Model::Gaussian(b) => eval_gaussian_image(b, &image_grid),
            Model::Measured => return domain("measured data needs an explicit image line"),
            other => {
                let boundary = other.boundary(&grid).expect("closed-form model");
                fresnel_propagate(&boundary, &params, &image_grid)?
            }
        };
        Ok(Self::with_image(params, grid, model, image))
    }

    pub fn with_image(params: PhysicalParams, grid: ZGrid, model: Model, image: ImageLine) -> Self {
        Self {
            params,
            grid,
            model,
            image,
            regularization: Regularization::unit(),
            corner_mode: CornerMode::default(),
            clamp_value: crate::discretize::DEFAULT_CLAMP,
        }
    }

    pub fn with_regularization(mut self, reg: Regularization) -> Self {
        self.regularization = reg;
        self
    }

    pub fn with_corners(mut self, mode: CornerMode, clamp_value: f64) -> Self {
        self.corner_mode = mode;
        self.clamp_value = clamp_value;
        self
    }
}

/// Result of solving both systems on one grid.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub direct: Reconstruction,
    pub coupled: Reconstruction,
    pub truth: Option<BoundaryLine>,
    pub d_thin: Option<DifferenceReport>,
    pub d_thick: Option<DifferenceReport>,
}

/// Solves the amplitude and derivative systems for `image` on `grid`.
pub fn reconstruct(setup: &ExperimentSetup, grid: &ZGrid, reg: Regularization, image: &ImageLine) -> Result<Outcome> {
    let m = assemble_m(grid, setup.corner_mode, setup.clamp_value)?;
    let factored = FactoredSystem::new(&m, reg)?;
    drop(m);
    let t = assemble_t(grid, &setup.params)?;
    solve_both(setup, &factored, &t, grid, image)
}

fn solve_both(
    setup: &ExperimentSetup,
    factored: &FactoredSystem,
    t: &TbcMatrix,
    grid: &ZGrid,
    image: &ImageLine,
) -> Result<Outcome> {
    let direct = factored.solve_direct(&assemble_g(image, grid, &setup.params))?;
    let coupled = factored.solve_coupled(&assemble_g_prime(image, grid, &setup.params), t)?;
    let truth = setup.model.boundary(grid);
    let d_thin = match &truth {
        Some(u) => d_metric_labeled(u, &direct.u0, "prescribed", "direct").ok(),
        None => None,
    };
    let d_thick = d_metric_labeled(&direct.u0, &coupled.u0, "direct", "coupled").ok();
    Ok(Outcome {
        direct,
        coupled,
        truth,
        d_thin,
        d_thick,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParameter {
    Tau,
    Delta,
    XMax,
}

impl SweepParameter {
    pub fn as_str(&self) -> &'static str {
        match self {
            SweepParameter::Tau => "tau",
            SweepParameter::Delta => "delta",
            SweepParameter::XMax => "x_max",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub requested: f64,
    /// The value actually used (nearest admissible grid for `tau` and `x_max`).
    pub realized: f64,
    pub d_thin: Option<f64>,
    pub d_thick: Option<f64>,
    pub condition_estimate: Option<f64>,
    pub residual_direct: Option<f64>,
    pub residual_coupled: Option<f64>,
    pub error: Option<String>,
}

impl SweepPoint {
    fn failed(requested: f64, realized: f64, err: Error) -> Self {
        Self {
            requested,
            realized,
            d_thin: None,
            d_thick: None,
            condition_estimate: None,
            residual_direct: None,
            residual_coupled: None,
            error: Some(err.to_string()),
        }
    }

    fn from_outcome(requested: f64, realized: f64, o: &Outcome) -> Self {
        Self {
            requested,
            realized,
            d_thin: o.d_thin.as_ref().map(|r| r.d),
            d_thick: o.d_thick.as_ref().map(|r| r.d),
            condition_estimate: Some(o.direct.condition_estimate),
            residual_direct: Some(o.direct.residual_norm),
            residual_coupled: Some(o.coupled.residual_norm),
            error: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SweepResult {
    pub parameter: SweepParameter,
    pub points: Vec<SweepPoint>,
    pub regularization_mode: RegularizationMode,
}

impl SweepResult {
    pub fn parameter_values(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.realized).collect()
    }

    /// Thin-line values, `NaN` where the point failed or has no reference.
    pub fn d_thin(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.d_thin.unwrap_or(f64::NAN)).collect()
    }

    pub fn d_thick(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.d_thick.unwrap_or(f64::NAN)).collect()
    }
}

/// Nearest admissible interval count for a requested step.
pub fn intervals_for_tau(z_min: f64, z_max: f64, tau: f64) -> Result<usize> {
    if !(tau > 0.0 && tau.is_finite()) {
        return domain(format!("tau must be positive, got {tau}"));
    }
    Ok((((z_max - z_min) / tau).round() as usize).max(4))
}

/// Rebuilds grid, operators and right-hand sides for each `tau`.
pub fn sweep_tau(setup: &ExperimentSetup, tau_values: &[f64]) -> SweepResult {
    let (z_min, z_max) = (setup.grid.z_min(), setup.grid.z_max());
    let points = tau_values
        .iter()
        .map(|&tau| {
            let grid = intervals_for_tau(z_min, z_max, tau).and_then(|n| ZGrid::new(z_min, z_max, n));
            match grid {
                Err(e) => SweepPoint::failed(tau, f64::NAN, e),
                Ok(grid) => match reconstruct(setup, &grid, setup.regularization, &setup.image) {
                    Ok(o) => SweepPoint::from_outcome(tau, grid.tau(), &o),
                    Err(e) => SweepPoint::failed(tau, grid.tau(), e),
                },
            }
        })
        .collect();
    SweepResult {
        parameter: SweepParameter::Tau,
        points,
        regularization_mode: setup.regularization.mode,
    }
}

/// Re-solves on the setup grid with `alpha` built from each `delta`.
pub fn sweep_delta(setup: &ExperimentSetup, delta_values: &[f64], mode: RegularizationMode) -> SweepResult {
    let grid = setup.grid;
    let shared = assemble_m(&grid, setup.corner_mode, setup.clamp_value)
        .and_then(|m| assemble_t(&grid, &setup.params).map(|t| (m, t)));
    let points = delta_values
        .iter()
        .map(|&delta| {
            let outcome = shared.as_ref().map_err(Clone::clone).and_then(|(m, t)| {
                let reg = Regularization::new(mode, delta)?;
                let factored = FactoredSystem::new(m, reg)?;
                solve_both(setup, &factored, t, &grid, &setup.image)
            });
            match outcome {
                Ok(o) => SweepPoint::from_outcome(delta, delta, &o),
                Err(e) => SweepPoint::failed(delta, delta, e),
            }
        })
        .collect();
    SweepResult {
        parameter: SweepParameter::Delta,
        points,
        regularization_mode: mode,
    }
}

/// Truncates the image window at each `x_max` and re-solves with the same factorization.
pub fn sweep_xmax(setup: &ExperimentSetup, xmax_values: &[f64]) -> SweepResult {
    let grid = setup.grid;
    let shared = assemble_m(&grid, setup.corner_mode, setup.clamp_value).and_then(|m| {
        let factored = FactoredSystem::new(&m, setup.regularization)?;
        Ok((factored, assemble_t(&grid, &setup.params)?))
    });
    let points = xmax_values
        .iter()
        .map(|&x_max| {
            let image = match setup.image.truncated(x_max) {
                Ok(i) => i,
                Err(e) => return SweepPoint::failed(x_max, f64::NAN, e),
            };
            let realized = image.grid().x_max();
            let outcome = shared
                .as_ref()
                .map_err(Clone::clone)
                .and_then(|(f, t)| solve_both(setup, f, t, &grid, &image));
            match outcome {
                Ok(o) => SweepPoint::from_outcome(x_max, realized, &o),
                Err(e) => SweepPoint::failed(x_max, realized, e),
            }
        })
        .collect();
    SweepResult {
        parameter: SweepParameter::XMax,
        points,
        regularization_mode: setup.regularization.mode,
    }
}

/// Convenience for building a zero line on `grid`.
pub fn zero_boundary(grid: &ZGrid) -> BoundaryLine {
    ComplexLine::zeros(*grid)
}
