use paraxial_inverse::analysis::{reconstruct as solve_both, sweep_delta, ExperimentSetup, Model};
use paraxial_inverse::{
    fresnel_propagate, GaussianBeam, ParabolicBeam, PhysicalParams, Regularization, RegularizationMode, StepBeam,
    UniformGrid, XGrid, ZGrid,
};

const Z_MIN: f64 = 90.0;
const Z_MAX: f64 = 100.0;
const X_MIN: f64 = 2.8284;
const X_MAX: f64 = 28.284;
const WAVELENGTH: f64 = 0.01;
/// Largest boundary grid the page may request; a dense solve beyond this is slow in wasm.
pub const MAX_N: usize = 1200;
pub const MAX_NX: usize = 4000;

fn err(e: impl ToString) -> String {
    e.to_string()
}

fn params() -> PhysicalParams {
    PhysicalParams::orthogonal(WAVELENGTH).expect("fixed wavelength")
}

fn grids(n: usize, nx: usize) -> Result<(ZGrid, XGrid), String> {
    if !(4..=MAX_N).contains(&n) {
        return Err(format!("N must lie in 4..={MAX_N}, got {n}"));
    }
    if !(2..=MAX_NX).contains(&nx) {
        return Err(format!("N_x must lie in 2..={MAX_NX}, got {nx}"));
    }
    Ok((ZGrid::new(Z_MIN, Z_MAX, n).map_err(err)?, XGrid::new(X_MIN, X_MAX, nx).map_err(err)?))
}

pub fn model(name: &str) -> Result<Model, String> {
    let p = params();
    let mid = 0.5 * (Z_MIN + Z_MAX);
    Ok(match name {
        "gaussian" => Model::Gaussian(GaussianBeam::aimed_at(&p, 20.0, mid, 0.5 * (X_MIN + X_MAX)).map_err(err)?),
        "parabolic" => Model::Parabolic(ParabolicBeam::new(4.8, mid, 1.0).map_err(err)?),
        "step" => Model::Step(StepBeam::new(4.8, mid, 1.0).map_err(err)?),
        other => return Err(format!("unknown model `{other}`")),
    })
}

fn regularization(mode: &str, delta: f64) -> Result<Regularization, String> {
    let mode: RegularizationMode = mode.parse().map_err(err)?;
    Regularization::new(mode, if mode == RegularizationMode::Unit { 0.0 } else { delta }).map_err(err)
}

pub fn image_axis(nx: usize) -> Result<Vec<f64>, String> {
    Ok(grids(4, nx)?.1.nodes())
}

/// Numerically propagated image intensity for every model, closed form included.
pub fn image_intensity(name: &str, n: usize, nx: usize) -> Result<(Vec<f64>, Vec<f64>), String> {
    let (z, x) = grids(n, nx)?;
    let boundary = model(name)?.boundary(&z).expect("closed-form model");
    let image = fresnel_propagate(&boundary, &params(), &x).map_err(err)?;
    Ok((x.nodes(), image.samples().iter().map(|u| u.norm_sqr()).collect()))
}

fn setup(name: &str, n: usize, nx: usize) -> Result<ExperimentSetup, String> {
    let (z, x) = grids(n, nx)?;
    ExperimentSetup::from_model(params(), z, x, model(name)?).map_err(err)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Reconstructed {
    pub z: Vec<f64>,
    pub prescribed: Vec<f64>,
    pub direct: Vec<f64>,
    pub coupled: Vec<f64>,
    pub d_thin: f64,
    pub d_thick: f64,
    pub condition: f64,
}

pub fn reconstruct(name: &str, n: usize, nx: usize, mode: &str, delta: f64) -> Result<Reconstructed, String> {
    let s = setup(name, n, nx)?;
    let out = solve_both(&s, &s.grid, regularization(mode, delta)?, &s.image).map_err(err)?;
    let abs2 = |u: &paraxial_inverse::BoundaryLine| u.samples().iter().map(|v| v.norm_sqr()).collect();
    Ok(Reconstructed {
        z: s.grid.nodes(),
        prescribed: out.truth.as_ref().map(abs2).unwrap_or_default(),
        direct: abs2(&out.direct.u0),
        coupled: abs2(&out.coupled.u0),
        d_thin: out.d_thin.map_or(f64::NAN, |r| r.d),
        d_thick: out.d_thick.map_or(f64::NAN, |r| r.d),
        condition: out.direct.condition_estimate,
    })
}

pub fn delta_sweep(name: &str, n: usize, nx: usize, mode: &str, deltas: &[f64]) -> Result<Vec<f64>, String> {
    let mode: RegularizationMode = mode.parse().map_err(err)?;
    if mode == RegularizationMode::Unit {
        return Err("a delta sweep needs phase or shift mode".into());
    }
    let r = sweep_delta(&setup(name, n, nx)?, deltas, mode);
    Ok(r.d_thin().into_iter().zip(r.d_thick()).flat_map(|(a, b)| [a, b]).collect())
}
