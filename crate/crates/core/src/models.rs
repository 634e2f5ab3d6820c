//! Closed-form model amplitudes used to exercise the direct and inverse solvers.
//!
//! The tilted Gaussian is an exact solution of `2ik u_z + u_xx = 0` and is
//! evaluated in the orthogonal frame (image line at `z = 0`, boundary at
//! negative `z`). The parabolic and step profiles are only defined on the
//! boundary line and are parametrised by the positive distance to the image
//! line, like every [`ZGrid`].

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{domain, Result};
use crate::grid::{BoundaryLine, ComplexLine, ImageLine, PhysicalParams, UniformGrid, XGrid, ZGrid};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Tilted Gaussian beam crossing the boundary line at its waist.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianBeam {
    rayleigh_length: f64,
    waist_radius: f64,
    /// Distance from the waist to the image line.
    waist_distance: f64,
    /// Transverse spatial frequency; the beam axis is `x = -xi (z - z_waist) / k`.
    xi: f64,
    k: f64,
}

impl GaussianBeam {
    pub fn new(params: &PhysicalParams, rayleigh_length: f64, waist_distance: f64, xi: f64) -> Result<Self> {
        if !(rayleigh_length.is_finite() && rayleigh_length > 0.0) {
            return domain(format!("Rayleigh length must be positive, got {rayleigh_length}"));
        }
        if !(waist_distance.is_finite() && xi.is_finite()) {
            return domain("Gaussian waist position and frequency must be finite");
        }
        let k = params.k();
        Ok(Self {
            rayleigh_length,
            waist_radius: (2.0 * rayleigh_length / k).sqrt(),
            waist_distance,
            xi,
            k,
        })
    }

    /// Chooses `xi` so that the beam axis hits the image line at `x_center`.
    pub fn aimed_at(
        params: &PhysicalParams,
        rayleigh_length: f64,
        waist_distance: f64,
        x_center: f64,
    ) -> Result<Self> {
        if waist_distance <= 0.0 {
            return domain(format!("waist distance must be positive, got {waist_distance}"));
        }
        let xi = -params.k() * x_center / waist_distance;
        Self::new(params, rayleigh_length, waist_distance, xi)
    }

    pub fn rayleigh_length(&self) -> f64 {
        self.rayleigh_length
    }

    pub fn waist_radius(&self) -> f64 {
        self.waist_radius
    }

    pub fn waist_distance(&self) -> f64 {
        self.waist_distance
    }

    pub fn xi(&self) -> f64 {
        self.xi
    }

    fn parts(&self, x: f64, z: f64) -> (Complex64, Complex64, Complex64) {
        let k = self.k;
        let dz = z + self.waist_distance;
        let w2 = self.waist_radius * self.waist_radius;
        let q = Complex64::new(w2, 2.0 * dz / k);
        let envelope = (Complex64::new(1.0, 2.0 * dz / (k * w2))).sqrt().inv();
        let carrier = (-I * (self.xi * x + self.xi * self.xi * dz / (2.0 * k))).exp();
        let offset = x + self.xi * dz / k;
        let profile = (-(offset * offset) / q).exp();
        (envelope * carrier * profile, q, Complex64::new(offset, 0.0))
    }

    /// Field at `(x, z)` in the orthogonal frame.
    pub fn field(&self, x: f64, z: f64) -> Complex64 {
        self.parts(x, z).0
    }

    /// Analytic transverse derivative `du/dx` at `(x, z)`.
    pub fn field_dx(&self, x: f64, z: f64) -> Complex64 {
        let (u, q, offset) = self.parts(x, z);
        u * (-I * self.xi - 2.0 * offset / q)
    }
}

/// Gaussian amplitude on the boundary line (`x = 0`) at every grid node.
pub fn eval_gaussian_boundary(beam: &GaussianBeam, grid: &ZGrid) -> BoundaryLine {
    let samples = grid.nodes().into_iter().map(|z| beam.field(0.0, -z)).collect();
    ComplexLine::new(*grid, samples).expect("Gaussian samples are finite")
}

/// Analytic `du/dx` on the boundary line, the exact counterpart of the discrete TBC.
pub fn eval_gaussian_boundary_dx(beam: &GaussianBeam, grid: &ZGrid) -> BoundaryLine {
    let samples = grid.nodes().into_iter().map(|z| beam.field_dx(0.0, -z)).collect();
    ComplexLine::new(*grid, samples).expect("Gaussian samples are finite")
}

/// Gaussian amplitude on the image line `z = 0`.
pub fn eval_gaussian_image(beam: &GaussianBeam, grid: &XGrid) -> ImageLine {
    let samples = grid.nodes().into_iter().map(|x| beam.field(x, 0.0)).collect();
    ComplexLine::new(*grid, samples).expect("Gaussian samples are finite")
}

fn check_support(half_length: f64, center: f64, period: f64) -> Result<()> {
    if !(half_length.is_finite() && half_length > 0.0) {
        return domain(format!("support half-length must be positive, got {half_length}"));
    }
    if !(center.is_finite() && center > 0.0) {
        return domain(format!("support center must be positive, got {center}"));
    }
    // An infinite period is allowed and means no longitudinal oscillation.
    if !(period > 0.0) {
        return domain(format!("oscillation period must be positive, got {period}"));
    }
    Ok(())
}

// Absolute slack used to decide whether a node sits on a support endpoint.
fn slack(center: f64) -> f64 {
    1e-12 * center.abs().max(1.0)
}

fn on_support(z: f64, center: f64, half_length: f64) -> bool {
    (z - center).abs() <= half_length + slack(center)
}

fn is_endpoint(z: f64, center: f64, half_length: f64) -> bool {
    ((z - center).abs() - half_length).abs() <= slack(center)
}

/// `exp(iKz) (a^2 - (z - z_c)^2)` on `|z - z_c| < a`, zero elsewhere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParabolicBeam {
    pub half_length: f64,
    pub center: f64,
    pub period: f64,
}

impl ParabolicBeam {
    pub fn new(half_length: f64, center: f64, period: f64) -> Result<Self> {
        check_support(half_length, center, period)?;
        Ok(Self {
            half_length,
            center,
            period,
        })
    }

    pub fn wavenumber(&self) -> f64 {
        2.0 * PI / self.period
    }

    /// `false` when the support reaches past half the grid span.
    pub fn fits(&self, grid: &ZGrid) -> bool {
        self.half_length < 0.5 * (grid.z_max() - grid.z_min())
    }

    pub fn amplitude(&self, z: f64) -> Complex64 {
        let d = z - self.center;
        if !on_support(z, self.center, self.half_length) || is_endpoint(z, self.center, self.half_length) {
            return Complex64::new(0.0, 0.0);
        }
        let a2 = self.half_length * self.half_length;
        Complex64::from_polar(a2 - d * d, self.wavenumber() * z)
    }
}

pub fn eval_parabolic_boundary(beam: &ParabolicBeam, grid: &ZGrid) -> BoundaryLine {
    ComplexLine::from_fn(*grid, |z| beam.amplitude(z)).expect("parabolic samples are finite")
}

/// `exp(iKz)` on the support, zero outside. Nodes on the jump take the interior value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepBeam {
    pub half_length: f64,
    pub center: f64,
    pub period: f64,
}

impl StepBeam {
    pub fn new(half_length: f64, center: f64, period: f64) -> Result<Self> {
        check_support(half_length, center, period)?;
        Ok(Self {
            half_length,
            center,
            period,
        })
    }

    pub fn wavenumber(&self) -> f64 {
        2.0 * PI / self.period
    }

    pub fn fits(&self, grid: &ZGrid) -> bool {
        self.half_length < 0.5 * (grid.z_max() - grid.z_min())
    }

    pub fn amplitude(&self, z: f64) -> Complex64 {
        if on_support(z, self.center, self.half_length) {
            Complex64::from_polar(1.0, self.wavenumber() * z)
        } else {
            Complex64::new(0.0, 0.0)
        }
    }
}

pub fn eval_step_boundary(beam: &StepBeam, grid: &ZGrid) -> BoundaryLine {
    ComplexLine::from_fn(*grid, |z| beam.amplitude(z)).expect("step samples are finite")
}
