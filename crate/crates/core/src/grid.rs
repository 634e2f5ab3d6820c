//! Physical parameters, sampling grids and coordinate conventions.
//!
//! The boundary semi-line is parametrised by the positive distance `z` to the
//! image line: a boundary point at distance `z` sits at longitudinal
//! coordinate `-z` in the orthogonal frame where the image line is `z = 0`.
//! Every boundary grid, model and matrix in this crate uses the positive
//! distance; [`ZGrid::frame_coordinate`] recovers the negative coordinate for
//! reporting.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;

use crate::error::{domain, Error, Result};

/// Wavelength, wavenumber and inclination of the boundary line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalParams {
    wavelength: f64,
    wavenumber: f64,
    theta: f64,
}

impl PhysicalParams {
    pub fn new(wavelength: f64, theta: f64) -> Result<Self> {
        if !(wavelength.is_finite() && wavelength > 0.0) {
            return domain(format!("wavelength must be positive, got {wavelength}"));
        }
        if !(theta.is_finite() && theta.abs() < FRAC_PI_2) {
            return domain(format!("inclination must satisfy |theta| < pi/2, got {theta}"));
        }
        Ok(Self {
            wavelength,
            wavenumber: 2.0 * PI / wavelength,
            theta,
        })
    }

    /// Orthogonal-frame parameters (`theta = 0`), the setting of every inverse operation.
    pub fn orthogonal(wavelength: f64) -> Result<Self> {
        Self::new(wavelength, 0.0)
    }

    pub fn wavelength(&self) -> f64 {
        self.wavelength
    }

    pub fn k(&self) -> f64 {
        self.wavenumber
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }
}

/// A uniform one-dimensional grid.
pub trait UniformGrid: Clone + std::fmt::Debug {
    fn start(&self) -> f64;
    fn end(&self) -> f64;
    fn n_intervals(&self) -> usize;
    fn step(&self) -> f64;

    fn len(&self) -> usize {
        self.n_intervals() + 1
    }

    fn node(&self, i: usize) -> f64 {
        debug_assert!(i <= self.n_intervals());
        self.start() + i as f64 * self.step()
    }

    fn nodes(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.node(i)).collect()
    }

    /// Composite trapezoid weights for this grid.
    fn trapezoid_weights(&self) -> Vec<f64> {
        let step = self.step();
        let mut w = vec![step; self.len()];
        w[0] = 0.5 * step;
        w[self.n_intervals()] = 0.5 * step;
        w
    }
}

/// Uniform grid on the reconstruction semi-line, `z_n = z_min + n * tau`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZGrid {
    z_min: f64,
    z_max: f64,
    n_intervals: usize,
    tau: f64,
}

impl ZGrid {
    pub fn new(z_min: f64, z_max: f64, n_intervals: usize) -> Result<Self> {
        if !(z_min.is_finite() && z_max.is_finite()) {
            return Err(Error::NonFinite("z grid bounds"));
        }
        if z_min <= 0.0 {
            return domain(format!("z_min must be positive, got {z_min}"));
        }
        if z_max <= z_min {
            return domain(format!("z_max ({z_max}) must exceed z_min ({z_min})"));
        }
        if n_intervals < 2 {
            return domain(format!("z grid needs at least 2 intervals, got {n_intervals}"));
        }
        Ok(Self {
            z_min,
            z_max,
            n_intervals,
            tau: (z_max - z_min) / n_intervals as f64,
        })
    }

    pub fn z_min(&self) -> f64 {
        self.z_min
    }

    pub fn z_max(&self) -> f64 {
        self.z_max
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    /// Longitudinal coordinate of node `i` in the orthogonal frame (negative).
    pub fn frame_coordinate(&self, i: usize) -> f64 {
        -self.node(i)
    }
}

impl UniformGrid for ZGrid {
    fn start(&self) -> f64 {
        self.z_min
    }
    fn end(&self) -> f64 {
        self.z_max
    }
    fn n_intervals(&self) -> usize {
        self.n_intervals
    }
    fn step(&self) -> f64 {
        self.tau
    }
}

/// Uniform grid on the image line, `x_s = x_min + s * h`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XGrid {
    x_min: f64,
    x_max: f64,
    n_intervals: usize,
    h: f64,
}

impl XGrid {
    pub fn new(x_min: f64, x_max: f64, n_intervals: usize) -> Result<Self> {
        if !(x_min.is_finite() && x_max.is_finite()) {
            return Err(Error::NonFinite("x grid bounds"));
        }
        if x_min < 0.0 {
            return domain(format!("x_min must be non-negative, got {x_min}"));
        }
        if x_max <= x_min {
            return domain(format!("x_max ({x_max}) must exceed x_min ({x_min})"));
        }
        if n_intervals < 2 {
            return domain(format!("x grid needs at least 2 intervals, got {n_intervals}"));
        }
        Ok(Self {
            x_min,
            x_max,
            n_intervals,
            h: (x_max - x_min) / n_intervals as f64,
        })
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    /// Keeps the leading nodes up to `x_max` (inclusive, to rounding).
    ///
    /// Returns the truncated grid and its node count so image samples can be
    /// sliced to match.
    pub fn truncate(&self, x_max: f64) -> Result<Self> {
        if !(x_max > self.x_min && x_max <= self.x_max * (1.0 + 1e-12)) {
            return domain(format!(
                "truncation point {x_max} outside ({}, {}]",
                self.x_min, self.x_max
            ));
        }
        let kept = ((x_max - self.x_min) / self.h + 1e-9).floor() as usize;
        let kept = kept.min(self.n_intervals);
        if kept < 2 {
            return domain(format!("truncation at {x_max} leaves fewer than 2 intervals"));
        }
        if kept == self.n_intervals {
            return Ok(*self);
        }
        Ok(Self {
            x_min: self.x_min,
            x_max: self.x_min + kept as f64 * self.h,
            n_intervals: kept,
            h: self.h,
        })
    }
}

impl UniformGrid for XGrid {
    fn start(&self) -> f64 {
        self.x_min
    }
    fn end(&self) -> f64 {
        self.x_max
    }
    fn n_intervals(&self) -> usize {
        self.n_intervals
    }
    fn step(&self) -> f64 {
        self.h
    }
}

/// Complex field amplitude sampled at every node of a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexLine<G> {
    grid: G,
    samples: Vec<Complex64>,
}

/// Samples on the boundary semi-line.
pub type BoundaryLine = ComplexLine<ZGrid>;
/// Samples on the image line.
pub type ImageLine = ComplexLine<XGrid>;

impl<G: UniformGrid> ComplexLine<G> {
    pub fn new(grid: G, samples: Vec<Complex64>) -> Result<Self> {
        if samples.len() != grid.len() {
            return Err(Error::DimensionMismatch {
                expected: grid.len(),
                actual: samples.len(),
            });
        }
        if samples.iter().any(|s| !(s.re.is_finite() && s.im.is_finite())) {
            return Err(Error::NonFinite("line samples"));
        }
        Ok(Self { grid, samples })
    }

    pub fn zeros(grid: G) -> Self {
        let samples = vec![Complex64::new(0.0, 0.0); grid.len()];
        Self { grid, samples }
    }

    pub fn from_fn(grid: G, f: impl FnMut(f64) -> Complex64) -> Result<Self> {
        let samples = grid.nodes().into_iter().map(f).collect();
        Self::new(grid, samples)
    }

    pub fn grid(&self) -> &G {
        &self.grid
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<Complex64> {
        self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        Self {
            grid: self.grid.clone(),
            samples: self.samples.iter().map(|s| s * factor).collect(),
        }
    }

    pub fn norm(&self) -> f64 {
        self.samples.iter().map(|s| s.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.samples.iter().map(|s| s.norm()).fold(0.0, f64::max)
    }
}

impl ImageLine {
    /// Restricts the samples to the leading part of the window ending at `x_max`.
    pub fn truncated(&self, x_max: f64) -> Result<Self> {
        let grid = self.grid.truncate(x_max)?;
        let samples = self.samples[..grid.len()].to_vec();
        Ok(Self { grid, samples })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RegularizationMode {
    Unit,
    Phase,
    Shift,
}

impl RegularizationMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Unit => "unit",
            Self::Phase => "phase",
            Self::Shift => "shift",
        }
    }
}

impl std::str::FromStr for RegularizationMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "unit" => Ok(Self::Unit),
            "phase" => Ok(Self::Phase),
            "shift" => Ok(Self::Shift),
            other => domain(format!("unknown regularization mode {other:?}")),
        }
    }
}

/// Perturbation of the identity coefficient in the discrete inverse systems.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Regularization {
    pub mode: RegularizationMode,
    pub delta: f64,
}

impl Regularization {
    pub fn new(mode: RegularizationMode, delta: f64) -> Result<Self> {
        if !(delta.is_finite() && delta >= 0.0) {
            return domain(format!("regularization delta must be >= 0, got {delta}"));
        }
        Ok(Self { mode, delta })
    }

    pub fn unit() -> Self {
        Self {
            mode: RegularizationMode::Unit,
            delta: 0.0,
        }
    }

    /// `1`, `exp(i delta)` or `1 + delta`.
    pub fn alpha(&self) -> Complex64 {
        match self.mode {
            RegularizationMode::Unit => Complex64::new(1.0, 0.0),
            RegularizationMode::Phase => Complex64::new(self.delta.cos(), self.delta.sin()),
            RegularizationMode::Shift => Complex64::new(1.0 + self.delta, 0.0),
        }
    }
}

/// Maps `(x, z)` to the sheared frame `(x + z tan(theta), z)` in which the
/// inclined boundary line becomes `x' = 0`.
pub fn shear_transform(x: f64, z: f64, theta: f64) -> (f64, f64) {
    (z.mul_add(theta.tan(), x), z)
}

/// Inverse of [`shear_transform`].
pub fn inverse_shear_transform(x_sheared: f64, z: f64, theta: f64) -> (f64, f64) {
    ((-z).mul_add(theta.tan(), x_sheared), z)
}
