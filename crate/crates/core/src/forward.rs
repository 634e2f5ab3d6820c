//! Direct problem: trapezoidal quadrature of the Fresnel-type kernels.
//!
//! The boundary amplitude is assumed to vanish outside its grid, so the
//! semi-infinite integrals are truncated to the grid span.

use num_complex::Complex64;

use crate::error::{domain, Result};
use crate::grid::{BoundaryLine, ComplexLine, ImageLine, PhysicalParams, UniformGrid, XGrid};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// `sqrt(k / (2 pi i))`, principal branch.
fn kernel_prefactor(k: f64) -> Complex64 {
    (Complex64::new(k / (2.0 * std::f64::consts::PI), 0.0) / I).sqrt()
}

/// Boundary samples pre-multiplied by trapezoid weight and `z^(-3/2)`.
struct Weighted {
    z: Vec<f64>,
    c: Vec<Complex64>,
}

impl Weighted {
    fn new(boundary: &BoundaryLine) -> Self {
        let grid = boundary.grid();
        let z = grid.nodes();
        let c = grid
            .trapezoid_weights()
            .iter()
            .zip(&z)
            .zip(boundary.samples())
            .map(|((w, z), u)| u * (w / (z * z.sqrt())))
            .collect();
        Self { z, c }
    }

    fn at(&self, k: f64, x: f64) -> Complex64 {
        let half_kx2 = 0.5 * k * x * x;
        let sum: Complex64 = self
            .z
            .iter()
            .zip(&self.c)
            .map(|(z, c)| c * Complex64::cis(half_kx2 / z))
            .sum();
        sum * x * kernel_prefactor(k)
    }
}

/// Field on the image line at a single transverse coordinate `x > 0`.
pub fn fresnel_point(boundary: &BoundaryLine, params: &PhysicalParams, x: f64) -> Result<Complex64> {
    if !(x > 0.0 && x.is_finite()) {
        return domain(format!("image coordinate must be positive, got {x}"));
    }
    Ok(Weighted::new(boundary).at(params.k(), x))
}

/// Propagates boundary data to every node of the image window.
pub fn fresnel_propagate(
    boundary: &BoundaryLine,
    params: &PhysicalParams,
    target: &XGrid,
) -> Result<ImageLine> {
    if target.x_min() <= 0.0 {
        return domain(format!(
            "image window must lie at x > 0, got x_min = {}",
            target.x_min()
        ));
    }
    let weighted = Weighted::new(boundary);
    let k = params.k();
    let samples = target.nodes().into_iter().map(|x| weighted.at(k, x)).collect();
    ComplexLine::new(*target, samples)
}

/// Field at `(x, z)` from data on the boundary line inclined by `params.theta()`.
///
/// The boundary point with arc length `s` sits at `(-s sin(theta), -s cos(theta))`;
/// the grid nodes of `boundary` are the arc lengths.
pub fn inclined_propagate(boundary: &BoundaryLine, params: &PhysicalParams, point: (f64, f64)) -> Result<Complex64> {
    let (x, z) = point;
    let (sin, cos) = params.theta().sin_cos();
    let lever = x * cos + z * sin;
    if !(lever > 0.0) {
        return domain(format!("point ({x}, {z}) is not inside the propagation domain"));
    }
    let grid = boundary.grid();
    let k = params.k();
    let mut sum = Complex64::new(0.0, 0.0);
    for ((s, w), u) in grid
        .nodes()
        .into_iter()
        .zip(grid.trapezoid_weights())
        .zip(boundary.samples())
    {
        let dz = z + s * cos;
        if !(dz > 0.0) {
            return domain(format!("point ({x}, {z}) lies behind boundary node s = {s}"));
        }
        let dx = x + s * sin;
        sum += u * (w / (dz * dz.sqrt())) * Complex64::cis(k * dx * dx / (2.0 * dz));
    }
    Ok(sum * lever * kernel_prefactor(k))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::ZGrid;
    use crate::models::{eval_gaussian_boundary, eval_gaussian_image, GaussianBeam};

    fn params() -> PhysicalParams {
        PhysicalParams::orthogonal(0.01).unwrap()
    }

    #[test]
    fn prefactor_squares_to_kernel_constant() {
        let k = params().k();
        let p = kernel_prefactor(k);
        let expected = Complex64::new(0.0, -k / (2.0 * std::f64::consts::PI));
        assert!((p * p - expected).norm() < 1e-12 * expected.norm());
    }

    #[test]
    fn zero_boundary_gives_zero_image() {
        let z = ZGrid::new(90.0, 100.0, 50).unwrap();
        let x = XGrid::new(3.0, 20.0, 40).unwrap();
        let out = fresnel_propagate(&ComplexLine::zeros(z), &params(), &x).unwrap();
        assert!(out.samples().iter().all(|s| *s == Complex64::new(0.0, 0.0)));
    }

    #[test]
    fn rejects_nonpositive_window() {
        let z = ZGrid::new(90.0, 100.0, 50).unwrap();
        let x = XGrid::new(0.0, 20.0, 40).unwrap();
        assert!(fresnel_propagate(&ComplexLine::zeros(z), &params(), &x).is_err());
        assert!(fresnel_point(&ComplexLine::zeros(z), &params(), -1.0).is_err());
    }

    #[test]
    fn inclined_matches_orthogonal_at_zero_angle() {
        let z = ZGrid::new(90.0, 100.0, 400).unwrap();
        let beam = GaussianBeam::aimed_at(&params(), 20.0, 95.0, 15.556).unwrap();
        let u0 = eval_gaussian_boundary(&beam, &z);
        for &x in &[5.0, 15.556, 22.0] {
            let a = fresnel_point(&u0, &params(), x).unwrap();
            let b = inclined_propagate(&u0, &params(), (x, 0.0)).unwrap();
            assert!((a - b).norm() <= 1e-13 * a.norm().max(1e-300));
        }
    }

    #[test]
    fn inclined_rejects_points_outside_domain() {
        let z = ZGrid::new(1.0, 2.0, 4).unwrap();
        let u0 = ComplexLine::zeros(z);
        assert!(inclined_propagate(&u0, &params(), (-1.0, 0.0)).is_err());
        let tilted = PhysicalParams::new(0.01, 0.3).unwrap();
        assert!(inclined_propagate(&u0, &tilted, (1.0, -1.5)).is_err());
    }

    #[test]
    fn gaussian_image_on_coarse_window() {
        let z = ZGrid::new(90.0, 100.0, 2514).unwrap();
        let beam = GaussianBeam::aimed_at(&params(), 20.0, 95.0, 15.556).unwrap();
        let u0 = eval_gaussian_boundary(&beam, &z);
        let x = XGrid::new(10.0, 20.0, 20).unwrap();
        let num = fresnel_propagate(&u0, &params(), &x).unwrap();
        let exact = eval_gaussian_image(&beam, &x);
        let diff: f64 = num
            .samples()
            .iter()
            .zip(exact.samples())
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt();
        assert!(diff / exact.norm() < 1e-3, "relative error {}", diff / exact.norm());
    }
}
