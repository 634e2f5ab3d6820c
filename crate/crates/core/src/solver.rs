//! Regularized dense solves of the amplitude and derivative systems.

use std::f64::consts::PI;

use faer::linalg::solvers::{DenseSolveCore, PartialPivLu, Solve, SolveCore};
use faer::{Conj, Mat, MatRef};
use num_complex::Complex64;

use crate::discretize::{KernelMatrix, RhsKind, RhsVector, TbcMatrix};
use crate::error::{domain, Error, Result};
use crate::grid::{BoundaryLine, ComplexLine, ImageLine, PhysicalParams, Regularization, UniformGrid, ZGrid};

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SystemKind {
    /// `(alpha I - M/(pi i)) u0 = g`.
    Direct,
    /// `(alpha I - M/(pi i)) T u0 = g'`.
    TbcCoupled,
}

impl SystemKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            SystemKind::Direct => "direct",
            SystemKind::TbcCoupled => "tbc_coupled",
        }
    }
}

#[derive(Debug, Clone)]
pub struct InverseSystem {
    a: Mat<Complex64>,
    rhs: RhsVector,
    alpha: Complex64,
    grid: ZGrid,
    tbc: Option<TbcMatrix>,
}

/// `alpha I - M / (pi i)`.
pub fn system_matrix(m: &KernelMatrix, alpha: Complex64) -> Mat<Complex64> {
    shifted(m.entries().as_ref(), alpha)
}

fn shifted(e: MatRef<'_, Complex64>, alpha: Complex64) -> Mat<Complex64> {
    let scale = I / PI;
    Mat::from_fn(e.nrows(), e.ncols(), |r, c| {
        let v = e[(r, c)] * scale;
        if r == c {
            alpha + v
        } else {
            v
        }
    })
}

/// Builds the system; passing `tbc` selects the derivative-coupled form.
pub fn build_system(
    m: &KernelMatrix,
    rhs: RhsVector,
    reg: Regularization,
    tbc: Option<&TbcMatrix>,
) -> Result<InverseSystem> {
    let n = m.dim();
    if rhs.values.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: rhs.values.len(),
        });
    }
    match (tbc, rhs.kind) {
        (None, RhsKind::G) => {}
        (Some(t), RhsKind::GPrime) => {
            if t.dim() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    actual: t.dim(),
                });
            }
        }
        (None, RhsKind::GPrime) => return domain("derivative right-hand side needs the TBC operator"),
        (Some(_), RhsKind::G) => return domain("TBC-coupled system needs the derivative right-hand side"),
    }
    let alpha = reg.alpha();
    Ok(InverseSystem {
        a: system_matrix(m, alpha),
        rhs,
        alpha,
        grid: *m.grid(),
        tbc: tbc.cloned(),
    })
}

impl InverseSystem {
    /// Wraps an arbitrary square matrix as a direct system, mainly for tests.
    pub fn from_parts(a: Mat<Complex64>, rhs: RhsVector, grid: ZGrid) -> Result<Self> {
        if a.nrows() != a.ncols() || a.nrows() != grid.len() || rhs.values.len() != grid.len() {
            return Err(Error::DimensionMismatch {
                expected: grid.len(),
                actual: a.nrows().max(rhs.values.len()),
            });
        }
        if rhs.kind != RhsKind::G {
            return domain("a bare system takes an amplitude right-hand side");
        }
        Ok(Self {
            a,
            rhs,
            alpha: Complex64::new(1.0, 0.0),
            grid,
            tbc: None,
        })
    }

    pub fn matrix(&self) -> &Mat<Complex64> {
        &self.a
    }

    pub fn rhs(&self) -> &RhsVector {
        &self.rhs
    }

    pub fn alpha(&self) -> Complex64 {
        self.alpha
    }

    pub fn kind(&self) -> SystemKind {
        if self.tbc.is_some() {
            SystemKind::TbcCoupled
        } else {
            SystemKind::Direct
        }
    }

    /// The full operator acting on `u0`; for the coupled system this forms `A T`.
    pub fn operator(&self) -> Mat<Complex64> {
        match &self.tbc {
            None => self.a.clone(),
            Some(t) => &self.a * t.grid_order(),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SolveOptions {
    /// One step of iterative refinement on the `A` solve.
    pub refine: bool,
}

#[derive(Debug, Clone)]
pub struct Reconstruction {
    pub u0: BoundaryLine,
    pub kind: SystemKind,
    pub alpha: Complex64,
    /// 1-norm condition estimate of `A`.
    pub condition_estimate: f64,
    /// `|| op u0 - rhs ||_2 / || rhs ||_2`.
    pub residual_norm: f64,
}

pub fn solve(system: &InverseSystem) -> Result<Reconstruction> {
    solve_with(system, SolveOptions::default())
}

pub fn solve_with(system: &InverseSystem, options: SolveOptions) -> Result<Reconstruction> {
    let a = system.a.as_ref();
    let (lu, condition) = factor_checked(a)?;
    solve_factored(
        a,
        &lu,
        condition,
        &system.rhs,
        system.tbc.as_ref(),
        (system.grid, system.alpha),
        options,
    )
}

fn factor_checked(a: MatRef<'_, Complex64>) -> Result<(PartialPivLu<Complex64>, f64)> {
    if a.col_iter().any(|c| c.iter().any(|v| !(v.re.is_finite() && v.im.is_finite()))) {
        return Err(Error::NonFinite("system matrix"));
    }
    let lu = a.partial_piv_lu();
    check_pivots(&lu)?;
    let condition = one_norm(a) * inverse_one_norm_estimate(&lu);
    Ok((lu, condition))
}

fn solve_factored(
    a: MatRef<'_, Complex64>,
    lu: &PartialPivLu<Complex64>,
    condition: f64,
    rhs: &RhsVector,
    tbc: Option<&TbcMatrix>,
    (grid, alpha): (ZGrid, Complex64),
    options: SolveOptions,
) -> Result<Reconstruction> {
    let b = &rhs.values;
    let mut y = column(b);
    lu.solve_in_place(y.as_mut());
    if options.refine {
        let r = residual_vector(a, y.as_ref(), b);
        let mut d = column(&r);
        lu.solve_in_place(d.as_mut());
        y -= &d;
    }
    let y: Vec<Complex64> = (0..y.nrows()).map(|i| y[(i, 0)]).collect();

    let u = match tbc {
        None => y,
        Some(t) => t.solve(&y)?,
    };
    if u.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
        return Err(Error::Singular { pivot: 0, condition });
    }
    let image = match tbc {
        None => u.clone(),
        Some(t) => t.apply(&u)?,
    };
    let r = residual_vector(a, column(&image).as_ref(), b);
    let bnorm = l2(b);
    let residual_norm = if bnorm > 0.0 { l2(&r) / bnorm } else { l2(&r) };
    Ok(Reconstruction {
        u0: ComplexLine::new(grid, u)?,
        kind: if tbc.is_some() {
            SystemKind::TbcCoupled
        } else {
            SystemKind::Direct
        },
        alpha,
        condition_estimate: condition,
        residual_norm,
    })
}

/// `A = alpha I - M/(pi i)` factored once, shared by both right-hand sides.
///
/// The amplitude and derivative systems differ only in their right-hand side
/// and the trailing TBC substitution, so sweeps factor `A` a single time.
pub struct FactoredSystem {
    a: Mat<Complex64>,
    lu: PartialPivLu<Complex64>,
    alpha: Complex64,
    grid: ZGrid,
    condition: f64,
}

impl FactoredSystem {
    pub fn new(m: &KernelMatrix, reg: Regularization) -> Result<Self> {
        let alpha = reg.alpha();
        let a = system_matrix(m, alpha);
        let (lu, condition) = factor_checked(a.as_ref())?;
        Ok(Self {
            a,
            lu,
            alpha,
            grid: *m.grid(),
            condition,
        })
    }

    pub fn condition_estimate(&self) -> f64 {
        self.condition
    }

    pub fn solve_direct(&self, g: &RhsVector) -> Result<Reconstruction> {
        self.check(g, RhsKind::G)?;
        solve_factored(
            self.a.as_ref(),
            &self.lu,
            self.condition,
            g,
            None,
            (self.grid, self.alpha),
            SolveOptions::default(),
        )
    }

    pub fn solve_coupled(&self, g_prime: &RhsVector, t: &TbcMatrix) -> Result<Reconstruction> {
        self.check(g_prime, RhsKind::GPrime)?;
        if t.dim() != self.grid.len() {
            return Err(Error::DimensionMismatch {
                expected: self.grid.len(),
                actual: t.dim(),
            });
        }
        solve_factored(
            self.a.as_ref(),
            &self.lu,
            self.condition,
            g_prime,
            Some(t),
            (self.grid, self.alpha),
            SolveOptions::default(),
        )
    }

    fn check(&self, rhs: &RhsVector, kind: RhsKind) -> Result<()> {
        if rhs.kind != kind {
            return domain("right-hand side kind does not match the requested system");
        }
        if rhs.values.len() != self.grid.len() {
            return Err(Error::DimensionMismatch {
                expected: self.grid.len(),
                actual: rhs.values.len(),
            });
        }
        Ok(())
    }
}

fn column(v: &[Complex64]) -> Mat<Complex64> {
    Mat::from_fn(v.len(), 1, |i, _| v[i])
}

fn residual_vector(a: MatRef<'_, Complex64>, x: MatRef<'_, Complex64>, b: &[Complex64]) -> Vec<Complex64> {
    let ax = a * x;
    (0..b.len()).map(|i| ax[(i, 0)] - b[i]).collect()
}

fn l2(v: &[Complex64]) -> f64 {
    v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

fn check_pivots(lu: &PartialPivLu<Complex64>) -> Result<()> {
    let u = lu.U();
    for i in 0..u.nrows() {
        let p = u[(i, i)];
        if p.norm() == 0.0 || !p.norm().is_finite() {
            return Err(Error::Singular {
                pivot: i,
                condition: f64::INFINITY,
            });
        }
    }
    Ok(())
}

fn one_norm(a: MatRef<'_, Complex64>) -> f64 {
    a.col_iter()
        .map(|c| c.iter().map(|v| v.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Hager's estimate of `||A^{-1}||_1` with Higham's refinements.
fn inverse_one_norm_estimate(lu: &PartialPivLu<Complex64>) -> f64 {
    let n = lu.U().nrows();
    if n == 0 {
        return 0.0;
    }
    let solve = |v: &Mat<Complex64>, adjoint: bool| {
        let mut w = v.clone();
        if adjoint {
            lu.solve_transpose_in_place_with_conj(Conj::Yes, w.as_mut());
        } else {
            lu.solve_in_place(w.as_mut());
        }
        w
    };
    let norm1 = |v: &Mat<Complex64>| (0..n).map(|i| v[(i, 0)].norm()).sum::<f64>();

    let mut x = Mat::from_fn(n, 1, |_, _| Complex64::new(1.0 / n as f64, 0.0));
    let mut estimate = 0.0;
    let mut last_j = usize::MAX;
    for iter in 0..5 {
        let y = solve(&x, false);
        let ny = norm1(&y);
        if iter > 0 && ny <= estimate {
            break;
        }
        estimate = ny;
        let xi = Mat::from_fn(n, 1, |i, _| {
            let v = y[(i, 0)];
            if v.norm() == 0.0 {
                Complex64::new(1.0, 0.0)
            } else {
                v / v.norm()
            }
        });
        let z = solve(&xi, true);
        let (j, zmax) = (0..n)
            .map(|i| (i, z[(i, 0)].norm()))
            .fold((0, -1.0), |acc, c| if c.1 > acc.1 { c } else { acc });
        let ztx: f64 = (0..n).map(|i| (z[(i, 0)].conj() * x[(i, 0)]).re).sum();
        if iter > 0 && (zmax <= ztx || j == last_j) {
            break;
        }
        last_j = j;
        x = Mat::zeros(n, 1);
        x[(j, 0)] = Complex64::new(1.0, 0.0);
    }
    // Alternating test vector guards against the classic failure cases.
    let denom = if n > 1 { (n - 1) as f64 } else { 1.0 };
    let b = Mat::from_fn(n, 1, |i, _| {
        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        Complex64::new(sign * (1.0 + i as f64 / denom), 0.0)
    });
    let alt = 2.0 * norm1(&solve(&b, false)) / (3.0 * n as f64);
    estimate.max(alt)
}

/// Estimated 1-norm condition number; infinite when a pivot vanishes.
pub fn condition_estimate(a: MatRef<'_, Complex64>) -> f64 {
    let lu = a.partial_piv_lu();
    if check_pivots(&lu).is_err() {
        return f64::INFINITY;
    }
    one_norm(a) * inverse_one_norm_estimate(&lu)
}

/// 1-norm condition number from the explicit inverse.
pub fn condition_exact(a: MatRef<'_, Complex64>) -> f64 {
    let lu = a.partial_piv_lu();
    if check_pivots(&lu).is_err() {
        return f64::INFINITY;
    }
    one_norm(a) * one_norm(lu.inverse().as_ref())
}

fn special(image: &ImageLine, params: &PhysicalParams, grid: &ZGrid, part: impl Fn(Complex64) -> Complex64) -> Result<BoundaryLine> {
    let samples = grid
        .nodes()
        .into_iter()
        .map(|z| crate::discretize::eval_h(image, params, z).map(|h| part(h) * z.sqrt()))
        .collect::<Result<Vec<_>>>()?;
    ComplexLine::new(*grid, samples)
}

/// Closed-form inversion for a boundary amplitude known to be real: `sqrt(z) Re H(z)`.
pub fn solve_special_real(image: &ImageLine, params: &PhysicalParams, grid: &ZGrid) -> Result<BoundaryLine> {
    special(image, params, grid, |h| Complex64::new(h.re, 0.0))
}

/// Closed-form inversion for a purely imaginary boundary amplitude: `sqrt(z) i Im H(z)`.
pub fn solve_special_imag(image: &ImageLine, params: &PhysicalParams, grid: &ZGrid) -> Result<BoundaryLine> {
    special(image, params, grid, |h| Complex64::new(0.0, h.im))
}
