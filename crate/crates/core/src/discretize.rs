//! Discretization of the inverse integral equation on a [`ZGrid`].
//!
//! The boundary amplitude is approximated by its piecewise-linear interpolant
//! in `z`; integrating that interpolant against the Cauchy kernel
//! `1 / ((zeta - z_n) sqrt(zeta))` in closed form gives the principal-value
//! weights returned by [`assemble_pv_weights`]. The operator of the linear
//! system is `M = -diag(sqrt(z_n)) P`, so that the discrete equation reads
//! `(alpha I - M / (pi i)) u0 = g`.

use std::f64::consts::PI;
use std::io::{self, Write};

use faer::Mat;
use num_complex::Complex64;

use crate::error::{domain, Error, Result};
use crate::grid::{ImageLine, PhysicalParams, UniformGrid, XGrid, ZGrid};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// How the divergent end-point entries `M[0][0]` and `M[N][N]` are fixed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CornerMode {
    /// `M[0][0] = -1`, `M[N][N] = 1`.
    ExplicitUnit,
    /// `M[0][0] = -c`, `M[N][N] = c` for a large clamp value `c`.
    #[default]
    Clamp,
}

impl CornerMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            CornerMode::ExplicitUnit => "explicit_unit",
            CornerMode::Clamp => "clamp",
        }
    }
}

impl std::str::FromStr for CornerMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "explicit_unit" => Ok(CornerMode::ExplicitUnit),
            "clamp" => Ok(CornerMode::Clamp),
            other => domain(format!("unknown corner mode '{other}' (expected explicit_unit or clamp)")),
        }
    }
}

pub const DEFAULT_CLAMP: f64 = 1e8;

/// `2 / ((sqrt(m) - sqrt(m-1)) (sqrt(m+1) - sqrt(m-1)) (sqrt(m+1) - sqrt(m)))`.
///
/// This grows like `4 m^(3/2)`. The discrete TBC uses its reciprocal-like
/// companion [`tbc_weight`]; see there.
pub fn gamma_coefficient(m: usize) -> Result<f64> {
    if m == 0 {
        return domain("gamma coefficient is defined for m >= 1");
    }
    let (a, b, c) = roots(m);
    Ok(2.0 / ((b - a) * (c - a) * (c - b)))
}

/// Weight of `u_{n+m}` in the discrete TBC, `2 / gamma_m`.
///
/// Evaluated in the cancellation-free form
/// `2 / ((sqrt(m) + sqrt(m-1)) (sqrt(m+1) + sqrt(m-1)) (sqrt(m+1) + sqrt(m)))`,
/// which decays like `m^(-3/2)/4`.
pub fn tbc_weight(m: usize) -> Result<f64> {
    if m == 0 {
        return domain("TBC weight is defined for m >= 1");
    }
    let (a, b, c) = roots(m);
    Ok(2.0 / ((b + a) * (c + a) * (c + b)))
}

fn roots(m: usize) -> (f64, f64, f64) {
    let m = m as f64;
    ((m - 1.0).sqrt(), m.sqrt(), (m + 1.0).sqrt())
}

/// Closed-form principal-value weights `P[n][m]`.
///
/// For a piecewise-linear `u` on the grid, `sum_m P[n][m] u(z_m)` equals
/// `PV int_{z_min}^{z_max} u(zeta) / ((zeta - z_n) sqrt(zeta)) dzeta` for every
/// interior `n`. The end rows carry a logarithmically divergent diagonal that is
/// left at its finite remainder here.
pub fn assemble_pv_weights(grid: &ZGrid) -> Mat<f64> {
    let n_nodes = grid.len();
    let s: Vec<f64> = grid.nodes().iter().map(|z| z.sqrt()).collect();
    let chord: Vec<f64> = s.windows(2).map(|w| 2.0 / (w[0] + w[1])).collect();
    let mut p = Mat::<f64>::zeros(n_nodes, n_nodes);
    let mut ell = vec![0.0; n_nodes];
    for n in 0..n_nodes {
        let sn = s[n];
        for (j, l) in ell.iter_mut().enumerate() {
            // The log singularity at j = n cancels between neighbouring intervals.
            *l = if j == n {
                0.0
            } else {
                ((s[j] - sn) / (s[j] + sn)).abs().ln()
            };
        }
        for (i, a) in chord.iter().enumerate() {
            let dl = (ell[i + 1] - ell[i]) / sn;
            let c = n as f64 - i as f64;
            p[(n, i)] += (1.0 - c) * dl - a;
            p[(n, i + 1)] += c * dl + a;
        }
    }
    p
}

/// Dense operator `M` of the primary system.
#[derive(Debug, Clone)]
pub struct KernelMatrix {
    entries: Mat<Complex64>,
    grid: ZGrid,
    corner_mode: CornerMode,
    clamp_value: f64,
}

/// Assembles `M = -diag(sqrt(z_n)) P` and fixes its corners.
pub fn assemble_m(grid: &ZGrid, corner_mode: CornerMode, clamp_value: f64) -> Result<KernelMatrix> {
    if grid.n_intervals() < 4 {
        return domain(format!("M needs at least 4 intervals, got {}", grid.n_intervals()));
    }
    if !(clamp_value.is_finite() && clamp_value > 0.0) {
        return domain(format!("clamp value must be positive and finite, got {clamp_value}"));
    }
    let p = assemble_pv_weights(grid);
    let n_nodes = grid.len();
    let last = n_nodes - 1;
    let mut entries = Mat::<Complex64>::from_fn(n_nodes, n_nodes, |n, m| {
        Complex64::new(-grid.node(n).sqrt() * p[(n, m)], 0.0)
    });
    let corner = match corner_mode {
        CornerMode::ExplicitUnit => 1.0,
        CornerMode::Clamp => clamp_value,
    };
    entries[(0, 0)] = Complex64::new(-corner, 0.0);
    entries[(last, last)] = Complex64::new(corner, 0.0);
    debug_assert!(entries.col_iter().all(|c| c.iter().all(|v| v.re.is_finite())));
    Ok(KernelMatrix {
        entries,
        grid: *grid,
        corner_mode,
        clamp_value,
    })
}

impl KernelMatrix {
    pub fn entries(&self) -> &Mat<Complex64> {
        &self.entries
    }

    pub fn grid(&self) -> &ZGrid {
        &self.grid
    }

    pub fn corner_mode(&self) -> CornerMode {
        self.corner_mode
    }

    pub fn clamp_value(&self) -> f64 {
        self.clamp_value
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    /// Writes the entries row-major as little-endian `(re, im)` f64 pairs.
    pub fn write_binary<W: Write>(&self, mut out: W) -> io::Result<()> {
        write_matrix_le(&self.entries, &mut out)
    }

    /// Text sidecar describing the binary dump.
    pub fn sidecar(&self) -> String {
        format!(
            "kind = M\nrows = {n}\ncols = {n}\nlayout = row-major complex128 little-endian (re, im)\n\
             z_min = {}\nz_max = {}\nn_intervals = {}\ntau = {:e}\ncorner_mode = {}\nclamp_value = {:e}\n",
            self.grid.z_min(),
            self.grid.z_max(),
            self.grid.n_intervals(),
            self.grid.tau(),
            self.corner_mode.as_str(),
            self.clamp_value,
            n = self.dim(),
        )
    }
}

pub(crate) fn write_matrix_le<W: Write>(m: &Mat<Complex64>, out: &mut W) -> io::Result<()> {
    let mut row = Vec::with_capacity(16 * m.ncols());
    for i in 0..m.nrows() {
        row.clear();
        for j in 0..m.ncols() {
            let v = m[(i, j)];
            row.extend_from_slice(&v.re.to_le_bytes());
            row.extend_from_slice(&v.im.to_le_bytes());
        }
        out.write_all(&row)?;
    }
    Ok(())
}

/// Discrete transparent boundary condition relating `u0` to `du/dx` at `x = 0`.
///
/// Entries are stored in the anti-causal layout: row `n` pairs with the
/// reversed sample vector, so `(n, N - n)` holds the diagonal weight `-2 sigma`,
/// columns `m < N - n` hold `2 sigma w_{N-n-m}` and columns `m > N - n` are zero.
/// In grid order the operator reads
/// `(T u)_n = -2 sigma (u_n - sum_{j > n} w_{j-n} u_j)`: nodes farther from the
/// image line are upstream.
#[derive(Debug, Clone)]
pub struct TbcMatrix {
    entries: Mat<Complex64>,
    sigma: Complex64,
    weights: Vec<f64>,
}

/// `sigma = sqrt(2k / (i pi tau))`, principal branch.
pub fn tbc_sigma(params: &PhysicalParams, grid: &ZGrid) -> Complex64 {
    (Complex64::new(2.0 * params.k() / (PI * grid.tau()), 0.0) / I).sqrt()
}

pub fn assemble_t(grid: &ZGrid, params: &PhysicalParams) -> Result<TbcMatrix> {
    let n = grid.n_intervals();
    if n < 2 {
        return domain("T needs at least 2 intervals");
    }
    let sigma = tbc_sigma(params, grid);
    let weights: Vec<f64> = std::iter::once(0.0)
        .chain((1..=n).map(|m| tbc_weight(m).expect("m >= 1")))
        .collect();
    let entries = Mat::from_fn(n + 1, n + 1, |row, col| {
        let diag = n - row;
        if col == diag {
            -2.0 * sigma
        } else if col < diag {
            2.0 * sigma * weights[diag - col]
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    Ok(TbcMatrix {
        entries,
        sigma,
        weights,
    })
}

impl TbcMatrix {
    pub fn entries(&self) -> &Mat<Complex64> {
        &self.entries
    }

    pub fn sigma(&self) -> Complex64 {
        self.sigma
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    /// `du/dx` at the grid nodes implied by the samples `u` (grid order).
    pub fn apply(&self, u: &[Complex64]) -> Result<Vec<Complex64>> {
        let n_nodes = self.dim();
        if u.len() != n_nodes {
            return Err(Error::DimensionMismatch {
                expected: n_nodes,
                actual: u.len(),
            });
        }
        let last = n_nodes - 1;
        Ok((0..n_nodes)
            .map(|row| {
                (0..=last - row)
                    .map(|col| self.entries[(row, col)] * u[last - col])
                    .sum()
            })
            .collect())
    }

    /// Solves `T u = y` by substitution, starting from the far end of the grid.
    pub fn solve(&self, y: &[Complex64]) -> Result<Vec<Complex64>> {
        let n_nodes = self.dim();
        if y.len() != n_nodes {
            return Err(Error::DimensionMismatch {
                expected: n_nodes,
                actual: y.len(),
            });
        }
        let scale = -0.5 / self.sigma;
        let mut u = vec![Complex64::new(0.0, 0.0); n_nodes];
        for n in (0..n_nodes).rev() {
            let upstream: Complex64 = (n + 1..n_nodes).map(|j| u[j] * self.weights[j - n]).sum();
            u[n] = y[n] * scale + upstream;
        }
        Ok(u)
    }

    /// The operator in grid order, for composing with `A` in diagnostics.
    pub fn grid_order(&self) -> Mat<Complex64> {
        let last = self.dim() - 1;
        Mat::from_fn(self.dim(), self.dim(), |n, j| self.entries[(n, last - j)])
    }
}

/// Which equation a right-hand side belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RhsKind {
    /// Amplitude equation.
    G,
    /// Transverse-derivative equation.
    GPrime,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RhsVector {
    pub values: Vec<Complex64>,
    pub kind: RhsKind,
}

/// `h`-weighted trapezoid of `u(x) f(x) exp(-i k x^2 / (2 t))` over the window.
fn fresnel_moment(image: &ImageLine, k: f64, t: f64, with_x: bool) -> Complex64 {
    let grid: &XGrid = image.grid();
    let c = -0.5 * k / t;
    grid.nodes()
        .into_iter()
        .zip(grid.trapezoid_weights())
        .zip(image.samples())
        .map(|((x, w), u)| {
            let f = if with_x { w * x } else { w };
            u * f * Complex64::cis(c * x * x)
        })
        .sum()
}

fn sqrt_2ki_over_pi(k: f64) -> Complex64 {
    (Complex64::new(0.0, 2.0 * k / PI)).sqrt()
}

/// `H(t) = sqrt(2ki/pi) / t * int u(x', 0) exp(-i k x'^2 / (2t)) dx'`.
pub fn eval_h(image: &ImageLine, params: &PhysicalParams, t: f64) -> Result<Complex64> {
    if !(t > 0.0 && t.is_finite()) {
        return domain(format!("H is evaluated at t > 0, got {t}"));
    }
    let k = params.k();
    Ok(sqrt_2ki_over_pi(k) / t * fresnel_moment(image, k, t, false))
}

/// `g_n = sqrt(2ki / (pi z_n)) * int u(x', 0) exp(-i k x'^2 / (2 z_n)) dx'`.
pub fn assemble_g(image: &ImageLine, grid: &ZGrid, params: &PhysicalParams) -> RhsVector {
    let k = params.k();
    let pre = sqrt_2ki_over_pi(k);
    let values = grid
        .nodes()
        .into_iter()
        .map(|z| pre / z.sqrt() * fresnel_moment(image, k, z, false))
        .collect();
    RhsVector {
        values,
        kind: RhsKind::G,
    }
}

/// Right-hand side of the derivative equation,
/// `g'_n = (ik / z_n) sqrt(2ki / (pi z_n)) * int x' u(x', 0) exp(-i k x'^2 / (2 z_n)) dx'`.
///
/// The prefactor is the `z`-derivative-consistent branch of `sqrt(2 (ki)^3 / (pi z^3))`;
/// the principal root of that expression has the opposite sign.
pub fn assemble_g_prime(image: &ImageLine, grid: &ZGrid, params: &PhysicalParams) -> RhsVector {
    let k = params.k();
    let pre = sqrt_2ki_over_pi(k);
    let values = grid
        .nodes()
        .into_iter()
        .map(|z| I * k / z * pre / z.sqrt() * fresnel_moment(image, k, z, true))
        .collect();
    RhsVector {
        values,
        kind: RhsKind::GPrime,
    }
}
