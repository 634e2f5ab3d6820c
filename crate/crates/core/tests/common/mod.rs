//! Test-only oracles, independent of the closed forms under test.
#![allow(dead_code)]

use std::sync::{Mutex, MutexGuard};

use paraxial_inverse::{BoundaryLine, Complex64, ComplexLine, UniformGrid};

/// Serializes the full-scale cases so their dense matrices are not alive at once.
pub fn heavy() -> MutexGuard<'static, ()> {
    static LOCK: Mutex<()> = Mutex::new(());
    LOCK.lock().unwrap_or_else(|e| e.into_inner())
}

/// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for j in 2..=n {
                let p2 = ((2 * j - 1) as f64 * x * p1 - (j - 1) as f64 * p0) / j as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    out
}

/// Composite Gauss-Legendre over `[a, b]` split into `pieces` panels.
pub fn integrate(f: &dyn Fn(f64) -> Complex64, a: f64, b: f64, pieces: usize, rule: &[(f64, f64)]) -> Complex64 {
    let h = (b - a) / pieces as f64;
    let mut sum = Complex64::new(0.0, 0.0);
    for p in 0..pieces {
        let lo = a + p as f64 * h;
        let mid = lo + 0.5 * h;
        for (x, w) in rule {
            sum += f(mid + 0.5 * h * x) * (0.5 * h * w);
        }
    }
    sum
}

/// Piecewise-linear interpolant of boundary samples.
pub fn interpolant(u: &BoundaryLine) -> impl Fn(f64) -> Complex64 + '_ {
    move |z| {
        let g = u.grid();
        let t = ((z - g.start()) / g.step()).clamp(0.0, g.n_intervals() as f64);
        let i = (t.floor() as usize).min(g.n_intervals() - 1);
        let f = t - i as f64;
        u.samples()[i] * (1.0 - f) + u.samples()[i + 1] * f
    }
}

/// `int_{[z_min, z_max] \ [t - eps, t + eps]} u(zeta) / ((zeta - t) sqrt(zeta))`.
///
/// The two panels touching the excluded gap use `zeta = t +- exp(s)`, which
/// turns the `1/(zeta - t)` factor into a unit Jacobian.
fn excluded_integral(u: &BoundaryLine, t: f64, eps: f64, rule: &[(f64, f64)]) -> Complex64 {
    let ui = interpolant(u);
    let g = u.grid();
    let kernel = |z: f64| ui(z) / ((z - t) * z.sqrt());
    let mut total = Complex64::new(0.0, 0.0);
    for i in 0..g.n_intervals() {
        let (a, b) = (g.node(i), g.node(i + 1));
        if b <= t - eps || a >= t + eps {
            // Panels next to t are near-singular; split them harder.
            let near = (a - t).abs().min((b - t).abs()) < 1.5 * g.step();
            total += integrate(&kernel, a, b, if near { 64 } else { 4 }, rule);
        }
    }
    let left = g.node(0).max(t - g.step());
    let right = g.node(g.n_intervals()).min(t + g.step());
    // Log-substituted pieces [left, t - eps] and [t + eps, right].
    let up = |s: f64| {
        let z = t + s.exp();
        ui(z) / z.sqrt()
    };
    let down = |s: f64| {
        let z = t - s.exp();
        -ui(z) / z.sqrt()
    };
    total += integrate(&up, eps.ln(), (right - t).ln(), 32, rule);
    total += integrate(&down, eps.ln(), (t - left).ln(), 32, rule);
    // The loop skipped exactly the panels covered by the substitution.
    total
}

/// Principal value at an interior node `t`, Richardson-extrapolated in the exclusion width.
pub fn pv_oracle(u: &BoundaryLine, t: f64) -> Complex64 {
    let rule = gauss_legendre(20);
    let tau = u.grid().step();
    let eps = [1e-3 * tau, 1e-4 * tau, 1e-5 * tau];
    let i: Vec<Complex64> = eps.iter().map(|&e| excluded_integral(u, t, e, &rule)).collect();
    // Error expansion c1 eps + c2 eps^2 with ratio 10.
    let r1 = (i[1] * 10.0 - i[0]) / 9.0;
    let r2 = (i[2] * 10.0 - i[1]) / 9.0;
    (r2 * 100.0 - r1) / 99.0
}

pub fn rel_l2(reference: &[Complex64], other: &[Complex64]) -> f64 {
    let num: f64 = reference.iter().zip(other).map(|(a, b)| (a - b).norm_sqr()).sum();
    let den: f64 = reference.iter().map(|a| a.norm_sqr()).sum();
    (num / den).sqrt()
}

pub fn line_from(u: &BoundaryLine, values: Vec<Complex64>) -> BoundaryLine {
    ComplexLine::new(*u.grid(), values).unwrap()
}

pub fn report(criterion: usize, pass: bool, detail: &str) {
    println!("ACCEPTANCE {criterion}: {} | {detail}", if pass { "PASS" } else { "FAIL" });
}
