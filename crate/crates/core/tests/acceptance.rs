//! Acceptance criteria. Each prints a single `ACCEPTANCE <n>: PASS|FAIL | details`
//! line; the target runs without the default harness so the lines are always
//! shown, and exits non-zero if any criterion fails.

mod common;

use common::{heavy, pv_oracle, rel_l2, report};
use paraxial_inverse::analysis::{
    d_metric, d_metric_labeled, reconstruct, sweep_delta, sweep_tau, sweep_xmax, tbc_residual, ExperimentSetup,
    FieldPatch, Model, SweepResult, pwe_residual,
};
use paraxial_inverse::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const FWD_BUDGET: f64 = 1e-3;

fn params() -> PhysicalParams {
    PhysicalParams::orthogonal(0.01).unwrap()
}

fn reference_z() -> ZGrid {
    ZGrid::new(90.0, 100.0, 2514).unwrap()
}

fn reference_x() -> XGrid {
    XGrid::new(2.8284, 28.284, 2828).unwrap()
}

fn gaussian() -> GaussianBeam {
    let x = reference_x();
    GaussianBeam::aimed_at(&params(), 20.0, 95.0, 0.5 * (x.x_min() + x.x_max())).unwrap()
}

fn criterion_1_matrix_matches_pv_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst: f64 = 0.0;
    for &n in &[8usize, 16, 32] {
        let grid = ZGrid::new(90.0, 100.0, n).unwrap();
        let m = assemble_m(&grid, CornerMode::Clamp, DEFAULT_CLAMP).unwrap();
        for _ in 0..20 {
            let u = ComplexLine::new(
                grid,
                (0..=n)
                    .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                    .collect(),
            )
            .unwrap();
            for row in 1..n {
                let z = grid.node(row);
                let action: Complex64 = (0..=n).map(|col| m.entries()[(row, col)] * u.samples()[col]).sum();
                let oracle = pv_oracle(&u, z) * (-z.sqrt());
                worst = worst.max((action - oracle).norm() / oracle.norm());
            }
        }
    }
    let pass = worst <= 1e-8;
    report(1, pass, &format!("worst interior-row relative error {worst:.3e} (budget 1e-8)"));
    assert!(pass);
}

fn criterion_2_condition_numbers() {
    let _g = heavy();
    let m = assemble_m(&reference_z(), CornerMode::Clamp, DEFAULT_CLAMP).unwrap();
    let cases = [
        ("alpha=1", Complex64::new(1.0, 0.0), 8e12),
        ("alpha=exp(0.1i)", Complex64::from_polar(1.0, 0.1), 3e8),
        ("alpha=1.01", Complex64::new(1.01, 0.0), 3e9),
    ];
    let mut pass = true;
    let mut parts = Vec::new();
    for (label, alpha, target) in cases {
        let a = system_matrix(&m, alpha);
        let est = condition_estimate(a.as_ref());
        let ok = est >= target / 10.0 && est <= target * 10.0;
        pass &= ok;
        parts.push(format!("{label}: {est:.3e} vs {target:.0e}"));
    }
    report(2, pass, &parts.join("; "));
    assert!(pass);
}

fn criterion_3_gaussian_round_trip() {
    let _g = heavy();
    let (z, x, p) = (reference_z(), reference_x(), params());
    let beam = gaussian();
    let u0 = eval_gaussian_boundary(&beam, &z);
    let forward = fresnel_propagate(&u0, &p, &x).unwrap();
    let exact = eval_gaussian_image(&beam, &x);
    let eps_fwd = rel_l2(exact.samples(), forward.samples());

    let mut parts = vec![format!("forward rel L2 {eps_fwd:.3e} (budget {FWD_BUDGET:e})")];
    let setup = ExperimentSetup::with_image(p, z, Model::Gaussian(beam), exact.clone());
    let mut d_clamp = f64::NAN;
    for mode in [CornerMode::Clamp, CornerMode::ExplicitUnit] {
        let setup = setup.clone().with_corners(mode, DEFAULT_CLAMP);
        let out = reconstruct(&setup, &z, Regularization::unit(), &exact).unwrap();
        let thin = out.d_thin.as_ref().unwrap();
        let l2 = rel_l2(u0.samples(), out.direct.u0.samples());
        if mode == CornerMode::Clamp {
            d_clamp = thin.d;
        }
        parts.push(format!(
            "{}: D_thin {:.4} over {} nodes, rel L2 {:.3e}, excluded max err {:.2e}",
            mode.as_str(),
            thin.d,
            thin.included,
            l2,
            thin.excluded_max_error
        ));
    }
    let pass = eps_fwd <= FWD_BUDGET && d_clamp <= 0.05;
    report(3, pass, &format!("{} (D budget 0.05)", parts.join("; ")));
    assert!(pass);
}

fn criterion_4_special_case_closed_forms() {
    let _g = heavy();
    let (z, p) = (reference_z(), params());
    // With K = 0 the image core sits near x = 0, below the reference window, so the
    // window here starts at the first step and extends past the tails.
    let x = XGrid::new(0.005, 30.0, 5999).unwrap();
    let beam = ParabolicBeam::new(4.8, 95.0, f64::INFINITY).unwrap();
    let real = eval_parabolic_boundary(&beam, &z);
    let image = fresnel_propagate(&real, &p, &x).unwrap();
    let rec = solve_special_real(&image, &p, &z).unwrap();
    let err_real = rel_l2(real.samples(), rec.samples());

    let imag = real.scaled(Complex64::new(0.0, 1.0));
    let image_i = fresnel_propagate(&imag, &p, &x).unwrap();
    let rec_i = solve_special_imag(&image_i, &p, &z).unwrap();
    let err_imag = rel_l2(imag.samples(), rec_i.samples());
    let leak = solve_special_real(&image_i, &p, &z).unwrap().norm() / imag.norm();

    let narrow = fresnel_propagate(&real, &p, &reference_x()).unwrap();
    let err_narrow = rel_l2(real.samples(), solve_special_real(&narrow, &p, &z).unwrap().samples());

    let budget = 3.0 * FWD_BUDGET;
    let pass = err_real <= budget && err_imag <= budget;
    report(
        4,
        pass,
        &format!(
            "window [0.005, 30]: real rel L2 {err_real:.3e}, imaginary rel L2 {err_imag:.3e}, \
             (budget {budget:e}); real-part route on imaginary data gives {leak:.3e}, not a gate; reference window: {err_narrow:.3e}"
        ),
    );
    assert!(pass);
}

fn criterion_5_tbc_consistency() {
    let p = params();
    let beam = gaussian();
    let mut residuals = Vec::new();
    for n in [300usize, 600, 1200, 2400] {
        let z = ZGrid::new(90.0, 100.0, n).unwrap();
        let u = eval_gaussian_boundary(&beam, &z);
        let du = eval_gaussian_boundary_dx(&beam, &z);
        residuals.push(tbc_residual(&u, &du, &p).unwrap());
    }
    let monotone = residuals.windows(2).all(|w| w[1] < w[0]);
    let last = *residuals.last().unwrap();
    let pass = monotone && last <= 1e-2;
    let shown: Vec<String> = residuals.iter().map(|r| format!("{r:.3e}")).collect();
    report(5, pass, &format!("residuals at N=300,600,1200,2400: {} (final budget 1e-2)", shown.join(", ")));
    assert!(pass);
}

// Sweeps run at N = 600 around the reference window; image data for the compact
// models are forward-propagated once on the reference grid and reused.
const SWEEP_N: usize = 600;
const TAU_N: [usize; 10] = [50, 75, 100, 150, 200, 300, 400, 600, 800, 1200];
const DELTAS: [f64; 10] = [0.0, 0.001, 0.002, 0.005, 0.01, 0.02, 0.05, 0.1, 0.2, 0.5];

fn sweep_setups() -> Vec<ExperimentSetup> {
    let (p, x) = (params(), reference_x());
    let base = reference_z();
    let grid = ZGrid::new(90.0, 100.0, SWEEP_N).unwrap();
    let models = [
        Model::Gaussian(gaussian()),
        Model::Parabolic(ParabolicBeam::new(4.8, 95.0, 1.0).unwrap()),
        Model::Step(StepBeam::new(4.8, 95.0, 1.0).unwrap()),
    ];
    models
        .into_iter()
        .map(|model| {
            let built = ExperimentSetup::from_model(p, base, x, model).unwrap();
            ExperimentSetup::with_image(p, grid, built.model, built.image)
        })
        .collect()
}

fn has_interior_min(values: &[f64]) -> bool {
    let finite: Vec<f64> = values.iter().copied().filter(|v| v.is_finite()).collect();
    if finite.len() != values.len() || values.len() < 3 {
        return false;
    }
    let (imin, _) = values
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |acc, (i, &v)| if v < acc.1 { (i, v) } else { acc });
    imin > 0 && imin < values.len() - 1
}

fn is_decreasing(values: &[f64]) -> bool {
    values.windows(2).all(|w| w[1] <= w[0])
}

/// Non-decreasing (5% slack) until the first value of order one, never below
/// order one afterwards, and larger at the end than at the start.
fn grows_until_unity(values: &[f64]) -> bool {
    let Some(first_big) = values.iter().position(|&v| v >= 1.0) else {
        return false;
    };
    let rising = values[..=first_big].windows(2).all(|w| w[1] >= 0.95 * w[0]);
    let stays = values[first_big..].iter().all(|&v| v >= 1.0);
    rising && stays && values[values.len() - 1] > values[0]
}

fn fmt(values: &[f64]) -> String {
    values.iter().map(|v| format!("{v:.3}")).collect::<Vec<_>>().join(",")
}

fn criterion_6_sweep_properties() {
    let _g = heavy();
    let setups = sweep_setups();
    let names = ["gaussian", "parabolic", "step"];
    let taus: Vec<f64> = TAU_N.iter().map(|n| 10.0 / *n as f64).collect();

    let tau_sweeps: Vec<SweepResult> = setups.iter().map(|s| sweep_tau(s, &taus)).collect();
    let mut lines = Vec::new();
    for (name, sw) in names.iter().zip(&tau_sweeps) {
        lines.push(format!("  tau sweep {name}: thin [{}] thick [{}]", fmt(&sw.d_thin()), fmt(&sw.d_thick())));
    }

    // (a) interior minima for the smooth models.
    let mut a_pass = true;
    for sw in &tau_sweeps[..2] {
        a_pass &= has_interior_min(&sw.d_thin()) && has_interior_min(&sw.d_thick());
    }

    // (b) step above both smooth models at every tau, thin and thick separately.
    let step = &tau_sweeps[2];
    let mut violations = Vec::new();
    for i in 0..taus.len() {
        for (name, smooth) in names.iter().zip(&tau_sweeps[..2]) {
            if step.d_thin()[i] <= smooth.d_thin()[i] {
                violations.push(format!("thin {name} N={}", TAU_N[i]));
            }
            if step.d_thick()[i] <= smooth.d_thick()[i] {
                violations.push(format!("thick {name} N={}", TAU_N[i]));
            }
        }
    }
    let b_pass = violations.is_empty();
    if !b_pass {
        lines.push(format!("  (b) step not above: {}", violations.join(", ")));
    }

    // (c) phase regularization helps the step model at the sweep grid.
    let step_setup = &setups[2];
    let unit = reconstruct(step_setup, &step_setup.grid, Regularization::unit(), &step_setup.image).unwrap();
    let phase_reg = Regularization::new(RegularizationMode::Phase, 0.1).unwrap();
    let phase = reconstruct(step_setup, &step_setup.grid, phase_reg, &step_setup.image).unwrap();
    let (u_thin, u_thick) = (unit.d_thin.unwrap().d, unit.d_thick.unwrap().d);
    let (p_thin, p_thick) = (phase.d_thin.unwrap().d, phase.d_thick.unwrap().d);
    let c_pass = p_thin < u_thin && p_thick < u_thick;
    lines.push(format!(
        "  step alpha=1 thin {u_thin:.3} thick {u_thick:.3}; alpha=exp(0.1i) thin {p_thin:.3} thick {p_thick:.3}"
    ));

    // (d) window truncation, alpha = 1.1.
    let x = reference_x();
    let xmaxs: Vec<f64> = (0..10).map(|i| x.x_max() - i as f64 * 2.0).collect();
    let shift = Regularization::new(RegularizationMode::Shift, 0.1).unwrap();
    let mut d_pass = true;
    for (name, s) in names.iter().zip(&setups) {
        let sw = sweep_xmax(&s.clone().with_regularization(shift), &xmaxs);
        let thin = sw.d_thin();
        d_pass &= grows_until_unity(&thin);
        lines.push(format!("  x_max sweep {name} (x_max {}..{}): thin [{}]", xmaxs[0], xmaxs[9], fmt(&thin)));
    }

    // (e) delta sweep, alpha = 1 + delta.
    let mut e_pass = true;
    for (i, (name, s)) in names.iter().zip(&setups).enumerate() {
        let sw = sweep_delta(s, &DELTAS, RegularizationMode::Shift);
        // Gated on the thin line (quality of the approximation); the thick line is shown.
        let thin = sw.d_thin();
        let thick = sw.d_thick();
        if i < 2 {
            e_pass &= has_interior_min(&thin);
        } else {
            e_pass &= is_decreasing(&thin);
        }
        lines.push(format!(
            "  delta sweep {name}: thin [{}] thick [{}] (thin min interior {}, thick min interior {}, thin decreasing {}, thick decreasing {})",
            fmt(&thin),
            fmt(&thick),
            has_interior_min(&thin),
            has_interior_min(&thick),
            is_decreasing(&thin),
            is_decreasing(&thick)
        ));
    }

    let pass = a_pass && b_pass && c_pass && d_pass && e_pass;
    report(
        6,
        pass,
        &format!("(a) {a_pass} (b) {b_pass} (c) {c_pass} (d) {d_pass} (e) {e_pass}\n{}", lines.join("\n")),
    );
    assert!(pass);
}

fn criterion_7_invariant_suites() {
    let p = params();
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut failures = Vec::new();
    let mut rnd = |n: usize| -> Vec<Complex64> {
        (0..n)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect()
    };
    let z = ZGrid::new(90.0, 100.0, 64).unwrap();
    let x = XGrid::new(3.0, 25.0, 300).unwrap();
    let (a, b) = (Complex64::new(0.3, -1.2), Complex64::new(-0.7, 0.4));

    // Forward linearity.
    let u = ComplexLine::new(z, rnd(65)).unwrap();
    let v = ComplexLine::new(z, rnd(65)).unwrap();
    let combo = ComplexLine::new(
        z,
        u.samples().iter().zip(v.samples()).map(|(p, q)| a * p + b * q).collect(),
    )
    .unwrap();
    let fu = fresnel_propagate(&u, &p, &x).unwrap();
    let fv = fresnel_propagate(&v, &p, &x).unwrap();
    let fc = fresnel_propagate(&combo, &p, &x).unwrap();
    let expect: Vec<Complex64> = fu.samples().iter().zip(fv.samples()).map(|(p, q)| a * p + b * q).collect();
    if rel_l2(&expect, fc.samples()) > 1e-10 {
        failures.push("forward linearity");
    }

    // Right-hand side linearity.
    let i1 = ComplexLine::new(x, rnd(301)).unwrap();
    let i2 = ComplexLine::new(x, rnd(301)).unwrap();
    let ic = ComplexLine::new(
        x,
        i1.samples().iter().zip(i2.samples()).map(|(p, q)| a * p + b * q).collect(),
    )
    .unwrap();
    for prime in [false, true] {
        let f = |img: &ImageLine| {
            if prime {
                assemble_g_prime(img, &z, &p).values
            } else {
                assemble_g(img, &z, &p).values
            }
        };
        let (g1, g2, gc) = (f(&i1), f(&i2), f(&ic));
        let expect: Vec<Complex64> = g1.iter().zip(&g2).map(|(p, q)| a * p + b * q).collect();
        if rel_l2(&expect, &gc) > 1e-10 {
            failures.push("rhs linearity");
        }
    }

    // Solve linearity on a well-conditioned system.
    let m = assemble_m(&z, CornerMode::ExplicitUnit, DEFAULT_CLAMP).unwrap();
    let reg = Regularization::new(RegularizationMode::Shift, 0.5).unwrap();
    let g1 = assemble_g(&i1, &z, &p);
    let g2 = assemble_g(&i2, &z, &p);
    let gs = RhsVector {
        values: g1.values.iter().zip(&g2.values).map(|(p, q)| p + q).collect(),
        kind: RhsKind::G,
    };
    let s1 = solve(&build_system(&m, g1, reg, None).unwrap()).unwrap();
    let s2 = solve(&build_system(&m, g2, reg, None).unwrap()).unwrap();
    let ss = solve(&build_system(&m, gs, reg, None).unwrap()).unwrap();
    let expect: Vec<Complex64> = s1.u0.samples().iter().zip(s2.u0.samples()).map(|(p, q)| p + q).collect();
    if rel_l2(&expect, ss.u0.samples()) > 1e-10 {
        failures.push("solve linearity");
    }

    // M is model independent: two assemblies are bitwise equal.
    let m2 = assemble_m(&z, CornerMode::ExplicitUnit, DEFAULT_CLAMP).unwrap();
    let same = (0..65).all(|r| (0..65).all(|c| {
        let (p, q) = (m.entries()[(r, c)], m2.entries()[(r, c)]);
        p.re.to_bits() == q.re.to_bits() && p.im.to_bits() == q.im.to_bits()
    }));
    if !same {
        failures.push("M reproducibility");
    }

    // T anti-causality.
    let t = assemble_t(&z, &p).unwrap();
    let anti = (0..65).all(|r| (65 - r..65).all(|c| t.entries()[(r, c)] == Complex64::new(0.0, 0.0)));
    if !anti {
        failures.push("T anti-causality");
    }

    // PWE residual of the exact Gaussian, second order.
    let beam = gaussian();
    let res = |h: f64| {
        // Steps must resolve the tilted carrier, about 100 rad per unit x.
        let patch = FieldPatch::sample((-0.01, -95.5), (h, h), (9, 9), |x, z| beam.field(x, z));
        pwe_residual(&patch, &p).unwrap()
    };
    let (r1, r2) = (res(0.004), res(0.002));
    let order = (r1 / r2).log2();
    if !(1.8..2.3).contains(&order) {
        failures.push("PWE residual order");
    }

    // D identities.
    let line = ComplexLine::new(z, rnd(65)).unwrap();
    let phase = Complex64::from_polar(1.0, 0.7);
    let other = ComplexLine::new(z, rnd(65)).unwrap();
    let d1 = d_metric(&line, &other).unwrap().d;
    let d2 = d_metric_labeled(&line.scaled(phase), &other.scaled(phase), "a", "b").unwrap().d;
    if d_metric(&line, &line).unwrap().d != 0.0 || (d1 - d2).abs() > 1e-12 * d1 {
        failures.push("D identities");
    }

    let pass = failures.is_empty();
    report(
        7,
        pass,
        &format!("PWE order {order:.3}; failures: {}", if pass { "none".to_string() } else { failures.join(", ") }),
    );
    assert!(pass);
}

fn main() {
    std::panic::set_hook(Box::new(|info| eprintln!("  {info}")));
    let criteria: [(&str, fn()); 7] = [
        ("criterion_1_matrix_matches_pv_oracle", criterion_1_matrix_matches_pv_oracle),
        ("criterion_2_condition_numbers", criterion_2_condition_numbers),
        ("criterion_3_gaussian_round_trip", criterion_3_gaussian_round_trip),
        ("criterion_4_special_case_closed_forms", criterion_4_special_case_closed_forms),
        ("criterion_5_tbc_consistency", criterion_5_tbc_consistency),
        ("criterion_6_sweep_properties", criterion_6_sweep_properties),
        ("criterion_7_invariant_suites", criterion_7_invariant_suites),
    ];
    let failed: Vec<&str> = criteria
        .iter()
        .filter(|(_, f)| std::panic::catch_unwind(f).is_err())
        .map(|(name, _)| *name)
        .collect();
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed.len(), criteria.len());
    if !failed.is_empty() {
        println!("failed: {}", failed.join(", "));
        std::process::exit(1);
    }
}
