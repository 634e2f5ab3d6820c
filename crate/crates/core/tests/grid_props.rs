use paraxial_inverse::{inverse_shear_transform, shear_transform, UniformGrid, XGrid, ZGrid};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

proptest! {
    #[test]
    fn nodes_recompute_from_min_and_step(z_min in 0.1f64..200.0, span in 0.01f64..50.0, n in 2usize..5000) {
        let g = ZGrid::new(z_min, z_min + span, n).unwrap();
        let nodes = g.nodes();
        for (i, z) in nodes.iter().enumerate() {
            prop_assert_eq!(*z, z_min + i as f64 * g.tau());
            prop_assert!(*z > 0.0);
        }
        prop_assert!(nodes.windows(2).all(|w| w[1] > w[0]));
        let stored = g.z_max() - g.z_min();
        prop_assert!((g.tau() - stored / n as f64).abs() <= 4.0 * f64::EPSILON * g.tau());
        prop_assert!((stored - span).abs() <= 2.0 * f64::EPSILON * (z_min + span));
    }

    #[test]
    fn xgrid_step_is_derived(x_min in 0.0f64..10.0, span in 0.01f64..50.0, n in 2usize..5000) {
        let g = XGrid::new(x_min, x_min + span, n).unwrap();
        prop_assert_eq!(g.len(), n + 1);
        let stored = g.x_max() - g.x_min();
        prop_assert!((g.h() - stored / n as f64).abs() <= 4.0 * f64::EPSILON * g.h());
    }
}

#[test]
fn shear_round_trip_million_samples() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst = 0.0f64;
    for _ in 0..1_000_000 {
        let x: f64 = rng.gen_range(-100.0..100.0);
        let z: f64 = rng.gen_range(-100.0..100.0);
        let theta: f64 = rng.gen_range(-1.5..1.5);
        let (xs, zs) = shear_transform(x, z, theta);
        let (xb, zb) = inverse_shear_transform(xs, zs, theta);
        assert_eq!(zb, z);
        // Error measured in ulps of the largest term taking part in the sum.
        let scale = x.abs().max((z * theta.tan()).abs());
        let ulp = scale * f64::EPSILON;
        worst = worst.max((xb - x).abs() / ulp);
    }
    assert!(worst <= 2.0, "worst round-trip error {worst} ulp");
}
