//! Randomised invariants of the strain model and the tree solvers.

mod common;

use nalgebra::{Matrix3, Point2, Point3, Rotation3, Unit, Vector3};
use proptest::prelude::*;
use proptest::test_runner::FileFailurePersistence;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::random_graph;
use wirelay::steiner::{solve_approx, solve_exact, solve_oracle};
use wirelay::strain::{face_density, EnergyVariant, MaterialParams};

fn coord() -> impl Strategy<Value = f64> {
    -1.0..1.0f64
}

fn rest_triangle() -> impl Strategy<Value = [Point2<f64>; 3]> {
    (coord(), coord(), coord(), coord(), coord(), coord())
        .prop_map(|(a, b, c, d, e, f)| [Point2::new(a, b), Point2::new(c, d), Point2::new(e, f)])
        .prop_filter("non-degenerate", |t| {
            (t[1] - t[0]).perp(&(t[2] - t[0])).abs() > 0.05
        })
}

fn deformed_triangle() -> impl Strategy<Value = [Point3<f64>; 3]> {
    proptest::array::uniform9(coord()).prop_map(|c| {
        [
            Point3::new(c[0], c[1], c[2]),
            Point3::new(c[3], c[4], c[5]),
            Point3::new(c[6], c[7], c[8]),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig {
        failure_persistence: Some(Box::new(FileFailurePersistence::WithSource("regressions"))),
        ..ProptestConfig::default()
    })]

    #[test]
    fn density_ignores_rigid_motion(
        rest in rest_triangle(),
        deformed in deformed_triangle(),
        axis in proptest::array::uniform3(coord()),
        angle in 0.0..std::f64::consts::TAU,
        shift in proptest::array::uniform3(coord()),
        quadratic in any::<bool>(),
    ) {
        prop_assume!(Vector3::from(axis).norm() > 1e-3);
        let variant = if quadratic { EnergyVariant::Quadratic } else { EnergyVariant::Linear };
        let m = MaterialParams::default();
        let Ok(base) = face_density(&rest, &deformed, &m, variant) else {
            return Ok(());
        };
        let r: Matrix3<f64> =
            Rotation3::from_axis_angle(&Unit::new_normalize(Vector3::from(axis)), angle).into();
        let moved = deformed.map(|p| Point3::from(r * p.coords + Vector3::from(shift)));
        let d = face_density(&rest, &moved, &m, variant).unwrap();
        prop_assert!((d - base).abs() <= 1e-8 * base.abs().max(1.0), "{d} vs {base}");
    }

    #[test]
    fn density_is_never_negative(rest in rest_triangle(), deformed in deformed_triangle()) {
        let m = MaterialParams::default();
        if let Ok(d) = face_density(&rest, &deformed, &m, EnergyVariant::Linear) {
            prop_assert!(d >= 0.0);
        }
    }

    #[test]
    fn scaling_weights_keeps_the_optimum(seed in any::<u64>(), c in 0.01..100.0f64) {
        let g = random_graph(&mut ChaCha8Rng::seed_from_u64(seed));
        let a = solve_exact(&g, 16, 1 << 28).unwrap();
        let b = solve_exact(&g.scaled(c), 16, 1 << 28).unwrap();
        // Ties are common with integer weights, so compare costs, not edge sets.
        let original: f64 = b.edges.iter().map(|&e| g.edges[e].weight).sum();
        prop_assert!((original - a.total_weight).abs() <= 1e-9 * a.total_weight);
        prop_assert!((b.total_weight - c * a.total_weight).abs() <= 1e-9 * b.total_weight);
    }

    #[test]
    fn exact_matches_oracle_and_bounds_approx(seed in any::<u64>()) {
        let g = random_graph(&mut ChaCha8Rng::seed_from_u64(seed));
        let exact = solve_exact(&g, 16, 1 << 28).unwrap();
        let oracle = solve_oracle(&g).unwrap();
        let approx = solve_approx(&g).unwrap();
        prop_assert_eq!(exact.total_weight, oracle.total_weight);
        prop_assert!(approx.total_weight <= 2.0 * exact.total_weight + 1e-9);
        prop_assert!(exact.validate(&g).is_ok());
        prop_assert!(approx.validate(&g).is_ok());
    }
}
