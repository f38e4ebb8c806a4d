use proptest::prelude::*;
use skspline::lattice::canonical_angle;
use skspline::{rate_exponent, GridSpec, Kernel, LpExponent, MultiIndex, Norm, RateSpec};
use std::f64::consts::PI;

fn grid_strategy() -> impl Strategy<Value = GridSpec> {
    prop::collection::vec(1usize..5, 1..4).prop_map(|n| GridSpec::new(n).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn index_round_trip(grid in grid_strategy(), seed in any::<usize>()) {
        let i = seed % grid.len();
        let k = grid.index_at(i);
        prop_assert_eq!(grid.index_of(&k), Some(i));
        let x = grid.knot(&k).unwrap();
        prop_assert_eq!(&grid.knot_at(i), &x);
    }

    #[test]
    fn residue_ignores_period_shifts(grid in grid_strategy(), l in prop::collection::vec(-40i64..40, 3), p in prop::collection::vec(-3i64..3, 3)) {
        let d = grid.dim();
        let l = MultiIndex::new(l[..d].to_vec());
        let shift = MultiIndex::new(grid.periods().iter().zip(&p).map(|(a, b)| a * b).collect());
        prop_assert_eq!(grid.residue(&l), grid.residue(&l.add(&shift)));
        prop_assert!(grid.index_of(&grid.residue(&l)).is_some());
    }

    #[test]
    fn exponential_lattice_sum_is_a_class_indicator(grid in grid_strategy(), l in prop::collection::vec(-20i64..20, 3)) {
        let l = MultiIndex::new(l[..grid.dim()].to_vec());
        let exact = grid.exp_lattice_sum(&l);
        let numeric = grid.exp_lattice_sum_numeric(&l);
        prop_assert!((exact - numeric).norm() < 1e-9);
        let expected = if grid.is_zero_mod(&l) { grid.len() as f64 } else { 0.0 };
        prop_assert!((exact.re - expected).abs() < 1e-12 && exact.im.abs() < 1e-12);
    }

    #[test]
    fn canonical_angle_stays_in_range(x in -1e4f64..1e4) {
        let a = canonical_angle(x);
        prop_assert!((0.0..2.0 * PI).contains(&a));
        let turns = (x - a) / (2.0 * PI);
        prop_assert!((turns - turns.round()).abs() < 1e-9);
    }

    #[test]
    fn kernel_is_even_and_periodic(x in prop::collection::vec(-7.0f64..7.0, 2), sup in any::<bool>()) {
        let norm = if sup { Norm::Linf } else { Norm::L2 };
        let k = Kernel::power(2, 3.5, norm).unwrap();
        let v = k.eval(&x);
        let neg: Vec<f64> = x.iter().map(|t| -t).collect();
        let shifted = [x[0] + 2.0 * PI, x[1] - 4.0 * PI];
        prop_assert!((k.eval(&neg) - v).abs() < 1e-11);
        prop_assert!((k.eval(&shifted) - v).abs() < 1e-11);
        prop_assert!(v <= k.eval(&[0.0, 0.0]) + 1e-12);
    }

    #[test]
    fn rate_exponent_is_affine_in_gamma(p in 1.0f64..2.0, q in 2.5f64..50.0, gamma in 4.0f64..9.0, shift in 0.0f64..5.0, d in 1usize..4) {
        let q = LpExponent::new(q).unwrap();
        prop_assume!(1.0 / p - q.reciprocal() >= 0.5);
        let a = rate_exponent(&RateSpec::new(p, q, gamma, d).unwrap()).unwrap();
        let b = rate_exponent(&RateSpec::new(p, q, gamma + shift, d).unwrap()).unwrap();
        prop_assert!((a - b - shift).abs() < 1e-12);
        prop_assert!(a < 0.0);
    }
}
