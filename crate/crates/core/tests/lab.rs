use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use skspline::lab::{approximation_error, convolve_quadrature, deviation, lp_norm, sobolev_instance, CSV_HEADER};
use skspline::{
    build_fundamental, rate_exponent, run_convergence_study, theoretical_bound, FourierRep, GridSpec, Kernel,
    KernelSpec, LpExponent, MultiIndex, Norm, RateSpec, SkError,
};
use std::f64::consts::PI;

fn harmonic(terms: &str, d: usize) -> FourierRep {
    FourierRep::parse_terms(d, terms).unwrap()
}

fn spec(p: f64, q: f64, gamma: f64, d: usize) -> RateSpec {
    RateSpec::new(p, LpExponent::new(q).unwrap(), gamma, d).unwrap()
}

#[test]
fn lp_norms_of_trigonometric_polynomials() {
    let e = harmonic("3:1:0", 1);
    for p in [1.0, 1.5, 2.0, 7.0, f64::INFINITY] {
        let v = lp_norm(&e, LpExponent::new(p).unwrap(), 16).unwrap();
        assert!((v - 1.0).abs() < 1e-13, "p = {p}");
    }
    let cos = harmonic("1:0.5:0;-1:0.5:0", 1);
    assert!((lp_norm(&cos, LpExponent::Finite(2.0), 64).unwrap() - 0.5f64.sqrt()).abs() < 1e-13);
    assert!((lp_norm(&cos, LpExponent::Infinity, 64).unwrap() - 1.0).abs() < 1e-13);
    assert!((lp_norm(&cos, LpExponent::Finite(1.0), 4096).unwrap() - 2.0 / PI).abs() < 1e-6);
    assert!(lp_norm(&e, LpExponent::Finite(2.0), 8).is_err());
    assert!(LpExponent::new(0.5).is_err());
}

#[test]
fn sobolev_instance_applies_the_multiplier() {
    let kernel = KernelSpec::power(2, 3.0, Norm::L2).unwrap();
    let phi = harmonic("1,0:1:0;1,2:0.5:0.5", 2);
    let f = sobolev_instance(&kernel, &phi, 1.5, false, 32).unwrap();
    let a = |m: &[i64]| kernel.coeff(&MultiIndex::new(m.to_vec()));
    assert!((f.f_coeffs.get(&MultiIndex::new(vec![1, 0])) - Complex64::new(a(&[1, 0]), 0.0)).norm() < 1e-15);
    let expected = Complex64::new(0.5, 0.5) * a(&[1, 2]);
    assert!((f.f_coeffs.get(&MultiIndex::new(vec![1, 2])) - expected).norm() < 1e-15);

    let normalized = sobolev_instance(&kernel, &phi, 1.5, true, 32).unwrap();
    assert!((normalized.p_norm_of_phi - 1.0).abs() < 1e-12);
    let ratio = normalized.f_coeffs.get(&MultiIndex::new(vec![1, 0])).re / a(&[1, 0]);
    assert!((ratio * f.p_norm_of_phi - 1.0).abs() < 1e-12);

    assert!(sobolev_instance(&kernel, &phi, 2.5, true, 32).is_err());
    assert!(sobolev_instance(&kernel, &FourierRep::new(2), 1.0, true, 32).is_err());
    assert!(sobolev_instance(&kernel, &harmonic("1:1:0", 1), 1.0, true, 32).is_err());
}

#[test]
fn multiplier_matches_convolution_with_the_kernel() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for (d, terms, m) in [(1, "3:1:0;-2:0:1", 256), (2, "1,-2:1:0.5", 64)] {
        let kernel = Kernel::power(d, d as f64 + 3.0, Norm::L2).unwrap();
        let phi = harmonic(terms, d);
        let f = sobolev_instance(kernel.spec(), &phi, 1.0, false, m).unwrap();
        for _ in 0..5 {
            let x: Vec<f64> = (0..d).map(|_| rng.random_range(0.0..2.0 * PI)).collect();
            let conv = convolve_quadrature(&kernel, &phi, &x, m);
            assert!((conv - f.f_coeffs.eval(&x)).norm() < 1e-6, "d = {d}");
        }
    }
}

#[test]
fn deviation_vanishes_on_knots_and_for_constants() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    let kernel = Kernel::power(2, 3.0, Norm::Linf).unwrap();
    let grid = GridSpec::new(vec![2, 3]).unwrap();
    let fs = build_fundamental(&kernel, &grid, 1e-10).unwrap();
    let l = MultiIndex::new(vec![5, -1]);
    for k in grid.knots() {
        assert!(deviation(&fs, &l, k.coords()).norm() < 1e-10);
    }
    for _ in 0..10 {
        let x = [rng.random_range(0.0..2.0 * PI), rng.random_range(0.0..2.0 * PI)];
        assert!(deviation(&fs, &MultiIndex::zero(2), &x).norm() < 1e-10);
        assert!(deviation(&fs, &l, &x).norm() > 0.0);
    }
}

#[test]
fn rate_exponent_values_and_hypothesis() {
    assert_eq!(rate_exponent(&spec(1.0, 2.0, 3.0, 1)).unwrap(), -2.5);
    assert_eq!(rate_exponent(&spec(1.0, f64::INFINITY, 2.5, 2)).unwrap(), -0.5);
    assert!((rate_exponent(&spec(1.2, 6.0, 4.0, 3)).unwrap() - (-4.0 + 3.0 * (1.0 / 1.2 - 1.0 / 6.0))).abs() < 1e-15);
    for p in [2.0, 1.5] {
        let bad = RateSpec { p, q: LpExponent::Finite(2.0), gamma: 3.0, d: 1 };
        assert!(matches!(rate_exponent(&bad), Err(SkError::Hypothesis(_))));
        assert!(RateSpec::new(p, LpExponent::Finite(2.0), 3.0, 1).is_err());
    }
}

#[test]
fn theoretical_bound_decays_at_the_predicted_rate() {
    for (d, norm, s, n) in [(1, Norm::L2, spec(1.0, 2.0, 3.0, 1), 64), (2, Norm::Linf, spec(1.0, f64::INFINITY, 3.0, 2), 16)] {
        let kernel = Kernel::power(d, s.gamma, norm).unwrap();
        let bound = |n| theoretical_bound(&kernel, &GridSpec::uniform(d, n).unwrap(), &s, 1e-12).unwrap();
        let ratio = bound(2 * n) / bound(n);
        let predicted = 2f64.powf(rate_exponent(&s).unwrap());
        assert!((ratio / predicted - 1.0).abs() < 0.1, "d={d}: {ratio} vs {predicted}");
        assert!(bound(n) > bound(2 * n));
    }
}

#[test]
fn approximation_error_examples() {
    let kernel = Kernel::power(1, 3.0, Norm::L2).unwrap();
    let constant = sobolev_instance(kernel.spec(), &harmonic("0:2:0", 1), 1.0, false, 16).unwrap();
    let grid = GridSpec::uniform(1, 4).unwrap();
    let q = LpExponent::Finite(2.0);
    assert!(approximation_error(&constant, &kernel, &grid, q, 64).unwrap() < 1e-10);

    let f = sobolev_instance(kernel.spec(), &harmonic("1:1:0;5:1:0", 1), 1.0, true, 64).unwrap();
    let errors: Vec<f64> = [4, 8, 16]
        .iter()
        .map(|&n| approximation_error(&f, &kernel, &GridSpec::uniform(1, n).unwrap(), q, 64).unwrap())
        .collect();
    assert!(errors[0] > errors[1] && errors[1] > errors[2], "{errors:?}");
}

#[test]
fn study_rows_and_csv() {
    let s = spec(1.0, 2.0, 3.0, 1);
    let kernel = Kernel::power(1, 3.0, Norm::L2).unwrap();
    let phi = harmonic("1:1:0;5:1:0", 1);
    let study = run_convergence_study(&kernel, &s, &phi, &[4, 8, 16, 32], 64).unwrap();
    assert_eq!(study.rows.len(), 4);
    assert_eq!(study.predicted_exponent, -2.5);
    assert!(study.fitted_slope <= -2.2, "slope {}", study.fitted_slope);
    for w in study.rows.windows(2) {
        assert!(w[1].measured_error <= w[0].measured_error * 1.05);
        assert!(w[1].theoretical_bound < w[0].theoretical_bound);
    }
    let csv = study.to_csv();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some(CSV_HEADER));
    assert_eq!(lines.count(), 4);

    let s = spec(1.0, f64::INFINITY, 3.0, 1);
    let study = run_convergence_study(&kernel, &s, &phi, &[4, 8], 64).unwrap();
    assert!(study.to_csv().lines().nth(1).unwrap().starts_with("4,inf,1,3,1,"));

    assert!(run_convergence_study(&kernel, &s, &phi, &[8, 4], 64).is_err());
    assert!(run_convergence_study(&kernel, &spec(1.0, 2.0, 4.0, 1), &phi, &[4, 8], 64).is_err());
}
