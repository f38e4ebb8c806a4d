//! Special functions needed by the lattice-sum engine.
//!
//! Everything here works on real arguments in double precision:
//! Riemann and Hurwitz zeta, the upper incomplete gamma function for any
//! real order (including non-positive orders, which the real-space half of
//! the Ewald split needs), and the polylogarithm on the unit circle.

use num_complex::Complex64;
use statrs::function::gamma::{gamma, ln_gamma};
use std::f64::consts::{FRAC_PI_2, PI};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// B_2, B_4, ..., B_24.
const BERNOULLI_EVEN: [f64; 12] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
    854513.0 / 138.0,
    -236364091.0 / 2730.0,
];

/// Hurwitz zeta `sum_{k>=0} (k + a)^{-s}` for real `s > 0`, `s != 1`, `a > 0`.
///
/// Euler-Maclaurin with 24 explicit terms and 12 Bernoulli corrections.
/// For `0 < s < 1` the result is the analytic continuation.
pub fn hurwitz_zeta(s: f64, a: f64) -> f64 {
    assert!(a > 0.0, "hurwitz_zeta requires a > 0");
    assert!(s != 1.0, "hurwitz_zeta has a pole at s = 1");
    const HEAD: usize = 24;
    let mut sum = 0.0;
    for k in 0..HEAD {
        sum += (k as f64 + a).powf(-s);
    }
    let w = HEAD as f64 + a;
    sum += w.powf(1.0 - s) / (s - 1.0);
    sum += 0.5 * w.powf(-s);
    // rising factorial s (s+1) ... (s+2j-2) / (2j)! * w^{-s-2j+1}
    let mut factor = s * w.powf(-s - 1.0) / 2.0;
    for (j, b) in BERNOULLI_EVEN.iter().enumerate() {
        let term = b * factor;
        sum += term;
        if term.abs() < 1e-18 * sum.abs() {
            break;
        }
        let jj = (j + 1) as f64;
        // advance from order 2j to 2j+2
        factor *= (s + 2.0 * jj - 1.0) * (s + 2.0 * jj) / ((2.0 * jj + 1.0) * (2.0 * jj + 2.0) * w * w);
    }
    sum
}

/// Riemann zeta for any real `s != 1`.
pub fn riemann_zeta(s: f64) -> f64 {
    if s == 1.0 {
        return f64::INFINITY;
    }
    if s == 0.0 {
        return -0.5;
    }
    if s > 0.0 {
        if s > 60.0 {
            return 1.0 + 2f64.powf(-s) + 3f64.powf(-s);
        }
        return hurwitz_zeta(s, 1.0);
    }
    // zeta(s) = 2^s pi^(s-1) sin(pi s / 2) Gamma(1-s) zeta(1-s)
    let half = s / 2.0;
    if half == half.round() {
        return 0.0;
    }
    let sin = (FRAC_PI_2 * s).sin();
    let log_mag = s * 2f64.ln() + (s - 1.0) * PI.ln() + ln_gamma(1.0 - s);
    sin * log_mag.exp() * riemann_zeta(1.0 - s)
}

fn is_integer(a: f64) -> bool {
    (a - a.round()).abs() < 1e-12
}

/// Upper incomplete gamma `Gamma(a, z) = int_z^inf t^{a-1} e^{-t} dt` for real `a`
/// and `z > 0` (not regularized).
pub fn upper_incomplete_gamma(a: f64, z: f64) -> f64 {
    assert!(z > 0.0, "upper_incomplete_gamma requires z > 0");
    if z > 2.0 && z > a - 1.0 {
        return upper_gamma_continued_fraction(a, z);
    }
    if a > 0.0 {
        return upper_gamma_small_z_positive(a, z);
    }
    // a <= 0: walk down from an order in (0, 1), or from E_1 for integer orders.
    if is_integer(a) {
        let target = a.round() as i64;
        let mut value = exponential_integral_e1(z);
        let mut order = 0i64;
        while order > target {
            let next = (order - 1) as f64;
            value = (value - z.powf(next) * (-z).exp()) / next;
            order -= 1;
        }
        return value;
    }
    let steps = (-a).ceil();
    let mut order = a + steps;
    let mut value = upper_gamma_small_z_positive(order, z);
    for _ in 0..steps as usize {
        let next = order - 1.0;
        value = (value - z.powf(next) * (-z).exp()) / next;
        order = next;
    }
    value
}

fn upper_gamma_small_z_positive(a: f64, z: f64) -> f64 {
    // Gamma(a) - gamma(a, z), series for the lower function.
    let mut term = 1.0 / a;
    let mut sum = term;
    let mut k = 1.0;
    while k < 500.0 {
        term *= z / (a + k);
        sum += term;
        if term.abs() < 1e-17 * sum.abs() {
            break;
        }
        k += 1.0;
    }
    let lower = sum * (a * z.ln() - z).exp();
    gamma(a) - lower
}

fn upper_gamma_continued_fraction(a: f64, z: f64) -> f64 {
    // modified Lentz on the Legendre continued fraction
    let tiny = 1e-300;
    let mut b = z + 1.0 - a;
    let mut c = 1.0 / tiny;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..1000 {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < tiny {
            d = tiny;
        }
        c = b + an / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    (a * z.ln() - z).exp() * h
}

/// `E_1(z) = Gamma(0, z)` for `z > 0`.
pub fn exponential_integral_e1(z: f64) -> f64 {
    if z > 2.0 {
        return upper_gamma_continued_fraction(0.0, z);
    }
    let mut sum = 0.0;
    let mut term = 1.0;
    for k in 1..200 {
        let kf = k as f64;
        term *= -z / kf;
        let contrib = -term / kf;
        sum += contrib;
        if contrib.abs() < 1e-18 {
            break;
        }
    }
    -EULER_GAMMA - z.ln() + sum
}

/// Precomputed data for evaluating `Li_s(e^{i theta})` at a fixed real order `s`.
///
/// Uses the expansion around `mu = i theta`:
/// `Li_s(e^mu) = Gamma(1-s) (-mu)^{s-1} + sum_k zeta(s-k) mu^k / k!`
/// (with the logarithmic form at positive integer `s`), which converges for
/// `|theta| < 2 pi`; arguments are reduced to `(-pi, pi]`.
#[derive(Debug, Clone)]
pub struct PolylogTable {
    order: f64,
    integer_order: Option<i64>,
    gamma_one_minus: f64,
    /// zeta(s - k) / k!
    series: Vec<f64>,
    /// H_{n-1} / (n-1)! for integer order n >= 1
    harmonic: f64,
}

const POLYLOG_TERMS: usize = 90;

impl PolylogTable {
    pub fn new(order: f64) -> Self {
        let integer_order = if is_integer(order) { Some(order.round() as i64) } else { None };
        let mut series = Vec::with_capacity(POLYLOG_TERMS);
        let mut factorial = 1.0;
        for k in 0..POLYLOG_TERMS {
            if k > 0 {
                factorial *= k as f64;
            }
            let arg = order - k as f64;
            let value = match integer_order {
                Some(n) if n - k as i64 == 1 => 0.0,
                _ => riemann_zeta(arg) / factorial,
            };
            series.push(value);
        }
        let (gamma_one_minus, harmonic) = match integer_order {
            Some(n) if n >= 1 => {
                let h: f64 = (1..n).map(|i| 1.0 / i as f64).sum();
                let fact: f64 = (1..n).map(|i| i as f64).product();
                (0.0, h / fact)
            }
            _ => (gamma(1.0 - order), 0.0),
        };
        Self { order, integer_order, gamma_one_minus, series, harmonic }
    }

    pub fn order(&self) -> f64 {
        self.order
    }

    /// `Li_s(e^{i theta})`. `theta` must not be a multiple of `2 pi` unless `s > 1`.
    pub fn eval(&self, theta: f64) -> Complex64 {
        let t = reduce_angle(theta);
        if t == 0.0 {
            assert!(self.order > 1.0, "polylog diverges at 1 for order <= 1");
            return Complex64::new(riemann_zeta(self.order), 0.0);
        }
        let mu = Complex64::new(0.0, t);
        let mut acc = Complex64::new(0.0, 0.0);
        let mut power = Complex64::new(1.0, 0.0);
        let mut small_run = 0;
        for (k, coeff) in self.series.iter().enumerate() {
            let term = power * *coeff;
            acc += term;
            // zeta vanishes at negative even integers, so require consecutive small terms
            if k > 8 && term.norm() < 1e-18 * acc.norm().max(1e-300) {
                small_run += 1;
                if small_run >= 3 {
                    break;
                }
            } else {
                small_run = 0;
            }
            power *= mu;
        }
        // ln(-mu) with -mu = -i t
        let log_neg_mu = Complex64::new(t.abs().ln(), -FRAC_PI_2 * t.signum());
        match self.integer_order {
            Some(n) if n >= 1 => {
                let mu_pow = mu.powi((n - 1) as i32);
                let fact: f64 = (1..n).map(|i| i as f64).product();
                acc += mu_pow * (Complex64::new(self.harmonic, 0.0) - log_neg_mu / fact);
                acc
            }
            _ => acc + (log_neg_mu * (self.order - 1.0)).exp() * self.gamma_one_minus,
        }
    }
}

/// Reduce an angle to `(-pi, pi]`.
pub fn reduce_angle(theta: f64) -> f64 {
    let two_pi = 2.0 * PI;
    let mut t = theta.rem_euclid(two_pi);
    if t > PI {
        t -= two_pi;
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;
    use statrs::function::gamma::gamma_ui;

    #[test]
    fn zeta_known_values() {
        assert!((riemann_zeta(2.0) - PI * PI / 6.0).abs() < 1e-14);
        assert!((riemann_zeta(4.0) - PI.powi(4) / 90.0).abs() < 1e-14);
        assert!((riemann_zeta(6.0) - PI.powi(6) / 945.0).abs() < 1e-14);
        assert!((riemann_zeta(-1.0) + 1.0 / 12.0).abs() < 1e-14);
        assert!((riemann_zeta(-3.0) - 1.0 / 120.0).abs() < 1e-14);
        assert_eq!(riemann_zeta(-2.0), 0.0);
        assert!((riemann_zeta(0.5) + 1.460_354_508_809_586_8).abs() < 1e-12);
        assert!((riemann_zeta(1.5) - 2.612_375_348_685_488).abs() < 1e-12);
    }

    #[test]
    fn hurwitz_quarter_shifts() {
        // zeta(2,1/4) + zeta(2,3/4) = 16 * sum over odd m of m^-2 = 2 pi^2
        let v = hurwitz_zeta(2.0, 0.25) + hurwitz_zeta(2.0, 0.75);
        assert!((v - 2.0 * PI * PI).abs() < 1e-12);
        assert!((hurwitz_zeta(3.0, 0.5) - 7.0 * riemann_zeta(3.0)).abs() < 1e-12);
    }

    #[test]
    fn incomplete_gamma_positive_orders_match_statrs() {
        for &a in &[0.25, 0.5, 1.0, 1.25, 1.5, 2.0, 3.5] {
            for &z in &[1e-3, 0.1, 0.7, 1.9, 2.1, 5.0, 20.0] {
                let ours = upper_incomplete_gamma(a, z);
                let reference = gamma_ui(a, z);
                assert!(
                    (ours - reference).abs() <= 1e-12 * reference.abs().max(1e-300) + 1e-300,
                    "a={a} z={z} ours={ours} statrs={reference}"
                );
            }
        }
    }

    fn quadrature_upper_gamma(a: f64, z: f64) -> f64 {
        // substitute t = z + u / (1 - u), u in [0, 1)
        let n = 200_000;
        let h = 1.0 / n as f64;
        let f = |u: f64| {
            if u >= 1.0 {
                return 0.0;
            }
            let t = z + u / (1.0 - u);
            t.powf(a - 1.0) * (-t).exp() / ((1.0 - u) * (1.0 - u))
        };
        let mut s = f(0.0) + f(1.0 - 1e-15);
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            s += w * f(i as f64 * h);
        }
        s * h / 3.0
    }

    #[test]
    fn incomplete_gamma_negative_orders_match_quadrature() {
        for &a in &[-0.25, -0.5, -1.0, -1.5, -2.0, 0.0] {
            for &z in &[0.05, 0.3, 1.0, 1.9, 2.5, 6.0] {
                let ours = upper_incomplete_gamma(a, z);
                let reference = quadrature_upper_gamma(a, z);
                assert!(
                    (ours - reference).abs() <= 1e-8 * reference.abs(),
                    "a={a} z={z} ours={ours} quad={reference}"
                );
            }
        }
    }

    #[test]
    fn e1_reference() {
        assert!((exponential_integral_e1(1.0) - 0.219_383_934_395_520_3).abs() < 1e-14);
        assert!((exponential_integral_e1(0.1) - 1.822_923_958_419_390_7).abs() < 1e-13);
    }

    #[test]
    fn polylog_order_two_matches_bernoulli_polynomial() {
        let table = PolylogTable::new(2.0);
        for &x in &[0.3, 1.0, PI / 2.0, 2.5, PI, 4.0, 6.0] {
            let v = table.eval(x);
            let expected_re = PI * PI / 6.0 - PI * x / 2.0 + x * x / 4.0;
            assert!((v.re - expected_re).abs() < 1e-13, "x={x}: {} vs {}", v.re, expected_re);
        }
    }

    #[test]
    fn polylog_order_one_is_log() {
        let table = PolylogTable::new(1.0);
        for &x in &[0.4, 2.0, -1.3] {
            let expected = -(Complex64::new(1.0, 0.0) - Complex64::from_polar(1.0, x)).ln();
            let v = table.eval(x);
            assert!((v - expected).norm() < 1e-13, "x={x} {v} {expected}");
        }
    }

    #[test]
    fn polylog_fractional_order_matches_direct_sum() {
        // order 4.5 converges fast enough for a direct check
        let table = PolylogTable::new(4.5);
        for &x in &[0.2, 1.7, -2.9] {
            let mut direct = Complex64::new(0.0, 0.0);
            for m in 1..200_000 {
                let mf = m as f64;
                direct += Complex64::from_polar(mf.powf(-4.5), mf * x);
            }
            assert!((table.eval(x) - direct).norm() < 1e-11);
        }
        // order 0.5 via Abel-summed closed relation Li_s(e^{ix}) + Li_s(e^{-ix}) real part check
        let half = PolylogTable::new(0.5);
        let v = half.eval(PI);
        // Li_s(-1) = -(1 - 2^{1-s}) zeta(s)
        let expected = -(1.0 - 2f64.powf(0.5)) * riemann_zeta(0.5);
        assert!((v.re - expected).abs() < 1e-12 && v.im.abs() < 1e-12);
    }
}
