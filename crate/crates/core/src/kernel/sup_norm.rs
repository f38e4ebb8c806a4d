//! Closed-form evaluation of the power-law kernel under the sup norm.
//!
//! The shell `|l|_inf = m` contributes `P_m - P_{m-1}` with `P_m` a product of
//! Dirichlet kernels, so the kernel collapses into finitely many polylogarithms
//! `Li_{gamma-k}(e^{i theta})` over the sign patterns `theta = eps . x`.

use crate::special::{reduce_angle, riemann_zeta, PolylogTable};
use num_complex::Complex64;

const SNAP: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct SupNormKernel {
    dim: usize,
    gamma: f64,
    /// tables[k] holds Li_{gamma - k}
    tables: Vec<PolylogTable>,
}

impl SupNormKernel {
    pub fn new(dim: usize, gamma: f64) -> Self {
        assert!(gamma > dim as f64);
        let tables = (0..=dim).map(|k| PolylogTable::new(gamma - k as f64)).collect();
        Self { dim, gamma, tables }
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        assert_eq!(x.len(), self.dim);
        let mut active = Vec::with_capacity(self.dim);
        for &xi in x {
            let t = reduce_angle(xi);
            if t.abs() >= SNAP {
                active.push(t);
            }
        }
        let zeros = self.dim - active.len();
        let d_active = active.len();

        let sin_prod: f64 = active.iter().map(|t| (t / 2.0).sin()).product();
        let prefactor = Complex64::new(0.0, 2.0).powi(-(d_active as i32)) / sin_prod;

        let binom: Vec<f64> = (0..=zeros).map(|k| binomial(zeros, k)).collect();
        let mut total = Complex64::new(0.0, 0.0);
        for mask in 0..(1usize << d_active) {
            let mut theta = 0.0;
            let mut sign = 1.0;
            for (i, t) in active.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    theta -= t;
                    sign = -sign;
                } else {
                    theta += t;
                }
            }
            let half = Complex64::from_polar(1.0, theta / 2.0);
            let at_origin = reduce_angle(theta).abs() < SNAP;
            let mut inner = Complex64::new(0.0, 0.0);
            for k in 0..=zeros {
                let parity = if (zeros - k) % 2 == 0 { 1.0 } else { -1.0 };
                let weight = binom[k] * 2f64.powi(k as i32);
                if at_origin {
                    // the bracket vanishes unless zeros - k is odd
                    if parity < 0.0 {
                        let bracket = 2.0 * half.re;
                        inner += weight * bracket * riemann_zeta(self.gamma - k as f64);
                    }
                } else {
                    let bracket = half - parity * half.conj();
                    inner += weight * bracket * self.tables[k].eval(theta);
                }
            }
            total += sign * inner;
        }
        (prefactor * total).re
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::shells::direct_lattice_sum;
    use crate::kernel::Norm;
    use std::f64::consts::PI;

    #[test]
    fn one_dimensional_reduces_to_euclidean() {
        let k = SupNormKernel::new(1, 2.0);
        assert!((k.eval(&[0.0]) - PI * PI / 3.0).abs() < 1e-12);
        assert!((k.eval(&[PI]) + PI * PI / 6.0).abs() < 1e-12);
        assert!((k.eval(&[PI / 2.0]) + PI * PI / 24.0).abs() < 1e-12);
    }

    #[test]
    fn matches_direct_sum_in_two_and_three_dimensions() {
        // exponents large enough that the truncated direct sum is accurate to ~1e-11
        for (d, gamma) in [(2usize, 7.0), (3, 10.5)] {
            let kernel = SupNormKernel::new(d, gamma);
            let law = move |t: f64| t.powf(-gamma);
            let radius = if d == 2 { 200.0 } else { 40.0 };
            let points: Vec<Vec<f64>> = match d {
                2 => vec![vec![0.0, 0.0], vec![0.3, 1.1], vec![0.0, 2.0], vec![0.7, 0.7], vec![PI, -0.4]],
                _ => vec![vec![0.0, 0.0, 0.0], vec![0.3, 1.1, 2.5], vec![0.0, 0.0, 1.0], vec![0.5, 0.0, -0.5]],
            };
            for x in points {
                let ones = vec![1i64; d];
                let zeros = vec![0i64; d];
                let direct = direct_lattice_sum(&law, Norm::Linf, &ones, &zeros, &x, radius).re;
                let closed = kernel.eval(&x);
                assert!((closed - direct).abs() < 1e-9, "d={d} x={x:?}: {closed} vs {direct}");
            }
        }
    }

    #[test]
    fn low_exponent_at_origin() {
        // the shell |l|_inf = m holds 8m points, so K(0) = 8 zeta(gamma - 1)
        let kernel = SupNormKernel::new(2, 2.5);
        let closed = kernel.eval(&[0.0, 0.0]);
        let expected = 8.0 * riemann_zeta(1.5);
        assert!((closed - expected).abs() < 1e-11);
    }
}
