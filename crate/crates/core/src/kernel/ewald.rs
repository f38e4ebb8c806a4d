//! Ewald splitting for Euclidean power-law lattice sums.
//!
//! Evaluates
//!
//! ```text
//! S(x) = sum_{v in s + H Z^d, v != 0} |v|_2^{-gamma} e^{i v.x}
//! ```
//!
//! for a diagonal lattice `H = diag(h)` and an integer shift `s`. Writing
//! `|v|^{-gamma}` as a Mellin integral of Gaussians and splitting at `alpha`
//! gives a frequency-space part with incomplete-gamma weights and, after
//! Poisson summation, a space-side part over `x - 2 pi k / h`. Both halves
//! decay like Gaussians, so a handful of shells reach machine precision.

use crate::kernel::shells::for_each_in_ranges;
use crate::special::upper_incomplete_gamma;
use num_complex::Complex64;
use statrs::function::gamma::gamma;
use std::f64::consts::PI;

const EXTRA_SHELLS: i64 = 40;
const MAX_RADIUS: i64 = 64;

#[derive(Debug, Clone)]
pub struct EwaldPlan {
    dim: usize,
    gamma: f64,
    beta: f64,
    h: Vec<i64>,
    alpha: f64,
    /// 1 / Gamma(gamma / 2)
    inv_gamma_half: f64,
    /// pi^{d/2} / (prod h) / Gamma(gamma / 2)
    space_prefactor: f64,
    /// alpha^beta / beta, the space-side integral at r = 0
    g_zero: f64,
    /// alpha^{gamma/2} / (gamma/2) / Gamma(gamma/2), removed when the origin is in the lattice
    origin_term: f64,
    freq_radius: i64,
    space_radius: i64,
    error_bound: f64,
}

impl EwaldPlan {
    /// Plan for lattice `h` whose truncation error is below `tol` for every shift and `x`.
    pub fn new(gamma_exp: f64, h: &[i64], tol: f64) -> Self {
        let dim = h.len();
        assert!(gamma_exp > dim as f64);
        assert!(h.iter().all(|&v| v > 0));
        let hf: Vec<f64> = h.iter().map(|&v| v as f64).collect();
        let mean_sq = hf.iter().map(|v| v.ln()).sum::<f64>() * 2.0 / dim as f64;
        let alpha = PI / mean_sq.exp();
        let beta = (gamma_exp - dim as f64) / 2.0;
        let inv_gamma_half = 1.0 / gamma(gamma_exp / 2.0);
        let volume: f64 = hf.iter().product();
        let space_prefactor = PI.powf(dim as f64 / 2.0) / volume * inv_gamma_half;
        let g_zero = alpha.powf(beta) / beta;
        let origin_term = alpha.powf(gamma_exp / 2.0) / (gamma_exp / 2.0) * inv_gamma_half;

        let mut plan = Self {
            dim,
            gamma: gamma_exp,
            beta,
            h: h.to_vec(),
            alpha,
            inv_gamma_half,
            space_prefactor,
            g_zero,
            origin_term,
            freq_radius: 1,
            space_radius: 1,
            error_bound: f64::INFINITY,
        };
        let h_min = hf.iter().cloned().fold(f64::INFINITY, f64::min);
        let h_max = hf.iter().cloned().fold(0.0, f64::max);
        let mut freq_radius = 1;
        while freq_radius < MAX_RADIUS && plan.freq_shell_bound(freq_radius, h_min) > tol / 2.0 {
            freq_radius += 1;
        }
        let mut space_radius = 1;
        while space_radius < MAX_RADIUS && plan.space_shell_bound(space_radius, h_max) > tol / 2.0 {
            space_radius += 1;
        }
        plan.freq_radius = freq_radius;
        plan.space_radius = space_radius;
        plan.error_bound = plan.freq_shell_bound(freq_radius, h_min) + plan.space_shell_bound(space_radius, h_max);
        plan
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn lattice(&self) -> &[i64] {
        &self.h
    }

    /// Certified bound on the truncation error of [`EwaldPlan::sum`].
    pub fn error_bound(&self) -> f64 {
        self.error_bound
    }

    fn shell_count(&self, m: i64) -> f64 {
        let d = self.dim as i32;
        ((2 * m + 1) as f64).powi(d) - ((2 * m - 1) as f64).powi(d)
    }

    fn freq_weight(&self, norm: f64) -> f64 {
        upper_incomplete_gamma(self.gamma / 2.0, self.alpha * norm * norm) * norm.powf(-self.gamma) * self.inv_gamma_half
    }

    fn space_integral(&self, r: f64) -> f64 {
        if r < 1e-150 {
            return self.g_zero;
        }
        let z = r * r / (4.0 * self.alpha);
        (r * r / 4.0).powf(self.beta) * upper_incomplete_gamma(-self.beta, z)
    }

    /// Bound on the frequency-side terms outside the box of radius `radius`.
    fn freq_shell_bound(&self, radius: i64, h_min: f64) -> f64 {
        let mut total = 0.0;
        for m in radius + 1..=radius + EXTRA_SHELLS {
            let r = h_min * (m as f64 - 0.5);
            total += self.shell_count(m) * self.freq_weight(r);
        }
        total * 1.01
    }

    fn space_shell_bound(&self, radius: i64, h_max: f64) -> f64 {
        let mut total = 0.0;
        for m in radius + 1..=radius + EXTRA_SHELLS {
            let r = 2.0 * PI / h_max * (m as f64 - 0.5);
            total += self.shell_count(m) * self.space_integral(r);
        }
        total * self.space_prefactor * 1.01
    }

    /// The lattice sum at `x` for the integer `shift`.
    pub fn sum(&self, shift: &[i64], x: &[f64]) -> Complex64 {
        assert_eq!(shift.len(), self.dim);
        assert_eq!(x.len(), self.dim);
        let d = self.dim;

        // frequency side, centred on the lattice point nearest the origin
        let center: Vec<i64> = (0..d)
            .map(|i| (-(shift[i] as f64) / self.h[i] as f64).round() as i64)
            .collect();
        let lo: Vec<i64> = center.iter().map(|c| c - self.freq_radius).collect();
        let hi: Vec<i64> = center.iter().map(|c| c + self.freq_radius).collect();
        let mut freq = Complex64::new(0.0, 0.0);
        let mut v = vec![0i64; d];
        for_each_in_ranges(&lo, &hi, |p| {
            let mut sq = 0i64;
            for i in 0..d {
                v[i] = shift[i] + self.h[i] * p[i];
                sq += v[i] * v[i];
            }
            if sq == 0 {
                return;
            }
            let norm = (sq as f64).sqrt();
            let phase: f64 = v.iter().zip(x).map(|(&c, &xi)| c as f64 * xi).sum();
            freq += Complex64::from_polar(self.freq_weight(norm), phase);
        });

        // space side, centred on the image of x nearest the origin
        let center: Vec<i64> = (0..d)
            .map(|i| (x[i] * self.h[i] as f64 / (2.0 * PI)).round() as i64)
            .collect();
        let lo: Vec<i64> = center.iter().map(|c| c - self.space_radius).collect();
        let hi: Vec<i64> = center.iter().map(|c| c + self.space_radius).collect();
        let mut space = Complex64::new(0.0, 0.0);
        for_each_in_ranges(&lo, &hi, |k| {
            let mut r_sq = 0.0;
            let mut turns = 0.0;
            for i in 0..d {
                let delta = x[i] - 2.0 * PI * k[i] as f64 / self.h[i] as f64;
                r_sq += delta * delta;
                turns += (k[i] * shift[i]).rem_euclid(self.h[i]) as f64 / self.h[i] as f64;
            }
            let weight = self.space_integral(r_sq.sqrt());
            space += Complex64::from_polar(weight, 2.0 * PI * turns.fract());
        });
        let mut total = freq + space * self.space_prefactor;
        let origin_in_lattice = shift.iter().zip(&self.h).all(|(s, h)| s.rem_euclid(*h) == 0);
        if origin_in_lattice {
            total -= self.origin_term;
        }
        total
    }
}
