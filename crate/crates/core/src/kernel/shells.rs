//! Shell counts and certified tail bounds for radial lattice sums.

use super::Norm;
use num_complex::Complex64;

/// Radius up to which shells are counted exhaustively.
pub const SHELL_COUNT_RADIUS: usize = 50;

/// Number of lattice points in `B_j = {l : j - 1 <= |l| < j}` for `j = 1..=radius`.
pub fn shell_counts(d: usize, norm: Norm, radius: usize) -> Vec<u64> {
    match norm {
        Norm::Linf => (1..=radius)
            .map(|j| {
                if j == 1 {
                    1
                } else {
                    let outer = (2 * j - 1) as u64;
                    let inner = (2 * j - 3) as u64;
                    outer.pow(d as u32) - inner.pow(d as u32)
                }
            })
            .collect(),
        Norm::L2 => {
            // r_d(m): representations of m as an ordered sum of d squares
            let max_sq = radius * radius;
            let mut reps = vec![0u64; max_sq];
            reps[0] = 1;
            for _ in 0..d {
                let mut next = vec![0u64; max_sq];
                for (m, &count) in reps.iter().enumerate() {
                    if count == 0 {
                        continue;
                    }
                    let mut v = 0usize;
                    while m + v * v < max_sq {
                        let mult = if v == 0 { 1 } else { 2 };
                        next[m + v * v] += count * mult;
                        v += 1;
                    }
                }
                reps = next;
            }
            (1..=radius)
                .map(|j| reps[(j - 1) * (j - 1)..j * j].iter().sum())
                .collect()
        }
    }
}

/// `C_d = max_j #B_j / j^{d-1}` over the exhaustively counted shells.
pub fn shell_constant(d: usize, norm: Norm) -> f64 {
    shell_counts(d, norm, SHELL_COUNT_RADIUS)
        .iter()
        .enumerate()
        .map(|(i, &c)| c as f64 / ((i + 1) as f64).powi(d as i32 - 1))
        .fold(0.0, f64::max)
}

/// Upper bound for `sum_{l in Z^d, |l| > radius} |l|^{-exponent}`, `exponent > d`.
///
/// Shell comparison `#B_j <= C_d j^{d-1}` followed by the integral test. The
/// bound actually covers every `l` with `|l| >= max(1, floor(radius))`.
pub fn power_tail_bound(d: usize, norm: Norm, exponent: f64, radius: f64) -> f64 {
    assert!(exponent > d as f64, "power tail diverges unless exponent > d");
    let m0 = radius.floor().max(1.0);
    let c_d = shell_constant(d, norm);
    let q = exponent - (d as f64 - 1.0);
    let sum = m0.powf(-q) + m0.powf(1.0 - q) / (q - 1.0);
    let correction = (1.0 + 1.0 / m0).powi(d as i32 - 1);
    c_d * correction * sum
}

/// Direct summation of `sum a(|v|) e^{i v.x}` over `v = shift + h p`, `0 < |v| <= radius`.
pub fn direct_lattice_sum(
    law: &dyn Fn(f64) -> f64,
    norm: Norm,
    h: &[i64],
    shift: &[i64],
    x: &[f64],
    radius: f64,
) -> Complex64 {
    let d = h.len();
    let r = radius.floor() as i64;
    let lo: Vec<i64> = (0..d).map(|i| (-r - shift[i]).div_euclid(h[i]) - 1).collect();
    let hi: Vec<i64> = (0..d).map(|i| (r - shift[i]).div_euclid(h[i]) + 1).collect();
    let radius_sq = radius * radius;
    let mut acc = Complex64::new(0.0, 0.0);
    let mut v = vec![0i64; d];
    for_each_in_ranges(&lo, &hi, |p| {
        for i in 0..d {
            v[i] = shift[i] + h[i] * p[i];
        }
        let norm_v = match norm {
            Norm::L2 => {
                let sq: i64 = v.iter().map(|c| c * c).sum();
                if sq == 0 || sq as f64 > radius_sq {
                    return;
                }
                (sq as f64).sqrt()
            }
            Norm::Linf => {
                let m = v.iter().map(|c| c.abs()).max().unwrap_or(0);
                if m == 0 || m as f64 > radius {
                    return;
                }
                m as f64
            }
        };
        let phase: f64 = v.iter().zip(x).map(|(&c, &xi)| c as f64 * xi).sum();
        acc += Complex64::from_polar(law(norm_v), phase);
    });
    acc
}

/// Iterates `lo <= p <= hi` componentwise, last axis fastest.
pub(crate) fn for_each_in_ranges(lo: &[i64], hi: &[i64], mut f: impl FnMut(&[i64])) {
    let d = lo.len();
    if lo.iter().zip(hi).any(|(a, b)| a > b) {
        return;
    }
    let mut cur = lo.to_vec();
    loop {
        f(&cur);
        let mut axis = d;
        loop {
            if axis == 0 {
                return;
            }
            axis -= 1;
            if cur[axis] < hi[axis] {
                cur[axis] += 1;
                cur[axis + 1..d].copy_from_slice(&lo[axis + 1..d]);
                break;
            }
        }
    }
}
