//! Multidimensional FFT on row-major buffers (last axis fastest).

use num_complex::Complex64;
use rustfft::{FftDirection, FftPlanner};

/// In-place unnormalized transform. `Forward` uses `e^{-2 pi i jk/M}`.
pub fn fft_nd(data: &mut [Complex64], dims: &[usize], direction: FftDirection) {
    let total: usize = dims.iter().product();
    assert_eq!(data.len(), total);
    let mut planner = FftPlanner::new();
    let mut stride = 1;
    let mut line = Vec::new();
    for &len in dims.iter().rev() {
        if len > 1 {
            let fft = planner.plan_fft(len, direction);
            line.resize(len, Complex64::new(0.0, 0.0));
            let block = len * stride;
            for outer in (0..total).step_by(block) {
                for inner in 0..stride {
                    let base = outer + inner;
                    for (i, slot) in line.iter_mut().enumerate() {
                        *slot = data[base + i * stride];
                    }
                    fft.process(&mut line);
                    for (i, v) in line.iter().enumerate() {
                        data[base + i * stride] = *v;
                    }
                }
            }
        }
        stride *= len;
    }
}

/// Cyclic convolution of two real arrays on the same grid.
pub fn cyclic_convolve(a: &[f64], b: &[f64], dims: &[usize]) -> Vec<f64> {
    let total: usize = dims.iter().product();
    let mut fa: Vec<Complex64> = a.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    let mut fb: Vec<Complex64> = b.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fft_nd(&mut fa, dims, FftDirection::Forward);
    fft_nd(&mut fb, dims, FftDirection::Forward);
    for (x, y) in fa.iter_mut().zip(&fb) {
        *x *= y;
    }
    fft_nd(&mut fa, dims, FftDirection::Inverse);
    fa.iter().map(|v| v.re / total as f64).collect()
}
