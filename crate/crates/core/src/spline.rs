//! Fundamental sk-splines on the knot lattice and the interpolants built from them.
//!
//! An sk-spline is `c + sum_k c_k K(x - x_k)` with `sum_k c_k = 0`. The
//! fundamental spline has `c = 1/N` and
//! `c_k = (2/N^2) sum_{j in Omega*} cos(j.x_k) / rho_j(0)`, and it is the
//! Kronecker delta on the knots.

use crate::error::{invalid, Result, SkError};
use crate::fft::{cyclic_convolve, fft_nd};
use crate::fourier::FourierRep;
use crate::kernel::shells::for_each_in_ranges;
use crate::kernel::Kernel;
use crate::lattice::{GridSpec, MultiIndex, TorusPoint};
use num_complex::Complex64;
use rustfft::FftDirection;
use serde::{Deserialize, Serialize};
use std::sync::{Arc, OnceLock};

/// Most terms the stored Fourier representation may hold.
const MAX_FOURIER_TERMS: f64 = 131_072.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplineCoefficients {
    pub constant: f64,
    pub knot_coeffs: Vec<f64>,
}

impl SplineCoefficients {
    pub fn knot_sum(&self) -> f64 {
        self.knot_coeffs.iter().sum()
    }

    /// `c + sum_k c_k K(x - x_k)`.
    pub fn eval(&self, kernel: &Kernel, grid: &GridSpec, x: &[f64]) -> f64 {
        let translates = kernel.knot_translates(grid, x);
        self.constant + self.knot_coeffs.iter().zip(&translates).map(|(c, k)| c * k).sum::<f64>()
    }
}

#[derive(Debug)]
pub struct FundamentalSpline {
    grid: GridSpec,
    kernel: Kernel,
    tol: f64,
    /// `rho_j(0)` over `Omega_n`; entry 0 is `rho_0(0)`
    rho0: Vec<f64>,
    coeffs: SplineCoefficients,
    fourier: OnceLock<FourierRep>,
}

/// Builds the fundamental spline, failing when some `rho_j(0) <= tol`.
pub fn build_fundamental(kernel: &Kernel, grid: &GridSpec, tol: f64) -> Result<FundamentalSpline> {
    if !(tol > 0.0) || !tol.is_finite() {
        return invalid(format!("tolerance must be positive and finite, got {tol}"));
    }
    if grid.dim() != kernel.dim() {
        return invalid("grid and kernel dimensions differ");
    }
    let n = grid.len();
    let origin = vec![0.0; grid.dim()];
    let rho0: Vec<f64> = kernel.phi_all(grid, &origin).iter().map(|phi| 2.0 * phi.re).collect();
    for (i, &r) in rho0.iter().enumerate().skip(1) {
        if !(r > tol) {
            return Err(SkError::SingularKernel { index: grid.index_at(i).entries().to_vec(), value: r });
        }
    }

    let mut data: Vec<Complex64> = rho0
        .iter()
        .enumerate()
        .map(|(i, &r)| if i == 0 { Complex64::new(0.0, 0.0) } else { Complex64::new(1.0 / r, 0.0) })
        .collect();
    fft_nd(&mut data, &grid_dims(grid), FftDirection::Inverse);
    let scale = 2.0 / (n * n) as f64;
    let knot_coeffs = data.iter().map(|v| v.re * scale).collect();
    let coeffs = SplineCoefficients { constant: 1.0 / n as f64, knot_coeffs };

    Ok(FundamentalSpline { grid: grid.clone(), kernel: kernel.clone(), tol, rho0, coeffs, fourier: OnceLock::new() })
}

fn grid_dims(grid: &GridSpec) -> Vec<usize> {
    grid.periods().iter().map(|&p| p as usize).collect()
}

impl FundamentalSpline {
    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn kernel(&self) -> &Kernel {
        &self.kernel
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn rho0(&self) -> &[f64] {
        &self.rho0
    }

    pub fn coeffs(&self) -> &SplineCoefficients {
        &self.coeffs
    }

    /// Exact Fourier coefficient at `m`.
    pub fn fourier_coeff(&self, m: &MultiIndex) -> f64 {
        let n = self.grid.len() as f64;
        if self.grid.is_zero_mod(m) {
            return if m.is_zero() { 1.0 / n } else { 0.0 };
        }
        2.0 * self.kernel.coeff(m) / (n * self.rho0[self.grid.residue_index(m)])
    }

    /// The Fourier representation truncated to `|m|_inf <= radius`.
    pub fn fourier_truncated(&self, radius: i64) -> FourierRep {
        let d = self.grid.dim();
        let mut rep = FourierRep::new(d);
        for_each_in_ranges(&vec![-radius; d], &vec![radius; d], |m| {
            let m = MultiIndex::new(m.to_vec());
            let c = self.fourier_coeff(&m);
            if c != 0.0 {
                rep.add(m, Complex64::new(c, 0.0));
            }
        });
        let rho_min = self.rho0.iter().skip(1).cloned().fold(f64::INFINITY, f64::min);
        let n = self.grid.len() as f64;
        rep.set_truncation_tail(2.0 / (n * rho_min) * self.kernel.spec().tail_bound(radius as f64));
        rep
    }

    /// Fourier representation with dropped mass below `tol` when a term budget allows it.
    pub fn fourier(&self) -> &FourierRep {
        self.fourier.get_or_init(|| {
            let d = self.grid.dim() as i32;
            let mut radius = 1i64;
            loop {
                let next = radius * 2;
                let fits = ((2 * next + 1) as f64).powi(d) <= MAX_FOURIER_TERMS;
                let rep_tail = self.fourier_truncated_tail(radius);
                if rep_tail < self.tol || !fits {
                    break;
                }
                radius = next;
            }
            self.fourier_truncated(radius)
        })
    }

    fn fourier_truncated_tail(&self, radius: i64) -> f64 {
        let rho_min = self.rho0.iter().skip(1).cloned().fold(f64::INFINITY, f64::min);
        2.0 / (self.grid.len() as f64 * rho_min) * self.kernel.spec().tail_bound(radius as f64)
    }

    /// `1/N + sum_k c_k K(x - x_k)`.
    pub fn eval(&self, x: &[f64]) -> f64 {
        self.coeffs.eval(&self.kernel, &self.grid, x)
    }

    pub fn eval_point(&self, x: &TorusPoint) -> f64 {
        self.eval(x.coords())
    }

    /// `1/N + (1/N) sum_{j in Omega*} rho_j(x) / rho_j(0)` with each `rho_j` summed over its own lattice.
    pub fn eval_direct(&self, x: &[f64]) -> Result<f64> {
        let plan = self.kernel.lattice_plan(&self.grid, self.tol.min(1e-12))?;
        let n = self.grid.len();
        let mut acc = 0.0;
        for i in 1..n {
            let (phi, _) = plan.phi(&self.grid.index_at(i), x);
            acc += 2.0 * phi.re / self.rho0[i];
        }
        Ok((1.0 + acc) / n as f64)
    }

    pub fn eval_fourier(&self, x: &[f64]) -> f64 {
        self.fourier().eval(x).re
    }

    /// `sk(x - x_k)` for every knot, sharing the kernel values `K(x - x_j)`.
    pub fn translates(&self, x: &[f64]) -> Vec<f64> {
        let k_values = self.kernel.knot_translates(&self.grid, x);
        let periods = self.grid.periods();
        let n = self.grid.len();
        let indices: Vec<MultiIndex> = self.grid.enumerate_omega();
        (0..n)
            .map(|k| {
                let mut acc = self.coeffs.constant;
                for (m, &c) in self.coeffs.knot_coeffs.iter().enumerate() {
                    // x - x_k - x_m = x - x_{k+m}
                    let mut idx = 0usize;
                    for axis in 0..periods.len() {
                        let v = (indices[k].entries()[axis] + indices[m].entries()[axis]).rem_euclid(periods[axis]);
                        idx = idx * periods[axis] as usize + v as usize;
                    }
                    acc += c * k_values[idx];
                }
                acc
            })
            .collect()
    }
}

/// `sk_n(f, x) = sum_k f(x_k) sk(x - x_k)`.
#[derive(Debug, Clone)]
pub struct Interpolant {
    fundamental: Arc<FundamentalSpline>,
    samples: Vec<f64>,
    coeffs: SplineCoefficients,
    /// `F(r) = sum_k f_k e^{-i r.x_k}`
    sample_dft: Vec<Complex64>,
}

pub fn interpolate(fs: &Arc<FundamentalSpline>, samples: &[f64]) -> Result<Interpolant> {
    let grid = fs.grid();
    let n = grid.len();
    if samples.len() != n {
        return invalid(format!("expected {n} samples, got {}", samples.len()));
    }
    if samples.iter().any(|v| !v.is_finite()) {
        return invalid("samples must be finite");
    }
    let dims = grid_dims(grid);
    let knot_coeffs = cyclic_convolve(samples, &fs.coeffs.knot_coeffs, &dims);
    let constant = samples.iter().sum::<f64>() / n as f64;
    let mut sample_dft: Vec<Complex64> = samples.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fft_nd(&mut sample_dft, &dims, FftDirection::Forward);
    Ok(Interpolant {
        fundamental: Arc::clone(fs),
        samples: samples.to_vec(),
        coeffs: SplineCoefficients { constant, knot_coeffs },
        sample_dft,
    })
}

impl Interpolant {
    pub fn fundamental(&self) -> &Arc<FundamentalSpline> {
        &self.fundamental
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    /// Coefficients of the interpolant in sk-spline form.
    pub fn coeffs(&self) -> &SplineCoefficients {
        &self.coeffs
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.coeffs.eval(self.fundamental.kernel(), self.fundamental.grid(), x)
    }

    pub fn eval_point(&self, x: &TorusPoint) -> f64 {
        self.eval(x.coords())
    }

    /// Sum of translates of the fundamental spline.
    pub fn eval_translate(&self, x: &[f64]) -> f64 {
        self.fundamental.translates(x).iter().zip(&self.samples).map(|(s, f)| s * f).sum()
    }

    /// `F(0)/N + sum_{r in Omega*} 2 F(r) Phi_r(x) / (N rho_r(0))`.
    pub fn eval_fourier(&self, x: &[f64]) -> f64 {
        let fs = &self.fundamental;
        let n = fs.grid().len() as f64;
        let phi = fs.kernel().phi_all(fs.grid(), x);
        let mut acc = self.sample_dft[0] / n;
        for r in 1..phi.len() {
            acc += 2.0 * self.sample_dft[r] * phi[r] / (n * fs.rho0()[r]);
        }
        acc.re
    }

    /// Values on the grid `2 pi i / M`, `M` per axis a multiple of `2 n_l`.
    pub fn eval_grid(&self, points_per_axis: &[usize]) -> Result<Vec<f64>> {
        let fs = &self.fundamental;
        let grid = fs.grid();
        let d = grid.dim();
        if points_per_axis.len() != d {
            return invalid("one grid size per axis is required");
        }
        for (axis, &m) in points_per_axis.iter().enumerate() {
            let p = grid.period(axis) as usize;
            if m == 0 || m % p != 0 {
                return invalid(format!("grid size {m} on axis {axis} is not a multiple of {p}"));
            }
        }
        let total: usize = points_per_axis.iter().product();
        let kernel_values = kernel_on_grid(fs.kernel(), points_per_axis);
        let mut spread = vec![0.0; total];
        for (l, &c) in self.coeffs.knot_coeffs.iter().enumerate() {
            let knot = grid.index_at(l);
            let mut idx = 0usize;
            for axis in 0..d {
                let step = points_per_axis[axis] / grid.period(axis) as usize;
                idx = idx * points_per_axis[axis] + knot.entries()[axis] as usize * step;
            }
            spread[idx] = c;
        }
        let mut values = cyclic_convolve(&kernel_values, &spread, points_per_axis);
        for v in &mut values {
            *v += self.coeffs.constant;
        }
        Ok(values)
    }
}

/// Grid point `i` (row-major) of the `M_1 x ... x M_d` grid.
pub fn grid_point(points_per_axis: &[usize], mut i: usize) -> Vec<f64> {
    let d = points_per_axis.len();
    let mut x = vec![0.0; d];
    for axis in (0..d).rev() {
        let m = points_per_axis[axis];
        x[axis] = 2.0 * std::f64::consts::PI * (i % m) as f64 / m as f64;
        i /= m;
    }
    x
}

/// `K` at every grid point.
pub fn kernel_on_grid(kernel: &Kernel, points_per_axis: &[usize]) -> Vec<f64> {
    use rayon::prelude::*;
    let total: usize = points_per_axis.iter().product();
    (0..total).into_par_iter().map(|i| kernel.eval(&grid_point(points_per_axis, i))).collect()
}

/// Interpolates real and imaginary parts of complex samples separately.
pub fn interpolate_complex(fs: &Arc<FundamentalSpline>, samples: &[Complex64]) -> Result<(Interpolant, Interpolant)> {
    let re: Vec<f64> = samples.iter().map(|c| c.re).collect();
    let im: Vec<f64> = samples.iter().map(|c| c.im).collect();
    Ok((interpolate(fs, &re)?, interpolate(fs, &im)?))
}
