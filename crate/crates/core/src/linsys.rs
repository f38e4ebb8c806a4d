//! Dense interpolation system, an independent check on the fundamental-spline construction.

use crate::error::{invalid, Result, SkError};
use crate::kernel::Kernel;
use crate::lattice::{GridSpec, MultiIndex};
use crate::spline::SplineCoefficients;
use nalgebra::{DMatrix, DVector};

pub const MAX_DENSE_KNOTS: usize = 4096;

/// Smallest acceptable ratio of extreme pivots before the system counts as singular.
const PIVOT_RATIO_FLOOR: f64 = 1e-14;

/// Solves `[K 1; 1^T 0] [c_k; c] = [f; 0]` with `K_{ik} = K(x_i - x_k)`.
pub fn solve_linear_system(kernel: &Kernel, grid: &GridSpec, samples: &[f64]) -> Result<SplineCoefficients> {
    let n = grid.len();
    if n > MAX_DENSE_KNOTS {
        return invalid(format!("{n} knots exceed the dense-solver limit of {MAX_DENSE_KNOTS}"));
    }
    if samples.len() != n {
        return invalid(format!("expected {n} samples, got {}", samples.len()));
    }
    if grid.dim() != kernel.dim() {
        return invalid("grid and kernel dimensions differ");
    }
    // K(x_i - x_k) depends only on the residue of i - k
    let values = kernel.knot_translates(grid, &vec![0.0; grid.dim()]);
    let indices = grid.enumerate_omega();
    let mut matrix = DMatrix::<f64>::zeros(n + 1, n + 1);
    for i in 0..n {
        for k in 0..n {
            let diff = MultiIndex::new(
                indices[k].entries().iter().zip(indices[i].entries()).map(|(a, b)| a - b).collect(),
            );
            matrix[(i, k)] = values[grid.residue_index(&diff)];
        }
        matrix[(i, n)] = 1.0;
        matrix[(n, i)] = 1.0;
    }
    let mut rhs = DVector::<f64>::zeros(n + 1);
    for (i, &f) in samples.iter().enumerate() {
        rhs[i] = f;
    }

    let lu = matrix.lu();
    let u = lu.u();
    let diag: Vec<f64> = (0..=n).map(|i| u[(i, i)].abs()).collect();
    let max = diag.iter().cloned().fold(0.0, f64::max);
    let min = diag.iter().cloned().fold(f64::INFINITY, f64::min);
    let pivot_ratio = if max > 0.0 { min / max } else { 0.0 };
    if !(pivot_ratio > PIVOT_RATIO_FLOOR) {
        return Err(SkError::NumericalRank { pivot_ratio });
    }
    let solution = lu.solve(&rhs).ok_or(SkError::NumericalRank { pivot_ratio })?;
    Ok(SplineCoefficients { constant: solution[n], knot_coeffs: solution.iter().take(n).cloned().collect() })
}
