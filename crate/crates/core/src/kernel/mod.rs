//! Radial Fourier kernels `K(x) = sum_l a(|l|) e^{i l.x}` and their lattice sums.
//!
//! For a grid with degrees `n` the basic object is
//! `Phi_j(x) = sum_{m == j mod 2n} a_m e^{i m.x}`, from which
//! `rho_j = 2 Re Phi_j`, `sigma_j = 2 Im Phi_j` and `lambda_j = N Phi_j`.

mod ewald;
pub mod shells;
mod sup_norm;

pub use ewald::EwaldPlan;
pub use shells::{power_tail_bound, shell_constant, shell_counts};
pub use sup_norm::SupNormKernel;

use crate::error::{invalid, Result, SkError};
use crate::fft::fft_nd;
use crate::lattice::{GridSpec, MultiIndex, TorusPoint};
use num_complex::Complex64;
use rustfft::FftDirection;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::sync::Arc;

pub const DEFAULT_TAIL_TOL: f64 = 1e-10;

/// Accuracy targeted by the closed-form evaluators.
const CLOSED_FORM_TOL: f64 = 1e-14;

/// Largest box of lattice points a direct truncated sum may visit.
const MAX_DIRECT_POINTS: f64 = 2e8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Norm {
    L2,
    Linf,
}

impl Norm {
    pub fn of(self, l: &[i64]) -> f64 {
        match self {
            Norm::L2 => (l.iter().map(|v| v * v).sum::<i64>() as f64).sqrt(),
            Norm::Linf => l.iter().map(|v| v.abs()).max().unwrap_or(0) as f64,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Norm::L2 => "l2",
            Norm::Linf => "linf",
        }
    }
}

impl fmt::Display for Norm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Norm {
    type Err = SkError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "l2" | "2" => Ok(Norm::L2),
            "linf" | "inf" => Ok(Norm::Linf),
            other => invalid(format!("unknown norm '{other}', expected l2 or linf")),
        }
    }
}

/// A decreasing positive radial coefficient law `t -> a(t)`.
pub trait RadialLaw: Send + Sync + fmt::Debug {
    fn value(&self, t: f64) -> f64;

    /// Upper bound for `sum_{l in Z^d, |l| > radius} a(|l|)`.
    fn tail_bound(&self, dim: usize, norm: Norm, radius: f64) -> f64;
}

/// `a(t) = t^{-gamma}`.
#[derive(Debug, Clone, Copy)]
pub struct PowerLaw {
    pub gamma: f64,
}

impl RadialLaw for PowerLaw {
    fn value(&self, t: f64) -> f64 {
        t.powf(-self.gamma)
    }

    fn tail_bound(&self, dim: usize, norm: Norm, radius: f64) -> f64 {
        power_tail_bound(dim, norm, self.gamma, radius)
    }
}

#[derive(Debug, Clone)]
pub enum CoeffLaw {
    Power { gamma: f64 },
    Custom(Arc<dyn RadialLaw>),
}

#[derive(Debug, Clone)]
pub struct KernelSpec {
    dim: usize,
    norm: Norm,
    tail_tol: f64,
    law: CoeffLaw,
}

impl KernelSpec {
    /// The power-law kernel `sum_{l != 0} |l|^{-gamma} e^{i l.x}`.
    pub fn power(dim: usize, gamma: f64, norm: Norm) -> Result<Self> {
        if dim == 0 {
            return invalid("dimension must be at least 1");
        }
        if !gamma.is_finite() || gamma <= dim as f64 {
            return Err(SkError::Domain(format!(
                "gamma = {gamma} must exceed the dimension d = {dim} for the kernel to converge"
            )));
        }
        Ok(Self { dim, norm, tail_tol: DEFAULT_TAIL_TOL, law: CoeffLaw::Power { gamma } })
    }

    pub fn custom(dim: usize, norm: Norm, law: Arc<dyn RadialLaw>) -> Result<Self> {
        if dim == 0 {
            return invalid("dimension must be at least 1");
        }
        Ok(Self { dim, norm, tail_tol: DEFAULT_TAIL_TOL, law: CoeffLaw::Custom(law) })
    }

    pub fn with_tail_tol(mut self, tol: f64) -> Result<Self> {
        check_tol(tol)?;
        self.tail_tol = tol;
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn norm(&self) -> Norm {
        self.norm
    }

    pub fn tail_tol(&self) -> f64 {
        self.tail_tol
    }

    pub fn law(&self) -> &CoeffLaw {
        &self.law
    }

    /// The decay exponent of a power-law kernel.
    pub fn gamma(&self) -> Option<f64> {
        match self.law {
            CoeffLaw::Power { gamma } => Some(gamma),
            CoeffLaw::Custom(_) => None,
        }
    }

    /// `a(t)` for `t > 0`.
    pub fn radial(&self, t: f64) -> f64 {
        match &self.law {
            CoeffLaw::Power { gamma } => t.powf(-gamma),
            CoeffLaw::Custom(law) => law.value(t),
        }
    }

    /// The Fourier coefficient `a_l`; zero at the origin.
    pub fn coeff(&self, l: &MultiIndex) -> f64 {
        self.coeff_raw(l.entries())
    }

    pub(crate) fn coeff_raw(&self, l: &[i64]) -> f64 {
        if l.iter().all(|&v| v == 0) {
            return 0.0;
        }
        self.radial(self.norm.of(l))
    }

    /// Bound on `sum_{|l| > radius} a_l`.
    pub fn tail_bound(&self, radius: f64) -> f64 {
        match &self.law {
            CoeffLaw::Power { gamma } => power_tail_bound(self.dim, self.norm, *gamma, radius),
            CoeffLaw::Custom(law) => law.tail_bound(self.dim, self.norm, radius),
        }
    }

    /// Smallest power-of-two radius whose tail is below `tol`.
    fn truncation_radius(&self, tol: f64) -> Result<f64> {
        let mut radius = 1.0f64;
        loop {
            if self.tail_bound(radius) < tol {
                return Ok(radius);
            }
            radius *= 2.0;
            if (2.0 * radius + 1.0).powi(self.dim as i32) > MAX_DIRECT_POINTS {
                return Err(SkError::Domain(format!(
                    "tail tolerance {tol:e} is out of reach of direct summation"
                )));
            }
        }
    }
}

fn check_tol(tol: f64) -> Result<()> {
    if !(tol > 0.0) || !tol.is_finite() {
        return invalid(format!("tolerance must be positive and finite, got {tol}"));
    }
    Ok(())
}

/// A value together with a certified bound on its truncation error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LatticeSumValue {
    pub value: f64,
    pub tail_bound: f64,
}

#[derive(Debug, Clone)]
enum Evaluator {
    Ewald(EwaldPlan),
    SupNorm(SupNormKernel),
    Direct { radius: f64, tail: f64 },
}

/// A kernel ready for evaluation.
#[derive(Debug, Clone)]
pub struct Kernel {
    spec: KernelSpec,
    evaluator: Evaluator,
}

impl Kernel {
    pub fn new(spec: KernelSpec) -> Result<Self> {
        let evaluator = match (&spec.law, spec.norm) {
            (CoeffLaw::Power { gamma }, Norm::L2) => {
                Evaluator::Ewald(EwaldPlan::new(*gamma, &vec![1; spec.dim], CLOSED_FORM_TOL))
            }
            (CoeffLaw::Power { gamma }, Norm::Linf) => Evaluator::SupNorm(SupNormKernel::new(spec.dim, *gamma)),
            (CoeffLaw::Custom(_), _) => {
                let radius = spec.truncation_radius(spec.tail_tol)?;
                Evaluator::Direct { radius, tail: spec.tail_bound(radius) }
            }
        };
        Ok(Self { spec, evaluator })
    }

    pub fn power(dim: usize, gamma: f64, norm: Norm) -> Result<Self> {
        Self::new(KernelSpec::power(dim, gamma, norm)?)
    }

    pub fn spec(&self) -> &KernelSpec {
        &self.spec
    }

    pub fn dim(&self) -> usize {
        self.spec.dim
    }

    pub fn coeff(&self, l: &MultiIndex) -> f64 {
        self.spec.coeff(l)
    }

    /// Error bound of [`Kernel::eval`].
    pub fn eval_error(&self) -> f64 {
        match &self.evaluator {
            Evaluator::Ewald(plan) => plan.error_bound(),
            Evaluator::SupNorm(_) => 0.0,
            Evaluator::Direct { tail, .. } => *tail,
        }
    }

    /// `K(x)` at raw coordinates.
    pub fn eval(&self, x: &[f64]) -> f64 {
        assert_eq!(x.len(), self.dim(), "point dimension does not match the kernel");
        match &self.evaluator {
            Evaluator::Ewald(plan) => plan.sum(&vec![0; x.len()], x).re,
            Evaluator::SupNorm(k) => k.eval(x),
            Evaluator::Direct { radius, .. } => self.direct(&vec![1; x.len()], &vec![0; x.len()], x, *radius).re,
        }
    }

    pub fn eval_point(&self, x: &TorusPoint) -> f64 {
        self.eval(x.coords())
    }

    /// `K(x)` with a certified error below `tol`.
    pub fn eval_certified(&self, x: &TorusPoint, tol: f64) -> Result<LatticeSumValue> {
        check_tol(tol)?;
        if let Evaluator::SupNorm(k) = &self.evaluator {
            return Ok(LatticeSumValue { value: k.eval(x.coords()), tail_bound: 0.0 });
        }
        let ones = vec![1; self.dim()];
        let zeros = vec![0; self.dim()];
        let value = self.lattice_value(&ones, &zeros, x.coords(), tol)?;
        Ok(LatticeSumValue { value: value.0.re, tail_bound: value.1 })
    }

    /// The cosine series over `0 < |l| <= radius` with the bound on the dropped tail.
    pub fn eval_truncated(&self, x: &TorusPoint, radius: f64) -> LatticeSumValue {
        let ones = vec![1; self.dim()];
        let zeros = vec![0; self.dim()];
        let value = self.direct(&ones, &zeros, x.coords(), radius).re;
        LatticeSumValue { value, tail_bound: self.spec.tail_bound(radius) }
    }

    fn direct(&self, h: &[i64], shift: &[i64], x: &[f64], radius: f64) -> Complex64 {
        let law = |t: f64| self.spec.radial(t);
        shells::direct_lattice_sum(&law, self.spec.norm, h, shift, x, radius)
    }

    /// `sum_{v in shift + h Z^d, v != 0} a(|v|) e^{i v.x}` with error below `tol`.
    fn lattice_value(&self, h: &[i64], shift: &[i64], x: &[f64], tol: f64) -> Result<(Complex64, f64)> {
        match (&self.spec.law, self.spec.norm) {
            (CoeffLaw::Power { gamma }, Norm::L2) => {
                let plan = EwaldPlan::new(*gamma, h, tol.min(CLOSED_FORM_TOL));
                Ok((plan.sum(shift, x), plan.error_bound()))
            }
            _ => {
                let radius = self.spec.truncation_radius(tol)?;
                Ok((self.direct(h, shift, x, radius), self.spec.tail_bound(radius)))
            }
        }
    }

    /// Lattice sums for the grid `grid`, certified to `tol`.
    pub fn lattice_plan(&self, grid: &GridSpec, tol: f64) -> Result<LatticePlan<'_>> {
        check_tol(tol)?;
        self.check_grid(grid)?;
        let periods = grid.periods();
        let mode = match (&self.spec.law, self.spec.norm) {
            (CoeffLaw::Power { gamma }, Norm::L2) => {
                LatticeMode::Ewald(EwaldPlan::new(*gamma, &periods, tol.min(CLOSED_FORM_TOL)))
            }
            (CoeffLaw::Power { .. }, Norm::Linf) => LatticeMode::ViaKernel,
            (CoeffLaw::Custom(_), _) => {
                let radius = self.spec.truncation_radius(tol)?;
                LatticeMode::Direct { radius, tail: self.spec.tail_bound(radius) }
            }
        };
        Ok(LatticePlan { kernel: self, grid: grid.clone(), periods, mode })
    }

    fn check_grid(&self, grid: &GridSpec) -> Result<()> {
        if grid.dim() != self.dim() {
            return invalid(format!("grid dimension {} does not match kernel dimension {}", grid.dim(), self.dim()));
        }
        Ok(())
    }

    /// `rho_j(0) = sum_p (a_{2np+j} + a_{2np-j})`.
    pub fn rho_zero(&self, j: &MultiIndex, grid: &GridSpec, tol: f64) -> Result<LatticeSumValue> {
        let plan = self.lattice_plan(grid, tol)?;
        plan.check_index(j)?;
        Ok(plan.rho_zero(j))
    }

    /// `(rho_j(x), sigma_j(x))`.
    pub fn rho_sigma_eval(
        &self,
        j: &MultiIndex,
        x: &TorusPoint,
        grid: &GridSpec,
        tol: f64,
    ) -> Result<(LatticeSumValue, LatticeSumValue)> {
        let plan = self.lattice_plan(grid, tol)?;
        plan.check_index(j)?;
        Ok(plan.rho_sigma(j, x))
    }

    /// `K(x - x_k)` for every knot, in `Omega_n` order.
    pub fn knot_translates(&self, grid: &GridSpec, x: &[f64]) -> Vec<f64> {
        (0..grid.len())
            .map(|k| {
                let knot = grid.knot_at(k);
                let diff: Vec<f64> = x.iter().zip(knot.coords()).map(|(a, b)| a - b).collect();
                self.eval(&diff)
            })
            .collect()
    }

    /// Every `Phi_j(x)`, `j in Omega_n`, via `Phi_j(x) = (1/N) sum_k e^{i j.x_k} K(x - x_k)`.
    pub fn phi_all(&self, grid: &GridSpec, x: &[f64]) -> Vec<Complex64> {
        let n = grid.len() as f64;
        let mut data: Vec<Complex64> =
            self.knot_translates(grid, x).into_iter().map(|v| Complex64::new(v / n, 0.0)).collect();
        let dims: Vec<usize> = grid.periods().iter().map(|&p| p as usize).collect();
        fft_nd(&mut data, &dims, FftDirection::Inverse);
        data
    }

    /// `(sum_p a_{2np}, C_1 a_{2n})` for the uniform degree `n`, where
    /// `C_1 = 2^gamma C_d |1|^gamma / (gamma - d)` is the explicit monotone-tail constant.
    pub fn monotone_tail_check(&self, n: usize) -> Option<(f64, f64)> {
        let gamma = self.spec.gamma()?;
        let d = self.dim();
        let step = 2.0 * n as f64;
        let zeta = self.eval(&vec![0.0; d]);
        let lhs = step.powf(-gamma) * zeta;
        let ones = vec![1i64; d];
        let unit = self.spec.norm.of(&ones);
        let c1 = 2f64.powf(gamma) * shell_constant(d, self.spec.norm) * unit.powf(gamma) / (gamma - d as f64);
        let a_2n = (step * unit).powf(-gamma);
        Some((lhs, c1 * a_2n))
    }
}

#[derive(Debug, Clone)]
enum LatticeMode {
    Ewald(EwaldPlan),
    ViaKernel,
    Direct { radius: f64, tail: f64 },
}

/// Evaluates `Phi_j`, `rho_j`, `sigma_j` for one kernel and grid.
#[derive(Debug, Clone)]
pub struct LatticePlan<'k> {
    kernel: &'k Kernel,
    grid: GridSpec,
    periods: Vec<i64>,
    mode: LatticeMode,
}

impl LatticePlan<'_> {
    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn check_index(&self, j: &MultiIndex) -> Result<()> {
        if self.grid.index_of(j).is_none() {
            return Err(SkError::Domain(format!("index {j} is outside Omega_n")));
        }
        Ok(())
    }

    /// `Phi_j(x)` and its error bound. Any `j in Z^d` is accepted.
    pub fn phi(&self, j: &MultiIndex, x: &[f64]) -> (Complex64, f64) {
        let shift = j.entries();
        match &self.mode {
            LatticeMode::Ewald(plan) => (plan.sum(shift, x), plan.error_bound()),
            LatticeMode::Direct { radius, tail } => (self.kernel.direct(&self.periods, shift, x, *radius), *tail),
            LatticeMode::ViaKernel => {
                let n = self.grid.len() as f64;
                let translates = self.kernel.knot_translates(&self.grid, x);
                let value: Complex64 = translates
                    .iter()
                    .enumerate()
                    .map(|(k, &v)| Complex64::from_polar(v, self.grid.phase(j, &self.grid.index_at(k))))
                    .sum::<Complex64>()
                    / n;
                (value, self.kernel.eval_error())
            }
        }
    }

    pub fn rho_zero(&self, j: &MultiIndex) -> LatticeSumValue {
        let (phi, err) = self.phi(j, &vec![0.0; self.grid.dim()]);
        LatticeSumValue { value: 2.0 * phi.re, tail_bound: 2.0 * err }
    }

    pub fn rho_sigma(&self, j: &MultiIndex, x: &TorusPoint) -> (LatticeSumValue, LatticeSumValue) {
        let (phi, err) = self.phi(j, x.coords());
        let at_origin = x.coords().iter().all(|&c| c == 0.0);
        let sigma = if at_origin { 0.0 } else { 2.0 * phi.im };
        (
            LatticeSumValue { value: 2.0 * phi.re, tail_bound: 2.0 * err },
            LatticeSumValue { value: sigma, tail_bound: 2.0 * err },
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::hurwitz_zeta;
    use std::f64::consts::PI;

    fn idx(v: &[i64]) -> MultiIndex {
        MultiIndex::new(v.to_vec())
    }

    #[test]
    fn coefficients() {
        let spec = KernelSpec::power(1, 2.0, Norm::L2).unwrap();
        assert_eq!(spec.coeff(&idx(&[0])), 0.0);
        assert_eq!(spec.coeff(&idx(&[1])), 1.0);
        let spec = KernelSpec::power(2, 2.5, Norm::L2).unwrap();
        assert!((spec.coeff(&idx(&[3, 4])) - 5f64.powf(-2.5)).abs() < 1e-16);
        assert!(KernelSpec::power(1, 0.5, Norm::L2).is_err());
        assert!(KernelSpec::power(2, 2.0, Norm::Linf).is_err());
    }

    #[test]
    fn certified_eval_rejects_bad_tolerance() {
        let k = Kernel::power(1, 2.0, Norm::L2).unwrap();
        let x = TorusPoint::origin(1);
        assert!(k.eval_certified(&x, 0.0).is_err());
        assert!(k.eval_certified(&x, -1.0).is_err());
        let v = k.eval_certified(&x, 1e-10).unwrap();
        assert!((v.value - PI * PI / 3.0).abs() < 1e-10);
        assert!(v.tail_bound <= 1e-10);
    }

    #[test]
    fn rho_zero_closed_forms() {
        let k = Kernel::power(1, 2.0, Norm::L2).unwrap();
        let grid = GridSpec::uniform(1, 2).unwrap();
        let r1 = k.rho_zero(&idx(&[1]), &grid, 1e-12).unwrap();
        assert!((r1.value - PI * PI / 4.0).abs() < 1e-11);
        // j = n: both congruence classes 4p + 2 and 4p - 2 are the same set
        let r2 = k.rho_zero(&idx(&[2]), &grid, 1e-12).unwrap();
        assert!((r2.value - PI * PI / 8.0).abs() < 1e-11);
        let r3 = k.rho_zero(&idx(&[3]), &grid, 1e-12).unwrap();
        assert!((r3.value - r1.value).abs() < 1e-12);
    }

    #[test]
    fn rho_zero_matches_hurwitz() {
        let gamma = 2.7;
        let k = Kernel::power(1, gamma, Norm::L2).unwrap();
        let grid = GridSpec::uniform(1, 5).unwrap();
        let period = 10.0f64;
        for j in 1..10 {
            let t = j as f64 / period;
            let expected = 2.0 * period.powf(-gamma) * (hurwitz_zeta(gamma, t) + hurwitz_zeta(gamma, 1.0 - t));
            let got = k.rho_zero(&idx(&[j]), &grid, 1e-12).unwrap().value;
            assert!((got - expected).abs() < 1e-12, "j={j}");
        }
    }

    #[test]
    fn custom_law_matches_power_law() {
        let spec = KernelSpec::custom(1, Norm::L2, Arc::new(PowerLaw { gamma: 4.0 })).unwrap();
        let custom = Kernel::new(spec.with_tail_tol(1e-11).unwrap()).unwrap();
        let power = Kernel::power(1, 4.0, Norm::L2).unwrap();
        for x in [0.0, 0.4, 2.0, PI] {
            assert!((custom.eval(&[x]) - power.eval(&[x])).abs() < 1e-10);
        }
    }

    #[test]
    fn phi_all_agrees_with_plan() {
        for norm in [Norm::L2, Norm::Linf] {
            let k = Kernel::power(2, 3.0, norm).unwrap();
            let grid = GridSpec::new(vec![2, 1]).unwrap();
            let plan = k.lattice_plan(&grid, 1e-12).unwrap();
            let x = [0.3, 1.9];
            let all = k.phi_all(&grid, &x);
            for (i, value) in all.iter().enumerate() {
                let (direct, _) = plan.phi(&grid.index_at(i), &x);
                assert!((direct - value).norm() < 1e-11, "{norm:?} {i}");
            }
        }
    }

    #[test]
    fn monotone_tail_holds() {
        for (d, gamma, norm) in [(1, 2.0, Norm::L2), (2, 3.0, Norm::L2), (2, 2.5, Norm::Linf)] {
            let k = Kernel::power(d, gamma, norm).unwrap();
            for n in [1, 2, 5] {
                let (lhs, rhs) = k.monotone_tail_check(n).unwrap();
                assert!(lhs <= rhs, "d={d} {norm:?} n={n}: {lhs} > {rhs}");
            }
        }
    }
}
