//! Sobolev-class test functions, L^q error measurement and convergence studies.

use crate::error::{invalid, Result, SkError};
use crate::fourier::FourierRep;
use crate::kernel::shells::for_each_in_ranges;
use crate::kernel::{CoeffLaw, Kernel, KernelSpec, Norm};
use crate::lattice::{GridSpec, MultiIndex};
use crate::special::hurwitz_zeta;
use crate::spline::{build_fundamental, interpolate_complex, FundamentalSpline};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

/// A Lebesgue exponent in `[1, inf]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LpExponent {
    Finite(f64),
    Infinity,
}

impl LpExponent {
    pub fn new(p: f64) -> Result<Self> {
        if p.is_infinite() && p > 0.0 {
            return Ok(Self::Infinity);
        }
        if !(p >= 1.0) || !p.is_finite() {
            return invalid(format!("exponent {p} must lie in [1, inf]"));
        }
        Ok(Self::Finite(p))
    }

    /// `1/p`, zero at infinity.
    pub fn reciprocal(self) -> f64 {
        match self {
            Self::Finite(p) => 1.0 / p,
            Self::Infinity => 0.0,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Self::Infinity)
    }
}

impl fmt::Display for LpExponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Finite(p) => write!(f, "{p}"),
            Self::Infinity => f.write_str("inf"),
        }
    }
}

impl FromStr for LpExponent {
    type Err = SkError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "inf" | "infinity" => Ok(Self::Infinity),
            other => {
                let p: f64 = other
                    .parse()
                    .map_err(|_| SkError::InvalidArgument(format!("'{s}' is not a Lebesgue exponent")))?;
                Self::new(p)
            }
        }
    }
}

impl Serialize for LpExponent {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Self::Finite(p) => s.serialize_f64(*p),
            Self::Infinity => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for LpExponent {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        let parsed = match Raw::deserialize(d)? {
            Raw::Num(p) => Self::new(p),
            Raw::Text(t) => t.parse(),
        };
        parsed.map_err(serde::de::Error::custom)
    }
}

/// `f = K * phi` together with `phi`.
#[derive(Debug, Clone)]
pub struct TestFunction {
    pub phi_coeffs: FourierRep,
    pub f_coeffs: FourierRep,
    pub p_norm_of_phi: f64,
}

/// Applies the multiplier `a_m` to `phi`; with `normalize`, rescales so `||phi||_p = 1`.
pub fn sobolev_instance(
    kernel: &KernelSpec,
    phi: &FourierRep,
    p: f64,
    normalize: bool,
    points_per_axis: usize,
) -> Result<TestFunction> {
    if phi.is_empty() {
        return invalid("phi has no terms");
    }
    if phi.dim() != kernel.dim() {
        return invalid("phi and kernel dimensions differ");
    }
    if !(1.0..=2.0).contains(&p) {
        return invalid(format!("p = {p} must lie in [1, 2]"));
    }
    let norm = lp_norm(phi, LpExponent::Finite(p), points_per_axis)?;
    let phi = if normalize {
        if !(norm > 0.0) {
            return invalid("phi vanishes on the quadrature grid and cannot be normalized");
        }
        phi.scale(1.0 / norm)
    } else {
        phi.clone()
    };
    let f_coeffs = phi.map_coeffs(|m, c| c * kernel.coeff(m));
    let p_norm_of_phi = if normalize { lp_norm(&phi, LpExponent::Finite(p), points_per_axis)? } else { norm };
    Ok(TestFunction { phi_coeffs: phi, f_coeffs, p_norm_of_phi })
}

/// Normalized-measure `L^p` norm of samples on a uniform grid.
pub fn lp_norm_samples(values: &[Complex64], p: LpExponent) -> f64 {
    match p {
        LpExponent::Infinity => values.iter().map(|v| v.norm()).fold(0.0, f64::max),
        LpExponent::Finite(p) => {
            let mean = values.iter().map(|v| v.norm().powf(p)).sum::<f64>() / values.len() as f64;
            mean.powf(1.0 / p)
        }
    }
}

/// `L^p` norm by quadrature on `M^d` points; `M` must be at least four times the bandwidth.
pub fn lp_norm(g: &FourierRep, p: LpExponent, points_per_axis: usize) -> Result<f64> {
    let band = g.max_frequency() as usize;
    if points_per_axis < (4 * band).max(1) {
        return invalid(format!("{points_per_axis} points per axis do not resolve bandwidth {band}"));
    }
    Ok(lp_norm_samples(&g.sample_grid(points_per_axis)?, p))
}

/// Smallest multiple of `step` that is at least `target`.
fn round_up(target: usize, step: usize) -> usize {
    target.div_ceil(step) * step
}

/// `||f - sk_n(f)||_q` on the `M^d` grid, `M` raised to a multiple of `2n` resolving `f`.
pub fn approximation_error(
    f: &TestFunction,
    kernel: &Kernel,
    grid: &GridSpec,
    q: LpExponent,
    points_per_axis: usize,
) -> Result<f64> {
    let fs = Arc::new(build_fundamental(kernel, grid, kernel.spec().tail_tol())?);
    approximation_error_with(&fs, f, q, points_per_axis)
}

pub fn approximation_error_with(
    fs: &Arc<FundamentalSpline>,
    f: &TestFunction,
    q: LpExponent,
    points_per_axis: usize,
) -> Result<f64> {
    let grid = fs.grid();
    let step = grid.periods().iter().map(|&p| p as usize).fold(1, lcm);
    let band = f.f_coeffs.max_frequency() as usize;
    let m = round_up(points_per_axis.max(4 * band).max(1), step);
    let dims = vec![m; grid.dim()];

    let samples: Vec<Complex64> = grid.knots().iter().map(|x| f.f_coeffs.eval(x.coords())).collect();
    let (re, im) = interpolate_complex(fs, &samples)?;
    let re_grid = re.eval_grid(&dims)?;
    let imaginary = samples.iter().any(|c| c.im != 0.0);
    let im_grid = if imaginary { Some(im.eval_grid(&dims)?) } else { None };
    let exact = f.f_coeffs.sample_grid(m)?;
    let diff: Vec<Complex64> = exact
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let s = Complex64::new(re_grid[i], im_grid.as_ref().map_or(0.0, |g| g[i]));
            v - s
        })
        .collect();
    Ok(lp_norm_samples(&diff, q))
}

fn lcm(a: usize, b: usize) -> usize {
    fn gcd(a: usize, b: usize) -> usize {
        if b == 0 {
            a
        } else {
            gcd(b, a % b)
        }
    }
    a / gcd(a, b) * b
}

/// Exponents and dimension of a rate experiment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateSpec {
    pub p: f64,
    pub q: LpExponent,
    pub gamma: f64,
    pub d: usize,
}

impl RateSpec {
    pub fn new(p: f64, q: LpExponent, gamma: f64, d: usize) -> Result<Self> {
        let spec = Self { p, q, gamma, d };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.d == 0 {
            return invalid("dimension must be at least 1");
        }
        if !(1.0..=2.0).contains(&self.p) {
            return Err(SkError::Hypothesis(format!("p = {} must satisfy 1 <= p <= 2", self.p)));
        }
        if let LpExponent::Finite(q) = self.q {
            if q < 2.0 {
                return Err(SkError::Hypothesis(format!("q = {q} must satisfy 2 <= q <= inf")));
            }
        }
        if self.gap() < 0.5 - 1e-12 {
            return Err(SkError::Hypothesis(format!(
                "1/p - 1/q = {} but the rate theorem requires 1/p - 1/q >= 1/2",
                self.gap()
            )));
        }
        if !(self.gamma > self.d as f64) {
            return Err(SkError::Domain(format!("gamma = {} must exceed d = {}", self.gamma, self.d)));
        }
        Ok(())
    }

    /// `1/p - 1/q`.
    pub fn gap(&self) -> f64 {
        1.0 / self.p - self.q.reciprocal()
    }

    /// `qp / (q - p)`, or `p` when `q` is infinite.
    pub fn tail_exponent(&self) -> f64 {
        match self.q {
            LpExponent::Infinity => self.p,
            LpExponent::Finite(q) => q * self.p / (q - self.p),
        }
    }
}

/// `-gamma + d (1/p - 1/q)`.
pub fn rate_exponent(spec: &RateSpec) -> Result<f64> {
    spec.validate()?;
    Ok(-spec.gamma + spec.d as f64 * spec.gap())
}

/// `(sum_{|l| >= |n|} a_l^s)^{1/p - 1/q}` with `s = qp/(q - p)`; the constant is taken as 1.
pub fn theoretical_bound(kernel: &Kernel, grid: &GridSpec, spec: &RateSpec, tol: f64) -> Result<f64> {
    spec.validate()?;
    if !(tol > 0.0) {
        return invalid("tolerance must be positive");
    }
    if grid.dim() != kernel.dim() || spec.d != kernel.dim() {
        return invalid("grid, kernel and rate spec dimensions differ");
    }
    let s = spec.tail_exponent();
    let norm = kernel.spec().norm();
    let degrees: Vec<i64> = grid.degrees().iter().map(|&v| v as i64).collect();
    let tail = match kernel.spec().law() {
        CoeffLaw::Power { gamma } => power_tail_from(kernel.dim(), norm, s * gamma, &degrees, tol)?,
        CoeffLaw::Custom(_) => custom_tail_from(kernel.spec(), s, &degrees, tol)?,
    };
    Ok(tail.max(0.0).powf(spec.gap()))
}

/// `|l| >= |n|` decided exactly in integer arithmetic.
fn reaches(norm: Norm, l: &[i64], n: &[i64]) -> bool {
    match norm {
        Norm::L2 => l.iter().map(|v| v * v).sum::<i64>() >= n.iter().map(|v| v * v).sum::<i64>(),
        Norm::Linf => {
            l.iter().map(|v| v.abs()).max().unwrap_or(0) >= n.iter().map(|v| v.abs()).max().unwrap_or(0)
        }
    }
}

/// `sum_{|l| >= |n|} |l|^{-exponent}`.
fn power_tail_from(d: usize, norm: Norm, exponent: f64, n: &[i64], tol: f64) -> Result<f64> {
    if d == 1 {
        return Ok(2.0 * hurwitz_zeta(exponent, n[0] as f64));
    }
    let full = Kernel::power(d, exponent, norm)?.eval_certified(&crate::lattice::TorusPoint::origin(d), tol)?;
    let r = norm.of(n).ceil() as i64;
    let mut head = 0.0;
    for_each_in_ranges(&vec![-r; d], &vec![r; d], |l| {
        if l.iter().any(|&v| v != 0) && !reaches(norm, l, n) {
            head += norm.of(l).powf(-exponent);
        }
    });
    Ok(full.value - head)
}

fn custom_tail_from(spec: &KernelSpec, s: f64, n: &[i64], tol: f64) -> Result<f64> {
    let d = spec.dim();
    let start = spec.norm().of(n);
    let mut radius = (2.0 * start).max(2.0);
    loop {
        // sum_{|l| > R} a^s <= a(R)^{s-1} sum_{|l| > R} a
        let remainder = spec.radial(radius).powf(s - 1.0) * spec.tail_bound(radius);
        if remainder < tol {
            let r = radius.ceil() as i64;
            let mut acc = 0.0;
            for_each_in_ranges(&vec![-r; d], &vec![r; d], |l| {
                let t = spec.norm().of(l);
                if reaches(spec.norm(), l, n) && t <= radius {
                    acc += spec.radial(t).powf(s);
                }
            });
            return Ok(acc + remainder);
        }
        radius *= 2.0;
        if (2.0 * radius + 1.0).powi(d as i32) > 1e8 {
            return Err(SkError::Domain("tail of the custom law converges too slowly".into()));
        }
    }
}

/// `e^{i l.x} - sum_j e^{i l.x_j} sk(x - x_j)`.
pub fn deviation(fs: &FundamentalSpline, l: &MultiIndex, x: &[f64]) -> Complex64 {
    let grid = fs.grid();
    let translates = fs.translates(x);
    let sum: Complex64 = translates
        .iter()
        .enumerate()
        .map(|(j, &s)| Complex64::from_polar(s, l.dot(grid.knot_at(j).coords())))
        .sum();
    Complex64::from_polar(1.0, l.dot(x)) - sum
}

/// `(1/(2 pi)^d) int K(x - y) phi(y) dy` by the rectangle rule on `M^d` points.
pub fn convolve_quadrature(kernel: &Kernel, phi: &FourierRep, x: &[f64], points_per_axis: usize) -> Complex64 {
    let d = kernel.dim();
    let dims = vec![points_per_axis; d];
    let total = points_per_axis.pow(d as u32);
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..total {
        let y = crate::spline::grid_point(&dims, i);
        let diff: Vec<f64> = x.iter().zip(&y).map(|(a, b)| a - b).collect();
        acc += kernel.eval(&diff) * phi.eval(&y);
    }
    acc / total as f64
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StudyRow {
    pub n: usize,
    pub q: LpExponent,
    pub p: f64,
    pub gamma: f64,
    pub d: usize,
    pub measured_error: f64,
    pub theoretical_bound: f64,
    pub exponent: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StudyResult {
    pub rows: Vec<StudyRow>,
    pub fitted_slope: f64,
    pub predicted_exponent: f64,
}

pub const CSV_HEADER: &str = "n,q,p,gamma,d,measured_error,theoretical_bound,exponent";

impl StudyResult {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{}\n",
                r.n, r.q, r.p, r.gamma, r.d, r.measured_error, r.theoretical_bound, r.exponent
            ));
        }
        out
    }
}

/// Least-squares slope of `log y` against `log x`.
pub fn fit_loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|v| v.ln()).collect();
    let k = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / k;
    let my = ly.iter().sum::<f64>() / k;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

/// Relative change tolerated between a sup-norm grid maximum and its refinement.
const SUP_STABILITY: f64 = 0.05;
const SUP_REFINEMENTS: usize = 3;

/// One row per `n`, with the slope fitted after dropping the smallest `n`.
pub fn run_convergence_study(
    kernel: &Kernel,
    spec: &RateSpec,
    phi: &FourierRep,
    n_list: &[usize],
    points_per_axis: usize,
) -> Result<StudyResult> {
    let predicted = rate_exponent(spec)?;
    if kernel.spec().gamma() != Some(spec.gamma) || kernel.dim() != spec.d {
        return invalid("kernel does not match the rate spec");
    }
    if n_list.len() < 2 || n_list.windows(2).any(|w| w[0] >= w[1]) || n_list[0] == 0 {
        return invalid("n_list must hold at least two increasing positive degrees");
    }
    let band = phi.max_frequency() as usize;
    let phi_points = points_per_axis.max(4 * band).max(1);
    let f = sobolev_instance(kernel.spec(), phi, spec.p, true, phi_points)?;
    let tol = kernel.spec().tail_tol();

    let rows: Vec<Result<StudyRow>> = n_list
        .par_iter()
        .map(|&n| {
            let grid = GridSpec::uniform(spec.d, n)?;
            let fs = Arc::new(build_fundamental(kernel, &grid, tol)?);
            let m = round_up(points_per_axis.max(8 * band.max(2 * n)), 2 * n);
            let mut err = approximation_error_with(&fs, &f, spec.q, m)?;
            if spec.q.is_infinite() {
                let mut m_fine = m;
                for _ in 0..SUP_REFINEMENTS {
                    m_fine *= 2;
                    let fine = approximation_error_with(&fs, &f, spec.q, m_fine)?;
                    let stable = (fine - err).abs() <= SUP_STABILITY * fine.max(err);
                    err = err.max(fine);
                    if stable {
                        break;
                    }
                }
            }
            Ok(StudyRow {
                n,
                q: spec.q,
                p: spec.p,
                gamma: spec.gamma,
                d: spec.d,
                measured_error: err,
                theoretical_bound: theoretical_bound(kernel, &grid, spec, tol)?,
                exponent: predicted,
            })
        })
        .collect();
    let rows = rows.into_iter().collect::<Result<Vec<_>>>()?;
    let fit = if rows.len() > 2 { &rows[1..] } else { &rows[..] };
    let xs: Vec<f64> = fit.iter().map(|r| r.n as f64).collect();
    let ys: Vec<f64> = fit.iter().map(|r| r.measured_error.max(f64::MIN_POSITIVE)).collect();
    Ok(StudyResult { rows, fitted_slope: fit_loglog_slope(&xs, &ys), predicted_exponent: predicted })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponent_parsing() {
        assert_eq!("inf".parse::<LpExponent>().unwrap(), LpExponent::Infinity);
        assert_eq!("2".parse::<LpExponent>().unwrap(), LpExponent::Finite(2.0));
        assert!("0.5".parse::<LpExponent>().is_err());
        let json = serde_json::to_string(&LpExponent::Infinity).unwrap();
        assert_eq!(json, "\"inf\"");
        let back: LpExponent = serde_json::from_str("2.5").unwrap();
        assert_eq!(back, LpExponent::Finite(2.5));
    }

    #[test]
    fn rate_exponents() {
        let r = RateSpec::new(1.0, LpExponent::Finite(2.0), 3.0, 1).unwrap();
        assert_eq!(rate_exponent(&r).unwrap(), -2.5);
        let r = RateSpec::new(1.0, LpExponent::Infinity, 2.5, 2).unwrap();
        assert_eq!(rate_exponent(&r).unwrap(), -0.5);
        assert!(matches!(RateSpec::new(2.0, LpExponent::Finite(2.0), 3.0, 1), Err(SkError::Hypothesis(_))));
    }

    #[test]
    fn slope_fit_recovers_power() {
        let xs = [4.0, 8.0, 16.0];
        let ys: Vec<f64> = xs.iter().map(|x: &f64| 3.0 * x.powf(-2.5)).collect();
        assert!((fit_loglog_slope(&xs, &ys) + 2.5).abs() < 1e-12);
    }
}
