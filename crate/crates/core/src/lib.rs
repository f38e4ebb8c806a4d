pub mod error;
pub mod fft;
pub mod fourier;
pub mod kernel;
pub mod lab;
pub mod lattice;
pub mod linsys;
pub mod special;
pub mod spline;

pub use error::{Result, SkError};
pub use fourier::FourierRep;
pub use kernel::{Kernel, KernelSpec, LatticeSumValue, Norm};
pub use lattice::{GridSpec, MultiIndex, TorusPoint};
pub use linsys::solve_linear_system;
pub use spline::{build_fundamental, interpolate, FundamentalSpline, Interpolant, SplineCoefficients};
pub use lab::{rate_exponent, run_convergence_study, theoretical_bound, LpExponent, RateSpec, StudyResult, StudyRow, TestFunction};
