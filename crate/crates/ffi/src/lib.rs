//! C interface to the sk-spline library.
//!
//! Objects are opaque handles created by `*_new` and released by `*_free`.
//! Every fallible call returns an [`SkStatus`]; the message of the most recent
//! failure on the calling thread is available from [`sk_last_error`].

use skspline::lab::{rate_exponent, LpExponent, RateSpec};
use skspline::{build_fundamental, interpolate, FundamentalSpline, GridSpec, Interpolant, Kernel, Norm, SkError};
use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::slice;
use std::sync::Arc;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SkStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Domain = 3,
    Hypothesis = 4,
    SingularKernel = 5,
    NumericalRank = 6,
    Io = 7,
    Panic = 8,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SkNorm {
    L2 = 0,
    Linf = 1,
}

pub struct SkKernel {
    inner: Kernel,
}

pub struct SkFundamental {
    inner: Arc<FundamentalSpline>,
}

pub struct SkInterpolant {
    inner: Interpolant,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let text = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = text);
}

fn status_of(e: &SkError) -> SkStatus {
    match e {
        SkError::InvalidArgument(_) | SkError::Json(_) => SkStatus::InvalidArgument,
        SkError::Domain(_) => SkStatus::Domain,
        SkError::Hypothesis(_) => SkStatus::Hypothesis,
        SkError::SingularKernel { .. } => SkStatus::SingularKernel,
        SkError::NumericalRank { .. } => SkStatus::NumericalRank,
        SkError::Io(_) => SkStatus::Io,
    }
}

struct Failure(SkStatus, String);

impl From<SkError> for Failure {
    fn from(e: SkError) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

fn null(name: &str) -> Failure {
    Failure(SkStatus::NullPointer, format!("{name} is null"))
}

fn guard(body: impl FnOnce() -> Result<(), Failure>) -> SkStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            set_error("");
            SkStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            SkStatus::Panic
        }
    }
}

unsafe fn input<'a, T>(data: *const T, len: usize, name: &str) -> Result<&'a [T], Failure> {
    if data.is_null() {
        if len == 0 {
            return Ok(&[]);
        }
        return Err(null(name));
    }
    Ok(slice::from_raw_parts(data, len))
}

unsafe fn handle<'a, T>(p: *const T, name: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(name))
}

fn check_dim(len: usize, d: usize) -> Result<(), Failure> {
    if len != d {
        return Err(Failure(SkStatus::InvalidArgument, format!("expected {d} coordinates, got {len}")));
    }
    Ok(())
}

/// Message describing the last failure on this thread; empty after a success.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn sk_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Creates the power-law kernel `sum_{l != 0} |l|^{-gamma} e^{i l.x}`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn sk_kernel_new(d: usize, gamma: f64, norm: SkNorm, out: *mut *mut SkKernel) -> SkStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let norm = match norm {
            SkNorm::L2 => Norm::L2,
            SkNorm::Linf => Norm::Linf,
        };
        let kernel = Kernel::power(d, gamma, norm)?;
        *out = Box::into_raw(Box::new(SkKernel { inner: kernel }));
        Ok(())
    })
}

/// # Safety
/// `kernel` must come from [`sk_kernel_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn sk_kernel_free(kernel: *mut SkKernel) {
    if !kernel.is_null() {
        drop(Box::from_raw(kernel));
    }
}

/// `K(x)` for `x` of length `len == d`.
///
/// # Safety
/// Pointers must be valid; `x` must hold `len` values.
#[no_mangle]
pub unsafe extern "C" fn sk_kernel_eval(kernel: *const SkKernel, x: *const f64, len: usize, out: *mut f64) -> SkStatus {
    guard(|| {
        let kernel = handle(kernel, "kernel")?;
        let x = input(x, len, "x")?;
        check_dim(len, kernel.inner.dim())?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = kernel.inner.eval(x);
        Ok(())
    })
}

/// Builds the fundamental spline on the grid with degrees `n[0..d]`.
///
/// # Safety
/// `n` must hold `d` values and `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn sk_fundamental_new(
    kernel: *const SkKernel,
    n: *const usize,
    d: usize,
    tol: f64,
    out: *mut *mut SkFundamental,
) -> SkStatus {
    guard(|| {
        let kernel = handle(kernel, "kernel")?;
        let n = input(n, d, "n")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let grid = GridSpec::new(n.to_vec())?;
        let fs = build_fundamental(&kernel.inner, &grid, tol)?;
        *out = Box::into_raw(Box::new(SkFundamental { inner: Arc::new(fs) }));
        Ok(())
    })
}

/// # Safety
/// `fs` must come from [`sk_fundamental_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn sk_fundamental_free(fs: *mut SkFundamental) {
    if !fs.is_null() {
        drop(Box::from_raw(fs));
    }
}

/// Number of knots `N`, or 0 for a null handle.
///
/// # Safety
/// `fs` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sk_fundamental_knot_count(fs: *const SkFundamental) -> usize {
    fs.as_ref().map_or(0, |f| f.inner.grid().len())
}

/// # Safety
/// Pointers must be valid; `x` must hold `len` values.
#[no_mangle]
pub unsafe extern "C" fn sk_fundamental_eval(
    fs: *const SkFundamental,
    x: *const f64,
    len: usize,
    out: *mut f64,
) -> SkStatus {
    guard(|| {
        let fs = handle(fs, "fs")?;
        let x = input(x, len, "x")?;
        check_dim(len, fs.inner.grid().dim())?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = fs.inner.eval(x);
        Ok(())
    })
}

/// Interpolates `len == N` knot samples given in lexicographic knot order.
///
/// # Safety
/// `samples` must hold `len` values and `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn sk_interpolant_new(
    fs: *const SkFundamental,
    samples: *const f64,
    len: usize,
    out: *mut *mut SkInterpolant,
) -> SkStatus {
    guard(|| {
        let fs = handle(fs, "fs")?;
        let samples = input(samples, len, "samples")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let ip = interpolate(&fs.inner, samples)?;
        *out = Box::into_raw(Box::new(SkInterpolant { inner: ip }));
        Ok(())
    })
}

/// # Safety
/// `ip` must come from [`sk_interpolant_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn sk_interpolant_free(ip: *mut SkInterpolant) {
    if !ip.is_null() {
        drop(Box::from_raw(ip));
    }
}

/// # Safety
/// Pointers must be valid; `x` must hold `len` values.
#[no_mangle]
pub unsafe extern "C" fn sk_interpolant_eval(
    ip: *const SkInterpolant,
    x: *const f64,
    len: usize,
    out: *mut f64,
) -> SkStatus {
    guard(|| {
        let ip = handle(ip, "ip")?;
        let x = input(x, len, "x")?;
        check_dim(len, ip.inner.fundamental().grid().dim())?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ip.inner.eval(x);
        Ok(())
    })
}

/// Predicted rate `-gamma + d (1/p - 1/q)`; pass `q = INFINITY` for the sup norm.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn sk_rate_exponent(p: f64, q: f64, gamma: f64, d: usize, out: *mut f64) -> SkStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let spec = RateSpec::new(p, LpExponent::new(q)?, gamma, d)?;
        *out = rate_exponent(&spec)?;
        Ok(())
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::ptr;

    #[test]
    fn error_message_is_cleared_on_success() {
        let mut out = 0.0;
        let status = unsafe { sk_rate_exponent(2.0, 2.0, 3.0, 1, &mut out) };
        assert_eq!(status, SkStatus::Hypothesis);
        let msg = unsafe { std::ffi::CStr::from_ptr(sk_last_error()) };
        assert!(msg.to_str().unwrap().contains("1/2"));
        let status = unsafe { sk_rate_exponent(1.0, 2.0, 3.0, 1, &mut out) };
        assert_eq!(status, SkStatus::Ok);
        assert_eq!(out, -2.5);
        let msg = unsafe { std::ffi::CStr::from_ptr(sk_last_error()) };
        assert!(msg.to_bytes().is_empty());
    }

    #[test]
    fn null_handles_are_rejected() {
        let mut out = 0.0;
        let status = unsafe { sk_kernel_eval(ptr::null(), ptr::null(), 0, &mut out) };
        assert_eq!(status, SkStatus::NullPointer);
    }
}
