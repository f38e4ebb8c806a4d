use skspline_ffi::*;
use std::f64::consts::PI;
use std::path::Path;
use std::process::Command;
use std::ptr;

#[test]
fn kernel_through_handles() {
    let mut kernel = ptr::null_mut();
    assert_eq!(unsafe { sk_kernel_new(1, 2.0, SkNorm::L2, &mut kernel) }, SkStatus::Ok);
    let mut value = 0.0;
    let x = [PI];
    assert_eq!(unsafe { sk_kernel_eval(kernel, x.as_ptr(), 1, &mut value) }, SkStatus::Ok);
    assert!((value + PI * PI / 6.0).abs() < 1e-10);
    assert_eq!(unsafe { sk_kernel_eval(kernel, x.as_ptr(), 2, &mut value) }, SkStatus::InvalidArgument);
    unsafe { sk_kernel_free(kernel) };
}

#[test]
fn invalid_gamma_reports_domain_error() {
    let mut kernel = ptr::null_mut();
    assert_eq!(unsafe { sk_kernel_new(2, 1.5, SkNorm::Linf, &mut kernel) }, SkStatus::Domain);
    assert!(kernel.is_null());
    let msg = unsafe { std::ffi::CStr::from_ptr(sk_last_error()) }.to_str().unwrap().to_owned();
    assert!(msg.contains("gamma"));
}

#[test]
fn interpolation_round_trip() {
    let mut kernel = ptr::null_mut();
    let mut fs = ptr::null_mut();
    let mut ip = ptr::null_mut();
    unsafe {
        assert_eq!(sk_kernel_new(2, 3.0, SkNorm::L2, &mut kernel), SkStatus::Ok);
        let n = [2usize, 1];
        assert_eq!(sk_fundamental_new(kernel, n.as_ptr(), 2, 1e-10, &mut fs), SkStatus::Ok);
        assert_eq!(sk_fundamental_knot_count(fs), 8);
        let mut v = 0.0;
        let origin = [0.0, 0.0];
        assert_eq!(sk_fundamental_eval(fs, origin.as_ptr(), 2, &mut v), SkStatus::Ok);
        assert!((v - 1.0).abs() < 1e-10);

        let samples: Vec<f64> = (0..8).map(|i| i as f64 * 0.5 - 1.0).collect();
        assert_eq!(sk_interpolant_new(fs, samples.as_ptr(), samples.len(), &mut ip), SkStatus::Ok);
        // knot (1, 1) is x = (pi/2, pi), lexicographic position 1 * 2 + 1
        let knot = [PI / 2.0, PI];
        assert_eq!(sk_interpolant_eval(ip, knot.as_ptr(), 2, &mut v), SkStatus::Ok);
        assert!((v - samples[3]).abs() < 1e-10);
        assert_eq!(sk_interpolant_new(fs, samples.as_ptr(), 3, &mut ip), SkStatus::InvalidArgument);

        sk_interpolant_free(ip);
        sk_fundamental_free(fs);
        sk_kernel_free(kernel);
    }
}

#[test]
fn rate_exponent_with_infinite_q() {
    let mut out = 0.0;
    assert_eq!(unsafe { sk_rate_exponent(1.0, f64::INFINITY, 2.5, 2, &mut out) }, SkStatus::Ok);
    assert_eq!(out, -0.5);
    assert_eq!(unsafe { sk_rate_exponent(1.0, 2.0, 3.0, 1, ptr::null_mut()) }, SkStatus::NullPointer);
}

#[test]
fn header_is_valid_c() {
    let header = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/skspline.h");
    let text = std::fs::read_to_string(&header).expect("generated header");
    for name in ["sk_kernel_new", "sk_fundamental_eval", "sk_interpolant_free", "sk_last_error", "SK_STATUS_OK"] {
        assert!(text.contains(name), "{name} missing from header");
    }
    let Ok(status) = Command::new("cc").args(["-fsyntax-only", "-x", "c"]).arg(&header).status() else {
        eprintln!("no C compiler found, skipping syntax check");
        return;
    };
    assert!(status.success());
}
