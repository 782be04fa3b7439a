use std::ffi::{CStr, CString};
use std::ptr;

use akr_ffi::*;

fn parse(src: &str, force_2d: bool) -> *mut AkrFunction {
    let c = CString::new(src).unwrap();
    let mut f = ptr::null_mut();
    assert_eq!(unsafe { akr_function_parse(c.as_ptr(), force_2d, &mut f) }, AkrStatus::Ok);
    assert!(!f.is_null());
    f
}

fn last_error() -> String {
    let p = akr_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn akr(n: usize, m: usize, j: u32) -> AkrOperator {
    AkrOperator { kind: AkrOperatorKind::Akr, n, m, j }
}

#[test]
fn nodes_and_basis() {
    let mut buf = [0.0; 3];
    assert_eq!(unsafe { akr_nodes(2, 2, buf.as_mut_ptr(), buf.len()) }, AkrStatus::Ok);
    assert_eq!(buf, [0.0, 0.0, 1.0]);

    let mut small = [0.0; 2];
    assert_eq!(unsafe { akr_nodes(2, 2, small.as_mut_ptr(), small.len()) }, AkrStatus::BufferTooSmall);
    assert!(last_error().contains("3 are required"));

    assert_eq!(unsafe { akr_nodes(1, 2, buf.as_mut_ptr(), buf.len()) }, AkrStatus::PreconditionError);
    assert!(last_error().contains("n must be ≥ j"));

    let mut basis = [0.0; 3];
    assert_eq!(unsafe { akr_bernstein_basis(2, 0.5, basis.as_mut_ptr(), 3) }, AkrStatus::Ok);
    assert_eq!(basis, [0.25, 0.5, 0.25]);
    assert_eq!(unsafe { akr_nodes(2, 2, ptr::null_mut(), 3) }, AkrStatus::NullPointer);
}

#[test]
fn evaluation_fixes_x_to_the_j() {
    let f = parse("x^2", false);
    assert_eq!(unsafe { akr_function_dims(f) }, 1);
    let xs = [0.0, 0.3, 1.0];
    let mut out = [0.0; 3];
    let op = akr(10, 0, 2);
    assert_eq!(unsafe { akr_eval(f, &op, xs.as_ptr(), ptr::null(), 3, out.as_mut_ptr()) }, AkrStatus::Ok);
    for (o, x) in out.iter().zip(xs) {
        assert!((o - x * x).abs() < 1e-14);
    }
    // B_2(x; 1/2) for the AKR nodes 0, 0, 1 is 1/4.
    let g = parse("x", false);
    let op = akr(2, 0, 2);
    assert_eq!(unsafe { akr_eval(g, &op, [0.5].as_ptr(), ptr::null(), 1, out.as_mut_ptr()) }, AkrStatus::Ok);
    assert_eq!(out[0], 0.25);
    unsafe {
        akr_function_free(f);
        akr_function_free(g);
        akr_function_free(ptr::null_mut());
    }
}

#[test]
fn bivariate_evaluation_and_error() {
    let f = parse("x^2*y^2", false);
    assert_eq!(unsafe { akr_function_dims(f) }, 2);
    let mut out = [0.0; 2];
    let op = akr(5, 4, 2);
    let status = unsafe { akr_eval(f, &op, [0.5, 1.0].as_ptr(), [0.5, 1.0].as_ptr(), 2, out.as_mut_ptr()) };
    assert_eq!(status, AkrStatus::Ok);
    assert!((out[0] - 0.0625).abs() < 1e-15 && (out[1] - 1.0).abs() < 1e-15);

    let mut e = f64::NAN;
    let b = AkrOperator { kind: AkrOperatorKind::Bernstein, n: 4, m: 4, j: 0 };
    assert_eq!(unsafe { akr_error(f, &b, 21, AkrNorm::Sup, &mut e) }, AkrStatus::Ok);
    assert!(e > 0.0 && e < 0.5);
    assert_eq!(unsafe { akr_error(f, &op, 21, AkrNorm::Rel2, &mut e) }, AkrStatus::Ok);
    assert!(e < 1e-13);
    unsafe { akr_function_free(f) };
}

#[test]
fn errors_set_status_and_message() {
    let c = CString::new("x +").unwrap();
    let mut f = ptr::null_mut();
    assert_eq!(unsafe { akr_function_parse(c.as_ptr(), false, &mut f) }, AkrStatus::InputError);
    assert!(f.is_null());
    assert!(last_error().starts_with("syntax error"));

    let name = CString::new("ex9.9").unwrap();
    assert_eq!(unsafe { akr_function_catalog(name.as_ptr(), 2, &mut f) }, AkrStatus::InputError);
    assert_eq!(unsafe { akr_function_parse(ptr::null(), false, &mut f) }, AkrStatus::NullPointer);

    let g = parse("x", false);
    let mut v = 0.0;
    assert_eq!(unsafe { akr_function_value(g, 0.5, 0.0, &mut v) }, AkrStatus::Ok);
    assert_eq!(v, 0.5);
    let op = akr(3, 3, 2);
    let mut out = [0.0];
    let status = unsafe { akr_eval(g, &op, [0.5].as_ptr(), [0.5].as_ptr(), 1, out.as_mut_ptr()) };
    assert_eq!(status, AkrStatus::PreconditionError);
    unsafe { akr_function_free(g) };
}

#[test]
fn last_error_is_per_thread() {
    let mut buf = [0.0; 1];
    assert_eq!(unsafe { akr_nodes(5, 2, buf.as_mut_ptr(), 1) }, AkrStatus::BufferTooSmall);
    let other = std::thread::spawn(|| akr_last_error().is_null()).join().unwrap();
    assert!(other);
}

#[test]
fn catalog_class_and_chain() {
    let name = CString::new("ex3.1").unwrap();
    let mut f = ptr::null_mut();
    assert_eq!(unsafe { akr_function_catalog(name.as_ptr(), 2, &mut f) }, AkrStatus::Ok);
    let mut report = AkrClassReport {
        verdict: AkrVerdict::Inconclusive,
        min_margin: 0.0,
        witness_x: 0.0,
        witness_y: 0.0,
        tolerance: 0.0,
        points_scanned: 0,
    };
    assert_eq!(unsafe { akr_check_class(f, AkrClass::Kj1, 2, 501, 0.0, &mut report) }, AkrStatus::Ok);
    assert_eq!(report.verdict, AkrVerdict::Member);
    assert_eq!(report.points_scanned, 501);
    assert!(report.witness_y.is_nan());
    assert_eq!(unsafe { akr_check_class(f, AkrClass::Kj2, 2, 11, 0.0, &mut report) }, AkrStatus::PreconditionError);

    let mut chain = AkrChainReport { holds: false, lower_margin: 0.0, upper_margin: 0.0 };
    let status = unsafe { akr_check_chain(f, AkrChain::AkrBelow, 5, 0, 2, 1001, 1e-9, &mut chain) };
    assert_eq!(status, AkrStatus::Ok);
    assert!(chain.holds && chain.lower_margin >= -1e-9 && chain.upper_margin >= -1e-9);

    assert_eq!(unsafe { akr_function_use_finite_differences(f) }, AkrStatus::Ok);
    assert_eq!(unsafe { akr_check_class(f, AkrClass::Kj1, 2, 101, 0.0, &mut report) }, AkrStatus::Ok);
    assert_eq!(report.verdict, AkrVerdict::Member);
    assert_eq!(report.tolerance, 1e-6);
    unsafe { akr_function_free(f) };
}

#[test]
fn version_is_nul_terminated() {
    let v = unsafe { CStr::from_ptr(akr_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}
