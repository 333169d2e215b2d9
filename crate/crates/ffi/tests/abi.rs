use std::ffi::{CStr, CString};
use std::path::Path;
use std::process::Command;
use std::ptr;

use isodist_ffi::*;

fn last_error() -> String {
    let p = isodist_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn phi_inv_round_trip() {
    let mut a = 0.0;
    assert_eq!(isodist_phi_inv(0.1, &mut a), IsodistStatus::Ok);
    assert!((a + 0.511_265_104_010_389).abs() < 1e-12);
    assert!((isodist_phi(a) - 0.1).abs() < 1e-15);
    assert!(isodist_last_error_message().is_null());
}

#[test]
fn domain_error_sets_message() {
    let mut a = 7.0;
    assert_eq!(isodist_phi_inv(1.5, &mut a), IsodistStatus::Domain);
    assert_eq!(a, 7.0);
    assert!(!last_error().is_empty());
    assert_eq!(isodist_psi_p_inv(0.1, 3.0, &mut a), IsodistStatus::Domain);
}

#[test]
fn null_out_pointer() {
    assert_eq!(isodist_phi_inv(0.1, ptr::null_mut()), IsodistStatus::NullPointer);
    assert!(last_error().contains("null"));
}

#[test]
fn radius_of_disk() {
    let mut r = 0.0;
    assert_eq!(isodist_unit_volume_radius(IsodistFamily::Ball, 0.0, 2, &mut r), IsodistStatus::Ok);
    assert!((r - 1.0 / std::f64::consts::PI.sqrt()).abs() < 1e-14);
    assert_eq!(isodist_unit_volume_radius(IsodistFamily::Lp, 1.0, 2, &mut r), IsodistStatus::Ok);
    assert!((r - 0.5f64.sqrt()).abs() < 1e-14);
    assert_eq!(isodist_unit_volume_radius(IsodistFamily::Cube, 0.0, 0, &mut r), IsodistStatus::Domain);
}

#[test]
fn ball_report_through_abi() {
    let mut rep = IsodistBoundReport::default();
    let st = unsafe { isodist_bound_report(IsodistFamily::Ball, 0.0, 0.1, 40, ptr::null(), &mut rep) };
    assert_eq!(st, IsodistStatus::Ok);
    assert_eq!(rep.lower, rep.upper);
    assert!(rep.has_exact_limit && rep.has_witness_distance && !rep.has_manhattan_limit);
    assert!((rep.upper - 0.620_195_921_646_94).abs() < 1e-12);
    assert!(!rep.parametric);
}

#[test]
fn constants_handle_lifecycle() {
    let c = isodist_constants_new();
    let key = CString::new("c_lambda").unwrap();
    assert_eq!(unsafe { isodist_constants_set(c, key.as_ptr(), 2.0) }, IsodistStatus::Ok);
    assert_eq!(unsafe { isodist_constants_set(c, key.as_ptr(), -1.0) }, IsodistStatus::Domain);
    let bad = CString::new("nope").unwrap();
    assert_eq!(unsafe { isodist_constants_set(c, bad.as_ptr(), 1.0) }, IsodistStatus::Parse);

    let mut a = IsodistBoundReport::default();
    let mut b = IsodistBoundReport::default();
    unsafe {
        assert_eq!(isodist_bound_report(IsodistFamily::Simplex, 0.0, 0.1, 0, ptr::null(), &mut a), IsodistStatus::Ok);
        assert_eq!(isodist_bound_report(IsodistFamily::Simplex, 0.0, 0.1, 0, c, &mut b), IsodistStatus::Ok);
        isodist_constants_free(c);
    }
    assert!(b.parametric);
    // The rejected -1.0 left c_lambda at 2, halving the upper bound.
    assert!((b.upper - a.upper / 2.0).abs() < 1e-12);
}

#[test]
fn constants_parse() {
    let text = CString::new("c_lambda = 4\n# comment\nc_iso@1.5 = 2\n").unwrap();
    let mut h = ptr::null_mut();
    assert_eq!(unsafe { isodist_constants_parse(text.as_ptr(), &mut h) }, IsodistStatus::Ok);
    assert!(!h.is_null());
    unsafe { isodist_constants_free(h) };
    let bad = CString::new("c_lambda 4").unwrap();
    let mut h = ptr::null_mut();
    assert_eq!(unsafe { isodist_constants_parse(bad.as_ptr(), &mut h) }, IsodistStatus::Parse);
    assert!(h.is_null());
    assert_eq!(unsafe { isodist_constants_parse(ptr::null(), &mut h) }, IsodistStatus::NullPointer);
}

#[test]
fn extremal_pairs_and_budget() {
    let mut c = IsodistExtremalCheck::default();
    assert_eq!(isodist_verify_extremal_pairs(3, 2, 2, 3, 10_000_000, &mut c), IsodistStatus::Ok);
    assert!(c.agree);
    assert_eq!(c.brute_max, c.segment_distance);
    assert_eq!(isodist_verify_extremal_pairs(2, 5, 8, 8, 10, &mut c), IsodistStatus::BudgetExceeded);
    assert!(last_error().contains("budget"));
}

#[test]
fn scaling_report() {
    let mut r = IsodistScalingReport::default();
    assert_eq!(isodist_scaled_max_distance(30, 64, 0.1, 10_000_000, &mut r), IsodistStatus::Ok);
    assert!((r.lattice_value / 0.739_904_141_347_56 - 1.0).abs() < 0.1);
}

#[test]
fn sample_batch_handle() {
    let mut b = ptr::null_mut();
    let st = unsafe { isodist_sample_uniform(IsodistFamily::Simplex, 0.0, 4, 100, 9, &mut b) };
    assert_eq!(st, IsodistStatus::Ok);
    unsafe {
        assert_eq!(isodist_sample_batch_dim(b), 4);
        assert_eq!(isodist_sample_batch_len(b), 100);
        let pts = std::slice::from_raw_parts(isodist_sample_batch_points(b), 400);
        let omega = {
            let mut r = 0.0;
            isodist_unit_volume_radius(IsodistFamily::Simplex, 0.0, 4, &mut r);
            r
        };
        for row in pts.chunks(4) {
            assert!(row.iter().all(|&x| x >= 0.0));
            assert!((row.iter().sum::<f64>() - omega).abs() < 1e-12);
        }
        isodist_sample_batch_free(b);
        assert_eq!(isodist_sample_batch_len(ptr::null()), 0);
        isodist_sample_batch_free(ptr::null_mut());
    }
}

#[test]
fn version_string() {
    let v = unsafe { CStr::from_ptr(isodist_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_declares_the_api() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR"));
    let header = std::fs::read_to_string(dir.join("include/isodist.h")).unwrap();
    for name in ["isodist_phi_inv", "isodist_bound_report", "isodist_constants_free", "isodist_sample_batch_points"] {
        assert!(header.contains(name), "{name} missing from header");
    }
    // Compile a C caller against the header when a C compiler is around.
    let Ok(status) = Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-I"])
        .arg(dir.join("include"))
        .arg(dir.join("tests/c/smoke.c"))
        .status()
    else {
        eprintln!("no C compiler; skipping header compile");
        return;
    };
    assert!(status.success());
}
