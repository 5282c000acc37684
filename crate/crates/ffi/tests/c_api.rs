use std::ffi::CStr;
use std::ptr;

use paving_ffi::*;

fn random(n: usize, rank: usize, seed: u64) -> *mut PavingProjection {
    let mut h = ptr::null_mut();
    let st = unsafe { paving_projection_random(n, rank, seed, &mut h) };
    assert_eq!(st, PavingStatus::Ok);
    assert!(!h.is_null());
    h
}

#[test]
fn handle_lifecycle_and_accessors() {
    let h = random(10, 4, 7);
    unsafe {
        assert_eq!(paving_projection_dim(h), 10);
        assert_eq!(paving_projection_rank(h), 4);
        let mut d = 0.0;
        assert_eq!(paving_delta_p(h, &mut d), PavingStatus::Ok);
        assert!(d > 0.0 && d <= 1.0);
        paving_projection_free(h);
        paving_projection_free(ptr::null_mut());
        assert_eq!(paving_projection_dim(ptr::null()), 0);
    }
}

#[test]
fn from_rows_identity_block() {
    // Rows e1, e2 in R^3.
    let rows = [1.0, 0.0, 0.0, 0.0, 1.0, 0.0];
    let mut h = ptr::null_mut();
    unsafe {
        assert_eq!(paving_projection_from_rows(rows.as_ptr(), 2, 3, &mut h), PavingStatus::Ok);
        let mut d = 0.0;
        paving_delta_p(h, &mut d);
        assert!((d - 1.0).abs() < 1e-15);
        let signs = [1i8, -1, 1];
        let mut norm = 0.0;
        assert_eq!(paving_psp_norm(h, signs.as_ptr(), 3, &mut norm), PavingStatus::Ok);
        assert!((norm - 1.0).abs() < 1e-12);
        paving_projection_free(h);
    }
}

#[test]
fn non_orthonormal_rows_rejected() {
    let rows = [1.0, 1.0, 0.0];
    let mut h = ptr::null_mut();
    let st = unsafe { paving_projection_from_rows(rows.as_ptr(), 1, 3, &mut h) };
    assert_eq!(st, PavingStatus::InvalidArgument);
    assert!(h.is_null());
    assert!(last_error_string().is_some());
}

#[test]
fn null_pointers_reported() {
    unsafe {
        assert_eq!(paving_projection_random(4, 2, 0, ptr::null_mut()), PavingStatus::NullPointer);
        let mut d = 0.0;
        assert_eq!(paving_delta_p(ptr::null(), &mut d), PavingStatus::NullPointer);
    }
    let msg = last_error_string().unwrap();
    assert!(msg.contains("null"), "{msg}");
}

#[test]
fn brute_force_agrees_with_direct_evaluation() {
    let h = random(8, 3, 11);
    let mut norm = 0.0;
    let mut signs = [0i8; 8];
    unsafe {
        assert_eq!(
            paving_brute_force_min(h, 24, &mut norm, signs.as_mut_ptr(), signs.len()),
            PavingStatus::Ok
        );
        assert!(signs.iter().all(|&s| s == 1 || s == -1));
        assert_eq!(signs[0], 1);
        let mut direct = 0.0;
        paving_psp_norm(h, signs.as_ptr(), signs.len(), &mut direct);
        assert!((direct - norm).abs() < 1e-12);
        paving_projection_free(h);
    }
}

#[test]
fn brute_force_cap_and_buffer_length() {
    let h = random(10, 3, 1);
    let mut norm = 0.0;
    let mut signs = [0i8; 10];
    unsafe {
        assert_eq!(
            paving_brute_force_min(h, 8, &mut norm, signs.as_mut_ptr(), signs.len()),
            PavingStatus::CapExceeded
        );
        assert_eq!(
            paving_brute_force_min(h, 24, &mut norm, signs.as_mut_ptr(), 9),
            PavingStatus::InvalidArgument
        );
        paving_projection_free(h);
    }
}

#[test]
fn theorem1_respects_bound() {
    let h = random(12, 3, 5);
    let v: Vec<f64> = (0..12).map(|i| (i as f64 * 0.7).sin()).collect();
    let mut signs = [0i8; 12];
    let (mut norm, mut bound) = (0.0, 0.0);
    unsafe {
        let st = paving_theorem1(h, v.as_ptr(), v.len(), signs.as_mut_ptr(), 12, &mut norm, &mut bound);
        assert_eq!(st, PavingStatus::Ok);
        assert!(norm <= bound + 1e-9);
        paving_projection_free(h);
    }
}

#[test]
fn weaver_handle_dimensions() {
    let mut h = ptr::null_mut();
    unsafe {
        assert_eq!(paving_projection_weaver(2, &mut h), PavingStatus::Ok);
        // 2m^3 + 8m^2 + 7m + 2 and 2m + 2 at m = 2.
        assert_eq!(paving_projection_dim(h), 64);
        assert_eq!(paving_projection_rank(h), 6);
        paving_projection_free(h);
        assert_eq!(paving_projection_weaver(1, &mut h), PavingStatus::InvalidArgument);
    }
}

#[test]
fn certificate_json_round_trip() {
    let mut s = ptr::null_mut();
    unsafe {
        assert_eq!(paving_weaver_certificate_json(8, &mut s), PavingStatus::Ok);
        let text = CStr::from_ptr(s).to_str().unwrap().to_owned();
        paving_string_free(s);
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["m"], 8);
        assert_eq!(v["min_norm_sq"], "2/729");
        assert_eq!(v["verdict"], "FALSIFIES_A");
    }
}

#[test]
fn version_is_package_version() {
    let v = unsafe { CStr::from_ptr(paving_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_declares_every_export() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/paving.h")).unwrap();
    for sym in [
        "paving_version",
        "paving_last_error",
        "paving_projection_random",
        "paving_projection_from_rows",
        "paving_projection_weaver",
        "paving_projection_free",
        "paving_projection_dim",
        "paving_projection_rank",
        "paving_delta_p",
        "paving_psp_norm",
        "paving_brute_force_min",
        "paving_theorem1",
        "paving_weaver_certificate_json",
        "paving_string_free",
        "PAVING_STATUS_CAP_EXCEEDED",
        "typedef struct PavingProjection PavingProjection",
    ] {
        assert!(header.contains(sym), "header lacks {sym}");
    }
}
