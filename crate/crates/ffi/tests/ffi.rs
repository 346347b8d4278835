use std::ffi::CStr;
use std::ptr;

use bridgecut_ffi::*;

fn last_error() -> String {
    let mut buf = vec![0 as std::ffi::c_char; 512];
    let n = unsafe { bc_last_error_message(buf.as_mut_ptr(), buf.len()) };
    assert_eq!(n, bc_last_error_length());
    unsafe { CStr::from_ptr(buf.as_ptr()) }.to_string_lossy().into_owned()
}

fn rng(seed: u64, stream: u64) -> *mut BcRng {
    let mut r = ptr::null_mut();
    assert_eq!(unsafe { bc_rng_new(seed, stream, &mut r) }, BcStatus::Ok);
    r
}

#[test]
fn version_is_package_version() {
    let v = unsafe { CStr::from_ptr(bc_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

#[test]
fn streams_are_reproducible() {
    let draw = |seed, stream| {
        let r = rng(seed, stream);
        let mut x = 0.0;
        assert_eq!(unsafe { bc_sample_stable(r, 0.5, std::f64::consts::SQRT_2, 1.0, &mut x) }, BcStatus::Ok);
        unsafe { bc_rng_free(r) };
        x
    };
    assert_eq!(draw(4, 2), draw(4, 2));
    assert_ne!(draw(4, 2), draw(4, 3));
}

#[test]
fn invalid_arguments_set_the_message() {
    let r = rng(1, 0);
    let mut x = 0.0;
    assert_eq!(unsafe { bc_sample_stable(r, 1.5, 1.0, 1.0, &mut x) }, BcStatus::InvalidArgument);
    assert!(last_error().contains("invalid parameter"));
    assert_eq!(unsafe { bc_rng_uniform(ptr::null_mut(), &mut x) }, BcStatus::NullPointer);
    assert_eq!(last_error(), "rng is null");
    assert_eq!(unsafe { bc_rng_uniform(r, ptr::null_mut()) }, BcStatus::NullPointer);
    unsafe { bc_rng_free(r) };
    unsafe { bc_rng_free(ptr::null_mut()) };
}

#[test]
fn truncated_error_message_is_terminated() {
    let mut x = 0.0;
    unsafe { bc_rng_uniform(ptr::null_mut(), &mut x) };
    let mut buf = [1 as std::ffi::c_char; 4];
    let n = unsafe { bc_last_error_message(buf.as_mut_ptr(), buf.len()) };
    assert_eq!(n, "rng is null".len());
    assert_eq!(unsafe { CStr::from_ptr(buf.as_ptr()) }.to_bytes(), b"rng");
}

#[test]
fn gem_reports_needed_capacity() {
    let (a, b) = (rng(2, 0), rng(2, 0));
    let mut len = 0;
    let mut residual = 0.0;
    let s = unsafe { bc_sample_gem(a, 0.5, 1e-9, ptr::null_mut(), 0, &mut len, &mut residual) };
    assert_eq!(s, BcStatus::BufferTooSmall);
    assert!(len > 0);
    let mut buf = vec![0.0; len];
    let mut len2 = 0;
    let s = unsafe { bc_sample_gem(b, 0.5, 1e-9, buf.as_mut_ptr(), buf.len(), &mut len2, &mut residual) };
    assert_eq!(s, BcStatus::Ok);
    assert_eq!(len, len2);
    assert!((buf.iter().sum::<f64>() + residual - 1.0).abs() < 1e-12);
    assert!(residual < 1e-9);
    unsafe {
        bc_rng_free(a);
        bc_rng_free(b);
    }
}

#[test]
fn bridge_handle_round_trip() {
    let r = rng(3, 0);
    let mut b = ptr::null_mut();
    assert_eq!(unsafe { bc_bridge_simulate(r, 1024, false, &mut b) }, BcStatus::Ok);
    let mut m = 0;
    assert_eq!(unsafe { bc_bridge_steps(b, &mut m) }, BcStatus::Ok);
    assert_eq!(m, 1024);
    let mut values = vec![0.0; m + 1];
    let mut times = vec![0.0; m + 1];
    let mut len = 0;
    assert_eq!(unsafe { bc_bridge_values(b, values.as_mut_ptr(), values.len(), &mut len) }, BcStatus::Ok);
    assert_eq!(len, m + 1);
    assert_eq!((values[0], values[m]), (0.0, 0.0));
    assert_eq!(unsafe { bc_bridge_times(b, times.as_mut_ptr(), times.len(), &mut len) }, BcStatus::Ok);
    assert!((times[m] - 1.0).abs() < 1e-12);
    let mut lt = 0.0;
    assert_eq!(unsafe { bc_bridge_local_time(b, &mut lt) }, BcStatus::Ok);
    assert!(lt > 0.0);
    for kind in [BcPartitionKind::D, BcPartitionKind::T] {
        let mut parts = vec![0.0; m];
        assert_eq!(
            unsafe { bc_bridge_partition(b, r, kind, parts.as_mut_ptr(), parts.len(), &mut len) },
            BcStatus::Ok
        );
        assert!(len >= 1);
        assert!((parts[..len].iter().sum::<f64>() - 1.0).abs() < 1e-9);
    }
    unsafe {
        bc_bridge_free(b);
        bc_rng_free(r);
    }
}

#[test]
fn pseudo_bridge_handle() {
    let r = rng(5, 0);
    let mut b = ptr::null_mut();
    assert_eq!(unsafe { bc_bridge_simulate(r, 512, true, &mut b) }, BcStatus::Ok);
    let mut lt = 0.0;
    assert_eq!(unsafe { bc_bridge_local_time(b, &mut lt) }, BcStatus::Ok);
    assert!(lt > 0.0);
    unsafe {
        bc_bridge_free(b);
        bc_rng_free(r);
    }
}

#[test]
fn t_counts_match_small_cases() {
    let mut p = [0.0; 3];
    let mut len = 0;
    assert_eq!(unsafe { bc_t_count_probabilities(3, p.as_mut_ptr(), p.len(), &mut len) }, BcStatus::Ok);
    assert_eq!(len, 3);
    // Stirling cycle law: |s(3,k)| / 3!
    for (got, want) in p.iter().zip([1.0 / 3.0, 0.5, 1.0 / 6.0]) {
        assert!((got - want).abs() < 1e-15);
    }
}

#[test]
fn verifier_runs_an_exact_criterion() {
    let mut v = ptr::null_mut();
    assert_eq!(unsafe { bc_verifier_new(1, 200, 1024, &mut v) }, BcStatus::Ok);
    let mut passed = false;
    assert_eq!(unsafe { bc_verifier_criterion(v, 3, &mut passed) }, BcStatus::Ok);
    assert!(passed);
    assert_eq!(unsafe { bc_verifier_criterion(v, 13, &mut passed) }, BcStatus::InvalidArgument);
    unsafe { bc_verifier_free(v) };
    let mut v = ptr::null_mut();
    assert_eq!(unsafe { bc_verifier_new(1, 10, 1024, &mut v) }, BcStatus::InvalidArgument);
    assert!(v.is_null());
}

#[test]
fn header_declares_the_api() {
    let h = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/bridgecut.h")).unwrap();
    for name in [
        "BC_STATUS_BUFFER_TOO_SMALL",
        "typedef struct BcRng BcRng",
        "bc_last_error_message",
        "bc_bridge_partition",
        "bc_verifier_criterion",
    ] {
        assert!(h.contains(name), "{name} missing from header");
    }
}
