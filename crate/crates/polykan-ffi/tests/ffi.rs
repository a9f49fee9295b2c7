//! Exercises the C surface through the exported extern "C" functions:
//! handle lifecycle, status codes, and the JSON round trip other languages
//! will rely on.

use polykan_ffi::*;
use std::ffi::{CStr, CString};
use std::ptr;

fn generate(arch: &[usize], knots: usize, seed: u64) -> *mut PkNetwork {
    let target = CString::new("random").unwrap();
    let mut net: *mut PkNetwork = ptr::null_mut();
    let status = unsafe {
        pk_network_generate(
            arch.as_ptr(),
            arch.len(),
            3,
            knots,
            seed,
            target.as_ptr(),
            &mut net,
        )
    };
    assert_eq!(status, PkStatus::Ok);
    assert!(!net.is_null());
    net
}

fn take_string(ptr: *mut std::ffi::c_char) -> String {
    let s = unsafe { CStr::from_ptr(ptr) }.to_str().unwrap().to_string();
    unsafe { pk_string_free(ptr) };
    s
}

#[test]
fn version_is_exposed() {
    let v = unsafe { CStr::from_ptr(pk_version()) };
    assert!(!v.to_str().unwrap().is_empty());
}

#[test]
fn json_round_trip_through_the_abi() {
    let net = generate(&[2, 3, 1], 5, 42);
    let mut json_ptr = ptr::null_mut();
    assert_eq!(
        unsafe { pk_network_to_json(net, &mut json_ptr) },
        PkStatus::Ok
    );
    let json = take_string(json_ptr);
    assert!(json.contains("polykan/1"));

    let cjson = CString::new(json.clone()).unwrap();
    let mut reloaded = ptr::null_mut();
    assert_eq!(
        unsafe { pk_network_from_json(cjson.as_ptr(), &mut reloaded) },
        PkStatus::Ok
    );
    let mut again_ptr = ptr::null_mut();
    assert_eq!(
        unsafe { pk_network_to_json(reloaded, &mut again_ptr) },
        PkStatus::Ok
    );
    assert_eq!(take_string(again_ptr), json);

    unsafe {
        assert_eq!(pk_network_input_dim(net), 2);
        assert_eq!(pk_network_output_dim(net), 1);
        assert_eq!(pk_network_depth(net), 2);
        assert_eq!(pk_network_knot_total(net), 45);
    }

    unsafe {
        pk_network_free(net);
        pk_network_free(reloaded);
    }
}

#[test]
fn parse_errors_set_status_and_message() {
    let bad = CString::new("{\"format\": \"polykan/9\"}").unwrap();
    let mut net = ptr::null_mut();
    let status = unsafe { pk_network_from_json(bad.as_ptr(), &mut net) };
    assert_eq!(status, PkStatus::Parse);
    assert!(net.is_null());
    let msg = unsafe { CStr::from_ptr(pk_last_error()) }.to_str().unwrap();
    assert!(msg.contains("format"), "message was {msg:?}");
}

#[test]
fn forward_checks_shapes_and_evaluates() {
    let net = generate(&[2, 1], 5, 7);
    let xs = [0.25f64, -0.5];
    let mut ys = [0.0f64];
    assert_eq!(
        unsafe { pk_network_forward(net, xs.as_ptr(), 2, ys.as_mut_ptr(), 1) },
        PkStatus::Ok
    );
    assert!(ys[0].is_finite());

    // wrong lengths are rejected before any evaluation
    assert_eq!(
        unsafe { pk_network_forward(net, xs.as_ptr(), 1, ys.as_mut_ptr(), 1) },
        PkStatus::ShapeMismatch
    );
    unsafe { pk_network_free(net) };
}

#[test]
fn compress_and_verify_through_the_abi() {
    let net = generate(&[3, 1], 8, 17);
    let mut compressed = ptr::null_mut();
    let mut report_ptr = ptr::null_mut();
    assert_eq!(
        unsafe { pk_network_compress(net, 0.03, &mut compressed, &mut report_ptr) },
        PkStatus::Ok
    );
    let report = take_string(report_ptr);
    assert!(report.contains("polykan-report/1"));
    unsafe {
        assert!(pk_network_knot_total(compressed) <= pk_network_knot_total(net));
    }

    let mut gap = f64::NAN;
    assert_eq!(
        unsafe { pk_verify_equivalence(net, compressed, 17, 512, &mut gap) },
        PkStatus::Ok
    );
    assert!(gap <= 0.03, "single-layer gap {gap} within eps");

    // invalid eps surfaces as an argument error
    let mut dummy = ptr::null_mut();
    assert_eq!(
        unsafe { pk_network_compress(net, 0.0, &mut dummy, ptr::null_mut()) },
        PkStatus::InvalidArgument
    );

    unsafe {
        pk_network_free(net);
        pk_network_free(compressed);
    }
}

#[test]
fn null_arguments_are_rejected_not_crashed() {
    let mut out = ptr::null_mut();
    assert_eq!(
        unsafe { pk_network_from_json(ptr::null(), &mut out) },
        PkStatus::InvalidArgument
    );
    assert_eq!(unsafe { pk_network_input_dim(ptr::null()) }, 0);
    unsafe {
        pk_network_free(ptr::null_mut());
        pk_string_free(ptr::null_mut());
    }
}

#[test]
fn generate_rejects_unknown_target() {
    let target = CString::new("sinc").unwrap();
    let arch = [2usize, 1];
    let mut net = ptr::null_mut();
    let status =
        unsafe { pk_network_generate(arch.as_ptr(), 2, 3, 5, 0, target.as_ptr(), &mut net) };
    assert_eq!(status, PkStatus::InvalidArgument);
}
