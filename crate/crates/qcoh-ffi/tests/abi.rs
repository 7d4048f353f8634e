use std::ffi::{c_char, CStr, CString};
use std::process::Command;
use std::ptr;

use qcoh_ffi::*;

unsafe fn text<'a>(p: *const c_char) -> &'a str {
    assert!(!p.is_null());
    CStr::from_ptr(p).to_str().unwrap()
}

fn run(args: &[&str]) -> (QcohStatus, *mut QcohOutput) {
    let owned: Vec<CString> = args.iter().map(|a| CString::new(*a).unwrap()).collect();
    let argv: Vec<*const c_char> = owned.iter().map(|a| a.as_ptr()).collect();
    let mut out = ptr::null_mut();
    let status = unsafe { qcoh_run(argv.len(), argv.as_ptr(), &mut out) };
    (status, out)
}

#[test]
fn localize_returns_exact_rationals() {
    let z = CString::new("-1").unwrap();
    let mut c = ptr::null_mut();
    unsafe {
        assert_eq!(qcoh_localize(2, z.as_ptr(), 4, &mut c), QcohStatus::Ok);
        assert_eq!(qcoh_coefficients_len(c), 4);
        let got: Vec<&str> = (0..4).map(|i| text(qcoh_coefficients_get(c, i))).collect();
        assert_eq!(got, ["1/1", "17/8", "325/27", "6545/64"]);
        assert!(qcoh_coefficients_get(c, 4).is_null());
        qcoh_coefficients_free(c);
    }
}

#[test]
fn run_matches_the_command_line() {
    let (status, out) = run(&["ring", "--preset", "F3"]);
    assert_eq!(status, QcohStatus::Ok);
    unsafe {
        assert!(qcoh_output_ok(out));
        let json: serde_json::Value = serde_json::from_str(text(qcoh_output_json(out))).unwrap();
        assert_eq!(json["basis"].as_array().unwrap().len(), 4);
        assert!(!text(qcoh_output_text(out)).is_empty());
        qcoh_output_free(out);
    }
}

#[test]
fn engine_errors_carry_their_kind() {
    let (status, out) = run(&["localize", "--k", "1", "--z", "1", "--dmax", "4", "--lambda-order", "2"]);
    assert_eq!(status, QcohStatus::Truncation);
    assert!(out.is_null());
    unsafe {
        assert_eq!(text(qcoh_last_error_kind()), "WindowTooSmall");
        assert!(!text(qcoh_last_error_message()).is_empty());
    }
}

#[test]
fn usage_and_null_arguments() {
    assert_eq!(run(&["localize", "--k"]).0, QcohStatus::Usage);
    let mut c = ptr::null_mut();
    unsafe {
        assert_eq!(qcoh_localize(1, ptr::null(), 3, &mut c), QcohStatus::NullArgument);
        assert_eq!(qcoh_run(1, ptr::null(), ptr::null_mut()), QcohStatus::NullArgument);
        assert_eq!(qcoh_coefficients_len(ptr::null()), 0);
        qcoh_output_free(ptr::null_mut());
    }
    let bad = CString::new("1/0").unwrap();
    unsafe {
        assert_eq!(qcoh_localize(1, bad.as_ptr(), 3, &mut c), QcohStatus::InvalidInput);
    }
}

#[test]
fn version_is_the_crate_version() {
    unsafe { assert_eq!(text(qcoh_version()), env!("CARGO_PKG_VERSION")) };
}

#[test]
fn header_is_valid_c() {
    let header = concat!(env!("CARGO_MANIFEST_DIR"), "/include/qcoh.h");
    let status = Command::new("cc").args(["-fsyntax-only", "-Wall", "-Werror", "-x", "c", header]).status();
    match status {
        Ok(s) => assert!(s.success()),
        Err(e) => eprintln!("skipping header check, no C compiler: {e}"),
    }
}
