//! C ABI for the qcoh engine.
//!
//! Every call returns a [`QcohStatus`]. On failure the message and the
//! engine's error kind are available from [`qcoh_last_error_message`] and
//! [`qcoh_last_error_kind`] on the same thread until the next call.
//!
//! Strings handed out by accessors are borrowed from their handle and stay
//! valid until the handle is freed.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use clap::Parser;
use qcoh::cli::{run, Cli};
use qcoh::localization::{assemble_f, LocConfig};
use qcoh::{fmt_q, parse_q, Error};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QcohStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    /// Command line arguments were rejected.
    Usage = 3,
    InvalidInput = 4,
    /// A division or inversion hit a zero or non-invertible leading term.
    Numeric = 5,
    /// The truncation box, window or order is too small for the request.
    Truncation = 6,
    NotConverged = 7,
    /// Internal consistency check failed.
    Inconsistent = 8,
    /// A `verify` command ran but at least one check failed.
    VerifyFailed = 9,
    Panic = 10,
}

/// Result of [`qcoh_run`].
#[repr(C)]
pub struct QcohOutput {
    _private: [u8; 0],
}

/// Rational coefficients produced by [`qcoh_localize`].
#[repr(C)]
pub struct QcohCoefficients {
    _private: [u8; 0],
}

struct OutputInner {
    json: CString,
    text: CString,
    ok: bool,
}

struct CoefficientsInner {
    values: Vec<CString>,
}

struct LastError {
    message: CString,
    kind: CString,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<LastError>> = const { RefCell::new(None) };
}

fn c_string(s: impl Into<Vec<u8>>) -> CString {
    CString::new(s).unwrap_or_else(|e| {
        let mut v = e.into_vec();
        v.retain(|&b| b != 0);
        CString::new(v).expect("nul bytes removed")
    })
}

fn set_error(kind: &str, message: &str) {
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(LastError { message: c_string(message), kind: c_string(kind) }));
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn status_of(e: &Error) -> QcohStatus {
    match e {
        Error::Invalid(_) | Error::NotAHomomorphism(_) | Error::InconsistentRelations | Error::NotFiniteDimensional(_) => {
            QcohStatus::InvalidInput
        }
        Error::ZeroDenominator | Error::Singular | Error::NonInvertibleFactor(_) | Error::BadConstantTerm(_) => {
            QcohStatus::Numeric
        }
        Error::WindowTooSmall(_)
        | Error::BoxOverflow
        | Error::BoxMismatch
        | Error::UnboundedExpansion(_)
        | Error::OrderTooLow => QcohStatus::Truncation,
        Error::NotConverged => QcohStatus::NotConverged,
        Error::RingMismatch
        | Error::GaugeResidual(_)
        | Error::NotHbarFree
        | Error::InconsistentJacobian(_)
        | Error::NoOperatorsFound
        | Error::Underdetermined(_)
        | Error::Inconsistent(_) => QcohStatus::Inconsistent,
    }
}

fn fail(e: &Error) -> QcohStatus {
    set_error(e.kind(), &e.to_string());
    status_of(e)
}

/// Runs `f` with panics turned into [`QcohStatus::Panic`].
fn guard(f: impl FnOnce() -> QcohStatus) -> QcohStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error("Panic", &msg);
            QcohStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char) -> Result<&'a str, QcohStatus> {
    if p.is_null() {
        set_error("NullArgument", "null string argument");
        return Err(QcohStatus::NullArgument);
    }
    CStr::from_ptr(p).to_str().map_err(|_| {
        set_error("InvalidUtf8", "argument is not UTF-8");
        QcohStatus::InvalidUtf8
    })
}

/// Runs a command exactly as the `qcoh` binary would, given its arguments
/// without the program name (e.g. `{"localize", "--k", "2"}`).
///
/// On success, and also when a `verify` command ran but failed, `*out`
/// receives a handle to release with [`qcoh_output_free`].
///
/// # Safety
/// `argv` must point to `argc` valid NUL-terminated strings and `out` must be
/// a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qcoh_run(argc: usize, argv: *const *const c_char, out: *mut *mut QcohOutput) -> QcohStatus {
    guard(|| {
        if out.is_null() || (argv.is_null() && argc > 0) {
            set_error("NullArgument", "null argv or out");
            return QcohStatus::NullArgument;
        }
        *out = ptr::null_mut();
        let mut args = vec!["qcoh".to_string()];
        for i in 0..argc {
            match str_arg(*argv.add(i)) {
                Ok(s) => args.push(s.to_string()),
                Err(s) => return s,
            }
        }
        let cli = match Cli::try_parse_from(&args) {
            Ok(c) => c,
            Err(e) => {
                set_error("Usage", &e.to_string());
                return QcohStatus::Usage;
            }
        };
        match run(&cli) {
            Ok(o) => {
                let inner = OutputInner {
                    json: c_string(o.json.to_string()),
                    text: c_string(o.text),
                    ok: o.ok,
                };
                *out = Box::into_raw(Box::new(inner)) as *mut QcohOutput;
                if o.ok {
                    QcohStatus::Ok
                } else {
                    set_error("VerifyFailed", "at least one check failed");
                    QcohStatus::VerifyFailed
                }
            }
            Err(e) => fail(&e),
        }
    })
}

unsafe fn output<'a>(o: *const QcohOutput) -> Option<&'a OutputInner> {
    (o as *const OutputInner).as_ref()
}

/// Canonical compact JSON of the result, or NULL for a NULL handle.
///
/// # Safety
/// `o` must be NULL or a live handle from [`qcoh_run`].
#[no_mangle]
pub unsafe extern "C" fn qcoh_output_json(o: *const QcohOutput) -> *const c_char {
    output(o).map_or(ptr::null(), |o| o.json.as_ptr())
}

/// Human-readable rendering of the result, or NULL for a NULL handle.
///
/// # Safety
/// `o` must be NULL or a live handle from [`qcoh_run`].
#[no_mangle]
pub unsafe extern "C" fn qcoh_output_text(o: *const QcohOutput) -> *const c_char {
    output(o).map_or(ptr::null(), |o| o.text.as_ptr())
}

/// False when a verification in the result failed.
///
/// # Safety
/// `o` must be NULL or a live handle from [`qcoh_run`].
#[no_mangle]
pub unsafe extern "C" fn qcoh_output_ok(o: *const QcohOutput) -> bool {
    output(o).is_some_and(|o| o.ok)
}

/// # Safety
/// `o` must be NULL or a handle from [`qcoh_run`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn qcoh_output_free(o: *mut QcohOutput) {
    if !o.is_null() {
        drop(Box::from_raw(o as *mut OutputInner));
    }
}

/// Localization graph sum for `O(k) + O(-2-k)` over P1 with weight ratio
/// `z` (a string such as `"-1/2"`): the `q^1 .. q^d_max` coefficients.
///
/// # Safety
/// `z` must be a valid NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qcoh_localize(
    k: u32,
    z: *const c_char,
    d_max: u32,
    out: *mut *mut QcohCoefficients,
) -> QcohStatus {
    guard(|| {
        if out.is_null() {
            set_error("NullArgument", "null out");
            return QcohStatus::NullArgument;
        }
        *out = ptr::null_mut();
        let z = match str_arg(z) {
            Ok(s) => s,
            Err(s) => return s,
        };
        let result = parse_q(z).and_then(|z| assemble_f(&LocConfig::new(k, z, d_max)));
        match result {
            Ok(a) => {
                let values = a.coeffs.iter().map(|c| c_string(fmt_q(c))).collect();
                *out = Box::into_raw(Box::new(CoefficientsInner { values })) as *mut QcohCoefficients;
                QcohStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

unsafe fn coefficients<'a>(c: *const QcohCoefficients) -> Option<&'a CoefficientsInner> {
    (c as *const CoefficientsInner).as_ref()
}

/// # Safety
/// `c` must be NULL or a live handle from [`qcoh_localize`].
#[no_mangle]
pub unsafe extern "C" fn qcoh_coefficients_len(c: *const QcohCoefficients) -> usize {
    coefficients(c).map_or(0, |c| c.values.len())
}

/// The coefficient of `q^(i+1)` as `"num/den"`, or NULL when out of range.
///
/// # Safety
/// `c` must be NULL or a live handle from [`qcoh_localize`].
#[no_mangle]
pub unsafe extern "C" fn qcoh_coefficients_get(c: *const QcohCoefficients, i: usize) -> *const c_char {
    coefficients(c).and_then(|c| c.values.get(i)).map_or(ptr::null(), |s| s.as_ptr())
}

/// # Safety
/// `c` must be NULL or a handle from [`qcoh_localize`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn qcoh_coefficients_free(c: *mut QcohCoefficients) {
    if !c.is_null() {
        drop(Box::from_raw(c as *mut CoefficientsInner));
    }
}

/// Message of the last failure on this thread, or NULL.
#[no_mangle]
pub extern "C" fn qcoh_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |e| e.message.as_ptr()))
}

/// Engine error kind of the last failure on this thread (e.g.
/// `"WindowTooSmall"`), or NULL.
#[no_mangle]
pub extern "C" fn qcoh_last_error_kind() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |e| e.kind.as_ptr()))
}

#[no_mangle]
pub extern "C" fn qcoh_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}
