//! C ABI for the polykan library.
//!
//! Networks travel across the boundary as opaque [`PkNetwork`] handles;
//! models and reports as JSON strings (the same `polykan/1` and
//! `polykan-report/1` documents the CLI reads and writes). Every fallible
//! call returns a [`PkStatus`]; the message for the most recent failure on
//! the current thread is available via [`pk_last_error`].
//!
//! Memory rules: handles are released with [`pk_network_free`], strings
//! returned through `char**` out-parameters with [`pk_string_free`].
//! Panics never unwind across the boundary; they surface as
//! `PK_STATUS_INTERNAL`.

use polykan::compressor::{self, CompressionConfig, SamplingSpec};
use polykan::network::{
    generate_synthetic, load_model, save_model, KanNetwork, NamedTarget, SynthSpec, SynthTarget,
};
use polykan::Error;
use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

/// Status code returned by every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PkStatus {
    Ok = 0,
    /// A pointer was null or an argument violated a precondition.
    InvalidArgument = 1,
    /// Malformed JSON or a schema violation.
    Parse = 2,
    /// An evaluation point left the model domain under the `error` policy.
    Domain = 3,
    /// Incompatible shapes (input vectors, network pairs).
    ShapeMismatch = 4,
    /// A panic or other internal failure; see `pk_last_error`.
    Internal = 5,
}

/// Opaque handle to a loaded network.
pub struct PkNetwork {
    inner: KanNetwork,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::new("").unwrap());
}

fn set_error(msg: &str) {
    let sanitized: String = msg.chars().filter(|c| *c != '\0').collect();
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(sanitized).unwrap();
    });
}

fn status_of(err: &Error) -> PkStatus {
    match err {
        Error::InvalidInput(_) => PkStatus::InvalidArgument,
        Error::OutOfDomain { .. } => PkStatus::Domain,
        Error::ShapeMismatch(_) => PkStatus::ShapeMismatch,
        Error::Schema { .. } | Error::Json(_) => PkStatus::Parse,
    }
}

fn fail(err: &Error) -> PkStatus {
    set_error(&err.to_string());
    status_of(err)
}

fn guarded(body: impl FnOnce() -> PkStatus) -> PkStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(status) => status,
        Err(panic) => {
            let msg = panic
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| panic.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".to_string());
            set_error(&msg);
            PkStatus::Internal
        }
    }
}

fn invalid(msg: &str) -> PkStatus {
    set_error(msg);
    PkStatus::InvalidArgument
}

unsafe fn read_utf8<'a>(ptr: *const c_char) -> Result<&'a str, PkStatus> {
    if ptr.is_null() {
        return Err(invalid("null string argument"));
    }
    unsafe { CStr::from_ptr(ptr) }.to_str().map_err(|_| {
        set_error("string argument is not valid UTF-8");
        PkStatus::InvalidArgument
    })
}

fn give_string(out: *mut *mut c_char, value: String) -> PkStatus {
    let sanitized: String = value.chars().filter(|c| *c != '\0').collect();
    let cstring = CString::new(sanitized).unwrap();
    unsafe { *out = cstring.into_raw() };
    PkStatus::Ok
}

/// Library version string; static storage, do not free.
#[no_mangle]
pub extern "C" fn pk_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Message for the most recent failure on this thread; borrowed until the
/// next failing call, do not free.
#[no_mangle]
pub extern "C" fn pk_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Frees a string returned through a `char**` out-parameter.
///
/// # Safety
/// `ptr` must be null or a pointer previously returned by this library, not
/// freed before.
#[no_mangle]
pub unsafe extern "C" fn pk_string_free(ptr: *mut c_char) {
    if !ptr.is_null() {
        drop(unsafe { CString::from_raw(ptr) });
    }
}

/// Parses a `polykan/1` JSON document into a network handle.
///
/// # Safety
/// `json` must be a valid NUL-terminated string; `out` must be a valid
/// pointer.
#[no_mangle]
pub unsafe extern "C" fn pk_network_from_json(
    json: *const c_char,
    out: *mut *mut PkNetwork,
) -> PkStatus {
    guarded(|| {
        if out.is_null() {
            return invalid("null out pointer");
        }
        let text = match unsafe { read_utf8(json) } {
            Ok(t) => t,
            Err(status) => return status,
        };
        match load_model(text) {
            Ok(net) => {
                unsafe { *out = Box::into_raw(Box::new(PkNetwork { inner: net })) };
                PkStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

/// Serializes a network to its JSON document; free the result with
/// [`pk_string_free`].
///
/// # Safety
/// `net` must be a live handle; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pk_network_to_json(
    net: *const PkNetwork,
    out: *mut *mut c_char,
) -> PkStatus {
    guarded(|| {
        if net.is_null() || out.is_null() {
            return invalid("null argument");
        }
        let net = unsafe { &*net };
        give_string(out, save_model(&net.inner))
    })
}

/// Releases a network handle.
///
/// # Safety
/// `net` must be null or a live handle; it is invalid afterwards.
#[no_mangle]
pub unsafe extern "C" fn pk_network_free(net: *mut PkNetwork) {
    if !net.is_null() {
        drop(unsafe { Box::from_raw(net) });
    }
}

/// Input dimension, or 0 for a null handle.
///
/// # Safety
/// `net` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn pk_network_input_dim(net: *const PkNetwork) -> usize {
    if net.is_null() {
        return 0;
    }
    unsafe { &*net }.inner.input_dim()
}

/// Output dimension, or 0 for a null handle.
///
/// # Safety
/// `net` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn pk_network_output_dim(net: *const PkNetwork) -> usize {
    if net.is_null() {
        return 0;
    }
    unsafe { &*net }.inner.output_dim()
}

/// Number of layers, or 0 for a null handle.
///
/// # Safety
/// `net` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn pk_network_depth(net: *const PkNetwork) -> usize {
    if net.is_null() {
        return 0;
    }
    unsafe { &*net }.inner.depth()
}

/// Total knot count across all splines, or 0 for a null handle.
///
/// # Safety
/// `net` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn pk_network_knot_total(net: *const PkNetwork) -> usize {
    if net.is_null() {
        return 0;
    }
    unsafe { &*net }.inner.knot_total()
}

/// Evaluates the network: reads `n` inputs from `xs`, writes `m` outputs to
/// `ys`. `n` and `m` must match the network shape exactly.
///
/// # Safety
/// `xs` must point to `n` readable doubles and `ys` to `m` writable ones.
#[no_mangle]
pub unsafe extern "C" fn pk_network_forward(
    net: *const PkNetwork,
    xs: *const f64,
    n: usize,
    ys: *mut f64,
    m: usize,
) -> PkStatus {
    guarded(|| {
        if net.is_null() || xs.is_null() || ys.is_null() {
            return invalid("null argument");
        }
        let net = unsafe { &*net };
        if n != net.inner.input_dim() || m != net.inner.output_dim() {
            set_error("input/output buffer lengths do not match the network shape");
            return PkStatus::ShapeMismatch;
        }
        let x = unsafe { std::slice::from_raw_parts(xs, n) };
        match net.inner.forward(x) {
            Ok(y) => {
                let out = unsafe { std::slice::from_raw_parts_mut(ys, m) };
                out.copy_from_slice(&y);
                PkStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

/// Compresses the network under a global sup-norm budget `eps` (uniform
/// layer budgets, default least-squares fits). On success `out_net` holds a
/// new handle and, when `out_report_json` is non-null, it receives the
/// `polykan-report/1` document.
///
/// # Safety
/// `net` must be a live handle; `out_net` must be valid;
/// `out_report_json` may be null.
#[no_mangle]
pub unsafe extern "C" fn pk_network_compress(
    net: *const PkNetwork,
    eps: f64,
    out_net: *mut *mut PkNetwork,
    out_report_json: *mut *mut c_char,
) -> PkStatus {
    guarded(|| {
        if net.is_null() || out_net.is_null() {
            return invalid("null argument");
        }
        let net = unsafe { &*net };
        let cfg = match CompressionConfig::new(eps) {
            Ok(c) => c,
            Err(e) => return fail(&e),
        };
        match compressor::compress_network(&net.inner, &cfg) {
            Ok((compressed, report)) => {
                unsafe { *out_net = Box::into_raw(Box::new(PkNetwork { inner: compressed })) };
                if !out_report_json.is_null() {
                    return give_string(out_report_json, report.to_json());
                }
                PkStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

/// Upper bound on the network's linear region count, written as a decimal
/// string (it overflows fixed-width integers quickly); free with
/// [`pk_string_free`].
///
/// # Safety
/// `net` must be a live handle; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pk_network_region_bound(
    net: *const PkNetwork,
    out: *mut *mut c_char,
) -> PkStatus {
    guarded(|| {
        if net.is_null() || out.is_null() {
            return invalid("null argument");
        }
        let net = unsafe { &*net };
        give_string(out, net.inner.region_bound().to_string())
    })
}

/// Sampled sup-norm gap between two networks over their shared input box
/// (`points_per_dim` grid resolution, `halton_points` low-discrepancy
/// samples).
///
/// # Safety
/// `a` and `b` must be live handles; `out_gap` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pk_verify_equivalence(
    a: *const PkNetwork,
    b: *const PkNetwork,
    points_per_dim: usize,
    halton_points: usize,
    out_gap: *mut f64,
) -> PkStatus {
    guarded(|| {
        if a.is_null() || b.is_null() || out_gap.is_null() {
            return invalid("null argument");
        }
        let a = unsafe { &*a };
        let b = unsafe { &*b };
        let sampling = SamplingSpec {
            points_per_dim,
            halton_points,
        };
        match compressor::verify_equivalence(&a.inner, &b.inner, &sampling) {
            Ok((gap, _witness)) => {
                unsafe { *out_gap = gap };
                PkStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

/// Generates a synthetic model. `arch` points to `arch_len` layer sizes;
/// `target` is one of `random`, `sin`, `exp`, `gauss`, `ramp`.
///
/// # Safety
/// `arch` must point to `arch_len` readable values; `target` must be a
/// valid NUL-terminated string; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pk_network_generate(
    arch: *const usize,
    arch_len: usize,
    degree: usize,
    knots_per_spline: usize,
    seed: u64,
    target: *const c_char,
    out: *mut *mut PkNetwork,
) -> PkStatus {
    guarded(|| {
        if arch.is_null() || out.is_null() {
            return invalid("null argument");
        }
        let name = match unsafe { read_utf8(target) } {
            Ok(t) => t,
            Err(status) => return status,
        };
        let target = if name == "random" {
            SynthTarget::RandomControls
        } else {
            match NamedTarget::parse(name) {
                Ok(t) => SynthTarget::Fit(t),
                Err(e) => return fail(&e),
            }
        };
        let architecture = unsafe { std::slice::from_raw_parts(arch, arch_len) }.to_vec();
        let spec = SynthSpec {
            architecture,
            degree,
            knots_per_spline,
            seed,
            target,
            input_domain: None,
        };
        match generate_synthetic(&spec) {
            Ok(net) => {
                unsafe { *out = Box::into_raw(Box::new(PkNetwork { inner: net })) };
                PkStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}
