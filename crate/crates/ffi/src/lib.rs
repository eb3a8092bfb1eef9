//! C ABI for `ulrich-core`.
//!
//! Varieties and kernel presentations are opaque handles created by
//! `*_new`/`*_parse` functions and released with the matching `*_free`.
//! Results come back as NUL-terminated JSON strings owned by the caller and
//! released with [`ulrich_string_free`]. Every fallible call returns an
//! [`UlrichStatus`]; on failure the output string, when requested, holds
//! `{"error": code, "detail": message}`.
//!
//! Strings passed in must be valid UTF-8. Handles are not thread-safe to
//! free concurrently but may be read from several threads.

use std::ffi::{c_char, CStr, CString};
use std::ptr;

use ulrich_core::cohomology::{cohomology, CohomologyTable};
use ulrich_core::grammar::{parse_bundle, parse_divisor, parse_variety};
use ulrich_core::kernelbundle::{kernel_cohomology, KernelBundlePresentation};
use ulrich_core::picard::Variety;
use ulrich_core::ulrich::{is_ulrich, Polarisation};
use ulrich_core::Error;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UlrichStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    ParseError = 3,
    UnsupportedVariety = 4,
    UnsupportedPolarisation = 5,
    NotAmple = 6,
    NotVeryAmple = 7,
    GenericModeUnsupported = 8,
    BadTwist = 9,
    BoxTooLarge = 10,
    ScanBoxTooSmall = 11,
    NotSurjective = 12,
    Mismatch = 13,
    InternalInconsistency = 14,
}

impl From<&Error> for UlrichStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::Parse(_) => UlrichStatus::ParseError,
            Error::UnsupportedVariety(_) => UlrichStatus::UnsupportedVariety,
            Error::UnsupportedPolarisation(_) => UlrichStatus::UnsupportedPolarisation,
            Error::NotAmple(_) => UlrichStatus::NotAmple,
            Error::NotVeryAmple(_) => UlrichStatus::NotVeryAmple,
            Error::GenericModeUnsupported => UlrichStatus::GenericModeUnsupported,
            Error::BadTwist(_) => UlrichStatus::BadTwist,
            Error::BoxTooLarge { .. } => UlrichStatus::BoxTooLarge,
            Error::ScanBoxTooSmall(_) => UlrichStatus::ScanBoxTooSmall,
            Error::NotSurjective(_) => UlrichStatus::NotSurjective,
            Error::Mismatch(_) => UlrichStatus::Mismatch,
            Error::InternalInconsistency(_) => UlrichStatus::InternalInconsistency,
        }
    }
}

/// Opaque parsed variety.
pub struct UlrichVariety {
    inner: Variety,
}

/// Opaque kernel bundle presentation on `P^n`.
pub struct UlrichKernel {
    inner: KernelBundlePresentation,
}

enum Failure {
    Status(UlrichStatus, &'static str),
    Engine(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Engine(e)
    }
}

impl Failure {
    fn status(&self) -> UlrichStatus {
        match self {
            Failure::Status(s, _) => *s,
            Failure::Engine(e) => e.into(),
        }
    }

    fn json(&self) -> String {
        let (code, detail) = match self {
            Failure::Status(s, detail) => (format!("{s:?}"), detail.to_string()),
            Failure::Engine(e) => (e.code().to_string(), e.to_string()),
        };
        // keys in the same order as the command line's error payload
        format!(
            "{{\"error\":{},\"detail\":{}}}",
            serde_json::Value::from(code),
            serde_json::Value::from(detail)
        )
    }
}

unsafe fn read_str<'a>(p: *const c_char) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure::Status(UlrichStatus::NullArgument, "null string argument"));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure::Status(UlrichStatus::InvalidUtf8, "argument is not valid UTF-8"))
}

fn into_c_string(s: String) -> *mut c_char {
    // JSON and engine messages never contain interior NULs.
    CString::new(s).map_or(ptr::null_mut(), CString::into_raw)
}

/// Writes the JSON result or error payload to `out` (if non-null).
unsafe fn finish(result: Result<String, Failure>, out: *mut *mut c_char) -> UlrichStatus {
    let (status, text) = match result {
        Ok(json) => (UlrichStatus::Ok, json),
        Err(f) => (f.status(), f.json()),
    };
    if !out.is_null() {
        *out = into_c_string(text);
    }
    status
}

fn table_json(t: &CohomologyTable) -> String {
    serde_json::to_string(t).expect("serializable table")
}

/// Parses a variety such as `"F2"` or `"PB(P1;[0],[1])"`. Returns null on
/// failure and stores the reason in `status` (if non-null).
///
/// # Safety
/// `text` must be null or a valid NUL-terminated string; `status` must be
/// null or writable.
#[no_mangle]
pub unsafe extern "C" fn ulrich_variety_parse(text: *const c_char, status: *mut UlrichStatus) -> *mut UlrichVariety {
    let result = read_str(text).and_then(|s| parse_variety(s).map_err(Failure::from));
    let (code, handle) = match result {
        Ok(v) => (UlrichStatus::Ok, Box::into_raw(Box::new(UlrichVariety { inner: v }))),
        Err(f) => (f.status(), ptr::null_mut()),
    };
    if !status.is_null() {
        *status = code;
    }
    handle
}

/// # Safety
/// `v` must be null or a handle from [`ulrich_variety_parse`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ulrich_variety_free(v: *mut UlrichVariety) {
    if !v.is_null() {
        drop(Box::from_raw(v));
    }
}

/// Dimension of the variety, or -1 for a null handle.
///
/// # Safety
/// `v` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ulrich_variety_dim(v: *const UlrichVariety) -> i32 {
    v.as_ref().map_or(-1, |v| v.inner.dim() as i32)
}

/// Picard rank of the variety, or -1 for a null handle.
///
/// # Safety
/// `v` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ulrich_variety_picard_rank(v: *const UlrichVariety) -> i32 {
    v.as_ref().map_or(-1, |v| v.inner.picard_rank() as i32)
}

/// Canonical text form of the variety; free with [`ulrich_string_free`].
///
/// # Safety
/// `v` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ulrich_variety_to_string(v: *const UlrichVariety) -> *mut c_char {
    v.as_ref().map_or(ptr::null_mut(), |v| into_c_string(v.inner.to_string()))
}

/// Cohomology table of a split bundle such as `"{[1,0],[0,-1]}"` as JSON.
///
/// # Safety
/// `v` must be a live handle, `bundle` a NUL-terminated string, `out` null
/// or writable.
#[no_mangle]
pub unsafe extern "C" fn ulrich_cohomology(
    v: *const UlrichVariety,
    bundle: *const c_char,
    out: *mut *mut c_char,
) -> UlrichStatus {
    let result = (|| {
        let v = &v
            .as_ref()
            .ok_or(Failure::Status(UlrichStatus::NullArgument, "null variety"))?
            .inner;
        let e = parse_bundle(v, read_str(bundle)?)?;
        Ok(table_json(&cohomology(v, &e)?))
    })();
    finish(result, out)
}

/// Ulrich test by definition with respect to the polarisation `pol`; writes
/// the full report as JSON.
///
/// # Safety
/// `v` must be a live handle, `bundle` and `pol` NUL-terminated strings,
/// `out` null or writable.
#[no_mangle]
pub unsafe extern "C" fn ulrich_is_ulrich(
    v: *const UlrichVariety,
    bundle: *const c_char,
    pol: *const c_char,
    out: *mut *mut c_char,
) -> UlrichStatus {
    let result = (|| {
        let v = &v
            .as_ref()
            .ok_or(Failure::Status(UlrichStatus::NullArgument, "null variety"))?
            .inner;
        let f = parse_bundle(v, read_str(bundle)?)?;
        let a = Polarisation::new(v, parse_divisor(v, read_str(pol)?)?)?;
        let report = is_ulrich(v, &f, &a)?;
        Ok(serde_json::to_string(&report).expect("serializable report"))
    })();
    finish(result, out)
}

/// Matrix family for [`ulrich_kernel_new`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UlrichKernelFamily {
    Staircase = 0,
    SymEuler = 1,
    /// Staircase shape with seeded random coefficients.
    Random = 2,
}

/// Builds a certified kernel presentation on `P^n`. `seed` is used only by
/// the random family. Returns null on failure.
///
/// # Safety
/// `status` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn ulrich_kernel_new(
    family: UlrichKernelFamily,
    n: u32,
    d: u32,
    seed: u64,
    status: *mut UlrichStatus,
) -> *mut UlrichKernel {
    let result = if n == 0 {
        Err(Error::UnsupportedVariety("P0".into()))
    } else {
        match family {
            UlrichKernelFamily::Staircase => KernelBundlePresentation::staircase(n, d),
            UlrichKernelFamily::SymEuler => KernelBundlePresentation::sym_euler(n, d),
            UlrichKernelFamily::Random => KernelBundlePresentation::random(n, d, seed),
        }
    };
    let (code, handle) = match result {
        Ok(p) => (UlrichStatus::Ok, Box::into_raw(Box::new(UlrichKernel { inner: p }))),
        Err(e) => (UlrichStatus::from(&e), ptr::null_mut()),
    };
    if !status.is_null() {
        *status = code;
    }
    handle
}

/// # Safety
/// `k` must be null or a handle from [`ulrich_kernel_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ulrich_kernel_free(k: *mut UlrichKernel) {
    if !k.is_null() {
        drop(Box::from_raw(k));
    }
}

/// Rank of the kernel bundle, or -1 for a null handle.
///
/// # Safety
/// `k` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ulrich_kernel_rank(k: *const UlrichKernel) -> i64 {
    k.as_ref().map_or(-1, |k| k.inner.rank as i64)
}

/// Cohomology table of `F(twist)` as JSON.
///
/// # Safety
/// `k` must be a live handle and `out` null or writable.
#[no_mangle]
pub unsafe extern "C" fn ulrich_kernel_cohomology(
    k: *const UlrichKernel,
    twist: i64,
    out: *mut *mut c_char,
) -> UlrichStatus {
    let result = k
        .as_ref()
        .ok_or(Failure::Status(UlrichStatus::NullArgument, "null kernel"))
        .map(|k| table_json(&kernel_cohomology(&k.inner, twist)));
    finish(result, out)
}

/// The presentation (matrix and certificates) as JSON.
///
/// # Safety
/// `k` must be a live handle and `out` null or writable.
#[no_mangle]
pub unsafe extern "C" fn ulrich_kernel_to_json(k: *const UlrichKernel, out: *mut *mut c_char) -> UlrichStatus {
    let result = k
        .as_ref()
        .ok_or(Failure::Status(UlrichStatus::NullArgument, "null kernel"))
        .map(|k| serde_json::to_string(&k.inner).expect("serializable presentation"));
    finish(result, out)
}

/// Runs the command line with `argc` arguments (without the program name)
/// and `--json` implied. Standard output goes to `out`; the process-style
/// exit code goes to `exit_code`.
///
/// # Safety
/// `argv` must point to `argc` NUL-terminated strings; `out` and
/// `exit_code` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn ulrich_run(
    argv: *const *const c_char,
    argc: usize,
    out: *mut *mut c_char,
    exit_code: *mut i32,
) -> UlrichStatus {
    if argv.is_null() && argc > 0 {
        return finish(Err(Failure::Status(UlrichStatus::NullArgument, "null argv")), out);
    }
    let mut args = vec!["ulrich".to_string(), "--json".to_string()];
    for i in 0..argc {
        match read_str(*argv.add(i)) {
            Ok(s) => args.push(s.to_string()),
            Err(f) => return finish(Err(f), out),
        }
    }
    let (mut stdout, mut stderr) = (Vec::new(), Vec::new());
    let code = ulrich_core::cli::run(args, &mut stdout, &mut stderr);
    if !exit_code.is_null() {
        *exit_code = code;
    }
    let mut text = String::from_utf8_lossy(&stdout).into_owned();
    if text.is_empty() {
        text = String::from_utf8_lossy(&stderr).into_owned();
    }
    if !out.is_null() {
        *out = into_c_string(text.trim_end().to_string());
    }
    UlrichStatus::Ok
}

/// Releases a string returned by this library.
///
/// # Safety
/// `s` must be null or a string from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ulrich_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Static name of a status code.
#[no_mangle]
pub extern "C" fn ulrich_status_name(status: UlrichStatus) -> *const c_char {
    let name: &'static CStr = match status {
        UlrichStatus::Ok => c"Ok",
        UlrichStatus::NullArgument => c"NullArgument",
        UlrichStatus::InvalidUtf8 => c"InvalidUtf8",
        UlrichStatus::ParseError => c"ParseError",
        UlrichStatus::UnsupportedVariety => c"UnsupportedVariety",
        UlrichStatus::UnsupportedPolarisation => c"UnsupportedPolarisation",
        UlrichStatus::NotAmple => c"NotAmple",
        UlrichStatus::NotVeryAmple => c"NotVeryAmple",
        UlrichStatus::GenericModeUnsupported => c"GenericModeUnsupported",
        UlrichStatus::BadTwist => c"BadTwist",
        UlrichStatus::BoxTooLarge => c"BoxTooLarge",
        UlrichStatus::ScanBoxTooSmall => c"ScanBoxTooSmall",
        UlrichStatus::NotSurjective => c"NotSurjective",
        UlrichStatus::Mismatch => c"Mismatch",
        UlrichStatus::InternalInconsistency => c"InternalInconsistency",
    };
    name.as_ptr()
}
