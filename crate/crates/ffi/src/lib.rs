//! C ABI over the fmzv library.
//!
//! Every function returns an [`FmzvStatus`]; results go through out
//! pointers. On failure, [`fmzv_last_error`] describes the most recent
//! error on the calling thread. Strings returned by the library are freed
//! with [`fmzv_string_free`]; handles with their own `_free` function.
//! A [`FmzvPrimeContext`] must not be used from two threads at once.

use fmzv::congruence::{verify_battery_with, VerifyOptions};
use fmzv::harmonic::{Index, PrimeContext};
use fmzv::prime::{batch_inv_raw, PrimeRange};
use fmzv::report::CongruenceReport;
use fmzv::Error;
use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

/// Result of every call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FmzvStatus {
    Ok = 0,
    /// A required pointer was null.
    NullPointer = 1,
    /// An argument is out of the operation's domain.
    InvalidArgument = 2,
    /// A value has no inverse modulo the prime.
    ZeroInverse = 3,
    /// A base shares a factor with the prime.
    SharedFactor = 4,
    /// The prime divides the level.
    LevelSharesFactor = 5,
    /// `p − 1` divides the Bernoulli index.
    Pole = 6,
    /// Malformed JSON or index text.
    Parse = 7,
    /// Two independent computations disagreed.
    Inconsistent = 8,
    /// A search ran past its bound.
    Exhausted = 9,
    /// A bug or resource failure inside the library.
    Internal = 10,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> FmzvStatus {
    match e {
        Error::ZeroInverse { .. } => FmzvStatus::ZeroInverse,
        Error::SharedFactor { .. } => FmzvStatus::SharedFactor,
        Error::LevelSharesFactor { .. } => FmzvStatus::LevelSharesFactor,
        Error::PoleAtVonStaudtClausen { .. } => FmzvStatus::Pole,
        Error::Parse(_) => FmzvStatus::Parse,
        Error::Inconsistent(_) => FmzvStatus::Inconsistent,
        Error::ScanExhausted { .. } => FmzvStatus::Exhausted,
        Error::Io(_) => FmzvStatus::Internal,
        _ => FmzvStatus::InvalidArgument,
    }
}

/// Runs `f`, translating errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), (FmzvStatus, String)>) -> FmzvStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            FmzvStatus::Ok
        }
        Ok(Err((status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            FmzvStatus::Internal
        }
    }
}

fn lib<T>(r: fmzv::Result<T>) -> Result<T, (FmzvStatus, String)> {
    r.map_err(|e| (status_of(&e), e.to_string()))
}

fn null(what: &str) -> (FmzvStatus, String) {
    (FmzvStatus::NullPointer, format!("{what} is null"))
}

unsafe fn write<T>(out: *mut T, value: T) -> Result<(), (FmzvStatus, String)> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    out.write(value);
    Ok(())
}

unsafe fn slice<'a, T>(
    data: *const T,
    len: usize,
    what: &str,
) -> Result<&'a [T], (FmzvStatus, String)> {
    if len == 0 {
        return Ok(&[]);
    }
    if data.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(data, len))
}

unsafe fn text<'a>(s: *const c_char, what: &str) -> Result<&'a str, (FmzvStatus, String)> {
    if s.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|_| (FmzvStatus::Parse, format!("{what} is not UTF-8")))
}

fn index(parts: &[u32]) -> Result<Index, (FmzvStatus, String)> {
    lib(Index::new(parts.to_vec()))
}

/// Per-prime workspace with cached inverse tables.
pub struct FmzvPrimeContext(PrimeContext);

/// A verification report.
pub struct FmzvReport(CongruenceReport);

/// Message for the last failed call on this thread; empty after a
/// successful call. Valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn fmzv_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn fmzv_version() -> *const c_char {
    static VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), "\0");
    VERSION.as_ptr().cast()
}

/// Frees a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn fmzv_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Creates a context for the odd prime `p < 2^32`.
///
/// # Safety
/// `out` must be valid for writing a pointer.
#[no_mangle]
pub unsafe extern "C" fn fmzv_context_new(p: u64, out: *mut *mut FmzvPrimeContext) -> FmzvStatus {
    guard(|| {
        let ctx = lib(PrimeContext::new(p))?;
        write(out, Box::into_raw(Box::new(FmzvPrimeContext(ctx))))
    })
}

/// # Safety
/// `ctx` must come from [`fmzv_context_new`] and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn fmzv_context_free(ctx: *mut FmzvPrimeContext) {
    if !ctx.is_null() {
        drop(Box::from_raw(ctx));
    }
}

unsafe fn context<'a>(
    ctx: *const FmzvPrimeContext,
) -> Result<&'a PrimeContext, (FmzvStatus, String)> {
    ctx.as_ref().map(|c| &c.0).ok_or_else(|| null("context"))
}

/// `ζ_p(k) mod p` for the index `parts[0..len]`.
///
/// # Safety
/// Pointers must be valid for the given lengths.
#[no_mangle]
pub unsafe extern "C" fn fmzv_zeta(
    ctx: *const FmzvPrimeContext,
    parts: *const u32,
    len: usize,
    out: *mut u64,
) -> FmzvStatus {
    guard(|| {
        let ctx = context(ctx)?;
        let k = index(slice(parts, len, "parts")?)?;
        write(out, ctx.zeta(&k))
    })
}

/// The colored sum with `m_i ≡ alpha[i] (mod level)`; `alpha` has `len`
/// entries.
///
/// # Safety
/// Pointers must be valid for the given lengths.
#[no_mangle]
pub unsafe extern "C" fn fmzv_zeta_colored(
    ctx: *const FmzvPrimeContext,
    parts: *const u32,
    len: usize,
    level: u64,
    alpha: *const u64,
    out: *mut u64,
) -> FmzvStatus {
    guard(|| {
        let ctx = context(ctx)?;
        let k = index(slice(parts, len, "parts")?)?;
        let a = slice(alpha, len, "alpha")?;
        write(out, lib(ctx.zeta_colored(&k, level, a))?)
    })
}

/// The nested sum over `jp/N < m_1 < ⋯ < m_r < (j+1)p/N`.
///
/// # Safety
/// Pointers must be valid for the given lengths.
#[no_mangle]
pub unsafe extern "C" fn fmzv_interval_sum(
    ctx: *const FmzvPrimeContext,
    parts: *const u32,
    len: usize,
    level: u64,
    j: u64,
    out: *mut u64,
) -> FmzvStatus {
    guard(|| {
        let ctx = context(ctx)?;
        let k = index(slice(parts, len, "parts")?)?;
        write(out, lib(ctx.interval_sum(&k, level, j))?)
    })
}

/// `B_n mod p` with `B_1 = +1/2`.
///
/// # Safety
/// `out` must be valid for writing.
#[no_mangle]
pub unsafe extern "C" fn fmzv_bernoulli_mod_p(n: u64, p: u64, out: *mut u64) -> FmzvStatus {
    guard(|| write(out, lib(fmzv::bernoulli::bernoulli_mod_p(n, p))?))
}

/// `𝔷(k) = B_{p−k}/k mod p` for `2 <= k <= p − 2`.
///
/// # Safety
/// `out` must be valid for writing.
#[no_mangle]
pub unsafe extern "C" fn fmzv_frak_z(k: u64, p: u64, out: *mut u64) -> FmzvStatus {
    guard(|| write(out, lib(fmzv::bernoulli::frak_z(k, p))?))
}

/// Fermat quotient `q_p(n)`.
///
/// # Safety
/// `out` must be valid for writing.
#[no_mangle]
pub unsafe extern "C" fn fmzv_fermat_quotient(n: u64, p: u64, out: *mut u64) -> FmzvStatus {
    guard(|| write(out, lib(fmzv::quotient::fermat_quotient(n, p))?))
}

/// Least `N >= 2` with `q_p(N) ≢ 0`.
///
/// # Safety
/// `out` must be valid for writing.
#[no_mangle]
pub unsafe extern "C" fn fmzv_ell_p(p: u64, out: *mut u64) -> FmzvStatus {
    guard(|| write(out, lib(fmzv::quotient::ell_p(p))?))
}

/// Least odd `k >= 3` with `𝔷(k) ≢ 0`.
///
/// # Safety
/// `out` must be valid for writing.
#[no_mangle]
pub unsafe extern "C" fn fmzv_eth_p(p: u64, out: *mut u64) -> FmzvStatus {
    guard(|| write(out, lib(fmzv::bernoulli::eth_p(p))?))
}

/// Inverts `values[0..len]` modulo `modulus` into `out[0..len]`. Fails
/// with `ZeroInverse` naming the first non-invertible position.
///
/// # Safety
/// `values` and `out` must be valid for `len` elements.
#[no_mangle]
pub unsafe extern "C" fn fmzv_batch_inv(
    values: *const u64,
    len: usize,
    modulus: u64,
    out: *mut u64,
) -> FmzvStatus {
    guard(|| {
        let xs = slice(values, len, "values")?;
        let ys = lib(batch_inv_raw(xs, modulus))?;
        if len > 0 {
            if out.is_null() {
                return Err(null("output pointer"));
            }
            ptr::copy_nonoverlapping(ys.as_ptr(), out, len);
        }
        Ok(())
    })
}

/// Verifies the identity `id` from a catalogue document (or from the
/// built-in catalogue when `catalogue_json` is null) at every prime of
/// `[pmin, pmax]`.
///
/// # Safety
/// String arguments must be nul-terminated; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn fmzv_verify_identity(
    catalogue_json: *const c_char,
    id: *const c_char,
    pmin: u64,
    pmax: u64,
    strict_skips: bool,
    out: *mut *mut FmzvReport,
) -> FmzvStatus {
    guard(|| {
        let id = text(id, "id")?;
        let identities = if catalogue_json.is_null() {
            fmzv::relation::builtin_catalogue()
        } else {
            lib(fmzv::relation::parse_catalogue(text(
                catalogue_json,
                "catalogue",
            )?))?
        };
        let identity = identities
            .into_iter()
            .find(|i| i.id_str() == id)
            .ok_or_else(|| {
                (
                    FmzvStatus::InvalidArgument,
                    format!("no identity {id:?} in the catalogue"),
                )
            })?;
        let range = lib(PrimeRange::new(pmin, pmax))?;
        let opts = VerifyOptions {
            strict_skips,
            ..Default::default()
        };
        let mut reports = lib(verify_battery_with(&[&identity], &range, &opts))?
            .ok_or_else(|| (FmzvStatus::Internal, "verification halted".to_string()))?;
        let report = reports.pop().expect("one identity, one report");
        write(out, Box::into_raw(Box::new(FmzvReport(report))))
    })
}

/// # Safety
/// `report` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn fmzv_report_is_clean(
    report: *const FmzvReport,
    out: *mut bool,
) -> FmzvStatus {
    guard(|| {
        let r = report.as_ref().ok_or_else(|| null("report"))?;
        write(out, r.0.is_clean())
    })
}

/// Counts of passed, failed and skipped primes.
///
/// # Safety
/// `report` must be a live handle; out pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn fmzv_report_counts(
    report: *const FmzvReport,
    passed: *mut u64,
    failed: *mut u64,
    skipped: *mut u64,
) -> FmzvStatus {
    guard(|| {
        let r = &report.as_ref().ok_or_else(|| null("report"))?.0;
        write(passed, r.passed)?;
        write(failed, r.failed.len() as u64)?;
        write(skipped, r.skipped.len() as u64)
    })
}

/// The report as JSON; free with [`fmzv_string_free`].
///
/// # Safety
/// `report` must be a live handle; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn fmzv_report_json(
    report: *const FmzvReport,
    out: *mut *mut c_char,
) -> FmzvStatus {
    guard(|| {
        let r = &report.as_ref().ok_or_else(|| null("report"))?.0;
        let s = CString::new(r.to_json())
            .map_err(|_| (FmzvStatus::Internal, "nul in report".to_string()))?;
        write(out, s.into_raw())
    })
}

/// # Safety
/// `report` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn fmzv_report_free(report: *mut FmzvReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}
