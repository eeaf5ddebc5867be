//! C ABI over `involution-occ`.
//!
//! Every fallible function returns an [`IoccStatus`] and writes its result
//! through an out-pointer. On failure the out-pointer is left untouched and
//! [`iocc_last_error_message`] describes the error. Handles are opaque and
//! must be released with the matching `_free` function; strings returned
//! through `char **` are released with [`iocc_string_free`]. Panics never
//! cross the boundary and surface as `IOCC_STATUS_PANIC`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use involution_occ::asymptotic;
use involution_occ::cli::{self, RunConfig};
use involution_occ::exact;
use involution_occ::montecarlo::{self, SampleSummary};
use involution_occ::numtheory::{self, FactorialProfile};
use involution_occ::oracle;
use involution_occ::{Error, Involution};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IoccStatus {
    Ok = 0,
    /// A required pointer argument was NULL.
    NullPointer = 1,
    /// A parameter is outside its documented range or shape.
    InvalidArgument = 2,
    /// The supplied map is not a permutation or not self-inverse.
    NotInvolution = 3,
    /// Enumeration would exceed the vector limit.
    TooLarge = 4,
    NotPrime = 5,
    /// Serialization or I/O failure.
    Io = 6,
    /// A string argument is not valid UTF-8.
    InvalidUtf8 = 7,
    /// Internal panic; the library state is still usable.
    Panic = 8,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure(IoccStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::NotPermutation { .. } | Error::NotSelfInverse { .. } => IoccStatus::NotInvolution,
            Error::TooLarge { .. } => IoccStatus::TooLarge,
            Error::NotPrime { .. } => IoccStatus::NotPrime,
            Error::Io(_) | Error::Json(_) | Error::Csv(_) => IoccStatus::Io,
            _ => IoccStatus::InvalidArgument,
        };
        Failure(status, e.to_string())
    }
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(c));
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> IoccStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => IoccStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_last_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_last_error(format!("internal panic: {msg}"));
            IoccStatus::Panic
        }
    }
}

fn null(what: &str) -> Failure {
    Failure(IoccStatus::NullPointer, format!("{what} is NULL"))
}

unsafe fn put<T>(out: *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    out.write(value);
    Ok(())
}

/// Boxes `value` into `*out`, checking `out` first so nothing leaks.
unsafe fn put_box<T>(out: *mut *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    out.write(Box::into_raw(Box::new(value)));
    Ok(())
}

unsafe fn borrow<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

fn c_string(s: String) -> Result<*mut c_char, Failure> {
    CString::new(s)
        .map(CString::into_raw)
        .map_err(|e| Failure(IoccStatus::Io, e.to_string()))
}

fn json<T: serde::Serialize>(value: &T) -> Result<*mut c_char, Failure> {
    let s = serde_json::to_string(value).map_err(|e| Failure::from(Error::from(e)))?;
    c_string(s)
}

/// Message for the most recent failure on the calling thread, or NULL.
/// The pointer stays valid until the next failing call on this thread.
#[no_mangle]
pub extern "C" fn iocc_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn iocc_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Releases a string returned by this library. NULL is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn iocc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Opaque involution of the ids `0..m`.
pub struct IoccInvolution {
    inner: Involution,
}

/// Canonical involution of size `m` fixing `0..f` and swapping the remaining
/// ids in consecutive pairs.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn iocc_involution_canonical(m: usize, f: usize, out: *mut *mut IoccInvolution) -> IoccStatus {
    guard(|| {
        let inner = Involution::canonical(m, f)?;
        put_box(out, IoccInvolution { inner })
    })
}

/// Involution from an explicit map of length `m`.
///
/// # Safety
/// `map` must point to `m` readable values; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn iocc_involution_from_map(
    map: *const usize,
    m: usize,
    out: *mut *mut IoccInvolution,
) -> IoccStatus {
    guard(|| {
        if map.is_null() {
            return Err(null("map"));
        }
        let values = std::slice::from_raw_parts(map, m).to_vec();
        let inner = Involution::validate(m, values)?;
        put_box(out, IoccInvolution { inner })
    })
}

/// # Safety
/// `h` must be NULL or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn iocc_involution_free(h: *mut IoccInvolution) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// Size `m`, or 0 for NULL.
///
/// # Safety
/// `h` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn iocc_involution_m(h: *const IoccInvolution) -> usize {
    h.as_ref().map_or(0, |h| h.inner.m())
}

/// Number of fixed points, or 0 for NULL.
///
/// # Safety
/// `h` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn iocc_involution_fixed_count(h: *const IoccInvolution) -> usize {
    h.as_ref().map_or(0, |h| h.inner.fixed_count())
}

/// # Safety
/// `h` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn iocc_involution_apply(h: *const IoccInvolution, y: usize, out: *mut usize) -> IoccStatus {
    guard(|| {
        let h = borrow(h, "involution")?;
        if y >= h.inner.m() {
            return Err(Failure(
                IoccStatus::InvalidArgument,
                format!("id {y} outside 0..{}", h.inner.m()),
            ));
        }
        put(out, h.inner.apply(y))
    })
}

/// Limiting density of `m_k / m` when a fraction `theta` of ids is fixed.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn iocc_main_term(k: usize, theta: f64, out: *mut f64) -> IoccStatus {
    guard(|| put(out, asymptotic::main_term(k, theta)?))
}

/// Average of `m_k / m` evaluated in the log domain; usable for large `m`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn iocc_average_log(m: usize, f: usize, k: usize, out: *mut f64) -> IoccStatus {
    guard(|| put(out, asymptotic::average_log(m, f, k)?))
}

/// Exact average rounded to the nearest double.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn iocc_average_exact_f64(m: usize, f: usize, k: usize, out: *mut f64) -> IoccStatus {
    guard(|| put(out, exact::Rational(exact::average_exact(m, f, k)?).to_f64()))
}

/// Exact average, second moment and variance as JSON rationals
/// (`{"a": {"num": "..", "den": ".."}, ...}`).
///
/// # Safety
/// `out` must be valid for writes; free the string with `iocc_string_free`.
#[no_mangle]
pub unsafe extern "C" fn iocc_exact_stats_json(m: usize, f: usize, k: usize, out: *mut *mut c_char) -> IoccStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("output pointer"));
        }
        let s = json(&exact::exact_stats(m, f, k)?)?;
        put(out, s)
    })
}

/// Chebyshev lower bound on the fraction of vectors with `m_k / m` within `dlt`
/// of its limiting density.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn iocc_chebyshev_bound(m: usize, f: usize, k: usize, dlt: f64, out: *mut f64) -> IoccStatus {
    guard(|| put(out, asymptotic::chebyshev_bound(m, f, k, dlt)?))
}

/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn iocc_threshold_c(r: usize, s: usize, mu: f64, out: *mut f64) -> IoccStatus {
    guard(|| put(out, asymptotic::threshold_c(r, s, mu)?))
}

/// Poisson(1) distribution function at `k`.
#[no_mangle]
pub extern "C" fn iocc_e_cumulative(k: usize) -> f64 {
    asymptotic::e_cumulative(k)
}

/// `1/2 + 1/e`.
#[no_mangle]
pub extern "C" fn iocc_present_pair_threshold() -> f64 {
    asymptotic::theorem3_threshold()
}

/// Brute-force sums over every vector symmetric under `psi`, as JSON.
///
/// # Safety
/// `psi` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn iocc_oracle_report_json(
    psi: *const IoccInvolution,
    k_max: usize,
    out: *mut *mut c_char,
) -> IoccStatus {
    guard(|| {
        let psi = borrow(psi, "involution")?;
        if out.is_null() {
            return Err(null("output pointer"));
        }
        let s = json(&oracle::oracle_report(&psi.inner, k_max)?)?;
        put(out, s)
    })
}

/// Opaque Monte Carlo summary.
pub struct IoccSampleSummary {
    inner: SampleSummary,
}

/// Statistics of `m_k / m` for one `k`.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IoccSampleRow {
    pub k: usize,
    pub mean_ratio: f64,
    pub sample_variance: f64,
    pub std_error: f64,
    pub within_window_fraction: f64,
    pub main_term: f64,
}

/// Samples `trials` vectors symmetric under `psi`. `jobs == 0` uses the
/// global thread pool; the result does not depend on `jobs`.
///
/// # Safety
/// `psi` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn iocc_sample_estimate(
    psi: *const IoccInvolution,
    k_max: usize,
    trials: u64,
    seed: u64,
    window: f64,
    jobs: usize,
    out: *mut *mut IoccSampleSummary,
) -> IoccStatus {
    guard(|| {
        let psi = borrow(psi, "involution")?;
        if out.is_null() {
            return Err(null("output pointer"));
        }
        let jobs = (jobs > 0).then_some(jobs);
        let inner = montecarlo::estimate_with_jobs(&psi.inner, k_max, trials, seed, window, jobs)?;
        put_box(out, IoccSampleSummary { inner })
    })
}

/// # Safety
/// `h` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn iocc_sample_summary_free(h: *mut IoccSampleSummary) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// Number of rows (`k_max + 1`), or 0 for NULL.
///
/// # Safety
/// `h` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn iocc_sample_summary_len(h: *const IoccSampleSummary) -> usize {
    h.as_ref().map_or(0, |h| h.inner.per_k.len())
}

/// # Safety
/// `h` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn iocc_sample_summary_row(
    h: *const IoccSampleSummary,
    k: usize,
    out: *mut IoccSampleRow,
) -> IoccStatus {
    guard(|| {
        let h = borrow(h, "summary")?;
        let r = h.inner.row(k).ok_or_else(|| {
            Failure(
                IoccStatus::InvalidArgument,
                format!("k = {k} beyond the summary's {} rows", h.inner.per_k.len()),
            )
        })?;
        put(
            out,
            IoccSampleRow {
                k: r.k,
                mean_ratio: r.mean_ratio,
                sample_variance: r.sample_variance,
                std_error: r.std_error,
                within_window_fraction: r.within_window_fraction,
                main_term: r.main_term,
            },
        )
    })
}

/// # Safety
/// `h` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn iocc_sample_summary_json(h: *const IoccSampleSummary, out: *mut *mut c_char) -> IoccStatus {
    guard(|| {
        let h = borrow(h, "summary")?;
        if out.is_null() {
            return Err(null("output pointer"));
        }
        let s = json(&h.inner)?;
        put(out, s)
    })
}

/// Opaque profile of `n! mod p` for `n = 1..p-1`.
pub struct IoccFactorialProfile {
    inner: FactorialProfile,
}

/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn iocc_factorial_profile(p: u64, out: *mut *mut IoccFactorialProfile) -> IoccStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("output pointer"));
        }
        let inner = numtheory::factorial_profile(p)?;
        put_box(out, IoccFactorialProfile { inner })
    })
}

/// # Safety
/// `h` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn iocc_factorial_profile_free(h: *mut IoccFactorialProfile) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// Number of residue classes hit exactly `k` times, or 0 for NULL.
///
/// # Safety
/// `h` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn iocc_factorial_m_k(h: *const IoccFactorialProfile, k: usize) -> u64 {
    h.as_ref().map_or(0, |h| h.inner.profile.get(k))
}

/// # Safety
/// `h` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn iocc_factorial_distinct_count(h: *const IoccFactorialProfile) -> u64 {
    h.as_ref().map_or(0, |h| h.inner.distinct_count)
}

/// # Safety
/// `h` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn iocc_factorial_wilson_holds(h: *const IoccFactorialProfile) -> bool {
    h.as_ref().is_some_and(|h| h.inner.wilson_holds)
}

/// Borrowed pointer to the `p - 1` residues `n! mod p`; `len` receives the count.
/// Valid while `h` is alive.
///
/// # Safety
/// `h` must be a live handle; `len` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn iocc_factorial_residues(h: *const IoccFactorialProfile, len: *mut usize) -> *const u64 {
    match (h.as_ref(), len.is_null()) {
        (Some(h), false) => {
            len.write(h.inner.residues.len());
            h.inner.residues.as_ptr()
        }
        _ => ptr::null(),
    }
}

/// Runs a full command described by a JSON run configuration (the same
/// object accepted by the CLI's `--config`, with `"command"` set) and returns
/// the rendered report. `output_path` is ignored.
///
/// # Safety
/// `config_json` must be a NUL-terminated string; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn iocc_run_json(config_json: *const c_char, out: *mut *mut c_char) -> IoccStatus {
    guard(|| {
        if config_json.is_null() {
            return Err(null("config"));
        }
        if out.is_null() {
            return Err(null("output pointer"));
        }
        let text = CStr::from_ptr(config_json)
            .to_str()
            .map_err(|e| Failure(IoccStatus::InvalidUtf8, e.to_string()))?;
        let cfg: RunConfig = serde_json::from_str(text)
            .map_err(|e| Failure(IoccStatus::InvalidArgument, format!("config: {e}")))?;
        let report = cli::run(&cfg)?;
        let format = cfg.output_format.unwrap_or(cli::default_format(cfg.command));
        let bytes = cli::render(&report, format)?;
        let s = String::from_utf8(bytes).map_err(|e| Failure(IoccStatus::Io, e.to_string()))?;
        put(out, c_string(s)?)
    })
}
