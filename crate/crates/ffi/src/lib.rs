//! C ABI for `isodist`.
//!
//! Every fallible function returns an [`IsodistStatus`] and writes its result
//! through an out-pointer. On failure the message is kept per thread and can
//! be read with [`isodist_last_error_message`]. Constants and sample batches
//! are opaque handles owned by the caller and released with their `_free`
//! function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use isodist::lattice::{scaled_max_distance, verify_extremal_pairs, Grid};
use isodist::montecarlo::{sample_uniform, SampleBatch};
use isodist::specfun::{phi, phi_inv, psi_p_inv, unit_volume_radius};
use isodist::witness::bound_report;
use isodist::{BodyFamily, ConstantsConfig, Error, PExponent};

/// Status codes returned by every fallible function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IsodistStatus {
    Ok = 0,
    Domain = 1,
    NonConvergence = 2,
    BudgetExceeded = 3,
    DimensionMismatch = 4,
    EmptySet = 5,
    Range = 6,
    Parse = 7,
    NullPointer = 8,
    InvalidUtf8 = 9,
    Panic = 10,
}

/// Body family selector; `p` is read only for [`IsodistFamily::Lp`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IsodistFamily {
    Ball = 0,
    Cube = 1,
    Simplex = 2,
    Lp = 3,
}

/// Opaque set of placeholder constants.
pub struct IsodistConstants(ConstantsConfig);

/// Opaque batch of uniformly distributed points, stored row-major.
pub struct IsodistSampleBatch(SampleBatch);

/// Bounds for one family at one `eps`. The `has_*` flags mark which optional
/// fields carry a value.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct IsodistBoundReport {
    pub epsilon: f64,
    pub lower: f64,
    pub upper: f64,
    pub upper_tight: f64,
    pub parametric: bool,
    pub has_exact_limit: bool,
    pub exact_limit: f64,
    pub has_witness_distance: bool,
    pub witness_distance: f64,
    pub has_manhattan_limit: bool,
    pub manhattan_limit: f64,
}

/// Result of an exhaustive extremal-pair search. Counts saturate at
/// `UINT64_MAX`.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct IsodistExtremalCheck {
    pub k: usize,
    pub n: usize,
    pub r: usize,
    pub s: usize,
    pub brute_max: usize,
    pub segment_distance: usize,
    pub agree: bool,
    pub search_space: u64,
    pub work: u64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct IsodistScalingReport {
    pub n: usize,
    pub m: usize,
    pub eps: f64,
    pub lower_sum: usize,
    pub lattice_value: f64,
    pub continuous_target: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let msg = CString::new(msg.replace('\0', " ")).expect("interior nul removed");
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(msg));
}

fn clear_last_error() {
    LAST_ERROR.with(|slot| *slot.borrow_mut() = None);
}

fn status_of(err: &Error) -> IsodistStatus {
    match err {
        Error::Domain(_) => IsodistStatus::Domain,
        Error::NonConvergence(_) => IsodistStatus::NonConvergence,
        Error::BudgetExceeded { .. } => IsodistStatus::BudgetExceeded,
        Error::DimensionMismatch(..) => IsodistStatus::DimensionMismatch,
        Error::EmptySet => IsodistStatus::EmptySet,
        Error::Range(_) => IsodistStatus::Range,
        Error::Parse(_) => IsodistStatus::Parse,
    }
}

enum Failure {
    Lib(Error),
    Null(&'static str),
    Utf8,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

/// Runs `body`, catching panics and recording the error message.
fn guard(body: impl FnOnce() -> Result<(), Failure>) -> IsodistStatus {
    clear_last_error();
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => IsodistStatus::Ok,
        Ok(Err(Failure::Lib(e))) => {
            set_last_error(e.to_string());
            status_of(&e)
        }
        Ok(Err(Failure::Null(what))) => {
            set_last_error(format!("null pointer passed for {what}"));
            IsodistStatus::NullPointer
        }
        Ok(Err(Failure::Utf8)) => {
            set_last_error("string argument is not valid UTF-8".into());
            IsodistStatus::InvalidUtf8
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(format!("internal panic: {msg}"));
            IsodistStatus::Panic
        }
    }
}

fn write<T>(out: *mut T, value: T, what: &'static str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure::Null(what));
    }
    // SAFETY: non-null and, per the API contract, valid for writes of T.
    unsafe { out.write(value) };
    Ok(())
}

unsafe fn read_str<'a>(s: *const c_char, what: &'static str) -> Result<&'a str, Failure> {
    if s.is_null() {
        return Err(Failure::Null(what));
    }
    CStr::from_ptr(s).to_str().map_err(|_| Failure::Utf8)
}

fn family(f: IsodistFamily, p: f64) -> Result<BodyFamily, Failure> {
    Ok(match f {
        IsodistFamily::Ball => BodyFamily::Ball,
        IsodistFamily::Cube => BodyFamily::Cube,
        IsodistFamily::Simplex => BodyFamily::Simplex,
        IsodistFamily::Lp => BodyFamily::Lp(PExponent::new(p)?),
    })
}

fn saturate(v: u128) -> u64 {
    u64::try_from(v).unwrap_or(u64::MAX)
}

/// Message of the last failed call on this thread, or NULL after a success.
/// The pointer stays valid until the next call into the library on the same
/// thread.
#[no_mangle]
pub extern "C" fn isodist_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn isodist_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// `Φ(a) = ∫_{-∞}^a e^{-πx²} dx`. Total on finite input.
#[no_mangle]
pub extern "C" fn isodist_phi(a: f64) -> f64 {
    phi(a)
}

#[no_mangle]
pub extern "C" fn isodist_phi_inv(eps: f64, out: *mut f64) -> IsodistStatus {
    guard(|| write(out, phi_inv(eps)?, "out"))
}

#[no_mangle]
pub extern "C" fn isodist_psi_p_inv(eps: f64, p: f64, out: *mut f64) -> IsodistStatus {
    guard(|| write(out, psi_p_inv(eps, PExponent::new(p)?)?, "out"))
}

/// Radius `ω_n` giving the family unit volume in dimension `n` (1 for the cube).
#[no_mangle]
pub extern "C" fn isodist_unit_volume_radius(f: IsodistFamily, p: f64, n: usize, out: *mut f64) -> IsodistStatus {
    guard(|| write(out, unit_volume_radius(family(f, p)?, n)?.omega_n, "out"))
}

/// New handle holding the default constants (all 1).
#[no_mangle]
pub extern "C" fn isodist_constants_new() -> *mut IsodistConstants {
    Box::into_raw(Box::new(IsodistConstants(ConstantsConfig::default())))
}

/// Parses `key=value` lines into a new handle stored in `*out`.
///
/// # Safety
/// `text` must be NULL or a NUL-terminated string; `out` must be NULL or
/// valid for writes.
#[no_mangle]
pub unsafe extern "C" fn isodist_constants_parse(
    text: *const c_char,
    out: *mut *mut IsodistConstants,
) -> IsodistStatus {
    guard(|| {
        if out.is_null() {
            return Err(Failure::Null("out"));
        }
        let cfg = ConstantsConfig::parse(read_str(text, "text")?)?;
        write(out, Box::into_raw(Box::new(IsodistConstants(cfg))), "out")
    })
}

/// Sets one constant by key. The handle is left unchanged on failure.
///
/// # Safety
/// `handle` must come from this library and not be freed; `key` must be a
/// NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn isodist_constants_set(
    handle: *mut IsodistConstants,
    key: *const c_char,
    value: f64,
) -> IsodistStatus {
    guard(|| {
        let handle = handle.as_mut().ok_or(Failure::Null("handle"))?;
        let mut next = handle.0.clone();
        next.set(read_str(key, "key")?, value)?;
        next.validate()?;
        handle.0 = next;
        Ok(())
    })
}

/// # Safety
/// `handle` must be NULL or a pointer from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn isodist_constants_free(handle: *mut IsodistConstants) {
    if !handle.is_null() {
        drop(Box::from_raw(handle));
    }
}

/// Bounds for `family` at `eps`. `n = 0` skips the witness; `constants` may be
/// NULL for the defaults.
///
/// # Safety
/// `constants` must be NULL or a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn isodist_bound_report(
    f: IsodistFamily,
    p: f64,
    eps: f64,
    n: usize,
    constants: *const IsodistConstants,
    out: *mut IsodistBoundReport,
) -> IsodistStatus {
    guard(|| {
        let default = ConstantsConfig::default();
        let cfg = constants.as_ref().map_or(&default, |c| &c.0);
        let r = bound_report(family(f, p)?, eps, (n > 0).then_some(n), cfg)?;
        let report = IsodistBoundReport {
            epsilon: r.epsilon,
            lower: r.lower,
            upper: r.upper,
            upper_tight: r.upper_tight,
            parametric: r.parametric,
            has_exact_limit: r.exact_limit.is_some(),
            exact_limit: r.exact_limit.unwrap_or(f64::NAN),
            has_witness_distance: r.witness_distance.is_some(),
            witness_distance: r.witness_distance.unwrap_or(f64::NAN),
            has_manhattan_limit: r.manhattan_limit.is_some(),
            manhattan_limit: r.manhattan_limit.unwrap_or(f64::NAN),
        };
        write(out, report, "out")
    })
}

/// Exhaustive extremal-pair check on the lattice `[k]^n`.
#[no_mangle]
pub extern "C" fn isodist_verify_extremal_pairs(
    k: usize,
    n: usize,
    r: usize,
    s: usize,
    budget: u64,
    out: *mut IsodistExtremalCheck,
) -> IsodistStatus {
    guard(|| {
        let c = verify_extremal_pairs(Grid::new(k, n)?, r, s, u128::from(budget))?;
        let check = IsodistExtremalCheck {
            k: c.k,
            n: c.n,
            r: c.r,
            s: c.s,
            brute_max: c.brute_max,
            segment_distance: c.segment_distance,
            agree: c.agree,
            search_space: saturate(c.search_space),
            work: saturate(c.work),
        };
        write(out, check, "out")
    })
}

#[no_mangle]
pub extern "C" fn isodist_scaled_max_distance(
    n: usize,
    m: usize,
    eps: f64,
    budget: u64,
    out: *mut IsodistScalingReport,
) -> IsodistStatus {
    guard(|| {
        let r = scaled_max_distance(n, m, eps, u128::from(budget))?;
        let report = IsodistScalingReport {
            n: r.n,
            m: r.m,
            eps: r.eps,
            lower_sum: r.lower_sum,
            lattice_value: r.lattice_value,
            continuous_target: r.continuous_target,
        };
        write(out, report, "out")
    })
}

/// Draws `count` uniform points from the unit-volume body into a new batch.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn isodist_sample_uniform(
    f: IsodistFamily,
    p: f64,
    n: usize,
    count: usize,
    seed: u64,
    out: *mut *mut IsodistSampleBatch,
) -> IsodistStatus {
    guard(|| {
        if out.is_null() {
            return Err(Failure::Null("out"));
        }
        let batch = sample_uniform(family(f, p)?, n, count, seed)?;
        write(out, Box::into_raw(Box::new(IsodistSampleBatch(batch))), "out")
    })
}

/// Dimension of each point, or 0 for NULL.
///
/// # Safety
/// `batch` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn isodist_sample_batch_dim(batch: *const IsodistSampleBatch) -> usize {
    batch.as_ref().map_or(0, |b| b.0.n)
}

/// Number of points, or 0 for NULL.
///
/// # Safety
/// `batch` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn isodist_sample_batch_len(batch: *const IsodistSampleBatch) -> usize {
    batch.as_ref().map_or(0, |b| b.0.count)
}

/// Row-major coordinates, `len * dim` doubles, borrowed from the batch.
///
/// # Safety
/// `batch` must be NULL or a live handle; the pointer dies with the batch.
#[no_mangle]
pub unsafe extern "C" fn isodist_sample_batch_points(batch: *const IsodistSampleBatch) -> *const f64 {
    batch.as_ref().map_or(ptr::null(), |b| b.0.points.as_ptr())
}

/// # Safety
/// `batch` must be NULL or a pointer from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn isodist_sample_batch_free(batch: *mut IsodistSampleBatch) {
    if !batch.is_null() {
        drop(Box::from_raw(batch));
    }
}
