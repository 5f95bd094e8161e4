//! C ABI for the `vvmf` library.
//!
//! Objects cross the boundary as opaque handles owned by the caller and
//! released with the matching `*_free` function. Every fallible function
//! returns a [`VvmfStatus`]; on failure `vvmf_last_error` describes the
//! error until the next call on the same thread. Strings returned through
//! out-parameters are NUL-terminated UTF-8 and released with
//! `vvmf_string_free`.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use vvmf::detlab::{self, DetError};
use vvmf::exactfield::Rational;
use vvmf::qseries::{QSeries, SeriesError};
use vvmf::replib::{self, RepError, RepSpec};
use vvmf::scalarforms::NamedForm;
use vvmf::suites::{self, Suite};
use vvmf::weightcalc::{self, EnumerationBounds, WeightError};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VvmfStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    InvalidArgument = 4,
    RelationFailed = 5,
    DivisionByZero = 6,
    Singular = 7,
    CheckFailed = 8,
    Internal = 9,
}

/// Opaque truncated q-series.
pub struct VvmfSeries {
    inner: QSeries,
}

/// Opaque validated representation of SL2(Z).
pub struct VvmfRep {
    inner: RepSpec,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

struct Failure(VvmfStatus, String);

impl Failure {
    fn new(status: VvmfStatus, msg: impl std::fmt::Display) -> Self {
        Failure(status, msg.to_string())
    }
}

impl From<RepError> for Failure {
    fn from(e: RepError) -> Self {
        let status = match e {
            RepError::Parse(_) => VvmfStatus::Parse,
            RepError::Relation { .. } | RepError::MixedParity => VvmfStatus::RelationFailed,
            RepError::TraceInconsistent(_) => VvmfStatus::CheckFailed,
            _ => VvmfStatus::InvalidArgument,
        };
        Failure::new(status, e)
    }
}

impl From<SeriesError> for Failure {
    fn from(e: SeriesError) -> Self {
        let status = match e {
            SeriesError::DivisionByZero => VvmfStatus::DivisionByZero,
            SeriesError::BadRecord(_) => VvmfStatus::Parse,
            _ => VvmfStatus::InvalidArgument,
        };
        Failure::new(status, e)
    }
}

impl From<DetError> for Failure {
    fn from(e: DetError) -> Self {
        let status = match e {
            DetError::Singular => VvmfStatus::Singular,
            DetError::Parse(_) => VvmfStatus::Parse,
            DetError::Rep(r) => return r.into(),
            _ => VvmfStatus::InvalidArgument,
        };
        Failure::new(status, e)
    }
}

impl From<WeightError> for Failure {
    fn from(e: WeightError) -> Self {
        match e {
            WeightError::Rep(r) => r.into(),
            other => Failure::new(VvmfStatus::InvalidArgument, other),
        }
    }
}

/// Runs `f`, converting errors and panics into a status and a stored message.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> VvmfStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            VvmfStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| payload.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "internal panic".into());
            set_error(msg);
            VvmfStatus::Internal
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure::new(VvmfStatus::NullPointer, "null string argument"));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|e| Failure::new(VvmfStatus::InvalidUtf8, e))
}

unsafe fn ref_arg<'a, T>(p: *const T) -> Result<&'a T, Failure> {
    p.as_ref()
        .ok_or_else(|| Failure::new(VvmfStatus::NullPointer, "null handle argument"))
}

unsafe fn put<T>(out: *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure::new(VvmfStatus::NullPointer, "null output pointer"));
    }
    out.write(value);
    Ok(())
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> Result<(), Failure> {
    let c = CString::new(s).map_err(|e| Failure::new(VvmfStatus::Internal, e))?;
    put(out, c.into_raw())
}

unsafe fn put_series(out: *mut *mut VvmfSeries, s: QSeries) -> Result<(), Failure> {
    put(out, Box::into_raw(Box::new(VvmfSeries { inner: s })))
}

unsafe fn put_rep(out: *mut *mut VvmfRep, r: RepSpec) -> Result<(), Failure> {
    put(out, Box::into_raw(Box::new(VvmfRep { inner: r })))
}

fn json<T: serde::Serialize>(v: &T) -> Result<String, Failure> {
    serde_json::to_string(v).map_err(|e| Failure::new(VvmfStatus::Internal, e))
}

/// Message for the most recent failure on this thread, or null.
///
/// The pointer stays valid until the next library call on this thread.
#[no_mangle]
pub extern "C" fn vvmf_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn vvmf_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

#[no_mangle]
pub unsafe extern "C" fn vvmf_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Expands `E4`, `E6`, `Delta`, `J`, `delta` or `f:<n>` with `order` trusted q-powers.
#[no_mangle]
pub unsafe extern "C" fn vvmf_series_named(name: *const c_char, order: i64, out: *mut *mut VvmfSeries) -> VvmfStatus {
    guard(|| {
        let form: NamedForm = str_arg(name)?
            .parse()
            .map_err(|e| Failure::new(VvmfStatus::InvalidArgument, e))?;
        let s = form
            .expand(order)
            .map_err(|e| Failure::new(VvmfStatus::InvalidArgument, e))?;
        put_series(out, s)
    })
}

/// Parses a series record `{"grid", "lead", "valid_to", "coeffs"}`.
#[no_mangle]
pub unsafe extern "C" fn vvmf_series_from_json(json_text: *const c_char, out: *mut *mut VvmfSeries) -> VvmfStatus {
    guard(|| {
        let s: QSeries = serde_json::from_str(str_arg(json_text)?).map_err(|e| Failure::new(VvmfStatus::Parse, e))?;
        put_series(out, s)
    })
}

#[no_mangle]
pub unsafe extern "C" fn vvmf_series_to_json(s: *const VvmfSeries, out: *mut *mut c_char) -> VvmfStatus {
    guard(|| put_string(out, json(&ref_arg(s)?.inner)?))
}

/// Human-readable expansion, e.g. `q^-1 + 196884·q + …`.
#[no_mangle]
pub unsafe extern "C" fn vvmf_series_to_string(s: *const VvmfSeries, out: *mut *mut c_char) -> VvmfStatus {
    guard(|| put_string(out, ref_arg(s)?.inner.to_string()))
}

/// Binary series operations.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VvmfSeriesOp {
    Add = 0,
    Sub = 1,
    Mul = 2,
    Div = 3,
}

#[no_mangle]
pub unsafe extern "C" fn vvmf_series_binary(
    op: VvmfSeriesOp,
    a: *const VvmfSeries,
    b: *const VvmfSeries,
    out: *mut *mut VvmfSeries,
) -> VvmfStatus {
    guard(|| {
        let (a, b) = (&ref_arg(a)?.inner, &ref_arg(b)?.inner);
        let r = match op {
            VvmfSeriesOp::Add => a + b,
            VvmfSeriesOp::Sub => a - b,
            VvmfSeriesOp::Mul => a * b,
            VvmfSeriesOp::Div => a.try_div(b)?,
        };
        put_series(out, r)
    })
}

/// `s^k`; negative `k` requires a nonzero series.
#[no_mangle]
pub unsafe extern "C" fn vvmf_series_pow(s: *const VvmfSeries, k: i64, out: *mut *mut VvmfSeries) -> VvmfStatus {
    guard(|| put_series(out, ref_arg(s)?.inner.pow(k)?))
}

/// Whether `a` and `b` agree exactly on a shared window covering both leading terms.
#[no_mangle]
pub unsafe extern "C" fn vvmf_series_agree(a: *const VvmfSeries, b: *const VvmfSeries, out: *mut bool) -> VvmfStatus {
    guard(|| put(out, detlab::agrees_on_window(&ref_arg(a)?.inner, &ref_arg(b)?.inner)))
}

/// Coefficient of `q^(num/den)` as a cyclotomic-number record in JSON.
#[no_mangle]
pub unsafe extern "C" fn vvmf_series_coefficient(
    s: *const VvmfSeries,
    num: i64,
    den: i64,
    out: *mut *mut c_char,
) -> VvmfStatus {
    guard(|| {
        if den == 0 {
            return Err(Failure::new(VvmfStatus::InvalidArgument, "zero denominator"));
        }
        let e = Rational::new(num.into(), den.into());
        let c = ref_arg(s)?
            .inner
            .coefficient(&e)
            .ok_or_else(|| Failure::new(VvmfStatus::InvalidArgument, "exponent outside the validity window"))?;
        put_string(out, json(&c)?)
    })
}

#[no_mangle]
pub unsafe extern "C" fn vvmf_series_free(s: *mut VvmfSeries) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Parses and validates a representation file.
#[no_mangle]
pub unsafe extern "C" fn vvmf_rep_from_json(json_text: *const c_char, out: *mut *mut VvmfRep) -> VvmfStatus {
    guard(|| put_rep(out, RepSpec::from_json(str_arg(json_text)?)?))
}

#[no_mangle]
pub unsafe extern "C" fn vvmf_rep_to_json(rep: *const VvmfRep, out: *mut *mut c_char) -> VvmfStatus {
    guard(|| put_string(out, json(&ref_arg(rep)?.inner.to_file())?))
}

/// The character `κ^j`.
#[no_mangle]
pub unsafe extern "C" fn vvmf_rep_kappa(j: i64, out: *mut *mut VvmfRep) -> VvmfStatus {
    guard(|| put_rep(out, replib::kappa_power(j)))
}

#[no_mangle]
pub unsafe extern "C" fn vvmf_rep_twist(rep: *const VvmfRep, j: i64, out: *mut *mut VvmfRep) -> VvmfStatus {
    guard(|| put_rep(out, replib::twist(&ref_arg(rep)?.inner, j)?))
}

#[no_mangle]
pub unsafe extern "C" fn vvmf_rep_direct_sum(a: *const VvmfRep, b: *const VvmfRep, out: *mut *mut VvmfRep) -> VvmfStatus {
    guard(|| put_rep(out, replib::direct_sum(&ref_arg(a)?.inner, &ref_arg(b)?.inner)?))
}

#[no_mangle]
pub unsafe extern "C" fn vvmf_rep_dimension(rep: *const VvmfRep, out: *mut usize) -> VvmfStatus {
    guard(|| put(out, ref_arg(rep)?.inner.dimension()))
}

/// `0` for even, `1` for odd.
#[no_mangle]
pub unsafe extern "C" fn vvmf_rep_epsilon(rep: *const VvmfRep, out: *mut i64) -> VvmfStatus {
    guard(|| put(out, ref_arg(rep)?.inner.parity().epsilon()))
}

/// Analysis report as JSON; candidates are enumerated when `enumerate` is set,
/// constrained to `sum_w` when `has_sum` is set.
#[no_mangle]
pub unsafe extern "C" fn vvmf_rep_analyze(
    rep: *const VvmfRep,
    enumerate: bool,
    k_min: i64,
    k_max: i64,
    has_sum: bool,
    sum_w: i64,
    out: *mut *mut c_char,
) -> VvmfStatus {
    guard(|| {
        let bounds = enumerate.then_some(EnumerationBounds {
            k_min,
            k_max,
            sum_w: has_sum.then_some(sum_w),
        });
        put_string(out, json(&weightcalc::analyze(&ref_arg(rep)?.inner, bounds)?)?)
    })
}

/// `Δ_n(ρ)` to `order` trusted q-powers; requires `n ≡ ε (mod 2)`.
#[no_mangle]
pub unsafe extern "C" fn vvmf_rep_det(rep: *const VvmfRep, n: i64, order: i64, out: *mut *mut VvmfSeries) -> VvmfStatus {
    guard(|| put_series(out, detlab::det_n(&ref_arg(rep)?.inner, n, order)?))
}

#[no_mangle]
pub unsafe extern "C" fn vvmf_rep_free(rep: *mut VvmfRep) {
    if !rep.is_null() {
        drop(Box::from_raw(rep));
    }
}

/// Checks a generators file against `F_1 ∧ … ∧ F_d = K·δ^{Σw}`; the JSON
/// report goes to `out` and `passed` receives the verdict.
#[no_mangle]
pub unsafe extern "C" fn vvmf_check_generators(
    generators_json: *const c_char,
    order: i64,
    out: *mut *mut c_char,
    passed: *mut bool,
) -> VvmfStatus {
    guard(|| {
        let file = detlab::GeneratorsFile::from_json(str_arg(generators_json)?)?;
        let report = detlab::check_gensdet(&file.generators, &file.weights(), order)?;
        put(passed, report.passed())?;
        put_string(out, json(&report)?)
    })
}

/// Runs a verification suite by name; the JSON report goes to `out`.
#[no_mangle]
pub unsafe extern "C" fn vvmf_verify_suite(
    suite: *const c_char,
    order: i64,
    seed: u64,
    out: *mut *mut c_char,
    passed: *mut bool,
) -> VvmfStatus {
    guard(|| {
        let suite: Suite = str_arg(suite)?
            .parse()
            .map_err(|e: String| Failure::new(VvmfStatus::InvalidArgument, e))?;
        if order < 1 {
            return Err(Failure::new(VvmfStatus::InvalidArgument, "order must be positive"));
        }
        let report = suites::run_suite(suite, order, seed);
        put(passed, report.all_passed())?;
        put_string(out, json(&report)?)
    })
}
