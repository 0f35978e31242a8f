//! C interface to `charp`.
//!
//! Fields and series are opaque handles created by `charp_field_new` /
//! `charp_series_parse` and released with the matching `_free`. Every
//! fallible call returns a [`CharpStatus`]; on failure the message is
//! available from `charp_last_error` on the same thread. Strings handed out
//! by the library are released with `charp_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use charp::error::Error;
use charp::ff::{Field, FieldCtx};
use charp::moduli::{milnor, modality, Milnor};
use charp::pseries::{format_series, Series};
use charp::reduce::{determinacy_bound, Determinacy, ReduceOptions};
use charp::report;

/// Result of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CharpStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    /// Malformed series or modulus, unknown symbol, coefficient outside the
    /// field, repeated exponent.
    Parse = 3,
    /// Invalid field parameters.
    Field = 4,
    /// Input violates a mathematical precondition (zero or constant series,
    /// truncation too small, ...).
    Precondition = 5,
    InfiniteMilnor = 6,
    Budget = 7,
    Internal = 8,
    Panic = 9,
}

pub struct CharpField(Field);

pub struct CharpSeries(Series);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let msg = CString::new(msg.replace('\0', " ")).unwrap();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn status_of(e: &Error) -> CharpStatus {
    match e {
        Error::Parse { .. }
        | Error::DuplicateExponent(_)
        | Error::UnknownSymbol { .. }
        | Error::OutsideField(_) => CharpStatus::Parse,
        Error::NotPrime(_) | Error::InvalidModulus(_) | Error::ContextMismatch { .. } => {
            CharpStatus::Field
        }
        Error::InfiniteMilnor(_) => CharpStatus::InfiniteMilnor,
        Error::Budget { .. } => CharpStatus::Budget,
        Error::Internal(_) => CharpStatus::Internal,
        _ => CharpStatus::Precondition,
    }
}

struct Fail(CharpStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn guard(body: impl FnOnce() -> Result<(), Fail>) -> CharpStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            CharpStatus::Ok
        }
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("panic inside charp".into());
            CharpStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref()
        .ok_or_else(|| Fail(CharpStatus::NullPointer, format!("{what} is null")))
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(Fail(CharpStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail(CharpStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn put<T>(out: *mut T, value: T, what: &str) -> Result<(), Fail> {
    if out.is_null() {
        return Err(Fail(CharpStatus::NullPointer, format!("{what} is null")));
    }
    out.write(value);
    Ok(())
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> Result<(), Fail> {
    let c = CString::new(s).map_err(|_| Fail(CharpStatus::Internal, "NUL in output".into()))?;
    if out.is_null() {
        return Err(Fail(
            CharpStatus::NullPointer,
            "output pointer is null".into(),
        ));
    }
    out.write(c.into_raw());
    Ok(())
}

fn json<T: serde::Serialize>(v: &T) -> String {
    serde_json::to_string(v).expect("reports serialize")
}

/// Message of the last failed call on this thread, or NULL. The pointer
/// stays valid until the next call into the library on this thread.
#[no_mangle]
pub extern "C" fn charp_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// `F_{p^deg}` with the default modulus.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn charp_field_new(
    p: u32,
    deg: u32,
    out: *mut *mut CharpField,
) -> CharpStatus {
    guard(|| {
        let ctx = FieldCtx::new(p, deg as usize)?;
        put(out, Box::into_raw(Box::new(CharpField(ctx))), "out")
    })
}

/// Field defined by a modulus written in `g`, e.g. `"g^2+g+1"`.
///
/// # Safety
/// `modulus` must be a NUL-terminated string and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn charp_field_with_modulus(
    p: u32,
    modulus: *const c_char,
    out: *mut *mut CharpField,
) -> CharpStatus {
    guard(|| {
        let ctx = report::resolve_field(p, None, Some(text(modulus, "modulus")?))?;
        put(out, Box::into_raw(Box::new(CharpField(ctx))), "out")
    })
}

/// # Safety
/// `field` must come from this library and not be freed twice; NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn charp_field_free(field: *mut CharpField) {
    if !field.is_null() {
        drop(Box::from_raw(field));
    }
}

/// JSON `{"p":..,"deg":..,"modulus":".."}`.
///
/// # Safety
/// `field` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn charp_field_describe(
    field: *const CharpField,
    out: *mut *mut c_char,
) -> CharpStatus {
    guard(|| {
        let f = deref(field, "field")?;
        put_string(out, json(&report::FieldInfo::of(&f.0)))
    })
}

/// Parses a series such as `"x^2 + (g+1)*x^5"`. A negative `trunc` selects
/// the default precision `max(largest exponent, dbar + 1)`.
///
/// # Safety
/// `field` must be a live handle, `text_in` NUL-terminated and `out` valid
/// for writes.
#[no_mangle]
pub unsafe extern "C" fn charp_series_parse(
    field: *const CharpField,
    text_in: *const c_char,
    trunc: i64,
    out: *mut *mut CharpSeries,
) -> CharpStatus {
    guard(|| {
        let f = deref(field, "field")?;
        let s = text(text_in, "text")?;
        let trunc = usize::try_from(trunc).ok();
        let series = report::parse_with_default_trunc(s, &f.0, trunc)?;
        put(out, Box::into_raw(Box::new(CharpSeries(series))), "out")
    })
}

/// # Safety
/// `series` must come from this library and not be freed twice; NULL is
/// ignored.
#[no_mangle]
pub unsafe extern "C" fn charp_series_free(series: *mut CharpSeries) {
    if !series.is_null() {
        drop(Box::from_raw(series));
    }
}

/// Text form, parseable by `charp_series_parse`.
///
/// # Safety
/// `series` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn charp_series_to_string(
    series: *const CharpSeries,
    out: *mut *mut c_char,
) -> CharpStatus {
    guard(|| put_string(out, format_series(&deref(series, "series")?.0)))
}

/// Precision of the series.
///
/// # Safety
/// `series` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn charp_series_trunc(
    series: *const CharpSeries,
    out: *mut usize,
) -> CharpStatus {
    guard(|| put(out, deref(series, "series")?.0.trunc(), "out"))
}

/// Support invariants and Lambda sets as JSON.
///
/// # Safety
/// `series` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn charp_invariants_json(
    series: *const CharpSeries,
    out: *mut *mut c_char,
) -> CharpStatus {
    guard(|| {
        let r = report::invariants_report(&deref(series, "series")?.0)?;
        put_string(out, json(&r))
    })
}

/// Normal form, parameters and coordinate change as JSON.
///
/// # Safety
/// `series` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn charp_normal_form_json(
    series: *const CharpSeries,
    out: *mut *mut c_char,
) -> CharpStatus {
    guard(|| {
        let r = report::normal_form_report(&deref(series, "series")?.0, &ReduceOptions::default())?;
        put_string(out, json(&r))
    })
}

/// Coordinate change matching `f` to `g`, as JSON; `"matched": false` with
/// a reason when their `d(f)`-jets differ.
///
/// # Safety
/// `f`, `g` must be live handles and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn charp_match_jets_json(
    f: *const CharpSeries,
    g: *const CharpSeries,
    out: *mut *mut c_char,
) -> CharpStatus {
    guard(|| {
        let r = report::match_report(
            &deref(f, "f")?.0,
            &deref(g, "g")?.0,
            &ReduceOptions::default(),
        )?;
        put_string(out, json(&r))
    })
}

fn strip_constant(f: &Series) -> Result<Series, Error> {
    let c = f.coeff(0);
    if c.is_zero() {
        Ok(f.clone())
    } else {
        f.sub(&Series::monomial(f.ctx(), 0, c, f.trunc())?)
    }
}

/// Milnor number. `*infinite` is set to 1 when `f' = 0`, and `*mu` is then 0.
///
/// # Safety
/// `series` must be a live handle; `mu` and `infinite` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn charp_milnor(
    series: *const CharpSeries,
    mu: *mut u64,
    infinite: *mut bool,
) -> CharpStatus {
    guard(|| {
        let f = strip_constant(&deref(series, "series")?.0)?;
        let (m, inf) = match milnor(&f)? {
            Milnor::Finite(m) => (m, false),
            Milnor::Infinite { .. } => (0, true),
        };
        put(mu, m, "mu")?;
        put(infinite, inf, "infinite")
    })
}

/// Right modality `floor(mu / p)`; `CHARP_STATUS_INFINITE_MILNOR` when
/// `mu` is infinite.
///
/// # Safety
/// `series` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn charp_modality(series: *const CharpSeries, out: *mut u64) -> CharpStatus {
    guard(|| {
        let f = strip_constant(&deref(series, "series")?.0)?;
        put(out, modality(&f)?, "out")
    })
}

/// Determinacy bound `d(f)`. `*e` receives `e(f)`; a nonzero value marks
/// infinite Milnor number, where the bound holds among series of equal `e`.
///
/// # Safety
/// `series` must be a live handle; `d` and `e` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn charp_determinacy(
    series: *const CharpSeries,
    d: *mut u64,
    e: *mut u32,
) -> CharpStatus {
    guard(|| {
        let f = strip_constant(&deref(series, "series")?.0)?;
        let (dv, ev) = match determinacy_bound(&f)? {
            Determinacy::Finite(d) => (d, 0),
            Determinacy::InfiniteMilnor { e, d } => (d, e),
        };
        put(d, dv, "d")?;
        put(e, ev, "e")
    })
}

/// Releases a string returned by the library; NULL is ignored.
///
/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn charp_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
