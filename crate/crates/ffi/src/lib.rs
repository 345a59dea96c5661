//! C ABI over `supq-weyl`.
//!
//! Every entry point returns an [`SwStatus`]; results come back through
//! out-pointers. Objects are opaque handles released with the matching
//! `*_free`. Complex numbers cross the boundary as interleaved
//! `(re, im)` doubles. After a non-zero status,
//! [`sw_last_error_message`] describes the failure on the calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use supq_weyl::cmatrix::C64;
use supq_weyl::error::Error;
use supq_weyl::groups::{random_supq, GAlgebra, GElement, SUpqAlgebra, SUpqElement, Signature, VALIDATION_TOL};
use supq_weyl::symbols::{
    berezin_pi_closed, berezin_sigma_closed, dpi_symbols, dsigma_symbols, weyl_pi_closed_with, weyl_sigma_closed_with,
    PolySymbol, QuadSymbol, DET_EPSILON,
};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SwStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    DimensionMismatch = 3,
    Singular = 4,
    NotPositiveDefinite = 5,
    Precondition = 6,
    Budget = 7,
    Json = 8,
    NotInGroup = 9,
    Internal = 10,
}

/// Opaque `SU(p,q)` element.
pub struct SwSupq(SUpqElement);
/// Opaque element `(h, k)` of `H_n x SU(p,q)`.
pub struct SwGroupElement(GElement);
/// Opaque Gaussian symbol `c exp(v^t M v + l . v + k)`, `v = (z, conj z)`.
pub struct SwSymbol(QuadSymbol);
/// Opaque polynomial symbol of degree at most two.
pub struct SwPoly(PolySymbol);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> SwStatus {
    match e {
        Error::DimensionMismatch { .. } => SwStatus::DimensionMismatch,
        Error::Singular { .. } => SwStatus::Singular,
        Error::NotPositiveDefinite { .. } => SwStatus::NotPositiveDefinite,
        Error::Precondition { .. } => SwStatus::Precondition,
        Error::BudgetExceeded { .. } | Error::ExpansionBudget { .. } => SwStatus::Budget,
        Error::Json(_) => SwStatus::Json,
        Error::InvalidParameter(_) | Error::NotHermitian { .. } | Error::NotSymmetric { .. } => {
            SwStatus::InvalidArgument
        }
        _ => SwStatus::Internal,
    }
}

fn fail(status: SwStatus, msg: impl Into<String>) -> SwStatus {
    set_error(msg.into());
    status
}

/// Runs `f`, recording errors and panics for `sw_last_error_message`.
fn guard<F>(f: F) -> SwStatus
where
    F: FnOnce() -> Result<(), (SwStatus, String)>,
{
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            SwStatus::Ok
        }
        Ok(Err((s, msg))) => fail(s, msg),
        Err(_) => fail(SwStatus::Internal, "panic inside supq-weyl"),
    }
}

trait OrStatus<T> {
    fn st(self) -> Result<T, (SwStatus, String)>;
}

impl<T> OrStatus<T> for supq_weyl::error::Result<T> {
    fn st(self) -> Result<T, (SwStatus, String)> {
        self.map_err(|e| (status_of(&e), e.to_string()))
    }
}

fn null() -> (SwStatus, String) {
    (SwStatus::NullPointer, "null pointer argument".into())
}

unsafe fn read_str<'a>(s: *const c_char) -> Result<&'a str, (SwStatus, String)> {
    if s.is_null() {
        return Err(null());
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|_| (SwStatus::InvalidArgument, "string is not UTF-8".into()))
}

unsafe fn from_json<T: serde::de::DeserializeOwned>(s: *const c_char) -> Result<T, (SwStatus, String)> {
    serde_json::from_str(read_str(s)?).map_err(|e| (SwStatus::Json, e.to_string()))
}

unsafe fn put<T>(out: *mut *mut T, value: T) -> Result<(), (SwStatus, String)> {
    if out.is_null() {
        return Err(null());
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

unsafe fn get<'a, T>(h: *const T) -> Result<&'a T, (SwStatus, String)> {
    h.as_ref().ok_or_else(null)
}

fn check_group(k: &SUpqElement) -> Result<(), (SwStatus, String)> {
    let r = k.validate();
    if r.passes(VALIDATION_TOL) {
        Ok(())
    } else {
        Err((SwStatus::NotInGroup, format!("element is not in SU(p,q): residual {:.3e}", r.max())))
    }
}

unsafe fn read_point(z: *const f64, len: usize, n: usize) -> Result<Vec<C64>, (SwStatus, String)> {
    if z.is_null() && n > 0 {
        return Err(null());
    }
    if len != n {
        return Err((SwStatus::DimensionMismatch, format!("expected {n} coordinates, got {len}")));
    }
    let raw = std::slice::from_raw_parts(z, 2 * n);
    Ok(raw.chunks_exact(2).map(|c| C64::new(c[0], c[1])).collect())
}

unsafe fn write_complex(v: C64, out: *mut f64) -> Result<(), (SwStatus, String)> {
    if out.is_null() {
        return Err(null());
    }
    *out = v.re;
    *out.add(1) = v.im;
    Ok(())
}

/// Message for the last failed call on this thread, or null. Valid until
/// the next call on the same thread.
#[no_mangle]
pub extern "C" fn sw_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn sw_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Releases a string returned by this library.
///
/// # Safety
/// `s` is null or came from a `*_to_json` call and has not been freed.
#[no_mangle]
pub unsafe extern "C" fn sw_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

// ---------------------------------------------------------------------------
// SU(p,q)
// ---------------------------------------------------------------------------

/// Parses `{"p", "q", "A", "B", "C", "D"}` and checks membership in `SU(p,q)`.
///
/// # Safety
/// `json` is a NUL-terminated string, `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn sw_supq_from_json(json: *const c_char, out: *mut *mut SwSupq) -> SwStatus {
    guard(|| {
        let k: SUpqElement = from_json(json)?;
        check_group(&k)?;
        put(out, SwSupq(k))
    })
}

/// Seeded `exp(X)` with `X` a random algebra element of size `scale`.
///
/// # Safety
/// `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn sw_supq_random(p: usize, q: usize, seed: u64, scale: f64, out: *mut *mut SwSupq) -> SwStatus {
    guard(|| {
        let sig = Signature::new(p, q).st()?;
        put(out, SwSupq(random_supq(seed, scale, sig).st()?))
    })
}

/// # Safety
/// `k` is a live handle, `out` is writable. Free the result with `sw_string_free`.
#[no_mangle]
pub unsafe extern "C" fn sw_supq_to_json(k: *const SwSupq, out: *mut *mut c_char) -> SwStatus {
    guard(|| {
        let k = get(k)?;
        let s = serde_json::to_string(&k.0).map_err(|e| (SwStatus::Json, e.to_string()))?;
        if out.is_null() {
            return Err(null());
        }
        *out = CString::new(s).map_err(|e| (SwStatus::Internal, e.to_string()))?.into_raw();
        Ok(())
    })
}

/// # Safety
/// `k` is null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sw_supq_free(k: *mut SwSupq) {
    if !k.is_null() {
        drop(Box::from_raw(k));
    }
}

/// Parses `{"h": {"z", "c"}, "k": {...}}`.
///
/// # Safety
/// `json` is a NUL-terminated string, `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn sw_group_element_from_json(json: *const c_char, out: *mut *mut SwGroupElement) -> SwStatus {
    guard(|| {
        let g: GElement = from_json(json)?;
        check_group(&g.k)?;
        put(out, SwGroupElement(g))
    })
}

/// # Safety
/// `g` is null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sw_group_element_free(g: *mut SwGroupElement) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

// ---------------------------------------------------------------------------
// symbols
// ---------------------------------------------------------------------------

/// Closed-form `W(sigma(k))`. Fails with `Precondition` when
/// `|det(k + I)| <= det_epsilon`; pass a negative `det_epsilon` for the default.
///
/// # Safety
/// `k` is a live handle, `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn sw_weyl_sigma(
    k: *const SwSupq,
    lambda: f64,
    det_epsilon: f64,
    out: *mut *mut SwSymbol,
) -> SwStatus {
    guard(|| {
        let eps = if det_epsilon < 0.0 { DET_EPSILON } else { det_epsilon };
        put(out, SwSymbol(weyl_sigma_closed_with(&get(k)?.0, lambda, eps).st()?))
    })
}

/// Closed-form `W(pi(g))`.
///
/// # Safety
/// `g` is a live handle, `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn sw_weyl_pi(
    g: *const SwGroupElement,
    lambda: f64,
    det_epsilon: f64,
    out: *mut *mut SwSymbol,
) -> SwStatus {
    guard(|| {
        let eps = if det_epsilon < 0.0 { DET_EPSILON } else { det_epsilon };
        put(out, SwSymbol(weyl_pi_closed_with(&get(g)?.0, lambda, eps).st()?))
    })
}

/// Closed-form Berezin symbol `S(sigma(k))`.
///
/// # Safety
/// `k` is a live handle, `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn sw_berezin_sigma(k: *const SwSupq, lambda: f64, out: *mut *mut SwSymbol) -> SwStatus {
    guard(|| put(out, SwSymbol(berezin_sigma_closed(&get(k)?.0, lambda).st()?)))
}

/// Closed-form Berezin symbol `S(pi(g))`.
///
/// # Safety
/// `g` is a live handle, `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn sw_berezin_pi(g: *const SwGroupElement, lambda: f64, out: *mut *mut SwSymbol) -> SwStatus {
    guard(|| put(out, SwSymbol(berezin_pi_closed(&get(g)?.0, lambda).st()?)))
}

/// Number of complex coordinates `n = p + q` of the symbol's domain.
///
/// # Safety
/// `s` is a live handle.
#[no_mangle]
pub unsafe extern "C" fn sw_symbol_dim(s: *const SwSymbol) -> usize {
    s.as_ref().map_or(0, |s| s.0.n())
}

/// Evaluates at `z`: `n` complex coordinates as `2n` interleaved doubles.
/// Writes `(re, im)` to `out[0..2]`.
///
/// # Safety
/// `z` holds `2 * n` doubles, `out` holds two.
#[no_mangle]
pub unsafe extern "C" fn sw_symbol_eval(s: *const SwSymbol, z: *const f64, n: usize, out: *mut f64) -> SwStatus {
    guard(|| {
        let s = get(s)?;
        let z = read_point(z, n, s.0.n())?;
        write_complex(s.0.eval(&z), out)
    })
}

/// # Safety
/// `s` is null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sw_symbol_free(s: *mut SwSymbol) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// `W(d sigma(X))` for `X` given as `{"p", "q", "A", "B", "C", "D"}`.
///
/// # Safety
/// `json` is a NUL-terminated string, `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn sw_dweyl_sigma_from_json(json: *const c_char, lambda: f64, out: *mut *mut SwPoly) -> SwStatus {
    guard(|| {
        let x: SUpqAlgebra = from_json(json)?;
        put(out, SwPoly(dsigma_symbols(&x, lambda).1))
    })
}

/// `W(d pi(X))` for `X` given as `{"z0", "c0", "Y"}`.
///
/// # Safety
/// `json` is a NUL-terminated string, `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn sw_dweyl_pi_from_json(json: *const c_char, lambda: f64, out: *mut *mut SwPoly) -> SwStatus {
    guard(|| {
        let x: GAlgebra = from_json(json)?;
        put(out, SwPoly(dpi_symbols(&x, lambda).st()?.1))
    })
}

/// # Safety
/// As for `sw_symbol_eval`.
#[no_mangle]
pub unsafe extern "C" fn sw_poly_eval(s: *const SwPoly, z: *const f64, n: usize, out: *mut f64) -> SwStatus {
    guard(|| {
        let s = get(s)?;
        let z = read_point(z, n, s.0.n())?;
        write_complex(s.0.eval(&z), out)
    })
}

/// # Safety
/// `s` is null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sw_poly_free(s: *mut SwPoly) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}
