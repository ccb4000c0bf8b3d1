//! C ABI for `spinwrithe`.
//!
//! Every function returns an [`SwStatus`]; results go through out-pointers.
//! On failure a message is kept per thread and can be read with
//! [`sw_last_error_message`]. Handles are opaque and must be released with
//! the matching `*_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use spinwrithe::writhe::writhe_gauss_serial;
use spinwrithe::{
    close_at_infinity, ground_state, integrate_tangent, random_field, twist_profile,
    writhe_angular, writhe_fuller, Error, Grid, Observables, SpaceCurve, SpinField, TwistParams,
};

/// Opaque spin field.
pub struct SwField(SpinField);

/// Opaque space curve.
pub struct SwCurve(SpaceCurve);

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SwStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Validation = 3,
    Io = 4,
    Numerical = 5,
    Panic = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SwObservables {
    pub energy: f64,
    pub momentum: f64,
    pub magnetization: f64,
    pub writhe: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> SwStatus {
    match e {
        Error::Io(_) => SwStatus::Io,
        Error::NumericalBlowUp { .. }
        | Error::DegenerateCurve(_)
        | Error::InsufficientResolution { .. }
        | Error::PathClosure { .. }
        | Error::ShortTrace(_) => SwStatus::Numerical,
        _ => SwStatus::Validation,
    }
}

fn guard(f: impl FnOnce() -> Result<(), (SwStatus, String)>) -> SwStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => SwStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("panic inside spinwrithe".into());
            SwStatus::Panic
        }
    }
}

fn lib<T>(r: spinwrithe::Result<T>) -> Result<T, (SwStatus, String)> {
    r.map_err(|e| (status_of(&e), e.to_string()))
}

fn null(what: &str) -> (SwStatus, String) {
    (SwStatus::NullPointer, format!("{what} is null"))
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, (SwStatus, String)> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn put<T>(out: *mut T, v: T, what: &str) -> Result<(), (SwStatus, String)> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(v);
    Ok(())
}

/// Message of the last failure on this thread, or null. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn sw_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// # Safety
/// `json` must be a valid NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sw_field_from_json(
    json: *const c_char,
    out: *mut *mut SwField,
) -> SwStatus {
    guard(|| {
        if json.is_null() {
            return Err(null("json"));
        }
        let text = CStr::from_ptr(json)
            .to_str()
            .map_err(|e| (SwStatus::InvalidArgument, format!("json is not UTF-8: {e}")))?;
        let f = lib(SpinField::from_json(text))?;
        put(out, Box::into_raw(Box::new(SwField(f))), "out")
    })
}

/// Serializes a field; release the string with [`sw_string_free`].
///
/// # Safety
/// `field` must come from this library; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sw_field_to_json(
    field: *const SwField,
    out: *mut *mut c_char,
) -> SwStatus {
    guard(|| {
        let f = deref(field, "field")?;
        let text = lib(f.0.to_json())?;
        let c = CString::new(text).map_err(|e| (SwStatus::Validation, e.to_string()))?;
        put(out, c.into_raw(), "out")
    })
}

/// # Safety
/// `s` must be null or a string returned by this library.
#[no_mangle]
pub unsafe extern "C" fn sw_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

fn grid(s_min: f64, s_max: f64, n: usize) -> Result<Grid, (SwStatus, String)> {
    lib(Grid::new(s_min, s_max, n))
}

/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sw_field_ground(
    s_min: f64,
    s_max: f64,
    n: usize,
    out: *mut *mut SwField,
) -> SwStatus {
    guard(|| {
        let f = ground_state(grid(s_min, s_max, n)?);
        put(out, Box::into_raw(Box::new(SwField(f))), "out")
    })
}

/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sw_field_twist(
    s_min: f64,
    s_max: f64,
    n: usize,
    theta0: f64,
    w: f64,
    dphi: f64,
    w_phi: f64,
    s0: f64,
    out: *mut *mut SwField,
) -> SwStatus {
    guard(|| {
        let g = grid(s_min, s_max, n)?;
        let f = lib(twist_profile(
            g,
            TwistParams::new(theta0, w, dphi, w_phi, s0),
        ))?;
        put(out, Box::into_raw(Box::new(SwField(f))), "out")
    })
}

/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sw_field_random(
    s_min: f64,
    s_max: f64,
    n: usize,
    seed: u64,
    modes: usize,
    amplitude: f64,
    out: *mut *mut SwField,
) -> SwStatus {
    guard(|| {
        let f = lib(random_field(grid(s_min, s_max, n)?, seed, modes, amplitude))?;
        put(out, Box::into_raw(Box::new(SwField(f))), "out")
    })
}

/// # Safety
/// `field` must be null or a handle from this library, freed once.
#[no_mangle]
pub unsafe extern "C" fn sw_field_free(field: *mut SwField) {
    if !field.is_null() {
        drop(Box::from_raw(field));
    }
}

/// # Safety
/// `field` must come from this library; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sw_field_len(field: *const SwField, out: *mut usize) -> SwStatus {
    guard(|| put(out, deref(field, "field")?.0.len(), "out"))
}

/// # Safety
/// `field` must come from this library; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sw_field_observables(
    field: *const SwField,
    coupling: f64,
    out: *mut SwObservables,
) -> SwStatus {
    guard(|| {
        let o = lib(Observables::measure(&deref(field, "field")?.0, coupling))?;
        let v = SwObservables {
            energy: o.energy,
            momentum: o.momentum,
            magnetization: o.magnetization,
            writhe: o.writhe,
        };
        put(out, v, "out")
    })
}

/// # Safety
/// `field` must come from this library; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sw_writhe_angular(field: *const SwField, out: *mut f64) -> SwStatus {
    guard(|| put(out, writhe_angular(&deref(field, "field")?.0), "out"))
}

/// Local writhe relative to the ground state on the same grid.
///
/// # Safety
/// `field` must come from this library; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sw_writhe_fuller(field: *const SwField, out: *mut f64) -> SwStatus {
    guard(|| {
        let f = &deref(field, "field")?.0;
        let w = lib(writhe_fuller(f, &ground_state(f.grid)))?;
        put(out, w, "out")
    })
}

/// # Safety
/// `field` must come from this library; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sw_curve_from_field(
    field: *const SwField,
    out: *mut *mut SwCurve,
) -> SwStatus {
    guard(|| {
        let c = integrate_tangent(&deref(field, "field")?.0);
        put(out, Box::into_raw(Box::new(SwCurve(c))), "out")
    })
}

/// Closes an open curve at infinity into a new handle.
///
/// # Safety
/// `curve` must come from this library; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sw_curve_close(
    curve: *const SwCurve,
    radius_factor: f64,
    out: *mut *mut SwCurve,
) -> SwStatus {
    guard(|| {
        let c = lib(close_at_infinity(&deref(curve, "curve")?.0, radius_factor))?;
        put(out, Box::into_raw(Box::new(SwCurve(c))), "out")
    })
}

/// # Safety
/// `curve` must come from this library; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sw_curve_len(curve: *const SwCurve, out: *mut usize) -> SwStatus {
    guard(|| put(out, deref(curve, "curve")?.0.len(), "out"))
}

/// # Safety
/// `curve` must come from this library; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sw_curve_is_closed(curve: *const SwCurve, out: *mut bool) -> SwStatus {
    guard(|| put(out, deref(curve, "curve")?.0.closed, "out"))
}

/// Copies vertex coordinates as `x0 y0 z0 x1 ...` into `buf`, which must
/// hold `3 * len` doubles.
///
/// # Safety
/// `curve` must come from this library; `buf` must hold `cap` doubles.
#[no_mangle]
pub unsafe extern "C" fn sw_curve_points(
    curve: *const SwCurve,
    buf: *mut f64,
    cap: usize,
) -> SwStatus {
    guard(|| {
        let c = &deref(curve, "curve")?.0;
        if buf.is_null() {
            return Err(null("buf"));
        }
        let need = 3 * c.len();
        if cap < need {
            return Err((
                SwStatus::InvalidArgument,
                format!("buffer holds {cap} doubles, need {need}"),
            ));
        }
        let dst = std::slice::from_raw_parts_mut(buf, need);
        for (chunk, p) in dst.chunks_exact_mut(3).zip(&c.points) {
            chunk.copy_from_slice(&[p.x, p.y, p.z]);
        }
        Ok(())
    })
}

/// Gauss writhe of a closed curve (single-threaded).
///
/// # Safety
/// `curve` must come from this library; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sw_curve_writhe(curve: *const SwCurve, out: *mut f64) -> SwStatus {
    guard(|| {
        let w = lib(writhe_gauss_serial(&deref(curve, "curve")?.0))?;
        put(out, w, "out")
    })
}

/// # Safety
/// `curve` must be null or a handle from this library, freed once.
#[no_mangle]
pub unsafe extern "C" fn sw_curve_free(curve: *mut SwCurve) {
    if !curve.is_null() {
        drop(Box::from_raw(curve));
    }
}
