//! C ABI for `paving-core`.
//!
//! Projections cross the boundary as opaque `PavingProjection` handles that
//! the caller releases with `paving_projection_free`. Every fallible call
//! returns a `PavingStatus`; on failure a message is available from
//! `paving_last_error` on the same thread. Strings returned by the library
//! are freed with `paving_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use paving_core::linalg::{compress_psp, operator_norm, random_projection};
use paving_core::paving::{brute_force_min, delta_p_numeric};
use paving_core::rearrange::theorem1_symmetry;
use paving_core::weaver::{build_frame, min_over_symmetries_v0};
use paving_core::{Error, Projection, Symmetry, Vector, WeaverParams};

/// Result codes of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PavingStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    CapExceeded = 3,
    Numerical = 4,
    Degenerate = 5,
    Panic = 6,
}

/// Opaque projection handle.
pub struct PavingProjection {
    inner: Projection,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = CString::new(msg.into().replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn status_of(e: &Error) -> PavingStatus {
    match e {
        Error::CapExceeded { .. } => PavingStatus::CapExceeded,
        Error::Degenerate(_) => PavingStatus::Degenerate,
        Error::NoConvergence { .. } | Error::Numerical(_) => PavingStatus::Numerical,
        _ => PavingStatus::InvalidArgument,
    }
}

/// Runs `body`, recording errors and converting panics.
fn guard(body: impl FnOnce() -> Result<(), (PavingStatus, String)>) -> PavingStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => PavingStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("panic inside paving library");
            PavingStatus::Panic
        }
    }
}

fn lift(e: Error) -> (PavingStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (PavingStatus, String) {
    (PavingStatus::NullPointer, format!("{what} is null"))
}

fn emit_handle(p: Projection, out: *mut *mut PavingProjection) {
    let boxed = Box::new(PavingProjection { inner: p });
    // SAFETY: callers check `out` for null before reaching here.
    unsafe { *out = Box::into_raw(boxed) };
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn paving_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failed call on this thread, or null. Valid until the
/// next failing call on the same thread.
#[no_mangle]
pub extern "C" fn paving_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Seeded random rank-`rank` projection on `R^n`.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn paving_projection_random(
    n: usize,
    rank: usize,
    seed: u64,
    out: *mut *mut PavingProjection,
) -> PavingStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        emit_handle(random_projection(n, rank, seed).map_err(lift)?, out);
        Ok(())
    })
}

/// Projection onto the span of `rank` orthonormal rows of length `n`, given
/// row-major in `rows` (`rank * n` doubles).
///
/// # Safety
/// `rows` must point to `rank * n` readable doubles (may be null when that is 0);
/// `out` must be valid for one handle.
#[no_mangle]
pub unsafe extern "C" fn paving_projection_from_rows(
    rows: *const f64,
    rank: usize,
    n: usize,
    out: *mut *mut PavingProjection,
) -> PavingStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let len = rank.checked_mul(n).ok_or((PavingStatus::InvalidArgument, "size overflow".into()))?;
        if rows.is_null() && len > 0 {
            return Err(null("rows"));
        }
        let data: &[f64] = if len == 0 {
            &[]
        } else {
            // SAFETY: caller guarantees `len` readable doubles.
            unsafe { std::slice::from_raw_parts(rows, len) }
        };
        let rows = data.chunks_exact(n.max(1)).take(rank).map(<[f64]>::to_vec).collect();
        emit_handle(Projection::from_rows(n, rows).map_err(lift)?, out);
        Ok(())
    })
}

/// Floating projection of the explicit counterexample for parameter `m`.
///
/// # Safety
/// `out` must be valid for one handle.
#[no_mangle]
pub unsafe extern "C" fn paving_projection_weaver(m: u32, out: *mut *mut PavingProjection) -> PavingStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let params = WeaverParams::new(m).map_err(lift)?;
        emit_handle(build_frame(&params).to_projection().map_err(lift)?, out);
        Ok(())
    })
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `p` must come from one of the constructors above and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn paving_projection_free(p: *mut PavingProjection) {
    if !p.is_null() {
        // SAFETY: `p` was produced by `Box::into_raw` in `emit_handle`.
        drop(unsafe { Box::from_raw(p) });
    }
}

/// Ambient dimension, or 0 for a null handle.
///
/// # Safety
/// `p` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn paving_projection_dim(p: *const PavingProjection) -> usize {
    unsafe { p.as_ref() }.map_or(0, |h| h.inner.dim())
}

/// Rank, or 0 for a null handle.
///
/// # Safety
/// `p` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn paving_projection_rank(p: *const PavingProjection) -> usize {
    unsafe { p.as_ref() }.map_or(0, |h| h.inner.rank())
}

/// Largest diagonal entry of the projection.
///
/// # Safety
/// `p` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn paving_delta_p(p: *const PavingProjection, out: *mut f64) -> PavingStatus {
    guard(|| {
        let h = unsafe { p.as_ref() }.ok_or_else(|| null("projection"))?;
        let out = unsafe { out.as_mut() }.ok_or_else(|| null("out"))?;
        *out = delta_p_numeric(&h.inner);
        Ok(())
    })
}

unsafe fn read_signs<'a>(signs: *const i8, len: usize) -> Result<&'a [i8], (PavingStatus, String)> {
    if signs.is_null() && len > 0 {
        return Err(null("signs"));
    }
    Ok(if len == 0 {
        &[]
    } else {
        // SAFETY: caller guarantees `len` readable bytes.
        unsafe { std::slice::from_raw_parts(signs, len) }
    })
}

unsafe fn write_signs(s: &Symmetry, out: *mut i8, len: usize) -> Result<(), (PavingStatus, String)> {
    if out.is_null() {
        return Err(null("out_signs"));
    }
    if len != s.len() {
        return Err((
            PavingStatus::InvalidArgument,
            format!("sign buffer has length {len}, expected {}", s.len()),
        ));
    }
    // SAFETY: caller guarantees `len` writable bytes.
    unsafe { std::slice::from_raw_parts_mut(out, len) }.copy_from_slice(s.signs());
    Ok(())
}

/// `||p s p||` for a `+1`/`-1` sign vector of length `dim`.
///
/// # Safety
/// `p` live; `signs` readable for `len` bytes; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn paving_psp_norm(
    p: *const PavingProjection,
    signs: *const i8,
    len: usize,
    out: *mut f64,
) -> PavingStatus {
    guard(|| {
        let h = unsafe { p.as_ref() }.ok_or_else(|| null("projection"))?;
        let out = unsafe { out.as_mut() }.ok_or_else(|| null("out"))?;
        let s = Symmetry::new(unsafe { read_signs(signs, len) }?.to_vec()).map_err(lift)?;
        *out = operator_norm(&compress_psp(&h.inner, &s).map_err(lift)?).map_err(lift)?;
        Ok(())
    })
}

/// Exhaustive `min_s ||p s p||`; refuses dimensions above `max_n`.
/// The minimizing signs are written to `out_signs` (length `dim`).
///
/// # Safety
/// `p` live; `out_norm` writable; `out_signs` writable for `signs_len` bytes.
#[no_mangle]
pub unsafe extern "C" fn paving_brute_force_min(
    p: *const PavingProjection,
    max_n: usize,
    out_norm: *mut f64,
    out_signs: *mut i8,
    signs_len: usize,
) -> PavingStatus {
    guard(|| {
        let h = unsafe { p.as_ref() }.ok_or_else(|| null("projection"))?;
        let out_norm = unsafe { out_norm.as_mut() }.ok_or_else(|| null("out_norm"))?;
        let r = brute_force_min(&h.inner, max_n).map_err(lift)?;
        unsafe { write_signs(&r.argmin, out_signs, signs_len) }?;
        *out_norm = r.min_norm;
        Ok(())
    })
}

/// Single-vector symmetry for `v` (length `dim`): writes the signs, the
/// achieved `||p s p v||` for the normalized `p(v)`, and the bound
/// `sqrt(2 delta_p + 3 delta_p^2)`.
///
/// # Safety
/// `p` live; `v` readable for `len` doubles; outputs writable.
#[no_mangle]
pub unsafe extern "C" fn paving_theorem1(
    p: *const PavingProjection,
    v: *const f64,
    len: usize,
    out_signs: *mut i8,
    signs_len: usize,
    out_norm: *mut f64,
    out_bound: *mut f64,
) -> PavingStatus {
    guard(|| {
        let h = unsafe { p.as_ref() }.ok_or_else(|| null("projection"))?;
        if v.is_null() && len > 0 {
            return Err(null("v"));
        }
        let out_norm = unsafe { out_norm.as_mut() }.ok_or_else(|| null("out_norm"))?;
        let out_bound = unsafe { out_bound.as_mut() }.ok_or_else(|| null("out_bound"))?;
        let coords = if len == 0 {
            Vec::new()
        } else {
            // SAFETY: caller guarantees `len` readable doubles.
            unsafe { std::slice::from_raw_parts(v, len) }.to_vec()
        };
        let r = theorem1_symmetry(&h.inner, &Vector::new(coords)).map_err(lift)?;
        unsafe { write_signs(&r.signs, out_signs, signs_len) }?;
        *out_norm = r.achieved_norm;
        *out_bound = r.bound;
        Ok(())
    })
}

/// Exact certificate for parameter `m` as a JSON document; free with
/// `paving_string_free`.
///
/// # Safety
/// `out_json` must be writable.
#[no_mangle]
pub unsafe extern "C" fn paving_weaver_certificate_json(m: u32, out_json: *mut *mut c_char) -> PavingStatus {
    guard(|| {
        if out_json.is_null() {
            return Err(null("out_json"));
        }
        let params = WeaverParams::new(m).map_err(lift)?;
        let cert = min_over_symmetries_v0(&params).map_err(lift)?;
        let text = serde_json::to_string(&cert).map_err(|e| (PavingStatus::Numerical, e.to_string()))?;
        let c = CString::new(text).expect("json has no nul bytes");
        // SAFETY: checked non-null above.
        unsafe { *out_json = c.into_raw() };
        Ok(())
    })
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn paving_string_free(s: *mut c_char) {
    if !s.is_null() {
        // SAFETY: `s` was produced by `CString::into_raw`.
        drop(unsafe { CString::from_raw(s) });
    }
}

/// Copies the last error into an owned Rust string; test helper.
#[doc(hidden)]
pub fn last_error_string() -> Option<String> {
    let p = paving_last_error();
    if p.is_null() {
        None
    } else {
        // SAFETY: points at the thread-local CString.
        Some(unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned())
    }
}
