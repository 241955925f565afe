//! C ABI over `freearr`.
//!
//! Arrangements cross the boundary as opaque `FreearrArrangement` handles
//! owned by the caller and released with `freearr_arrangement_free`. Every
//! fallible call returns a `FreearrStatus`; on failure a message is kept in
//! thread-local storage and read with `freearr_last_error`. Strings returned
//! by the library are released with `freearr_string_free`. Panics never
//! cross the boundary: they are reported as `FREEARR_STATUS_PANIC`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use freearr::classes::{self, Class, ClassVerdict};
use freearr::derivations::{self, FreenessVerdict};
use freearr::format::{emit_arrangement, parse_arrangement};
use freearr::iso::{linear_isomorphic, matroid_isomorphic};
use freearr::{canonicalize, catalog, char_poly, Arrangement, Error, Flat};

/// Opaque arrangement handle.
pub struct FreearrArrangement(Arrangement);

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FreearrStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    InvalidHyperplane = 4,
    DimensionMismatch = 5,
    NotMember = 6,
    NotAFlat = 7,
    IndexOutOfRange = 8,
    BufferTooSmall = 9,
    UnknownCatalogEntry = 10,
    Failed = 11,
    Panic = 12,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FreearrClass {
    Inductive = 0,
    Additional = 1,
    Divisional = 2,
    Stair = 3,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FreearrVerdict {
    Member = 0,
    NonMember = 1,
    Undecided = 2,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Fail(FreearrStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Fail {
        let status = match &e {
            Error::Parse { .. } => FreearrStatus::Parse,
            Error::InvalidHyperplane(_) | Error::DuplicateHyperplane(_) => FreearrStatus::InvalidHyperplane,
            Error::DimensionMismatch { .. } => FreearrStatus::DimensionMismatch,
            Error::NotMember(_) => FreearrStatus::NotMember,
            Error::NotAFlat => FreearrStatus::NotAFlat,
            Error::UnknownCatalogEntry(_) => FreearrStatus::UnknownCatalogEntry,
            _ => FreearrStatus::Failed,
        };
        Fail(status, e.to_string())
    }
}

fn fail<T>(status: FreearrStatus, msg: impl Into<String>) -> Result<T, Fail> {
    Err(Fail(status, msg.into()))
}

/// Runs `f`, converting errors and panics into a status.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> FreearrStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => FreearrStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("panic: {msg}"));
            FreearrStatus::Panic
        }
    }
}

unsafe fn handle<'a>(h: *const FreearrArrangement) -> Result<&'a Arrangement, Fail> {
    match h.as_ref() {
        Some(h) => Ok(&h.0),
        None => fail(FreearrStatus::NullPointer, "null arrangement handle"),
    }
}

unsafe fn string<'a>(s: *const c_char) -> Result<&'a str, Fail> {
    if s.is_null() {
        return fail(FreearrStatus::NullPointer, "null string");
    }
    CStr::from_ptr(s).to_str().or_else(|_| fail(FreearrStatus::InvalidUtf8, "string is not UTF-8"))
}

unsafe fn out_ptr<'a, T>(p: *mut T) -> Result<&'a mut T, Fail> {
    match p.as_mut() {
        Some(p) => Ok(p),
        None => fail(FreearrStatus::NullPointer, "null output pointer"),
    }
}

unsafe fn put_handle(out: *mut *mut FreearrArrangement, a: Arrangement) -> Result<(), Fail> {
    *out_ptr(out)? = Box::into_raw(Box::new(FreearrArrangement(a)));
    Ok(())
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> Result<(), Fail> {
    let c = CString::new(s).or_else(|_| fail(FreearrStatus::Failed, "string contains NUL"))?;
    *out_ptr(out)? = c.into_raw();
    Ok(())
}

/// Copies `src` to `buf` if it fits; `len` always receives the needed size.
unsafe fn put_slice<T: Copy>(src: &[T], buf: *mut T, cap: usize, len: *mut usize) -> Result<(), Fail> {
    *out_ptr(len)? = src.len();
    if src.len() > cap {
        return fail(FreearrStatus::BufferTooSmall, format!("need {} entries, buffer holds {cap}", src.len()));
    }
    if !src.is_empty() {
        if buf.is_null() {
            return fail(FreearrStatus::NullPointer, "null buffer");
        }
        ptr::copy_nonoverlapping(src.as_ptr(), buf, src.len());
    }
    Ok(())
}

unsafe fn indices<'a>(ix: *const usize, n: usize, bound: usize) -> Result<&'a [usize], Fail> {
    if n == 0 {
        return Ok(&[]);
    }
    if ix.is_null() {
        return fail(FreearrStatus::NullPointer, "null index array");
    }
    let s = std::slice::from_raw_parts(ix, n);
    if let Some(&i) = s.iter().find(|&&i| i >= bound) {
        return fail(FreearrStatus::IndexOutOfRange, format!("index {i} out of range 0..{bound}"));
    }
    Ok(s)
}

/// Message of the last failed call on this thread, or NULL. The pointer is
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn freearr_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// # Safety
/// `s` must be NULL or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn freearr_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// # Safety
/// `h` must be NULL or a handle returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn freearr_arrangement_free(h: *mut FreearrArrangement) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// Parses the plain-text format. With `strict`, repeated hyperplanes are an
/// error.
///
/// # Safety
/// `text` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn freearr_arrangement_parse(
    text: *const c_char,
    strict: bool,
    out: *mut *mut FreearrArrangement,
) -> FreearrStatus {
    guard(|| put_handle(out, parse_arrangement(string(text)?, strict)?))
}

/// Builds an arrangement from `count` normals stored row-major in `normals`
/// (`count * dim` integers).
///
/// # Safety
/// `normals` must hold `count * dim` integers; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn freearr_arrangement_new(
    dim: usize,
    normals: *const i64,
    count: usize,
    out: *mut *mut FreearrArrangement,
) -> FreearrStatus {
    guard(|| {
        let total = dim.checked_mul(count).ok_or(Fail(FreearrStatus::Failed, "size overflow".into()))?;
        let data: &[i64] = if total == 0 {
            &[]
        } else if normals.is_null() {
            return fail(FreearrStatus::NullPointer, "null normals");
        } else {
            std::slice::from_raw_parts(normals, total)
        };
        let a = if dim == 0 { Arrangement::empty(0) } else { Arrangement::new(dim, data.chunks(dim))? };
        put_handle(out, a)
    })
}

/// Copies a built-in arrangement (`A`, `B`, `C`, `D`, `Dpp`, `E7`, ...).
///
/// # Safety
/// `name` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn freearr_catalog_get(name: *const c_char, out: *mut *mut FreearrArrangement) -> FreearrStatus {
    guard(|| put_handle(out, catalog::get(string(name)?)?))
}

/// # Safety
/// `h` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn freearr_arrangement_dim(h: *const FreearrArrangement) -> usize {
    h.as_ref().map_or(0, |h| h.0.dim())
}

/// # Safety
/// `h` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn freearr_arrangement_len(h: *const FreearrArrangement) -> usize {
    h.as_ref().map_or(0, |h| h.0.len())
}

/// Rank of the span of the normals.
///
/// # Safety
/// `h` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn freearr_arrangement_rank(h: *const FreearrArrangement) -> usize {
    h.as_ref().map_or(0, |h| h.0.rank())
}

/// Canonical normal of hyperplane `index` into `buf` (`dim` entries).
///
/// # Safety
/// `h` must be a live handle; `buf` must hold `cap` integers; `len` must be
/// writable.
#[no_mangle]
pub unsafe extern "C" fn freearr_arrangement_normal(
    h: *const FreearrArrangement,
    index: usize,
    buf: *mut i64,
    cap: usize,
    len: *mut usize,
) -> FreearrStatus {
    guard(|| {
        let a = handle(h)?;
        if index >= a.len() {
            return fail(FreearrStatus::IndexOutOfRange, format!("index {index} out of range 0..{}", a.len()));
        }
        put_slice(a.hyperplane(index).normal(), buf, cap, len)
    })
}

/// Canonical text form; release with `freearr_string_free`.
///
/// # Safety
/// `h` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn freearr_arrangement_emit(h: *const FreearrArrangement, out: *mut *mut c_char) -> FreearrStatus {
    guard(|| put_string(out, emit_arrangement(handle(h)?)))
}

/// Coefficients of the characteristic polynomial, constant term first
/// (`dim + 1` entries).
///
/// # Safety
/// `h` must be a live handle; `buf` must hold `cap` integers; `len` must be
/// writable.
#[no_mangle]
pub unsafe extern "C" fn freearr_char_poly(
    h: *const FreearrArrangement,
    buf: *mut i64,
    cap: usize,
    len: *mut usize,
) -> FreearrStatus {
    guard(|| {
        let a = handle(h)?;
        let chi = char_poly(a);
        let coeffs: Vec<i64> = (0..=a.dim()).map(|k| chi.coeff(k)).collect();
        put_slice(&coeffs, buf, cap, len)
    })
}

/// Deletion of hyperplane `index`.
///
/// # Safety
/// `h` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn freearr_delete(h: *const FreearrArrangement, index: usize, out: *mut *mut FreearrArrangement) -> FreearrStatus {
    guard(|| {
        let a = handle(h)?;
        if index >= a.len() {
            return fail(FreearrStatus::IndexOutOfRange, format!("index {index} out of range 0..{}", a.len()));
        }
        put_handle(out, a.delete_index(index))
    })
}

/// Restriction to the flat cut out by the hyperplanes `indices[0..n]`.
///
/// # Safety
/// `h` must be a live handle; `indices` must hold `n` entries; `out` must be
/// writable.
#[no_mangle]
pub unsafe extern "C" fn freearr_restrict(
    h: *const FreearrArrangement,
    indices: *const usize,
    n: usize,
    out: *mut *mut FreearrArrangement,
) -> FreearrStatus {
    guard(|| {
        let a = handle(h)?;
        let x = Flat::of_hyperplanes(a, self::indices(indices, n, a.len())?);
        put_handle(out, a.restriction(&x)?)
    })
}

/// Localization at the flat cut out by the hyperplanes `indices[0..n]`.
///
/// # Safety
/// As for `freearr_restrict`.
#[no_mangle]
pub unsafe extern "C" fn freearr_localize(
    h: *const FreearrArrangement,
    indices: *const usize,
    n: usize,
    out: *mut *mut FreearrArrangement,
) -> FreearrStatus {
    guard(|| {
        let a = handle(h)?;
        let x = Flat::of_hyperplanes(a, self::indices(indices, n, a.len())?);
        put_handle(out, a.localization(&x)?)
    })
}

/// # Safety
/// `a` and `b` must be live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn freearr_product(
    a: *const FreearrArrangement,
    b: *const FreearrArrangement,
    out: *mut *mut FreearrArrangement,
) -> FreearrStatus {
    guard(|| put_handle(out, handle(a)?.product(handle(b)?)))
}

/// Index of the hyperplane with normal `normal[0..dim]`, up to scaling.
///
/// # Safety
/// `h` must be a live handle; `normal` must hold `dim` integers; `out` must
/// be writable.
#[no_mangle]
pub unsafe extern "C" fn freearr_index_of(h: *const FreearrArrangement, normal: *const i64, out: *mut usize) -> FreearrStatus {
    guard(|| {
        let a = handle(h)?;
        if normal.is_null() {
            return fail(FreearrStatus::NullPointer, "null normal");
        }
        let v = std::slice::from_raw_parts(normal, a.dim());
        let hp = canonicalize(v)?;
        *out_ptr(out)? = a.index_of(&hp).ok_or_else(|| Error::NotMember(v.to_vec()))?;
        Ok(())
    })
}

/// Decides freeness. `exponents` receives the exponents (`dim` entries) when
/// free; `certificate`, if not NULL, receives the basis certificate or the
/// non-freeness witness as JSON.
///
/// # Safety
/// `h` must be a live handle; `free` and `len` must be writable; `exponents`
/// must hold `cap` entries; `certificate` must be NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn freearr_is_free(
    h: *const FreearrArrangement,
    free: *mut bool,
    exponents: *mut u32,
    cap: usize,
    len: *mut usize,
    certificate: *mut *mut c_char,
) -> FreearrStatus {
    guard(|| {
        let a = handle(h)?;
        let verdict = derivations::is_free(a)?;
        let free = out_ptr(free)?;
        let json = match &verdict {
            FreenessVerdict::Free(c) => serde_json::to_string(&c.to_json()),
            FreenessVerdict::NotFree(w) => serde_json::to_string(w),
        }
        .map_err(|e| Fail(FreearrStatus::Failed, e.to_string()))?;
        if !certificate.is_null() {
            put_string(certificate, json)?;
        }
        match verdict {
            FreenessVerdict::Free(c) => {
                *free = true;
                put_slice(c.exponents.as_slice(), exponents, cap, len)
            }
            FreenessVerdict::NotFree(_) => {
                *free = false;
                *out_ptr(len)? = 0;
                Ok(())
            }
        }
    })
}

/// Decides class membership within `budget` search nodes. `artifact`, if
/// not NULL, receives the certificate, refutation trace or budget report as
/// JSON.
///
/// # Safety
/// `h` must be a live handle; `verdict` must be writable; `artifact` must be
/// NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn freearr_classify(
    h: *const FreearrArrangement,
    class: FreearrClass,
    budget: u64,
    verdict: *mut FreearrVerdict,
    artifact: *mut *mut c_char,
) -> FreearrStatus {
    guard(|| {
        let a = handle(h)?;
        let class = match class {
            FreearrClass::Inductive => Class::If,
            FreearrClass::Additional => Class::Af,
            FreearrClass::Divisional => Class::Df,
            FreearrClass::Stair => Class::Sf,
        };
        let v = classes::classify(a, class, budget)?;
        *out_ptr(verdict)? = match v {
            ClassVerdict::Member { .. } => FreearrVerdict::Member,
            ClassVerdict::NonMember { .. } => FreearrVerdict::NonMember,
            ClassVerdict::Undecided { .. } => FreearrVerdict::Undecided,
        };
        if !artifact.is_null() {
            let json = serde_json::to_string(&v).map_err(|e| Fail(FreearrStatus::Failed, e.to_string()))?;
            put_string(artifact, json)?;
        }
        Ok(())
    })
}

/// Whether an invertible linear map carries `a` onto `b`; with `lattice`,
/// whether their intersection lattices are isomorphic instead.
///
/// # Safety
/// `a` and `b` must be live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn freearr_isomorphic(
    a: *const FreearrArrangement,
    b: *const FreearrArrangement,
    lattice: bool,
    out: *mut bool,
) -> FreearrStatus {
    guard(|| {
        let (a, b) = (handle(a)?, handle(b)?);
        *out_ptr(out)? = if lattice { matroid_isomorphic(a, b).is_some() } else { linear_isomorphic(a, b).is_some() };
        Ok(())
    })
}
