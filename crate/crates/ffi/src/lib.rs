//! C interface to rectnerve.
//!
//! Objects cross the boundary as opaque handles that the caller releases with
//! the matching `_free` function. Every fallible call returns an `RnStatus`;
//! on failure the message is kept per thread and read with
//! `rn_last_error_message`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use rectnerve::dual::{build_dual, DualComplex};
use rectnerve::embed::{center_projection, classify_projection, Projection, VerdictKind};
use rectnerve::io;
use rectnerve::model::Partition;
use rectnerve::solver::{solve, SolveStatus, SolverConfig};
use rectnerve::Error;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RnStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    InvalidPartition = 4,
    InvalidProjection = 5,
    Unsupported = 6,
    InvalidArgument = 7,
    Internal = 99,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RnVerdict {
    Embedding = 0,
    NotEmbedding = 1,
    Unsupported = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RnSolveStatus {
    Sat = 0,
    Unsat = 1,
    Timeout = 2,
}

/// A validated box partition.
pub struct RnPartition(Partition);

/// Vertex placement of a dual complex, coordinates doubled.
pub struct RnProjection(Projection);

/// The dual complex of a partition.
pub struct RnDual(DualComplex);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> RnStatus {
    match e {
        Error::Syntax { .. } => RnStatus::Parse,
        Error::OutOfBounds(_) | Error::Overlap(..) | Error::CoverageGap(_) | Error::InvalidBox(_) => {
            RnStatus::InvalidPartition
        }
        Error::NotFaithful(_) | Error::NotHalfIntegral(_) | Error::DimensionMismatch { .. } => {
            RnStatus::InvalidProjection
        }
        Error::Unsupported(_) => RnStatus::Unsupported,
        Error::InvalidArgument(_) => RnStatus::InvalidArgument,
        _ => RnStatus::Internal,
    }
}

/// Run `f`, recording its error and turning panics into `Internal`.
fn guard(f: impl FnOnce() -> Result<(), (RnStatus, String)>) -> RnStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => RnStatus::Ok,
        Ok(Err((s, msg))) => {
            set_error(msg);
            s
        }
        Err(_) => {
            set_error("internal panic".into());
            RnStatus::Internal
        }
    }
}

fn lib(e: Error) -> (RnStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (RnStatus, String) {
    (RnStatus::NullPointer, format!("{what} is null"))
}

unsafe fn text<'a>(s: *const c_char) -> Result<&'a str, (RnStatus, String)> {
    if s.is_null() {
        return Err(null("input text"));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|_| (RnStatus::InvalidUtf8, "input is not valid UTF-8".into()))
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, (RnStatus, String)> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn put<T>(out: *mut *mut T, v: T) -> Result<(), (RnStatus, String)> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    *out = Box::into_raw(Box::new(v));
    Ok(())
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> Result<(), (RnStatus, String)> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    let c = CString::new(s).map_err(|_| (RnStatus::Internal, "interior NUL in output".to_string()))?;
    *out = c.into_raw();
    Ok(())
}

/// Message of the last failed call on this thread, or NULL. The pointer is
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn rn_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Release a string returned by this library.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn rn_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parse and validate a partition in the text format.
///
/// # Safety
/// `src` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rn_partition_parse(src: *const c_char, out: *mut *mut RnPartition) -> RnStatus {
    guard(|| {
        let p = io::parse_partition(text(src)?).map_err(lib)?;
        put(out, RnPartition(p))
    })
}

/// # Safety
/// `p` must come from `rn_partition_parse` and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn rn_partition_free(p: *mut RnPartition) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Number of boxes, 0 for NULL.
///
/// # Safety
/// `p` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn rn_partition_len(p: *const RnPartition) -> usize {
    p.as_ref().map_or(0, |p| p.0.len())
}

/// Dimension, 0 for NULL.
///
/// # Safety
/// `p` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn rn_partition_dim(p: *const RnPartition) -> usize {
    p.as_ref().map_or(0, |p| p.0.dim())
}

/// Serialize a partition; free the result with `rn_string_free`.
///
/// # Safety
/// `p` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rn_partition_to_text(p: *const RnPartition, out: *mut *mut c_char) -> RnStatus {
    guard(|| {
        let p = handle(p, "partition")?;
        put_string(out, io::write_partition(&p.0))
    })
}

/// Build the dual complex.
///
/// # Safety
/// `p` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rn_dual_build(p: *const RnPartition, out: *mut *mut RnDual) -> RnStatus {
    guard(|| {
        let p = handle(p, "partition")?;
        let dc = build_dual(&p.0).map_err(lib)?;
        put(out, RnDual(dc))
    })
}

/// # Safety
/// `d` must come from `rn_dual_build` and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn rn_dual_free(d: *mut RnDual) {
    if !d.is_null() {
        drop(Box::from_raw(d));
    }
}

/// Number of `k`-simplices, 0 for NULL or `k` above the dimension.
///
/// # Safety
/// `d` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn rn_dual_count(d: *const RnDual, k: usize) -> usize {
    match d.as_ref() {
        Some(d) if k <= d.0.dim() => d.0.count(k),
        _ => 0,
    }
}

/// Dump the dual complex in the text format.
///
/// # Safety
/// `d` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rn_dual_to_text(d: *const RnDual, out: *mut *mut c_char) -> RnStatus {
    guard(|| {
        let d = handle(d, "dual")?;
        put_string(out, io::write_dual(&d.0))
    })
}

/// Parse a projection of `dim`-dimensional points.
///
/// # Safety
/// `src` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rn_projection_parse(
    src: *const c_char,
    dim: usize,
    out: *mut *mut RnProjection,
) -> RnStatus {
    guard(|| {
        let pr = io::parse_projection(text(src)?, dim).map_err(lib)?;
        put(out, RnProjection(pr))
    })
}

/// Every box to its center.
///
/// # Safety
/// `p` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rn_projection_center(p: *const RnPartition, out: *mut *mut RnProjection) -> RnStatus {
    guard(|| {
        let p = handle(p, "partition")?;
        put(out, RnProjection(center_projection(&p.0)))
    })
}

/// # Safety
/// `pr` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rn_projection_to_text(pr: *const RnProjection, out: *mut *mut c_char) -> RnStatus {
    guard(|| {
        let pr = handle(pr, "projection")?;
        put_string(out, io::write_projection(&pr.0))
    })
}

/// # Safety
/// `pr` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn rn_projection_free(pr: *mut RnProjection) {
    if !pr.is_null() {
        drop(Box::from_raw(pr));
    }
}

/// Orientation test of a projection against the dual of `p`.
///
/// # Safety
/// All handles must be live; `verdict` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rn_check(
    p: *const RnPartition,
    d: *const RnDual,
    pr: *const RnProjection,
    verdict: *mut RnVerdict,
) -> RnStatus {
    guard(|| {
        let (p, d, pr) = (handle(p, "partition")?, handle(d, "dual")?, handle(pr, "projection")?);
        if verdict.is_null() {
            return Err(null("verdict"));
        }
        let v = classify_projection(&p.0, &d.0, &pr.0).map_err(lib)?;
        *verdict = match v.kind {
            VerdictKind::Embedding => RnVerdict::Embedding,
            VerdictKind::NotEmbedding => RnVerdict::NotEmbedding,
            VerdictKind::Unsupported => RnVerdict::Unsupported,
        };
        Ok(())
    })
}

/// Search for a half-integral embedding. `node_limit` 0 keeps the default.
/// On `Sat`, `*certificate` receives a projection the caller frees;
/// otherwise it is set to NULL.
///
/// # Safety
/// `p` must be a live handle; `status` and `certificate` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rn_solve(
    p: *const RnPartition,
    node_limit: u64,
    status: *mut RnSolveStatus,
    certificate: *mut *mut RnProjection,
) -> RnStatus {
    guard(|| {
        let p = handle(p, "partition")?;
        if status.is_null() || certificate.is_null() {
            return Err(null("output pointer"));
        }
        let mut cfg = SolverConfig::default();
        if node_limit > 0 {
            cfg.node_limit = node_limit;
        }
        let r = solve(&p.0, &cfg).map_err(lib)?;
        *status = match r.status {
            SolveStatus::Sat => RnSolveStatus::Sat,
            SolveStatus::Unsat => RnSolveStatus::Unsat,
            SolveStatus::Timeout => RnSolveStatus::Timeout,
        };
        *certificate = match r.certificate {
            Some(c) => Box::into_raw(Box::new(RnProjection(c))),
            None => ptr::null_mut(),
        };
        Ok(())
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cstr(s: &str) -> CString {
        CString::new(s).unwrap()
    }

    fn grid(n: i64) -> String {
        let mut s = format!("2 {n} {}\n", n * n);
        for y in 0..n {
            for x in 0..n {
                s += &format!("{x} {} {y} {}\n", x + 1, y + 1);
            }
        }
        s
    }

    #[test]
    fn parse_check_solve() {
        unsafe {
            let src = cstr(&grid(3));
            let mut p = ptr::null_mut();
            assert_eq!(rn_partition_parse(src.as_ptr(), &mut p), RnStatus::Ok);
            assert_eq!(rn_partition_len(p), 9);
            assert_eq!(rn_partition_dim(p), 2);

            let mut d = ptr::null_mut();
            assert_eq!(rn_dual_build(p, &mut d), RnStatus::Ok);
            assert_eq!(rn_dual_count(d, 0), 9);
            assert!(rn_dual_count(d, 2) > 0);

            let mut pr = ptr::null_mut();
            assert_eq!(rn_projection_center(p, &mut pr), RnStatus::Ok);
            let mut v = RnVerdict::Unsupported;
            assert_eq!(rn_check(p, d, pr, &mut v), RnStatus::Ok);
            assert_eq!(v, RnVerdict::Embedding);

            let mut st = RnSolveStatus::Timeout;
            let mut cert = ptr::null_mut();
            assert_eq!(rn_solve(p, 0, &mut st, &mut cert), RnStatus::Ok);
            assert_eq!(st, RnSolveStatus::Sat);
            assert!(!cert.is_null());

            let mut t = ptr::null_mut();
            assert_eq!(rn_partition_to_text(p, &mut t), RnStatus::Ok);
            assert_eq!(CStr::from_ptr(t).to_str().unwrap(), grid(3));
            rn_string_free(t);

            rn_projection_free(cert);
            rn_projection_free(pr);
            rn_dual_free(d);
            rn_partition_free(p);
        }
    }

    #[test]
    fn errors_are_reported() {
        unsafe {
            let mut p = ptr::null_mut();
            assert_eq!(rn_partition_parse(ptr::null(), &mut p), RnStatus::NullPointer);
            let bad = cstr("2 2 1\n0 1 0 1\n");
            assert_eq!(rn_partition_parse(bad.as_ptr(), &mut p), RnStatus::InvalidPartition);
            assert!(p.is_null());
            let msg = CStr::from_ptr(rn_last_error_message()).to_str().unwrap();
            assert!(!msg.is_empty());
            let junk = cstr("2 x\n");
            assert_eq!(rn_partition_parse(junk.as_ptr(), &mut p), RnStatus::Parse);
        }
    }
}
