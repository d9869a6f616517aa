//! C interface to `twoview-core`.
//!
//! Results live behind an opaque [`TvResult`] handle that must be released
//! with [`tv_result_free`]. Every entry point returns a [`TvStatus`]; a
//! human-readable detail for the last failure on the calling thread is
//! available from [`tv_last_error_message`]. Multipliers are reported
//! relative to the matrix as passed in.

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use twoview_core::geometry::{normalize_pair, GeometryError, Mat3, Point2, TriangulationProblem};
use twoview_core::lagrange::{build_t, LagrangeError, DEFAULT_TRUNC_TOL};
use twoview_core::recovery::CriticalPoint;
use twoview_core::triangulate::{triangulate, TriangulateConfig, TriangulationError, TriangulationResult};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TvStatus {
    Ok = 0,
    NullPointer = 1,
    NonFinite = 2,
    ZeroMatrix = 3,
    RankDeficient = 4,
    FullRank = 5,
    TruncationViolation = 6,
    ZeroPolynomial = 7,
    NoRealCriticalPoint = 8,
    IndexOutOfRange = 9,
    InvalidArgument = 10,
    Panic = 11,
}

/// One critical point. Coordinates are image units; `*_im` are zero for
/// real points.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TvCriticalPoint {
    pub lambda_re: f64,
    pub lambda_im: f64,
    pub x1_re: [f64; 2],
    pub x1_im: [f64; 2],
    pub x2_re: [f64; 2],
    pub x2_im: [f64; 2],
    pub objective: f64,
    pub epipolar_resid: f64,
    pub kkt_resid: f64,
    pub multiplicity: u32,
    pub is_real: bool,
    pub degenerate: bool,
}

/// Opaque triangulation result.
pub struct TvResult {
    inner: TriangulationResult,
}

thread_local! {
    static LAST_ERROR: RefCell<Vec<u8>> = const { RefCell::new(Vec::new()) };
}

fn set_last_error(msg: &str) {
    LAST_ERROR.with(|e| {
        let mut v = e.borrow_mut();
        v.clear();
        v.extend(msg.bytes().filter(|&b| b != 0));
    });
}

fn fail(status: TvStatus, msg: &str) -> TvStatus {
    set_last_error(msg);
    status
}

fn geometry_status(e: &GeometryError) -> TvStatus {
    match e {
        GeometryError::ZeroMatrix => TvStatus::ZeroMatrix,
        GeometryError::RankDeficient { .. } => TvStatus::RankDeficient,
        GeometryError::FullRank { .. } => TvStatus::FullRank,
        GeometryError::NonFinite(_) => TvStatus::NonFinite,
        GeometryError::InvalidTolerance(_) => TvStatus::InvalidArgument,
    }
}

fn lagrange_status(e: &LagrangeError) -> TvStatus {
    match e {
        LagrangeError::TruncationViolation { .. } => TvStatus::TruncationViolation,
        LagrangeError::NonRepresentable(_) => TvStatus::NonFinite,
        _ => TvStatus::InvalidArgument,
    }
}

/// Runs `f`, mapping a panic to [`TvStatus::Panic`].
fn guarded(f: impl FnOnce() -> TvStatus) -> TvStatus {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| fail(TvStatus::Panic, "Panic: internal error"))
}

/// # Safety
/// Each non-null pointer must be valid for the stated number of reads.
unsafe fn read_problem(f: *const f64, u1: *const f64, u2: *const f64) -> Result<TriangulationProblem, TvStatus> {
    if f.is_null() || u1.is_null() || u2.is_null() {
        return Err(fail(TvStatus::NullPointer, "NullPointer: f, u1 and u2 must be non-null"));
    }
    let f = std::slice::from_raw_parts(f, 9);
    let u1 = std::slice::from_raw_parts(u1, 2);
    let u2 = std::slice::from_raw_parts(u2, 2);
    TriangulationProblem::from_parts(Mat3::from_row_slice(f), Point2::new(u1[0], u1[1]), Point2::new(u2[0], u2[1]))
        .map_err(|e| fail(geometry_status(&e), &e.to_string()))
}

fn to_c(cp: &CriticalPoint, input_scale: f64) -> TvCriticalPoint {
    let lambda = cp.lambda / input_scale;
    TvCriticalPoint {
        lambda_re: lambda.re,
        lambda_im: lambda.im,
        x1_re: [cp.x1[0].re, cp.x1[1].re],
        x1_im: [cp.x1[0].im, cp.x1[1].im],
        x2_re: [cp.x2[0].re, cp.x2[1].re],
        x2_im: [cp.x2[0].im, cp.x2[1].im],
        objective: cp.objective,
        epipolar_resid: cp.epipolar_resid,
        kkt_resid: cp.kkt_resid,
        multiplicity: u32::try_from(cp.multiplicity).unwrap_or(u32::MAX),
        is_real: cp.is_real,
        degenerate: cp.degenerate,
    }
}

/// Triangulates one correspondence. `f` is a row-major 3×3 matrix, `u1` and
/// `u2` are image points.
///
/// On `Ok` and on `NoRealCriticalPoint` a handle is stored in `*out` (the
/// latter has no minimizer but still lists every critical point); on other
/// failures `*out` is set to null.
///
/// # Safety
/// `f` must point to 9 doubles, `u1` and `u2` to 2 doubles each, and `out`
/// must be a valid location for one pointer.
#[no_mangle]
pub unsafe extern "C" fn tv_triangulate(
    f: *const f64,
    u1: *const f64,
    u2: *const f64,
    out: *mut *mut TvResult,
) -> TvStatus {
    guarded(|| {
        if out.is_null() {
            return fail(TvStatus::NullPointer, "NullPointer: out must be non-null");
        }
        *out = ptr::null_mut();
        let p = match read_problem(f, u1, u2) {
            Ok(p) => p,
            Err(s) => return s,
        };
        let (inner, status) = match triangulate(&p, &TriangulateConfig::default()) {
            Ok(r) => (r, TvStatus::Ok),
            Err(e) => {
                let msg = e.to_string();
                match e {
                    TriangulationError::NoRealCriticalPoint(r) => (*r, fail(TvStatus::NoRealCriticalPoint, &msg)),
                    TriangulationError::Polynomial(l) => return fail(lagrange_status(&l), &msg),
                    TriangulationError::ZeroPolynomial => return fail(TvStatus::ZeroPolynomial, &msg),
                }
            }
        };
        *out = Box::into_raw(Box::new(TvResult { inner }));
        status
    })
}

/// Releases a handle from [`tv_triangulate`]. Null is ignored.
///
/// # Safety
/// `r` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn tv_result_free(r: *mut TvResult) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}

/// Number of reported critical points (distinct roots), 0 for null.
///
/// # Safety
/// `r` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn tv_result_len(r: *const TvResult) -> usize {
    r.as_ref().map_or(0, |r| r.inner.critical_points.len())
}

/// Number of real critical points, 0 for null.
///
/// # Safety
/// `r` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn tv_result_real_count(r: *const TvResult) -> usize {
    r.as_ref().map_or(0, |r| r.inner.n_real)
}

/// Whether the instance has six distinct, simple, non-degenerate points.
///
/// # Safety
/// `r` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn tv_result_generic(r: *const TvResult) -> bool {
    r.as_ref().is_some_and(|r| r.inner.generic)
}

/// Copies critical point `index` (real points first, by objective).
///
/// # Safety
/// `r` must be null or a live handle; `out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn tv_result_point(r: *const TvResult, index: usize, out: *mut TvCriticalPoint) -> TvStatus {
    guarded(|| {
        let (Some(r), false) = (r.as_ref(), out.is_null()) else {
            return fail(TvStatus::NullPointer, "NullPointer: result and out must be non-null");
        };
        match r.inner.critical_points.get(index) {
            Some(cp) => {
                *out = to_c(cp, r.inner.input_scale);
                TvStatus::Ok
            }
            None => fail(
                TvStatus::IndexOutOfRange,
                &format!("IndexOutOfRange: index {index} of {}", r.inner.critical_points.len()),
            ),
        }
    })
}

/// Copies the global minimizer, or returns `NoRealCriticalPoint`.
///
/// # Safety
/// `r` must be null or a live handle; `out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn tv_result_minimizer(r: *const TvResult, out: *mut TvCriticalPoint) -> TvStatus {
    guarded(|| {
        let (Some(r), false) = (r.as_ref(), out.is_null()) else {
            return fail(TvStatus::NullPointer, "NullPointer: result and out must be non-null");
        };
        match &r.inner.minimizer {
            Some(cp) => {
                *out = to_c(cp, r.inner.input_scale);
                TvStatus::Ok
            }
            None => fail(TvStatus::NoRealCriticalPoint, "NoRealCriticalPoint: result has no minimizer"),
        }
    })
}

/// Writes the seven ascending coefficients of the multiplier polynomial for
/// the unit-norm, sign-normalized matrix used internally.
///
/// # Safety
/// `f` must point to 9 doubles, `u1` and `u2` to 2 each, `coeffs` to 7
/// writable doubles.
#[no_mangle]
pub unsafe extern "C" fn tv_build_t(f: *const f64, u1: *const f64, u2: *const f64, coeffs: *mut f64) -> TvStatus {
    guarded(|| {
        if coeffs.is_null() {
            return fail(TvStatus::NullPointer, "NullPointer: coeffs must be non-null");
        }
        let p = match read_problem(f, u1, u2) {
            Ok(p) => p,
            Err(s) => return s,
        };
        match build_t(&normalize_pair(&p), DEFAULT_TRUNC_TOL) {
            Ok(t) => {
                let out = std::slice::from_raw_parts_mut(coeffs, 7);
                for (k, c) in out.iter_mut().enumerate() {
                    *c = t.coeff(k);
                }
                TvStatus::Ok
            }
            Err(e) => fail(lagrange_status(&e), &e.to_string()),
        }
    })
}

/// Static, NUL-terminated name of a status code; `"Unknown"` for values
/// outside [`TvStatus`].
#[no_mangle]
pub extern "C" fn tv_status_name(status: i32) -> *const c_char {
    let s: &'static CStr = match status {
        0 => c"Ok",
        1 => c"NullPointer",
        2 => c"NonFinite",
        3 => c"ZeroMatrix",
        4 => c"RankDeficient",
        5 => c"FullRank",
        6 => c"TruncationViolation",
        7 => c"ZeroPolynomial",
        8 => c"NoRealCriticalPoint",
        9 => c"IndexOutOfRange",
        10 => c"InvalidArgument",
        11 => c"Panic",
        _ => c"Unknown",
    };
    s.as_ptr()
}

/// Copies the calling thread's last error detail into `buf` (NUL-terminated,
/// truncated to `len - 1` bytes) and returns the full message length. Pass a
/// null `buf` to query the length.
///
/// # Safety
/// `buf` must be null or valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn tv_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            ptr::copy_nonoverlapping(msg.as_ptr().cast::<c_char>(), buf, n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}
