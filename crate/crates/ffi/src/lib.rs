//! C ABI for `subprob`.
//!
//! Solutions are returned as opaque `SubprobSolution` handles that the
//! caller releases with [`subprob_solution_free`]. Every fallible call
//! returns a [`SubprobStatus`]; on failure the message is available from
//! [`subprob_last_error`] until the next failing call on the same thread.
//! Matrices are dense, row-major, `n * n` doubles.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use subprob::linalg::Matrix;
use subprob::prs::{self, PrsInstance};
use subprob::trs::{self, TrsInstance};
use subprob::verdict::Classification;
use subprob::{pencil, Error};

/// Result codes. `Ok` is zero; everything else is a failure.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SubprobStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidInput = 2,
    NoConvergence = 3,
    Singular = 4,
    NumericalFailure = 5,
    UnsupportedExponent = 6,
    OutOfRange = 7,
    BufferTooSmall = 8,
    NotFound = 9,
    Panic = 10,
}

/// How a stationary point was classified.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SubprobClassification {
    Global = 0,
    LocalNonGlobal = 1,
    NotLocalMin = 2,
}

/// Scalar data for one stationary point. For trust-region problems
/// `multiplier` is λ; for regularized problems it is `t = ‖x‖^(p-2)`.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct SubprobPointInfo {
    pub multiplier: f64,
    pub objective: f64,
    pub norm: f64,
    pub classification: SubprobClassification,
    /// Nonzero when the point is one of infinitely many with this multiplier.
    pub continuum: i32,
}

struct Point {
    x: Vec<f64>,
    info: SubprobPointInfo,
}

/// Opaque list of classified stationary points.
pub struct SubprobSolution {
    points: Vec<Point>,
    global: usize,
    local_nonglobal: Option<usize>,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn status_of(e: &Error) -> SubprobStatus {
    match e {
        Error::InvalidInput(_) | Error::Parse { .. } | Error::Domain(_) => SubprobStatus::InvalidInput,
        Error::NoConvergence { .. } => SubprobStatus::NoConvergence,
        Error::Singular { .. } => SubprobStatus::Singular,
        Error::UnsupportedExponent(_) => SubprobStatus::UnsupportedExponent,
        _ => SubprobStatus::NumericalFailure,
    }
}

fn fail(status: SubprobStatus, msg: impl Into<String>) -> SubprobStatus {
    set_error(msg);
    status
}

fn guard(f: impl FnOnce() -> SubprobStatus) -> SubprobStatus {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| fail(SubprobStatus::Panic, "internal panic"))
}

fn classification(c: Classification) -> SubprobClassification {
    match c {
        Classification::Global => SubprobClassification::Global,
        Classification::LocalNonGlobal => SubprobClassification::LocalNonGlobal,
        Classification::NotLocalMin => SubprobClassification::NotLocalMin,
    }
}

/// Copies `q` and `c` out of caller memory.
///
/// # Safety
/// `q` must point to `n * n` doubles and `c` to `n` doubles.
unsafe fn read_problem(q: *const f64, c: *const f64, n: usize) -> Result<(Matrix, Vec<f64>), SubprobStatus> {
    if q.is_null() || c.is_null() {
        return Err(fail(SubprobStatus::NullPointer, "q or c is null"));
    }
    if n == 0 {
        return Err(fail(SubprobStatus::InvalidInput, "dimension must be positive"));
    }
    let Some(len) = n.checked_mul(n) else {
        return Err(fail(SubprobStatus::InvalidInput, "dimension overflows"));
    };
    let qv = std::slice::from_raw_parts(q, len).to_vec();
    let cv = std::slice::from_raw_parts(c, n).to_vec();
    let m = Matrix::from_row_major(n, n, qv).map_err(|e| fail(status_of(&e), e.to_string()))?;
    Ok((m, cv))
}

fn finish(out: *mut *mut SubprobSolution, sol: SubprobSolution) -> SubprobStatus {
    // SAFETY: callers check `out` for null before solving.
    unsafe { *out = Box::into_raw(Box::new(sol)) };
    SubprobStatus::Ok
}

fn position<T>(points: &[T], target: &T, eq: impl Fn(&T, &T) -> bool) -> usize {
    points.iter().position(|p| eq(p, target)).expect("selected point is in the list")
}

/// Enumerates and classifies the KKT points of
/// `min ½xᵀQx + cᵀx` subject to `‖x‖ ≤ 1`.
///
/// # Safety
/// `q` must point to `n * n` doubles, `c` to `n` doubles, and `out` to
/// writable storage for one pointer.
#[no_mangle]
pub unsafe extern "C" fn subprob_trs_solve(
    q: *const f64,
    c: *const f64,
    n: usize,
    tol: f64,
    out: *mut *mut SubprobSolution,
) -> SubprobStatus {
    guard(|| {
        if out.is_null() {
            return fail(SubprobStatus::NullPointer, "out is null");
        }
        *out = ptr::null_mut();
        let (qm, cv) = match read_problem(q, c, n) {
            Ok(v) => v,
            Err(s) => return s,
        };
        if !(tol > 0.0) {
            return fail(SubprobStatus::InvalidInput, format!("tol must be positive, got {tol}"));
        }
        let sol = match TrsInstance::new(qm, cv).and_then(|i| trs::solve(&i, tol)) {
            Ok(s) => s,
            Err(e) => return fail(status_of(&e), e.to_string()),
        };
        let same = |a: &trs::TrsKktPoint, b: &trs::TrsKktPoint| a.x == b.x && a.lambda == b.lambda;
        let global = position(&sol.points, &sol.global, same);
        let local_nonglobal = sol.local_nonglobal.as_ref().map(|l| position(&sol.points, l, same));
        let points = sol
            .points
            .iter()
            .map(|p| Point {
                info: SubprobPointInfo {
                    multiplier: p.lambda,
                    objective: p.objective,
                    norm: p.norm(),
                    classification: classification(p.classification),
                    continuum: p.continuum as i32,
                },
                x: p.x.clone(),
            })
            .collect();
        finish(out, SubprobSolution { points, global, local_nonglobal })
    })
}

/// Enumerates and classifies the critical points of
/// `½xᵀQx + cᵀx + (σ/p)‖x‖^p` for `p > 2`, `σ > 0`.
///
/// # Safety
/// Same requirements as [`subprob_trs_solve`].
#[no_mangle]
pub unsafe extern "C" fn subprob_prs_solve(
    q: *const f64,
    c: *const f64,
    n: usize,
    sigma: f64,
    p: f64,
    tol: f64,
    out: *mut *mut SubprobSolution,
) -> SubprobStatus {
    guard(|| {
        if out.is_null() {
            return fail(SubprobStatus::NullPointer, "out is null");
        }
        *out = ptr::null_mut();
        let (qm, cv) = match read_problem(q, c, n) {
            Ok(v) => v,
            Err(s) => return s,
        };
        if !(tol > 0.0) {
            return fail(SubprobStatus::InvalidInput, format!("tol must be positive, got {tol}"));
        }
        let sol = match PrsInstance::new(qm, cv, sigma, p).and_then(|i| prs::solve(&i, tol)) {
            Ok(s) => s,
            Err(e) => return fail(status_of(&e), e.to_string()),
        };
        let same = |a: &prs::PrsCriticalPoint, b: &prs::PrsCriticalPoint| a.x == b.x && a.t == b.t;
        let global = position(&sol.points, &sol.global, same);
        let local_nonglobal = sol.local_nonglobal.as_ref().map(|l| position(&sol.points, l, same));
        let points = sol
            .points
            .iter()
            .map(|pt| Point {
                info: SubprobPointInfo {
                    multiplier: pt.t,
                    objective: pt.objective,
                    norm: pt.norm(),
                    classification: classification(pt.classification),
                    continuum: pt.continuum as i32,
                },
                x: pt.x.clone(),
            })
            .collect();
        finish(out, SubprobSolution { points, global, local_nonglobal })
    })
}

/// Releases a solution. Null is ignored.
///
/// # Safety
/// `sol` must come from a solve call and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn subprob_solution_free(sol: *mut SubprobSolution) {
    if !sol.is_null() {
        drop(Box::from_raw(sol));
    }
}

/// Number of stationary points, or 0 for a null handle.
///
/// # Safety
/// `sol` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn subprob_solution_len(sol: *const SubprobSolution) -> usize {
    sol.as_ref().map_or(0, |s| s.points.len())
}

/// Dimension of each point, or 0 for a null handle.
///
/// # Safety
/// `sol` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn subprob_solution_dim(sol: *const SubprobSolution) -> usize {
    sol.as_ref().and_then(|s| s.points.first()).map_or(0, |p| p.x.len())
}

/// Index of the global minimizer.
///
/// # Safety
/// `sol` must be a live handle and `index` writable.
#[no_mangle]
pub unsafe extern "C" fn subprob_solution_global(sol: *const SubprobSolution, index: *mut usize) -> SubprobStatus {
    guard(|| match (sol.as_ref(), index.as_mut()) {
        (Some(s), Some(i)) => {
            *i = s.global;
            SubprobStatus::Ok
        }
        _ => fail(SubprobStatus::NullPointer, "null argument"),
    })
}

/// Index of the local nonglobal minimizer; `NotFound` when there is none.
///
/// # Safety
/// `sol` must be a live handle and `index` writable.
#[no_mangle]
pub unsafe extern "C" fn subprob_solution_local_nonglobal(
    sol: *const SubprobSolution,
    index: *mut usize,
) -> SubprobStatus {
    guard(|| match (sol.as_ref(), index.as_mut()) {
        (Some(s), Some(i)) => match s.local_nonglobal {
            Some(l) => {
                *i = l;
                SubprobStatus::Ok
            }
            None => fail(SubprobStatus::NotFound, "no local nonglobal minimizer"),
        },
        _ => fail(SubprobStatus::NullPointer, "null argument"),
    })
}

/// Scalar data of point `index`.
///
/// # Safety
/// `sol` must be a live handle and `info` writable.
#[no_mangle]
pub unsafe extern "C" fn subprob_solution_point(
    sol: *const SubprobSolution,
    index: usize,
    info: *mut SubprobPointInfo,
) -> SubprobStatus {
    guard(|| {
        let (Some(s), Some(out)) = (sol.as_ref(), info.as_mut()) else {
            return fail(SubprobStatus::NullPointer, "null argument");
        };
        match s.points.get(index) {
            Some(p) => {
                *out = p.info;
                SubprobStatus::Ok
            }
            None => fail(SubprobStatus::OutOfRange, format!("index {index} >= {}", s.points.len())),
        }
    })
}

/// Copies the coordinates of point `index` into `x`, which holds `len`
/// doubles.
///
/// # Safety
/// `sol` must be a live handle and `x` must point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn subprob_solution_point_x(
    sol: *const SubprobSolution,
    index: usize,
    x: *mut f64,
    len: usize,
) -> SubprobStatus {
    guard(|| {
        let Some(s) = sol.as_ref() else {
            return fail(SubprobStatus::NullPointer, "null handle");
        };
        if x.is_null() {
            return fail(SubprobStatus::NullPointer, "null buffer");
        }
        let Some(p) = s.points.get(index) else {
            return fail(SubprobStatus::OutOfRange, format!("index {index} >= {}", s.points.len()));
        };
        if len < p.x.len() {
            return fail(SubprobStatus::BufferTooSmall, format!("need {} doubles, got {len}", p.x.len()));
        }
        ptr::copy_nonoverlapping(p.x.as_ptr(), x, p.x.len());
        SubprobStatus::Ok
    })
}

/// Real generalized eigenvalues of the trust-region pencil, in
/// ascending order. On `Ok` or `BufferTooSmall`, `count` holds the number
/// of eigenvalues; only `min(count, len)` are written.
///
/// # Safety
/// `q`, `c` as in [`subprob_trs_solve`]; `values` must hold `len` doubles
/// (may be null when `len` is 0); `count` must be writable.
#[no_mangle]
pub unsafe extern "C" fn subprob_trs_pencil_eigenvalues(
    q: *const f64,
    c: *const f64,
    n: usize,
    tol: f64,
    values: *mut f64,
    len: usize,
    count: *mut usize,
) -> SubprobStatus {
    guard(|| {
        if count.is_null() || (values.is_null() && len > 0) {
            return fail(SubprobStatus::NullPointer, "null output");
        }
        let (qm, cv) = match read_problem(q, c, n) {
            Ok(v) => v,
            Err(s) => return s,
        };
        if !(tol > 0.0) {
            return fail(SubprobStatus::InvalidInput, format!("tol must be positive, got {tol}"));
        }
        let sol = match TrsInstance::new(qm, cv).and_then(|i| pencil::solve_trs_via_pencil(&i, tol)) {
            Ok(s) => s,
            Err(e) => return fail(status_of(&e), e.to_string()),
        };
        *count = sol.eigenvalues.len();
        let k = sol.eigenvalues.len().min(len);
        if k > 0 {
            ptr::copy_nonoverlapping(sol.eigenvalues.as_ptr(), values, k);
        }
        if k < sol.eigenvalues.len() {
            return fail(SubprobStatus::BufferTooSmall, format!("need {} doubles, got {len}", sol.eigenvalues.len()));
        }
        SubprobStatus::Ok
    })
}

/// Message for the most recent failure on this thread, or null. The
/// pointer stays valid until the next failing call on this thread.
#[no_mangle]
pub extern "C" fn subprob_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn subprob_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
