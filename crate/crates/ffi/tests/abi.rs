use std::ffi::CStr;
use std::ptr;

use subprob_ffi::*;

const Q: [f64; 4] = [-4.0, 0.0, 0.0, -1.0];
const C: [f64; 2] = [0.3, 0.5];

fn solve_trs(q: &[f64], c: &[f64]) -> *mut SubprobSolution {
    let mut out = ptr::null_mut();
    let s = unsafe { subprob_trs_solve(q.as_ptr(), c.as_ptr(), c.len(), 1e-9, &mut out) };
    assert_eq!(s, SubprobStatus::Ok);
    assert!(!out.is_null());
    out
}

fn info(sol: *const SubprobSolution, i: usize) -> SubprobPointInfo {
    let mut info = SubprobPointInfo {
        multiplier: 0.0,
        objective: 0.0,
        norm: 0.0,
        classification: SubprobClassification::NotLocalMin,
        continuum: 0,
    };
    assert_eq!(unsafe { subprob_solution_point(sol, i, &mut info) }, SubprobStatus::Ok);
    info
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(subprob_last_error()) }.to_string_lossy().into_owned()
}

#[test]
fn trs_round_trip() {
    let sol = solve_trs(&Q, &C);
    unsafe {
        assert_eq!(subprob_solution_len(sol), 5);
        assert_eq!(subprob_solution_dim(sol), 2);
        let (mut g, mut l) = (usize::MAX, usize::MAX);
        assert_eq!(subprob_solution_global(sol, &mut g), SubprobStatus::Ok);
        assert_eq!(subprob_solution_local_nonglobal(sol, &mut l), SubprobStatus::Ok);
        let gi = info(sol, g);
        let li = info(sol, l);
        assert_eq!(gi.classification, SubprobClassification::Global);
        assert_eq!(li.classification, SubprobClassification::LocalNonGlobal);
        assert!(gi.multiplier > li.multiplier && gi.objective < li.objective);
        assert!((li.multiplier - 3.694_698_411_818_0).abs() < 1e-10);
        let mut x = [0.0; 2];
        assert_eq!(subprob_solution_point_x(sol, g, x.as_mut_ptr(), 2), SubprobStatus::Ok);
        let f = 0.5 * (-4.0 * x[0] * x[0] - x[1] * x[1]) + 0.3 * x[0] + 0.5 * x[1];
        assert!((f - gi.objective).abs() < 1e-12);
        subprob_solution_free(sol);
    }
}

#[test]
fn prs_cubic_closed_form() {
    let mut out = ptr::null_mut();
    let s = unsafe { subprob_prs_solve([-1.0].as_ptr(), [-0.75].as_ptr(), 1, 1.0, 3.0, 1e-9, &mut out) };
    assert_eq!(s, SubprobStatus::Ok);
    unsafe {
        let mut g = 0;
        subprob_solution_global(out, &mut g);
        let gi = info(out, g);
        assert!((gi.objective + 9.0 / 8.0).abs() < 1e-12);
        assert!((gi.multiplier - 1.5).abs() < 1e-12);
        let mut l = 0;
        assert_eq!(subprob_solution_local_nonglobal(out, &mut l), SubprobStatus::NotFound);
        subprob_solution_free(out);
    }
}

#[test]
fn pencil_eigenvalues_and_buffer_size() {
    let mut count = 0;
    let mut vals = [0.0; 8];
    let s = unsafe {
        subprob_trs_pencil_eigenvalues([-1.0].as_ptr(), [-0.75].as_ptr(), 1, 1e-9, vals.as_mut_ptr(), 8, &mut count)
    };
    assert_eq!(s, SubprobStatus::Ok);
    assert_eq!(count, 2);
    assert!((vals[0] - 0.25).abs() < 1e-12 && (vals[1] - 1.75).abs() < 1e-12);
    let s = unsafe {
        subprob_trs_pencil_eigenvalues([-1.0].as_ptr(), [-0.75].as_ptr(), 1, 1e-9, vals.as_mut_ptr(), 1, &mut count)
    };
    assert_eq!(s, SubprobStatus::BufferTooSmall);
    assert_eq!(count, 2);
}

#[test]
fn errors_carry_codes_and_messages() {
    let mut out = ptr::null_mut();
    unsafe {
        let s = subprob_trs_solve(ptr::null(), C.as_ptr(), 2, 1e-9, &mut out);
        assert_eq!(s, SubprobStatus::NullPointer);
        assert!(out.is_null());
        let asym = [0.0, 1.0, 0.0, 0.0];
        assert_eq!(subprob_trs_solve(asym.as_ptr(), C.as_ptr(), 2, 1e-9, &mut out), SubprobStatus::InvalidInput);
        assert!(last_error().contains("symmetric"), "{}", last_error());
        let s = subprob_prs_solve(Q.as_ptr(), C.as_ptr(), 2, 1.0, 2.0, 1e-9, &mut out);
        assert_eq!(s, SubprobStatus::InvalidInput);
        assert_eq!(subprob_trs_solve(Q.as_ptr(), C.as_ptr(), 2, 0.0, &mut out), SubprobStatus::InvalidInput);
        assert_eq!(subprob_trs_solve(Q.as_ptr(), C.as_ptr(), 0, 1e-9, &mut out), SubprobStatus::InvalidInput);

        let sol = solve_trs(&Q, &C);
        let mut x = [0.0; 1];
        assert_eq!(subprob_solution_point_x(sol, 0, x.as_mut_ptr(), 1), SubprobStatus::BufferTooSmall);
        let mut i = SubprobPointInfo {
            multiplier: 0.0,
            objective: 0.0,
            norm: 0.0,
            classification: SubprobClassification::Global,
            continuum: 0,
        };
        assert_eq!(subprob_solution_point(sol, 99, &mut i), SubprobStatus::OutOfRange);
        subprob_solution_free(sol);
        subprob_solution_free(ptr::null_mut());
        assert_eq!(subprob_solution_len(ptr::null()), 0);
    }
}

#[test]
fn continuum_flag_crosses_the_boundary() {
    let sol = solve_trs(&[-1.0, 0.0, 0.0, 2.0], &[0.0, 0.0]);
    unsafe {
        let mut g = 0;
        subprob_solution_global(sol, &mut g);
        assert_ne!(info(sol, g).continuum, 0);
        subprob_solution_free(sol);
    }
}

#[test]
fn version_is_nul_terminated() {
    let v = unsafe { CStr::from_ptr(subprob_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}
