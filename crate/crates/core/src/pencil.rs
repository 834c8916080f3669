//! Generalized eigenvalue pencils whose real eigenvalues contain the
//! multipliers of the trust-region problem (`M1(λ) = A − λB`, size 2n) and
//! the norms of the cubic-regularized problem (`M2(t) = A − tB`, size
//! 2n+2).
//!
//! ```text
//! det M1(λ) = (−1)^n      det(Q + λI)²  (1 − xᵀx)        x = −(Q + λI)⁻¹c
//! det M2(t) = (−1)^{n+1} σ² det(Q + σtI)² (t² − xᵀx)      x = −(Q + σtI)⁻¹c
//! ```
//!
//! `B` is a scaled signed permutation in both cases, so `B⁻¹A` is formed
//! exactly and handed to the nonsymmetric eigenvalue routine.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::prs::{self, PrsInstance};
use crate::spectral::to_spectral;
use crate::trs::{self, TrsInstance};
use crate::verdict::Verdict;

/// Gap under which sorted eigenvalues count as one.
pub const EIGEN_CLUSTER_TOL: f64 = 1e-8;
/// Agreement tolerance between the pencil and secular paths (absolute and
/// relative).
pub const CROSS_PATH_TOL: f64 = 1e-6;
/// Relative size of the smallest eigenvalue of `A + α₁B/σ` required when a
/// local nonglobal minimizer exists.
pub const NONSINGULAR_FRACTION: f64 = 1e-10;
/// Largest relative stationarity residual the determinant check accepts.
pub const STATIONARY_FRACTION: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum PencilKind {
    M1,
    M2 { sigma: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Pencil {
    pub a: Matrix,
    pub b: Matrix,
    pub kind: PencilKind,
    q: Matrix,
    c: Vec<f64>,
}

impl Pencil {
    pub fn size(&self) -> usize {
        self.a.rows()
    }

    /// `A − μB`.
    pub fn at(&self, mu: f64) -> Matrix {
        self.a.add_scaled(-mu, &self.b)
    }

    pub fn det_at(&self, mu: f64) -> f64 {
        linalg::det(&self.at(mu))
    }

    /// The closed form of `det(A − μB)` evaluated with an explicit `x`.
    pub fn det_formula(&self, x: &[f64], mu: f64) -> f64 {
        let n = self.c.len();
        let xx = linalg::dot(x, x);
        match self.kind {
            PencilKind::M1 => {
                let d = linalg::det(&self.q.add_scaled(mu, &Matrix::identity(n)));
                sign_pow(n) * d * d * (1.0 - xx)
            }
            PencilKind::M2 { sigma } => {
                let d = linalg::det(&self.q.add_scaled(sigma * mu, &Matrix::identity(n)));
                sign_pow(n + 1) * sigma * sigma * d * d * (mu * mu - xx)
            }
        }
    }
}

fn sign_pow(k: usize) -> f64 {
    if k.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// `A = [[−I, Q], [Q, −ccᵀ]]`, `B = [[0, −I], [−I, 0]]`.
pub fn build_m1(inst: &TrsInstance) -> Pencil {
    let n = inst.dim();
    let id = Matrix::identity(n);
    let c = inst.c();
    let mut cct = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            cct[(i, j)] = -c[i] * c[j];
        }
    }
    let mut a = Matrix::zeros(2 * n, 2 * n);
    a.set_block(0, 0, &id.scaled(-1.0));
    a.set_block(0, n, inst.q());
    a.set_block(n, 0, inst.q());
    a.set_block(n, n, &cct);
    let mut b = Matrix::zeros(2 * n, 2 * n);
    b.set_block(0, n, &id.scaled(-1.0));
    b.set_block(n, 0, &id.scaled(-1.0));
    Pencil { a, b, kind: PencilKind::M1, q: inst.q().clone(), c: c.to_vec() }
}

/// Blocks ordered (scalar, n, scalar, n):
///
/// ```text
/// A = [[0, 0,   0,  cᵀ],      B = [[ 0,  0,   −σ,  0 ],
///      [0, −σI, 0,  Q ],           [ 0,  0,   0,  −σI],
///      [0, 0,   −σ, 0 ],           [−σ,  0,   0,   0 ],
///      [c, Q,   0,  0 ]]           [ 0, −σI,  0,   0 ]]
/// ```
pub fn build_m2(inst: &PrsInstance) -> Result<Pencil> {
    if inst.p() != 3.0 {
        return Err(Error::UnsupportedExponent(inst.p()));
    }
    let n = inst.dim();
    let sigma = inst.sigma();
    let m = 2 * n + 2;
    let (s1, v1, s2, v2) = (0, 1, n + 1, n + 2);
    let mut a = Matrix::zeros(m, m);
    let mut b = Matrix::zeros(m, m);
    for (i, &ci) in inst.c().iter().enumerate() {
        a[(s1, v2 + i)] = ci;
        a[(v2 + i, s1)] = ci;
    }
    a.set_block(v1, v1, &Matrix::identity(n).scaled(-sigma));
    a.set_block(v1, v2, inst.q());
    a.set_block(v2, v1, inst.q());
    a[(s2, s2)] = -sigma;
    b[(s1, s2)] = -sigma;
    b[(s2, s1)] = -sigma;
    b.set_block(v1, v2, &Matrix::identity(n).scaled(-sigma));
    b.set_block(v2, v1, &Matrix::identity(n).scaled(-sigma));
    Ok(Pencil { a, b, kind: PencilKind::M2 { sigma }, q: inst.q().clone(), c: inst.c().to_vec() })
}

/// Real eigenvalues of `(A, B)`, ascending.
pub fn real_generalized_eigenvalues(p: &Pencil, imag_tol: f64) -> Result<Vec<f64>> {
    let binv = linalg::inverse(&p.b)?;
    linalg::real_eigenvalues(&binv.matmul(&p.a), imag_tol)
}

/// Distinct values of an ascending list, descending, each with its
/// multiplicity.
fn clustered_descending(values: &[f64]) -> Vec<(f64, usize)> {
    let mut out: Vec<(f64, usize)> = Vec::new();
    for &v in values.iter().rev() {
        match out.last_mut() {
            Some((rep, count)) if (*rep - v).abs() <= EIGEN_CLUSTER_TOL * (1.0 + rep.abs()) => *count += 1,
            _ => out.push((v, 1)),
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PencilSolution {
    /// All real generalized eigenvalues, ascending.
    pub eigenvalues: Vec<f64>,
    /// Largest real eigenvalue.
    pub global: f64,
    /// Second largest distinct real eigenvalue, kept only when the secular
    /// path found a local nonglobal minimizer.
    pub local_nonglobal: Option<f64>,
    /// The largest eigenvalue appeared more than once.
    pub largest_is_multiple: bool,
}

fn pick(eigenvalues: Vec<f64>, has_lng: bool) -> Result<PencilSolution> {
    let clusters = clustered_descending(&eigenvalues);
    let Some(&(global, mult)) = clusters.first() else {
        return Err(Error::Contradiction("pencil has no real eigenvalue".into()));
    };
    let local_nonglobal = if has_lng { clusters.get(1).map(|c| c.0) } else { None };
    Ok(PencilSolution { eigenvalues, global, local_nonglobal, largest_is_multiple: mult > 1 })
}

pub fn solve_trs_via_pencil(inst: &TrsInstance, tol: f64) -> Result<PencilSolution> {
    let eig = real_generalized_eigenvalues(&build_m1(inst), linalg::IMAG_TOL)?;
    let has_lng = trs::solve(inst, tol)?.local_nonglobal.is_some();
    pick(eig, has_lng)
}

pub fn solve_cubic_via_pencil(inst: &PrsInstance, tol: f64) -> Result<PencilSolution> {
    let eig = real_generalized_eigenvalues(&build_m2(inst)?, linalg::IMAG_TOL)?;
    let has_lng = prs::solve(inst, tol)?.local_nonglobal.is_some();
    pick(eig, has_lng)
}

/// `Σ_i Π_{j≠i} |v_j|`, the first-order sensitivity of `Π v_j`.
fn product_sensitivity(v: &[f64]) -> f64 {
    (0..v.len()).map(|i| v.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, x)| x.abs()).product::<f64>()).sum()
}

/// `|det(A − μB) − formula| ≤ tol·(1 + |formula|) + rounding`, for a
/// point `x` stationary at `μ`; other points fail.
///
/// The rounding term has two parts. `A − μB` is symmetric, so a backward
/// error of `16·size·ε‖M‖` moves its determinant by at most that times
/// `Σ_i Π_{j≠i} |λ_j(M)|`. On the closed-form side, a stationarity residual
/// `r` moves `x` by `δ = ‖r‖/min|α_i + σμ|`, which changes `xᵀx` by about
/// `2‖x‖δ`; it is scaled by the prefactor `σ² det(Q + σμI)²`.
pub fn det_identity_check(p: &Pencil, x: &[f64], mu: f64, tol: f64) -> Verdict {
    let m = p.at(mu);
    let lhs = linalg::det(&m);
    let rhs = p.det_formula(x, mu);
    let (sigma, shift) = match p.kind {
        PencilKind::M1 => (1.0, mu),
        PencilKind::M2 { sigma } => (sigma, sigma * mu),
    };
    let rounding = match (linalg::sym_eig(&m, 1e-12), linalg::sym_eig(&p.q, 1e-12)) {
        (Ok(em), Ok(eq)) => {
            let norm_m = em.eigenvalues.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
            let lhs_err = 16.0 * p.size() as f64 * f64::EPSILON * norm_m * product_sensitivity(&em.eigenvalues);
            let shifted: Vec<f64> = eq.eigenvalues.iter().map(|a| a + shift).collect();
            let det_q: f64 = shifted.iter().product::<f64>().abs();
            let imin = (0..shifted.len()).min_by(|&i, &j| shifted[i].abs().total_cmp(&shifted[j].abs())).unwrap_or(0);
            let others: f64 = shifted.iter().enumerate().filter(|&(j, _)| j != imin).map(|(_, v)| v.abs()).product();
            let r = linalg::norm(
                &p.q.matvec(x).iter().zip(x).zip(&p.c).map(|((a, xi), ci)| a + shift * xi + ci).collect::<Vec<_>>(),
            );
            let xn = linalg::norm(x);
            let scale = 1.0 + (p.q.frobenius_norm() + shift.abs()) * xn + linalg::norm(&p.c);
            if r > STATIONARY_FRACTION * scale {
                return Verdict::fail(vec![], format!("point is not stationary at μ = {mu}: residual {r:e}"));
            }
            let pref = sigma * sigma;
            // pref·det²·δ = pref·|det|·others·‖r‖, finite even when det = 0
            let rhs_err = pref * det_q * (others * r * (2.0 * xn) + det_q * 4.0 * f64::EPSILON * (1.0 + xn * xn))
                + pref * others * others * r * r;
            lhs_err + rhs_err
        }
        (Err(e), _) | (_, Err(e)) => return Verdict::fail(vec![], format!("eigenvalues for the rounding bound: {e}")),
    };
    let slack = tol * (1.0 + rhs.abs()) + rounding;
    if (lhs - rhs).abs() <= slack {
        Verdict::pass()
    } else {
        Verdict::fail(vec![], format!("det(A − {mu}·B) = {lhs:e} but the closed form gives {rhs:e}"))
    }
}

/// `A − μB` is symmetric for both pencils, so its eigenvalues measure the
/// distance to singularity: at `μ = −α₁/σ` the smallest in magnitude must
/// exceed `1e-10` times the largest. Called when a local nonglobal
/// minimizer exists, in which case the pencil is regular there.
pub fn nonsingular_at_smallest_pole(p: &Pencil) -> Result<Verdict> {
    let alpha1 = to_spectral(&p.q, &p.c)?.alphas[0];
    let mu = match p.kind {
        PencilKind::M1 => -alpha1,
        PencilKind::M2 { sigma } => -alpha1 / sigma,
    };
    let eig = linalg::sym_eig(&p.at(mu), 1e-12)?.eigenvalues;
    let smallest = eig.iter().fold(f64::INFINITY, |m, v| m.min(v.abs()));
    let largest = eig.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    Ok(if smallest > NONSINGULAR_FRACTION * largest {
        Verdict::pass()
    } else {
        Verdict::fail(vec![], format!("A − {mu}·B has eigenvalue {smallest:e} against norm {largest:e}"))
    })
}

/// Every real eigenvalue `μ` of M2 is, within `tol`, zero, a pole `−α_i/σ`,
/// or a root of `|t| = √(Σ c_i²/(σt + α_i)²)`. Negative roots of the last
/// kind do occur (they solve `t² = ‖x(t)‖²` with `t < 0`).
pub fn check_m2_trichotomy(inst: &PrsInstance, eigenvalues: &[f64], tol: f64) -> Result<Verdict> {
    let spectral = to_spectral(inst.q(), inst.c())?;
    let sigma = inst.sigma();
    let poles: Vec<f64> = spectral.alphas.iter().map(|a| -a / sigma).collect();
    let q = |t: f64| {
        let s: f64 = spectral.alphas.iter().zip(&spectral.c_rot).map(|(a, ci)| ci * ci / (sigma * t + a).powi(2)).sum();
        t.abs() - s.sqrt()
    };
    for (i, &mu) in eigenvalues.iter().enumerate() {
        let window = tol * (1.0 + mu.abs());
        if mu.abs() <= tol || poles.iter().any(|&p| (mu - p).abs() <= window) {
            continue;
        }
        let (lo, mid, hi) = (q(mu - window), q(mu), q(mu + window));
        let is_root = mid.abs() <= window || lo.signum() != hi.signum() || lo.signum() != mid.signum();
        if !is_root {
            return Ok(Verdict::fail(
                vec![i],
                format!("eigenvalue {mu} is neither 0, a pole, nor a secular root (residual {mid:e})"),
            ));
        }
    }
    Ok(Verdict::pass())
}
