//! Critical points of the p-regularized subproblem
//!
//! ```text
//! min g(x) = ½ xᵀQx + cᵀx + σ/p ‖x‖^p,   p > 2
//! ```
//!
//! Stationarity reads `(Q + σ‖x‖^{p−2} I)x + c = 0`. With `t = ‖x‖^{p−2}`
//! every nonzero critical point outside the degenerate branch is a root
//! `t > 0` of `h(t) = Σ c_i²/(σt + α_i)² − t^{2/(p−2)}`.

use log::warn;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::secular::{self, h_eval, Regularization, SecularFn};
use crate::spectral::{dedup_by_distance, to_spectral, SpectralForm};
use crate::trs::{monotone_pairs, second_smallest, symmetric_part, Origin, DEDUP_RADIUS, DERIVATIVE_THRESHOLD};
use crate::verdict::{Classification, Verdict};

pub const DEFAULT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct PrsInstance {
    q: Matrix,
    c: Vec<f64>,
    sigma: f64,
    p: f64,
}

impl PrsInstance {
    pub fn new(q: Matrix, c: Vec<f64>, sigma: f64, p: f64) -> Result<Self> {
        if !q.is_square() || q.rows() != c.len() {
            return Err(Error::InvalidInput(format!("Q is {}x{} but c has length {}", q.rows(), q.cols(), c.len())));
        }
        if q.rows() == 0 {
            return Err(Error::InvalidInput("empty instance".into()));
        }
        if c.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("non-finite entry in c".into()));
        }
        if !(sigma > 0.0) || !sigma.is_finite() {
            return Err(Error::InvalidInput(format!("sigma must be positive, got {sigma}")));
        }
        if !(p > 2.0) || !p.is_finite() {
            return Err(Error::InvalidInput(format!("p must exceed 2, got {p}")));
        }
        if q.asymmetry() > 1e-12 * q.frobenius_norm() {
            return Err(Error::InvalidInput(format!("Q is not symmetric (asymmetry {:e})", q.asymmetry())));
        }
        Ok(Self { q: symmetric_part(&q), c, sigma, p })
    }

    pub fn q(&self) -> &Matrix {
        &self.q
    }

    pub fn c(&self) -> &[f64] {
        &self.c
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn dim(&self) -> usize {
        self.c.len()
    }

    pub fn regularization(&self) -> Regularization {
        Regularization { sigma: self.sigma, p: self.p }
    }

    pub fn objective(&self, x: &[f64]) -> f64 {
        let r = linalg::norm(x);
        0.5 * linalg::dot(x, &self.q.matvec(x)) + linalg::dot(&self.c, x) + self.sigma / self.p * r.powf(self.p)
    }

    pub fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let shift = self.sigma * linalg::norm(x).powf(self.p - 2.0);
        self.q.matvec(x).iter().zip(x).zip(&self.c).map(|((a, xi), ci)| a + shift * xi + ci).collect()
    }

    pub fn gradient_residual(&self, x: &[f64]) -> f64 {
        linalg::norm(&self.gradient(x))
    }

    /// `1 + ‖Q‖_F‖x‖ + ‖c‖ + σ‖x‖^(p−1)`: the size of the terms that cancel
    /// in the gradient, for judging a residual.
    pub fn gradient_scale(&self, x: &[f64]) -> f64 {
        let r = linalg::norm(x);
        1.0 + self.q.frobenius_norm() * r + linalg::norm(&self.c) + self.sigma * r.powf(self.p - 1.0)
    }

    pub fn conjugated(&self, u: &Matrix) -> Result<Self> {
        let q = u.transpose().matmul(&self.q).matmul(u);
        PrsInstance::new(symmetric_part(&q), u.tr_matvec(&self.c), self.sigma, self.p)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PrsCriticalPoint {
    pub x: Vec<f64>,
    /// `‖x‖^{p−2}`.
    pub t: f64,
    pub objective: f64,
    pub classification: Classification,
    pub continuum: bool,
    pub origin: Origin,
    pub borderline: bool,
}

impl PrsCriticalPoint {
    pub fn norm(&self) -> f64 {
        linalg::norm(&self.x)
    }
}

/// `t^{2/(p−2)}`, i.e. `‖x‖²` as a function of `t`.
fn norm_sq_of_t(reg: Regularization, t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else {
        (reg.norm_exponent() * t.ln()).exp()
    }
}

/// All critical points, sorted by `t`.
pub fn enumerate_critical(inst: &PrsInstance, tol: f64) -> Result<Vec<PrsCriticalPoint>> {
    let spectral = to_spectral(&inst.q, &inst.c)?;
    enumerate_with_spectral(inst, &spectral, tol)
}

pub fn enumerate_with_spectral(inst: &PrsInstance, spectral: &SpectralForm, tol: f64) -> Result<Vec<PrsCriticalPoint>> {
    let n = inst.dim();
    let reg = inst.regularization();
    let c_eff = spectral.effective_c();
    let raw = spectral.secular(Some(reg))?;
    let spec = raw.clustered();
    let mut points = Vec::new();
    let make = |x: Vec<f64>, t: f64, continuum: bool, origin: Origin| PrsCriticalPoint {
        objective: inst.objective(&x),
        x,
        t,
        classification: Classification::NotLocalMin,
        continuum,
        origin,
        borderline: false,
    };

    if linalg::norm(&inst.c) <= tol {
        points.push(make(vec![0.0; n], 0.0, false, Origin::Interior));
    }

    let intervals = spec.pole_intervals();
    for (k, &(lo, hi)) in intervals.iter().enumerate() {
        if hi <= 0.0 {
            continue;
        }
        let lo = lo.max(0.0);
        // a pole at roundoff distance from t = 0 leaves nothing resolvable
        if reg.sigma * (hi - lo) <= 2.0 * secular::POLE_EPS {
            continue;
        }
        let roots = if k + 1 == intervals.len() {
            let t = secular::bracket_unbounded_root(SecularFn::H, &spec, lo, secular::ROOT_TOL)?;
            let d1 = h_eval(&spec, t)?.d1;
            if !(d1 < 0.0) {
                return Err(Error::Contradiction(format!(
                    "root t = {t} right of every pole has h′ = {d1:e}, so it may not be unique"
                )));
            }
            vec![t]
        } else {
            secular::convex_roots_on_interval(SecularFn::LogH, &spec, lo, hi, secular::ROOT_TOL)?.roots
        };
        for t in roots {
            let y: Vec<f64> = spectral
                .alphas
                .iter()
                .zip(&c_eff)
                .map(|(&a, &ci)| if ci == 0.0 { 0.0 } else { -ci / (reg.sigma * t + a) })
                .collect();
            points.push(make(spectral.to_original(&y), t, false, Origin::Secular));
        }
    }

    let dead = raw.clusters().into_iter().zip(spec.alphas().iter().zip(spec.csq())).filter(|(_, (_, &w))| w == 0.0);
    for (members, (&centre, _)) in dead {
        let t = -centre / reg.sigma;
        if t <= 0.0 {
            continue;
        }
        let mut y = vec![0.0; n];
        for i in 0..n {
            if !members.contains(&i) && c_eff[i] != 0.0 {
                y[i] = -c_eff[i] / (reg.sigma * t + spectral.alphas[i]);
            }
        }
        let target = norm_sq_of_t(reg, t);
        let r2 = linalg::dot(&y, &y);
        if r2 > target * (1.0 + tol) + tol {
            continue;
        }
        let tau = (target - r2).max(0.0).sqrt();
        if tau > 0.0 {
            for s in [1.0, -1.0] {
                let mut yy = y.clone();
                yy[members.start] += s * tau;
                points.push(make(spectral.to_original(&yy), t, true, Origin::Degenerate));
            }
        } else {
            points.push(make(spectral.to_original(&y), t, false, Origin::Degenerate));
        }
    }

    let mut points = dedup_by_distance(
        points,
        DEDUP_RADIUS,
        |p| (p.x.as_slice(), p.t),
        |keep, other| keep.continuum |= other.continuum,
    );
    points.sort_by(|a, b| {
        a.t.total_cmp(&b.t).then_with(|| {
            a.x.iter().zip(&b.x).map(|(u, v)| u.total_cmp(v)).find(|o| o.is_ne()).unwrap_or(std::cmp::Ordering::Equal)
        })
    });
    Ok(points)
}

/// Global iff `σt + α₁ ≥ −tol`. Local nonglobal iff `t` lies in
/// `(max(−α₂/σ, 0) + tol, −α₁/σ − tol)` and `h′(t) > 1e-10`. A local
/// nonglobal point must also have a nonzero first rotated component,
/// `α₁ < α₂` and `σt + α₂ > 0`; a violation is reported as a contradiction.
pub fn classify(
    points: &[PrsCriticalPoint],
    spectral: &SpectralForm,
    inst: &PrsInstance,
    tol: f64,
) -> Result<Vec<PrsCriticalPoint>> {
    let sigma = inst.sigma;
    let raw = spectral.secular(Some(inst.regularization()))?;
    let spec = raw.clustered();
    let alpha1 = spectral.alphas[0];
    let mut out = points.to_vec();
    let mut found: Option<usize> = None;
    for (idx, p) in out.iter_mut().enumerate() {
        p.borderline = false;
        p.classification = Classification::NotLocalMin;
        if sigma * p.t + alpha1 >= -tol {
            p.classification = Classification::Global;
            continue;
        }
        if spec.alphas().len() < 2 || p.continuum || p.origin != Origin::Secular {
            continue;
        }
        // second distinct eigenvalue
        let alpha2 = spec.alphas()[1];
        let lo = (-alpha2 / sigma).max(0.0) + tol;
        let hi = -alpha1 / sigma - tol;
        if !(p.t > lo && p.t < hi) {
            continue;
        }
        let d1 = match h_eval(&spec, p.t) {
            Ok(v) => v.d1,
            Err(Error::Pole { .. }) => continue,
            Err(e) => return Err(e),
        };
        if d1 > DERIVATIVE_THRESHOLD {
            if let Some(prev) = found {
                return Err(Error::Contradiction(format!(
                    "two local nonglobal candidates at t = {} and t = {}",
                    points[prev].t, p.t
                )));
            }
            if !(spec.csq()[0] > 0.0) {
                return Err(Error::Contradiction("local nonglobal point with zero first component".into()));
            }
            if !(sigma * p.t + alpha2 > 0.0) {
                return Err(Error::Contradiction(format!(
                    "local nonglobal point with σt + α₂ = {}",
                    sigma * p.t + alpha2
                )));
            }
            found = Some(idx);
            p.classification = Classification::LocalNonGlobal;
        } else if d1.abs() <= DERIVATIVE_THRESHOLD {
            warn!("borderline root t = {} with h′ = {d1:e}; reported as not a local minimizer", p.t);
            p.borderline = true;
        }
    }
    Ok(out)
}

/// ‖x₂‖ ≥ ‖x₁‖ ⟹ g₂ ≤ g₁ + tol, and ‖x₂‖ > ‖x₁‖ + tol ⟹ g₂ < g₁ + tol.
/// Applied in both directions this also forces equal norms to carry equal
/// objectives.
pub fn check_norm_monotonicity(points: &[PrsCriticalPoint], tol: f64) -> Verdict {
    let pairs: Vec<(f64, f64)> = points.iter().map(|p| (p.norm(), p.objective)).collect();
    monotone_pairs(&pairs, tol, "‖x‖", "g")
}

pub fn check_second_smallest(points: &[PrsCriticalPoint], tol: f64) -> Verdict {
    let objs: Vec<(Classification, f64, f64)> = points.iter().map(|p| (p.classification, p.t, p.objective)).collect();
    second_smallest(&objs, tol, "g")
}

/// All global minimizers share one norm.
pub fn check_global_equal_norms(points: &[PrsCriticalPoint], tol: f64) -> Verdict {
    let globals: Vec<usize> =
        (0..points.len()).filter(|&i| points[i].classification == Classification::Global).collect();
    for &i in &globals {
        for &j in &globals {
            let d = (points[i].norm() - points[j].norm()).abs();
            if d > tol {
                return Verdict::fail(vec![i, j], format!("global norms differ by {d:e}"));
            }
        }
    }
    Verdict::pass()
}

#[derive(Debug, Clone, Serialize)]
pub struct PrsSolution {
    pub spectral: SpectralForm,
    pub points: Vec<PrsCriticalPoint>,
    pub global: PrsCriticalPoint,
    pub local_nonglobal: Option<PrsCriticalPoint>,
}

pub fn solve(inst: &PrsInstance, tol: f64) -> Result<PrsSolution> {
    let spectral = to_spectral(&inst.q, &inst.c)?;
    let raw = enumerate_with_spectral(inst, &spectral, tol)?;
    let points = classify(&raw, &spectral, inst, tol)?;
    let global = points
        .iter()
        .min_by(|a, b| a.objective.total_cmp(&b.objective))
        .cloned()
        .ok_or_else(|| Error::Contradiction("no critical point found".into()))?;
    let local_nonglobal = points.iter().find(|p| p.classification == Classification::LocalNonGlobal).cloned();
    Ok(PrsSolution { spectral, points, global, local_nonglobal })
}
