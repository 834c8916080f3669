//! KKT points of the unit-ball trust-region subproblem
//!
//! ```text
//! min f(x) = ½ xᵀQx + cᵀx   s.t. ‖x‖ ≤ 1
//! ```
//!
//! Every KKT point `(x, λ)` is one of: the interior solution of `Qx = −c`
//! (λ = 0), a boundary point generated by a root λ ≥ 0 of φ, or a point of
//! the degenerate branch where `−λ` is an eigenvalue of `Q` whose
//! eigenspace is orthogonal to `c`. [`enumerate_kkt`] produces all three
//! kinds and [`classify`] labels them.

use log::warn;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::secular::{self, phi_eval, SecularFn};
use crate::spectral::{dedup_by_distance, to_spectral, SpectralForm};
use crate::verdict::{Classification, Verdict};

/// Points closer than this in `(x, λ)` are the same point.
pub const DEDUP_RADIUS: f64 = 1e-8;
/// Strictness threshold for the derivative test of a local nonglobal root.
pub const DERIVATIVE_THRESHOLD: f64 = 1e-10;
pub const DEFAULT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct TrsInstance {
    q: Matrix,
    c: Vec<f64>,
}

impl TrsInstance {
    /// Accepts `Q` symmetric up to `1e-12 · ‖Q‖_F` and stores the
    /// symmetric part.
    pub fn new(q: Matrix, c: Vec<f64>) -> Result<Self> {
        if !q.is_square() || q.rows() != c.len() {
            return Err(Error::InvalidInput(format!("Q is {}x{} but c has length {}", q.rows(), q.cols(), c.len())));
        }
        if q.rows() == 0 {
            return Err(Error::InvalidInput("empty instance".into()));
        }
        if c.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("non-finite entry in c".into()));
        }
        if q.asymmetry() > 1e-12 * q.frobenius_norm() {
            return Err(Error::InvalidInput(format!("Q is not symmetric (asymmetry {:e})", q.asymmetry())));
        }
        Ok(Self { q: symmetric_part(&q), c })
    }

    pub fn q(&self) -> &Matrix {
        &self.q
    }

    pub fn c(&self) -> &[f64] {
        &self.c
    }

    pub fn dim(&self) -> usize {
        self.c.len()
    }

    pub fn objective(&self, x: &[f64]) -> f64 {
        0.5 * linalg::dot(x, &self.q.matvec(x)) + linalg::dot(&self.c, x)
    }

    /// `‖(Q + λI)x + c‖`.
    pub fn stationarity_residual(&self, x: &[f64], lambda: f64) -> f64 {
        let qx = self.q.matvec(x);
        let r: Vec<f64> = qx.iter().zip(x).zip(&self.c).map(|((a, xi), ci)| a + lambda * xi + ci).collect();
        linalg::norm(&r)
    }

    /// `1 + (‖Q‖_F + |λ|)‖x‖ + ‖c‖`, the scale for judging a stationarity residual.
    pub fn stationarity_scale(&self, x: &[f64], lambda: f64) -> f64 {
        1.0 + (self.q.frobenius_norm() + lambda.abs()) * linalg::norm(x) + linalg::norm(&self.c)
    }

    /// The same problem with `Q` and `c` expressed in another orthonormal
    /// basis: `(UᵀQU, Uᵀc)`.
    pub fn conjugated(&self, u: &Matrix) -> Result<Self> {
        let q = u.transpose().matmul(&self.q).matmul(u);
        let c = u.tr_matvec(&self.c);
        TrsInstance::new(symmetric_part(&q), c)
    }
}

pub(crate) fn symmetric_part(q: &Matrix) -> Matrix {
    q.add_scaled(1.0, &q.transpose()).scaled(0.5)
}

/// How a KKT point was generated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Origin {
    Interior,
    Secular,
    Degenerate,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrsKktPoint {
    pub x: Vec<f64>,
    pub lambda: f64,
    pub objective: f64,
    pub on_boundary: bool,
    /// [`Classification::NotLocalMin`] until [`classify`] runs.
    pub classification: Classification,
    /// Set when the point stands for a whole family of solutions in a
    /// degenerate eigenspace.
    pub continuum: bool,
    pub origin: Origin,
    /// Derivative test landed within the strictness threshold.
    pub borderline: bool,
}

impl TrsKktPoint {
    pub fn norm(&self) -> f64 {
        linalg::norm(&self.x)
    }
}

fn boundary_point_from_root(spectral: &SpectralForm, c_eff: &[f64], lambda: f64) -> Vec<f64> {
    let y: Vec<f64> =
        spectral.alphas.iter().zip(c_eff).map(|(&a, &ci)| if ci == 0.0 { 0.0 } else { -ci / (a + lambda) }).collect();
    spectral.to_original(&y)
}

/// All KKT points, sorted by multiplier.
pub fn enumerate_kkt(inst: &TrsInstance, tol: f64) -> Result<Vec<TrsKktPoint>> {
    let spectral = to_spectral(&inst.q, &inst.c)?;
    enumerate_with_spectral(inst, &spectral, tol)
}

pub fn enumerate_with_spectral(inst: &TrsInstance, spectral: &SpectralForm, tol: f64) -> Result<Vec<TrsKktPoint>> {
    let n = inst.dim();
    let c_eff = spectral.effective_c();
    let raw = spectral.secular(None)?;
    let spec = raw.clustered();
    let mut points = Vec::new();
    let make = |x: Vec<f64>, lambda: f64, on_boundary: bool, continuum: bool, origin: Origin| TrsKktPoint {
        objective: inst.objective(&x),
        x,
        lambda,
        on_boundary,
        classification: Classification::NotLocalMin,
        continuum,
        origin,
        borderline: false,
    };

    // interior candidate
    let neg_c: Vec<f64> = inst.c.iter().map(|v| -v).collect();
    if let Ok(x) = linalg::solve_linear(&inst.q, &neg_c, linalg::PIVOT_TOL) {
        let r = linalg::norm(&x);
        if r < 1.0 - tol {
            points.push(make(x, 0.0, false, false, Origin::Interior));
        } else if r <= 1.0 + tol {
            points.push(make(x, 0.0, true, false, Origin::Interior));
        }
    }

    // boundary points from secular roots λ ≥ 0
    let intervals = spec.pole_intervals();
    for (k, &(lo, hi)) in intervals.iter().enumerate() {
        if hi < -tol {
            continue;
        }
        let roots = if k + 1 == intervals.len() {
            vec![secular::bracket_unbounded_root(SecularFn::Phi, &spec, lo, secular::ROOT_TOL)?]
        } else {
            secular::convex_roots_on_interval(SecularFn::Phi, &spec, lo, hi, secular::ROOT_TOL)?.roots
        };
        for lambda in roots.into_iter().filter(|&l| l >= -tol) {
            let lambda = lambda.max(0.0);
            let x = boundary_point_from_root(spectral, &c_eff, lambda);
            points.push(make(x, lambda, true, false, Origin::Secular));
        }
    }

    // degenerate branch: −λ an eigenvalue whose eigenspace is orthogonal to c
    let dead = raw.clusters().into_iter().zip(spec.alphas().iter().zip(spec.csq())).filter(|(_, (_, &w))| w == 0.0);
    for (members, (&centre, _)) in dead {
        let lambda = -centre;
        if lambda < -tol {
            continue;
        }
        let lambda = lambda.max(0.0);
        let mut y = vec![0.0; n];
        for i in 0..n {
            if !members.contains(&i) && c_eff[i] != 0.0 {
                y[i] = -c_eff[i] / (spectral.alphas[i] + lambda);
            }
        }
        let r2 = linalg::dot(&y, &y);
        if r2 > 1.0 + tol {
            continue;
        }
        let tau = (1.0 - r2).max(0.0).sqrt();
        if tau > 0.0 {
            for s in [1.0, -1.0] {
                let mut yy = y.clone();
                yy[members.start] += s * tau;
                points.push(make(spectral.to_original(&yy), lambda, true, true, Origin::Degenerate));
            }
        } else {
            points.push(make(spectral.to_original(&y), lambda, true, false, Origin::Degenerate));
        }
    }

    let mut points = dedup_by_distance(
        points,
        DEDUP_RADIUS,
        |p| (p.x.as_slice(), p.lambda),
        |keep, other| {
            keep.on_boundary |= other.on_boundary;
            keep.continuum |= other.continuum;
        },
    );
    sort_points(&mut points);
    Ok(points)
}

fn sort_points(points: &mut [TrsKktPoint]) {
    points.sort_by(|a, b| {
        a.lambda.total_cmp(&b.lambda).then_with(|| {
            a.x.iter().zip(&b.x).map(|(u, v)| u.total_cmp(v)).find(|o| o.is_ne()).unwrap_or(std::cmp::Ordering::Equal)
        })
    });
}

/// Labels every point.
///
/// Global iff `λ ≥ −α₁ − tol`. Local nonglobal iff the point is a boundary
/// secular root with `λ > tol`, `λ ∈ (−α₂ + tol, −α₁ − tol)` and
/// `φ′(λ) > 1e-10`; roots with `|φ′|` under that threshold are flagged
/// borderline and left as [`Classification::NotLocalMin`].
pub fn classify(points: &[TrsKktPoint], spectral: &SpectralForm, tol: f64) -> Result<Vec<TrsKktPoint>> {
    let alpha1 = spectral.alphas[0];
    let spec = spectral.secular(None)?.clustered();
    // second distinct eigenvalue
    let alpha2 = spec.alphas().get(1).copied();
    let mut out = points.to_vec();
    let mut found_lng: Option<usize> = None;
    for (idx, p) in out.iter_mut().enumerate() {
        p.borderline = false;
        p.classification = Classification::NotLocalMin;
        if p.lambda + alpha1 >= -tol {
            p.classification = Classification::Global;
            continue;
        }
        let Some(alpha2) = alpha2 else { continue };
        let in_window = p.lambda > tol && p.lambda > -alpha2 + tol && p.lambda < -alpha1 - tol;
        if !(in_window && p.on_boundary && !p.continuum) {
            continue;
        }
        let d1 = match phi_eval(&spec, p.lambda) {
            Ok(v) => v.d1,
            Err(Error::Pole { .. }) => continue,
            Err(e) => return Err(e),
        };
        if d1 > DERIVATIVE_THRESHOLD {
            if let Some(prev) = found_lng {
                return Err(Error::Contradiction(format!(
                    "two local nonglobal candidates at λ = {} and λ = {}",
                    points[prev].lambda, p.lambda
                )));
            }
            found_lng = Some(idx);
            p.classification = Classification::LocalNonGlobal;
        } else if d1.abs() <= DERIVATIVE_THRESHOLD {
            warn!("borderline root λ = {} with φ′ = {d1:e}; reported as not a local minimizer", p.lambda);
            p.borderline = true;
        }
    }
    Ok(out)
}

/// λ₂ ≥ λ₁ ⟹ f₂ ≤ f₁ + tol, and λ₂ > λ₁ + tol ⟹ f₂ < f₁ + tol.
pub fn check_multiplier_monotonicity(points: &[TrsKktPoint], tol: f64) -> Verdict {
    let pairs: Vec<(f64, f64)> = points.iter().map(|p| (p.lambda, p.objective)).collect();
    monotone_pairs(&pairs, tol, "λ", "f")
}

/// Shared by the multiplier and norm monotonicity checks: a larger `key`
/// never comes with a larger `value`.
pub(crate) fn monotone_pairs(pairs: &[(f64, f64)], tol: f64, key: &str, value: &str) -> Verdict {
    for (i, &(k1, v1)) in pairs.iter().enumerate() {
        for (j, &(k2, v2)) in pairs.iter().enumerate() {
            if i == j {
                continue;
            }
            if k2 >= k1 && v2 > v1 + tol {
                return Verdict::fail(
                    vec![i, j],
                    format!("{key}₂ = {k2} ≥ {key}₁ = {k1} but {value}₂ = {v2} > {value}₁ = {v1}"),
                );
            }
            if k2 > k1 + tol && !(v2 < v1 + tol) {
                return Verdict::fail(
                    vec![i, j],
                    format!("{key}₂ = {k2} > {key}₁ = {k1} but {value}₂ = {v2} is not below {value}₁ = {v1}"),
                );
            }
        }
    }
    Verdict::pass()
}

/// For equal-norm pairs: `f₂ − f₁ = (λ₁ − λ₂)/4 · ‖x₁ − x₂‖²`.
pub fn check_equal_norm_identity(points: &[TrsKktPoint], tol: f64) -> Verdict {
    for (i, a) in points.iter().enumerate() {
        for (j, b) in points.iter().enumerate().skip(i + 1) {
            if (a.norm() - b.norm()).abs() > tol {
                continue;
            }
            let d = linalg::dist(&a.x, &b.x);
            let lhs = b.objective - a.objective;
            let rhs = (a.lambda - b.lambda) / 4.0 * d * d;
            if (lhs - rhs).abs() > tol * (1.0 + a.objective.abs() + b.objective.abs()) {
                return Verdict::fail(vec![i, j], format!("f₂ − f₁ = {lhs} but (λ₁ − λ₂)/4·‖x₁ − x₂‖² = {rhs}"));
            }
        }
    }
    Verdict::pass()
}

/// All global points share one multiplier and one objective; a local
/// nonglobal point, when present, sits strictly between the global value
/// and every other KKT value.
pub fn check_second_smallest(points: &[TrsKktPoint], tol: f64) -> Verdict {
    let objs: Vec<(Classification, f64, f64)> =
        points.iter().map(|p| (p.classification, p.lambda, p.objective)).collect();
    second_smallest(&objs, tol, "f")
}

pub(crate) fn second_smallest(points: &[(Classification, f64, f64)], tol: f64, value: &str) -> Verdict {
    let globals: Vec<usize> = (0..points.len()).filter(|&i| points[i].0 == Classification::Global).collect();
    for &g in &globals {
        for &h in &globals {
            if (points[g].1 - points[h].1).abs() > tol || (points[g].2 - points[h].2).abs() > tol {
                return Verdict::fail(vec![g, h], "global points disagree on multiplier or objective");
            }
        }
    }
    let Some(l) = points.iter().position(|p| p.0 == Classification::LocalNonGlobal) else {
        return Verdict::pass();
    };
    let lv = points[l].2;
    for &g in &globals {
        if !(lv - points[g].2 > tol) {
            return Verdict::fail(vec![g, l], format!("{value}_lng = {lv} not above {value}_global = {}", points[g].2));
        }
    }
    for (i, p) in points.iter().enumerate() {
        if p.0 == Classification::NotLocalMin && !(p.2 - lv > tol) {
            return Verdict::fail(vec![l, i], format!("{value}_lng = {lv} not below {value} = {}", p.2));
        }
    }
    Verdict::pass()
}

/// Every global multiplier is at least every other multiplier.
pub fn check_global_multiplier_dominance(points: &[TrsKktPoint], tol: f64) -> Verdict {
    for (g, pg) in points.iter().enumerate().filter(|(_, p)| p.classification == Classification::Global) {
        for (i, p) in points.iter().enumerate() {
            if p.lambda > pg.lambda + tol {
                return Verdict::fail(vec![g, i], format!("λ = {} exceeds the global λ* = {}", p.lambda, pg.lambda));
            }
        }
    }
    Verdict::pass()
}

#[derive(Debug, Clone, Serialize)]
pub struct TrsSolution {
    pub spectral: SpectralForm,
    pub points: Vec<TrsKktPoint>,
    pub global: TrsKktPoint,
    pub local_nonglobal: Option<TrsKktPoint>,
}

/// Enumerate, classify and pick out the global and (if any) local
/// nonglobal minimizer.
pub fn solve(inst: &TrsInstance, tol: f64) -> Result<TrsSolution> {
    let spectral = to_spectral(&inst.q, &inst.c)?;
    let raw = enumerate_with_spectral(inst, &spectral, tol)?;
    let points = classify(&raw, &spectral, tol)?;
    let global = points
        .iter()
        .min_by(|a, b| a.objective.total_cmp(&b.objective))
        .cloned()
        .ok_or_else(|| Error::Contradiction("no KKT point found".into()))?;
    let local_nonglobal = points.iter().find(|p| p.classification == Classification::LocalNonGlobal).cloned();
    Ok(TrsSolution { spectral, points, global, local_nonglobal })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inst(q: &[&[f64]], c: &[f64]) -> TrsInstance {
        TrsInstance::new(Matrix::from_rows(q).unwrap(), c.to_vec()).unwrap()
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn one_dimensional_closed_form() {
        let sol = solve(&inst(&[&[-1.0]], &[-0.75]), DEFAULT_TOL).unwrap();
        let want = [(-0.75, 0.0, 9.0 / 32.0), (-1.0, 0.25, 0.25), (1.0, 1.75, -1.25)];
        assert_eq!(sol.points.len(), 3);
        for (p, (x, l, f)) in sol.points.iter().zip(want) {
            assert!(close(p.x[0], x, 1e-12) && close(p.lambda, l, 1e-12) && close(p.objective, f, 1e-12), "{p:?}");
        }
        let labels: Vec<_> = sol.points.iter().map(|p| p.classification).collect();
        assert_eq!(labels, vec![Classification::NotLocalMin, Classification::NotLocalMin, Classification::Global]);
        assert!(sol.local_nonglobal.is_none());
        assert!(close(sol.global.x[0], 1.0, 1e-12) && close(sol.global.objective, -1.25, 1e-12));
    }

    #[test]
    fn zero_linear_term_gives_continuum_pair() {
        let sol = solve(&inst(&[&[-1.0]], &[0.0]), DEFAULT_TOL).unwrap();
        assert_eq!(sol.points.len(), 3);
        assert_eq!(sol.points[0].x, vec![0.0]);
        assert_eq!(sol.points[0].lambda, 0.0);
        assert_eq!(sol.points[0].classification, Classification::NotLocalMin);
        for p in &sol.points[1..] {
            assert_eq!(p.lambda, 1.0);
            assert_eq!(p.x[0].abs(), 1.0);
            assert!(p.continuum);
            assert_eq!(p.classification, Classification::Global);
            assert_eq!(p.objective, -0.5);
        }
        assert_eq!(sol.global.objective, -0.5);
    }

    #[test]
    fn equal_smallest_eigenvalues_never_local_nonglobal() {
        for c in [[0.3, 0.5], [0.01, 0.02], [1.0, -2.0], [0.0, 0.1]] {
            let sol = solve(&inst(&[&[-1.0, 0.0], &[0.0, -1.0]], &c), DEFAULT_TOL).unwrap();
            assert!(sol.points.iter().all(|p| p.classification != Classification::LocalNonGlobal));
        }
    }

    /// Per-interval dense sign scan of φ for Q = diag(−4, −1), c = (0.3, 0.5).
    fn scan_oracle() -> Vec<f64> {
        let phi = |l: f64| 0.09 / (l - 4.0).powi(2) + 0.25 / (l - 1.0).powi(2) - 1.0;
        let mut roots = Vec::new();
        for (lo, hi) in [(0.0, 1.0), (1.0, 4.0), (4.0, 50.0)] {
            let m = 200_000;
            for i in 1..m - 1 {
                let (mut a, mut b) = (lo + (hi - lo) * i as f64 / m as f64, lo + (hi - lo) * (i + 1) as f64 / m as f64);
                if phi(a).signum() != phi(b).signum() {
                    for _ in 0..200 {
                        let mid = 0.5 * (a + b);
                        if phi(mid).signum() == phi(a).signum() {
                            a = mid;
                        } else {
                            b = mid;
                        }
                    }
                    roots.push(0.5 * (a + b));
                }
            }
        }
        roots
    }

    #[test]
    fn two_dimensional_instance_matches_scan() {
        let oracle = scan_oracle();
        // φ has one root in [0, 1), two in (1, 4) and one right of 4
        assert_eq!(oracle.len(), 4, "{oracle:?}");
        let sol = solve(&inst(&[&[-4.0, 0.0], &[0.0, -1.0]], &[0.3, 0.5]), DEFAULT_TOL).unwrap();
        // the interior solution (0.075, 0.5) is also a KKT point
        assert_eq!(sol.points[0].origin, Origin::Interior);
        assert!(close(sol.points[0].x[0], 0.075, 1e-15) && close(sol.points[0].x[1], 0.5, 1e-15));
        let lambdas: Vec<f64> = sol.points[1..].iter().map(|p| p.lambda).collect();
        assert_eq!(lambdas.len(), 4, "{lambdas:?}");
        assert!(close(lambdas[1], 1.503_650_120_005_5, 1e-12) && close(lambdas[2], 3.694_698_411_818_0, 1e-12));
        for (got, want) in lambdas.iter().zip(&oracle) {
            assert!(close(*got, *want, 1e-9), "{lambdas:?} vs {oracle:?}");
        }
        let labels: Vec<_> = sol.points.iter().map(|p| p.classification).collect();
        assert_eq!(
            labels,
            vec![
                Classification::NotLocalMin,
                Classification::NotLocalMin,
                Classification::NotLocalMin,
                Classification::LocalNonGlobal,
                Classification::Global
            ]
        );
        assert!(check_second_smallest(&sol.points, 1e-9).passed);
        assert!(check_multiplier_monotonicity(&sol.points, 1e-9).passed);
    }

    #[test]
    fn monotonicity_examples() {
        let sol = solve(&inst(&[&[-1.0]], &[-0.75]), DEFAULT_TOL).unwrap();
        assert!(check_multiplier_monotonicity(&sol.points, 1e-9).passed);
        let mut fake = sol.points[..2].to_vec();
        fake[0].lambda = 0.0;
        fake[0].objective = 0.0;
        fake[1].lambda = 1.0;
        fake[1].objective = 1.0;
        let v = check_multiplier_monotonicity(&fake, 1e-9);
        assert!(!v.passed);
        assert_eq!(v.witness.unwrap().indices, vec![0, 1]);
        assert!(check_multiplier_monotonicity(&sol.points[..1], 1e-9).passed);
    }

    #[test]
    fn equal_norm_identity_examples() {
        let sol = solve(&inst(&[&[-1.0]], &[-0.75]), DEFAULT_TOL).unwrap();
        assert!(check_equal_norm_identity(&sol.points, 1e-9).passed);
        let same = vec![sol.points[2].clone(), sol.points[2].clone()];
        assert!(check_equal_norm_identity(&same, 1e-9).passed);
        let mut broken = sol.points.clone();
        broken[1].objective += 0.1;
        assert!(!check_equal_norm_identity(&broken, 1e-9).passed);
    }

    #[test]
    fn second_smallest_rejects_fabricated_order() {
        let sol = solve(&inst(&[&[-4.0, 0.0], &[0.0, -1.0]], &[0.3, 0.5]), DEFAULT_TOL).unwrap();
        let mut pts = sol.points.clone();
        pts[0].objective = sol.local_nonglobal.as_ref().unwrap().objective - 1.0;
        assert!(!check_second_smallest(&pts, 1e-9).passed);
        let one_d = solve(&inst(&[&[-1.0]], &[-0.75]), DEFAULT_TOL).unwrap();
        assert!(check_second_smallest(&one_d.points, 1e-9).passed);
    }

    #[test]
    fn convex_instance_has_interior_global() {
        let sol = solve(&inst(&[&[2.0, 0.0], &[0.0, 3.0]], &[0.5, -0.3]), DEFAULT_TOL).unwrap();
        assert_eq!(sol.points.len(), 1);
        assert_eq!(sol.global.classification, Classification::Global);
        assert!(!sol.global.on_boundary);
        assert!(close(sol.global.x[0], -0.25, 1e-15) && close(sol.global.x[1], 0.1, 1e-15));
    }

    #[test]
    fn rejects_asymmetric_or_mismatched() {
        assert!(TrsInstance::new(Matrix::from_rows(&[[0.0, 1.0], [0.0, 0.0]]).unwrap(), vec![0.0, 0.0]).is_err());
        assert!(TrsInstance::new(Matrix::identity(2), vec![0.0]).is_err());
    }
}
