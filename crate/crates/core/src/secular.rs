//! Secular functions and their roots.
//!
//! In the eigenbasis of `Q` every boundary KKT point of the trust-region
//! problem is a zero of
//!
//! ```text
//! φ(λ) = Σ c_i² / (α_i + λ)² − 1
//! ```
//!
//! and every nonzero critical point of the p-regularized problem is a zero
//! of `h(t) = Σ c_i² / (σt + α_i)² − t^{2/(p−2)}`, or equivalently of its
//! log form `p(t) = log Σ c_i²/(σt + α_i)² − (2/(p−2)) log t`.
//!
//! φ and p are strictly convex between consecutive live poles, so each such
//! interval holds at most two roots. [`convex_roots_on_interval`] finds the
//! interior minimizer first and then brackets one root on each side of it.
//! On the rightmost interval both φ and h are strictly decreasing and
//! [`bracket_unbounded_root`] finds the single root there.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Distance from a live pole below which evaluation is refused.
pub const POLE_EPS: f64 = 1e-14;
/// Default absolute root tolerance on the argument.
pub const ROOT_TOL: f64 = 1e-12;
/// Relative spacing under which two eigenvalues are treated as one pole.
pub const CLUSTER_TOL: f64 = 1e-9;

const MAX_BISECTION_STEPS: usize = 200;
const MAX_POLISH_STEPS: usize = 50;
const MAX_EXPANSIONS: i32 = 60;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Regularization {
    pub sigma: f64,
    pub p: f64,
}

impl Regularization {
    /// The exponent `2/(p−2)` relating `t = ‖x‖^{p−2}` to `‖x‖²`.
    pub fn norm_exponent(&self) -> f64 {
        2.0 / (self.p - 2.0)
    }
}

/// Data of a secular function: ascending eigenvalues, squared rotated
/// linear-term components, and (for the regularized problem) σ and p.
#[derive(Debug, Clone, PartialEq)]
pub struct SecularSpec {
    alphas: Vec<f64>,
    csq: Vec<f64>,
    reg: Option<Regularization>,
}

impl SecularSpec {
    pub fn trs(alphas: Vec<f64>, csq: Vec<f64>) -> Result<Self> {
        Self::new(alphas, csq, None)
    }

    pub fn prs(alphas: Vec<f64>, csq: Vec<f64>, sigma: f64, p: f64) -> Result<Self> {
        Self::new(alphas, csq, Some(Regularization { sigma, p }))
    }

    pub fn new(alphas: Vec<f64>, csq: Vec<f64>, reg: Option<Regularization>) -> Result<Self> {
        if alphas.len() != csq.len() {
            return Err(Error::InvalidInput(format!("{} eigenvalues but {} weights", alphas.len(), csq.len())));
        }
        if alphas.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::InvalidInput("eigenvalues must be ascending".into()));
        }
        if alphas.iter().chain(&csq).any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("non-finite secular data".into()));
        }
        if csq.iter().any(|&w| w < 0.0) {
            return Err(Error::InvalidInput("squared components must be nonnegative".into()));
        }
        if let Some(r) = reg {
            if !(r.sigma > 0.0) || !r.sigma.is_finite() {
                return Err(Error::InvalidInput(format!("sigma must be positive, got {}", r.sigma)));
            }
            if !(r.p > 2.0) || !r.p.is_finite() {
                return Err(Error::InvalidInput(format!("p must exceed 2, got {}", r.p)));
            }
        }
        Ok(Self { alphas, csq, reg })
    }

    pub fn alphas(&self) -> &[f64] {
        &self.alphas
    }

    pub fn csq(&self) -> &[f64] {
        &self.csq
    }

    pub fn regularization(&self) -> Option<Regularization> {
        self.reg
    }

    fn sigma(&self) -> f64 {
        self.reg.map_or(1.0, |r| r.sigma)
    }

    /// Merges eigenvalues closer than `1e-9 · (1 + max|α|)` into one pole.
    ///
    /// A merged pole sits at the weighted mean of its live members (plain
    /// mean when all weights vanish) and carries the summed weight, so dead
    /// members never move a live pole.
    pub fn clustered(&self) -> SecularSpec {
        let mut alphas = Vec::new();
        let mut csq = Vec::new();
        for cluster in self.clusters() {
            let members = &self.alphas[cluster.clone()];
            let weights = &self.csq[cluster];
            let total: f64 = weights.iter().sum();
            let centre = if total > 0.0 {
                members.iter().zip(weights).map(|(a, w)| a * w).sum::<f64>() / total
            } else {
                members.iter().sum::<f64>() / members.len() as f64
            };
            alphas.push(centre);
            csq.push(total);
        }
        SecularSpec { alphas, csq, reg: self.reg }
    }

    /// Index ranges of the eigenvalue groups merged by [`Self::clustered`],
    /// in the same order as the clustered poles.
    pub fn clusters(&self) -> Vec<std::ops::Range<usize>> {
        let gap = CLUSTER_TOL * (1.0 + self.alphas.iter().fold(0.0_f64, |m, a| m.max(a.abs())));
        cluster_ranges(&self.alphas, gap)
    }

    /// Argument value at which the i-th term blows up: `−α_i` for φ and
    /// `−α_i/σ` for h and p.
    pub fn pole_of(&self, alpha: f64) -> f64 {
        -alpha / self.sigma()
    }

    /// Poles with positive weight, ascending in the argument.
    pub fn live_poles(&self) -> Vec<f64> {
        let mut poles: Vec<f64> =
            self.alphas.iter().zip(&self.csq).filter(|(_, &w)| w > 0.0).map(|(&a, _)| self.pole_of(a)).collect();
        poles.sort_by(f64::total_cmp);
        poles.dedup();
        poles
    }

    /// Open intervals between consecutive live poles, plus the two
    /// unbounded ends. Empty when no pole is live.
    pub fn pole_intervals(&self) -> Vec<(f64, f64)> {
        let poles = self.live_poles();
        if poles.is_empty() {
            return Vec::new();
        }
        let mut out = Vec::with_capacity(poles.len() + 1);
        out.push((f64::NEG_INFINITY, poles[0]));
        for w in poles.windows(2) {
            out.push((w[0], w[1]));
        }
        out.push((poles[poles.len() - 1], f64::INFINITY));
        out
    }

    fn require_trs(&self) -> Result<()> {
        match self.reg {
            None => Ok(()),
            Some(_) => Err(Error::InvalidInput("φ needs a spec without regularization".into())),
        }
    }

    fn require_prs(&self) -> Result<Regularization> {
        self.reg.ok_or_else(|| Error::InvalidInput("h and p need a spec with sigma and p".into()))
    }

    /// `(Σ w/u², Σ w/u³, Σ w/u⁴)` with `u = scale·arg + α`, skipping dead
    /// terms.
    fn moments(&self, scale: f64, arg: f64) -> Result<(f64, f64, f64)> {
        let (mut s2, mut s3, mut s4) = (0.0, 0.0, 0.0);
        for (&a, &w) in self.alphas.iter().zip(&self.csq) {
            if w == 0.0 {
                continue;
            }
            let u = scale * arg + a;
            if u.abs() <= POLE_EPS {
                return Err(Error::Pole { arg });
            }
            let inv = 1.0 / u;
            let inv2 = inv * inv;
            s2 += w * inv2;
            s3 += w * inv2 * inv;
            s4 += w * inv2 * inv2;
        }
        Ok((s2, s3, s4))
    }
}

/// Index ranges of runs of eigenvalues whose consecutive gaps are `<= gap`.
fn cluster_ranges(sorted: &[f64], gap: f64) -> Vec<std::ops::Range<usize>> {
    let mut out = Vec::new();
    let mut start = 0;
    for i in 1..=sorted.len() {
        if i == sorted.len() || sorted[i] - sorted[i - 1] > gap {
            out.push(start..i);
            start = i;
        }
    }
    out
}

/// Value and first two derivatives of a secular function at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Eval {
    pub value: f64,
    pub d1: f64,
    pub d2: f64,
}

/// The secular functions the root finders can operate on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SecularFn {
    /// φ(λ), trust-region problem.
    Phi,
    /// h(t), p-regularized problem.
    H,
    /// p(t) = log form of h.
    LogH,
}

impl SecularFn {
    pub fn eval(self, spec: &SecularSpec, x: f64) -> Result<Eval> {
        match self {
            SecularFn::Phi => phi_eval(spec, x),
            SecularFn::H => h_eval(spec, x),
            SecularFn::LogH => p_eval(spec, x),
        }
    }
}

pub fn phi_eval(spec: &SecularSpec, lambda: f64) -> Result<Eval> {
    spec.require_trs()?;
    let (s2, s3, s4) = spec.moments(1.0, lambda)?;
    Ok(Eval { value: s2 - 1.0, d1: -2.0 * s3, d2: 6.0 * s4 })
}

pub fn h_eval(spec: &SecularSpec, t: f64) -> Result<Eval> {
    let reg = spec.require_prs()?;
    if !(t > 0.0) {
        return Err(Error::Domain(format!("h needs t > 0, got {t}")));
    }
    let sigma = reg.sigma;
    let k = reg.norm_exponent();
    let (s2, s3, s4) = spec.moments(sigma, t)?;
    let tk = (k * t.ln()).exp();
    Ok(Eval {
        value: s2 - tk,
        d1: -2.0 * sigma * s3 - k / t * tk,
        d2: 6.0 * sigma * sigma * s4 - k * (k - 1.0) / (t * t) * tk,
    })
}

pub fn p_eval(spec: &SecularSpec, t: f64) -> Result<Eval> {
    let reg = spec.require_prs()?;
    if !(t > 0.0) {
        return Err(Error::Domain(format!("p needs t > 0, got {t}")));
    }
    let sigma = reg.sigma;
    let k = reg.norm_exponent();
    let (s2, s3, s4) = spec.moments(sigma, t)?;
    if !(s2 > 0.0) {
        return Err(Error::Domain("log of a nonpositive weight sum".into()));
    }
    let ds = -2.0 * sigma * s3;
    let dds = 6.0 * sigma * sigma * s4;
    let ratio = ds / s2;
    Ok(Eval { value: s2.ln() - k * t.ln(), d1: ratio - k / t, d2: dds / s2 - ratio * ratio + k / (t * t) })
}

/// Roots of a convex secular function on one open interval.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntervalRoots {
    pub interval: (f64, f64),
    pub roots: Vec<f64>,
    /// Sign (−1, 0, +1) of the function's derivative at each root.
    pub derivative_signs: Vec<i8>,
}

fn sign(v: f64) -> i8 {
    if v > 0.0 {
        1
    } else if v < 0.0 {
        -1
    } else {
        0
    }
}

/// Safeguarded Newton on a bracket `(lo, hi)` of `g`, where `g` is
/// positive on the `lo` side iff `lo_positive`. The endpoints themselves
/// are never evaluated, so they may be poles. The step tolerance shrinks
/// with the distance to the nearer endpoint, so roots crowding a pole are
/// resolved relative to that distance.
fn safeguarded_newton<F>(g: F, mut lo: f64, mut hi: f64, lo_positive: bool, tol: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<(f64, f64)>,
{
    let (lo0, hi0) = (lo, hi);
    let step_tol = |x: f64| tol * (x - lo0).min(hi0 - x).min(1.0);
    let mut x = 0.5 * (lo + hi);
    let mut dx_old = hi - lo;
    let mut dx = dx_old;
    let (mut gx, mut dgx) = g(x)?;
    for _ in 0..MAX_BISECTION_STEPS {
        if gx == 0.0 {
            return Ok(x);
        }
        if (gx > 0.0) == lo_positive {
            lo = x;
        } else {
            hi = x;
        }
        let newton_inside = dgx != 0.0 && {
            let cand = x - gx / dgx;
            cand > lo && cand < hi
        };
        if !newton_inside || (2.0 * gx).abs() > (dx_old * dgx).abs() {
            dx_old = dx;
            dx = 0.5 * (hi - lo);
            x = lo + dx;
        } else {
            dx_old = dx;
            dx = gx / dgx;
            x -= dx;
        }
        (gx, dgx) = g(x)?;
        if dx.abs() < step_tol(x) || hi - lo < step_tol(x) || x == lo || x == hi {
            break;
        }
    }
    polish(&g, x, gx, dgx, lo, hi)
}

/// A few unguarded Newton steps kept inside `[lo, hi]`, accepted only while
/// they reduce `|g|`.
fn polish<F>(g: &F, mut x: f64, mut gx: f64, mut dgx: f64, lo: f64, hi: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<(f64, f64)>,
{
    for _ in 0..MAX_POLISH_STEPS {
        if gx == 0.0 || dgx == 0.0 || !dgx.is_finite() {
            break;
        }
        let cand = x - gx / dgx;
        if !(cand >= lo && cand <= hi) || cand == x {
            break;
        }
        let (gc, dgc) = match g(cand) {
            Ok(v) => v,
            Err(_) => break,
        };
        if gc.abs() >= gx.abs() {
            break;
        }
        x = cand;
        gx = gc;
        dgx = dgc;
    }
    Ok(x)
}

/// Geometric probes `from ± w·2^k` in one direction; returns the first
/// probe satisfying `pred`.
fn probe<F>(eval: &F, from: f64, direction: f64, pred: impl Fn(&Eval) -> bool) -> Result<Option<f64>>
where
    F: Fn(f64) -> Result<Eval>,
{
    let w = 1.0 + from.abs();
    for k in 0..=MAX_EXPANSIONS {
        let x = from + direction * w * 2f64.powi(k);
        let v = eval(x)?;
        if pred(&v) {
            return Ok(Some(x));
        }
    }
    Ok(None)
}

fn check_convex(x: f64, v: &Eval) -> Result<()> {
    if v.d2 < 0.0 || v.d2.is_nan() {
        return Err(Error::Convexity { arg: x, second: v.d2 });
    }
    Ok(())
}

/// All roots of a strictly convex secular function on `(lo, hi)`.
///
/// Finite endpoints must be places where the function tends to +∞ (live
/// poles, or `t = 0` for the log form). Infinite endpoints are explored by
/// geometric expansion. The minimizer is located first by safeguarded
/// Newton on the derivative; at most one root is bracketed on each side.
pub fn convex_roots_on_interval(f: SecularFn, spec: &SecularSpec, lo: f64, hi: f64, tol: f64) -> Result<IntervalRoots> {
    if !(lo < hi) {
        return Err(Error::InvalidInput(format!("empty interval ({lo}, {hi})")));
    }
    let eval = |x: f64| f.eval(spec, x);
    let deriv = |x: f64| eval(x).map(|v| (v.d1, v.d2));
    let value = |x: f64| eval(x).map(|v| (v.value, v.d1));

    let start = match (lo.is_finite(), hi.is_finite()) {
        (true, true) => 0.5 * (lo + hi),
        (true, false) => lo + 1.0 + lo.abs(),
        (false, true) => hi - 1.0 - hi.abs(),
        (false, false) => 0.0,
    };
    let v_start = eval(start)?;
    check_convex(start, &v_start)?;

    // a point (or the finite end) where f' < 0, and one where f' > 0
    let descending_at = if lo.is_finite() || v_start.d1 < 0.0 {
        Some(if v_start.d1 < 0.0 { start } else { lo })
    } else {
        probe(&eval, start, -1.0, |v| v.d1 < 0.0)?
    };
    let ascending_at = if hi.is_finite() || v_start.d1 > 0.0 {
        Some(if v_start.d1 > 0.0 { start } else { hi })
    } else {
        probe(&eval, start, 1.0, |v| v.d1 > 0.0)?
    };

    let mut roots = Vec::new();
    match (descending_at, ascending_at) {
        (Some(a), Some(b)) => {
            let m = if v_start.d1 == 0.0 { start } else { safeguarded_newton(deriv, a, b, false, tol)? };
            let vm = eval(m)?;
            check_convex(m, &vm)?;
            if vm.value == 0.0 {
                roots.push(m);
            } else if vm.value < 0.0 {
                let left_pos = if lo.is_finite() { Some(lo) } else { probe(&eval, m, -1.0, |v| v.value > 0.0)? };
                if let Some(l) = left_pos {
                    roots.push(safeguarded_newton(value, l, m, true, tol)?);
                }
                let right_pos = if hi.is_finite() { Some(hi) } else { probe(&eval, m, 1.0, |v| v.value > 0.0)? };
                if let Some(r) = right_pos {
                    roots.push(safeguarded_newton(value, m, r, false, tol)?);
                }
            }
        }
        (None, Some(_)) => {
            // increasing on the whole interval, left end at −∞
            if let Some(neg) = probe(&eval, start, -1.0, |v| v.value < 0.0)? {
                let right_pos = if hi.is_finite() { Some(hi) } else { probe(&eval, start, 1.0, |v| v.value > 0.0)? };
                if let Some(r) = right_pos {
                    roots.push(safeguarded_newton(value, neg, r, false, tol)?);
                }
            }
        }
        (Some(_), None) => {
            // decreasing on the whole interval, right end at +∞
            if let Some(neg) = probe(&eval, start, 1.0, |v| v.value < 0.0)? {
                let left_pos = if lo.is_finite() { Some(lo) } else { probe(&eval, start, -1.0, |v| v.value > 0.0)? };
                if let Some(l) = left_pos {
                    roots.push(safeguarded_newton(value, l, neg, true, tol)?);
                }
            }
        }
        (None, None) => {}
    }

    let mut derivative_signs = Vec::with_capacity(roots.len());
    for &r in &roots {
        let v = eval(r)?;
        check_convex(r, &v)?;
        derivative_signs.push(sign(v.d1));
    }
    Ok(IntervalRoots { interval: (lo, hi), roots, derivative_signs })
}

/// The unique root of `f` on `(left, ∞)`, for functions positive just
/// right of `left` and eventually negative.
pub fn bracket_unbounded_root(f: SecularFn, spec: &SecularSpec, left: f64, tol: f64) -> Result<f64> {
    let eval = |x: f64| f.eval(spec, x);
    let value = |x: f64| eval(x).map(|v| (v.value, v.d1));
    let w = 1.0 + left.abs();
    let mut last = left;
    for k in -20..=MAX_EXPANSIONS {
        let x = left + w * 2f64.powi(k);
        let v = eval(x)?;
        if v.value < 0.0 {
            return safeguarded_newton(value, last, x, true, tol);
        }
        if v.value == 0.0 {
            return Ok(x);
        }
        last = x;
    }
    Err(Error::Divergence { left, last_probe: last })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trs(alphas: &[f64], csq: &[f64]) -> SecularSpec {
        SecularSpec::trs(alphas.to_vec(), csq.to_vec()).unwrap()
    }

    fn prs(alphas: &[f64], csq: &[f64], sigma: f64, p: f64) -> SecularSpec {
        SecularSpec::prs(alphas.to_vec(), csq.to_vec(), sigma, p).unwrap()
    }

    #[test]
    fn phi_examples() {
        let s = trs(&[-1.0], &[1.0]);
        assert_eq!(phi_eval(&s, 0.0).unwrap(), Eval { value: 0.0, d1: 2.0, d2: 6.0 });
        assert_eq!(phi_eval(&s, 2.0).unwrap().value, 0.0);
        assert_eq!(phi_eval(&trs(&[-1.0], &[0.0]), -1.0).unwrap().value, -1.0);
        assert!(matches!(phi_eval(&s, 1.0), Err(Error::Pole { .. })));
    }

    #[test]
    fn h_examples() {
        assert_eq!(h_eval(&prs(&[-1.0], &[4.0], 1.0, 3.0), 2.0).unwrap().value, 0.0);
        assert!((h_eval(&prs(&[-1.0], &[4.0], 1.0, 4.0), 2.0).unwrap().value - 2.0).abs() < 1e-15);
        assert!(matches!(h_eval(&prs(&[-1.0], &[4.0], 1.0, 3.0), 0.0), Err(Error::Domain(_))));
    }

    #[test]
    fn p_examples() {
        let s = prs(&[-1.0], &[4.0], 1.0, 3.0);
        let p = p_eval(&s, 2.0).unwrap();
        assert!(p.value.abs() < 1e-15);
        let h = h_eval(&s, 2.0).unwrap();
        assert!((p.d1 - h.d1 * 2f64.powi(-2)).abs() < 1e-15);
        assert!(matches!(p_eval(&prs(&[-1.0], &[0.0], 1.0, 3.0), 2.0), Err(Error::Domain(_))));
    }

    #[test]
    fn mode_mismatch_is_rejected() {
        assert!(phi_eval(&prs(&[-1.0], &[1.0], 1.0, 3.0), 0.0).is_err());
        assert!(h_eval(&trs(&[-1.0], &[1.0]), 1.0).is_err());
    }

    #[test]
    fn invalid_specs() {
        assert!(SecularSpec::trs(vec![1.0, 0.0], vec![1.0, 1.0]).is_err());
        assert!(SecularSpec::trs(vec![0.0], vec![-1.0]).is_err());
        assert!(SecularSpec::prs(vec![0.0], vec![1.0], 0.0, 3.0).is_err());
        assert!(SecularSpec::prs(vec![0.0], vec![1.0], 1.0, 2.0).is_err());
    }

    #[test]
    fn phi_roots_on_unbounded_intervals() {
        let s = trs(&[-1.0], &[1.0]);
        let r = convex_roots_on_interval(SecularFn::Phi, &s, 1.0, f64::INFINITY, ROOT_TOL).unwrap();
        assert_eq!(r.roots.len(), 1);
        assert!((r.roots[0] - 2.0).abs() < 1e-12);
        assert_eq!(r.derivative_signs, vec![-1]);

        let r = convex_roots_on_interval(SecularFn::Phi, &s, f64::NEG_INFINITY, 1.0, ROOT_TOL).unwrap();
        assert_eq!(r.roots.len(), 1);
        assert!(r.roots[0].abs() < 1e-12);
        assert_eq!(r.derivative_signs, vec![1]);
    }

    /// Dense sign scan of φ on (1, 4) for alphas [−4, −1], weights
    /// [0.09, 0.25], refined by plain bisection.
    fn sign_scan_roots(spec: &SecularSpec, lo: f64, hi: f64, points: usize) -> Vec<f64> {
        let f = |x: f64| phi_eval(spec, x).unwrap().value;
        let xs: Vec<f64> = (1..points).map(|i| lo + (hi - lo) * i as f64 / points as f64).collect();
        let mut roots = Vec::new();
        for w in xs.windows(2) {
            let (mut a, mut b) = (w[0], w[1]);
            if f(a).signum() != f(b).signum() {
                for _ in 0..200 {
                    let m = 0.5 * (a + b);
                    if f(m).signum() == f(a).signum() {
                        a = m;
                    } else {
                        b = m;
                    }
                }
                roots.push(0.5 * (a + b));
            }
        }
        roots
    }

    #[test]
    fn two_roots_between_poles_match_sign_scan() {
        let s = trs(&[-4.0, -1.0], &[0.09, 0.25]);
        let oracle = sign_scan_roots(&s, 1.0, 4.0, 1_000_000);
        // frozen from the scan above
        assert_eq!(oracle.len(), 2);
        assert!((oracle[0] - 1.503_650_120_005_5).abs() < 1e-9, "{oracle:?}");
        assert!((oracle[1] - 3.694_698_411_818_0).abs() < 1e-9, "{oracle:?}");

        let r = convex_roots_on_interval(SecularFn::Phi, &s, 1.0, 4.0, ROOT_TOL).unwrap();
        assert_eq!(r.roots.len(), 2);
        for (got, want) in r.roots.iter().zip(&oracle) {
            assert!((got - want).abs() < 1e-10);
        }
        assert_eq!(r.derivative_signs, vec![-1, 1]);
    }

    #[test]
    fn unbounded_root_examples() {
        let h3 = prs(&[-1.0], &[4.0], 1.0, 3.0);
        assert!((bracket_unbounded_root(SecularFn::H, &h3, 1.0, ROOT_TOL).unwrap() - 2.0).abs() < 1e-12);
        let phi = trs(&[-1.0], &[1.0]);
        assert!((bracket_unbounded_root(SecularFn::Phi, &phi, 1.0, ROOT_TOL).unwrap() - 2.0).abs() < 1e-12);
        let h = prs(&[-1.0], &[9.0 / 16.0], 1.0, 3.0);
        assert!((bracket_unbounded_root(SecularFn::H, &h, 1.0, ROOT_TOL).unwrap() - 1.5).abs() < 1e-12);
    }

    #[test]
    fn clustering_merges_close_eigenvalues() {
        let s = trs(&[-2.0, -1.0, -1.0 + 1e-12, 3.0], &[1.0, 0.5, 0.25, 0.0]);
        let c = s.clustered();
        assert_eq!(c.alphas().len(), 3);
        assert_eq!(c.csq(), &[1.0, 0.75, 0.0]);
        let poles = c.live_poles();
        assert!((poles[0] - (1.0 - 1e-12 / 3.0)).abs() < 1e-15 && poles[1] == 2.0);
        assert_eq!(c.pole_intervals().len(), 3);
    }

    #[test]
    fn dead_terms_are_identical_to_deleted_ones() {
        let full = trs(&[-3.0, -1.0, 2.0], &[0.4, 0.0, 0.7]);
        let cut = trs(&[-3.0, 2.0], &[0.4, 0.7]);
        for x in [-5.0, 0.0, 0.5, 1.0, 2.5, 10.0] {
            assert_eq!(phi_eval(&full, x).unwrap(), phi_eval(&cut, x).unwrap());
        }
        assert_eq!(full.pole_intervals(), cut.pole_intervals());
    }
}
