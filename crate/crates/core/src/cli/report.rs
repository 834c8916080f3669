//! Solve-and-check reports.

use std::time::Instant;

use rand::Rng;
use serde::Serialize;

use super::generate::{random_orthogonal, sphere_sample};
use super::instance::{Instance, InstanceFile};
use crate::error::Result;
use crate::linalg;
use crate::pencil::{self, PencilSolution};
use crate::prs::{self, PrsInstance, PrsSolution};
use crate::trs::{self, TrsInstance, TrsSolution};
use crate::verdict::{Classification, Verdict, Witness};

/// Tolerances of every check, fixed here so reports are comparable.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tolerances {
    /// Root tolerance and classification margin.
    pub classify: f64,
    pub residual: f64,
    pub feasibility: f64,
    pub monotonicity: f64,
    pub equal_norm: f64,
    pub second_smallest: f64,
    pub global_norms: f64,
    pub basis: f64,
    pub det: f64,
    pub cross_path: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            classify: 1e-9,
            residual: 1e-8,
            feasibility: 1e-10,
            monotonicity: 1e-7,
            equal_norm: 1e-8,
            second_smallest: 1e-9,
            global_norms: 1e-9,
            basis: 1e-8,
            det: 1e-6,
            cross_path: 1e-6,
        }
    }
}

impl Tolerances {
    pub fn with_classify(tol: f64) -> Self {
        Tolerances { classify: tol, ..Default::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckRecord {
    pub name: String,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
}

impl CheckRecord {
    pub fn new(name: &str, v: Verdict) -> Self {
        CheckRecord { name: name.to_string(), passed: v.passed, witness: v.witness }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointRecord {
    pub x: Vec<f64>,
    /// λ for the trust-region problem, `t = ‖x‖^{p−2}` otherwise.
    pub multiplier: f64,
    pub objective: f64,
    pub classification: Classification,
    pub continuum: bool,
    pub borderline: bool,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralSummary {
    pub alphas: Vec<f64>,
    pub c_rot: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Timings {
    pub solve_ms: f64,
    pub pencil_ms: f64,
    pub checks_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub instance: InstanceFile,
    pub spectral: SpectralSummary,
    pub points: Vec<PointRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pencil: Option<PencilSolution>,
    pub checks: Vec<CheckRecord>,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timings: Option<Timings>,
}

fn all_points(mut check: impl FnMut(usize) -> Option<String>, n: usize) -> Verdict {
    for i in 0..n {
        if let Some(msg) = check(i) {
            return Verdict::fail(vec![i], msg);
        }
    }
    Verdict::pass()
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + b.abs())
}

/// Sorted `(multiplier, objective)` lists agree entrywise.
fn same_pairs(mut a: Vec<(f64, f64)>, mut b: Vec<(f64, f64)>, tol: f64) -> Verdict {
    let key = |u: &(f64, f64), v: &(f64, f64)| u.0.total_cmp(&v.0).then(u.1.total_cmp(&v.1));
    a.sort_by(key);
    b.sort_by(key);
    if a.len() != b.len() {
        return Verdict::fail(vec![], format!("{} points before rotation, {} after", a.len(), b.len()));
    }
    for (i, (u, v)) in a.iter().zip(&b).enumerate() {
        if !close(u.0, v.0, tol) || !close(u.1, v.1, tol) {
            return Verdict::fail(vec![i], format!("{u:?} became {v:?} after rotation"));
        }
    }
    Verdict::pass()
}

pub fn trs_checks<R: Rng>(
    inst: &TrsInstance,
    sol: &TrsSolution,
    tol: &Tolerances,
    rng: &mut R,
) -> Result<Vec<CheckRecord>> {
    let pts = &sol.points;
    let mut out = Vec::new();
    out.push(CheckRecord::new(
        "kkt_conditions",
        all_points(
            |i| {
                let p = &pts[i];
                let r = inst.stationarity_residual(&p.x, p.lambda);
                let xx = linalg::dot(&p.x, &p.x);
                if r > tol.residual * inst.stationarity_scale(&p.x, p.lambda) {
                    Some(format!("stationarity residual {r:e}"))
                } else if xx > 1.0 + tol.feasibility {
                    Some(format!("‖x‖² = {xx}"))
                } else if (p.lambda * (xx - 1.0)).abs() > tol.feasibility {
                    Some(format!("complementarity λ(‖x‖² − 1) = {:e}", p.lambda * (xx - 1.0)))
                } else if p.lambda < -1e-12 {
                    Some(format!("negative multiplier {}", p.lambda))
                } else {
                    None
                }
            },
            pts.len(),
        ),
    ));
    out.push(CheckRecord::new("multiplier_monotonicity", trs::check_multiplier_monotonicity(pts, tol.monotonicity)));
    out.push(CheckRecord::new("equal_norm_identity", trs::check_equal_norm_identity(pts, tol.equal_norm)));
    out.push(CheckRecord::new("second_smallest", trs::check_second_smallest(pts, tol.second_smallest)));
    out.push(CheckRecord::new(
        "global_multiplier_dominance",
        trs::check_global_multiplier_dominance(pts, tol.classify),
    ));
    if let Some(l) = &sol.local_nonglobal {
        let v = if l.lambda > 0.0 && (l.norm() - 1.0).abs() <= tol.feasibility {
            Verdict::pass()
        } else {
            Verdict::fail(vec![], format!("λ = {}, ‖x‖ = {}", l.lambda, l.norm()))
        };
        out.push(CheckRecord::new("strict_complementarity", v));
    }

    let u = random_orthogonal(rng, inst.dim())?;
    let rotated = trs::enumerate_kkt(&inst.conjugated(&u)?, tol.classify)?;
    out.push(CheckRecord::new(
        "basis_invariance",
        same_pairs(
            pts.iter().map(|p| (p.lambda, p.objective)).collect(),
            rotated.iter().map(|p| (p.lambda, p.objective)).collect(),
            tol.basis,
        ),
    ));
    Ok(out)
}

pub fn trs_pencil_checks(
    inst: &TrsInstance,
    sol: &TrsSolution,
    pen: &PencilSolution,
    tol: &Tolerances,
) -> Result<Vec<CheckRecord>> {
    let m1 = pencil::build_m1(inst);
    let mut out = Vec::new();
    let lg = sol.global.lambda;
    out.push(CheckRecord::new(
        "pencil_global",
        if close(pen.global, lg, tol.cross_path) {
            Verdict::pass()
        } else {
            Verdict::fail(vec![], format!("largest eigenvalue {} vs secular λ* = {lg}", pen.global))
        },
    ));
    if let Some(l) = &sol.local_nonglobal {
        let v = match pen.local_nonglobal {
            Some(m) if close(m, l.lambda, tol.cross_path) => Verdict::pass(),
            other => Verdict::fail(vec![], format!("second largest eigenvalue {other:?} vs secular λ = {}", l.lambda)),
        };
        out.push(CheckRecord::new("pencil_local_nonglobal", v));
        out.push(CheckRecord::new("nonsingular_at_smallest_pole", pencil::nonsingular_at_smallest_pole(&m1)?));
    }
    let det = sol.points.iter().enumerate().fold(Verdict::pass(), |acc, (i, p)| {
        acc.and(match pencil::det_identity_check(&m1, &p.x, p.lambda, tol.det) {
            Verdict { passed: false, witness } => {
                Verdict::fail(vec![i], witness.map(|w| w.message).unwrap_or_default())
            }
            ok => ok,
        })
    });
    out.push(CheckRecord::new("det_identity", det));
    Ok(out)
}

pub fn prs_checks<R: Rng>(
    inst: &PrsInstance,
    sol: &PrsSolution,
    tol: &Tolerances,
    rng: &mut R,
) -> Result<Vec<CheckRecord>> {
    let pts = &sol.points;
    let mut out = Vec::new();
    out.push(CheckRecord::new(
        "stationarity",
        all_points(
            |i| {
                let p = &pts[i];
                let r = inst.gradient_residual(&p.x);
                let tn = p.norm().powf(inst.p() - 2.0);
                if r > tol.residual * inst.gradient_scale(&p.x) {
                    Some(format!("gradient residual {r:e}"))
                } else if (p.t - tn).abs() > tol.residual * (1.0 + p.t) {
                    Some(format!("t = {} but ‖x‖^(p−2) = {tn}", p.t))
                } else {
                    None
                }
            },
            pts.len(),
        ),
    ));
    out.push(CheckRecord::new("norm_monotonicity", prs::check_norm_monotonicity(pts, tol.monotonicity)));
    out.push(CheckRecord::new("second_smallest", prs::check_second_smallest(pts, tol.second_smallest)));
    out.push(CheckRecord::new("global_equal_norms", prs::check_global_equal_norms(pts, tol.global_norms)));

    let n = inst.dim();
    let probe: Vec<f64> = (0..n).map(|_| rng.random_range(-2.0..2.0)).collect();
    let grad = inst.gradient(&probe);
    let mut fd = Verdict::pass();
    for k in 0..n {
        let h = 1e-6 * (1.0 + probe[k].abs());
        let (mut a, mut b) = (probe.clone(), probe.clone());
        a[k] += h;
        b[k] -= h;
        let approx = (inst.objective(&a) - inst.objective(&b)) / (2.0 * h);
        if (approx - grad[k]).abs() > 1e-6 * (1.0 + grad[k].abs()) {
            fd = Verdict::fail(vec![k], format!("∂g/∂x_{k} = {} but central difference gives {approx}", grad[k]));
            break;
        }
    }
    out.push(CheckRecord::new("gradient_finite_difference", fd));

    let radius = 10.0 * (sol.global.norm() + 1.0);
    let mut coercive = Verdict::pass();
    for _ in 0..100 {
        let x = sphere_sample(rng, n, radius);
        let g = inst.objective(&x);
        if !(g > sol.global.objective) {
            coercive = Verdict::fail(vec![], format!("g = {g} at norm {radius} is not above the global value"));
            break;
        }
    }
    out.push(CheckRecord::new("coercivity", coercive));

    let u = random_orthogonal(rng, n)?;
    let rotated = prs::enumerate_critical(&inst.conjugated(&u)?, tol.classify)?;
    out.push(CheckRecord::new(
        "basis_invariance",
        same_pairs(
            pts.iter().map(|p| (p.t, p.objective)).collect(),
            rotated.iter().map(|p| (p.t, p.objective)).collect(),
            tol.basis,
        ),
    ));
    Ok(out)
}

pub fn cubic_pencil_checks(
    inst: &PrsInstance,
    sol: &PrsSolution,
    pen: &PencilSolution,
    tol: &Tolerances,
) -> Result<Vec<CheckRecord>> {
    let m2 = pencil::build_m2(inst)?;
    let mut out = Vec::new();
    let tg = sol.global.t;
    out.push(CheckRecord::new(
        "pencil_global",
        if close(pen.global, tg, tol.cross_path) {
            Verdict::pass()
        } else {
            Verdict::fail(vec![], format!("largest eigenvalue {} vs secular t* = {tg}", pen.global))
        },
    ));
    if let Some(l) = &sol.local_nonglobal {
        let v = match pen.local_nonglobal {
            Some(m) if close(m, l.t, tol.cross_path) => Verdict::pass(),
            other => Verdict::fail(vec![], format!("second largest eigenvalue {other:?} vs secular t = {}", l.t)),
        };
        out.push(CheckRecord::new("pencil_local_nonglobal", v));
        out.push(CheckRecord::new("nonsingular_at_smallest_pole", pencil::nonsingular_at_smallest_pole(&m2)?));
    }
    out.push(CheckRecord::new("m2_trichotomy", pencil::check_m2_trichotomy(inst, &pen.eigenvalues, tol.cross_path)?));
    let det = sol.points.iter().enumerate().fold(Verdict::pass(), |acc, (i, p)| {
        acc.and(match pencil::det_identity_check(&m2, &p.x, p.t, tol.det) {
            Verdict { passed: false, witness } => {
                Verdict::fail(vec![i], witness.map(|w| w.message).unwrap_or_default())
            }
            ok => ok,
        })
    });
    out.push(CheckRecord::new("det_identity", det));
    Ok(out)
}

fn ms(since: Instant) -> f64 {
    since.elapsed().as_secs_f64() * 1e3
}

/// Solves the instance on every available path and runs every check.
pub fn build_report<R: Rng>(file: &InstanceFile, tol: &Tolerances, rng: &mut R, with_timings: bool) -> Result<Report> {
    let instance = file.to_instance()?;
    let t0 = Instant::now();
    let (spectral, points, mut checks, pencil, solve_ms, pencil_ms, t_checks) = match &instance {
        Instance::Trs { unit, radius } => {
            let sol = trs::solve(unit, tol.classify)?;
            let solve_ms = ms(t0);
            let t1 = Instant::now();
            let pen = pencil::solve_trs_via_pencil(unit, tol.classify)?;
            let pencil_ms = ms(t1);
            let t2 = Instant::now();
            let mut checks = trs_checks(unit, &sol, tol, rng)?;
            checks.extend(trs_pencil_checks(unit, &sol, &pen, tol)?);
            let r2 = radius * radius;
            let points = sol
                .points
                .iter()
                .map(|p| PointRecord {
                    x: p.x.iter().map(|v| v * radius).collect(),
                    multiplier: p.lambda / r2,
                    objective: p.objective,
                    classification: p.classification,
                    continuum: p.continuum,
                    borderline: p.borderline,
                    residual: unit.stationarity_residual(&p.x, p.lambda),
                })
                .collect();
            let pen = PencilSolution {
                eigenvalues: pen.eigenvalues.iter().map(|v| v / r2).collect(),
                global: pen.global / r2,
                local_nonglobal: pen.local_nonglobal.map(|v| v / r2),
                largest_is_multiple: pen.largest_is_multiple,
            };
            let spectral = SpectralSummary {
                alphas: sol.spectral.alphas.iter().map(|a| a / r2).collect(),
                c_rot: sol.spectral.c_rot.iter().map(|c| c / radius).collect(),
            };
            (spectral, points, checks, Some(pen), solve_ms, pencil_ms, t2)
        }
        Instance::Prs(inst) => {
            let sol = prs::solve(inst, tol.classify)?;
            let solve_ms = ms(t0);
            let t1 = Instant::now();
            let pen = if inst.p() == 3.0 { Some(pencil::solve_cubic_via_pencil(inst, tol.classify)?) } else { None };
            let pencil_ms = ms(t1);
            let t2 = Instant::now();
            let mut checks = prs_checks(inst, &sol, tol, rng)?;
            if let Some(pen) = &pen {
                checks.extend(cubic_pencil_checks(inst, &sol, pen, tol)?);
            }
            let points = sol
                .points
                .iter()
                .map(|p| PointRecord {
                    x: p.x.clone(),
                    multiplier: p.t,
                    objective: p.objective,
                    classification: p.classification,
                    continuum: p.continuum,
                    borderline: p.borderline,
                    residual: inst.gradient_residual(&p.x),
                })
                .collect();
            let spectral = SpectralSummary { alphas: sol.spectral.alphas.clone(), c_rot: sol.spectral.c_rot.clone() };
            (spectral, points, checks, pen, solve_ms, pencil_ms, t2)
        }
    };
    checks.sort_by(|a, b| a.name.cmp(&b.name));
    let timings = with_timings.then(|| Timings { solve_ms, pencil_ms, checks_ms: ms(t_checks) });
    let passed = checks.iter().all(|c| c.passed);
    Ok(Report { instance: file.clone(), spectral, points, pencil, checks, passed, timings })
}

impl Report {
    /// Human-readable summary.
    pub fn to_text(&self) -> String {
        use std::fmt::Write;
        let mut s = String::new();
        let label = if self.instance.problem == super::instance::ProblemKind::Trs { "lambda" } else { "t" };
        let _ = writeln!(s, "eigenvalues of Q: {:?}", self.spectral.alphas);
        let _ = writeln!(s, "{} stationary points:", self.points.len());
        for p in &self.points {
            let _ = writeln!(
                s,
                "  {label} = {:<24} f = {:<24} {:?}{}{}  x = {:?}",
                p.multiplier,
                p.objective,
                p.classification,
                if p.continuum { " (continuum)" } else { "" },
                if p.borderline { " (borderline)" } else { "" },
                p.x
            );
        }
        if let Some(pen) = &self.pencil {
            let _ = writeln!(s, "pencil eigenvalues: {:?}", pen.eigenvalues);
        }
        for c in &self.checks {
            let _ = writeln!(s, "  [{}] {}", if c.passed { "pass" } else { "FAIL" }, c.name);
            if let Some(w) = &c.witness {
                let _ = writeln!(s, "        points {:?}: {}", w.indices, w.message);
            }
        }
        if let Some(t) = &self.timings {
            let _ =
                writeln!(s, "solve {:.3} ms, pencil {:.3} ms, checks {:.3} ms", t.solve_ms, t.pencil_ms, t.checks_ms);
        }
        let _ = writeln!(s, "{}", if self.passed { "all checks passed" } else { "some checks FAILED" });
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cli::generate::rng_from_seed;

    fn report(json: &str) -> Report {
        build_report(&InstanceFile::parse(json).unwrap(), &Tolerances::default(), &mut rng_from_seed(0), false).unwrap()
    }

    #[test]
    fn closed_form_trs_report() {
        let r = report(r#"{"problem":"trs","n":1,"Q":[[-1]],"c":[-0.75]}"#);
        assert!(r.passed, "{}", r.to_text());
        let got: Vec<(f64, f64)> = r.points.iter().map(|p| (p.multiplier, p.objective)).collect();
        for (g, w) in got.iter().zip([(0.0, 9.0 / 32.0), (0.25, 0.25), (1.75, -1.25)]) {
            assert!((g.0 - w.0).abs() < 1e-12 && (g.1 - w.1).abs() < 1e-12);
        }
    }

    #[test]
    fn continuum_global_pair() {
        let r = report(r#"{"problem":"trs","n":1,"Q":[[-1]],"c":[0]}"#);
        assert!(r.passed, "{}", r.to_text());
        let globals: Vec<_> = r.points.iter().filter(|p| p.classification == Classification::Global).collect();
        assert_eq!(globals.len(), 2);
        assert!(globals.iter().all(|p| p.continuum));
    }

    #[test]
    fn cubic_report_agrees_on_both_paths() {
        let r = report(r#"{"problem":"prs","n":1,"Q":[[-1]],"c":[-0.75],"sigma":1,"p":3}"#);
        assert!(r.passed, "{}", r.to_text());
        assert!((r.pencil.unwrap().global - 1.5).abs() < 1e-12);
        assert!((r.points[0].multiplier - 1.5).abs() < 1e-12);
    }

    #[test]
    fn radius_scaling_in_report() {
        // Q = −1/4, c = −3/8 on radius 2 is the unit instance Q = −1, c = −3/4
        let r = report(r#"{"problem":"trs","n":1,"Q":[[-0.25]],"c":[-0.375],"radius":2}"#);
        assert!(r.passed, "{}", r.to_text());
        let g = r.points.iter().find(|p| p.classification == Classification::Global).unwrap();
        assert!((g.x[0] - 2.0).abs() < 1e-12);
        assert!((g.multiplier - 1.75 / 4.0).abs() < 1e-12);
        assert!((g.objective + 1.25).abs() < 1e-12);
        // stationarity in original units: (Q + λ)x + c = 0
        assert!(((-0.25 + g.multiplier) * g.x[0] - 0.375).abs() < 1e-12);
    }
}
