//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
//! fails if any criterion fails.

use std::time::{Duration, Instant};

use rand::Rng;
use subprob::cli::generate::{random_prs, random_trs, rng_from_seed, targeted_prs, targeted_trs};
use subprob::cli::instance::Instance;
use subprob::cli::oracle::{prs_oracle, trs_oracle, OracleConfig};
use subprob::cli::sextic::sextic_demo;
use subprob::cli::suite::{run_suite, SuiteConfig, SuiteProblem, SuiteSummary, TrialOutcome};
use subprob::linalg::Matrix;
use subprob::prs::PrsInstance;
use subprob::secular::{h_eval, p_eval, phi_eval, SecularSpec};
use subprob::trs::{self, TrsInstance};
use subprob::verdict::Classification;

const SEED: u64 = 20_240_601;
const CLOSED_FORM_TOL: f64 = 1e-10;
const CLOSED_FORM_BUDGET: Duration = Duration::from_secs(1);
const TRS_BUDGET: Duration = Duration::from_secs(60);
const PRS_BUDGET: Duration = Duration::from_secs(120);
const TARGETED_TRS_MIN: usize = 50;
const TARGETED_CUBIC_MIN: usize = 25;
const ORDER_MARGIN: f64 = 1e-9;
const FD_REL_TOL: f64 = 1e-6;
const FD_POINTS: usize = 100;
const FD_SPECS: usize = 20;
const POLE_CLEARANCE: f64 = 0.05;

struct Line {
    name: &'static str,
    passed: bool,
    detail: String,
}

fn line(name: &'static str, passed: bool, detail: String) -> Line {
    Line { name, passed, detail }
}

fn suite(problem: SuiteProblem, trials: usize) -> (SuiteSummary, Vec<TrialOutcome>, Duration) {
    let cfg = SuiteConfig { trials, nmax: 8, seed: SEED, problems: vec![problem], ..Default::default() };
    let start = Instant::now();
    let (summary, outcomes) = run_suite(&cfg).expect("suite runs");
    (summary, outcomes, start.elapsed())
}

/// Failures of the named checks, and how many times they ran.
fn tally(s: &SuiteSummary, prefix: &str, checks: &[&str]) -> (usize, usize) {
    checks.iter().fold((0, 0), |(run, failed), c| {
        let k = s.counts.get(&format!("{prefix}/{c}")).cloned().unwrap_or_default();
        (run + k.passed + k.failed, failed + k.failed)
    })
}

fn solver_failures(s: &SuiteSummary) -> usize {
    s.failures.iter().filter(|f| f.check.name == "solver").count()
}

fn closed_form() -> Line {
    let start = Instant::now();
    let inst = TrsInstance::new(Matrix::from_diag(&[-1.0]), vec![-0.75]).unwrap();
    let sol = trs::solve(&inst, 1e-9).unwrap();
    let elapsed = start.elapsed();
    let expected = [(0.0, 9.0 / 32.0), (0.25, 0.25), (1.75, -1.25)];
    let got: Vec<(f64, f64)> = sol.points.iter().map(|p| (p.lambda, p.objective)).collect();
    let values_ok = got.len() == 3
        && got
            .iter()
            .zip(&expected)
            .all(|(g, e)| (g.0 - e.0).abs() <= CLOSED_FORM_TOL && (g.1 - e.1).abs() <= CLOSED_FORM_TOL);
    let global_ok = (sol.global.lambda - 1.75).abs() <= CLOSED_FORM_TOL;
    // grid over the feasible interval
    let grid_min = (0..=200_000).map(|k| inst.objective(&[-1.0 + k as f64 * 1e-5])).fold(f64::INFINITY, f64::min);
    let grid_ok = (grid_min - sol.global.objective).abs() <= CLOSED_FORM_TOL && sol.global.objective <= grid_min;
    line(
        "closed-form trust-region instance",
        values_ok && global_ok && grid_ok && elapsed < CLOSED_FORM_BUDGET,
        format!("points {got:?}, grid min {grid_min}, {elapsed:?}"),
    )
}

fn trs_monotonicity(s: &SuiteSummary, t: Duration) -> Line {
    let (run, failed) = tally(s, "trs", &["multiplier_monotonicity"]);
    let solver = solver_failures(s);
    line(
        "multiplier/objective monotonicity, 1000 trust-region instances",
        run == 1000 && failed == 0 && solver == 0 && t < TRS_BUDGET,
        format!("{run} instances, {failed} failures, {solver} solver errors, {t:?}"),
    )
}

fn second_smallest(outcomes: &[TrialOutcome]) -> Line {
    let mut checked = 0;
    let mut bad = Vec::new();
    for o in outcomes.iter().filter(|o| o.targeted) {
        let Ok(Instance::Trs { unit, .. }) = o.instance.as_ref().unwrap().to_instance() else {
            bad.push(o.index);
            continue;
        };
        let sol = trs::solve(&unit, 1e-9).unwrap();
        let Some(l) = &sol.local_nonglobal else {
            bad.push(o.index);
            continue;
        };
        checked += 1;
        let others = sol
            .points
            .iter()
            .filter(|p| p.classification == Classification::NotLocalMin)
            .map(|p| p.objective)
            .fold(f64::INFINITY, f64::min);
        if !(l.objective - sol.global.objective > ORDER_MARGIN && others - l.objective > ORDER_MARGIN) {
            bad.push(o.index);
        }
    }
    line(
        "local nonglobal has the second smallest value",
        checked >= TARGETED_TRS_MIN && bad.is_empty(),
        format!("{checked} targeted instances, failing trials {bad:?}"),
    )
}

fn pencil_cross_path(trs: &SuiteSummary, prs: &SuiteSummary) -> Line {
    let checks = ["pencil_global", "pencil_local_nonglobal", "nonsingular_at_smallest_pole"];
    let (r1, f1) = tally(trs, "trs", &checks);
    let (r2, f2) = tally(prs, "prs", &checks);
    let lng = tally(trs, "trs", &["pencil_local_nonglobal"]).0;
    line(
        "largest and second largest pencil eigenvalues match the multipliers",
        f1 + f2 == 0 && lng > 0,
        format!("{} comparisons ({lng} local nonglobal), {} failures", r1 + r2, f1 + f2),
    )
}

fn equal_norm(trs: &SuiteSummary) -> Line {
    let (run, failed) = tally(trs, "trs", &["equal_norm_identity"]);
    line(
        "equal-norm identity at boundary pairs",
        run == 1000 && failed == 0,
        format!("{run} instances, {failed} failures"),
    )
}

fn det_identities(all: &[(&SuiteSummary, &str)]) -> Line {
    let (run, failed) = all.iter().fold((0, 0), |(r, f), (s, p)| {
        let (a, b) = tally(s, p, &["det_identity"]);
        (r + a, f + b)
    });
    line(
        "determinant identities at every stationary point",
        run > 0 && failed == 0,
        format!("{run} instances, {failed} failures"),
    )
}

fn prs_suite(s: &SuiteSummary, t: Duration) -> Line {
    let checks = ["stationarity", "norm_monotonicity", "second_smallest", "global_equal_norms"];
    let (run, failed) = tally(s, "prs", &checks);
    let solver = solver_failures(s);
    let lng = s.with_local_nonglobal.get("prs").copied().unwrap_or(0);
    line(
        "regularized suite over p in {2.5, 3, 4}, 1000 instances",
        s.instances.get("prs") == Some(&1000) && failed == 0 && solver == 0 && lng > 0 && t < PRS_BUDGET,
        format!("{run} checks, {failed} failures, {solver} solver errors, {lng} with local nonglobal, {t:?}"),
    )
}

fn cubic_pencil(s: &SuiteSummary, outcomes: &[TrialOutcome]) -> Line {
    let (run, failed) = tally(s, "cubic", &["pencil_global", "pencil_local_nonglobal", "m2_trichotomy"]);
    let solver = solver_failures(s);
    let targeted_lng = outcomes.iter().filter(|o| o.targeted && o.has_local_nonglobal).count();
    line(
        "cubic pencil matches the secular solution, 500 instances",
        s.instances.get("cubic") == Some(&500) && targeted_lng >= TARGETED_CUBIC_MIN && failed == 0 && solver == 0,
        format!("{run} comparisons, {targeted_lng} targeted with local nonglobal, {failed} failures"),
    )
}

fn sextic() -> Line {
    let d = sextic_demo();
    line("sextic critical values", d.passed, format!("ordering {}", d.ordering.join(" < ")))
}

fn fd_close(approx: f64, exact: f64) -> bool {
    (approx - exact).abs() <= FD_REL_TOL * exact.abs().max(1.0)
}

/// Central difference with step `1e-4 * scale`, where `scale` is the
/// distance over which `f` varies (e.g. the distance to the nearest pole).
fn central(f: impl Fn(f64) -> f64, x: f64, scale: f64) -> f64 {
    let h = 1e-4 * scale;
    (f(x + h) - f(x - h)) / (2.0 * h)
}

/// A point at least `POLE_CLEARANCE` away from every pole, with its
/// distance to the nearest one.
fn pole_free<R: Rng>(rng: &mut R, poles: &[f64], lo: f64, hi: f64) -> (f64, f64) {
    loop {
        let x = rng.random_range(lo..hi);
        let d = poles.iter().map(|p| (x - p).abs()).fold(f64::INFINITY, f64::min);
        if d >= POLE_CLEARANCE {
            return (x, d.min(1.0 + x.abs()));
        }
    }
}

fn derivative_oracles() -> Line {
    let mut rng = rng_from_seed(SEED ^ 0xD1FF);
    let mut failures = Vec::new();
    let mut evaluated = 0;
    for k in 0..FD_SPECS {
        let n = rng.random_range(1..=6);
        let alphas: Vec<f64> = {
            let mut a: Vec<f64> = (0..n).map(|_| rng.random_range(-3.0..3.0)).collect();
            a.sort_by(f64::total_cmp);
            a
        };
        let csq: Vec<f64> = (0..n).map(|_| rng.random_range(0.01..2.0)).collect();
        let sigma = rng.random_range(0.5..2.0);
        let p = [2.5, 3.0, 4.0][k % 3];

        let trs_spec = SecularSpec::trs(alphas.clone(), csq.clone()).unwrap();
        let poles: Vec<f64> = alphas.iter().map(|a| -a).collect();
        for _ in 0..FD_POINTS {
            let (l, scale) = pole_free(&mut rng, &poles, -5.0, 5.0);
            let e = phi_eval(&trs_spec, l).unwrap();
            let d1 = central(|x| phi_eval(&trs_spec, x).unwrap().value, l, scale);
            let d2 = central(|x| phi_eval(&trs_spec, x).unwrap().d1, l, scale);
            evaluated += 2;
            if !fd_close(d1, e.d1) {
                failures.push(format!("phi' at {l}: {} vs {d1}", e.d1));
            }
            if !fd_close(d2, e.d2) {
                failures.push(format!("phi'' at {l}: {} vs {d2}", e.d2));
            }
        }

        let prs_spec = SecularSpec::prs(alphas.clone(), csq.clone(), sigma, p).unwrap();
        let t_poles: Vec<f64> = alphas.iter().map(|a| -a / sigma).collect();
        for _ in 0..FD_POINTS {
            let (t, scale) = pole_free(&mut rng, &t_poles, 0.1, 6.0);
            let scale = scale.min(t);
            let h = h_eval(&prs_spec, t).unwrap();
            let dh = central(|x| h_eval(&prs_spec, x).unwrap().value, t, scale);
            let lp = p_eval(&prs_spec, t).unwrap();
            let dp = central(|x| p_eval(&prs_spec, x).unwrap().value, t, scale);
            evaluated += 2;
            if !fd_close(dh, h.d1) {
                failures.push(format!("h' at {t}: {} vs {dh}", h.d1));
            }
            if !fd_close(dp, lp.d1) {
                failures.push(format!("p' at {t}: {} vs {dp}", lp.d1));
            }
        }

        let inst = random_prs(&mut rng, n, sigma, p).unwrap();
        for _ in 0..FD_POINTS {
            let x: Vec<f64> = (0..n).map(|_| rng.random_range(-2.0..2.0)).collect();
            let g = inst.gradient(&x);
            for i in 0..n {
                let approx = central(
                    |v| {
                        let mut y = x.clone();
                        y[i] = v;
                        inst.objective(&y)
                    },
                    x[i],
                    1.0 + x[i].abs(),
                );
                evaluated += 1;
                if !fd_close(approx, g[i]) {
                    failures.push(format!("dg/dx{i} at {x:?}: {} vs {approx}", g[i]));
                }
            }
        }
    }
    line(
        "derivatives match central differences",
        failures.is_empty(),
        format!(
            "{evaluated} comparisons, {} failures {:?}",
            failures.len(),
            failures.iter().take(3).collect::<Vec<_>>()
        ),
    )
}

fn sampling_oracle() -> Line {
    let cfg = OracleConfig::default();
    let mut rng = rng_from_seed(SEED ^ 0x0AC1E);
    let mut results = Vec::new();
    let trs_cases = [
        ("trs closed form", TrsInstance::new(Matrix::from_diag(&[-1.0]), vec![-0.75]).unwrap()),
        ("trs random n=3", random_trs(&mut rng, 3).unwrap()),
        ("trs targeted n=2", targeted_trs(&mut rng, 2, 1e-9).unwrap().0),
        ("trs targeted n=4", targeted_trs(&mut rng, 4, 1e-9).unwrap().0),
    ];
    for (name, inst) in &trs_cases {
        let r = trs_oracle(inst, &mut rng, &cfg).unwrap();
        results.push((*name, r.passed, r.local_nonglobal.is_some()));
    }
    let prs_cases: [(&str, PrsInstance); 4] = [
        ("cubic closed form", PrsInstance::new(Matrix::from_diag(&[-1.0]), vec![-0.75], 1.0, 3.0).unwrap()),
        ("p=2.5 random n=3", random_prs(&mut rng, 3, 1.0, 2.5).unwrap()),
        ("cubic targeted n=2", targeted_prs(&mut rng, 2, 1.0, 3.0, 1e-9).unwrap().0),
        ("p=4 targeted n=3", targeted_prs(&mut rng, 3, 0.8, 4.0, 1e-9).unwrap().0),
    ];
    for (name, inst) in &prs_cases {
        let r = prs_oracle(inst, &mut rng, &cfg).unwrap();
        results.push((*name, r.passed, r.local_nonglobal.is_some()));
    }
    let probed = results.iter().filter(|r| r.2).count();
    let failed: Vec<&str> = results.iter().filter(|r| !r.1).map(|r| r.0).collect();
    line(
        "sampling oracle agrees with the classification",
        failed.is_empty() && probed >= 4,
        format!("{} instances ({probed} with probes), failing {failed:?}", results.len()),
    )
}

#[test]
fn acceptance() {
    let mut lines = vec![closed_form()];
    let (trs_s, trs_o, trs_t) = suite(SuiteProblem::Trs, 1000);
    let (prs_s, _, prs_t) = suite(SuiteProblem::Prs, 1000);
    let (cubic_s, cubic_o, _) = suite(SuiteProblem::Cubic, 500);
    lines.push(trs_monotonicity(&trs_s, trs_t));
    lines.push(second_smallest(&trs_o));
    lines.push(pencil_cross_path(&trs_s, &prs_s));
    lines.push(equal_norm(&trs_s));
    lines.push(det_identities(&[(&trs_s, "trs"), (&prs_s, "prs"), (&cubic_s, "cubic")]));
    lines.push(prs_suite(&prs_s, prs_t));
    lines.push(cubic_pencil(&cubic_s, &cubic_o));
    lines.push(sextic());
    lines.push(derivative_oracles());
    lines.push(sampling_oracle());

    for (i, l) in lines.iter().enumerate() {
        println!("[{}] {:>2}. {}: {}", if l.passed { "PASS" } else { "FAIL" }, i + 1, l.name, l.detail);
    }
    let failed: Vec<usize> = lines.iter().enumerate().filter(|(_, l)| !l.passed).map(|(i, _)| i + 1).collect();
    assert!(failed.is_empty(), "criteria failed: {failed:?}");
}
