//! Randomized property suite behind `verify`.

use std::collections::BTreeMap;
use std::path::PathBuf;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::generate::{self, rng_from_seed};
use super::instance::InstanceFile;
use super::report::{self, CheckRecord, Tolerances};
use crate::error::{Error, Result};
use crate::pencil;
use crate::prs;
use crate::trs;
use crate::verdict::{Classification, Verdict};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum SuiteProblem {
    /// Trust-region instances.
    Trs,
    /// Regularized instances with p cycling through 2.5, 3 and 4.
    Prs,
    /// Regularized instances with p = 3 only.
    Cubic,
}

impl SuiteProblem {
    fn tag(self) -> u64 {
        match self {
            SuiteProblem::Trs => 1,
            SuiteProblem::Prs => 2,
            SuiteProblem::Cubic => 3,
        }
    }

    fn name(self) -> &'static str {
        match self {
            SuiteProblem::Trs => "trs",
            SuiteProblem::Prs => "prs",
            SuiteProblem::Cubic => "cubic",
        }
    }
}

pub const PRS_EXPONENTS: [f64; 3] = [2.5, 3.0, 4.0];

#[derive(Debug, Clone)]
pub struct SuiteConfig {
    pub trials: usize,
    pub nmax: usize,
    pub seed: u64,
    pub problems: Vec<SuiteProblem>,
    pub tol: Tolerances,
    /// Every this many trials (starting with trial 0) is a targeted
    /// instance with a local nonglobal minimizer.
    pub targeted_every: usize,
    pub self_test_fault: bool,
    pub artifacts: Option<PathBuf>,
    pub jobs: Option<usize>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            trials: 100,
            nmax: 8,
            seed: 0,
            problems: vec![SuiteProblem::Trs, SuiteProblem::Prs],
            tol: Tolerances::default(),
            targeted_every: 10,
            self_test_fault: false,
            artifacts: None,
            jobs: None,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TrialOutcome {
    pub index: usize,
    pub problem: SuiteProblem,
    pub targeted: bool,
    pub has_local_nonglobal: bool,
    pub instance: Option<InstanceFile>,
    pub checks: Vec<CheckRecord>,
    #[serde(skip)]
    fault_probe: Option<CheckRecord>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct CheckCount {
    pub passed: usize,
    pub failed: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct Failure {
    pub trial: usize,
    pub problem: SuiteProblem,
    pub check: CheckRecord,
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteSummary {
    pub trials: usize,
    /// Trials per problem kind.
    pub instances: BTreeMap<String, usize>,
    pub targeted: BTreeMap<String, usize>,
    pub with_local_nonglobal: BTreeMap<String, usize>,
    /// Keyed `problem/check`.
    pub counts: BTreeMap<String, CheckCount>,
    pub failures: Vec<Failure>,
    pub passed: bool,
}

fn trial_rng(seed: u64, problem: SuiteProblem, index: usize) -> ChaCha8Rng {
    let mix = seed
        .wrapping_mul(0x9E37_79B9_7F4A_7C15)
        .wrapping_add((index as u64).wrapping_mul(0xBF58_476D_1CE4_E5B9))
        .wrapping_add(problem.tag().wrapping_mul(0x94D0_49BB_1331_11EB));
    rng_from_seed(mix)
}

fn with_global_flipped<P: Clone>(
    points: &[P],
    class: impl Fn(&P) -> Classification,
    obj: impl Fn(&mut P) -> &mut f64,
) -> Vec<P> {
    let mut out = points.to_vec();
    if let Some(p) = out.iter_mut().find(|p| class(p) == Classification::Global) {
        let f = obj(p);
        *f = -*f;
    }
    out
}

type TrialResult = Result<(Vec<CheckRecord>, Option<CheckRecord>, bool)>;

/// `generated` receives the instance as soon as it exists, so a later
/// numerical failure still leaves it for the artifact.
fn run_trs_trial(
    cfg: &SuiteConfig,
    rng: &mut ChaCha8Rng,
    targeted: bool,
    generated: &mut Option<InstanceFile>,
) -> TrialResult {
    let inst = if targeted {
        let n = rng.random_range(2..=cfg.nmax);
        generate::targeted_trs(rng, n, cfg.tol.classify)?.0
    } else {
        let n = rng.random_range(1..=cfg.nmax);
        generate::random_trs(rng, n)?
    };
    *generated = Some(InstanceFile::from_trs(&inst));
    let sol = trs::solve(&inst, cfg.tol.classify)?;
    let pen = pencil::solve_trs_via_pencil(&inst, cfg.tol.classify)?;
    let mut checks = report::trs_checks(&inst, &sol, &cfg.tol, rng)?;
    checks.extend(report::trs_pencil_checks(&inst, &sol, &pen, &cfg.tol)?);
    let fault = cfg.self_test_fault.then(|| {
        let flipped = with_global_flipped(&sol.points, |p| p.classification, |p| &mut p.objective);
        CheckRecord::new("multiplier_monotonicity", trs::check_multiplier_monotonicity(&flipped, cfg.tol.monotonicity))
    });
    Ok((checks, fault, sol.local_nonglobal.is_some()))
}

fn run_prs_trial(
    cfg: &SuiteConfig,
    rng: &mut ChaCha8Rng,
    targeted: bool,
    p: f64,
    generated: &mut Option<InstanceFile>,
) -> TrialResult {
    let sigma = rng.random_range(0.5..=2.0);
    let inst = if targeted {
        let n = rng.random_range(2..=cfg.nmax);
        generate::targeted_prs(rng, n, sigma, p, cfg.tol.classify)?.0
    } else {
        let n = rng.random_range(1..=cfg.nmax);
        generate::random_prs(rng, n, sigma, p)?
    };
    *generated = Some(InstanceFile::from_prs(&inst));
    let sol = prs::solve(&inst, cfg.tol.classify)?;
    let mut checks = report::prs_checks(&inst, &sol, &cfg.tol, rng)?;
    if p == 3.0 {
        let pen = pencil::solve_cubic_via_pencil(&inst, cfg.tol.classify)?;
        checks.extend(report::cubic_pencil_checks(&inst, &sol, &pen, &cfg.tol)?);
    }
    let fault = cfg.self_test_fault.then(|| {
        let flipped = with_global_flipped(&sol.points, |p| p.classification, |p| &mut p.objective);
        CheckRecord::new("norm_monotonicity", prs::check_norm_monotonicity(&flipped, cfg.tol.monotonicity))
    });
    Ok((checks, fault, sol.local_nonglobal.is_some()))
}

pub fn run_trial(cfg: &SuiteConfig, problem: SuiteProblem, index: usize) -> TrialOutcome {
    let mut rng = trial_rng(cfg.seed, problem, index);
    let targeted = cfg.nmax >= 2 && cfg.targeted_every > 0 && index.is_multiple_of(cfg.targeted_every);
    let mut instance = None;
    let result = match problem {
        SuiteProblem::Trs => run_trs_trial(cfg, &mut rng, targeted, &mut instance),
        SuiteProblem::Prs => {
            run_prs_trial(cfg, &mut rng, targeted, PRS_EXPONENTS[index % PRS_EXPONENTS.len()], &mut instance)
        }
        SuiteProblem::Cubic => run_prs_trial(cfg, &mut rng, targeted, 3.0, &mut instance),
    };
    match result {
        Ok((mut checks, fault_probe, has_lng)) => {
            checks.sort_by(|a, b| a.name.cmp(&b.name));
            TrialOutcome { index, problem, targeted, has_local_nonglobal: has_lng, instance, checks, fault_probe }
        }
        Err(e) => TrialOutcome {
            index,
            problem,
            targeted,
            has_local_nonglobal: false,
            instance,
            checks: vec![CheckRecord::new("solver", Verdict::fail(vec![], e.to_string()))],
            fault_probe: None,
        },
    }
}

/// Runs every trial, in parallel when allowed, and tallies the results in
/// trial order.
pub fn run_suite(cfg: &SuiteConfig) -> Result<(SuiteSummary, Vec<TrialOutcome>)> {
    if cfg.trials == 0 {
        return Err(Error::InvalidInput("trials must be at least 1".into()));
    }
    if cfg.nmax == 0 {
        return Err(Error::InvalidInput("nmax must be at least 1".into()));
    }
    let jobs: Vec<(SuiteProblem, usize)> =
        cfg.problems.iter().flat_map(|&p| (0..cfg.trials).map(move |i| (p, i))).collect();
    let run = || jobs.par_iter().map(|&(p, i)| run_trial(cfg, p, i)).collect::<Vec<_>>();
    let mut outcomes = match cfg.jobs {
        Some(j) => rayon::ThreadPoolBuilder::new()
            .num_threads(j)
            .build()
            .map_err(|e| Error::InvalidInput(format!("thread pool: {e}")))?
            .install(run),
        None => run(),
    };

    if cfg.self_test_fault {
        let first = outcomes.iter().position(|o| o.fault_probe.as_ref().is_some_and(|f| !f.passed));
        if let Some(k) = first {
            let probe = outcomes[k].fault_probe.clone().expect("probe present");
            if let Some(slot) = outcomes[k].checks.iter_mut().find(|c| c.name == probe.name) {
                *slot = probe;
            }
        }
    }

    let mut summary = SuiteSummary {
        trials: cfg.trials,
        instances: BTreeMap::new(),
        targeted: BTreeMap::new(),
        with_local_nonglobal: BTreeMap::new(),
        counts: BTreeMap::new(),
        failures: Vec::new(),
        passed: true,
    };
    for o in &outcomes {
        let name = o.problem.name().to_string();
        *summary.instances.entry(name.clone()).or_default() += 1;
        *summary.targeted.entry(name.clone()).or_default() += o.targeted as usize;
        *summary.with_local_nonglobal.entry(name.clone()).or_default() += o.has_local_nonglobal as usize;
        for c in &o.checks {
            let count = summary.counts.entry(format!("{name}/{}", c.name)).or_default();
            if c.passed {
                count.passed += 1;
            } else {
                count.failed += 1;
                summary.failures.push(Failure { trial: o.index, problem: o.problem, check: c.clone() });
            }
        }
    }
    summary.passed = summary.failures.is_empty();

    if let Some(dir) = &cfg.artifacts {
        write_artifacts(dir, &outcomes)?;
    }
    Ok((summary, outcomes))
}

fn write_artifacts(dir: &PathBuf, outcomes: &[TrialOutcome]) -> Result<()> {
    for o in outcomes.iter().filter(|o| o.checks.iter().any(|c| !c.passed)) {
        std::fs::create_dir_all(dir)?;
        let failed: Vec<&CheckRecord> = o.checks.iter().filter(|c| !c.passed).collect();
        let body = serde_json::json!({
            "trial": o.index,
            "problem": o.problem,
            "instance": o.instance,
            "failed_checks": failed,
        });
        let path = dir.join(format!("trial-{}-{:05}.json", o.problem.name(), o.index));
        std::fs::write(path, serde_json::to_string_pretty(&body).expect("artifact serializes"))?;
    }
    Ok(())
}

impl SuiteSummary {
    pub fn to_text(&self) -> String {
        use std::fmt::Write;
        let mut s = String::new();
        for (k, v) in &self.instances {
            let _ = writeln!(
                s,
                "{k}: {v} instances, {} targeted, {} with a local nonglobal minimizer",
                self.targeted.get(k).unwrap_or(&0),
                self.with_local_nonglobal.get(k).unwrap_or(&0)
            );
        }
        for (k, c) in &self.counts {
            let _ = writeln!(s, "  {k:<40} passed {:>6}  failed {:>6}", c.passed, c.failed);
        }
        for f in &self.failures {
            let msg = f.check.witness.as_ref().map(|w| w.message.as_str()).unwrap_or("");
            let _ = writeln!(s, "FAIL {} trial {} {}: {msg}", f.problem.name(), f.trial, f.check.name);
        }
        let _ = writeln!(s, "{}", if self.passed { "all checks passed" } else { "some checks FAILED" });
        s
    }
}
