//! Command-line front end: instance files, generators, reports, the
//! randomized property suite, the sampling oracle and the sextic demo.

pub mod generate;
pub mod instance;
pub mod oracle;
pub mod report;
pub mod sextic;
pub mod suite;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::pencil;
use generate::rng_from_seed;
use instance::{Instance, InstanceFile, ProblemKind};
use oracle::OracleConfig;
use report::Tolerances;
use suite::{SuiteConfig, SuiteProblem};

#[derive(Debug, Parser)]
#[command(
    name = "subprob",
    version,
    about = "Enumerate and classify stationary points of trust-region and p-regularized subproblems"
)]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Root tolerance and classification margin.
    #[arg(long, global = true, env = "SOLVER_TOL", default_value_t = 1e-9)]
    pub tol: f64,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    pub json: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GenKind {
    Random,
    TargetedLng,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve an instance on every path and run all checks.
    Solve {
        instance: PathBuf,
        /// Include wall-clock timings (makes output nondeterministic).
        #[arg(long)]
        timings: bool,
    },
    /// Generate an instance file.
    Gen {
        #[arg(long, value_enum, default_value_t = GenKind::Random)]
        kind: GenKind,
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value_t = ProblemArg::Trs)]
        problem: ProblemArg,
        #[arg(long, default_value_t = 1.0)]
        sigma: f64,
        #[arg(long, default_value_t = 3.0)]
        p: f64,
    },
    /// Run the randomized property suite.
    Verify {
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 8)]
        nmax: usize,
        /// Problem families to test (repeatable).
        #[arg(long = "problem", value_enum)]
        problems: Vec<SuiteProblem>,
        /// Directory for failing instances and their witnesses.
        #[arg(long, default_value = "verify-failures")]
        artifacts: PathBuf,
        /// Corrupt one objective value to confirm the suite notices.
        #[arg(long)]
        self_test_fault: bool,
        /// Worker threads.
        #[arg(long, env = "SOLVER_JOBS")]
        jobs: Option<usize>,
    },
    /// Real generalized eigenvalues of the instance's pencil.
    Pencil { instance: PathBuf },
    /// Check the solution against random sampling.
    Oracle {
        instance: PathBuf,
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
        #[arg(long, default_value_t = 1000)]
        probes: usize,
        /// Offer the worst stationary point as the global one.
        #[arg(long)]
        fault: bool,
    },
    /// Critical values of the sextic counterexample.
    DemoSextic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ProblemArg {
    Trs,
    Prs,
}

/// What a command produced: text for humans, JSON for tools, and whether
/// every check passed.
pub struct Outcome {
    pub text: String,
    pub json: String,
    pub passed: bool,
}

fn outcome<T: Serialize>(value: &T, text: String, passed: bool) -> Outcome {
    Outcome { text, json: serde_json::to_string_pretty(value).expect("output serializes") + "\n", passed }
}

#[derive(Serialize)]
struct PencilOutput {
    problem: ProblemKind,
    eigenvalues: Vec<f64>,
    largest: f64,
    second_largest: Option<f64>,
    largest_is_multiple: bool,
}

pub fn execute(cli: &Cli) -> Result<Outcome> {
    let c = &cli.common;
    if !(c.tol > 0.0) {
        return Err(Error::InvalidInput(format!("--tol must be positive, got {}", c.tol)));
    }
    let tol = Tolerances::with_classify(c.tol);
    let mut rng = rng_from_seed(c.seed);
    match &cli.command {
        Command::Solve { instance, timings } => {
            let file = InstanceFile::read(instance)?;
            let r = report::build_report(&file, &tol, &mut rng, *timings)?;
            Ok(outcome(&r, r.to_text(), r.passed))
        }
        Command::Gen { kind, n, problem, sigma, p } => {
            let file = match (kind, problem) {
                (GenKind::Random, ProblemArg::Trs) => InstanceFile::from_trs(&generate::random_trs(&mut rng, *n)?),
                (GenKind::Random, ProblemArg::Prs) => {
                    InstanceFile::from_prs(&generate::random_prs(&mut rng, *n, *sigma, *p)?)
                }
                (GenKind::TargetedLng, ProblemArg::Trs) => {
                    InstanceFile::from_trs(&generate::targeted_trs(&mut rng, *n, c.tol)?.0)
                }
                (GenKind::TargetedLng, ProblemArg::Prs) => {
                    InstanceFile::from_prs(&generate::targeted_prs(&mut rng, *n, *sigma, *p, c.tol)?.0)
                }
            };
            let json = file.to_json() + "\n";
            Ok(Outcome { text: json.clone(), json, passed: true })
        }
        Command::Verify { trials, nmax, problems, artifacts, self_test_fault, jobs } => {
            let cfg = SuiteConfig {
                trials: *trials,
                nmax: *nmax,
                seed: c.seed,
                problems: if problems.is_empty() {
                    vec![SuiteProblem::Trs, SuiteProblem::Prs, SuiteProblem::Cubic]
                } else {
                    problems.clone()
                },
                tol,
                self_test_fault: *self_test_fault,
                artifacts: Some(artifacts.clone()),
                jobs: *jobs,
                ..Default::default()
            };
            let (summary, _) = suite::run_suite(&cfg)?;
            Ok(outcome(&summary, summary.to_text(), summary.passed))
        }
        Command::Pencil { instance } => {
            let file = InstanceFile::read(instance)?;
            let (problem, sol) = match file.to_instance()? {
                Instance::Trs { unit, radius } => {
                    let r2 = radius * radius;
                    let s = pencil::solve_trs_via_pencil(&unit, c.tol)?;
                    let s = pencil::PencilSolution {
                        eigenvalues: s.eigenvalues.iter().map(|v| v / r2).collect(),
                        global: s.global / r2,
                        local_nonglobal: s.local_nonglobal.map(|v| v / r2),
                        largest_is_multiple: s.largest_is_multiple,
                    };
                    (ProblemKind::Trs, s)
                }
                Instance::Prs(p) => (ProblemKind::Prs, pencil::solve_cubic_via_pencil(&p, c.tol)?),
            };
            let out = PencilOutput {
                problem,
                eigenvalues: sol.eigenvalues.clone(),
                largest: sol.global,
                second_largest: sol.local_nonglobal,
                largest_is_multiple: sol.largest_is_multiple,
            };
            let text = format!(
                "real generalized eigenvalues: {:?}\nlargest: {}{}\nsecond largest (local nonglobal): {}\n",
                out.eigenvalues,
                out.largest,
                if out.largest_is_multiple { " (multiple)" } else { "" },
                out.second_largest.map_or("none".to_string(), |v| v.to_string())
            );
            Ok(outcome(&out, text, true))
        }
        Command::Oracle { instance, samples, probes, fault } => {
            let inst = InstanceFile::read(instance)?.to_instance()?;
            let cfg = OracleConfig { samples: *samples, probes: *probes, mislabel: *fault, ..Default::default() };
            let r = oracle::run_oracle(&inst, &mut rng, &cfg)?;
            let mut text = format!(
                "global: claimed f = {} at {:?}; best of {} samples f = {} [{}]\n",
                r.global.claimed_objective,
                r.global.claimed,
                samples,
                r.global.best_objective,
                if r.global.passed { "pass" } else { "FAIL" }
            );
            if !r.global.passed {
                text.push_str(&format!("  better sample: {:?}\n", r.global.best_sample));
            }
            if let Some(l) = &r.local_nonglobal {
                text.push_str(&format!(
                    "local nonglobal: f = {}; best of {} probes f = {} [{}]\n",
                    l.claimed_objective,
                    probes,
                    l.best_objective,
                    if l.passed { "pass" } else { "FAIL" }
                ));
            }
            Ok(outcome(&r, text, r.passed))
        }
        Command::DemoSextic => {
            let d = sextic::sextic_demo();
            Ok(outcome(&d, d.to_text(), d.passed))
        }
    }
}

#[derive(Serialize)]
struct ErrorRecord<'a> {
    error: ErrorBody<'a>,
}

#[derive(Serialize)]
struct ErrorBody<'a> {
    kind: &'a str,
    message: String,
}

pub fn error_json(e: &Error) -> String {
    let kind = match e {
        Error::InvalidInput(_) => "invalid_input",
        Error::NoConvergence { .. } => "no_convergence",
        Error::Singular { .. } => "singular",
        Error::Pole { .. } => "pole",
        Error::Domain(_) => "domain",
        Error::Convexity { .. } => "convexity",
        Error::Divergence { .. } => "divergence",
        Error::Contradiction(_) => "contradiction",
        Error::UnsupportedExponent(_) => "unsupported_exponent",
        Error::Parse { .. } => "parse",
        Error::Generation { .. } => "generation",
        Error::Io(_) => "io",
    };
    serde_json::to_string(&ErrorRecord { error: ErrorBody { kind, message: e.to_string() } }).expect("error serializes")
}
