//! Sampling oracle: an independent check of global and local optimality
//! that only evaluates the objective.

use rand::Rng;
use serde::Serialize;

use super::generate::{ball_sample, sphere_sample};
use super::instance::Instance;
use crate::error::Result;
use crate::linalg;
use crate::prs::{self, PrsInstance};
use crate::trs::{self, TrsInstance};
use crate::verdict::Classification;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OracleConfig {
    pub samples: usize,
    pub probes: usize,
    pub probe_radius: f64,
    pub global_slack: f64,
    pub local_slack: f64,
    /// Test the worst stationary point as if it were the global minimizer.
    pub mislabel: bool,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            samples: 100_000,
            probes: 1_000,
            probe_radius: 1e-4,
            global_slack: 1e-9,
            local_slack: 1e-12,
            mislabel: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampleCheck {
    pub claimed: Vec<f64>,
    pub claimed_objective: f64,
    pub best_sample: Vec<f64>,
    pub best_objective: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleReport {
    pub global: SampleCheck,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub local_nonglobal: Option<SampleCheck>,
    pub passed: bool,
}

fn best_of<R: Rng>(
    rng: &mut R,
    count: usize,
    mut draw: impl FnMut(&mut R) -> Vec<f64>,
    f: impl Fn(&[f64]) -> f64,
) -> (Vec<f64>, f64) {
    let mut best = (Vec::new(), f64::INFINITY);
    for _ in 0..count {
        let x = draw(rng);
        let v = f(&x);
        if v < best.1 {
            best = (x, v);
        }
    }
    best
}

fn sample_check(claimed: &[f64], claimed_objective: f64, best: (Vec<f64>, f64), slack: f64) -> SampleCheck {
    SampleCheck {
        claimed: claimed.to_vec(),
        claimed_objective,
        passed: claimed_objective <= best.1 + slack,
        best_sample: best.0,
        best_objective: best.1,
    }
}

fn perturb<R: Rng>(rng: &mut R, x: &[f64], radius: f64) -> Vec<f64> {
    let d = sphere_sample(rng, x.len(), radius);
    x.iter().zip(&d).map(|(a, b)| a + b).collect()
}

pub fn trs_oracle<R: Rng>(inst: &TrsInstance, rng: &mut R, cfg: &OracleConfig) -> Result<OracleReport> {
    let sol = trs::solve(inst, trs::DEFAULT_TOL)?;
    let n = inst.dim();
    let f = |x: &[f64]| inst.objective(x);
    let claimed = if cfg.mislabel {
        sol.points.iter().max_by(|a, b| a.objective.total_cmp(&b.objective)).expect("nonempty").clone()
    } else {
        sol.global.clone()
    };
    let best = best_of(rng, cfg.samples, |r| ball_sample(r, n), f);
    let global = sample_check(&claimed.x, claimed.objective, best, cfg.global_slack);
    let local_nonglobal = sol.local_nonglobal.as_ref().map(|l| {
        let project = |mut y: Vec<f64>| {
            let r = linalg::norm(&y);
            if r > 1.0 {
                y.iter_mut().for_each(|v| *v /= r);
            }
            y
        };
        let best = best_of(rng, cfg.probes, |r| project(perturb(r, &l.x, cfg.probe_radius)), f);
        sample_check(&l.x, l.objective, best, cfg.local_slack)
    });
    let passed = global.passed && local_nonglobal.as_ref().is_none_or(|c| c.passed);
    Ok(OracleReport { global, local_nonglobal, passed })
}

pub fn prs_oracle<R: Rng>(inst: &PrsInstance, rng: &mut R, cfg: &OracleConfig) -> Result<OracleReport> {
    let sol = prs::solve(inst, prs::DEFAULT_TOL)?;
    let n = inst.dim();
    let g = |x: &[f64]| inst.objective(x);
    let claimed = if cfg.mislabel {
        sol.points.iter().max_by(|a, b| a.objective.total_cmp(&b.objective)).expect("nonempty").clone()
    } else {
        sol.global.clone()
    };
    let half = 10.0 * (sol.global.norm() + 1.0);
    let best = best_of(rng, cfg.samples, |r| (0..n).map(|_| r.random_range(-half..=half)).collect(), g);
    let global = sample_check(&claimed.x, claimed.objective, best, cfg.global_slack);
    let local_nonglobal = sol.local_nonglobal.as_ref().map(|l| {
        let best = best_of(rng, cfg.probes, |r| perturb(r, &l.x, cfg.probe_radius), g);
        sample_check(&l.x, l.objective, best, cfg.local_slack)
    });
    debug_assert!(sol.points.iter().filter(|p| p.classification == Classification::LocalNonGlobal).count() <= 1);
    let passed = global.passed && local_nonglobal.as_ref().is_none_or(|c| c.passed);
    Ok(OracleReport { global, local_nonglobal, passed })
}

/// Runs the oracle on a parsed instance. Trust-region instances with a
/// radius are checked in their unit-ball form, which has the same
/// objective values.
pub fn run_oracle<R: Rng>(inst: &Instance, rng: &mut R, cfg: &OracleConfig) -> Result<OracleReport> {
    match inst {
        Instance::Trs { unit, .. } => trs_oracle(unit, rng, cfg),
        Instance::Prs(p) => prs_oracle(p, rng, cfg),
    }
}
