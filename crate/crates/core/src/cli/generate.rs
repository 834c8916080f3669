//! Seeded instance generators.
//!
//! `Q` is a symmetric Gaussian matrix shifted by `−(α₁ + u)I` with `u`
//! uniform in `[0.1, 2]`, so its smallest eigenvalue is `−u < 0`. `c` has
//! independent standard normal entries.

use log::info;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::prs::{self, PrsInstance};
use crate::trs::{self, TrsInstance};

/// Rejections allowed before targeted generation gives up.
pub const MAX_REJECTIONS: usize = 100_000;

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian_vector<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect()
}

pub fn random_q<R: Rng>(rng: &mut R, n: usize) -> Result<Matrix> {
    let mut q = Matrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let v: f64 = rng.sample(StandardNormal);
            q[(i, j)] = v;
            q[(j, i)] = v;
        }
    }
    let alpha1 = linalg::sym_eig(&q, 1e-12)?.eigenvalues[0];
    let u: f64 = rng.random_range(0.1..=2.0);
    Ok(q.add_scaled(-(alpha1 + u), &Matrix::identity(n)))
}

fn require_dim(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidInput("dimension must be at least 1".into()));
    }
    Ok(())
}

pub fn random_trs<R: Rng>(rng: &mut R, n: usize) -> Result<TrsInstance> {
    require_dim(n)?;
    let q = random_q(rng, n)?;
    TrsInstance::new(q, gaussian_vector(rng, n))
}

pub fn random_prs<R: Rng>(rng: &mut R, n: usize, sigma: f64, p: f64) -> Result<PrsInstance> {
    require_dim(n)?;
    let q = random_q(rng, n)?;
    PrsInstance::new(q, gaussian_vector(rng, n), sigma, p)
}

fn require_targetable(n: usize) -> Result<()> {
    require_dim(n)?;
    if n < 2 {
        return Err(Error::InvalidInput("a local nonglobal minimizer needs n ≥ 2".into()));
    }
    Ok(())
}

/// Resamples until the classifier reports a local nonglobal minimizer.
/// Returns the instance and the number of rejected draws.
pub fn targeted_trs<R: Rng>(rng: &mut R, n: usize, tol: f64) -> Result<(TrsInstance, usize)> {
    require_targetable(n)?;
    for rejections in 0..=MAX_REJECTIONS {
        let inst = random_trs(rng, n)?;
        if matches!(trs::solve(&inst, tol), Ok(s) if s.local_nonglobal.is_some()) {
            info!("targeted trs instance after {rejections} rejections");
            return Ok((inst, rejections));
        }
    }
    Err(Error::Generation { rejections: MAX_REJECTIONS })
}

pub fn targeted_prs<R: Rng>(rng: &mut R, n: usize, sigma: f64, p: f64, tol: f64) -> Result<(PrsInstance, usize)> {
    require_targetable(n)?;
    for rejections in 0..=MAX_REJECTIONS {
        let inst = random_prs(rng, n, sigma, p)?;
        if matches!(prs::solve(&inst, tol), Ok(s) if s.local_nonglobal.is_some()) {
            info!("targeted prs instance after {rejections} rejections");
            return Ok((inst, rejections));
        }
    }
    Err(Error::Generation { rejections: MAX_REJECTIONS })
}

/// A random orthogonal matrix (eigenbasis of a Gaussian symmetric matrix).
pub fn random_orthogonal<R: Rng>(rng: &mut R, n: usize) -> Result<Matrix> {
    let mut g = Matrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let v: f64 = rng.sample(StandardNormal);
            g[(i, j)] = v;
            g[(j, i)] = v;
        }
    }
    Ok(linalg::sym_eig(&g, 1e-12)?.basis)
}

/// A point uniform in the unit ball.
pub fn ball_sample<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    let d = gaussian_vector(rng, n);
    let r = rng.random::<f64>().powf(1.0 / n as f64) / linalg::norm(&d);
    d.iter().map(|v| v * r).collect()
}

/// A point uniform on the sphere of radius `r`.
pub fn sphere_sample<R: Rng>(rng: &mut R, n: usize, r: f64) -> Vec<f64> {
    let d = gaussian_vector(rng, n);
    let s = r / linalg::norm(&d);
    d.iter().map(|v| v * s).collect()
}
