//! The eigenbasis of `Q`, in which both secular equations are written.

use serde::Serialize;

use crate::error::Result;
use crate::linalg::{self, Matrix};
use crate::secular::{Regularization, SecularSpec};

/// Rotated components with `|c_i| <= NEGLIGIBLE_COMPONENT · (1 + ‖c‖)` are
/// treated as exact zeros, which is what turns on the degenerate branch.
pub const NEGLIGIBLE_COMPONENT: f64 = 1e-10;

const SYMMETRY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Serialize)]
pub struct SpectralForm {
    pub alphas: Vec<f64>,
    pub c_rot: Vec<f64>,
    #[serde(skip)]
    pub basis: Matrix,
}

pub fn to_spectral(q: &Matrix, c: &[f64]) -> Result<SpectralForm> {
    let eig = linalg::sym_eig(q, SYMMETRY_TOL)?;
    let c_rot = eig.basis.tr_matvec(c);
    Ok(SpectralForm { alphas: eig.eigenvalues, c_rot, basis: eig.basis })
}

impl SpectralForm {
    pub fn dim(&self) -> usize {
        self.alphas.len()
    }

    /// Rotated coordinates back to the original ones.
    pub fn to_original(&self, y: &[f64]) -> Vec<f64> {
        self.basis.matvec(y)
    }

    pub fn to_rotated(&self, x: &[f64]) -> Vec<f64> {
        self.basis.tr_matvec(x)
    }

    /// `c_i²` with negligible components flushed to zero.
    pub fn weights(&self) -> Vec<f64> {
        let cutoff = NEGLIGIBLE_COMPONENT * (1.0 + linalg::norm(&self.c_rot));
        self.c_rot.iter().map(|&ci| if ci.abs() <= cutoff { 0.0 } else { ci * ci }).collect()
    }

    /// Rotated linear term with negligible components flushed to zero.
    pub fn effective_c(&self) -> Vec<f64> {
        let cutoff = NEGLIGIBLE_COMPONENT * (1.0 + linalg::norm(&self.c_rot));
        self.c_rot.iter().map(|&ci| if ci.abs() <= cutoff { 0.0 } else { ci }).collect()
    }

    pub fn secular(&self, reg: Option<Regularization>) -> Result<SecularSpec> {
        SecularSpec::new(self.alphas.clone(), self.weights(), reg)
    }

    /// `½ Σ α_i y_i² + Σ c_i y_i`.
    pub fn rotated_quadratic(&self, y: &[f64]) -> f64 {
        y.iter().zip(&self.alphas).zip(&self.c_rot).map(|((yi, a), ci)| 0.5 * a * yi * yi + ci * yi).sum()
    }
}

/// Drops points within `radius` (Euclidean, in `(x, multiplier)` space)
/// of an earlier kept point, folding the flags of the dropped one into the
/// survivor via `merge`.
pub(crate) fn dedup_by_distance<P>(
    points: Vec<P>,
    radius: f64,
    key: impl Fn(&P) -> (&[f64], f64),
    merge: impl Fn(&mut P, &P),
) -> Vec<P> {
    let mut kept: Vec<P> = Vec::with_capacity(points.len());
    for p in points {
        let (xp, mp) = key(&p);
        let dup = kept.iter().position(|k| {
            let (xk, mk) = key(k);
            let dx = linalg::dist(xp, xk);
            (dx * dx + (mp - mk) * (mp - mk)).sqrt() <= radius
        });
        match dup {
            Some(i) => merge(&mut kept[i], &p),
            None => kept.push(p),
        }
    }
    kept
}
