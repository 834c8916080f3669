//! Stationary points of the trust-region subproblem
//! `min ½xᵀQx + cᵀx, ‖x‖ ≤ 1` and of the p-regularized subproblem
//! `min ½xᵀQx + cᵀx + (σ/p)‖x‖^p`: enumeration through secular equations,
//! classification into global, local nonglobal and non-minimizing points,
//! and cross-checks through generalized eigenvalue pencils.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod linalg;
pub mod pencil;
pub mod prs;
pub mod secular;
pub mod spectral;
pub mod trs;
pub mod verdict;

pub use error::{Error, Result};
