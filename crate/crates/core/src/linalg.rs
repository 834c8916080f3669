//! Dense real linear algebra used by the rest of the crate.
//!
//! Everything here is sized for small problems (n up to a few dozen): a
//! row-major [`Matrix`], cyclic Jacobi for symmetric eigenproblems,
//! balanced Hessenberg + shifted QR for the real eigenvalues of general
//! matrices, and pivoted elimination for determinants and linear solves.

use std::fmt;
use std::ops::{Index, IndexMut};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default imaginary-part tolerance for [`real_eigenvalues`].
pub const IMAG_TOL: f64 = 1e-8;
/// Default relative pivot tolerance for [`solve_linear`].
pub const PIVOT_TOL: f64 = 1e-12;

const JACOBI_MAX_SWEEPS: usize = 64;
const JACOBI_OFF_TOL: f64 = 1e-12;
const QR_MAX_ITERS_PER_EIGENVALUE: usize = 200;

#[derive(Clone, PartialEq, Serialize, Deserialize)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_diag(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    /// Builds a matrix from row-major data, rejecting shape mismatches and
    /// non-finite entries.
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows * cols != data.len() {
            return Err(Error::InvalidInput(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        if let Some(bad) = data.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!("non-finite matrix entry {bad}")));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(nrows * ncols);
        for (i, r) in rows.iter().enumerate() {
            let r = r.as_ref();
            if r.len() != ncols {
                return Err(Error::InvalidInput(format!("row {i} has {} entries, expected {ncols}", r.len())));
            }
            data.extend_from_slice(r);
        }
        Self::from_row_major(nrows, ncols, data)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn matmul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "matmul shape mismatch");
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(self.cols, x.len(), "matvec shape mismatch");
        (0..self.rows).map(|i| dot(self.row(i), x)).collect()
    }

    /// `selfᵀ x`.
    pub fn tr_matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(self.rows, x.len(), "tr_matvec shape mismatch");
        let mut out = vec![0.0; self.cols];
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[j] += self[(i, j)] * x[i];
            }
        }
        out
    }

    pub fn scaled(&self, s: f64) -> Matrix {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|v| v * s).collect() }
    }

    /// `self + s * other`
    pub fn add_scaled(&self, s: f64, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + s * b).collect(),
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        norm(&self.data)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Largest `|a_ij - a_ji|`; infinite for non-square input.
    pub fn asymmetry(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut worst: f64 = 0.0;
        for i in 0..self.rows {
            for j in (i + 1)..self.cols {
                worst = worst.max((self[(i, j)] - self[(j, i)]).abs());
            }
        }
        worst
    }

    /// Product of row norms, an upper bound on `|det|`.
    pub fn hadamard_bound(&self) -> f64 {
        (0..self.rows).map(|i| norm(self.row(i))).product()
    }

    /// Copies `block` into `self` with its top-left corner at `(r0, c0)`.
    pub fn set_block(&mut self, r0: usize, c0: usize, block: &Matrix) {
        for i in 0..block.rows {
            for j in 0..block.cols {
                self[(r0 + i, c0 + j)] = block[(i, j)];
            }
        }
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries((0..self.rows).map(|i| self.row(i))).finish()
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    norm(&sub(a, b))
}

/// Eigendecomposition of a symmetric matrix; eigenvalues ascending, the
/// i-th column of `basis` pairs with `eigenvalues[i]`.
#[derive(Debug, Clone)]
pub struct SymEig {
    pub eigenvalues: Vec<f64>,
    pub basis: Matrix,
}

impl SymEig {
    pub fn reconstruct(&self) -> Matrix {
        let scaled = self.basis.matmul(&Matrix::from_diag(&self.eigenvalues));
        scaled.matmul(&self.basis.transpose())
    }
}

/// Cyclic Jacobi eigensolver.
///
/// Sweeps until the off-diagonal Frobenius norm is negligible next to
/// `ε‖S‖_F`; ending above `1e-12 * ‖S‖_F` is an error. `tol` bounds the accepted asymmetry, relative to
/// `1 + ‖S‖_F`.
pub fn sym_eig(s: &Matrix, tol: f64) -> Result<SymEig> {
    if !s.is_square() {
        return Err(Error::InvalidInput(format!("sym_eig needs a square matrix, got {}x{}", s.rows, s.cols)));
    }
    let scale = s.frobenius_norm();
    if s.asymmetry() > tol * (1.0 + scale) {
        return Err(Error::InvalidInput(format!("matrix is not symmetric (asymmetry {:e})", s.asymmetry())));
    }
    let n = s.rows;
    let mut a = s.clone();
    // symmetrize exactly so both triangles rotate consistently
    for i in 0..n {
        for j in (i + 1)..n {
            let m = 0.5 * (a[(i, j)] + a[(j, i)]);
            a[(i, j)] = m;
            a[(j, i)] = m;
        }
    }
    let mut v = Matrix::identity(n);
    let target = 1e-3 * f64::EPSILON * scale;

    for _ in 0..JACOBI_MAX_SWEEPS {
        if off_diagonal_norm(&a) <= target {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = if theta.abs() > 1e150 {
                    0.5 / theta
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let sn = t * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - sn * akq;
                    a[(k, q)] = sn * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - sn * aqk;
                    a[(q, k)] = sn * apk + c * aqk;
                }
                a[(p, q)] = 0.0;
                a[(q, p)] = 0.0;
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - sn * vkq;
                    v[(k, q)] = sn * vkp + c * vkq;
                }
            }
        }
    }
    if off_diagonal_norm(&a) > JACOBI_OFF_TOL * scale {
        return Err(Error::NoConvergence { norm: scale, iterations: JACOBI_MAX_SWEEPS });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].total_cmp(&a[(j, j)]));
    let eigenvalues = order.iter().map(|&i| a[(i, i)]).collect();
    let mut basis = Matrix::zeros(n, n);
    for (new_col, &old_col) in order.iter().enumerate() {
        for k in 0..n {
            basis[(k, new_col)] = v[(k, old_col)];
        }
    }
    Ok(SymEig { eigenvalues, basis })
}

fn off_diagonal_norm(a: &Matrix) -> f64 {
    let mut sum = 0.0;
    for i in 0..a.rows {
        for j in 0..a.cols {
            if i != j {
                sum += a[(i, j)] * a[(i, j)];
            }
        }
    }
    sum.sqrt()
}

/// Real eigenvalues of a general square matrix, ascending, with
/// multiplicity.
///
/// A conjugate pair whose imaginary part is at most
/// `imag_tol * (1 + |re|)` is reported as a double real eigenvalue.
pub fn real_eigenvalues(a: &Matrix, imag_tol: f64) -> Result<Vec<f64>> {
    if !a.is_square() {
        return Err(Error::InvalidInput(format!("real_eigenvalues needs a square matrix, got {}x{}", a.rows, a.cols)));
    }
    let norm = a.frobenius_norm();
    let mut h = a.clone();
    balance(&mut h);
    hessenberg(&mut h);
    let eigs = hessenberg_qr(&mut h, norm)?;
    let mut reals: Vec<f64> =
        eigs.into_iter().filter(|&(re, im)| im.abs() <= imag_tol * (1.0 + re.abs())).map(|(re, _)| re).collect();
    reals.sort_by(f64::total_cmp);
    Ok(reals)
}

/// Diagonal similarity scaling by powers of two so that row and column
/// norms are comparable.
fn balance(a: &mut Matrix) {
    const RADIX: f64 = 2.0;
    let n = a.rows;
    let sqrdx = RADIX * RADIX;
    let mut done = false;
    while !done {
        done = true;
        for i in 0..n {
            let mut r = 0.0;
            let mut c = 0.0;
            for j in 0..n {
                if j != i {
                    c += a[(j, i)].abs();
                    r += a[(i, j)].abs();
                }
            }
            if c != 0.0 && r != 0.0 {
                let mut g = r / RADIX;
                let mut f = 1.0;
                let s = c + r;
                while c < g {
                    f *= RADIX;
                    c *= sqrdx;
                }
                g = r * RADIX;
                while c > g {
                    f /= RADIX;
                    c /= sqrdx;
                }
                if (c + r) / f < 0.95 * s {
                    done = false;
                    let g = 1.0 / f;
                    for j in 0..n {
                        a[(i, j)] *= g;
                    }
                    for j in 0..n {
                        a[(j, i)] *= f;
                    }
                }
            }
        }
    }
}

/// Reduction to upper Hessenberg form by stabilized elementary
/// similarity transformations. Entries below the subdiagonal are zeroed.
fn hessenberg(a: &mut Matrix) {
    let n = a.rows;
    for m in 1..n.saturating_sub(1) {
        let mut x: f64 = 0.0;
        let mut piv = m;
        for j in m..n {
            if a[(j, m - 1)].abs() > x.abs() {
                x = a[(j, m - 1)];
                piv = j;
            }
        }
        if piv != m {
            for j in (m - 1)..n {
                let tmp = a[(piv, j)];
                a[(piv, j)] = a[(m, j)];
                a[(m, j)] = tmp;
            }
            for j in 0..n {
                let tmp = a[(j, piv)];
                a[(j, piv)] = a[(j, m)];
                a[(j, m)] = tmp;
            }
        }
        if x != 0.0 {
            for i in (m + 1)..n {
                let mut y = a[(i, m - 1)];
                if y != 0.0 {
                    y /= x;
                    a[(i, m - 1)] = y;
                    for j in m..n {
                        a[(i, j)] -= y * a[(m, j)];
                    }
                    for j in 0..n {
                        a[(j, m)] += y * a[(j, i)];
                    }
                }
            }
        }
    }
    for i in 0..n {
        for j in 0..i.saturating_sub(1) {
            a[(i, j)] = 0.0;
        }
    }
}

/// Francis double-shift QR on an upper Hessenberg matrix. Returns
/// `(re, im)` pairs.
fn hessenberg_qr(a: &mut Matrix, norm_for_error: f64) -> Result<Vec<(f64, f64)>> {
    let n = a.rows;
    let mut out = vec![(0.0, 0.0); n];
    if n == 0 {
        return Ok(out);
    }
    let mut anorm = 0.0;
    for i in 0..n {
        for j in i.saturating_sub(1)..n {
            anorm += a[(i, j)].abs();
        }
    }
    let eps = f64::EPSILON;
    let mut nn = n as isize - 1;
    let mut shift = 0.0;
    let mut total_iters = 0usize;

    while nn >= 0 {
        let mut its = 0usize;
        loop {
            let nu = nn as usize;
            // look for a negligible subdiagonal element
            let mut l = 0usize;
            for ll in (1..=nu).rev() {
                let mut s = a[(ll - 1, ll - 1)].abs() + a[(ll, ll)].abs();
                if s == 0.0 {
                    s = anorm;
                }
                if a[(ll, ll - 1)].abs() <= eps * s {
                    a[(ll, ll - 1)] = 0.0;
                    l = ll;
                    break;
                }
            }
            let mut x = a[(nu, nu)];
            if l == nu {
                out[nu] = (x + shift, 0.0);
                nn -= 1;
                break;
            }
            let mut y = a[(nu - 1, nu - 1)];
            let mut w = a[(nu, nu - 1)] * a[(nu - 1, nu)];
            if l == nu - 1 {
                let p = 0.5 * (y - x);
                let q = p * p + w;
                let z = q.abs().sqrt();
                x += shift;
                if q >= 0.0 {
                    let z = p + z.copysign(p);
                    out[nu - 1] = (x + z, 0.0);
                    out[nu] = (x + z, 0.0);
                    if z != 0.0 {
                        out[nu] = (x - w / z, 0.0);
                    }
                } else {
                    out[nu] = (x + p, -z);
                    out[nu - 1] = (x + p, z);
                }
                nn -= 2;
                break;
            }
            if its == QR_MAX_ITERS_PER_EIGENVALUE {
                return Err(Error::NoConvergence { norm: norm_for_error, iterations: total_iters });
            }
            if its > 0 && its.is_multiple_of(10) {
                // exceptional shift
                shift += x;
                for i in 0..=nu {
                    a[(i, i)] -= x;
                }
                let s = a[(nu, nu - 1)].abs() + a[(nu - 1, nu - 2)].abs();
                x = 0.75 * s;
                y = x;
                w = -0.4375 * s * s;
            }
            its += 1;
            total_iters += 1;

            let (mut p, mut q, mut r);
            let mut m = nu - 2;
            loop {
                let z = a[(m, m)];
                let rr = x - z;
                let ss = y - z;
                p = (rr * ss - w) / a[(m + 1, m)] + a[(m, m + 1)];
                q = a[(m + 1, m + 1)] - z - rr - ss;
                r = a[(m + 2, m + 1)];
                let s = p.abs() + q.abs() + r.abs();
                p /= s;
                q /= s;
                r /= s;
                if m == l {
                    break;
                }
                let u = a[(m, m - 1)].abs() * (q.abs() + r.abs());
                let v = p.abs() * (a[(m - 1, m - 1)].abs() + z.abs() + a[(m + 1, m + 1)].abs());
                if u <= eps * v {
                    break;
                }
                m -= 1;
            }
            for i in m..(nu - 1) {
                a[(i + 2, i)] = 0.0;
                if i != m {
                    a[(i + 2, i - 1)] = 0.0;
                }
            }
            let mut k = m;
            while k < nu {
                let mut xk = 0.0;
                if k != m {
                    p = a[(k, k - 1)];
                    q = a[(k + 1, k - 1)];
                    r = 0.0;
                    if k + 1 != nu {
                        r = a[(k + 2, k - 1)];
                    }
                    xk = p.abs() + q.abs() + r.abs();
                    if xk != 0.0 {
                        p /= xk;
                        q /= xk;
                        r /= xk;
                    }
                }
                let s = (p * p + q * q + r * r).sqrt().copysign(p);
                if s != 0.0 {
                    if k == m {
                        if l != m {
                            a[(k, k - 1)] = -a[(k, k - 1)];
                        }
                    } else {
                        a[(k, k - 1)] = -s * xk;
                    }
                    p += s;
                    let xs = p / s;
                    let ys = q / s;
                    let zs = r / s;
                    q /= p;
                    r /= p;
                    for j in k..=nu {
                        let mut pp = a[(k, j)] + q * a[(k + 1, j)];
                        if k + 1 != nu {
                            pp += r * a[(k + 2, j)];
                            a[(k + 2, j)] -= pp * zs;
                        }
                        a[(k + 1, j)] -= pp * ys;
                        a[(k, j)] -= pp * xs;
                    }
                    let mmin = if nu < k + 3 { nu } else { k + 3 };
                    for i in l..=mmin {
                        let mut pp = xs * a[(i, k)] + ys * a[(i, k + 1)];
                        if k + 1 != nu {
                            pp += zs * a[(i, k + 2)];
                            a[(i, k + 2)] -= pp * r;
                        }
                        a[(i, k + 1)] -= pp * q;
                        a[(i, k)] -= pp;
                    }
                }
                k += 1;
            }
        }
    }
    Ok(out)
}

/// LU factorization with partial pivoting, in place. Returns the row
/// permutation sign, or `None` when a column is exactly zero.
fn lu_in_place(a: &mut Matrix) -> Option<f64> {
    let n = a.rows;
    let mut sign = 1.0;
    for k in 0..n {
        let mut piv = k;
        for i in (k + 1)..n {
            if a[(i, k)].abs() > a[(piv, k)].abs() {
                piv = i;
            }
        }
        if a[(piv, k)] == 0.0 {
            return None;
        }
        if piv != k {
            for j in 0..n {
                let tmp = a[(k, j)];
                a[(k, j)] = a[(piv, j)];
                a[(piv, j)] = tmp;
            }
            sign = -sign;
        }
        let d = a[(k, k)];
        for i in (k + 1)..n {
            let f = a[(i, k)] / d;
            if f == 0.0 {
                continue;
            }
            a[(i, k)] = f;
            for j in (k + 1)..n {
                a[(i, j)] -= f * a[(k, j)];
            }
        }
    }
    Some(sign)
}

/// Determinant by partially pivoted elimination; exactly 0 when a pivot
/// column vanishes.
pub fn det(a: &Matrix) -> f64 {
    assert!(a.is_square(), "det needs a square matrix");
    let mut lu = a.clone();
    match lu_in_place(&mut lu) {
        None => 0.0,
        Some(sign) => (0..a.rows).fold(sign, |acc, i| acc * lu[(i, i)]),
    }
}

/// Solves `A x = b` with partial pivoting. Pivots smaller than
/// `tol * ‖A‖_F` are treated as singular.
pub fn solve_linear(a: &Matrix, b: &[f64], tol: f64) -> Result<Vec<f64>> {
    if !a.is_square() || a.rows != b.len() {
        return Err(Error::InvalidInput(format!(
            "solve_linear shape mismatch: {}x{} matrix, rhs of length {}",
            a.rows,
            a.cols,
            b.len()
        )));
    }
    let n = a.rows;
    let threshold = tol * a.frobenius_norm();
    let mut m = a.clone();
    let mut rhs = b.to_vec();
    for k in 0..n {
        let mut piv = k;
        for i in (k + 1)..n {
            if m[(i, k)].abs() > m[(piv, k)].abs() {
                piv = i;
            }
        }
        let pivot = m[(piv, k)];
        if pivot.abs() <= threshold || pivot == 0.0 {
            return Err(Error::Singular { pivot: pivot.abs(), threshold });
        }
        if piv != k {
            for j in 0..n {
                let tmp = m[(k, j)];
                m[(k, j)] = m[(piv, j)];
                m[(piv, j)] = tmp;
            }
            rhs.swap(k, piv);
        }
        for i in (k + 1)..n {
            let f = m[(i, k)] / pivot;
            if f == 0.0 {
                continue;
            }
            for j in k..n {
                m[(i, j)] -= f * m[(k, j)];
            }
            rhs[i] -= f * rhs[k];
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = ((i + 1)..n).map(|j| m[(i, j)] * x[j]).sum();
        x[i] = (rhs[i] - s) / m[(i, i)];
    }
    Ok(x)
}

/// Inverse of a square matrix. Signed, scaled permutation matrices (one
/// nonzero per row and column) are inverted exactly; anything else goes
/// through [`solve_linear`] column by column.
pub fn inverse(a: &Matrix) -> Result<Matrix> {
    if !a.is_square() {
        return Err(Error::InvalidInput("inverse needs a square matrix".into()));
    }
    let n = a.rows;
    if let Some(perm) = scaled_permutation(a) {
        let mut inv = Matrix::zeros(n, n);
        for (i, &(j, v)) in perm.iter().enumerate() {
            inv[(j, i)] = 1.0 / v;
        }
        return Ok(inv);
    }
    let mut inv = Matrix::zeros(n, n);
    for j in 0..n {
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        let col = solve_linear(a, &e, PIVOT_TOL)?;
        for i in 0..n {
            inv[(i, j)] = col[i];
        }
    }
    Ok(inv)
}

/// For each row, the `(column, value)` of its only nonzero, when the
/// matrix is a scaled permutation.
fn scaled_permutation(a: &Matrix) -> Option<Vec<(usize, f64)>> {
    let n = a.rows;
    let mut used = vec![false; n];
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut hit = None;
        for j in 0..n {
            if a[(i, j)] != 0.0 {
                if hit.is_some() {
                    return None;
                }
                hit = Some((j, a[(i, j)]));
            }
        }
        let (j, v) = hit?;
        if used[j] {
            return None;
        }
        used[j] = true;
        out.push((j, v));
    }
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[f64]]) -> Matrix {
        Matrix::from_rows(rows).unwrap()
    }

    #[test]
    fn sym_eig_small_cases() {
        let e = sym_eig(&m(&[&[2.0]]), 1e-12).unwrap();
        assert_eq!(e.eigenvalues, vec![2.0]);
        assert_eq!(e.basis, Matrix::identity(1));

        let e = sym_eig(&m(&[&[0.0, 1.0], &[1.0, 0.0]]), 1e-12).unwrap();
        assert!((e.eigenvalues[0] + 1.0).abs() < 1e-14);
        assert!((e.eigenvalues[1] - 1.0).abs() < 1e-14);

        let e = sym_eig(&Matrix::from_diag(&[3.0, -1.0]), 1e-12).unwrap();
        assert_eq!(e.eigenvalues, vec![-1.0, 3.0]);
        for j in 0..2 {
            let col = e.basis.column(j);
            assert_eq!(col.iter().filter(|v| v.abs() == 1.0).count(), 1);
            assert_eq!(col.iter().filter(|v| **v == 0.0).count(), 1);
        }
    }

    #[test]
    fn sym_eig_rejects_bad_input() {
        assert!(matches!(sym_eig(&Matrix::zeros(2, 3), 1e-12), Err(Error::InvalidInput(_))));
        assert!(matches!(sym_eig(&m(&[&[0.0, 1.0], &[0.0, 0.0]]), 1e-12), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn real_eigenvalue_examples() {
        assert_eq!(real_eigenvalues(&Matrix::from_diag(&[1.0, 2.0]), IMAG_TOL).unwrap(), vec![1.0, 2.0]);
        assert!(real_eigenvalues(&m(&[&[0.0, -1.0], &[1.0, 0.0]]), IMAG_TOL).unwrap().is_empty());
        let ev = real_eigenvalues(&m(&[&[0.0, 1.0], &[-2.0, 3.0]]), IMAG_TOL).unwrap();
        assert_eq!(ev.len(), 2);
        assert!((ev[0] - 1.0).abs() < 1e-12 && (ev[1] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn real_eigenvalues_of_companion_matrix() {
        // roots 1, 2, 3, 4 and a complex pair 1 ± 2i:
        // (x-1)(x-2)(x-3)(x-4)(x^2 - 2x + 5)
        let poly = [1.0, -12.0, 60.0, -170.0, 299.0, -298.0, 120.0];
        let n = poly.len() - 1;
        let mut c = Matrix::zeros(n, n);
        for j in 0..n {
            c[(0, j)] = -poly[j + 1];
        }
        for i in 1..n {
            c[(i, i - 1)] = 1.0;
        }
        let ev = real_eigenvalues(&c, IMAG_TOL).unwrap();
        assert_eq!(ev.len(), 4, "{ev:?}");
        for (got, want) in ev.iter().zip([1.0, 2.0, 3.0, 4.0]) {
            assert!((got - want).abs() < 1e-9, "{ev:?}");
        }
    }

    #[test]
    fn det_examples() {
        assert_eq!(det(&Matrix::identity(3)), 1.0);
        assert!((det(&m(&[&[1.0, 2.0], &[3.0, 4.0]])) + 2.0).abs() < 1e-14);
        assert_eq!(det(&m(&[&[1.0, 1.0], &[1.0, 1.0]])), 0.0);
    }

    #[test]
    fn solve_examples() {
        assert_eq!(solve_linear(&Matrix::identity(2), &[5.0, -1.0], PIVOT_TOL).unwrap(), vec![5.0, -1.0]);
        assert_eq!(solve_linear(&Matrix::from_diag(&[2.0, 4.0]), &[2.0, 8.0], PIVOT_TOL).unwrap(), vec![1.0, 2.0]);
        assert!(matches!(
            solve_linear(&m(&[&[1.0, 1.0], &[1.0, 1.0]]), &[1.0, 3.0], PIVOT_TOL),
            Err(Error::Singular { .. })
        ));
    }

    #[test]
    fn permutation_inverse_is_exact() {
        let b = m(&[&[0.0, -2.0], &[-2.0, 0.0]]);
        let inv = inverse(&b).unwrap();
        assert_eq!(inv, m(&[&[0.0, -0.5], &[-0.5, 0.0]]));
        let general = m(&[&[2.0, 1.0], &[1.0, 3.0]]);
        let prod = general.matmul(&inverse(&general).unwrap());
        assert!(prod.add_scaled(-1.0, &Matrix::identity(2)).max_abs() < 1e-15);
    }
}
