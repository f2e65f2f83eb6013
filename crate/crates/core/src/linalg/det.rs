//! Determinants and minors.
//!
//! The symmetric formulas sum over pairs of permutations (rows and columns)
//! and are written with 0-indexed permutations. In the 1-indexed form the
//! minor formula conditions on `π(1) = j, τ(1) = i` and multiplies over
//! `k = 2..n`; here that becomes `π(0) = j, τ(0) = i` and `k = 1..n-1`.
//! The sign factor `(−1)^{i+j}` has the same parity in both conventions.

use super::matrix::{CMatrix, C64, ONE, ZERO};
use super::perm::{factorial, Permutation};
use crate::error::{Error, Result};

pub const SYM_DET_MAX: usize = 6;
pub const SYM_MINOR_MAX: usize = 5;

fn require_square(m: &CMatrix) -> Result<usize> {
    if m.is_square() {
        Ok(m.rows())
    } else {
        Err(Error::NotSquare { rows: m.rows(), cols: m.cols() })
    }
}

/// `det M = (1/n!) Σ_{π,τ} sgn(τ) sgn(π) Π_i M[τ(i), π(i)]`.
pub fn sym_det(m: &CMatrix) -> Result<C64> {
    let n = require_square(m)?;
    if n > SYM_DET_MAX {
        return Err(Error::TooLarge { what: "sym_det", n, max: SYM_DET_MAX });
    }
    let perms = Permutation::all(n);
    let mut total = ZERO;
    for tau in &perms {
        for pi in &perms {
            let sign = f64::from(tau.sign() * pi.sign());
            let prod: C64 = (0..n).map(|i| m[(tau.apply(i), pi.apply(i))]).product();
            total += prod * sign;
        }
    }
    Ok(total / factorial(n) as f64)
}

/// Determinant of `m` with row `i` and column `j` deleted, via
/// `((−1)^{i+j}/(n−1)!) Σ_{π(0)=j, τ(0)=i} sgn(τ) sgn(π) Π_{k≥1} M[τ(k), π(k)]`.
pub fn sym_minor(m: &CMatrix, i: usize, j: usize) -> Result<C64> {
    let n = require_square(m)?;
    if n > SYM_MINOR_MAX {
        return Err(Error::TooLarge { what: "sym_minor", n, max: SYM_MINOR_MAX });
    }
    if i >= n || j >= n {
        return Err(Error::IndexOutOfRange { row: i, col: j, n });
    }
    let perms = Permutation::all(n);
    let rows: Vec<&Permutation> = perms.iter().filter(|t| t.apply(0) == i).collect();
    let cols: Vec<&Permutation> = perms.iter().filter(|p| p.apply(0) == j).collect();
    let mut total = ZERO;
    for tau in &rows {
        for pi in &cols {
            let sign = f64::from(tau.sign() * pi.sign());
            let prod: C64 = (1..n).map(|k| m[(tau.apply(k), pi.apply(k))]).product();
            total += prod * sign;
        }
    }
    let parity = if (i + j).is_multiple_of(2) { 1.0 } else { -1.0 };
    Ok(total * parity / factorial(n - 1) as f64)
}

/// `C[i,j] = (−1)^{i+j} det(M with row i, column j deleted)`.
pub fn cofactor_matrix(m: &CMatrix) -> Result<CMatrix> {
    let n = require_square(m)?;
    if n > SYM_MINOR_MAX {
        return Err(Error::TooLarge { what: "cofactor_matrix", n, max: SYM_MINOR_MAX });
    }
    let mut c = CMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let parity = if (i + j).is_multiple_of(2) { 1.0 } else { -1.0 };
            c[(i, j)] = sym_minor(m, i, j)? * parity;
        }
    }
    Ok(c)
}

/// Determinant by Gaussian elimination with partial pivoting.
pub fn det(m: &CMatrix) -> Result<C64> {
    let n = require_square(m)?;
    let mut a = m.clone();
    let mut result = ONE;
    for k in 0..n {
        let pivot = (k..n).max_by(|&x, &y| a[(x, k)].norm().total_cmp(&a[(y, k)].norm())).expect("nonempty range");
        if a[(pivot, k)] == ZERO {
            return Ok(ZERO);
        }
        if pivot != k {
            for j in 0..n {
                let tmp = a[(k, j)];
                a[(k, j)] = a[(pivot, j)];
                a[(pivot, j)] = tmp;
            }
            result = -result;
        }
        let p = a[(k, k)];
        result *= p;
        for r in (k + 1)..n {
            let factor = a[(r, k)] / p;
            if factor == ZERO {
                continue;
            }
            for j in k..n {
                let v = a[(k, j)];
                a[(r, j)] -= factor * v;
            }
        }
    }
    Ok(result)
}
