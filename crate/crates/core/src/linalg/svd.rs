//! Singular value decomposition by one-sided (Hestenes) Jacobi rotations,
//! and the norms built on it.

use super::matrix::{CMatrix, C64, ZERO};
use crate::error::{Error, Result};

/// Thin SVD `A = U · diag(s) · V†` with `s` sorted in decreasing order.
#[derive(Clone, Debug)]
pub struct Svd {
    pub u: CMatrix,
    pub s: Vec<f64>,
    pub v: CMatrix,
}

const MAX_SWEEPS: usize = 60;

/// Jacobi on the columns of a tall (or square) matrix.
fn jacobi_tall(a: &CMatrix) -> Svd {
    let (m, n) = (a.rows(), a.cols());
    let mut w: Vec<Vec<C64>> = (0..n).map(|j| a.col(j)).collect();
    let mut v: Vec<Vec<C64>> = (0..n)
        .map(|j| {
            let mut e = vec![ZERO; n];
            e[j] = C64::new(1.0, 0.0);
            e
        })
        .collect();
    let eps = f64::EPSILON;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let alpha: f64 = w[p].iter().map(C64::norm_sqr).sum();
                let beta: f64 = w[q].iter().map(C64::norm_sqr).sum();
                let gamma: C64 = w[p].iter().zip(&w[q]).map(|(x, y)| x.conj() * y).sum();
                let g = gamma.norm();
                if g == 0.0 || g <= eps * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                // Rotate the phase-aligned pair (w_p, e^{-iθ} w_q).
                let phase = gamma / g;
                let rot = |x: &mut Vec<C64>, y: &mut Vec<C64>| {
                    for (xp, yq) in x.iter_mut().zip(y.iter_mut()) {
                        let yt = *yq * phase.conj();
                        let new_p = *xp * c - yt * s;
                        let new_q = *xp * s + yt * c;
                        *xp = new_p;
                        *yq = new_q;
                    }
                };
                let (lo, hi) = w.split_at_mut(q);
                rot(&mut lo[p], &mut hi[0]);
                let (lo, hi) = v.split_at_mut(q);
                rot(&mut lo[p], &mut hi[0]);
            }
        }
        if !rotated {
            break;
        }
    }
    let mut order: Vec<(f64, usize)> =
        w.iter().enumerate().map(|(j, col)| (col.iter().map(C64::norm_sqr).sum::<f64>().sqrt(), j)).collect();
    order.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut u = CMatrix::zeros(m, n);
    let mut vm = CMatrix::zeros(n, n);
    let mut s = Vec::with_capacity(n);
    for (k, &(sigma, j)) in order.iter().enumerate() {
        s.push(sigma);
        if sigma > 0.0 {
            let col: Vec<C64> = w[j].iter().map(|x| x / sigma).collect();
            u.set_col(k, &col);
        }
        vm.set_col(k, &v[j]);
    }
    Svd { u, s, v: vm }
}

/// Thin singular value decomposition of an arbitrary matrix.
pub fn svd(a: &CMatrix) -> Svd {
    if a.cols() <= a.rows() {
        jacobi_tall(a)
    } else {
        // A† = U' S V'† ⇒ A = V' S U'†.
        let t = jacobi_tall(&a.adjoint());
        Svd { u: t.v, s: t.s, v: t.u }
    }
}

pub fn singular_values(a: &CMatrix) -> Vec<f64> {
    svd(a).s
}

fn require_square(m: &CMatrix) -> Result<()> {
    if m.is_square() {
        Ok(())
    } else {
        Err(Error::NotSquare { rows: m.rows(), cols: m.cols() })
    }
}

/// Sum of singular values.
pub fn trace_norm(m: &CMatrix) -> Result<f64> {
    require_square(m)?;
    Ok(singular_values(m).iter().sum())
}

/// Largest singular value.
pub fn op_norm(m: &CMatrix) -> Result<f64> {
    require_square(m)?;
    Ok(op_norm_rect(m))
}

/// Above this many entries the operator norm goes through a bidiagonal SVD;
/// Jacobi sweeps get too slow there.
const JACOBI_MAX_ENTRIES: usize = 64 * 64;

/// Operator norm of a possibly rectangular matrix (e.g. an isometry-like
/// map between spaces of different dimension).
pub fn op_norm_rect(m: &CMatrix) -> f64 {
    if m.as_slice().iter().all(|z| *z == ZERO) {
        return 0.0;
    }
    if m.rows() * m.cols() <= JACOBI_MAX_ENTRIES {
        return singular_values(m).first().copied().unwrap_or(0.0);
    }
    let a = nalgebra::DMatrix::from_fn(m.rows(), m.cols(), |i, j| m[(i, j)]);
    a.singular_values().max()
}
