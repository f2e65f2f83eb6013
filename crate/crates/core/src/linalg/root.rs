//! Principal-branch matrix roots of unitaries.

use nalgebra::DMatrix;

use super::matrix::{CMatrix, C64};
use crate::error::{Error, Result};

/// Eigenvalues within this angle of −1 are placed on the `θ = π` side of
/// the cut, so exact inputs such as `diag(1, −1)` resolve deterministically.
const CUT_SNAP: f64 = 1e-12;

fn to_nalgebra(m: &CMatrix) -> DMatrix<C64> {
    DMatrix::from_fn(m.rows(), m.cols(), |i, j| m[(i, j)])
}

fn from_nalgebra(m: &DMatrix<C64>) -> CMatrix {
    CMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

/// Principal angle in `(−π, π]`.
pub fn principal_angle(z: C64) -> f64 {
    let theta = z.arg();
    if theta <= -std::f64::consts::PI + CUT_SNAP {
        theta + 2.0 * std::f64::consts::PI
    } else {
        theta
    }
}

/// `k`-th root of a unitary on the principal branch: every eigenvalue
/// `e^{iθ}`, `θ ∈ (−π, π]`, is mapped to `e^{iθ/k}`.
///
/// The result is discontinuous across eigenvalue `−1`. Unitaries are
/// normal, so the complex Schur form is diagonal and its unitary factor is
/// an eigenbasis; degenerate eigenvalues are harmless because the map
/// depends only on the eigenvalue.
pub fn principal_root(u: &CMatrix, k: u32) -> Result<CMatrix> {
    if k == 0 {
        return Err(Error::InvalidArgument("root order must be at least 1".into()));
    }
    u.ensure_unitary()?;
    if k == 1 {
        return Ok(u.clone());
    }
    let (q, t) = nalgebra::Schur::new(to_nalgebra(u)).unpack();
    let n = u.rows();
    let roots: Vec<C64> = (0..n).map(|i| C64::from_polar(1.0, principal_angle(t[(i, i)]) / k as f64)).collect();
    let q = from_nalgebra(&q);
    let scaled = CMatrix::from_fn(n, n, |i, j| q[(i, j)] * roots[j]);
    Ok(&scaled * &q.adjoint())
}
