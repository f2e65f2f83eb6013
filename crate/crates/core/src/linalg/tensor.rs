//! Tensor products, embedding of local operators and partial traces.

use super::layout::RegisterLayout;
use super::matrix::{CMatrix, C64, ZERO};
use crate::error::{Error, Result};

/// Kronecker product: `(a⊗b)[i·r_b + k, j·c_b + l] = a[i,j]·b[k,l]`.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let (rb, cb) = (b.rows(), b.cols());
    CMatrix::from_fn(a.rows() * rb, a.cols() * cb, |r, c| a[(r / rb, c / cb)] * b[(r % rb, c % cb)])
}

/// Kronecker product of a list of matrices (left to right).
pub fn kron_all<'a>(ms: impl IntoIterator<Item = &'a CMatrix>) -> CMatrix {
    ms.into_iter().fold(CMatrix::identity(1), |acc, m| kron(&acc, m))
}

/// Precomputed index plan for applying a local operator to full-space
/// vectors without materialising the full-space matrix.
#[derive(Clone, Debug)]
pub struct LocalAction {
    /// Offset of each local basis state (targets in listed order, first
    /// target most significant) relative to a base index.
    offsets: Vec<usize>,
    /// Base indices: all target digits zero, control digit matching.
    bases: Vec<usize>,
}

impl LocalAction {
    pub fn new(layout: &RegisterLayout, targets: &[usize], control: Option<(usize, u8)>) -> Result<Self> {
        layout.check_targets(targets)?;
        if let Some((c, polarity)) = control {
            if c >= layout.len() {
                return Err(Error::SubsystemOutOfRange { index: c, len: layout.len() });
            }
            if targets.contains(&c) {
                return Err(Error::InvalidArgument(format!("control subsystem {c} is also a target")));
            }
            if layout.dim(c) != 2 {
                return Err(Error::DimensionMismatch(format!(
                    "control subsystem {c} has dimension {}, expected 2",
                    layout.dim(c)
                )));
            }
            if polarity > 1 {
                return Err(Error::InvalidArgument(format!("control polarity {polarity}")));
            }
        }
        let strides = layout.strides();
        let local_dim = layout.dim_of(targets);
        let mut offsets = Vec::with_capacity(local_dim);
        for s in 0..local_dim {
            let mut rem = s;
            let mut off = 0;
            for &t in targets.iter().rev() {
                let d = layout.dim(t);
                off += (rem % d) * strides[t];
                rem /= d;
            }
            offsets.push(off);
        }
        let rest = layout.complement(targets);
        let mut bases = vec![0usize];
        for &f in &rest {
            let allowed: Vec<usize> = match control {
                Some((c, p)) if c == f => vec![p as usize],
                _ => (0..layout.dim(f)).collect(),
            };
            bases = bases.iter().flat_map(|&b| allowed.iter().map(move |&digit| b + digit * strides[f])).collect();
        }
        Ok(LocalAction { offsets, bases })
    }

    pub fn local_dim(&self) -> usize {
        self.offsets.len()
    }

    /// In-place `v ← (op ⊗ Id) v` on the selected block.
    pub fn apply(&self, op: &CMatrix, v: &mut [C64]) {
        let n = self.offsets.len();
        debug_assert_eq!(op.rows(), n);
        let mut buf = vec![ZERO; n];
        let mut out = vec![ZERO; n];
        for &base in &self.bases {
            for (b, &off) in buf.iter_mut().zip(&self.offsets) {
                *b = v[base + off];
            }
            for (i, o) in out.iter_mut().enumerate() {
                let row = &op.as_slice()[i * n..(i + 1) * n];
                *o = row.iter().zip(&buf).map(|(a, x)| a * x).sum();
            }
            for (&o, &off) in out.iter().zip(&self.offsets) {
                v[base + off] = o;
            }
        }
    }

    /// In-place `v ← (op† ⊗ Id) v` on the selected block.
    pub fn apply_adjoint(&self, op: &CMatrix, v: &mut [C64]) {
        self.apply(&op.adjoint(), v);
    }
}

fn check_local_dim(op: &CMatrix, layout: &RegisterLayout, targets: &[usize]) -> Result<()> {
    let want = layout.dim_of(targets);
    if !op.is_square() || op.rows() != want {
        return Err(Error::DimensionMismatch(format!(
            "operator is {}x{}, targets span dimension {}",
            op.rows(),
            op.cols(),
            want
        )));
    }
    Ok(())
}

fn materialise(action: &LocalAction, op: &CMatrix, n: usize) -> CMatrix {
    let mut out = CMatrix::identity(n);
    let mut col = vec![ZERO; n];
    for j in 0..n {
        col.iter_mut().for_each(|x| *x = ZERO);
        col[j] = C64::new(1.0, 0.0);
        action.apply(op, &mut col);
        out.set_col(j, &col);
    }
    out
}

/// Full-space operator acting as `op` on `targets` (in the listed order)
/// and as the identity on every other factor.
pub fn embed(op: &CMatrix, targets: &[usize], layout: &RegisterLayout) -> Result<CMatrix> {
    layout.check_targets(targets)?;
    check_local_dim(op, layout, targets)?;
    let action = LocalAction::new(layout, targets, None)?;
    Ok(materialise(&action, op, layout.total_dim()))
}

/// Acts as `embed(op, targets)` when subsystem `ctrl` is in state
/// `|polarity⟩` and as the identity otherwise.
pub fn controlled(
    op: &CMatrix,
    ctrl: usize,
    polarity: u8,
    targets: &[usize],
    layout: &RegisterLayout,
) -> Result<CMatrix> {
    layout.check_targets(targets)?;
    check_local_dim(op, layout, targets)?;
    let action = LocalAction::new(layout, targets, Some((ctrl, polarity)))?;
    Ok(materialise(&action, op, layout.total_dim()))
}

/// Partial trace over every factor not listed in `keep`; the kept factors
/// appear in the order given.
pub fn partial_trace(m: &CMatrix, layout: &RegisterLayout, keep: &[usize]) -> Result<CMatrix> {
    let n = layout.total_dim();
    if !m.is_square() || m.rows() != n {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} matrix for a layout of dimension {}",
            m.rows(),
            m.cols(),
            n
        )));
    }
    layout.check_targets(keep)?;
    let kept = LocalAction::new(layout, keep, None)?;
    let k = kept.local_dim();
    let mut out = CMatrix::zeros(k, k);
    for &base in &kept.bases {
        for (a, &oa) in kept.offsets.iter().enumerate() {
            for (b, &ob) in kept.offsets.iter().enumerate() {
                out[(a, b)] += m[(base + oa, base + ob)];
            }
        }
    }
    Ok(out)
}

/// Reorders the tensor factors of a state vector: factor `perm[i]` of the
/// input becomes factor `i` of the output.
pub fn permute_factors(v: &[C64], layout: &RegisterLayout, perm: &[usize]) -> Result<Vec<C64>> {
    let mut sorted = perm.to_vec();
    sorted.sort_unstable();
    if sorted != (0..layout.len()).collect::<Vec<_>>() {
        return Err(Error::InvalidArgument(format!("{perm:?} is not a factor permutation")));
    }
    let new_dims: Vec<usize> = perm.iter().map(|&p| layout.dim(p)).collect();
    let mut new_strides = vec![1; perm.len()];
    for i in (0..perm.len().saturating_sub(1)).rev() {
        new_strides[i] = new_strides[i + 1] * new_dims[i + 1];
    }
    let mut out = vec![ZERO; v.len()];
    for (idx, &amp) in v.iter().enumerate() {
        let digits = layout.digits(idx);
        let new_idx: usize = perm.iter().zip(&new_strides).map(|(&p, s)| digits[p] * s).sum();
        out[new_idx] = amp;
    }
    Ok(out)
}
