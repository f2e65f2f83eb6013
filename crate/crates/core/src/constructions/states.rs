//! Fixed states used by the constructions, and unitary completion.

use crate::error::{Error, Result};
use crate::linalg::perm::{factorial, Permutation};
use crate::linalg::{CMatrix, C64, ONE, ZERO};

pub const CHI_MAX: usize = 5;

/// `|χ_d⟩ = (1/√d!) Σ_π sgn(π) |π(0)…π(d−1)⟩`, the totally antisymmetric
/// state of `d` qudits, satisfying `⟨χ_d|U^{⊗d}|χ_d⟩ = det U`.
#[derive(Clone, Debug)]
pub struct ChiState {
    pub d: usize,
    pub amplitudes: Vec<C64>,
}

fn digits_index(digits: &[usize], d: usize) -> usize {
    digits.iter().fold(0, |acc, &x| acc * d + x)
}

pub fn chi_state(d: usize) -> Result<ChiState> {
    if d > CHI_MAX {
        return Err(Error::TooLarge { what: "chi_state", n: d, max: CHI_MAX });
    }
    if d == 0 {
        return Err(Error::InvalidArgument("chi_state needs d ≥ 1".into()));
    }
    let norm = 1.0 / (factorial(d) as f64).sqrt();
    let mut amplitudes = vec![ZERO; d.pow(d as u32)];
    for p in Permutation::all(d) {
        amplitudes[digits_index(p.images(), d)] = C64::new(f64::from(p.sign()) * norm, 0.0);
    }
    Ok(ChiState { d, amplitudes })
}

/// `(1/√d) Σ_i |ii⟩`.
pub fn bell_state(d: usize) -> Vec<C64> {
    let mut v = vec![ZERO; d * d];
    let a = C64::new(1.0 / (d as f64).sqrt(), 0.0);
    for i in 0..d {
        v[i * d + i] = a;
    }
    v
}

/// The encoder columns `v_j = (1/√(d−1)!) Σ_{π(0)=j} sgn(π) |π(1)…π(d−1)⟩`
/// on `d−1` qudits, one for each `j < d`.
pub fn conjugation_encoder(d: usize) -> Result<Vec<Vec<C64>>> {
    if !(2..=CHI_MAX).contains(&d) {
        return Err(Error::Unsupported(format!("conjugation encoder for d = {d}")));
    }
    let norm = 1.0 / (factorial(d - 1) as f64).sqrt();
    let dim = d.pow(d as u32 - 1);
    let mut cols = vec![vec![ZERO; dim]; d];
    for p in Permutation::all(d) {
        let j = p.apply(0);
        cols[j][digits_index(&p.images()[1..], d)] = C64::new(f64::from(p.sign()) * norm, 0.0);
    }
    Ok(cols)
}

/// A unitary with the given columns pinned; the remaining columns are the
/// standard basis vectors, in order, orthonormalised against everything
/// placed before them.
pub fn complete_unitary(n: usize, pinned: &[(usize, Vec<C64>)]) -> Result<CMatrix> {
    let mut cols: Vec<Option<Vec<C64>>> = vec![None; n];
    let mut basis: Vec<Vec<C64>> = Vec::new();
    for (j, v) in pinned {
        if *j >= n || v.len() != n || cols[*j].is_some() {
            return Err(Error::InvalidArgument(format!("bad pinned column {j}")));
        }
        cols[*j] = Some(v.clone());
        basis.push(v.clone());
    }
    let mut candidate = 0;
    for slot in cols.iter_mut().filter(|c| c.is_none()) {
        loop {
            if candidate >= n {
                return Err(Error::InvalidArgument("pinned columns are not orthonormal".into()));
            }
            let mut v = vec![ZERO; n];
            v[candidate] = ONE;
            candidate += 1;
            for _ in 0..2 {
                for b in &basis {
                    let overlap: C64 = b.iter().zip(&v).map(|(x, y)| x.conj() * y).sum();
                    for (vi, bi) in v.iter_mut().zip(b) {
                        *vi -= overlap * bi;
                    }
                }
            }
            let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if norm > 1e-6 {
                v.iter_mut().for_each(|z| *z /= norm);
                basis.push(v.clone());
                *slot = Some(v);
                break;
            }
        }
    }
    let m = CMatrix::from_cols(&cols.into_iter().map(|c| c.expect("filled")).collect::<Vec<_>>())?;
    m.ensure_unitary()?;
    Ok(m)
}
