#![allow(dead_code)]

use uctrl_core::linalg::random::rng_from_seed;
use uctrl_core::linalg::{haar_unitary, haar_unitary_rng, CMatrix, Factor, Permutation, RegisterLayout, C64};
use uctrl_core::model::{OracleAlgorithm, QueryLetter};

pub fn haar_list(d: usize, n: usize, seed: u64) -> Vec<CMatrix> {
    let mut rng = rng_from_seed(seed);
    (0..n).map(|_| haar_unitary_rng(d, &mut rng)).collect()
}

/// `Σ_π sgn(π) Π_i M[i, π(i)]`.
pub fn leibniz_det(m: &CMatrix) -> C64 {
    let n = m.rows();
    Permutation::all(n).iter().map(|p| (0..n).map(|i| m[(i, p.apply(i))]).product::<C64>() * f64::from(p.sign())).sum()
}

pub fn delete_row_col(m: &CMatrix, r: usize, c: usize) -> CMatrix {
    let n = m.rows();
    CMatrix::from_fn(n - 1, n - 1, |i, j| m[(i + usize::from(i >= r), j + usize::from(j >= c))])
}

pub fn diag_phase(d: usize, theta: f64) -> CMatrix {
    let mut e = vec![C64::new(1.0, 0.0); d];
    e[d - 1] = C64::from_polar(1.0, theta);
    CMatrix::diag(&e)
}

/// Id-only programs with `k` queries, from several layouts and random
/// interleaved gates. None of them can neutralise when `d ∤ k`.
pub fn id_only_candidates(d: usize, k: usize, seed: u64) -> Vec<OracleAlgorithm> {
    let mut rng = rng_from_seed(seed);
    let mut out = Vec::new();
    // parallel queries on k qudits, random gates around them
    {
        let layout = RegisterLayout::new(vec![Factor::ancilla(d, 0); k]).unwrap();
        let n = layout.total_dim();
        let mut alg = OracleAlgorithm::new("parallel", layout, d);
        let v = haar_unitary_rng(n, &mut rng);
        alg.gate(v.clone(), &[]).unwrap();
        for j in 0..k {
            alg.query(QueryLetter::Id, &[j]).unwrap();
        }
        alg.gate(v.adjoint(), &[]).unwrap();
        out.push(alg);
    }
    // sequential queries on one qudit with random gates in between
    {
        let layout = RegisterLayout::new(vec![Factor::ancilla(d, 0)]).unwrap();
        let mut alg = OracleAlgorithm::new("sequential", layout, d);
        for _ in 0..k {
            alg.gate(haar_unitary_rng(d, &mut rng), &[]).unwrap();
            alg.query(QueryLetter::Id, &[0]).unwrap();
        }
        alg.gate(haar_unitary_rng(d, &mut rng), &[]).unwrap();
        out.push(alg);
    }
    // one qudit plus a qubit workspace, queries alternate through a random entangler
    {
        let layout = RegisterLayout::new(vec![Factor::ancilla(d, 0), Factor::ancilla(2, 1)]).unwrap();
        let n = layout.total_dim();
        let mut alg = OracleAlgorithm::new("entangled", layout, d);
        for _ in 0..k {
            alg.gate(haar_unitary_rng(n, &mut rng), &[]).unwrap();
            alg.query(QueryLetter::Id, &[0]).unwrap();
        }
        alg.gate(haar_unitary_rng(n, &mut rng), &[]).unwrap();
        out.push(alg);
    }
    // parallel queries with a postselection on the first qudit
    {
        let layout = RegisterLayout::new(vec![Factor::ancilla(d, 0); k.max(1)]).unwrap();
        let n = layout.total_dim();
        let mut alg = OracleAlgorithm::new("postselected", layout, d);
        alg.gate(haar_unitary_rng(n, &mut rng), &[]).unwrap();
        for j in 0..k {
            alg.query(QueryLetter::Id, &[j]).unwrap();
        }
        alg.gate(haar_unitary_rng(n, &mut rng), &[]).unwrap();
        let p0 = CMatrix::outer(&CMatrix::basis(d, 0), &CMatrix::basis(d, 0));
        alg.project(p0, &[0]).unwrap();
        out.push(alg);
    }
    out
}

/// Exactly achieves `U ↦ U` but leaves `U|0⟩` in the ancilla, so the
/// garbage direction depends on `U`.
pub fn dirty_identity(d: usize) -> OracleAlgorithm {
    let layout = RegisterLayout::new(vec![Factor::task(d), Factor::ancilla(d, 0)]).unwrap();
    let mut alg = OracleAlgorithm::new("dirty", layout, d);
    alg.query(QueryLetter::Id, &[0]).unwrap();
    alg.query(QueryLetter::Id, &[1]).unwrap();
    alg
}

pub fn haar(d: usize, seed: u64) -> CMatrix {
    haar_unitary(d, seed)
}
