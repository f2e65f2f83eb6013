//! Seeded sampling of Haar-random unitaries and states.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::matrix::{CMatrix, C64, ZERO};

pub type SampleRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> SampleRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Standard complex Gaussian: real and imaginary parts each `N(0, 1/2)`.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn gaussian_matrix<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| complex_gaussian(rng))
}

/// Haar-distributed unitary from the given generator.
///
/// QR of a Ginibre matrix by modified Gram–Schmidt, run twice per column
/// for orthogonality. Gram–Schmidt yields R with a positive real diagonal,
/// which is the phase convention that makes the law left-invariant.
pub fn haar_unitary_rng<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CMatrix {
    let z = gaussian_matrix(d, d, rng);
    let mut q: Vec<Vec<C64>> = Vec::with_capacity(d);
    for j in 0..d {
        let mut col = z.col(j);
        for _ in 0..2 {
            for prev in &q {
                let proj: C64 = prev.iter().zip(&col).map(|(a, b)| a.conj() * b).sum();
                for (c, p) in col.iter_mut().zip(prev) {
                    *c -= proj * p;
                }
            }
        }
        let norm: f64 = col.iter().map(C64::norm_sqr).sum::<f64>().sqrt();
        col.iter_mut().for_each(|c| *c /= norm);
        q.push(col);
    }
    CMatrix::from_cols(&q).expect("square")
}

/// Deterministic Haar unitary for a seed.
pub fn haar_unitary(d: usize, seed: u64) -> CMatrix {
    haar_unitary_rng(d, &mut rng_from_seed(seed))
}

/// Haar-random pure state of dimension `dim` as a column vector.
pub fn haar_state<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CMatrix {
    let mut v: Vec<C64> = (0..dim).map(|_| complex_gaussian(rng)).collect();
    let norm: f64 = v.iter().map(C64::norm_sqr).sum::<f64>().sqrt();
    if norm == 0.0 {
        v = vec![ZERO; dim];
        v[0] = C64::new(1.0, 0.0);
    } else {
        v.iter_mut().for_each(|x| *x /= norm);
    }
    CMatrix::column(v)
}

/// Uniformly random unimodular complex number.
pub fn unimodular<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::from_polar(1.0, rng.random_range(-std::f64::consts::PI..std::f64::consts::PI))
}
