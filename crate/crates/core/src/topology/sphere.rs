use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::linalg::{CMatrix, C64};
use crate::{Error, Result};

/// The odd map `S³ → U(d)`, `d` even: each pair of rows `(i, d−1−i)` with
/// `i < d/2` carries the quaternion block of `x`.
pub fn bu_map_g(x: &[f64; 4], d: usize) -> Result<CMatrix> {
    if !d.is_multiple_of(2) || d == 0 {
        return Err(Error::InvalidArgument(format!("bu_map_g needs an even dimension, got {d}")));
    }
    let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidArgument(format!("x has norm {norm}, expected 1")));
    }
    let [x1, x2, x3, x4] = *x;
    let n = d / 2;
    let mut g = CMatrix::zeros(d, d);
    for i in 0..d {
        let j = d - 1 - i;
        if i < n {
            g[(i, i)] = C64::new(x1, x2);
            g[(i, j)] = C64::new(-x3, x4);
        } else {
            g[(i, i)] = C64::new(x1, -x2);
            g[(i, j)] = C64::new(x3, x4);
        }
    }
    Ok(g)
}

/// Midpoint product grid on `S³` in hyperspherical coordinates:
/// `ψ, θ ∈ (0, π)` with `n` cells each and `ϕ ∈ (0, 2π)` with `2n`.
///
/// Midpoints make the grid closed under `x ↦ −x`, which is
/// `(i, j, k) ↦ (n−1−i, n−1−j, k+n mod 2n)`.
#[derive(Clone, Debug)]
pub struct SphereGrid {
    n: usize,
    points: Vec<[f64; 4]>,
}

impl SphereGrid {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("sphere grid needs n ≥ 1".into()));
        }
        let h = PI / n as f64;
        let mut points = Vec::with_capacity(2 * n * n * n);
        for i in 0..n {
            let psi = (i as f64 + 0.5) * h;
            for j in 0..n {
                let theta = (j as f64 + 0.5) * h;
                for k in 0..2 * n {
                    let phi = (k as f64 + 0.5) * h;
                    let (sp, st) = (psi.sin(), theta.sin());
                    points.push([psi.cos(), sp * theta.cos(), sp * st * phi.cos(), sp * st * phi.sin()]);
                }
            }
        }
        Ok(SphereGrid { n, points })
    }

    /// Smallest grid with at least `count` points.
    pub fn with_at_least(count: usize) -> Result<Self> {
        let mut n = 1;
        while 2 * n * n * n < count {
            n += 1;
        }
        Self::new(n)
    }

    pub fn resolution(&self) -> usize {
        self.n
    }

    pub fn points(&self) -> &[[f64; 4]] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn antipode(&self, index: usize) -> usize {
        let n = self.n;
        let (i, rest) = (index / (2 * n * n), index % (2 * n * n));
        let (j, k) = (rest / (2 * n), rest % (2 * n));
        ((n - 1 - i) * n + (n - 1 - j)) * 2 * n + (k + n) % (2 * n)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct BuScan {
    pub points: usize,
    pub min_abs: f64,
    pub argmin: [f64; 4],
    /// `max |h(g(−x)) + h(g(x))|` over the grid.
    pub oddness_residual: f64,
}

/// Evaluates `h ∘ g` over the grid.
pub fn bu_scan<F>(h: &F, d: usize, grid: &SphereGrid) -> Result<BuScan>
where
    F: Fn(&CMatrix) -> Result<C64> + Sync + ?Sized,
{
    let values = grid.points().par_iter().map(|x| h(&bu_map_g(x, d)?)).collect::<Result<Vec<C64>>>()?;
    let (imin, min_abs) = values.iter().enumerate().map(|(i, v)| (i, v.norm())).fold((0, f64::INFINITY), |acc, x| {
        if x.1 < acc.1 {
            x
        } else {
            acc
        }
    });
    let oddness_residual = (0..values.len()).map(|i| (values[i] + values[grid.antipode(i)]).norm()).fold(0.0, f64::max);
    Ok(BuScan {
        points: values.len(),
        min_abs,
        argmin: grid.points().get(imin).copied().unwrap_or([0.0; 4]),
        oddness_residual,
    })
}
