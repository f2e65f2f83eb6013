use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;

use crate::linalg::{CMatrix, C64};
use crate::model::checks::wrap_angle;
use crate::{Error, Result};

/// Largest sample count reached by refinement.
pub const K_MAX: usize = 1 << 14;
pub const K_MIN: usize = 16;
/// Adjacent unwrapped phases must differ by less than this.
pub const STEP_BOUND: f64 = FRAC_PI_2;
/// Samples with modulus at or below this make a trace invalid.
pub const DEFAULT_THRESHOLD: f64 = 1e-6;
const ROUNDING_TOL: f64 = 0.05;
const MAX_BREAKS: usize = 16;

/// Closed loops in `U(d)` based at the identity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum LoopKind {
    /// `e^{2πit}·Id`.
    Central,
    /// `diag(e^{2πit}, 1, …, 1)`.
    Generator,
}

impl LoopKind {
    pub fn point(self, d: usize, t: f64) -> CMatrix {
        let z = C64::from_polar(1.0, TAU * t);
        match self {
            LoopKind::Central => CMatrix::identity(d).scale(z),
            LoopKind::Generator => {
                let mut e = vec![C64::new(1.0, 0.0); d];
                e[0] = z;
                CMatrix::diag(&e)
            }
        }
    }

    pub fn samples(self, d: usize, k: usize) -> Result<Vec<CMatrix>> {
        check_k(k)?;
        Ok((0..k).map(|i| self.point(d, i as f64 / k as f64)).collect())
    }
}

fn check_k(k: usize) -> Result<()> {
    if k < K_MIN {
        return Err(Error::InvalidArgument(format!("loop needs K ≥ {K_MIN}, got {k}")));
    }
    Ok(())
}

pub fn central_loop(d: usize, k: usize) -> Result<Vec<CMatrix>> {
    LoopKind::Central.samples(d, k)
}

pub fn generator_loop(d: usize, k: usize) -> Result<Vec<CMatrix>> {
    LoopKind::Generator.samples(d, k)
}

/// Samples of a complex function along a closed loop, unwrapped.
#[derive(Clone, Debug, Serialize)]
pub struct LoopTrace {
    pub d: usize,
    #[serde(rename = "K")]
    pub k: usize,
    pub t: Vec<f64>,
    pub values: Vec<C64>,
    pub unwrapped_phase: Vec<f64>,
    /// Nominal winding; only meaningful when `valid`.
    pub winding: i64,
    pub valid: bool,
    pub min_abs: f64,
    /// Largest absolute phase step, the closing step included.
    pub max_step: f64,
    pub rounding_residual: f64,
    /// Indices `k` whose step to `k+1` (cyclically) breaks the contract,
    /// or whose sample is too small.
    pub bad_steps: Vec<usize>,
}

impl LoopTrace {
    /// Builds a trace from samples at `t_k`; the loop closes from the last
    /// sample back to the first.
    pub fn from_values(d: usize, t: Vec<f64>, values: Vec<C64>, threshold: f64) -> LoopTrace {
        let k = values.len();
        let min_abs = values.iter().map(|z| z.norm()).fold(f64::INFINITY, f64::min);
        let mut unwrapped = Vec::with_capacity(k);
        let mut bad = Vec::new();
        let mut max_step = 0.0f64;
        let mut total = 0.0;
        for i in 0..k {
            let step = wrap_angle(values[(i + 1) % k].arg() - values[i].arg());
            if i == 0 {
                unwrapped.push(values[0].arg());
            } else {
                unwrapped.push(unwrapped[i - 1] + wrap_angle(values[i].arg() - values[i - 1].arg()));
            }
            max_step = max_step.max(step.abs());
            total += step;
            if step.abs() >= STEP_BOUND || values[i].norm() <= threshold {
                bad.push(i);
            }
        }
        let turns = total / TAU;
        let winding = turns.round() as i64;
        let rounding_residual = (turns - winding as f64).abs();
        let valid = bad.is_empty() && rounding_residual < ROUNDING_TOL && k > 0;
        LoopTrace {
            d,
            k,
            t,
            values,
            unwrapped_phase: unwrapped,
            winding,
            valid,
            min_abs,
            max_step,
            rounding_residual,
            bad_steps: bad,
        }
    }

    /// Evaluates `f` at `K` equally spaced points of the loop.
    pub fn sample<F>(kind: LoopKind, d: usize, k: usize, f: &F, threshold: f64) -> Result<LoopTrace>
    where
        F: Fn(&CMatrix) -> Result<C64> + Sync + ?Sized,
    {
        check_k(k)?;
        let t: Vec<f64> = (0..k).map(|i| i as f64 / k as f64).collect();
        let values = t.par_iter().map(|&s| f(&kind.point(d, s))).collect::<Result<Vec<_>>>()?;
        Ok(LoopTrace::from_values(d, t, values, threshold))
    }

    pub fn winding(&self) -> Result<i64> {
        if self.valid {
            Ok(self.winding)
        } else {
            let at = self.bad_steps.first().map_or(0.0, |&i| self.t[i]);
            Err(Error::NonConvergence { k: self.k, at })
        }
    }

    /// `t,re,im,unwrapped_phase` rows with a header.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,re,im,unwrapped_phase\n");
        for ((t, v), p) in self.t.iter().zip(&self.values).zip(&self.unwrapped_phase) {
            let _ = writeln!(out, "{t},{},{},{p}", v.re, v.im);
        }
        out
    }
}

/// Outcome of sampling with refinement.
#[derive(Clone, Debug, Serialize)]
pub struct Refined {
    pub kind: LoopKind,
    /// The last trace sampled (at `K_MAX` when refinement ran out).
    #[serde(skip)]
    pub trace: LoopTrace,
    pub k: usize,
    pub valid: bool,
    pub winding: i64,
    pub min_abs: f64,
    /// Bisected locations of the remaining breaks, empty when valid.
    pub breaks: Vec<f64>,
}

impl Refined {
    pub fn winding(&self) -> Result<i64> {
        if self.valid {
            Ok(self.winding)
        } else {
            Err(Error::NonConvergence { k: self.k, at: self.breaks.first().copied().unwrap_or(0.0) })
        }
    }
}

/// Samples at `k`, doubling up to [`K_MAX`] while the trace is invalid,
/// then bisects each remaining bad interval.
pub fn refine<F>(kind: LoopKind, d: usize, k: usize, f: &F, threshold: f64) -> Result<Refined>
where
    F: Fn(&CMatrix) -> Result<C64> + Sync + ?Sized,
{
    let mut k = k;
    let mut trace = LoopTrace::sample(kind, d, k, f, threshold)?;
    while !trace.valid && k < K_MAX {
        k = (k * 2).min(K_MAX);
        trace = LoopTrace::sample(kind, d, k, f, threshold)?;
    }
    let breaks = if trace.valid {
        Vec::new()
    } else {
        trace
            .bad_steps
            .iter()
            .take(MAX_BREAKS)
            .map(|&i| localize(kind, d, &trace, i, f, threshold))
            .collect::<Result<Vec<_>>>()?
    };
    Ok(Refined { kind, k, valid: trace.valid, winding: trace.winding, min_abs: trace.min_abs, breaks, trace })
}

/// Shrinks the bad interval starting at sample `i` onto the jump (or zero).
fn localize<F>(kind: LoopKind, d: usize, trace: &LoopTrace, i: usize, f: &F, threshold: f64) -> Result<f64>
where
    F: Fn(&CMatrix) -> Result<C64> + Sync + ?Sized,
{
    if trace.values[i].norm() <= threshold {
        return Ok(trace.t[i]);
    }
    let (mut a, mut b) = (trace.t[i], trace.t[i] + 1.0 / trace.k as f64);
    let (mut fa, mut fb) = (trace.values[i], trace.values[(i + 1) % trace.k]);
    while b - a > 1e-12 {
        let mid = 0.5 * (a + b);
        let fm = f(&kind.point(d, mid))?;
        if fm.norm() <= threshold {
            return Ok(mid);
        }
        let left = wrap_angle(fm.arg() - fa.arg()).abs();
        let right = wrap_angle(fb.arg() - fm.arg()).abs();
        if left >= right {
            b = mid;
            fb = fm;
        } else {
            a = mid;
            fa = fm;
        }
    }
    Ok((0.5 * (a + b)).rem_euclid(1.0))
}

/// Winding of `t ↦ e^{2πiwt}` is `w`: a sanity anchor for the unwrapping.
pub fn phase_winding(values: &[C64]) -> f64 {
    let k = values.len();
    (0..k).map(|i| wrap_angle(values[(i + 1) % k].arg() - values[i].arg())).sum::<f64>() / (2.0 * PI)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn circle(w: i64, k: usize) -> Vec<C64> {
        (0..k).map(|i| C64::from_polar(1.0, TAU * w as f64 * i as f64 / k as f64)).collect()
    }

    #[test]
    fn loop_samples() {
        let pts = central_loop(3, 16).unwrap();
        assert!(pts[0].approx_eq(&CMatrix::identity(3), 0.0));
        assert!(pts[8].approx_eq(&CMatrix::identity(3).scale_re(-1.0), 1e-15));
        assert!(central_loop(2, 8).is_err());
        let g = generator_loop(2, 16).unwrap();
        assert!((g[4][(0, 0)] - C64::new(0.0, 1.0)).norm() < 1e-15);
        assert_eq!(g[4][(1, 1)], C64::new(1.0, 0.0));
    }

    #[test]
    fn windings_of_circles() {
        for w in [-3, -1, 0, 1, 2, 5] {
            let k = 64;
            let t = (0..k).map(|i| i as f64 / k as f64).collect();
            let tr = LoopTrace::from_values(2, t, circle(w, k), DEFAULT_THRESHOLD);
            assert!(tr.valid);
            assert_eq!(tr.winding().unwrap(), w);
            assert!((phase_winding(&tr.values) - w as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn undersampled_and_vanishing_traces_are_invalid() {
        let t: Vec<f64> = (0..16).map(|i| i as f64 / 16.0).collect();
        // steps of 2π·5/16 > π/2
        assert!(!LoopTrace::from_values(2, t.clone(), circle(5, 16), 1e-6).valid);
        let mut v = circle(1, 16);
        v[3] = C64::new(0.0, 0.0);
        let tr = LoopTrace::from_values(2, t, v, 1e-6);
        assert!(!tr.valid);
        assert_eq!(tr.bad_steps, vec![3]);
        assert!(matches!(tr.winding(), Err(Error::NonConvergence { .. })));
    }

    #[test]
    fn refinement_resolves_fast_phases() {
        let f = |u: &CMatrix| Ok(u[(0, 0)].powi(20));
        let r = refine(LoopKind::Central, 2, 16, &f, DEFAULT_THRESHOLD).unwrap();
        assert!(r.valid);
        assert_eq!(r.winding, 20);
        assert_eq!(r.k, 128);
    }

    #[test]
    fn refinement_localizes_a_jump() {
        // sign flip at t = 0.3
        let f = |u: &CMatrix| {
            let t = u[(0, 0)].arg().rem_euclid(TAU) / TAU;
            Ok(if t < 0.3 { C64::new(1.0, 0.0) } else { C64::new(-1.0, 0.0) })
        };
        let r = refine(LoopKind::Generator, 2, 16, &f, DEFAULT_THRESHOLD).unwrap();
        assert!(!r.valid);
        assert_eq!(r.k, K_MAX);
        assert!(r.breaks.iter().any(|b| (b - 0.3).abs() < 1e-6), "{:?}", r.breaks);
        assert!(r.winding().is_err());
    }

    #[test]
    fn csv_has_header_and_rows() {
        let t = (0..16).map(|i| i as f64 / 16.0).collect();
        let csv = LoopTrace::from_values(2, t, circle(1, 16), 1e-6).to_csv();
        assert!(csv.starts_with("t,re,im,unwrapped_phase\n"));
        assert_eq!(csv.lines().count(), 17);
    }
}
