//! Topological witnesses for the controlled-power dichotomy.
//!
//! A program that exactly achieves `c-U^m` carries a phase `e^{iφ(U)}`,
//! and the matrix element [`extract_h`] turns it into an `m`-homogeneous
//! function on `U(d)`. Along the central loop `e^{2πit}·Id` such a function
//! winds `m` times, while continuity forces the winding to be a multiple of
//! `d`. The probe samples the witness along loops and reports whether the
//! trace is valid (nonvanishing, resolvable under refinement) and what it
//! winds. The Borsuk–Ulam scan covers the even-`d` special case.

mod sphere;
mod winding;

use serde::Serialize;

pub use sphere::{bu_map_g, bu_scan, BuScan, SphereGrid};
pub use winding::{
    central_loop, generator_loop, phase_winding, refine, LoopKind, LoopTrace, Refined, DEFAULT_THRESHOLD, K_MAX, K_MIN,
    STEP_BOUND,
};

use crate::linalg::{CMatrix, LocalAction, Role, C64, ZERO};
use crate::model::Program;
use crate::{Error, Result};

fn check_controlled(p: &dyn Program) -> Result<()> {
    let layout = p.layout();
    let ok = layout.len() > 1
        && layout.factors()[0].role == Role::Control
        && p.input_register().first() == Some(&0)
        && p.output_register().first() == Some(&0);
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidLayout("phase extraction needs a control qubit as factor 0 of both registers".into()))
    }
}

fn check_oracle(p: &dyn Program, u: &CMatrix) -> Result<()> {
    if u.rows() != p.oracle_dim() || !u.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} oracle for a program over U({})",
            u.rows(),
            u.cols(),
            p.oracle_dim()
        )));
    }
    Ok(())
}

fn run(p: &dyn Program, u: &CMatrix, v: Vec<C64>) -> Result<Vec<C64>> {
    let mut vs = vec![v];
    p.apply_batch(u, &mut vs)?;
    Ok(vs.pop().unwrap_or_default())
}

/// `⟨0|(U^m⊗Id)(⟨1|A(U)|1⟩)†(⟨0|A(U)|0⟩)|0⟩` with the control as factor 0.
///
/// For an exact achiever of `c-U^m` this is `e^{−iφ(U)}·p₀(U)`, where `p₀`
/// is the success probability on the all-zero input.
pub fn extract_h(p: &dyn Program, u: &CMatrix, m: i32) -> Result<C64> {
    check_controlled(p)?;
    check_oracle(p, u)?;
    let layout = p.layout();
    let n = layout.total_dim();
    let half = n / 2;
    let mut zero = vec![ZERO; n];
    zero[0] = C64::new(1.0, 0.0);
    // |1⟩ ⊗ U^{−m}|0⟩ on the input task factors ⊗ |0⟩, so that the
    // adjoint never has to be formed
    let mut one = vec![ZERO; n];
    one[half] = C64::new(1.0, 0.0);
    LocalAction::new(layout, &p.input_register()[1..], None)?.apply(&u.pow_unitary(-m), &mut one);
    let y = run(p, u, zero)?;
    let x = run(p, u, one)?;
    Ok((0..half).map(|r| x[half + r].conj() * y[r]).sum())
}

/// `h₊/p₊` for the input `|+⟩|0⟩`: `p₊` is its success probability and
/// `h₊ = tr[A ρ A† (|1⟩⟨0| ⊗ U^m ⊗ Id)]` on the output register.
///
/// Exact achievers give `½e^{−iφ(U)}`.
pub fn extract_fplus(p: &dyn Program, u: &CMatrix, m: i32) -> Result<C64> {
    check_controlled(p)?;
    check_oracle(p, u)?;
    let layout = p.layout();
    let n = layout.total_dim();
    let half = n / 2;
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut psi = vec![ZERO; n];
    psi[0] = C64::new(s, 0.0);
    psi[half] = C64::new(s, 0.0);
    let v = run(p, u, psi)?;
    let p_plus: f64 = v.iter().map(|z| z.norm_sqr()).sum();
    if p_plus <= crate::model::checks::ZERO_PROB {
        return Err(Error::ModelViolation { prob: p_plus, context: "|+⟩|0⟩".into() });
    }
    let mut w = v.clone();
    LocalAction::new(layout, &p.output_register()[1..], None)?.apply(&u.pow_unitary(m), &mut w);
    let h_plus: C64 = (0..half).map(|r| v[half + r].conj() * w[r]).sum();
    Ok(h_plus / p_plus)
}

/// `⟨0|A(U)|0⟩ / ‖A(U)|0⟩‖` over the full space.
pub fn neutral_phase(p: &dyn Program, u: &CMatrix) -> Result<C64> {
    check_oracle(p, u)?;
    let n = p.layout().total_dim();
    let mut zero = vec![ZERO; n];
    zero[0] = C64::new(1.0, 0.0);
    let v = run(p, u, zero)?;
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>();
    if norm <= crate::model::checks::ZERO_PROB {
        return Err(Error::ModelViolation { prob: norm, context: "all-zero input".into() });
    }
    Ok(v[0] / norm.sqrt())
}

/// Which phase witness a probe samples.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Witness {
    #[default]
    H,
    FPlus,
}

#[derive(Clone, Copy, Debug)]
pub struct ProbeOptions {
    pub witness: Witness,
    pub threshold: f64,
    /// Also sample the generator loop `diag(e^{2πit}, 1, …)`.
    pub generator: bool,
}

impl Default for ProbeOptions {
    fn default() -> Self {
        ProbeOptions { witness: Witness::H, threshold: DEFAULT_THRESHOLD, generator: true }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ProbeReport {
    pub m: i32,
    pub d: usize,
    /// Winding along the central loop (nominal when the trace is invalid).
    pub winding: i64,
    /// Both loops sampled without vanishing values or unresolved jumps.
    pub valid: bool,
    pub min_abs: f64,
    pub witness: Witness,
    pub central: Refined,
    pub generator: Option<Refined>,
    /// Earliest unresolved break on either loop.
    pub break_at: Option<f64>,
    /// A valid trace winds exactly `m`.
    pub winding_matches_m: bool,
    /// `m ≡ 0 (mod d)`.
    pub divisible: bool,
    /// Valid traces wind `m` and `d | m`; invalid traces satisfy it vacuously.
    pub consistent: bool,
}

impl ProbeReport {
    pub fn summary_json(&self) -> serde_json::Value {
        serde_json::json!({
            "m": self.m,
            "d": self.d,
            "winding": self.winding,
            "valid": self.valid,
            "min_abs": self.min_abs,
        })
    }
}

/// Samples the witness of a would-be `c-U^m` program along the central loop
/// (and the generator loop), refining until the traces resolve or `K_MAX`.
pub fn dichotomy_probe(p: &dyn Program, m: i32, d: usize, k: usize, opts: &ProbeOptions) -> Result<ProbeReport> {
    if p.oracle_dim() != d {
        return Err(Error::DimensionMismatch(format!("probe over U({d}) for a program over U({})", p.oracle_dim())));
    }
    check_controlled(p)?;
    let f = |u: &CMatrix| match opts.witness {
        Witness::H => extract_h(p, u, m),
        Witness::FPlus => extract_fplus(p, u, m),
    };
    let central = refine(LoopKind::Central, d, k, &f, opts.threshold)?;
    let generator = if opts.generator { Some(refine(LoopKind::Generator, d, k, &f, opts.threshold)?) } else { None };
    let valid = central.valid && generator.as_ref().is_none_or(|g| g.valid);
    let min_abs = generator.as_ref().map_or(central.min_abs, |g| g.min_abs.min(central.min_abs));
    let break_at =
        central.breaks.iter().chain(generator.iter().flat_map(|g| g.breaks.iter())).copied().reduce(f64::min);
    let winding_matches_m = central.winding == i64::from(m);
    let divisible = m.rem_euclid(d as i32) == 0;
    Ok(ProbeReport {
        m,
        d,
        winding: central.winding,
        valid,
        min_abs,
        witness: opts.witness,
        consistent: !valid || (winding_matches_m && divisible),
        central,
        generator,
        break_at,
        winding_matches_m,
        divisible,
    })
}
