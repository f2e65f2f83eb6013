//! Builders for the shipped circuits.
//!
//! Layout conventions: when a control qubit is present it is factor 0;
//! every ancilla starts in `|0⟩`; the task registers are recorded on the
//! algorithm (see [`Program::input_register`]).

// builder names keep the c-U notation
#![allow(non_snake_case)]

pub mod states;

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::{gates, principal_root, CMatrix, Factor, RegisterLayout, C64};
use crate::model::{OracleAlgorithm, Program, QueryLetter};

pub use states::{bell_state, chi_state, complete_unitary, conjugation_encoder, ChiState};

/// Largest oracle dimension the builders accept.
pub const MAX_D: usize = 4;

fn check_d(name: &str, d: usize, lo: usize, hi: usize) -> Result<()> {
    if d < lo || d > hi {
        return Err(Error::Unsupported(format!("{name} needs {lo} ≤ d ≤ {hi}, got d = {d}")));
    }
    Ok(())
}

fn ket0(dim: usize) -> CMatrix {
    CMatrix::outer(&CMatrix::basis(dim, 0), &CMatrix::basis(dim, 0))
}

/// Unitary on two qudits whose first column is `|ψ⁺⟩`.
pub fn bell_preparation(d: usize) -> Result<CMatrix> {
    complete_unitary(d * d, &[(0, bell_state(d))])
}

/// `V` on `d` qudits with `V|0…0⟩ = |χ_d⟩`.
pub fn chi_preparation(d: usize) -> Result<CMatrix> {
    complete_unitary(d.pow(d as u32), &[(0, chi_state(d)?.amplitudes)])
}

/// `V_conj` on `d−1` qudits with `V_conj(|j⟩⊗|0…0⟩) = |v_j⟩`.
pub fn conjugation_unitary(d: usize) -> Result<CMatrix> {
    let cols = conjugation_encoder(d)?;
    let stride = d.pow(d as u32 - 2);
    let pinned: Vec<(usize, Vec<C64>)> = cols.into_iter().enumerate().map(|(j, v)| (j * stride, v)).collect();
    complete_unitary(d.pow(d as u32 - 1), &pinned)
}

/// `V_conj`, one `id` query per slot, `V_conj†`.
fn conjugation_block(alg: &mut OracleAlgorithm, d: usize, slots: &[usize]) -> Result<()> {
    let v = conjugation_unitary(d)?;
    let vd = v.adjoint();
    alg.gate(v, slots)?;
    for &s in slots {
        alg.query(QueryLetter::Id, &[s])?;
    }
    alg.gate(vd, slots)
}

/// Controlled-swap trick: layout `[control, task, ancilla]`; with control
/// `|0⟩` the query lands on the ancilla, with `|1⟩` on the task.
pub fn kitaev_cswap(d: usize) -> Result<OracleAlgorithm> {
    check_d("kitaev", d, 2, MAX_D)?;
    let layout = RegisterLayout::new(vec![Factor::control(), Factor::task(d), Factor::ancilla(d, 0)])?;
    let mut alg = OracleAlgorithm::new("kitaev", layout, d);
    alg.controlled_gate(gates::swap(d), &[1, 2], 0, 0)?;
    alg.query(QueryLetter::Id, &[1])?;
    alg.controlled_gate(gates::swap(d), &[1, 2], 0, 0)?;
    Ok(alg)
}

/// `A_∅(U) = V† U^{⊗d} V` on `d` ancilla qudits.
pub fn neutraliser_parallel(d: usize) -> Result<OracleAlgorithm> {
    check_d("neutraliser", d, 2, MAX_D)?;
    let layout = RegisterLayout::new(vec![Factor::ancilla(d, 0); d])?;
    let mut alg = OracleAlgorithm::new("neutraliser", layout, d);
    let v = chi_preparation(d)?;
    alg.gate(v.clone(), &[])?;
    for k in 0..d {
        alg.query(QueryLetter::Id, &[k])?;
    }
    alg.gate(v.adjoint(), &[])?;
    Ok(alg)
}

fn dong_layout(d: usize) -> Result<RegisterLayout> {
    let mut factors = vec![Factor::control(), Factor::task(d)];
    factors.extend(std::iter::repeat_n(Factor::ancilla(d, 0), d));
    RegisterLayout::new(factors)
}

fn dong_steps(alg: &mut OracleAlgorithm, d: usize, letter: &QueryLetter) -> Result<()> {
    let anc: Vec<usize> = (2..2 + d).collect();
    let v = chi_preparation(d)?;
    alg.gate(v.clone(), &anc)?;
    for &slot in &anc {
        alg.controlled_gate(gates::swap(d), &[1, slot], 0, 0)?;
        alg.query(letter.clone(), &[1])?;
        alg.controlled_gate(gates::swap(d), &[1, slot], 0, 0)?;
    }
    alg.gate(v.adjoint(), &anc)
}

/// Controlled `U^d`: the control-`|0⟩` branch routes the `d` queries into
/// an antisymmetric ancilla register where they only contribute `det U`.
pub fn dong_cUd(d: usize) -> Result<OracleAlgorithm> {
    check_d("dong", d, 2, MAX_D)?;
    let mut alg = OracleAlgorithm::new("dong", dong_layout(d)?, d);
    dong_steps(&mut alg, d, &QueryLetter::Id)?;
    Ok(alg)
}

/// Maximum `|m|` accepted by [`power_cUm`].
pub const MAX_POWER: i32 = 8;

/// Controlled `U^m` for `d | m` from `|m|/d` copies of [`dong_cUd`]
/// sharing one ancilla register; `inv` queries when `m < 0`.
pub fn power_cUm(d: usize, m: i32) -> Result<OracleAlgorithm> {
    check_d("power", d, 2, MAX_D)?;
    if m == 0 || m.abs() > MAX_POWER {
        return Err(Error::Unsupported(format!("power needs 0 < |m| ≤ {MAX_POWER}, got m = {m}")));
    }
    if m % d as i32 != 0 {
        return Err(Error::Unsupported(format!("d ∤ m: no such algorithm exists (d = {d}, m = {m})")));
    }
    let letter = if m > 0 { QueryLetter::Id } else { QueryLetter::Inv };
    let mut alg = OracleAlgorithm::new(format!("power{m}"), dong_layout(d)?, d);
    for _ in 0..m.unsigned_abs() as usize / d {
        dong_steps(&mut alg, d, &letter)?;
    }
    Ok(alg)
}

/// Complex conjugation from `d−1` parallel queries:
/// `A(U)(Id⊗|0⟩⟨0|) = U* ⊗ det(U)|0⟩⟨0|^{⊗d−2}`.
pub fn conjugation(d: usize) -> Result<OracleAlgorithm> {
    check_d("conjugation", d, 2, MAX_D)?;
    let mut factors = vec![Factor::task(d)];
    factors.extend(std::iter::repeat_n(Factor::ancilla(d, 0), d - 2));
    let mut alg = OracleAlgorithm::new("conjugation", RegisterLayout::new(factors)?, d);
    let slots: Vec<usize> = (0..d - 1).collect();
    conjugation_block(&mut alg, d, &slots)?;
    if d > 2 {
        alg.project(ket0(d.pow(d as u32 - 2)), &(1..d - 1).collect::<Vec<_>>())?;
    }
    Ok(alg)
}

/// Transpose by teleportation: layout `[in, bridge, out]`, `|ψ⁺⟩` on
/// (bridge, out), one query on the bridge, postselect `|ψ⁺⟩` on (in, bridge).
/// Implements `(1/d) Uᵀ` from `in` to `out`.
pub fn transpose_via_teleport(d: usize) -> Result<OracleAlgorithm> {
    check_d("transpose", d, 2, MAX_D)?;
    let layout = RegisterLayout::new(vec![Factor::task(d), Factor::ancilla(d, 0), Factor::ancilla(d, 1)])?;
    let mut alg = OracleAlgorithm::new("transpose", layout, d);
    alg.gate(bell_preparation(d)?, &[1, 2])?;
    alg.query(QueryLetter::Id, &[1])?;
    let bell = CMatrix::column(bell_state(d));
    alg.project(CMatrix::outer(&bell, &bell), &[0, 1])?;
    alg.set_registers(vec![0], vec![2])?;
    Ok(alg)
}

/// Inverse: the transpose circuit with the bridge query replaced by the
/// conjugation block, giving `(1/d) det(U) U†` with `d−1` queries.
pub fn inverse(d: usize) -> Result<OracleAlgorithm> {
    check_d("inverse", d, 2, 3)?;
    let out = d;
    let mut factors = vec![Factor::task(d), Factor::ancilla(d, 0)];
    factors.extend(std::iter::repeat_n(Factor::ancilla(d, 1), d - 2));
    factors.push(Factor::ancilla(d, 2));
    let mut alg = OracleAlgorithm::new("inverse", RegisterLayout::new(factors)?, d);
    alg.gate(bell_preparation(d)?, &[1, out])?;
    let slots: Vec<usize> = (1..d).collect();
    conjugation_block(&mut alg, d, &slots)?;
    let bell = CMatrix::column(bell_state(d));
    alg.project(CMatrix::outer(&bell, &bell), &[0, 1])?;
    if d > 2 {
        alg.project(ket0(d.pow(d as u32 - 2)), &(2..d).collect::<Vec<_>>())?;
    }
    alg.set_registers(vec![0], vec![out])?;
    Ok(alg)
}

/// Controlled `U^d` with a spin-echo: one unconditional query, then `d−1`
/// queries routed either into a conjugation block (control `|0⟩`) or onto
/// the task (control `|1⟩`), followed by teleportation to a partner qudit.
///
/// Layout `[control, task, bridge, anc (d−2), partner]`; the output
/// register is `[control, partner]`. Implements
/// `(1/d)(|0⟩⟨0|⊗det(U) Id + |1⟩⟨1|⊗U^d)`.
pub fn spin_echo_cUd(d: usize) -> Result<OracleAlgorithm> {
    check_d("spin-echo", d, 2, 3)?;
    let (task, bridge, partner) = (1, 2, d + 1);
    let mut factors = vec![Factor::control(), Factor::task(d), Factor::ancilla(d, 0)];
    factors.extend(std::iter::repeat_n(Factor::ancilla(d, 1), d - 2));
    factors.push(Factor::ancilla(d, 2));
    let mut alg = OracleAlgorithm::new("spin-echo", RegisterLayout::new(factors)?, d);
    alg.query(QueryLetter::Id, &[task])?;
    alg.gate(bell_preparation(d)?, &[bridge, partner])?;
    let slots: Vec<usize> = (bridge..partner).collect();
    let v = conjugation_unitary(d)?;
    alg.controlled_gate(v.clone(), &slots, 0, 0)?;
    for &slot in &slots {
        alg.controlled_gate(gates::swap(d), &[task, slot], 0, 0)?;
        alg.query(QueryLetter::Id, &[task])?;
        alg.controlled_gate(gates::swap(d), &[task, slot], 0, 0)?;
    }
    alg.controlled_gate(v.adjoint(), &slots, 0, 0)?;
    let bell = CMatrix::column(bell_state(d));
    alg.project(CMatrix::outer(&bell, &bell), &[task, bridge])?;
    if d > 2 {
        alg.project(ket0(d.pow(d as u32 - 2)), &(bridge + 1..partner).collect::<Vec<_>>())?;
    }
    alg.set_registers(vec![0, task], vec![0, partner])?;
    Ok(alg)
}

/// A query-free circuit on `[control, task]`; its phase witness is constant.
pub fn constant_circuit(d: usize) -> Result<OracleAlgorithm> {
    check_d("constant", d, 2, MAX_D)?;
    let layout = RegisterLayout::new(vec![Factor::control(), Factor::task(d)])?;
    Ok(OracleAlgorithm::new("constant", layout, d))
}

/// Every builder that takes only `d`, by CLI name.
pub fn by_name(name: &str, d: usize, m: Option<i32>) -> Result<OracleAlgorithm> {
    match name {
        "kitaev" => kitaev_cswap(d),
        "dong" => dong_cUd(d),
        "power" => power_cUm(d, m.ok_or_else(|| Error::InvalidArgument("power needs --m".into()))?),
        "conjugation" => conjugation(d),
        "transpose" => transpose_via_teleport(d),
        "inverse" => inverse(d),
        "spin-echo" => spin_echo_cUd(d),
        "neutraliser" => neutraliser_parallel(d),
        "constant" => constant_circuit(d),
        other => Err(Error::InvalidArgument(format!("unknown construction `{other}`"))),
    }
}

pub type RootMap = Arc<dyn Fn(&CMatrix) -> Result<CMatrix> + Send + Sync>;

/// The controlled-`U^d` circuit run on `root(U)` instead of `U`, where
/// `root(U)^d = U`. With a discontinuous root this is not an oracle
/// algorithm in the sense of the model; it is kept apart from
/// [`OracleAlgorithm`] so soundness sweeps cannot pick it up.
#[derive(Clone)]
pub struct ComposedRoot {
    inner: OracleAlgorithm,
    root: RootMap,
}

impl std::fmt::Debug for ComposedRoot {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ComposedRoot").field("d", &self.inner.oracle_dim()).finish()
    }
}

/// Tolerance on `root(U)^d = U`.
pub const ROOT_TOL: f64 = 1e-8;

pub fn composed_root_cU(d: usize, root: RootMap) -> Result<ComposedRoot> {
    let mut inner = dong_cUd(d)?;
    inner.set_name("root-composed");
    Ok(ComposedRoot { inner, root })
}

/// [`composed_root_cU`] with the principal-branch root.
pub fn composed_principal_root(d: usize) -> Result<ComposedRoot> {
    composed_root_cU(d, Arc::new(move |u: &CMatrix| principal_root(u, d as u32)))
}

impl ComposedRoot {
    pub fn root_of(&self, u: &CMatrix) -> Result<CMatrix> {
        let r = (self.root)(u)?;
        let d = self.inner.oracle_dim();
        if r.rows() != d || !r.is_square() {
            return Err(Error::DimensionMismatch("root has the wrong shape".into()));
        }
        r.ensure_unitary()?;
        let back = r.pow_unitary(d as i32);
        if back.max_abs_diff(u) > ROOT_TOL {
            return Err(Error::InvalidArgument(format!(
                "root map is not a {d}-th root (deviation {:.3e})",
                back.max_abs_diff(u)
            )));
        }
        Ok(r)
    }
}

impl Program for ComposedRoot {
    fn layout(&self) -> &RegisterLayout {
        self.inner.layout()
    }

    fn oracle_dim(&self) -> usize {
        self.inner.oracle_dim()
    }

    fn input_register(&self) -> &[usize] {
        self.inner.input_register()
    }

    fn output_register(&self) -> &[usize] {
        self.inner.output_register()
    }

    fn alphabet(&self) -> Vec<String> {
        vec!["root".into()]
    }

    fn apply_batch(&self, u: &CMatrix, vs: &mut [Vec<C64>]) -> Result<()> {
        let r = self.root_of(u)?;
        self.inner.apply_batch(&r, vs)
    }
}

/// Every shipped oracle algorithm for oracle dimension `d`, with the
/// homogeneity degree each must have.
pub fn suite(d: usize) -> Result<Vec<(OracleAlgorithm, i32)>> {
    let di = d as i32;
    let mut out = vec![
        (kitaev_cswap(d)?, 1),
        (dong_cUd(d)?, di),
        (power_cUm(d, 2 * di)?, 2 * di),
        (power_cUm(d, -di)?, -di),
        (conjugation(d)?, di - 1),
        (transpose_via_teleport(d)?, 1),
        (neutraliser_parallel(d)?, di),
    ];
    if d <= 3 {
        out.push((inverse(d)?, di - 1));
        out.push((spin_echo_cUd(d)?, di));
    }
    Ok(out)
}
