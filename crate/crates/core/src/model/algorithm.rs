//! Postselection oracle algorithms as interleaved fixed gates and queries.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, LocalAction, RegisterLayout, Role, C64, UNITARY_TOL, ZERO};

type LetterMap = Arc<dyn Fn(&CMatrix) -> CMatrix + Send + Sync>;

/// A letter of the query alphabet: how a query slot transforms the oracle.
#[derive(Clone)]
pub enum QueryLetter {
    /// `U ↦ U`, homogeneity degree +1.
    Id,
    /// `U ↦ U†`, homogeneity degree −1.
    Inv,
    Custom {
        name: String,
        degree: i32,
        map: LetterMap,
    },
}

impl QueryLetter {
    pub fn custom(
        name: impl Into<String>,
        degree: i32,
        map: impl Fn(&CMatrix) -> CMatrix + Send + Sync + 'static,
    ) -> Self {
        QueryLetter::Custom { name: name.into(), degree, map: Arc::new(map) }
    }

    pub fn name(&self) -> &str {
        match self {
            QueryLetter::Id => "id",
            QueryLetter::Inv => "inv",
            QueryLetter::Custom { name, .. } => name,
        }
    }

    pub fn degree(&self) -> i32 {
        match self {
            QueryLetter::Id => 1,
            QueryLetter::Inv => -1,
            QueryLetter::Custom { degree, .. } => *degree,
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        match name {
            "id" => Ok(QueryLetter::Id),
            "inv" => Ok(QueryLetter::Inv),
            other => Err(Error::InvalidCircuit(format!("unknown query letter `{other}`"))),
        }
    }

    /// `σ(U)`; custom maps are checked for unitarity.
    pub fn evaluate(&self, u: &CMatrix) -> Result<CMatrix> {
        match self {
            QueryLetter::Id => Ok(u.clone()),
            QueryLetter::Inv => Ok(u.adjoint()),
            QueryLetter::Custom { map, .. } => {
                let out = map(u);
                if out.rows() != u.rows() || !out.is_square() {
                    return Err(Error::DimensionMismatch(format!(
                        "letter `{}` returned a {}x{} matrix",
                        self.name(),
                        out.rows(),
                        out.cols()
                    )));
                }
                out.ensure_unitary()?;
                Ok(out)
            }
        }
    }
}

impl fmt::Debug for QueryLetter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name())
    }
}

impl PartialEq for QueryLetter {
    fn eq(&self, other: &Self) -> bool {
        self.name() == other.name() && self.degree() == other.degree()
    }
}

/// Sum of the letters' homogeneity degrees.
pub fn static_homogeneity(seq: &[QueryLetter]) -> i32 {
    seq.iter().map(QueryLetter::degree).sum()
}

#[derive(Clone, Debug)]
pub enum StepKind {
    Gate { op: CMatrix, control: Option<(usize, u8)> },
    Query(QueryLetter),
}

#[derive(Clone, Debug)]
pub struct Step {
    pub kind: StepKind,
    pub targets: Vec<usize>,
    plan: LocalAction,
}

/// One tensor factor of the success projector.
#[derive(Clone, Debug)]
pub struct ProjectorFactor {
    pub op: CMatrix,
    pub targets: Vec<usize>,
    plan: LocalAction,
}

/// Anything that maps an oracle to an operator on a fixed register layout.
///
/// Implemented by [`OracleAlgorithm`] and by analysis-only evaluators that
/// fall outside the model (they may be discontinuous in `U`).
pub trait Program: Sync {
    fn layout(&self) -> &RegisterLayout;
    fn oracle_dim(&self) -> usize;
    /// Factors holding the task input, in order; all others start in `|0⟩`.
    fn input_register(&self) -> &[usize];
    /// Factors holding the task output, in order; all others are garbage.
    fn output_register(&self) -> &[usize];
    fn alphabet(&self) -> Vec<String>;
    /// `v ← A(U) v` for each full-space vector.
    fn apply_batch(&self, u: &CMatrix, vs: &mut [Vec<C64>]) -> Result<()>;

    /// The full operator `A(U)`.
    fn eval(&self, u: &CMatrix) -> Result<CMatrix> {
        let n = self.layout().total_dim();
        let mut cols: Vec<Vec<C64>> = (0..n)
            .map(|j| {
                let mut v = vec![ZERO; n];
                v[j] = C64::new(1.0, 0.0);
                v
            })
            .collect();
        self.apply_batch(u, &mut cols)?;
        CMatrix::from_cols(&cols)
    }
}

/// `A(U) = Π V_N (σ_N(U)⊗Id) ⋯ V_1 (σ_1(U)⊗Id) V_0` with explicit query
/// targets per step; absent gates between queries are identities.
#[derive(Clone, Debug)]
pub struct OracleAlgorithm {
    name: String,
    layout: RegisterLayout,
    d: usize,
    steps: Vec<Step>,
    projector: Vec<ProjectorFactor>,
    input_register: Vec<usize>,
    output_register: Vec<usize>,
}

fn check_square(op: &CMatrix, layout: &RegisterLayout, targets: &[usize]) -> Result<()> {
    let want = layout.dim_of(targets);
    if !op.is_square() || op.rows() != want {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} operator on targets {targets:?} of dimension {want}",
            op.rows(),
            op.cols()
        )));
    }
    Ok(())
}

impl OracleAlgorithm {
    /// Empty program; the task registers default to every non-ancilla factor.
    pub fn new(name: impl Into<String>, layout: RegisterLayout, d: usize) -> Self {
        let task = layout.task_factors();
        OracleAlgorithm {
            name: name.into(),
            layout,
            d,
            steps: Vec::new(),
            projector: Vec::new(),
            input_register: task.clone(),
            output_register: task,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn set_name(&mut self, name: impl Into<String>) {
        self.name = name.into();
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    pub fn projector(&self) -> &[ProjectorFactor] {
        &self.projector
    }

    fn all_factors(&self) -> Vec<usize> {
        (0..self.layout.len()).collect()
    }

    /// Appends a fixed unitary on `targets` (all factors when empty).
    pub fn gate(&mut self, op: CMatrix, targets: &[usize]) -> Result<()> {
        self.push_gate(op, targets, None)
    }

    /// Appends `op` on `targets`, active only when factor `ctrl` is `|polarity⟩`.
    pub fn controlled_gate(&mut self, op: CMatrix, targets: &[usize], ctrl: usize, polarity: u8) -> Result<()> {
        self.push_gate(op, targets, Some((ctrl, polarity)))
    }

    fn push_gate(&mut self, op: CMatrix, targets: &[usize], control: Option<(usize, u8)>) -> Result<()> {
        let targets = if targets.is_empty() { self.all_factors() } else { targets.to_vec() };
        check_square(&op, &self.layout, &targets)?;
        if op.unitarity_defect() > UNITARY_TOL {
            return Err(Error::NotUnitary(op.unitarity_defect()));
        }
        let plan = LocalAction::new(&self.layout, &targets, control)?;
        self.steps.push(Step { kind: StepKind::Gate { op, control }, targets, plan });
        Ok(())
    }

    pub fn query(&mut self, letter: QueryLetter, targets: &[usize]) -> Result<()> {
        let plan = LocalAction::new(&self.layout, targets, None)?;
        if self.layout.dim_of(targets) != self.d {
            return Err(Error::DimensionMismatch(format!(
                "query targets {targets:?} span dimension {}, oracle has dimension {}",
                self.layout.dim_of(targets),
                self.d
            )));
        }
        self.steps.push(Step { kind: StepKind::Query(letter), targets: targets.to_vec(), plan });
        Ok(())
    }

    /// Multiplies a projector on `targets` into Π; factors must be disjoint.
    pub fn project(&mut self, op: CMatrix, targets: &[usize]) -> Result<()> {
        let targets = if targets.is_empty() { self.all_factors() } else { targets.to_vec() };
        check_square(&op, &self.layout, &targets)?;
        if !op.is_projector(UNITARY_TOL) {
            return Err(Error::InvalidCircuit("success operator is not a projector".into()));
        }
        if let Some(t) = targets.iter().find(|t| self.projector.iter().any(|p| p.targets.contains(t))) {
            return Err(Error::InvalidCircuit(format!("projector factors overlap on subsystem {t}")));
        }
        let plan = LocalAction::new(&self.layout, &targets, None)?;
        self.projector.push(ProjectorFactor { op, targets, plan });
        Ok(())
    }

    /// Sets the task input and output registers, which may differ.
    pub fn set_registers(&mut self, input: Vec<usize>, output: Vec<usize>) -> Result<()> {
        self.layout.check_targets(&input)?;
        self.layout.check_targets(&output)?;
        let dims = |r: &[usize]| r.iter().map(|&i| self.layout.dim(i)).collect::<Vec<_>>();
        if dims(&input) != dims(&output) {
            return Err(Error::InvalidLayout(format!(
                "input register {input:?} and output register {output:?} have different shapes"
            )));
        }
        self.input_register = input;
        self.output_register = output;
        Ok(())
    }

    pub fn query_sequence(&self) -> Vec<QueryLetter> {
        self.steps
            .iter()
            .filter_map(|s| match &s.kind {
                StepKind::Query(l) => Some(l.clone()),
                StepKind::Gate { .. } => None,
            })
            .collect()
    }

    pub fn query_count(&self) -> usize {
        self.query_sequence().len()
    }

    pub fn static_degree(&self) -> i32 {
        static_homogeneity(&self.query_sequence())
    }

    /// Re-checks every structural invariant.
    pub fn validate(&self) -> Result<()> {
        for s in &self.steps {
            match &s.kind {
                StepKind::Gate { op, .. } => {
                    check_square(op, &self.layout, &s.targets)?;
                    if op.unitarity_defect() > UNITARY_TOL {
                        return Err(Error::NotUnitary(op.unitarity_defect()));
                    }
                }
                StepKind::Query(_) => {
                    if self.layout.dim_of(&s.targets) != self.d {
                        return Err(Error::InvalidCircuit("query target dimension".into()));
                    }
                }
            }
        }
        for p in &self.projector {
            if !p.op.is_projector(UNITARY_TOL) {
                return Err(Error::InvalidCircuit("success operator is not a projector".into()));
            }
        }
        Ok(())
    }

    fn query_values(&self, u: &CMatrix) -> Result<Vec<Option<CMatrix>>> {
        if !u.is_square() || u.rows() != self.d {
            return Err(Error::DimensionMismatch(format!(
                "oracle is {}x{}, algorithm expects dimension {}",
                u.rows(),
                u.cols(),
                self.d
            )));
        }
        u.ensure_unitary()?;
        let mut cache: Vec<(String, CMatrix)> = Vec::new();
        self.steps
            .iter()
            .map(|s| match &s.kind {
                StepKind::Gate { .. } => Ok(None),
                StepKind::Query(letter) => {
                    if let Some((_, m)) = cache.iter().find(|(n, _)| n == letter.name()) {
                        return Ok(Some(m.clone()));
                    }
                    let m = letter.evaluate(u)?;
                    cache.push((letter.name().to_string(), m.clone()));
                    Ok(Some(m))
                }
            })
            .collect()
    }

    fn run(&self, values: &[Option<CMatrix>], v: &mut [C64]) {
        for (s, q) in self.steps.iter().zip(values) {
            match (&s.kind, q) {
                (StepKind::Gate { op, .. }, _) => s.plan.apply(op, v),
                (StepKind::Query(_), Some(m)) => s.plan.apply(m, v),
                (StepKind::Query(_), None) => unreachable!("query value missing"),
            }
        }
        for p in &self.projector {
            p.plan.apply(&p.op, v);
        }
    }

    fn run_adjoint(&self, values: &[Option<CMatrix>], v: &mut [C64]) {
        for p in &self.projector {
            p.plan.apply(&p.op, v);
        }
        for (s, q) in self.steps.iter().zip(values).rev() {
            match (&s.kind, q) {
                (StepKind::Gate { op, .. }, _) => s.plan.apply_adjoint(op, v),
                (StepKind::Query(_), Some(m)) => s.plan.apply_adjoint(m, v),
                (StepKind::Query(_), None) => unreachable!("query value missing"),
            }
        }
    }

    fn check_len(&self, v: &[C64]) -> Result<()> {
        if v.len() != self.layout.total_dim() {
            return Err(Error::DimensionMismatch(format!(
                "vector of length {} for a space of dimension {}",
                v.len(),
                self.layout.total_dim()
            )));
        }
        Ok(())
    }

    pub fn apply(&self, u: &CMatrix, v: &mut [C64]) -> Result<()> {
        self.check_len(v)?;
        let values = self.query_values(u)?;
        self.run(&values, v);
        Ok(())
    }

    /// `v ← A(U)† v`.
    pub fn apply_adjoint(&self, u: &CMatrix, v: &mut [C64]) -> Result<()> {
        self.check_len(v)?;
        let values = self.query_values(u)?;
        self.run_adjoint(&values, v);
        Ok(())
    }

    /// Appends every step of `other` (same layout and oracle dimension).
    pub fn append(&mut self, other: &OracleAlgorithm) -> Result<()> {
        if other.layout != self.layout || other.d != self.d {
            return Err(Error::InvalidCircuit("cannot append programs on different layouts".into()));
        }
        self.steps.extend(other.steps.iter().cloned());
        Ok(())
    }

    /// Replaces every query letter via `f`.
    pub fn map_letters(&mut self, f: impl Fn(&QueryLetter) -> QueryLetter) {
        for s in &mut self.steps {
            if let StepKind::Query(l) = &mut s.kind {
                *l = f(l);
            }
        }
    }

    pub fn has_role(&self, role: Role) -> bool {
        self.layout.factors().iter().any(|f| f.role == role)
    }
}

impl Program for OracleAlgorithm {
    fn layout(&self) -> &RegisterLayout {
        &self.layout
    }

    fn oracle_dim(&self) -> usize {
        self.d
    }

    fn input_register(&self) -> &[usize] {
        &self.input_register
    }

    fn output_register(&self) -> &[usize] {
        &self.output_register
    }

    fn alphabet(&self) -> Vec<String> {
        let mut names: Vec<String> = self.query_sequence().iter().map(|l| l.name().to_string()).collect();
        names.sort();
        names.dedup();
        names
    }

    fn apply_batch(&self, u: &CMatrix, vs: &mut [Vec<C64>]) -> Result<()> {
        let values = self.query_values(u)?;
        for v in vs.iter_mut() {
            self.check_len(v)?;
            self.run(&values, v);
        }
        Ok(())
    }
}
