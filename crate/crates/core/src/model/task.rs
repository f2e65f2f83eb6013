//! Tasks `(t, Σ)`: target operators and the admissible query alphabet.

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, Factor, RegisterLayout, C64, ONE, ZERO};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TaskKind {
    /// `|0⟩⟨0|⊗Id + e^{iφ}|1⟩⟨1|⊗U^m` for some phase `φ(U)`.
    CUm { m: i32 },
    /// `U ↦ U*`.
    Conjugation,
    /// `U ↦ Uᵀ`.
    Transpose,
    /// `U ↦ U†`.
    Inverse,
    /// `U ↦ U^q`.
    Power { q: i32 },
}

#[derive(Clone, Debug)]
pub struct Task {
    pub d: usize,
    pub kind: TaskKind,
    pub alphabet: Vec<String>,
}

/// The target as `F + e^{iφ} Q`; `Q` is absent for tasks without a free phase.
#[derive(Clone, Debug)]
pub struct TaskTarget {
    pub fixed: CMatrix,
    pub phased: Option<CMatrix>,
}

impl TaskTarget {
    pub fn at(&self, phi: f64) -> CMatrix {
        match &self.phased {
            None => self.fixed.clone(),
            Some(q) => &self.fixed + &q.scale(C64::from_polar(1.0, phi)),
        }
    }
}

impl Task {
    pub fn new(d: usize, kind: TaskKind) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidArgument(format!("oracle dimension {d} < 2")));
        }
        Ok(Task { d, kind, alphabet: vec!["id".into(), "inv".into()] })
    }

    pub fn c_um(d: usize, m: i32) -> Result<Self> {
        Task::new(d, TaskKind::CUm { m })
    }

    pub fn with_alphabet(mut self, letters: &[&str]) -> Self {
        self.alphabet = letters.iter().map(|s| s.to_string()).collect();
        self
    }

    pub fn phase_covariant(&self) -> bool {
        matches!(self.kind, TaskKind::CUm { .. })
    }

    pub fn layout(&self) -> RegisterLayout {
        let factors = match self.kind {
            TaskKind::CUm { .. } => vec![Factor::control(), Factor::task(self.d)],
            _ => vec![Factor::task(self.d)],
        };
        RegisterLayout::new(factors).expect("task layouts are valid")
    }

    pub fn dim(&self) -> usize {
        self.layout().total_dim()
    }

    pub fn target(&self, u: &CMatrix) -> Result<TaskTarget> {
        if !u.is_square() || u.rows() != self.d {
            return Err(Error::DimensionMismatch(format!(
                "oracle is {}x{}, task expects dimension {}",
                u.rows(),
                u.cols(),
                self.d
            )));
        }
        Ok(match self.kind {
            TaskKind::CUm { m } => {
                let p0 = CMatrix::diag(&[ONE, ZERO]);
                let p1 = CMatrix::diag(&[ZERO, ONE]);
                TaskTarget { fixed: p0.kron(&CMatrix::identity(self.d)), phased: Some(p1.kron(&u.pow_unitary(m))) }
            }
            TaskKind::Conjugation => TaskTarget { fixed: u.conj(), phased: None },
            TaskKind::Transpose => TaskTarget { fixed: u.transpose(), phased: None },
            TaskKind::Inverse => TaskTarget { fixed: u.adjoint(), phased: None },
            TaskKind::Power { q } => TaskTarget { fixed: u.pow_unitary(q), phased: None },
        })
    }

    /// `t(U)` at phase `φ` (the phase is ignored by tasks without one).
    pub fn evaluate(&self, u: &CMatrix, phi: f64) -> Result<CMatrix> {
        Ok(self.target(u)?.at(phi))
    }

    pub fn check_alphabet(&self, letters: &[String]) -> Result<()> {
        match letters.iter().find(|l| !self.alphabet.contains(l)) {
            Some(l) => Err(Error::AlphabetMismatch(l.clone())),
            None => Ok(()),
        }
    }

    pub fn label(&self) -> String {
        match self.kind {
            TaskKind::CUm { m } => format!("c-U^{m}"),
            TaskKind::Conjugation => "conjugation".into(),
            TaskKind::Transpose => "transpose".into(),
            TaskKind::Inverse => "inverse".into(),
            TaskKind::Power { q } => format!("U^{q}"),
        }
    }
}
