//! Tensor-factor bookkeeping for the total Hilbert space.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// What a tensor factor is used for.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Control,
    Task,
    Ancilla(u32),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Factor {
    pub dim: usize,
    pub role: Role,
}

impl Factor {
    pub fn control() -> Self {
        Factor { dim: 2, role: Role::Control }
    }

    pub fn task(dim: usize) -> Self {
        Factor { dim, role: Role::Task }
    }

    pub fn ancilla(dim: usize, group: u32) -> Self {
        Factor { dim, role: Role::Ancilla(group) }
    }
}

/// Ordered list of subsystems; factor 0 is the most significant digit of a
/// basis index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RegisterLayout {
    factors: Vec<Factor>,
    strides: Vec<usize>,
}

impl RegisterLayout {
    pub fn new(factors: Vec<Factor>) -> Result<Self> {
        if let Some(f) = factors.iter().find(|f| f.dim < 2) {
            return Err(Error::InvalidLayout(format!("factor dimension {} < 2", f.dim)));
        }
        let controls: Vec<_> = factors.iter().filter(|f| f.role == Role::Control).collect();
        if controls.len() > 1 {
            return Err(Error::InvalidLayout("more than one control factor".into()));
        }
        if controls.iter().any(|f| f.dim != 2) {
            return Err(Error::InvalidLayout("control factor must be a qubit".into()));
        }
        let mut strides = vec![1; factors.len()];
        for i in (0..factors.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * factors[i + 1].dim;
        }
        Ok(RegisterLayout { factors, strides })
    }

    /// Layout with every factor labelled as task space.
    pub fn uniform_task(dims: &[usize]) -> Result<Self> {
        Self::new(dims.iter().map(|&d| Factor::task(d)).collect())
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn dim(&self, i: usize) -> usize {
        self.factors[i].dim
    }

    pub fn dims(&self) -> Vec<usize> {
        self.factors.iter().map(|f| f.dim).collect()
    }

    pub fn strides(&self) -> &[usize] {
        &self.strides
    }

    pub fn total_dim(&self) -> usize {
        self.factors.iter().map(|f| f.dim).product()
    }

    pub fn control_index(&self) -> Option<usize> {
        self.factors.iter().position(|f| f.role == Role::Control)
    }

    /// Control and task factors in layout order: the default task register.
    pub fn task_factors(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| !matches!(self.factors[i].role, Role::Ancilla(_))).collect()
    }

    pub fn digits(&self, mut index: usize) -> Vec<usize> {
        let mut out = vec![0; self.len()];
        for i in (0..self.len()).rev() {
            out[i] = index % self.factors[i].dim;
            index /= self.factors[i].dim;
        }
        out
    }

    pub fn index_of(&self, digits: &[usize]) -> usize {
        digits.iter().zip(&self.strides).map(|(d, s)| d * s).sum()
    }

    /// Product of the dimensions of `subsystems`.
    pub fn dim_of(&self, subsystems: &[usize]) -> usize {
        subsystems.iter().map(|&i| self.factors[i].dim).product()
    }

    /// Checks that `targets` are distinct valid subsystem indices.
    pub fn check_targets(&self, targets: &[usize]) -> Result<()> {
        for (k, &t) in targets.iter().enumerate() {
            if t >= self.len() {
                return Err(Error::SubsystemOutOfRange { index: t, len: self.len() });
            }
            if targets[..k].contains(&t) {
                return Err(Error::DuplicateTarget(t));
            }
        }
        Ok(())
    }

    /// Subsystems not listed in `subset`, in layout order.
    pub fn complement(&self, subset: &[usize]) -> Vec<usize> {
        (0..self.len()).filter(|i| !subset.contains(i)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn total_dimension_is_product() {
        let l = RegisterLayout::new(vec![Factor::control(), Factor::task(3), Factor::ancilla(3, 0)]).unwrap();
        assert_eq!(l.total_dim(), 18);
        assert_eq!(l.strides(), &[9, 3, 1]);
        assert_eq!(l.digits(14), vec![1, 1, 2]);
        assert_eq!(l.index_of(&[1, 1, 2]), 14);
        assert_eq!(l.task_factors(), vec![0, 1]);
    }

    #[test]
    fn rejects_two_controls_and_wide_control() {
        assert!(RegisterLayout::new(vec![Factor::control(), Factor::control()]).is_err());
        let wide = Factor { dim: 3, role: Role::Control };
        assert!(RegisterLayout::new(vec![wide]).is_err());
        assert!(RegisterLayout::new(vec![Factor::task(1)]).is_err());
    }

    #[test]
    fn target_validation() {
        let l = RegisterLayout::uniform_task(&[2, 2]).unwrap();
        assert!(matches!(l.check_targets(&[1, 1]), Err(Error::DuplicateTarget(1))));
        assert!(matches!(l.check_targets(&[2]), Err(Error::SubsystemOutOfRange { .. })));
        assert!(l.check_targets(&[1, 0]).is_ok());
    }
}
