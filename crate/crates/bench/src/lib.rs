//! Shared fixtures for the benchmarks.

use uctrl_core::constructions::dong_cUd;
use uctrl_core::linalg::haar_unitary;
use uctrl_core::{CMatrix, OracleAlgorithm, Task};

/// `n` Haar oracles in `U(d)` from consecutive seeds.
pub fn oracles(d: usize, n: usize) -> Vec<CMatrix> {
    (0..n as u64).map(|s| haar_unitary(d, s)).collect()
}

/// The controlled-`U^d` circuit with its task.
pub fn dong(d: usize) -> (OracleAlgorithm, Task) {
    (dong_cUd(d).expect("d in range"), Task::c_um(d, d as i32).expect("d ≥ 2"))
}
