//! Simulation and verification of postselection oracle algorithms.
//!
//! An oracle algorithm interleaves fixed unitaries with queries to an
//! unknown `U ∈ U(d)` (as `U` or `U†`) and ends with a binary success
//! measurement. This crate evaluates such programs, decides whether they
//! achieve a task exactly or approximately, ships the standard
//! constructions (controlled-swap, neutralisation-based controlled powers,
//! conjugation, transpose, inverse), and computes the topological witnesses
//! behind the impossibility of a controlled-`U` for generic powers: winding
//! numbers of homogeneous phase functions and a Borsuk–Ulam scan.
//!
//! Modules:
//! - [`linalg`]: matrices, tensor embedding, norms, Haar sampling,
//!   symmetric determinant formulas, principal roots.
//! - [`model`]: programs, tasks, evaluation and the verification predicates.
//! - [`constructions`]: builders for every shipped circuit.
//! - [`topology`]: loops, windings, dichotomy probes, Borsuk–Ulam scan.
//! - [`ir`]: the JSON circuit format and report types.

pub mod constructions;
pub mod error;
pub mod ir;
pub mod linalg;
pub mod model;
pub mod topology;

pub use error::{Error, Result};
pub use linalg::{CMatrix, RegisterLayout, C64};
pub use model::{OracleAlgorithm, Program, QueryLetter, Task, TaskKind};
