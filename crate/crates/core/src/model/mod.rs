//! The computational model: programs, tasks and the verification predicates.

pub mod algorithm;
pub mod checks;
pub mod task;

pub use algorithm::{static_homogeneity, OracleAlgorithm, Program, ProjectorFactor, QueryLetter, Step, StepKind};
pub use checks::{
    apply_channel, check_clean, check_exact, check_neutralises, eps_distance_estimate, lipschitz_check,
    numeric_homogeneity_check, pure_deviation, success_prob, AchievementResult, CleanReport, LipschitzReport,
    NeutralisationReport, RestrictedMap, DEFAULT_TOL,
};
pub use task::{Task, TaskKind, TaskTarget};
