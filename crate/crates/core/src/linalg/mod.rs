//! Dense complex linear algebra for desk-scale quantum registers.

pub mod det;
pub mod layout;
pub mod matrix;
pub mod perm;
pub mod random;
pub mod root;
pub mod svd;
pub mod tensor;

pub use det::{cofactor_matrix, det, sym_det, sym_minor};
pub use layout::{Factor, RegisterLayout, Role};
pub use matrix::{gates, CMatrix, C64, I, ONE, UNITARY_TOL, ZERO};
pub use perm::Permutation;
pub use random::{haar_state, haar_unitary, haar_unitary_rng, rng_from_seed};
pub use root::principal_root;
pub use svd::{op_norm, op_norm_rect, singular_values, svd, trace_norm, Svd};
pub use tensor::{controlled, embed, kron, kron_all, partial_trace, LocalAction};
