//! Regularizing decompositions of square matrices under *congruence.
//!
//! Over a field with involution, every square matrix `A` is *congruent to
//! `B ⊕ J_{n_1} ⊕ … ⊕ J_{n_p}` with `B` nonsingular and `J_n` the singular
//! Jordan blocks. This crate computes that decomposition with exact
//! arithmetic over ℚ, ℚ(i) and GF(p), reproduces its parameters with
//! unitary or orthogonal transformations in floating point, and carries the
//! result over to *selfadjoint pencils `A + λA*`.
//!
//! All transforms are reported in the row convention: a returned `X`
//! satisfies `X·A·X* = target`.

pub mod cli;
pub mod error;
pub mod float_unitary;
pub mod format;
pub mod matrix;
pub mod pencil;
pub mod regularize;
pub mod scalar;
pub mod sparse_form;
pub mod verify;

pub use error::{Error, Result};
pub use matrix::{direct_sum, f_block, g_block, jordan_block, Invariants, Matrix, Permutation, ZeroRows};
pub use regularize::{assemble, regularize, stage, BlockSum, RegularizationResult, StageRecord};
pub use scalar::{Field, FieldSpec, Involution, Scalar};
pub use sparse_form::{canonical_sparse_form, full_decomposition, jordan_permutation, Decomposition, SparseForm};
