//! Dense complex linear algebra.

mod eigh;
mod matrix;

pub use eigh::{eigh, eigh_with, eigvalsh, EigenDecomposition, EighConfig};
pub use matrix::{
    adjoint, commutator, inner, kron, mat_add, mat_mul, mat_sub, vec_norm, ComplexMatrix,
};
