//! Exact computer-algebra kernel for generalized Virasoro algebras `Vir[M]`
//! over finitely generated subgroups `M` of a characteristic-zero field,
//! their super-extensions, and their modules of the intermediate series.

pub mod classify;
pub mod diagonal;
pub mod lattice;
pub mod linalg;
pub mod modules;
pub mod parse;
mod qpoly;
pub mod sample;
pub mod scalar;
pub mod subalgebra;
pub mod suites;
pub mod svir;
pub mod vir;

pub use lattice::{span_rank, Coset, Lattice, LatticeError, UnitHom};
pub use scalar::{Field, FieldKind, FieldSpec, Scalar, ScalarError};
pub use vir::{
    apply_automorphism, bracket, grading_decompose, jacobi_residual, AlgebraElement,
    AlgebraError, Automorphism,
};
