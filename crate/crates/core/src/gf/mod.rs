//! Exact linear algebra over GF(p^k).

mod echelon;
mod field;
mod matrix;
mod poly;
mod sparse;
mod subspace;

pub use echelon::{Echelon, SparseRow};
pub use field::{Elem, FiniteField, MAX_EXTENSION_ORDER};
pub use matrix::FieldMatrix;
pub use poly::FieldPolynomial;
pub use sparse::SparseMatrix;
pub use subspace::{subspace_intersect, subspace_sum, Subspace};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GfError {
    #[error("{0} is not prime")]
    NotPrime(u32),
    #[error("modulus is reducible")]
    ReducibleModulus,
    #[error("modulus has degree {found}, expected {expected}")]
    DegreeMismatch { expected: usize, found: usize },
    #[error("polynomial is not monic")]
    NotMonic,
    #[error("GF({p}^{k}) exceeds the supported field size")]
    FieldTooLarge { p: u32, k: u32 },
    #[error("element code {value} is out of range for a field of order {order}")]
    ElementOutOfRange { value: u32, order: u32 },
    #[error("subspaces live in ambient dimensions {0} and {1}")]
    AmbientMismatch(usize, usize),
    #[error("shape mismatch: expected {expected:?}, found {found:?}")]
    ShapeMismatch { expected: (usize, usize), found: (usize, usize) },
}

/// Builds GF(p^k), finding the least irreducible modulus if none is given.
pub fn field_make(p: u32, k: u32, modulus: Option<FieldPolynomial>) -> Result<FiniteField, GfError> {
    FiniteField::new(p, k, modulus)
}
