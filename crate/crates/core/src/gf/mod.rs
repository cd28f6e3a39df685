//! Finite fields and subspace arithmetic over them.

mod field;
mod subspace;

pub use field::{prime_power, Elem, FieldError, FieldSpec};
pub use subspace::{
    enumerate_subspaces, galois_number, gaussian_binomial, hull, intersect, rank_of, rref, FVector,
    LinalgError, Subspace, MAX_ENUM_COUNT, MAX_ENUM_DIM,
};
