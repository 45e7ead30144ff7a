//! Exact arithmetic for Bohemian matrices over `{-1, 0, 1}`: structural
//! classification, generalized inverse families, brute-force enumeration and
//! closed-form counts.

pub mod error;
pub mod cardinality;
pub mod characterize;
pub mod classify;
pub mod enumerate;
pub mod matrix;
pub mod verify;

pub use error::{Error, Result};
pub use matrix::{
    block_sums, entry_sum, exact_rank, parse_matrix, penrose_check, penrose_check_rational,
    transform_inverse, BlockPartition, IntMatrix, Matrix, PenroseReport, RatMatrix,
    SignedPermutation, TernaryMatrix,
};
