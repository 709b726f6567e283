//! Exact computations for dimer models on the Aztec diamond and the tower
//! Aztec diamond: Kasteleyn matrices, non-intersecting paths, transition
//! matrices, shuffle dynamics, triangular factorizations, block Toeplitz
//! symbols and the boundary recurrence for inverse Kasteleyn entries.

pub mod boundary_inverse;
pub mod dynamics;
pub mod error;
pub mod factorization;
pub mod graphs;
pub mod kasteleyn;
pub mod numerics;
pub mod periodic;
pub mod transitions;
pub mod weights;

pub use error::{Error, Result};
