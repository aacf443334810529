//! Eigenvalues of upper Hessenberg matrices by rational QR: pole swapping on
//! the pencil `(A, U)` with `U` kept as a product of core transformations.

pub mod error;
pub mod harness;
pub mod matio;
pub mod moves;
pub mod pencil;
pub mod rotations;
pub mod solver;
pub mod unitary;

pub use error::{Error, Result};
