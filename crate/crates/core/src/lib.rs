//! Sparse principal component analysis through a semidefinite relaxation.
//!
//! The crate solves the relaxation with a conditional-gradient augmented
//! Lagrangian method, rounds its solution into k-sparse unit vectors, and
//! ships the usual polynomial-time baselines together with an exact
//! brute-force oracle and a set of optimality certificates.

pub mod baselines;
pub mod certificates;
pub mod error;
pub mod linalg;
pub mod rounding;
pub mod sdp;
pub mod statmodel;

pub use error::{Error, Result};
pub use linalg::SymmetricMatrix;
