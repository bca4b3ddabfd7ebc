//! Exact computer algebra for pseudodifferential operators, KP and Parshin
//! hierarchies, and generalized Fredholm subspaces of k((u))((t)) with their
//! picture cohomology.

pub mod checks;
pub mod cli;
pub mod coefficients;
pub mod cohomology;
pub mod error;
pub mod hierarchy;
pub mod io;
pub mod linalg;
pub mod par;
pub mod psdo;
pub mod sample;
pub mod series;
pub mod subspace;

pub use error::{Error, Result};
