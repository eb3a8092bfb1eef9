//! Exact cohomology of split bundles on projective spaces, Hirzebruch
//! surfaces, generic curves and projective bundles over them, together with
//! tests and constructions of Ulrich bundles of the form `pi^* F (D)`.

mod bigjson;
pub mod cli;
pub mod cohomology;
pub mod enumerate;
pub mod error;
pub mod grammar;
pub mod kernelbundle;
pub mod linalg;
pub mod picard;
pub mod ulrich;

pub use error::{Error, Result};
