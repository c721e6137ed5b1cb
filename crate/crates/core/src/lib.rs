//! Dimensions of linear systems of hypersurfaces through general fat points
//! whose Newton polytope is a subset of a simplex, together with the
//! combinatorial certificates that prove non-speciality without symbolic
//! computation.

pub mod cache;
pub mod certificates;
pub mod error;
pub mod jet;
pub mod linalg;
pub mod ordering;
pub mod partition;
pub mod reductions;
pub mod seshadri;
pub mod simplex;

pub use error::{Error, Result};
pub use simplex::{ExponentVector, Triple};
