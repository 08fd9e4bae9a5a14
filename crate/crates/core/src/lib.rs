//! Local deformation spaces of real projective structures on compact
//! hyperbolic Coxeter orbifolds.

pub mod cartan;
pub mod catalog;
pub mod error;
pub mod linalg;
pub mod lorentz;
pub mod matchstats;
pub mod orbifold;
pub mod polytope;
mod serde_util;
pub mod vinberg;

pub use error::{Error, Result};
