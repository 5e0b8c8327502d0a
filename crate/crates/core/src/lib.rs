//! Degree of commutativity and degree of satisfiability of equations on
//! finitely generated groups, measured on Cayley balls.

pub mod cayley;
pub mod equations;
pub mod error;
pub mod estimator;
pub mod group;
pub mod measures;
pub mod theory;

pub use error::{Error, Result};
