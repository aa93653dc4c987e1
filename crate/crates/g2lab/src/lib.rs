//! Exact computational algebra around octonions, Clifford algebras, Spin(7)
//! and the G₂-containment problem for finite subgroups of SO(7).

pub mod error;
pub mod gallery;
pub mod grouprep;
pub mod json;
pub mod octonion;
pub mod clifford;
pub mod decide;
pub mod quadspace;
pub mod scalars;

pub use error::{Error, Result};
