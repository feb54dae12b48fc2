pub mod atoms;
pub mod bench;
pub mod charpoly;
pub mod cli;
pub mod error;
pub mod integral_op;
pub mod perturbation;
pub mod quadrature;
pub mod roots;
pub mod scalar;
pub mod solver;
pub mod term_algebra;

pub use error::{Error, Result};
