//! Proof checking for predicate logic with definitions.

pub mod cli;
pub mod defops;
pub mod error;
pub mod kernel;
pub mod parser;
pub mod stdlib;
pub mod syntax;

pub use error::{Error, Pos};
