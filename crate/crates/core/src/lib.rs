//! Asymptotic-preserving solvers for run-and-tumble kinetic chemotaxis with
//! a logarithmic chemoattractant, and their Keller-Segel limits.

pub mod chemo;
pub mod error;
pub mod experiment;
pub mod exec;
pub mod kinetic;
pub mod macro_ks;
pub mod radial;
pub mod solver1d;

pub use error::{Error, Result};
pub use exec::Exec;
