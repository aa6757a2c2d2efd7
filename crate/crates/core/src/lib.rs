//! Tools for distributed compression of a function of two correlated
//! sources: characteristic graphs and graph entropies, common-information
//! decompositions, helper-based achievable rate regions, and a Monte Carlo
//! simulator for the resulting codes.

pub mod cli;
pub mod common_info;
pub mod entropy_solver;
pub mod error;
pub mod experiments;
pub mod function;
pub mod gf;
pub mod graph;
pub mod instances;
pub mod label;
pub mod prob;
pub mod rates;
pub mod simulate;

pub use error::{Error, Result};
pub use function::{FunctionSpec, FunctionTable, Rule};
pub use label::{Alphabet, Label};
pub use prob::{JointPmf, PmfVector, Source};
