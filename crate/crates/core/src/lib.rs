//! Exact solvers and approximation algorithms for fixed charge
//! transportation problems.

pub mod balanced;
pub mod bicriteria;
pub mod error;
pub mod fct_u;
pub mod format;
pub mod greedy;
pub mod model;
pub mod oracle;
pub mod ptas;
pub mod random;
pub mod rational;
pub mod reductions;
pub mod transport;

pub use error::{Error, Result};
pub use model::{evaluate_cost, FlowSolution, Instance};
pub use rational::{Cost, Rational};
