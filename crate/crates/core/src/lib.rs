//! Exact multicoloring algorithms and the hardness reduction chain
//! SAT → (3,4)-SAT → nonuniform list multicoloring → list multicoloring →
//! plain (a:b)-coloring, plus the monomial-testing circuits built on top of
//! list multicoloring and Carry-Less Subset Sum.
//!
//! Every reduction comes with a brute-force oracle so instance equivalence can
//! be checked directly on small inputs.

pub mod circuits;
pub mod detecting;
pub mod error;
pub mod graph;
pub mod reduction;
pub mod sat;
pub mod solvers;

pub use error::{Error, Result};
pub use graph::{Graph, KneserLabel, ProperColoring};
pub use sat::{Assignment, CnfFormula, Lit};
pub use solvers::{MultiColoring, MulticolorInstance};
