//! Finite-dimensional Ito *-algebras: construction, axiom checks, canonical
//! pseudo-Euclidean representation, Brownian/Levy decomposition, a catalog of
//! standard examples and a toy Fock-space realization.

pub mod algebra;
pub mod catalog;
pub mod cli;
pub mod decomposition;
pub mod error;
pub mod fock;
pub mod forms;
pub mod linalg;
pub mod representation;

pub use algebra::{check_axioms, AlgebraBuilder, AxiomReport, Element, ItoAlgebra, Violation};
pub use error::{Error, Result};
