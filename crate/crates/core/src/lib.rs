//! Structured distances for dissipative-Hamiltonian pencils and matrix polynomials.
//!
//! The central object is a [`StructuredTuple`] `(J, [X₀, …, X_ℓ])` with `J`
//! skew-symmetric and every `Xᵢ` positive semidefinite. Its distance to the
//! set of tuples with a common kernel ([`ckdistance::minimize_sphere`]) yields
//! the distances to singularity, high index and instability of pencils,
//! quadratics and higher-degree polynomials.

pub mod ckdistance;
pub mod error;
pub mod generators;
pub mod linalg;
pub mod pencil;
pub mod polynomial;
pub mod quadratic;
pub mod perturbation;
pub mod problem;
pub mod qreduction;
pub mod spectrum;
pub mod structures;

pub use ckdistance::{minimize_sphere, DistanceResult, OptimizerConfig};
pub use error::{Error, Result};
pub use linalg::{RealMatrix, RealVector, Tolerance};
pub use perturbation::PerturbationSet;
pub use structures::{DHPencil, DHQuadratic, GeneralDHSystem, StructuredPolynomial, StructuredTuple};
