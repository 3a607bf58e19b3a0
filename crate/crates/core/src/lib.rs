//! One-dimensional periodic homogenization of `-(a(x/eps) u')' = f` on `(0, 1)`.
//!
//! The crate evaluates the exact and homogenized solutions, the moving-average
//! and first-order corrected errors, runs convergence studies and checks the
//! Feynman-Kac representation of the solution by Monte Carlo.

pub mod averaging;
pub mod cli;
pub mod convergence;
pub mod error;
pub mod fk;
pub mod funcspec;
pub mod homsolver;
pub mod quadrature;
pub mod tridiagonal;

pub use error::{Error, Result};
pub use funcspec::{Convention, FunctionSpec, PeriodicCoefficient};
pub use homsolver::{ExactSolution, HomogenizedSolution, ProblemInstance, SolutionField};
