//! Numerical laboratory for trace-functional convexity on positive definite
//! matrices.
//!
//! The crate evaluates functionals of the form
//! `(A, B) ↦ Tr h(Φ(f(A))^{1/2} Ψ(g(B)) Φ(f(A))^{1/2})` for strictly positive
//! maps `Φ`, `Ψ`, checks the Legendre-transform calculus behind them, and runs
//! seeded randomized midpoint suites that test joint convexity and concavity.

pub mod cli;
pub mod config;
pub mod error;
pub mod golden;
pub mod matcore;
pub mod posmap;
pub mod report;
pub mod scalarfun;
pub mod tracefun;
pub mod verify;

pub use error::{Error, Result};
pub use matcore::{HermitianMatrix, PdMatrix, SpectralDecomposition};
pub use posmap::PositiveMap;
pub use report::{TrialReport, Witness};
pub use scalarfun::{ScalarFunction, TransformedFunction};
