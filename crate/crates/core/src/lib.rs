//! Exact q-series engine for representation numbers of diagonal octonary
//! quadratic forms with coefficients 1, 2, 3, 4 and 6.
//!
//! The pipeline is: expand the theta product of a form, express it in an
//! explicit basis of weight-4 modular forms on Γ₀(16) or Γ₀(48), and certify
//! the resulting formula against an independent lattice-point counter.
//!
//! Everything is exact: coefficients are [`Rational`]s and no floating point
//! is used anywhere.

pub mod bases;
pub mod characters;
pub mod error;
pub mod linalg;
pub mod modforms;
pub mod qseries;
pub mod rational;
pub mod solver;
pub mod tables;
pub mod verify;

pub use bases::{basis_for_space, verify_rank, BasisElement, RankReport, SpaceId};
pub use characters::{kronecker, DirichletCharacter};
pub use error::{Error, Result};
pub use modforms::{EisensteinSpec, EtaQuotient, Recipe};
pub use qseries::QSeries;
pub use rational::Rational;
pub use solver::{derive_formula, Formula, QuadraticForm};

/// Default working precision: Sturm bound 32, plus the constant term, plus one.
pub const DEFAULT_PRECISION: usize = 34;

/// Working precision needed to check coefficients `0..=n_max`.
pub fn working_precision(n_max: usize) -> usize {
    DEFAULT_PRECISION.max(n_max + 1)
}
