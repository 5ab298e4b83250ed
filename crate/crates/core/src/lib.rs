//! Exact solvers for level-k, cognitive hierarchy and Δ-rationalizability
//! in finite two-player games.
//!
//! Everything is generic over an exact [`Scalar`]; the aliases at the crate
//! root fix it to arbitrary-precision rationals.

pub mod complete;
pub mod error;
pub mod fixtures;
pub mod io;
pub mod lifted;
pub mod lp;
pub mod model;
pub mod oracle;
pub mod robust;
pub mod scalar;

pub use error::{Error, ParseErrorKind, Result};
pub use model::{
    best_reply, expected_payoff, truncate_levels, ActionSet, CellMember, Player, TypeIndex,
    MAX_ACTIONS,
};
pub use scalar::{parse_literal, Scalar};

pub type Rational = num_rational::BigRational;
pub type Game<T = Rational> = model::Game<T>;
pub type Conjecture<T = Rational> = model::Conjecture<T>;
pub type Anchor<T = Rational> = model::Anchor<T>;
pub type LevelDistribution<T = Rational> = model::LevelDistribution<T>;
pub type RestrictionModel<T = Rational> = model::RestrictionModel<T>;
pub type LiftedConjecture<T = Rational> = model::LiftedConjecture<T>;
pub type SolutionGrid<T = Rational> = model::SolutionGrid<T>;
