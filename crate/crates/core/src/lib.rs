//! Analysis toolkit for multi-objective normal-form games (MONFGs).
//!
//! Players receive payoff *vectors* and scalarise them with a utility
//! function. Two optimisation criteria follow from where the utility is
//! applied:
//!
//! - ESR (expected scalarised returns): `E[u(p)]`, the utility of each
//!   realised payoff vector, averaged.
//! - SER (scalarised expected returns): `u(E[p])`, the utility of the
//!   averaged payoff vector.
//!
//! The crate provides exact equilibrium verifiers for both criteria
//! ([`equilibrium`]), the simplex optimisers and LP backend they rely on
//! ([`optim`]), the independent vectorial Q-learning simulator
//! ([`learning`]) and a catalog of worked example games ([`catalog`]).

pub mod catalog;
pub mod equilibrium;
mod error;
pub mod game;
pub mod json;
pub mod learning;
pub mod optim;
pub mod utility;
pub mod value;

pub use error::{Error, Result};
pub use game::{CorrelatedStrategy, MixedStrategy, Monfg, StrategyModification, StrategyProfile};
pub use utility::{UtilityKind, UtilitySpec};

/// Tolerance on the total mass of every probability vector.
pub const PROB_SUM_TOL: f64 = 1e-9;
