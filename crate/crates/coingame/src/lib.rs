//! Coin-tossing betting games with Bayesian multistep strategies.
//!
//! A Skeptic bets against Reality's 0/1 moves at risk-neutral success
//! probability `rho`; the capital of any Bayesian strategy is the likelihood
//! ratio of its prior predictive distribution to the i.i.d. Bernoulli(`rho`)
//! measure. The crate provides:
//!
//! * the game protocol and the distribution <-> prudent-strategy bijection
//!   ([`game`], [`dist`]),
//! * beta-binomial, block-Dirichlet, Markovian and universal-mixture
//!   predictors with exact log-gamma capital formulas ([`strategies`]),
//! * seeded bit sources with known entropy rates ([`sources`]),
//! * the continuous-time asset game embedded onto dyadic log-price grids
//!   ([`asset`]),
//! * growth-rate decompositions and comparisons ([`analysis`]),
//! * an invariant battery ([`verify`]) and an experiment CLI (`coingame`).

pub mod analysis;
pub mod asset;
pub mod dist;
pub mod error;
pub mod game;
pub mod kl;
pub mod sources;
pub mod strategies;
pub mod verify;

pub use error::{Error, Result};

/// Crate version, embedded into every output file for provenance.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
