//! Concrete Bayesian predictors and their exact log-gamma capital formulas.
//!
//! Each family comes in two routes: an incremental [`crate::game::Predictor`]
//! that plays the game round by round, and a closed-form log-capital that is
//! the likelihood ratio of the family's prior predictive to the risk-neutral
//! measure. The two must agree to fp accuracy; tests enforce it.

mod beta;
mod block;
mod markov;
mod mixture;
mod parse;

pub use beta::{beta_binomial_log_capital, BetaBinomial};
pub use block::{block_log_capital, BlockParams, BlockPredictor};
pub use markov::{markov_counts, markov_log_capital, MarkovCounts, MarkovParams, MarkovPredictor};
pub use mixture::{log_sum_exp, Mixture};
pub use parse::StrategySpec;
