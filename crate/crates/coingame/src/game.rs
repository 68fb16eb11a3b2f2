//! The coin-tossing game protocol and capital processes.
//!
//! Skeptic announces a bet `M_n`, Reality announces `x_n in {0,1}`, and
//! `K_n = K_{n-1} + M_n (x_n - rho)`. A predictor `p_n` induces the bet
//! `M_n = K_{n-1} (p_n - rho) / (rho (1 - rho))`, under which the capital
//! updates multiplicatively: `K_n = K_{n-1} p_n / rho` on a one and
//! `K_n = K_{n-1} (1 - p_n) / (1 - rho)` on a zero. All capital arithmetic
//! is kept in the log domain; ruin is the `-inf` sentinel.

use crate::error::{Error, Result};
use std::fmt;
use std::str::FromStr;

/// Validate a risk-neutral success probability.
pub fn check_rho(rho: f64) -> Result<f64> {
    if rho > 0.0 && rho < 1.0 {
        Ok(rho)
    } else {
        Err(Error::InvalidProbability(rho))
    }
}

/// A finite 0/1 outcome sequence with its count of ones cached.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PathPrefix {
    bits: Vec<u8>,
    ones: usize,
}

impl PathPrefix {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_bits(bits: Vec<u8>) -> Self {
        debug_assert!(bits.iter().all(|&b| b <= 1));
        let ones = bits.iter().filter(|&&b| b == 1).count();
        Self { bits, ones }
    }

    pub fn push(&mut self, x: u8) {
        debug_assert!(x <= 1);
        self.ones += usize::from(x == 1);
        self.bits.push(x);
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    /// `s_n`, the number of ones.
    pub fn ones(&self) -> usize {
        self.ones
    }

    /// Running average of the moves, `s_n / n`.
    pub fn mean(&self) -> f64 {
        if self.bits.is_empty() {
            0.0
        } else {
            self.ones as f64 / self.bits.len() as f64
        }
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }
}

impl FromStr for PathPrefix {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut bits = Vec::with_capacity(s.len());
        for (pos, ch) in s.chars().enumerate() {
            match ch {
                '0' => bits.push(0),
                '1' => bits.push(1),
                _ => {
                    return Err(Error::Parse {
                        pos,
                        msg: format!("expected '0' or '1', found {ch:?}"),
                    })
                }
            }
        }
        Ok(Self::from_bits(bits))
    }
}

impl fmt::Display for PathPrefix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

/// A conditional predictor of Reality's next move.
///
/// `predict` returns the probability of the next outcome being 1 given the
/// moves fed through `observe` so far. Implementations must be deterministic
/// and return values in `[0,1]`.
pub trait Predictor {
    fn predict(&self) -> f64;
    fn observe(&mut self, x: u8);
}

/// Predictor that always answers the same probability. With `p = rho` it is
/// the "never bet" strategy.
#[derive(Debug, Clone, Copy)]
pub struct ConstantPredictor(pub f64);

impl Predictor for ConstantPredictor {
    fn predict(&self) -> f64 {
        self.0
    }

    fn observe(&mut self, _x: u8) {}
}

/// Bet implied by predicting `p` with current capital `capital`.
pub fn bet_from_prob(p: f64, rho: f64, capital: f64) -> f64 {
    capital * (p - rho) / (rho * (1.0 - rho))
}

/// The redundant split `M = M1 - M0`: `M1` rides on `x_n = 1`, `M0` on
/// `x_n = 0`.
pub fn bet_split(p: f64, rho: f64, capital: f64) -> (f64, f64) {
    (capital * p / rho, capital * (1.0 - p) / (1.0 - rho))
}

/// Per-round log-capital trajectory. `log_capital[n]` is `log K_n`, with
/// `log K_0 = 0`; `-inf` encodes ruin, after which Skeptic formally keeps
/// playing with zero bets.
#[derive(Debug, Clone)]
pub struct CapitalProcess {
    pub log_capital: Vec<f64>,
    pub ruined_at: Option<usize>,
}

impl CapitalProcess {
    pub fn final_log(&self) -> f64 {
        *self.log_capital.last().unwrap()
    }

    /// `log K_n / n` at the final round.
    pub fn rate(&self) -> f64 {
        let n = self.log_capital.len() - 1;
        if n == 0 {
            0.0
        } else {
            self.final_log() / n as f64
        }
    }
}

/// Play the game: feed the path to the predictor round by round and
/// accumulate log-capital multiplicatively.
///
/// A predictor value outside `[0,1]` is a contract violation and errors out
/// rather than being clipped. Predictions of exactly 0 or 1 are legal and
/// may lead to ruin.
pub fn run_game(
    predictor: &mut dyn Predictor,
    path: &PathPrefix,
    rho: f64,
) -> Result<CapitalProcess> {
    check_rho(rho)?;
    let mut log_capital = Vec::with_capacity(path.len() + 1);
    log_capital.push(0.0);
    let mut log_k = 0.0;
    let mut ruined_at = None;
    for (i, &x) in path.bits().iter().enumerate() {
        let p = predictor.predict();
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::PredictorRange { round: i + 1, p });
        }
        if ruined_at.is_none() {
            let factor = if x == 1 { p / rho } else { (1.0 - p) / (1.0 - rho) };
            log_k += factor.ln();
            if log_k == f64::NEG_INFINITY {
                ruined_at = Some(i + 1);
            }
        }
        log_capital.push(if ruined_at.is_some() { f64::NEG_INFINITY } else { log_k });
        predictor.observe(x);
    }
    Ok(CapitalProcess { log_capital, ruined_at })
}

/// Exact log-capital of the strategy induced by a prior predictive log
/// probability: `log Q(xi^n) - s_n log rho - (n - s_n) log(1 - rho)`.
/// This is the likelihood-ratio closed form used as the oracle against
/// [`run_game`].
pub fn likelihood_ratio_log_capital(log_q: f64, n: usize, ones: usize, rho: f64) -> f64 {
    log_q - ones as f64 * rho.ln() - (n - ones) as f64 * (1.0 - rho).ln()
}
