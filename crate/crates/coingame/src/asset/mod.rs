//! Continuous-time asset game: price-path synthesis, limit-order embedding
//! onto dyadic log-price grids, nested count tables, and per-level growth
//! measurement.
//!
//! The Investor places limit orders one log-grid step `eta_k = 2^-k` above
//! and below the current level; each fill is one round of a coin-tossing
//! game with risk-neutral probability `rho_delta = 1/(2 + delta)`,
//! `delta = e^eta - 1`. Grids are anchored at `log S(0)`, so the level-k
//! grids are nested across k and a coarse step is exactly two fine steps.

mod embed;
mod fbm;
mod report;

pub use embed::{
    brownian_crossing_game, coarsen, embed, nesting_holds, EmbeddedGame, LevelCounts,
    VariationStats,
};
pub use fbm::fbm_path;
pub use report::{asset_growth_report, level_report, LevelReport};

use crate::error::{Error, Result};

/// A log-price path on an increasing time grid over [0, T].
#[derive(Debug, Clone)]
pub struct PricePath {
    pub times: Vec<f64>,
    pub log_price: Vec<f64>,
    /// Nominal Hölder exponent when synthesized.
    pub hurst: Option<f64>,
}

impl PricePath {
    pub fn new(times: Vec<f64>, log_price: Vec<f64>, hurst: Option<f64>) -> Result<Self> {
        if times.len() != log_price.len() {
            return Err(Error::InvalidPath(format!(
                "{} times vs {} prices",
                times.len(),
                log_price.len()
            )));
        }
        if times.len() < 2 {
            return Err(Error::InvalidPath("need at least two samples".into()));
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidPath("times must be strictly increasing".into()));
        }
        if log_price.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidPath("log-price must be finite".into()));
        }
        Ok(Self { times, log_price, hurst })
    }

    /// Load `(time, price)` rows from CSV text; a non-numeric first row is
    /// treated as a header. Prices must be positive.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut times = Vec::new();
        let mut log_price = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let mut fields = line.split(',').map(str::trim);
            let (t, p) = match (fields.next(), fields.next()) {
                (Some(t), Some(p)) => (t, p),
                _ => {
                    return Err(Error::InvalidPath(format!(
                        "line {}: expected `time,price`",
                        i + 1
                    )))
                }
            };
            match (t.parse::<f64>(), p.parse::<f64>()) {
                (Ok(t), Ok(p)) if p > 0.0 => {
                    times.push(t);
                    log_price.push(p.ln());
                }
                _ if i == 0 => continue, // header row
                _ => {
                    return Err(Error::InvalidPath(format!(
                        "line {}: bad time/price `{line}`",
                        i + 1
                    )))
                }
            }
        }
        Self::new(times, log_price, None)
    }
}

/// Grid spacing at level k.
pub fn eta(k: u32) -> f64 {
    0.5f64.powi(k as i32)
}

/// Risk-neutral probability of the embedded game at level k.
pub fn rho_delta(k: u32) -> f64 {
    1.0 / (2.0 + eta(k).exp_m1())
}
