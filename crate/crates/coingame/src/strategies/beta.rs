//! Beta-binomial predictor: the strategy based on `s_n` only.

use crate::error::{Error, Result};
use crate::game::Predictor;
use statrs::function::beta::ln_beta;

/// Posterior-mean predictor `p_n = (a + s_{n-1}) / (a + b + n - 1)`.
#[derive(Debug, Clone)]
pub struct BetaBinomial {
    a: f64,
    b: f64,
    ones: u64,
    rounds: u64,
}

impl BetaBinomial {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if a <= 0.0 || b <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "beta-binomial needs a, b > 0, got a={a}, b={b}"
            )));
        }
        Ok(Self { a, b, ones: 0, rounds: 0 })
    }
}

impl Predictor for BetaBinomial {
    fn predict(&self) -> f64 {
        (self.a + self.ones as f64) / (self.a + self.b + self.rounds as f64)
    }

    fn observe(&mut self, x: u8) {
        self.ones += u64::from(x == 1);
        self.rounds += 1;
    }
}

/// Closed-form log-capital after the whole path:
/// `log B(a + s, b + n - s) - log B(a, b) - s log rho - (n-s) log(1-rho)`.
pub fn beta_binomial_log_capital(a: f64, b: f64, bits: &[u8], rho: f64) -> f64 {
    let n = bits.len() as f64;
    let s = bits.iter().filter(|&&x| x == 1).count() as f64;
    ln_beta(a + s, b + n - s) - ln_beta(a, b) - s * rho.ln() - (n - s) * (1.0 - rho).ln()
}
