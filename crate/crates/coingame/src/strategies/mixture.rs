//! Convex mixtures of strategies over separate capital accounts.
//!
//! Each component receives an initial capital (its weight) and plays its own
//! strategy; the mixture's capital is the sum of the accounts plus any
//! uninvested cash. By linearity of the protocol in the bets this equals the
//! capital of the single strategy betting the sum of component bets, whose
//! predictive probability is the capital-weighted average of the component
//! predictions. Account values span hundreds of orders of magnitude, so
//! everything is aggregated in the log domain.

use crate::error::{Error, Result};
use crate::game::{check_rho, Predictor};
use crate::strategies::{BlockParams, BlockPredictor, MarkovParams, MarkovPredictor};

/// `log(sum_i exp(x_i))`, tolerant of `-inf` entries.
pub fn log_sum_exp(xs: &[f64]) -> f64 {
    let m = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    m + xs.iter().map(|&x| (x - m).exp()).sum::<f64>().ln()
}

struct Component {
    log_weight: f64,
    log_capital: f64, // relative to the component's own unit start
    predictor: Box<dyn Predictor>,
}

pub struct Mixture {
    components: Vec<Component>,
    log_cash: f64,
    rho: f64,
}

impl Mixture {
    /// Build from `(initial capital, predictor)` pairs. Weights must be
    /// positive; any shortfall from 1 is held as cash (never reinvested),
    /// a surplus is rejected.
    pub fn new(rho: f64, parts: Vec<(f64, Box<dyn Predictor>)>) -> Result<Self> {
        check_rho(rho)?;
        if parts.is_empty() {
            return Err(Error::EmptyMixture);
        }
        let total: f64 = parts.iter().map(|(w, _)| *w).sum();
        if parts.iter().any(|(w, _)| *w <= 0.0) || total > 1.0 + 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "mixture weights must be positive and sum to at most 1 (sum = {total})"
            )));
        }
        let cash = (1.0 - total).max(0.0);
        let components = parts
            .into_iter()
            .map(|(w, predictor)| Component {
                log_weight: w.ln(),
                log_capital: 0.0,
                predictor,
            })
            .collect();
        Ok(Self { components, log_cash: cash.ln(), rho })
    }

    /// The universal strategy truncated at `k_max`: half the capital across
    /// block strategies (order k gets `2^-(k+1)`, split equally over its k
    /// shifts), half across Markov strategies of order k with the same
    /// weights. The tail mass `2^-(k_max+1)` per family stays in cash.
    pub fn universal(k_max: usize, rho: f64) -> Result<Self> {
        if k_max == 0 {
            return Err(Error::InvalidParameter("universal mixture needs k_max >= 1".into()));
        }
        let mut parts: Vec<(f64, Box<dyn Predictor>)> = Vec::new();
        for k in 1..=k_max {
            let w = 0.5f64.powi(k as i32 + 1);
            for shift in 0..k {
                let params = BlockParams::uniform(k, shift, 1.0)?;
                parts.push((w / k as f64, Box::new(BlockPredictor::new(params, rho))));
            }
            let params = MarkovParams::new(k, 1.0, 1.0)?;
            parts.push((w, Box::new(MarkovPredictor::new(params, rho))));
        }
        Self::new(rho, parts)
    }

    /// `log K*_n = log(cash + sum_i w_i K^i_n)`.
    pub fn log_capital(&self) -> f64 {
        let mut terms: Vec<f64> = self
            .components
            .iter()
            .map(|c| c.log_weight + c.log_capital)
            .collect();
        terms.push(self.log_cash);
        log_sum_exp(&terms)
    }

    /// Per-component `log K^i_n` (each account started at 1).
    pub fn component_log_capitals(&self) -> Vec<f64> {
        self.components.iter().map(|c| c.log_capital).collect()
    }
}

impl Predictor for Mixture {
    fn predict(&self) -> f64 {
        // p* = rho + sum_i w_i K_i (p_i - rho) / (cash + sum_i w_i K_i)
        let mut scaled: Vec<f64> = self
            .components
            .iter()
            .map(|c| c.log_weight + c.log_capital)
            .collect();
        scaled.push(self.log_cash);
        let log_total = log_sum_exp(&scaled);
        if log_total == f64::NEG_INFINITY {
            return self.rho; // fully ruined; formal continuation
        }
        let mut tilt = 0.0;
        for c in &self.components {
            let share = (c.log_weight + c.log_capital - log_total).exp();
            if share > 0.0 {
                tilt += share * (c.predictor.predict() - self.rho);
            }
        }
        (self.rho + tilt).clamp(0.0, 1.0)
    }

    fn observe(&mut self, x: u8) {
        for c in &mut self.components {
            let p = c.predictor.predict();
            let factor = if x == 1 { p / self.rho } else { (1.0 - p) / (1.0 - self.rho) };
            c.log_capital += factor.ln();
            c.predictor.observe(x);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{run_game, PathPrefix};
    use crate::strategies::BetaBinomial;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};

    #[test]
    fn empty_mixture_rejected() {
        assert!(matches!(Mixture::new(0.5, vec![]), Err(Error::EmptyMixture)));
    }

    #[test]
    fn single_component_is_transparent() {
        let bits: Vec<u8> = vec![1, 1, 0, 1, 1, 1, 0, 1, 1];
        let path = PathPrefix::from_bits(bits.clone());
        let mut mix = Mixture::new(
            0.5,
            vec![(1.0, Box::new(BetaBinomial::new(1.0, 1.0).unwrap()) as Box<dyn Predictor>)],
        )
        .unwrap();
        let cp = run_game(&mut mix, &path, 0.5).unwrap();
        let expected = crate::strategies::beta_binomial_log_capital(1.0, 1.0, &bits, 0.5);
        assert_abs_diff_eq!(cp.final_log(), expected, epsilon = 1e-9);
        assert_abs_diff_eq!(mix.log_capital(), expected, epsilon = 1e-9);
    }

    #[test]
    fn linearity_with_ruined_component() {
        // one component doubles, the other is ruined: K* = 1
        struct Fixed(f64);
        impl Predictor for Fixed {
            fn predict(&self) -> f64 {
                self.0
            }
            fn observe(&mut self, _x: u8) {}
        }
        let mut mix = Mixture::new(
            0.5,
            vec![
                (0.5, Box::new(Fixed(1.0)) as Box<dyn Predictor>),
                (0.5, Box::new(Fixed(0.0)) as Box<dyn Predictor>),
            ],
        )
        .unwrap();
        mix.observe(1);
        assert_abs_diff_eq!(mix.log_capital(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn game_capital_equals_account_sum() {
        // running the mixture as one strategy reproduces the account sum
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(23);
        let bits: Vec<u8> = (0..500).map(|_| u8::from(rng.gen_bool(0.7))).collect();
        let path = PathPrefix::from_bits(bits);
        for rho in [0.5, 0.45] {
            let mut mix = Mixture::universal(4, rho).unwrap();
            let cp = run_game(&mut mix, &path, rho).unwrap();
            assert_abs_diff_eq!(cp.final_log(), mix.log_capital(), epsilon = 1e-9);
        }
    }

    #[test]
    fn cash_tail_keeps_mixture_solvent() {
        let mix = Mixture::universal(3, 0.5).unwrap();
        // weights sum to 1 - 2 * 2^-4 = 7/8; the rest is cash
        assert_abs_diff_eq!(mix.log_cash.exp(), 0.125, epsilon = 1e-12);
        assert_abs_diff_eq!(mix.log_capital(), 0.0, epsilon = 1e-12);
    }
}
