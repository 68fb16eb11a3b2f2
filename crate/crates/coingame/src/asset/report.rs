//! Per-level growth measurement of the embedded games.

use super::{coarsen, nesting_holds, EmbeddedGame, LevelCounts, VariationStats};
use crate::error::{Error, Result};
use crate::kl::kl;
use crate::strategies::{markov_log_capital, MarkovParams, StrategySpec};

/// Growth and regularity diagnostics of one embedded game.
#[derive(Debug, Clone)]
pub struct LevelReport {
    pub k: u32,
    pub n: u64,
    pub rho_delta: f64,
    /// `(1/n) log K_n` of the order-1 Markov strategy, nats.
    pub markov1_rate: f64,
    /// `(1/n) log K_n` of the shift-combined length-2 block strategy, nats.
    pub block2_rate: f64,
    /// `D(2^{1-1/H} || 1/2)` when the Hölder exponent is known (NaN otherwise).
    pub target_markov: f64,
    /// Half the Markov target.
    pub target_block: f64,
    /// `n_k / (2^{1/H} n_{k-1})`; near 1 when variation scales regularly.
    pub growth_ratio: f64,
    /// `2 m^{ij} / q^{ij}` per pair pattern; near 1 under shift homogeneity.
    pub pair_ratios: [f64; 4],
    /// Empirical up-to-up transition `r^1`.
    pub r1: f64,
    pub tv: f64,
    pub l: f64,
}

/// Measure one level; `prev_n` is the round count one level coarser.
pub fn level_report(game: &EmbeddedGame, hurst: Option<f64>, prev_n: Option<u64>) -> LevelReport {
    let counts = LevelCounts::of(game);
    let variation = VariationStats::of(game);
    let n = counts.n;
    let rho = game.rho_delta;
    let markov1 = markov_log_capital(
        &MarkovParams { k: 1, a: 1.0, b: 1.0 },
        &game.bits,
        rho,
    );
    let block2 = StrategySpec::Block { k: 2, shift: None, c: 1.0 }
        .log_capital(&game.bits, rho)
        .expect("valid block parameters");
    let target = hurst
        .map(|h| kl(2f64.powf(1.0 - 1.0 / h), 0.5).expect("target in (0,1)"))
        .unwrap_or(f64::NAN);
    let growth_ratio = match (hurst, prev_n) {
        (Some(h), Some(prev)) if prev > 0 => {
            n as f64 / (2f64.powf(1.0 / h) * prev as f64)
        }
        _ => f64::NAN,
    };
    LevelReport {
        k: game.k,
        n,
        rho_delta: rho,
        markov1_rate: markov1 / n as f64,
        block2_rate: block2 / n as f64,
        target_markov: target,
        target_block: target / 2.0,
        growth_ratio,
        pair_ratios: counts.pair_ratios(),
        r1: counts.r1(),
        tv: variation.tv,
        l: variation.l,
    }
}

/// Coarsen the finest game down to `k_min`, asserting the exact nesting
/// identities at every step, and report each level in ascending k.
pub fn asset_growth_report(
    finest: &EmbeddedGame,
    k_min: u32,
    hurst: Option<f64>,
) -> Result<Vec<LevelReport>> {
    if k_min > finest.k {
        return Err(Error::Embedding {
            level: k_min,
            msg: format!("coarsest level exceeds finest level {}", finest.k),
        });
    }
    let mut games = vec![finest.clone()];
    while games.last().unwrap().k > k_min {
        let fine = games.last().unwrap();
        let coarse = coarsen(fine)?;
        if !nesting_holds(fine, &coarse) {
            return Err(Error::Embedding {
                level: fine.k,
                msg: "nesting identity violated between adjacent levels".into(),
            });
        }
        games.push(coarse);
    }
    games.reverse(); // ascending k
    let mut reports = Vec::with_capacity(games.len());
    for (i, game) in games.iter().enumerate() {
        if game.n() == 0 {
            return Err(Error::Embedding { level: game.k, msg: "empty game".into() });
        }
        let prev_n = i.checked_sub(1).map(|j| games[j].n() as u64);
        reports.push(level_report(game, hurst, prev_n));
    }
    Ok(reports)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::asset::{brownian_crossing_game, embed, fbm_path};
    use approx::assert_abs_diff_eq;

    #[test]
    fn target_values() {
        // H = 2/3: 2^{1 - 1/H} = 2^{-1/2}; H = 1/2: argument 1/2, rate 0
        let r = level_report(&brownian_crossing_game(6, 2000, 1), Some(2.0 / 3.0), None);
        assert_abs_diff_eq!(r.target_markov, kl(0.5f64.sqrt(), 0.5).unwrap(), epsilon = 1e-15);
        assert_abs_diff_eq!(r.target_markov, 0.088425, epsilon = 1e-6);
        assert_abs_diff_eq!(r.target_block, r.target_markov / 2.0, epsilon = 1e-15);
        let r = level_report(&brownian_crossing_game(6, 2000, 1), Some(0.5), None);
        assert_eq!(r.target_markov, 0.0);
    }

    #[test]
    fn fair_walk_rates_vanish() {
        let game = brownian_crossing_game(10, 1 << 16, 2);
        let r = level_report(&game, Some(0.5), None);
        assert!(r.markov1_rate.abs() < 0.001, "markov rate {}", r.markov1_rate);
        assert!(r.block2_rate.abs() < 0.001, "block rate {}", r.block2_rate);
        assert_abs_diff_eq!(r.r1, 0.5, epsilon = 0.02);
    }

    #[test]
    fn report_covers_requested_levels() {
        let path = fbm_path(0.6, 1.0, 1 << 14, 4).unwrap();
        let finest = embed(&path, 9).unwrap();
        let reports = asset_growth_report(&finest, 5, Some(0.6)).unwrap();
        assert_eq!(reports.len(), 5);
        assert_eq!(reports[0].k, 5);
        assert_eq!(reports[4].k, 9);
        // rounds grow with k; the first level has no growth ratio
        assert!(reports.windows(2).all(|w| w[1].n > w[0].n));
        assert!(reports[0].growth_ratio.is_nan());
        assert!(reports[1].growth_ratio.is_finite());
    }
}
