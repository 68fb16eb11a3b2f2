//! Finite-horizon distributions on paths and the bijection with prudent
//! strategies.
//!
//! A distribution is a consistent family `Q_n` on `{0,1}^n`, `n <= N`. Every
//! such `Q` induces a betting strategy through its conditionals, and every
//! prudent strategy arises this way; both directions are implemented here
//! together with the exact likelihood-ratio capital formula.

use crate::error::{Error, Result};
use crate::game::{likelihood_ratio_log_capital, check_rho, PathPrefix, Predictor};

/// Probabilities `Q_m(xi^m)` for every prefix of length `m <= horizon`.
/// Prefix `x_1 .. x_m` is indexed with `x_1` as the most significant bit.
#[derive(Debug, Clone)]
pub struct FiniteDistribution {
    horizon: usize,
    levels: Vec<Vec<f64>>,
}

/// Turn a bit slice into its level index (first bit most significant).
pub fn prefix_index(bits: &[u8]) -> usize {
    bits.iter().fold(0usize, |idx, &b| (idx << 1) | b as usize)
}

/// Enumerate the bits of a level index, first bit first.
pub fn index_bits(idx: usize, len: usize) -> Vec<u8> {
    (0..len).map(|i| ((idx >> (len - 1 - i)) & 1) as u8).collect()
}

impl FiniteDistribution {
    /// Build from raw level tables. `levels[m]` must have `2^m` entries.
    pub fn from_levels(levels: Vec<Vec<f64>>) -> Result<Self> {
        if levels.is_empty() || levels[0].len() != 1 {
            return Err(Error::Config("level 0 must hold the single empty prefix".into()));
        }
        for (m, level) in levels.iter().enumerate() {
            if level.len() != 1 << m {
                return Err(Error::Config(format!(
                    "level {m} has {} entries, expected {}",
                    level.len(),
                    1usize << m
                )));
            }
        }
        Ok(Self { horizon: levels.len() - 1, levels })
    }

    /// The i.i.d. Bernoulli(`rho`) measure up to the horizon.
    pub fn risk_neutral(horizon: usize, rho: f64) -> Result<Self> {
        check_rho(rho)?;
        Self::from_conditionals(horizon, |bits| {
            let _ = bits;
            rho
        })
    }

    /// Build a distribution from conditional probabilities of a one.
    pub fn from_conditionals(horizon: usize, mut p_one: impl FnMut(&[u8]) -> f64) -> Result<Self> {
        let mut levels = vec![vec![1.0f64]];
        for m in 1..=horizon {
            let prev = &levels[m - 1];
            let mut level = vec![0.0; 1 << m];
            for (idx, &q) in prev.iter().enumerate() {
                let p = p_one(&index_bits(idx, m - 1));
                if !(0.0..=1.0).contains(&p) {
                    return Err(Error::PredictorRange { round: m, p });
                }
                level[idx << 1 | 1] = q * p;
                level[idx << 1] = q * (1.0 - p);
            }
            levels.push(level);
        }
        Ok(Self { horizon, levels })
    }

    /// Build from a predictor by replaying every prefix. Desk scale only:
    /// the table has `2^(N+1)` entries.
    pub fn from_predictor(
        horizon: usize,
        factory: impl Fn() -> Box<dyn Predictor>,
    ) -> Result<Self> {
        Self::from_conditionals(horizon, |bits| {
            let mut pred = factory();
            for &b in bits {
                pred.observe(b);
            }
            pred.predict()
        })
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    /// `Q_m(xi^m)` for the given prefix.
    pub fn prob(&self, bits: &[u8]) -> f64 {
        self.levels[bits.len()][prefix_index(bits)]
    }

    pub fn prob_at(&self, level: usize, idx: usize) -> f64 {
        self.levels[level][idx]
    }

    /// Conditional probability of a one after `bits`; `None` where the
    /// conditioning prefix has probability zero.
    pub fn conditional_one(&self, bits: &[u8]) -> Option<f64> {
        let q = self.prob(bits);
        if q <= 0.0 {
            return None;
        }
        let idx = prefix_index(bits) << 1;
        Some(self.levels[bits.len() + 1][idx | 1] / q)
    }

    /// Largest violation of `Q_m(xi) = Q_{m+1}(xi 0) + Q_{m+1}(xi 1)`.
    pub fn consistency_defect(&self) -> f64 {
        let mut worst: f64 = ((self.levels[0][0]) - 1.0).abs();
        for m in 0..self.horizon {
            for (idx, &q) in self.levels[m].iter().enumerate() {
                let child = self.levels[m + 1][idx << 1] + self.levels[m + 1][idx << 1 | 1];
                worst = worst.max((q - child).abs());
            }
        }
        worst
    }

    /// Exact log-capital of the induced strategy on a path: the log
    /// likelihood ratio of `Q` to the risk-neutral measure. `-inf` where
    /// `Q` assigns zero (ruin).
    pub fn log_capital(&self, path: &PathPrefix, rho: f64) -> f64 {
        let q = self.prob(path.bits());
        if q <= 0.0 {
            return f64::NEG_INFINITY;
        }
        likelihood_ratio_log_capital(q.ln(), path.len(), path.ones(), rho)
    }
}

/// The predictor driving the betting rule `P_Q`. It tracks the prefix of the
/// current game internally; after a prefix of probability zero (ruin already
/// happened) it answers `rho`, i.e. all later bets vanish.
pub struct DistributionPredictor<'a> {
    dist: &'a FiniteDistribution,
    rho: f64,
    idx: usize,
    depth: usize,
    dead: bool,
}

/// Betting rule induced by a distribution: `M_n = K_{n-1} (p_n - rho) /
/// (rho (1 - rho))` with `p_n` the conditional of `Q`.
pub fn strategy_from_distribution(
    dist: &FiniteDistribution,
    rho: f64,
) -> Result<DistributionPredictor<'_>> {
    check_rho(rho)?;
    Ok(DistributionPredictor { dist, rho, idx: 0, depth: 0, dead: false })
}

impl Predictor for DistributionPredictor<'_> {
    fn predict(&self) -> f64 {
        if self.dead || self.depth >= self.dist.horizon() {
            return self.rho;
        }
        let q = self.dist.prob_at(self.depth, self.idx);
        if q <= 0.0 {
            // undefined conditional: ruin occurred on this prefix
            return self.rho;
        }
        self.dist.prob_at(self.depth + 1, self.idx << 1 | 1) / q
    }

    fn observe(&mut self, x: u8) {
        if self.depth >= self.dist.horizon() {
            self.dead = true;
            return;
        }
        self.idx = self.idx << 1 | x as usize;
        self.depth += 1;
    }
}

/// Recover the distribution of a prudent betting rule `bets(xi^{n-1}) = M_n`.
///
/// Walks all `2^N` paths, tracking capital exactly; a negative capital on
/// any path rejects the strategy, naming the offending path. The returned
/// distribution satisfies consistency by construction.
pub fn distribution_from_strategy(
    bets: impl Fn(&[u8]) -> f64,
    rho: f64,
    horizon: usize,
) -> Result<FiniteDistribution> {
    check_rho(rho)?;
    let mut levels = vec![vec![1.0f64]];
    // capitals[idx] = K_m(prefix idx); zero capital propagates zero branches
    let mut capitals = vec![1.0f64];
    for m in 0..horizon {
        let mut level = vec![0.0; 1 << (m + 1)];
        let mut next_capitals = vec![0.0; 1 << (m + 1)];
        for (idx, &k) in capitals.iter().enumerate() {
            let q = levels[m][idx];
            if k <= 0.0 {
                // ruined branch: both children stay at probability zero
                continue;
            }
            let bits = index_bits(idx, m);
            let bet = bets(&bits);
            let k1 = k + bet * (1.0 - rho);
            let k0 = k - bet * rho;
            let tol = 1e-12 * k.max(1.0);
            for (kx, x) in [(k0, 0u8), (k1, 1u8)] {
                if kx < -tol {
                    let mut path: String = bits.iter().map(|b| char::from(b'0' + b)).collect();
                    path.push(char::from(b'0' + x));
                    return Err(Error::NotPrudent { path, capital: kx });
                }
            }
            level[idx << 1 | 1] = rho * q * (1.0 + bet / k * (1.0 - rho));
            level[idx << 1] = (1.0 - rho) * q * (1.0 - bet / k * rho);
            next_capitals[idx << 1 | 1] = k1.max(0.0);
            next_capitals[idx << 1] = k0.max(0.0);
        }
        levels.push(level);
        capitals = next_capitals;
    }
    FiniteDistribution::from_levels(levels)
}

/// The bets of the strategy induced by `dist`, as a closure over prefixes —
/// the forward direction of the bijection in betting-rule form.
pub fn bets_of_distribution<'a>(
    dist: &'a FiniteDistribution,
    rho: f64,
) -> impl Fn(&[u8]) -> f64 + 'a {
    move |bits: &[u8]| {
        let q = dist.prob(bits);
        if q <= 0.0 {
            return 0.0;
        }
        let p = dist.conditional_one(bits).unwrap();
        // K_{n-1} from the closed form
        let ones = bits.iter().filter(|&&b| b == 1).count();
        let log_k = likelihood_ratio_log_capital(q.ln(), bits.len(), ones, rho);
        crate::game::bet_from_prob(p, rho, log_k.exp())
    }
}

/// `E^Q[log K_N]` over all length-`N` paths, pairing weights from `weights`
/// with log-capitals supplied per path index. Paths of weight zero are
/// skipped (Q-null); a ruined path with positive weight makes the
/// expectation `-inf`.
pub fn expected_log_capital(
    weights: &FiniteDistribution,
    n: usize,
    log_capital: impl Fn(usize) -> f64,
) -> f64 {
    let mut acc = 0.0;
    for idx in 0..(1usize << n) {
        let w = weights.prob_at(n, idx);
        if w <= 0.0 {
            continue;
        }
        let lk = log_capital(idx);
        if lk == f64::NEG_INFINITY {
            return f64::NEG_INFINITY;
        }
        acc += w * lk;
    }
    acc
}
