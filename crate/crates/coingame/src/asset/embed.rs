//! Limit-order embedding of a price path onto the dyadic log-price grid.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use super::{eta, rho_delta, PricePath};
use crate::error::{Error, Result};

/// The coin-tossing game extracted from a path at grid level k: one bit per
/// filled limit order, 1 for an upward grid step of `log S`, 0 for a
/// downward one.
#[derive(Debug, Clone)]
pub struct EmbeddedGame {
    pub k: u32,
    pub eta: f64,
    pub rho_delta: f64,
    pub bits: Vec<u8>,
    /// Grid level (multiple of eta relative to log S(0)) after the last round.
    pub final_level: i64,
}

impl EmbeddedGame {
    pub fn n(&self) -> usize {
        self.bits.len()
    }
}

/// Embed a path at level k by an exact crossing scan of its linear
/// interpolation: each segment is monotone, so it crosses the grid levels
/// between its endpoints in order, one bit per crossed level. No sampling
/// refinement is needed — the scan is exact for the interpolated path.
pub fn embed(path: &PricePath, k: u32) -> Result<EmbeddedGame> {
    if k > 40 {
        return Err(Error::Embedding { level: k, msg: "grid level too fine".into() });
    }
    let step = eta(k);
    let anchor = path.log_price[0];
    let mut level = 0i64;
    let mut bits = Vec::new();
    for &lp in &path.log_price[1..] {
        // working in units of eta keeps the level an exact integer
        let y = (lp - anchor) / step;
        while y >= (level + 1) as f64 {
            bits.push(1);
            level += 1;
        }
        while y <= (level - 1) as f64 {
            bits.push(0);
            level -= 1;
        }
    }
    Ok(EmbeddedGame { k, eta: step, rho_delta: rho_delta(k), bits, final_level: level })
}

/// The level-(k-1) game from the level-k game. Grids are nested: a coarse
/// step happens exactly when the fine level moves +-2 from the last coarse
/// anchor, so this is integer-exact and equals re-embedding the path.
pub fn coarsen(game: &EmbeddedGame) -> Result<EmbeddedGame> {
    if game.k == 0 {
        return Err(Error::Embedding { level: 0, msg: "level 0 cannot be coarsened".into() });
    }
    let mut rel = 0i64;
    let mut level = 0i64;
    let mut bits = Vec::with_capacity(game.bits.len() / 2);
    for &b in &game.bits {
        rel += if b == 1 { 1 } else { -1 };
        if rel == 2 {
            bits.push(1);
            level += 1;
            rel = 0;
        } else if rel == -2 {
            bits.push(0);
            level -= 1;
            rel = 0;
        }
    }
    let k = game.k - 1;
    Ok(EmbeddedGame { k, eta: eta(k), rho_delta: rho_delta(k), bits, final_level: level })
}

/// The embedded game of Brownian motion is exactly an i.i.d. fair coin:
/// by the strong Markov property and symmetry, each +-eta first passage is
/// an independent fair bit. This constructs the level-k game directly,
/// which is distributionally exact at every level <= k (unlike embedding a
/// discretely sampled path, which misses excursions between samples).
pub fn brownian_crossing_game(k: u32, n: usize, seed: u64) -> EmbeddedGame {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut level = 0i64;
    let bits: Vec<u8> = (0..n)
        .map(|_| {
            let b = u8::from(rng.gen_bool(0.5));
            level += if b == 1 { 1 } else { -1 };
            b
        })
        .collect();
    EmbeddedGame { k, eta: eta(k), rho_delta: rho_delta(k), bits, final_level: level }
}

/// Step and pair counts of one embedded game: overlapping pairs `q_pair`,
/// non-overlapping pairs at shift 0 (`m_pair`) and shift 1 (`m_tilde`).
/// Pair patterns are indexed first-bit-MSB: 0b10 means "up then down".
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelCounts {
    pub n: u64,
    pub q1: u64,
    pub q0: u64,
    pub q_pair: [u64; 4],
    pub m_pair: [u64; 4],
    pub m_tilde: [u64; 4],
}

impl LevelCounts {
    pub fn of(game: &EmbeddedGame) -> Self {
        let bits = &game.bits;
        let q1 = bits.iter().map(|&b| b as u64).sum::<u64>();
        let mut q_pair = [0u64; 4];
        for w in bits.windows(2) {
            q_pair[(w[0] << 1 | w[1]) as usize] += 1;
        }
        let mut m_pair = [0u64; 4];
        for w in bits.chunks_exact(2) {
            m_pair[(w[0] << 1 | w[1]) as usize] += 1;
        }
        let mut m_tilde = [0u64; 4];
        if bits.len() > 1 {
            for w in bits[1..].chunks_exact(2) {
                m_tilde[(w[0] << 1 | w[1]) as usize] += 1;
            }
        }
        Self { n: bits.len() as u64, q1, q0: bits.len() as u64 - q1, q_pair, m_pair, m_tilde }
    }

    /// Empirical transition out of an up step, `r^1 = q^{11} / q^{1.}`.
    pub fn r1(&self) -> f64 {
        let (q11, q10) = (self.q_pair[0b11] as f64, self.q_pair[0b10] as f64);
        q11 / (q11 + q10)
    }

    /// Regularity ratios `2 m^{ij} / q^{ij}` (NaN where `q^{ij} = 0`).
    pub fn pair_ratios(&self) -> [f64; 4] {
        std::array::from_fn(|i| 2.0 * self.m_pair[i] as f64 / self.q_pair[i] as f64)
    }
}

/// Total and signed variation captured at one level.
#[derive(Debug, Clone, Copy)]
pub struct VariationStats {
    /// `TV(eta, T) = n_k * eta`: total variation of log-price on the grid.
    pub tv: f64,
    /// `L(eta, T) = (q^1 - q^0) * eta`: net move on the grid.
    pub l: f64,
}

impl VariationStats {
    pub fn of(game: &EmbeddedGame) -> Self {
        let c = LevelCounts::of(game);
        Self { tv: c.n as f64 * game.eta, l: (c.q1 as f64 - c.q0 as f64) * game.eta }
    }
}

/// Integer-exact nesting identities between a level-k game and its
/// level-(k-1) coarsening: non-overlapping "11" pairs are exactly the
/// coarse up steps, "00" pairs the coarse down steps.
pub fn nesting_holds(fine: &EmbeddedGame, coarse: &EmbeddedGame) -> bool {
    let f = LevelCounts::of(fine);
    let c = LevelCounts::of(coarse);
    f.m_pair[0b11] == c.q1 && f.m_pair[0b00] == c.q0
}
