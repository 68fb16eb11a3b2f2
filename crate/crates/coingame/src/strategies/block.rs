//! Block-pattern Dirichlet strategy: Dirichlet-multinomial betting on
//! non-overlapping k-tuples of outcomes, offset by a shift.
//!
//! Patterns `eps_k` are indexed with the first bit of the block as the most
//! significant bit. During the first `shift` rounds, and implicitly at the
//! start of each block, the within-block conditional of the
//! Dirichlet-multinomial drives the bet; the shift rounds themselves carry
//! no bet (`p = rho`).

use crate::error::{Error, Result};
use crate::game::Predictor;
use statrs::function::gamma::ln_gamma;

/// Block length, shift and Dirichlet hyperparameters (one `c > 0` per
/// pattern, indexed as above).
#[derive(Debug, Clone)]
pub struct BlockParams {
    pub k: usize,
    pub shift: usize,
    pub c: Vec<f64>,
}

impl BlockParams {
    pub fn new(k: usize, shift: usize, c: Vec<f64>) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidParameter("block length k must be >= 1".into()));
        }
        if shift >= k {
            return Err(Error::InvalidParameter(format!(
                "shift {shift} must be in [0, k) with k={k}"
            )));
        }
        if c.len() != 1 << k {
            return Err(Error::InvalidParameter(format!(
                "need {} Dirichlet weights for k={k}, got {}",
                1usize << k,
                c.len()
            )));
        }
        if c.iter().any(|&x| x <= 0.0) {
            return Err(Error::InvalidParameter("Dirichlet weights must be positive".into()));
        }
        Ok(Self { k, shift, c })
    }

    /// All patterns share the weight `c0`.
    pub fn uniform(k: usize, shift: usize, c0: f64) -> Result<Self> {
        Self::new(k, shift, vec![c0; 1 << k])
    }

    fn c_total(&self) -> f64 {
        self.c.iter().sum()
    }

    /// `rho^{eps} = rho^{#ones} (1-rho)^{k-#ones}` in log form.
    fn log_rho_pattern(&self, pattern: usize, rho: f64) -> f64 {
        let ones = pattern.count_ones() as f64;
        ones * rho.ln() + (self.k as f64 - ones) * (1.0 - rho).ln()
    }
}

/// Incremental block predictor. Carries completed-block counts and the
/// partial block in progress; the prediction is the exact conditional of
/// the Dirichlet-multinomial block distribution given both.
#[derive(Debug, Clone)]
pub struct BlockPredictor {
    params: BlockParams,
    rho: f64,
    counts: Vec<u64>,
    blocks: u64,
    partial_idx: usize,
    partial_len: usize,
    warmup: usize,
}

impl BlockPredictor {
    pub fn new(params: BlockParams, rho: f64) -> Self {
        let warmup = params.shift;
        let counts = vec![0; 1 << params.k];
        Self { params, rho, counts, blocks: 0, partial_idx: 0, partial_len: 0, warmup }
    }

    /// Completed-block pattern counts `m^{eps}`.
    pub fn counts(&self) -> &[u64] {
        &self.counts
    }
}

impl Predictor for BlockPredictor {
    fn predict(&self) -> f64 {
        if self.warmup > 0 {
            return self.rho;
        }
        let k = self.params.k;
        let tail = k - self.partial_len; // undecided positions incl. the next one
        let base = self.partial_idx << tail;
        let half = 1usize << (tail - 1);
        let mass = |range: std::ops::Range<usize>| -> f64 {
            range.map(|i| self.counts[i] as f64 + self.params.c[i]).sum()
        };
        // patterns extending the partial block; the next bit is the MSB of
        // the remaining tail, so "next = 1" is the upper half of the range
        let with_one = mass(base + half..base + 2 * half);
        let total = with_one + mass(base..base + half);
        with_one / total
    }

    fn observe(&mut self, x: u8) {
        if self.warmup > 0 {
            self.warmup -= 1;
            return;
        }
        self.partial_idx = self.partial_idx << 1 | x as usize;
        self.partial_len += 1;
        if self.partial_len == self.params.k {
            self.counts[self.partial_idx] += 1;
            self.blocks += 1;
            self.partial_idx = 0;
            self.partial_len = 0;
        }
    }
}

/// Closed-form log-capital on a whole path, partial final block included.
///
/// Complete blocks contribute the Dirichlet-multinomial Gamma product over
/// the risk-neutral block probabilities; a trailing partial block of `j`
/// bits contributes its marginal `sum_{eps extends partial} (m + c) / (N + c)`
/// over `rho^{ones} (1-rho)^{j-ones}`. The `shift` leading rounds contribute
/// factor one.
pub fn block_log_capital(params: &BlockParams, bits: &[u8], rho: f64) -> f64 {
    let k = params.k;
    let body = &bits[params.shift.min(bits.len())..];
    let n_blocks = body.len() / k;
    let mut counts = vec![0u64; 1 << k];
    for chunk in body.chunks_exact(k) {
        counts[crate::dist::prefix_index(chunk)] += 1;
    }
    let c_total = params.c_total();
    let mut log_k = ln_gamma(c_total) - ln_gamma(n_blocks as f64 + c_total);
    for (pattern, &m) in counts.iter().enumerate() {
        log_k += ln_gamma(m as f64 + params.c[pattern]) - ln_gamma(params.c[pattern]);
        if m > 0 {
            log_k -= m as f64 * params.log_rho_pattern(pattern, rho);
        }
    }
    // trailing partial block
    let partial = &body[n_blocks * k..];
    if !partial.is_empty() {
        let j = partial.len();
        let base = crate::dist::prefix_index(partial) << (k - j);
        let mass: f64 = (base..base + (1 << (k - j)))
            .map(|i| counts[i] as f64 + params.c[i])
            .sum();
        let ones = partial.iter().filter(|&&x| x == 1).count() as f64;
        log_k += (mass / (n_blocks as f64 + c_total)).ln()
            - ones * rho.ln()
            - (j as f64 - ones) * (1.0 - rho).ln();
    }
    log_k
}
