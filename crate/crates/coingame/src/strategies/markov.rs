//! Markovian strategy of order k: per-context beta-binomial betting
//! conditioned on the preceding k outcomes.
//!
//! Contexts are the last k bits, indexed with the oldest bit as the most
//! significant. The first k rounds carry no bet (`p = rho`; the initial
//! distribution is the risk-neutral measure). Order 0 is the plain
//! beta-binomial strategy on the whole sequence.

use crate::error::{Error, Result};
use crate::game::Predictor;
use statrs::function::beta::ln_beta;

#[derive(Debug, Clone, Copy)]
pub struct MarkovParams {
    pub k: usize,
    pub a: f64,
    pub b: f64,
}

impl MarkovParams {
    pub fn new(k: usize, a: f64, b: f64) -> Result<Self> {
        if a <= 0.0 || b <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "Markov strategy needs a, b > 0, got a={a}, b={b}"
            )));
        }
        if k > 24 {
            return Err(Error::InvalidParameter(format!("Markov order {k} too large")));
        }
        Ok(Self { k, a, b })
    }
}

/// Incremental order-k Markov predictor.
#[derive(Debug, Clone)]
pub struct MarkovPredictor {
    params: MarkovParams,
    rho: f64,
    ctx: usize,
    mask: usize,
    seen: usize,
    ones: Vec<u64>,
    zeros: Vec<u64>,
}

impl MarkovPredictor {
    pub fn new(params: MarkovParams, rho: f64) -> Self {
        let size = 1usize << params.k;
        Self {
            params,
            rho,
            ctx: 0,
            mask: size - 1,
            seen: 0,
            ones: vec![0; size],
            zeros: vec![0; size],
        }
    }
}

impl Predictor for MarkovPredictor {
    fn predict(&self) -> f64 {
        if self.seen < self.params.k {
            return self.rho;
        }
        let (q1, q0) = (self.ones[self.ctx] as f64, self.zeros[self.ctx] as f64);
        (q1 + self.params.a) / (q1 + q0 + self.params.a + self.params.b)
    }

    fn observe(&mut self, x: u8) {
        if self.seen >= self.params.k {
            if x == 1 {
                self.ones[self.ctx] += 1;
            } else {
                self.zeros[self.ctx] += 1;
            }
        }
        self.ctx = (self.ctx << 1 | x as usize) & self.mask;
        self.seen += 1;
    }
}

/// Overlapping occurrence counts of k-tuples and their one/zero extensions
/// in a path: `q[eps]` counts `eps` anywhere in `xi^n`, `q1[eps]`/`q0[eps]`
/// count `eps` followed by a one/zero.
#[derive(Debug, Clone)]
pub struct MarkovCounts {
    pub k: usize,
    pub q: Vec<u64>,
    pub q1: Vec<u64>,
    pub q0: Vec<u64>,
}

impl MarkovCounts {
    /// Empirical context frequency `q^{eps} / n`.
    pub fn context_freq(&self, pattern: usize, n: usize) -> f64 {
        self.q[pattern] as f64 / n as f64
    }

    /// Empirical transition `r^{eps} = q^{eps 1} / q^{eps}` (NaN when the
    /// context never occurs with a successor).
    pub fn transition(&self, pattern: usize) -> f64 {
        let (q1, q0) = (self.q1[pattern] as f64, self.q0[pattern] as f64);
        q1 / (q1 + q0)
    }
}

pub fn markov_counts(bits: &[u8], k: usize) -> MarkovCounts {
    let size = 1usize << k;
    let mask = size - 1;
    let mut q = vec![0u64; size];
    let mut q1 = vec![0u64; size];
    let mut q0 = vec![0u64; size];
    let mut ctx = 0usize;
    for (i, &x) in bits.iter().enumerate() {
        if i >= k {
            if x == 1 {
                q1[ctx] += 1;
            } else {
                q0[ctx] += 1;
            }
        }
        ctx = (ctx << 1 | x as usize) & mask;
        if i + 1 >= k {
            q[ctx] += 1;
        }
    }
    MarkovCounts { k, q, q1, q0 }
}

/// Closed-form log-capital: the product over contexts of per-context
/// beta-binomial likelihood ratios; the first k rounds contribute factor 1.
pub fn markov_log_capital(params: &MarkovParams, bits: &[u8], rho: f64) -> f64 {
    let counts = markov_counts(bits, params.k);
    let (a, b) = (params.a, params.b);
    let mut log_k = 0.0;
    for pattern in 0..counts.q1.len() {
        let (q1, q0) = (counts.q1[pattern] as f64, counts.q0[pattern] as f64);
        if q1 == 0.0 && q0 == 0.0 {
            continue;
        }
        log_k += ln_beta(q1 + a, q0 + b) - ln_beta(a, b)
            - q1 * rho.ln()
            - q0 * (1.0 - rho).ln();
    }
    log_k
}
