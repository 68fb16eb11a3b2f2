//! Kullback divergence utilities.

use crate::error::{Error, Result};

const NORM_TOL: f64 = 1e-12;

/// Binary Kullback divergence `D(p || q)` in nats, with the `0 log 0 = 0`
/// convention. `p` may be 0 or 1; `q` must lie strictly inside (0,1).
pub fn kl(p: f64, q: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidProbability(p));
    }
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::KlDomain(q));
    }
    Ok(xlogx_ratio(p, q) + xlogx_ratio(1.0 - p, 1.0 - q))
}

/// Divergence between probability vectors, `sum_j p_j log(p_j / q_j)`.
/// Both must sum to 1 within 1e-12 and every `q_j` must be positive.
pub fn kl_vec(p: &[f64], q: &[f64]) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::LengthMismatch(p.len(), q.len()));
    }
    for (j, &qj) in q.iter().enumerate() {
        if qj <= 0.0 {
            return Err(Error::KlZeroEntry(j, qj));
        }
    }
    for v in [p, q] {
        let s: f64 = v.iter().sum();
        if (s - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized(s));
        }
    }
    Ok(p.iter().zip(q).map(|(&pj, &qj)| xlogx_ratio(pj, qj)).sum())
}

/// One divergence term `w * D(p || q)` tolerant of empirical boundary values:
/// zero weight contributes nothing, `p == q` contributes nothing even at the
/// boundary, and a genuinely impossible event (`q` at a boundary `p` is not
/// at) yields infinity.
pub fn weighted_kl_term(w: f64, p: f64, q: f64) -> f64 {
    if w == 0.0 || p == q {
        return 0.0;
    }
    if q <= 0.0 || q >= 1.0 {
        return f64::INFINITY;
    }
    w * (xlogx_ratio(p, q) + xlogx_ratio(1.0 - p, 1.0 - q))
}

/// Binary entropy in bits per symbol.
pub fn binary_entropy_bits(p: f64) -> f64 {
    -(xlogx(p) + xlogx(1.0 - p)) / std::f64::consts::LN_2
}

fn xlogx(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * x.ln()
    }
}

fn xlogx_ratio(p: f64, q: f64) -> f64 {
    if p == 0.0 {
        0.0
    } else {
        p * (p / q).ln()
    }
}
