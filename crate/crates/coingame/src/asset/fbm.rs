//! Fractional Brownian motion synthesis.
//!
//! Exact Gaussian synthesis of fractional Gaussian noise by circulant
//! embedding of its autocovariance (Davies-Harte): the covariance of the
//! n increments embeds into a 2n circulant whose eigenvalues are the FFT
//! of the first row; for fGn these are non-negative, giving an exact
//! square root in O(n log n). A dense Cholesky factorization serves as a
//! fallback for small n should the embedding fail numerically.

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, StandardNormal};
use rustfft::{num_complex::Complex, FftPlanner};

use super::PricePath;
use crate::error::{Error, Result};

/// Autocovariance of unit-variance fGn at integer lag h.
fn fgn_cov(h: usize, hurst: f64) -> f64 {
    let h = h as f64;
    let p = 2.0 * hurst;
    0.5 * ((h + 1.0).powf(p) - 2.0 * h.powf(p) + (h - 1.0).abs().powf(p))
}

/// Sample a fractional Brownian motion log-price path on the uniform grid
/// `t_i = i T / n_grid`, with `B_H(0) = 0` and `Var B_H(T) = T^{2H}`.
pub fn fbm_path(hurst: f64, t_max: f64, n_grid: usize, seed: u64) -> Result<PricePath> {
    if !(0.0..1.0).contains(&hurst) || hurst == 0.0 {
        return Err(Error::Synthesis(format!("Hurst exponent {hurst} outside (0,1)")));
    }
    if n_grid < 2 || !n_grid.is_power_of_two() {
        return Err(Error::Synthesis(format!("n_grid {n_grid} must be a power of two >= 2")));
    }
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let increments = circulant_fgn(hurst, n_grid, &mut rng)
        .or_else(|_| cholesky_fgn(hurst, n_grid, &mut rng))?;

    let dt = t_max / n_grid as f64;
    let scale = dt.powf(hurst);
    let mut log_price = Vec::with_capacity(n_grid + 1);
    let mut times = Vec::with_capacity(n_grid + 1);
    let mut level = 0.0;
    log_price.push(0.0);
    times.push(0.0);
    for (i, &x) in increments.iter().enumerate() {
        level += scale * x;
        log_price.push(level);
        times.push((i + 1) as f64 * dt);
    }
    PricePath::new(times, log_price, Some(hurst))
}

fn circulant_fgn(hurst: f64, n: usize, rng: &mut ChaCha12Rng) -> Result<Vec<f64>> {
    let m = 2 * n;
    let mut row: Vec<Complex<f64>> = (0..m)
        .map(|j| Complex::new(fgn_cov(j.min(m - j), hurst), 0.0))
        .collect();
    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(m).process(&mut row);

    let max_eig = row.iter().map(|c| c.re).fold(0.0f64, f64::max);
    let mut eig = Vec::with_capacity(m);
    for c in &row {
        if c.re < -1e-10 * max_eig {
            return Err(Error::Synthesis(format!(
                "circulant embedding not positive (eigenvalue {})",
                c.re
            )));
        }
        eig.push(c.re.max(0.0));
    }

    let normal = StandardNormal;
    let mut draw = || -> f64 { normal.sample(rng) };
    let mut w = vec![Complex::new(0.0, 0.0); m];
    w[0] = Complex::new((eig[0] / m as f64).sqrt() * draw(), 0.0);
    w[n] = Complex::new((eig[n] / m as f64).sqrt() * draw(), 0.0);
    for j in 1..n {
        let r = (eig[j] / (2 * m) as f64).sqrt();
        let (u, v) = (draw(), draw());
        w[j] = Complex::new(r * u, r * v);
        w[m - j] = Complex::new(r * u, -r * v);
    }
    planner.plan_fft_forward(m).process(&mut w);
    Ok(w[..n].iter().map(|c| c.re).collect())
}

fn cholesky_fgn(hurst: f64, n: usize, rng: &mut ChaCha12Rng) -> Result<Vec<f64>> {
    if n > 4096 {
        return Err(Error::Synthesis(format!(
            "dense fallback refused for n = {n} (limit 4096)"
        )));
    }
    // lower-triangular factor of the Toeplitz covariance, row by row
    let mut l = vec![vec![0.0f64; n]; n];
    for i in 0..n {
        for j in 0..=i {
            let mut s = fgn_cov(i - j, hurst);
            for t in 0..j {
                s -= l[i][t] * l[j][t];
            }
            if i == j {
                if s <= 0.0 {
                    return Err(Error::Synthesis("covariance not positive definite".into()));
                }
                l[i][j] = s.sqrt();
            } else {
                l[i][j] = s / l[j][j];
            }
        }
    }
    let normal = StandardNormal;
    let z: Vec<f64> = (0..n).map(|_| normal.sample(rng)).collect();
    Ok((0..n)
        .map(|i| (0..=i).map(|j| l[i][j] * z[j]).sum())
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn starts_at_zero_and_is_deterministic() {
        for hurst in [0.4, 0.5, 0.7] {
            let a = fbm_path(hurst, 1.0, 1 << 10, 7).unwrap();
            assert_eq!(a.log_price[0], 0.0);
            assert_eq!(a.log_price.len(), (1 << 10) + 1);
            let b = fbm_path(hurst, 1.0, 1 << 10, 7).unwrap();
            assert_eq!(a.log_price, b.log_price);
            let c = fbm_path(hurst, 1.0, 1 << 10, 8).unwrap();
            assert_ne!(a.log_price, c.log_price);
        }
    }

    #[test]
    fn brownian_increments_uncorrelated() {
        // lag-1 autocorrelation of H = 1/2 increments, averaged over seeds
        let n = 1 << 14;
        let mut worst: f64 = 0.0;
        for seed in 0..20u64 {
            let path = fbm_path(0.5, 1.0, n, seed).unwrap();
            let inc: Vec<f64> =
                path.log_price.windows(2).map(|w| w[1] - w[0]).collect();
            let var: f64 = inc.iter().map(|x| x * x).sum::<f64>() / n as f64;
            let cov: f64 =
                inc.windows(2).map(|w| w[0] * w[1]).sum::<f64>() / (n - 1) as f64;
            worst = worst.max((cov / var).abs());
        }
        assert!(worst <= 0.03, "lag-1 autocorrelation {worst}");
    }

    #[test]
    fn terminal_variance_and_self_similarity() {
        for hurst in [0.5, 0.75] {
            let mut sum_sq_full = 0.0;
            let mut sum_sq_half = 0.0;
            let reps = 300;
            for seed in 0..reps {
                let path = fbm_path(hurst, 1.0, 1 << 8, seed).unwrap();
                let full = *path.log_price.last().unwrap();
                let half = path.log_price[1 << 7];
                sum_sq_full += full * full;
                sum_sq_half += half * half;
            }
            let var_full = sum_sq_full / reps as f64;
            let var_half = sum_sq_half / reps as f64;
            assert!((var_full - 1.0).abs() < 0.15, "H={hurst}: var(B(1)) = {var_full}");
            let ratio = var_full / var_half;
            let expect = 2f64.powf(2.0 * hurst);
            assert!((ratio / expect - 1.0).abs() < 0.2, "H={hurst}: scaling ratio {ratio}");
        }
    }

    #[test]
    fn cholesky_agrees_with_circulant_in_law() {
        // same second moments from both synthesis routes (small n)
        let n = 64;
        let (mut v1, mut v2) = (0.0, 0.0);
        for seed in 0..200u64 {
            let mut rng = ChaCha12Rng::seed_from_u64(seed);
            let a = circulant_fgn(0.7, n, &mut rng).unwrap();
            let mut rng = ChaCha12Rng::seed_from_u64(seed + 1000);
            let b = cholesky_fgn(0.7, n, &mut rng).unwrap();
            v1 += a.iter().map(|x| x * x).sum::<f64>() / n as f64;
            v2 += b.iter().map(|x| x * x).sum::<f64>() / n as f64;
        }
        assert!((v1 / 200.0 - 1.0).abs() < 0.1);
        assert!((v2 / 200.0 - 1.0).abs() < 0.1);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(fbm_path(0.0, 1.0, 64, 0).is_err());
        assert!(fbm_path(1.5, 1.0, 64, 0).is_err());
        assert!(fbm_path(0.5, 1.0, 100, 0).is_err());
    }
}
