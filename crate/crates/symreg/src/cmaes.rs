//! Minimal (mu/mu_w, lambda) CMA-ES with cumulative step-size adaptation.
//!
//! Initialization follows the randomized scheme used for scalar fitting: the
//! start mean is drawn uniformly per coordinate and the initial step size is
//! drawn uniformly from a configured window.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;
use std::time::Instant;

#[derive(Debug, Clone)]
pub struct CmaesConfig {
    /// Start mean drawn per coordinate from this interval.
    pub mean_init_range: (f64, f64),
    /// Initial *variance* drawn uniformly from this interval; the starting
    /// step size is its square root.
    pub sigma_init_range: (f64, f64),
    /// Population size lambda; `None` uses 4 + floor(3 ln n).
    pub population: Option<usize>,
    pub max_iterations: usize,
    pub time_limit_s: Option<f64>,
    /// Stop when sigma times the largest axis collapses below this.
    pub tol_sigma: f64,
    /// Stop when the per-generation best objective has not moved by more
    /// than this over the trailing stagnation window.
    pub tol_fun: f64,
}

impl Default for CmaesConfig {
    fn default() -> Self {
        CmaesConfig {
            mean_init_range: (-1.0, 1.0),
            sigma_init_range: (1.0, 5.0),
            population: None,
            max_iterations: 5000,
            time_limit_s: None,
            tol_sigma: 1e-12,
            tol_fun: 1e-13,
        }
    }
}

#[derive(Debug, Clone)]
pub struct CmaesResult {
    pub best: Vec<f64>,
    pub best_value: f64,
    pub fevals: u64,
    pub iterations: usize,
}

pub fn default_population(n: usize) -> usize {
    4 + (3.0 * (n as f64).ln()).floor() as usize
}

/// Minimize a total objective (it must return a large finite penalty for
/// failed evaluations). Always returns the best-ever sample.
pub fn minimize<F, R>(objective: F, n: usize, cfg: &CmaesConfig, rng: &mut R) -> CmaesResult
where
    F: Fn(&[f64]) -> f64,
    R: Rng + ?Sized,
{
    assert!(n >= 1);
    let lambda = cfg.population.unwrap_or_else(|| default_population(n)).max(2);
    let mu = lambda / 2;
    let raw: Vec<f64> = (0..mu)
        .map(|i| ((lambda as f64 + 1.0) / 2.0).ln() - ((i + 1) as f64).ln())
        .collect();
    let wsum: f64 = raw.iter().sum();
    let weights: Vec<f64> = raw.iter().map(|w| w / wsum).collect();
    let mueff = 1.0 / weights.iter().map(|w| w * w).sum::<f64>();

    let nf = n as f64;
    let cc = (4.0 + mueff / nf) / (nf + 4.0 + 2.0 * mueff / nf);
    let cs = (mueff + 2.0) / (nf + mueff + 5.0);
    let c1 = 2.0 / ((nf + 1.3).powi(2) + mueff);
    let cmu = (1.0 - c1).min(2.0 * (mueff - 2.0 + 1.0 / mueff) / ((nf + 2.0).powi(2) + mueff));
    let damps = 1.0 + 2.0 * (0.0f64).max(((mueff - 1.0) / (nf + 1.0)).sqrt() - 1.0) + cs;
    let chi_n = nf.sqrt() * (1.0 - 1.0 / (4.0 * nf) + 1.0 / (21.0 * nf * nf));

    let mut mean = DVector::from_fn(n, |_, _| {
        rng.random_range(cfg.mean_init_range.0..=cfg.mean_init_range.1)
    });
    let mut sigma = rng
        .random_range(cfg.sigma_init_range.0..=cfg.sigma_init_range.1)
        .sqrt();
    let mut cov = DMatrix::<f64>::identity(n, n);
    let mut ps = DVector::<f64>::zeros(n);
    let mut pc = DVector::<f64>::zeros(n);

    let mut best = mean.as_slice().to_vec();
    let mut best_value = objective(&best);
    let mut fevals: u64 = 1;

    let start = Instant::now();
    let hist_len = 10 + (30.0 * nf / lambda as f64).ceil() as usize;
    let mut hist: std::collections::VecDeque<f64> = std::collections::VecDeque::new();
    let mut iterations = 0;
    for iter in 0..cfg.max_iterations {
        iterations = iter + 1;
        // Eigendecomposition each generation; dimensions here are tiny.
        let eig = cov.clone().symmetric_eigen();
        let d: DVector<f64> = eig.eigenvalues.map(|v| v.max(1e-30).sqrt());
        let b = eig.eigenvectors;
        if sigma * d.max() < cfg.tol_sigma || sigma < cfg.tol_sigma {
            break;
        }

        let mut samples: Vec<(f64, DVector<f64>, DVector<f64>)> = Vec::with_capacity(lambda);
        for _ in 0..lambda {
            let z = DVector::from_fn(n, |_, _| rng.sample::<f64, _>(StandardNormal));
            let y = &b * d.component_mul(&z);
            let x = &mean + sigma * &y;
            let f = objective(x.as_slice());
            fevals += 1;
            if f < best_value {
                best_value = f;
                best = x.as_slice().to_vec();
            }
            samples.push((f, y, x));
        }
        samples.sort_by(|a, b| a.0.total_cmp(&b.0));

        let y_w: DVector<f64> = samples
            .iter()
            .take(mu)
            .zip(&weights)
            .map(|((_, y, _), w)| y * *w)
            .sum();
        mean += sigma * &y_w;

        // Step-size path in the isotropic coordinates.
        let d_inv = d.map(|v| 1.0 / v);
        let c_inv_sqrt_yw = &b * d_inv.component_mul(&(b.transpose() * &y_w));
        ps = (1.0 - cs) * &ps
            + (cs * (2.0 - cs) * mueff).sqrt() * c_inv_sqrt_yw;
        let hsig = ps.norm()
            / (1.0 - (1.0 - cs).powi(2 * (iter as i32 + 1))).sqrt()
            / chi_n
            < 1.4 + 2.0 / (nf + 1.0);
        let hsig_f = if hsig { 1.0 } else { 0.0 };
        pc = (1.0 - cc) * &pc + hsig_f * (cc * (2.0 - cc) * mueff).sqrt() * &y_w;

        // Rank-1 + rank-mu covariance update.
        let mut rank_mu = DMatrix::<f64>::zeros(n, n);
        for ((_, y, _), w) in samples.iter().take(mu).zip(&weights) {
            rank_mu += *w * (y * y.transpose());
        }
        let delta_hsig = (1.0 - hsig_f) * cc * (2.0 - cc);
        cov = (1.0 - c1 - cmu) * &cov
            + c1 * (&pc * pc.transpose() + delta_hsig * &cov)
            + cmu * rank_mu;

        sigma *= ((cs / damps) * (ps.norm() / chi_n - 1.0)).exp();
        if !sigma.is_finite() {
            break;
        }

        hist.push_back(samples[0].0);
        if hist.len() > hist_len {
            hist.pop_front();
        }
        if hist.len() == hist_len {
            let lo = hist.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = hist.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            if hi - lo <= cfg.tol_fun {
                break;
            }
        }

        if let Some(limit) = cfg.time_limit_s {
            if start.elapsed().as_secs_f64() > limit {
                break;
            }
        }
    }

    CmaesResult {
        best,
        best_value,
        fevals,
        iterations,
    }
}
