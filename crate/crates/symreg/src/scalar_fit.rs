//! Free-scalar fitting: CMA-ES global search over the MSE landscape followed
//! by damped least-squares refinement.

use crate::cmaes::{self, CmaesConfig};
use crate::eval::evaluate;
use crate::expr::Expression;
use crate::fitness::Dataset;
use crate::lsq::refine_least_squares;
use rand::Rng;
use serde::{Deserialize, Serialize};

/// Penalty fed to CMA-ES when a candidate evaluation fails, so the objective
/// stays total and finite.
pub const FAIL_PENALTY: f64 = 1e100;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScalarFitConfig {
    pub mean_init_range: (f64, f64),
    pub sigma_init_range: (f64, f64),
    /// Lambda; `None` uses 4 + floor(3 ln n).
    pub population: Option<usize>,
    pub max_iterations: usize,
    /// Per-skeleton wall-clock budget.
    pub time_limit_s: Option<f64>,
    pub restarts: usize,
}

impl Default for ScalarFitConfig {
    fn default() -> Self {
        ScalarFitConfig {
            mean_init_range: (-1.0, 1.0),
            sigma_init_range: (1.0, 5.0),
            population: None,
            max_iterations: 5000,
            time_limit_s: Some(30.0),
            restarts: 1,
        }
    }
}

impl ScalarFitConfig {
    fn cmaes(&self) -> CmaesConfig {
        CmaesConfig {
            mean_init_range: self.mean_init_range,
            sigma_init_range: self.sigma_init_range,
            population: self.population,
            max_iterations: self.max_iterations,
            time_limit_s: self.time_limit_s,
            tol_sigma: 1e-12,
            tol_fun: 1e-13,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FitResult {
    pub scalars: Vec<f64>,
    pub mse: f64,
    /// Inner CMA-ES objective evaluations.
    pub fevals: u64,
    /// Least-squares refinement improved on the CMA-ES recommendation.
    pub refined: bool,
}

/// Mean squared error of the skeleton at the given scalars; failure penalty
/// keeps it total.
pub fn mse_objective(skeleton: &Expression, scalars: &[f64], data: &Dataset) -> f64 {
    let mut sq = 0.0;
    for (p, t) in data.points.iter().zip(&data.targets) {
        match evaluate(skeleton, &p[..data.dims], scalars) {
            Ok(v) => sq += (t - v).powi(2),
            Err(_) => return FAIL_PENALTY,
        }
    }
    let mse = sq / data.len() as f64;
    if mse.is_finite() {
        mse
    } else {
        FAIL_PENALTY
    }
}

/// CMA-ES over the MSE landscape (with the configured restart count), then
/// least-squares refinement from the recommendation; returns the better of
/// the two points.
pub fn fit_scalars<R: Rng + ?Sized>(
    skeleton: &Expression,
    data: &Dataset,
    cfg: &ScalarFitConfig,
    rng: &mut R,
) -> FitResult {
    let n = skeleton.n_free_scalars();
    if n == 0 {
        return FitResult {
            scalars: vec![],
            mse: mse_objective(skeleton, &[], data),
            fevals: 1,
            refined: false,
        };
    }
    let objective = |v: &[f64]| mse_objective(skeleton, v, data);
    let mut best: Option<(Vec<f64>, f64)> = None;
    let mut fevals = 0;
    for _ in 0..cfg.restarts.max(1) {
        let res = cmaes::minimize(&objective, n, &cfg.cmaes(), rng);
        fevals += res.fevals;
        if best.as_ref().is_none_or(|(_, v)| res.best_value < *v) {
            best = Some((res.best, res.best_value));
        }
    }
    let (cma_point, cma_mse) = best.expect("at least one restart");
    let refined_point = refine_least_squares(skeleton, &cma_point, data);
    let refined_mse = mse_objective(skeleton, &refined_point, data);
    if refined_mse < cma_mse {
        FitResult {
            scalars: refined_point,
            mse: refined_mse,
            fevals,
            refined: true,
        }
    } else {
        FitResult {
            scalars: cma_point,
            mse: cma_mse,
            fevals,
            refined: false,
        }
    }
}
