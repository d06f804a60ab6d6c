//! Cost with derivative term, reward normalization to [-1, 1], NRMSE, and the
//! validation-set termination criterion.

use crate::eval::evaluate;
use crate::expr::Expression;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Central-difference step, as a fraction of each dimension's range.
pub const DERIV_STEP_FRACTION: f64 = 1e-4;

/// Termination threshold on the validation set.
pub const NRMSE_HIT: f64 = 1e-6;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FitnessError {
    #[error("candidate evaluation failed")]
    Failed,
    #[error("target has zero standard deviation")]
    DegenerateTarget,
}

/// Sampled (inputs, target) pairs with precomputed derivative estimates of
/// the target, obtained by the same central-difference operator applied to
/// the candidates.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Dataset {
    pub dims: usize,
    pub points: Vec<[f64; 3]>,
    pub targets: Vec<f64>,
    steps: [f64; 3],
    target_derivs: Vec<[Option<f64>; 3]>,
    /// max(targets) - min(targets), used by the reward normalization.
    spread: f64,
    mean: f64,
    stddev: f64,
}

impl Dataset {
    /// Build from sampled points and a target oracle callable anywhere.
    /// Derivative estimates are dropped at points where the oracle itself is
    /// non-finite when perturbed.
    pub fn from_oracle<F: Fn(&[f64]) -> f64>(dims: usize, points: Vec<[f64; 3]>, oracle: F) -> Dataset {
        assert!((1..=3).contains(&dims));
        let targets: Vec<f64> = points.iter().map(|p| oracle(&p[..dims])).collect();
        assert!(
            targets.iter().all(|t| t.is_finite()),
            "oracle must be finite on every sampled point"
        );
        let mut steps = [0.0; 3];
        for d in 0..dims {
            let lo = points.iter().map(|p| p[d]).fold(f64::INFINITY, f64::min);
            let hi = points.iter().map(|p| p[d]).fold(f64::NEG_INFINITY, f64::max);
            let range = hi - lo;
            steps[d] = if range > 0.0 {
                DERIV_STEP_FRACTION * range
            } else {
                DERIV_STEP_FRACTION
            };
        }
        let target_derivs = points
            .iter()
            .map(|p| {
                let mut row = [None; 3];
                for (d, slot) in row.iter_mut().enumerate().take(dims) {
                    let h = steps[d];
                    let mut plus = *p;
                    let mut minus = *p;
                    plus[d] += h;
                    minus[d] -= h;
                    let (fp, fm) = (oracle(&plus[..dims]), oracle(&minus[..dims]));
                    if fp.is_finite() && fm.is_finite() {
                        *slot = Some((fp - fm) / (2.0 * h));
                    }
                }
                row
            })
            .collect();
        let lo = targets.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = targets.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let n = targets.len() as f64;
        let mean = targets.iter().sum::<f64>() / n;
        let var = targets.iter().map(|t| (t - mean).powi(2)).sum::<f64>() / n;
        Dataset {
            dims,
            points,
            targets,
            steps,
            target_derivs,
            spread: hi - lo,
            mean,
            stddev: var.sqrt(),
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn spread(&self) -> f64 {
        self.spread
    }

    pub fn target_stddev(&self) -> f64 {
        self.stddev
    }

    pub fn target_mean(&self) -> f64 {
        self.mean
    }

    pub fn deriv_step(&self, dim: usize) -> f64 {
        self.steps[dim]
    }
}

/// L1 distance to the target plus L1 distance of first derivatives, both
/// estimated with the shared central-difference operator.
///
/// A failure at a base point fails the genome; a failure only at perturbed
/// points skips that point's derivative contribution, unless every
/// contribution is lost.
pub fn cost(expr: &Expression, scalars: &[f64], data: &Dataset) -> Result<f64, FitnessError> {
    let mut total = 0.0;
    let mut predictions = Vec::with_capacity(data.len());
    for (p, t) in data.points.iter().zip(&data.targets) {
        let v = evaluate(expr, &p[..data.dims], scalars).map_err(|_| FitnessError::Failed)?;
        total += (t - v).abs();
        predictions.push(v);
    }
    let mut deriv_ok = 0usize;
    let mut deriv_attempted = 0usize;
    for d in 0..data.dims {
        let h = data.steps[d];
        for (p, row) in data.points.iter().zip(&data.target_derivs) {
            let Some(dt) = row[d] else { continue };
            deriv_attempted += 1;
            let mut plus = *p;
            let mut minus = *p;
            plus[d] += h;
            minus[d] -= h;
            let fp = evaluate(expr, &plus[..data.dims], scalars);
            let fm = evaluate(expr, &minus[..data.dims], scalars);
            if let (Ok(fp), Ok(fm)) = (fp, fm) {
                let dp = (fp - fm) / (2.0 * h);
                total += (dt - dp).abs();
                deriv_ok += 1;
            }
        }
    }
    if deriv_attempted > 0 && deriv_ok == 0 {
        return Err(FitnessError::Failed);
    }
    if !total.is_finite() {
        return Err(FitnessError::Failed);
    }
    Ok(total)
}

/// Map a cost to a reward in [-1, 1]: smooth, strictly decreasing in the
/// cost, 1 at zero cost, saturating at -1. Failures get the maximum penalty.
pub fn reward(cost: Result<f64, FitnessError>, data: &Dataset) -> f64 {
    match cost {
        Err(_) => -1.0,
        Ok(c) => {
            let scale = data.len() as f64 * (1.0 + data.spread);
            2.0 / (1.0 + c / scale) - 1.0
        }
    }
}

/// Root-mean-square error normalized by the target's population stddev.
pub fn nrmse(expr: &Expression, scalars: &[f64], data: &Dataset) -> Result<f64, FitnessError> {
    if data.stddev == 0.0 {
        return Err(FitnessError::DegenerateTarget);
    }
    let mut sq = 0.0;
    for (p, t) in data.points.iter().zip(&data.targets) {
        let v = evaluate(expr, &p[..data.dims], scalars).map_err(|_| FitnessError::Failed)?;
        sq += (t - v).powi(2);
    }
    Ok((sq / data.len() as f64).sqrt() / data.stddev)
}

/// Hit iff NRMSE on the validation set is at or below 1e-6. Failures miss.
pub fn check_termination(expr: &Expression, scalars: &[f64], validation: &Dataset) -> bool {
    matches!(nrmse(expr, scalars, validation), Ok(v) if v <= NRMSE_HIT)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> Expression {
        s.parse().unwrap()
    }

    fn dataset_1d<F: Fn(f64) -> f64 + Copy>(xs: &[f64], f: F) -> Dataset {
        let pts = xs.iter().map(|&x| [x, 0.0, 0.0]).collect();
        Dataset::from_oracle(1, pts, move |p| f(p[0]))
    }

    #[test]
    fn perfect_match_has_zero_cost_and_reward_one() {
        let data = dataset_1d(&[0.0, 0.5, 1.0, 1.5], |x| x * x);
        let e = parse("x x * halt");
        let c = cost(&e, &[], &data).unwrap();
        assert_eq!(c, 0.0);
        assert_eq!(reward(Ok(c), &data), 1.0);
    }

    #[test]
    fn hand_computed_cost_oracle() {
        // target f(x)=x on {0, 0.5, 1}, candidate 0 (via x-x):
        // value term 1.5; derivative term 3*|1-0| = 3; C = 4.5
        let data = dataset_1d(&[0.0, 0.5, 1.0], |x| x);
        let e = parse("x x - halt");
        let c = cost(&e, &[], &data).unwrap();
        assert!((c - 4.5).abs() < 1e-9, "C = {c}");
    }

    #[test]
    fn domain_failure_is_failed() {
        let data = dataset_1d(&[0.0, 0.5, 1.0], |x| x);
        let e = parse("x ln halt");
        assert_eq!(cost(&e, &[], &data), Err(FitnessError::Failed));
        assert_eq!(reward(cost(&e, &[], &data), &data), -1.0);
    }

    #[test]
    fn reward_is_order_preserving_and_saturates() {
        let data = dataset_1d(&[0.0, 0.5, 1.0], |x| x);
        let r0 = reward(Ok(0.0), &data);
        let r1 = reward(Ok(1.0), &data);
        let r2 = reward(Ok(2.0), &data);
        let rbig = reward(Ok(1e12), &data);
        assert_eq!(r0, 1.0);
        assert!(r0 > r1 && r1 > r2 && r2 > rbig);
        assert!(rbig > -1.0 && rbig < -0.999);
    }

    #[test]
    fn nrmse_definitions() {
        let xs: Vec<f64> = (0..50).map(|i| i as f64 / 49.0).collect();
        let data = dataset_1d(&xs, |x| 3.0 * x + 1.0);
        // exact match
        let c = nrmse(&parse("2 x * x + 1 + halt"), &[], &data).unwrap();
        assert!(c <= 1e-12, "{c}");
        // constant at the target mean has NRMSE exactly 1
        let mean = data.target_mean();
        let e = parse("A0 x * A1 + halt");
        let c = nrmse(&e, &[0.0, mean], &data).unwrap();
        assert!((c - 1.0).abs() < 1e-12, "{c}");
        // prediction = target + stddev everywhere
        let sd = data.target_stddev();
        let shifted = parse("A0 x * A1 + halt");
        let c = nrmse(&shifted, &[3.0, 1.0 + sd], &data).unwrap();
        assert!((c - 1.0).abs() < 1e-12, "{c}");
    }

    #[test]
    fn nrmse_scale_invariance() {
        let xs: Vec<f64> = (1..40).map(|i| i as f64 * 0.1).collect();
        let a = dataset_1d(&xs, |x| x * x + x);
        let b = dataset_1d(&xs, |x| 7.5 * (x * x + x));
        // prediction scaled by the same factor: A0*(x^2) vs 7.5*A0*(x^2)
        let e = parse("A0 x x * * halt");
        let na = nrmse(&e, &[1.0], &a).unwrap();
        let nb = nrmse(&e, &[7.5], &b).unwrap();
        assert!((na - nb).abs() < 1e-12);
    }

    #[test]
    fn degenerate_target_is_an_error() {
        let data = dataset_1d(&[0.0, 1.0, 2.0], |_| 4.0);
        assert_eq!(
            nrmse(&parse("x halt"), &[], &data),
            Err(FitnessError::DegenerateTarget)
        );
    }

    #[test]
    fn termination_examples() {
        let xs: Vec<f64> = (0..200).map(|i| i as f64 / 100.0).collect();
        let data = dataset_1d(&xs, |x| x * x * x);
        // x^A with A = 2.99999999 on U-like grid [0,2] hits
        let e = parse("x A0 ^ halt");
        assert!(check_termination(&e, &[2.999_999_99], &data));
        // far-off exponent misses
        assert!(!check_termination(&e, &[2.9], &data));
        // exact symbolic match hits
        assert!(check_termination(&parse("x x * x * halt"), &[], &data));
    }

    #[test]
    fn central_difference_order_is_at_least_two() {
        // halving h changes the estimate by O(h^2): observed order >= 1.9
        let f = |x: f64| (1.5 * x).sin() + x * x;
        let df = |x: f64| 1.5 * (1.5 * x).cos() + 2.0 * x;
        let x0 = 0.7;
        let mut errs = Vec::new();
        let mut hs = Vec::new();
        let mut h = 1e-2;
        for _ in 0..6 {
            let est = (f(x0 + h) - f(x0 - h)) / (2.0 * h);
            errs.push((est - df(x0)).abs());
            hs.push(h);
            h /= 2.0;
        }
        // log-log slope fit
        let n = errs.len() as f64;
        let xs: Vec<f64> = hs.iter().map(|h| h.ln()).collect();
        let ys: Vec<f64> = errs.iter().map(|e| e.ln()).collect();
        let xm = xs.iter().sum::<f64>() / n;
        let ym = ys.iter().sum::<f64>() / n;
        let slope = xs
            .iter()
            .zip(&ys)
            .map(|(x, y)| (x - xm) * (y - ym))
            .sum::<f64>()
            / xs.iter().map(|x| (x - xm).powi(2)).sum::<f64>();
        assert!(slope >= 1.9, "observed order {slope}");
    }

    #[test]
    fn polynomial_derivatives_match_analytic() {
        // degree <= 2 on uniform grids: central differences are exact up to
        // rounding
        let xs: Vec<f64> = (0..21).map(|i| i as f64 * 0.05).collect();
        let data = dataset_1d(&xs, |x| 2.0 * x * x + 3.0 * x + 1.0);
        let h = data.deriv_step(0);
        assert!(h > 0.0);
        for (p, row) in data.points.iter().zip(&data.target_derivs) {
            let analytic = 4.0 * p[0] + 3.0;
            let est = row[0].unwrap();
            assert!(
                (est - analytic).abs() <= 1e-8 * (1.0 + analytic.abs()),
                "{est} vs {analytic}"
            );
        }
    }
}
