//! Damped least-squares refinement (Levenberg-Marquardt with a
//! finite-difference Jacobian) used to descend from a CMA-ES recommendation
//! to the closest minimum.

use crate::eval::evaluate;
use crate::expr::Expression;
use crate::fitness::Dataset;
use nalgebra::{DMatrix, DVector};

const MAX_ITERATIONS: usize = 200;
const STEP_TOL: f64 = 1e-12;

/// Residual vector target - f(params, x); `None` when any point fails.
fn residuals(skeleton: &Expression, params: &[f64], data: &Dataset) -> Option<DVector<f64>> {
    let mut r = DVector::zeros(data.len());
    for (i, (p, t)) in data.points.iter().zip(&data.targets).enumerate() {
        let v = evaluate(skeleton, &p[..data.dims], params).ok()?;
        r[i] = t - v;
    }
    Some(r)
}

fn jacobian(
    skeleton: &Expression,
    params: &[f64],
    base: &DVector<f64>,
    data: &Dataset,
) -> Option<DMatrix<f64>> {
    let n = params.len();
    let mut j = DMatrix::zeros(data.len(), n);
    let mut work = params.to_vec();
    for k in 0..n {
        let h = 1e-7 * (1.0 + params[k].abs());
        work[k] = params[k] + h;
        let shifted = residuals(skeleton, &work, data)?;
        work[k] = params[k];
        for i in 0..data.len() {
            // residual = target - f, so d(residual)/dp = -df/dp
            j[(i, k)] = (shifted[i] - base[i]) / h;
        }
    }
    if j.iter().all(|v| v.is_finite()) {
        Some(j)
    } else {
        None
    }
}

/// Descend on the sum of squared residuals from `start`. The returned point
/// never has a larger residual than the start; if the first Jacobian is not
/// finite (or the start itself fails), the start is returned unchanged.
pub fn refine_least_squares(skeleton: &Expression, start: &[f64], data: &Dataset) -> Vec<f64> {
    if start.is_empty() || start.iter().any(|v| !v.is_finite()) {
        return start.to_vec();
    }
    let Some(mut res) = residuals(skeleton, start, data) else {
        return start.to_vec();
    };
    let mut params = start.to_vec();
    let mut sse = res.norm_squared();
    let mut lambda = 1e-3;

    for _ in 0..MAX_ITERATIONS {
        let Some(jac) = jacobian(skeleton, &params, &res, data) else {
            break;
        };
        let jtj = jac.transpose() * &jac;
        let jtr = jac.transpose() * &res;
        // Marquardt scaling of the damping term.
        let mut damped = jtj.clone();
        for k in 0..damped.nrows() {
            damped[(k, k)] += lambda * jtj[(k, k)].max(1e-12);
        }
        let Some(step) = damped.lu().solve(&(-&jtr)) else {
            break;
        };
        if !step.iter().all(|v| v.is_finite()) {
            break;
        }
        let trial: Vec<f64> = params.iter().zip(step.iter()).map(|(p, s)| p + s).collect();
        let trial_res = residuals(skeleton, &trial, data);
        let trial_sse = trial_res.as_ref().map(|r| r.norm_squared());
        match trial_sse {
            Some(t_sse) if t_sse <= sse => {
                let step_norm = step.norm();
                params = trial;
                res = trial_res.unwrap();
                sse = t_sse;
                lambda = (lambda * 0.3).max(1e-12);
                if step_norm < STEP_TOL {
                    break;
                }
            }
            _ => {
                lambda *= 10.0;
                if lambda > 1e12 {
                    break;
                }
            }
        }
    }
    params
}
