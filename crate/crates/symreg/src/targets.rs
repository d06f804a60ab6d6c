//! Benchmark target catalog, E/U sampling notation, and dataset construction.
//!
//! All sampling ranges are restricted to non-negative reals so that
//! non-integral exponents stay defined on the training data.

use crate::fitness::Dataset;
use rand::Rng;
use serde::Serialize;
use std::f64::consts::PI;
use thiserror::Error;

/// Inclusion tolerance for the upper endpoint of an E grid.
const GRID_TOL: f64 = 1e-9;

/// `E[a,b,s]`: equidistant grid with step `s`; `U[a,b,n]`: `n` i.i.d. uniform
/// draws.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum SamplingSpec {
    E { low: f64, high: f64, step: f64 },
    U { low: f64, high: f64, count: usize },
}

impl SamplingSpec {
    pub fn validate(&self) {
        match *self {
            SamplingSpec::E { low, high, step } => {
                assert!(low <= high && step > 0.0 && low >= 0.0);
            }
            SamplingSpec::U { low, high, count } => {
                assert!(low <= high && count >= 1 && low >= 0.0);
            }
        }
    }

    fn coordinates<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        match *self {
            SamplingSpec::E { low, high, step } => {
                let n = ((high - low) / step + GRID_TOL).floor() as usize + 1;
                (0..n).map(|k| low + k as f64 * step).collect()
            }
            SamplingSpec::U { low, high, count } => {
                (0..count).map(|_| rng.random_range(low..=high)).collect()
            }
        }
    }
}

impl std::fmt::Display for SamplingSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SamplingSpec::E { low, high, step } => write!(f, "E[{low},{high},{step}]"),
            SamplingSpec::U { low, high, count } => write!(f, "U[{low},{high},{count}]"),
        }
    }
}

/// How per-dimension draws combine into sample points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Combine {
    /// One spec shared by all dimensions: coordinate lists are zipped.
    Zip,
    /// Per-dimension specs: the Cartesian product is taken. E grids always
    /// combine this way.
    Cartesian,
}

#[derive(Debug, Clone, Serialize)]
pub struct SamplingPlan {
    pub dims: Vec<SamplingSpec>,
    pub combine: Combine,
}

impl SamplingPlan {
    pub fn zip(spec: SamplingSpec, n_dims: usize) -> SamplingPlan {
        SamplingPlan {
            dims: vec![spec; n_dims],
            combine: Combine::Zip,
        }
    }

    pub fn cartesian(dims: Vec<SamplingSpec>) -> SamplingPlan {
        SamplingPlan {
            combine: Combine::Cartesian,
            dims,
        }
    }
}

#[derive(Debug, Error)]
pub enum SampleError {
    #[error("target formula is non-finite at sampled point {0:?}")]
    OracleFailure(Vec<f64>),
}

/// Materialize a sampling plan into a dataset. Uniform draws landing where
/// the oracle is non-finite are resampled (bounded); a non-finite grid point
/// is an error, and the catalog entry must shift its low bound instead.
pub fn sample_dataset<R: Rng + ?Sized>(
    plan: &SamplingPlan,
    oracle: fn(&[f64]) -> f64,
    rng: &mut R,
) -> Result<Dataset, SampleError> {
    let n_dims = plan.dims.len();
    for d in &plan.dims {
        d.validate();
    }
    let mut points: Vec<[f64; 3]> = Vec::new();
    match plan.combine {
        Combine::Zip => {
            let cols: Vec<Vec<f64>> = plan.dims.iter().map(|s| s.coordinates(rng)).collect();
            let len = cols[0].len();
            assert!(cols.iter().all(|c| c.len() == len));
            for i in 0..len {
                let mut p = [0.0; 3];
                for (d, col) in cols.iter().enumerate() {
                    p[d] = col[i];
                }
                points.push(p);
            }
        }
        Combine::Cartesian => {
            let cols: Vec<Vec<f64>> = plan.dims.iter().map(|s| s.coordinates(rng)).collect();
            let total: usize = cols.iter().map(|c| c.len()).product();
            for mut idx in 0..total {
                let mut p = [0.0; 3];
                for (d, col) in cols.iter().enumerate() {
                    p[d] = col[idx % col.len()];
                    idx /= col.len();
                }
                points.push(p);
            }
        }
    }
    // Resample uniform draws at non-finite oracle points.
    for p in points.iter_mut() {
        let mut tries = 0;
        while !oracle(&p[..n_dims]).is_finite() {
            let resampled = plan
                .dims
                .iter()
                .enumerate()
                .any(|(d, s)| match *s {
                    SamplingSpec::U { low, high, .. } => {
                        p[d] = rng.random_range(low..=high);
                        true
                    }
                    SamplingSpec::E { .. } => false,
                });
            tries += 1;
            if !resampled || tries > 100 {
                return Err(SampleError::OracleFailure(p[..n_dims].to_vec()));
            }
        }
    }
    Ok(Dataset::from_oracle(n_dims, points, |p| oracle(p)))
}

#[derive(Debug, Clone, Serialize)]
pub struct TargetSpec {
    pub name: String,
    pub formula_text: String,
    #[serde(skip)]
    pub formula: fn(&[f64]) -> f64,
    pub dims: usize,
    pub train: SamplingPlan,
    pub validation: SamplingPlan,
    /// Maximum expression length L for the free-scalar stage.
    pub max_len: usize,
    /// Whether the published protocol enables simplification for this target.
    pub simplify: bool,
    /// No success expected; retained for completeness.
    pub expected_fail: bool,
    /// Smoke-test target, not part of the 31-target battery.
    pub smoke: bool,
    pub notes: String,
}

impl TargetSpec {
    /// First-stage (integer-scalar) length bound.
    pub fn max_len_step1(&self) -> usize {
        self.max_len + 10
    }
}

fn u(low: f64, high: f64, count: usize) -> SamplingSpec {
    SamplingSpec::U { low, high, count }
}

fn e(low: f64, high: f64, step: f64) -> SamplingSpec {
    SamplingSpec::E { low, high, step }
}

macro_rules! oracle {
    (|$p:ident| $body:expr) => {{
        fn f($p: &[f64]) -> f64 {
            $body
        }
        f as fn(&[f64]) -> f64
    }};
}

struct Entry {
    name: &'static str,
    text: &'static str,
    formula: fn(&[f64]) -> f64,
    dims: usize,
    train: SamplingPlan,
    validation: SamplingPlan,
    max_len: usize,
    simplify: bool,
    expected_fail: bool,
    smoke: bool,
    notes: &'static str,
}

fn keijzer4_core(x: f64) -> f64 {
    x.powi(3) * (-x).exp() * x.cos() * x.sin() * (x.cos() * x.sin().powi(2) - 1.0)
}

/// The full target catalog: the 31 published targets (two flagged
/// expected-fail) plus Korns-7 as a smoke test.
pub fn target_catalog() -> Vec<TargetSpec> {
    let entries = vec![
        // ---- small targets, L = 15 ----
        Entry {
            name: "nguyen-2",
            text: "x + x^2 + x^3 + x^4",
            formula: oracle!(|p| p[0] + p[0].powi(2) + p[0].powi(3) + p[0].powi(4)),
            dims: 1,
            train: SamplingPlan::zip(u(0.0, 1.0, 20), 1),
            validation: SamplingPlan::zip(u(0.0, 2.0, 200), 1),
            max_len: 15,
            simplify: false,
            expected_fail: false,
            smoke: false,
            notes: "",
        },
        Entry {
            name: "koza-3",
            text: "x^6 - 2*x^4 + x^2",
            formula: oracle!(|p| p[0].powi(6) - 2.0 * p[0].powi(4) + p[0].powi(2)),
            dims: 1,
            train: SamplingPlan::zip(u(0.0, 1.0, 20), 1),
            validation: SamplingPlan::zip(u(0.0, 2.0, 200), 1),
            max_len: 15,
            simplify: false,
            expected_fail: false,
            smoke: false,
            notes: "",
        },
        Entry {
            name: "meier-3",
            text: "x^2*y^2/(x+y)",
            formula: oracle!(|p| p[0].powi(2) * p[1].powi(2) / (p[0] + p[1])),
            dims: 2,
            train: SamplingPlan::zip(u(0.0, 1.0, 20), 2),
            validation: SamplingPlan::zip(u(0.0, 2.0, 50), 2),
            max_len: 15,
            simplify: false,
            expected_fail: false,
            smoke: false,
            notes: "x=y=0 draws are resampled (formula undefined at the origin)",
        },
        Entry {
            name: "meier-4",
            text: "x^5/y^3",
            formula: oracle!(|p| p[0].powi(5) / p[1].powi(3)),
            dims: 2,
            train: SamplingPlan::zip(u(0.0, 1.0, 20), 2),
            validation: SamplingPlan::zip(u(0.0, 2.0, 50), 2),
            max_len: 15,
            simplify: false,
            expected_fail: false,
            smoke: false,
            notes: "y=0 draws are resampled (y^-3 undefined)",
        },
        Entry {
            name: "nguyen-9",
            text: "sin(x) + sin(y^2)",
            formula: oracle!(|p| p[0].sin() + (p[1] * p[1]).sin()),
            dims: 2,
            train: SamplingPlan::zip(u(0.0, 1.0, 20), 2),
            validation: SamplingPlan::zip(u(0.0, 2.0, 100), 2),
            max_len: 15,
            simplify: false,
            expected_fail: false,
            smoke: false,
            notes: "",
        },
        Entry {
            name: "keijzer-1",
            text: "0.3*x*sin(2*pi*x)",
            formula: oracle!(|p| 0.3 * p[0] * (2.0 * PI * p[0]).sin()),
            dims: 1,
            train: SamplingPlan::cartesian(vec![e(0.0, 1.0, 0.05)]),
            validation: SamplingPlan::cartesian(vec![e(0.0, 10.0, 0.05)]),
            max_len: 15,
            simplify: false,
            expected_fail: false,
            smoke: false,
            notes: "",
        },
        Entry {
            name: "keijzer-2",
            text: "0.3*x*sin(2*pi*x)",
            formula: oracle!(|p| 0.3 * p[0] * (2.0 * PI * p[0]).sin()),
            dims: 1,
            train: SamplingPlan::cartesian(vec![e(0.0, 2.0, 0.05)]),
            validation: SamplingPlan::cartesian(vec![e(0.0, 4.0, 0.05)]),
            max_len: 15,
            simplify: false,
            expected_fail: false,
            smoke: false,
            notes: "",
        },
        Entry {
            name: "keijzer-3",
            text: "0.3*x*sin(2*pi*x)",
            formula: oracle!(|p| 0.3 * p[0] * (2.0 * PI * p[0]).sin()),
            dims: 1,
            train: SamplingPlan::cartesian(vec![e(0.0, 3.0, 0.05)]),
            validation: SamplingPlan::cartesian(vec![e(0.0, 4.0, 0.05)]),
            max_len: 15,
            simplify: false,
            expected_fail: false,
            smoke: false,
            notes: "",
        },
        Entry {
            name: "nguyen-5",
            text: "sin(x^2)*cos(x) - 1",
            formula: oracle!(|p| (p[0] * p[0]).sin() * p[0].cos() - 1.0),
            dims: 1,
            train: SamplingPlan::zip(u(0.0, 1.0, 20), 1),
            validation: SamplingPlan::zip(u(0.0, 1.2, 200), 1),
            max_len: 15,
            simplify: false,
            expected_fail: false,
            smoke: false,
            notes: "",
        },
        Entry {
            name: "nguyen-6",
            text: "sin(x) + sin(x + x^2)",
            formula: oracle!(|p| p[0].sin() + (p[0] + p[0] * p[0]).sin()),
            dims: 1,
            train: SamplingPlan::zip(u(0.0, 1.0, 20), 1),
            validation: SamplingPlan::zip(u(0.0, 1.2, 200), 1),
            max_len: 15,
            simplify: false,
            expected_fail: false,
            smoke: false,
            notes: "",
        },
        Entry {
            name: "sine",
            text: "sin(x) + sin(x + x^2)",
            formula: oracle!(|p| p[0].sin() + (p[0] + p[0] * p[0]).sin()),
            dims: 1,
            train: SamplingPlan::cartesian(vec![e(0.0, 6.2, 0.1)]),
            validation: SamplingPlan::zip(u(0.0, 10.0, 100), 1),
            max_len: 15,
            simplify: false,
            expected_fail: false,
            smoke: false,
            notes: "",
        },
        Entry {
            name: "koza-2",
            text: "x^5 - 2*x^3 + x",
            formula: oracle!(|p| p[0].powi(5) - 2.0 * p[0].powi(3) + p[0]),
            dims: 1,
            train: SamplingPlan::zip(u(0.0, 1.0, 20), 1),
            validation: SamplingPlan::zip(u(0.0, 2.0, 200), 1),
            max_len: 15,
            simplify: false,
            expected_fail: false,
            smoke: false,
            notes: "",
        },
        // ---- mid-sized targets ----
        Entry {
            name: "burks",
            text: "4*x^4 + 3*x^3 + 2*x^2 + x",
            formula: oracle!(|p| {
                4.0 * p[0].powi(4) + 3.0 * p[0].powi(3) + 2.0 * p[0].powi(2) + p[0]
            }),
            dims: 1,
            train: SamplingPlan::zip(u(0.0, 1.0, 20), 1),
            validation: SamplingPlan::zip(u(0.0, 3.0, 200), 1),
            max_len: 20,
            simplify: false,
            expected_fail: false,
            smoke: false,
            notes: "",
        },
        Entry {
            name: "keijzer-14",
            text: "8/(2 + x^2 + y^2)",
            formula: oracle!(|p| 8.0 / (2.0 + p[0] * p[0] + p[1] * p[1])),
            dims: 2,
            train: SamplingPlan::zip(u(0.0, 3.0, 20), 2),
            validation: SamplingPlan::cartesian(vec![e(0.0, 4.0, 0.1), e(0.0, 4.0, 0.1)]),
            max_len: 20,
            simplify: false,
            expected_fail: false,
            smoke: false,
            notes: "",
        },
        Entry {
            name: "nguyen-3",
            text: "x + x^2 + x^3 + x^4 + x^5",
            formula: oracle!(|p| (1..=5).map(|k| p[0].powi(k)).sum()),
            dims: 1,
            train: SamplingPlan::zip(u(0.0, 1.0, 20), 1),
            validation: SamplingPlan::zip(u(0.0, 2.0, 200), 1),
            max_len: 20,
            simplify: false,
            expected_fail: false,
            smoke: false,
            notes: "",
        },
        Entry {
            name: "nguyen-7",
            text: "ln(1+x) + ln(1+x^2)",
            formula: oracle!(|p| (1.0 + p[0]).ln() + (1.0 + p[0] * p[0]).ln()),
            dims: 1,
            train: SamplingPlan::zip(u(0.0, 2.0, 20), 1),
            validation: SamplingPlan::zip(u(0.0, 3.0, 200), 1),
            max_len: 25,
            simplify: false,
            expected_fail: false,
            smoke: false,
            notes: "",
        },
        Entry {
            name: "r1",
            text: "(x+1)^3/(x^2 - x + 1)",
            formula: oracle!(|p| (p[0] + 1.0).powi(3) / (p[0] * p[0] - p[0] + 1.0)),
            dims: 1,
            train: SamplingPlan::cartesian(vec![e(0.0, 2.0, 0.1)]),
            validation: SamplingPlan::zip(u(0.0, 3.0, 100), 1),
            max_len: 30,
            simplify: false,
            expected_fail: false,
            smoke: false,
            notes: "",
        },
        Entry {
            name: "r2",
            text: "(x^5 - 3*x^3 + 1)/(x^2 + 1)",
            formula: oracle!(|p| {
                (p[0].powi(5) - 3.0 * p[0].powi(3) + 1.0) / (p[0] * p[0] + 1.0)
            }),
            dims: 1,
            train: SamplingPlan::cartesian(vec![e(0.0, 2.0, 0.1)]),
            validation: SamplingPlan::zip(u(0.0, 4.0, 400), 1),
            max_len: 30,
            simplify: false,
            expected_fail: false,
            smoke: false,
            notes: "",
        },
        Entry {
            name: "keijzer-5",
            text: "30*x*z/((x-10)*y^2)",
            formula: oracle!(|p| 30.0 * p[0] * p[2] / ((p[0] - 10.0) * p[1] * p[1])),
            dims: 3,
            train: SamplingPlan::cartesian(vec![u(0.0, 2.0, 5), u(0.0, 2.0, 5), u(1.0, 5.0, 10)]),
            validation: SamplingPlan::cartesian(vec![
                u(0.0, 3.0, 20),
                u(0.0, 3.0, 20),
                u(0.0, 5.0, 30),
            ]),
            max_len: 30,
            simplify: false,
            expected_fail: false,
            smoke: false,
            notes: "y=0 draws are resampled (division by y^2)",
        },
        Entry {
            name: "keijzer-12",
            text: "x^4 - x^3 + y^2/2 - y",
            formula: oracle!(|p| p[0].powi(4) - p[0].powi(3) + p[1] * p[1] / 2.0 - p[1]),
            dims: 2,
            train: SamplingPlan::zip(u(0.0, 3.0, 20), 2),
            validation: SamplingPlan::cartesian(vec![e(0.0, 4.0, 0.1), e(0.0, 4.0, 0.1)]),
            max_len: 30,
            simplify: false,
            expected_fail: false,
            smoke: false,
            notes: "",
        },
        Entry {
            name: "keijzer-15",
            text: "x^3/5 + y^3/2 - y - x",
            formula: oracle!(|p| p[0].powi(3) / 5.0 + p[1].powi(3) / 2.0 - p[1] - p[0]),
            dims: 2,
            train: SamplingPlan::zip(u(0.0, 3.0, 20), 2),
            validation: SamplingPlan::cartesian(vec![e(0.0, 4.0, 0.1), e(0.0, 4.0, 0.1)]),
            max_len: 30,
            simplify: false,
            expected_fail: false,
            smoke: false,
            notes: "",
        },
        Entry {
            name: "keijzer-11",
            text: "x*y + sin((x-1)*(y-1))",
            formula: oracle!(|p| p[0] * p[1] + ((p[0] - 1.0) * (p[1] - 1.0)).sin()),
            dims: 2,
            train: SamplingPlan::zip(u(0.0, 3.0, 20), 2),
            validation: SamplingPlan::cartesian(vec![e(0.0, 4.0, 0.1), e(0.0, 4.0, 0.1)]),
            max_len: 30,
            simplify: false,
            expected_fail: false,
            smoke: false,
            notes: "",
        },
        Entry {
            name: "nguyen-4",
            text: "x + x^2 + x^3 + x^4 + x^5 + x^6",
            formula: oracle!(|p| (1..=6).map(|k| p[0].powi(k)).sum()),
            dims: 1,
            train: SamplingPlan::zip(u(0.0, 1.0, 40), 1),
            validation: SamplingPlan::zip(u(0.0, 1.5, 200), 1),
            max_len: 30,
            simplify: false,
            expected_fail: false,
            smoke: false,
            notes: "",
        },
        Entry {
            name: "pagie-1",
            text: "1/(1 + x^-4) + 1/(1 + y^-4)",
            formula: oracle!(|p| {
                1.0 / (1.0 + p[0].powi(-4)) + 1.0 / (1.0 + p[1].powi(-4))
            }),
            dims: 2,
            train: SamplingPlan::cartesian(vec![e(0.0, 5.0, 0.2), e(0.0, 5.0, 0.2)]),
            validation: SamplingPlan::zip(u(0.0, 6.0, 20), 2),
            max_len: 30,
            simplify: false,
            expected_fail: false,
            smoke: false,
            notes: "x^-4 overflows to +inf at x=0 and the term goes to 0, the correct limit",
        },
        // ---- difficult targets (simplification enabled per protocol) ----
        Entry {
            name: "r3",
            text: "(x^6 + x^5)/(x^4 + x^3 + x^2 + x + 1)",
            formula: oracle!(|p| {
                (p[0].powi(6) + p[0].powi(5))
                    / (p[0].powi(4) + p[0].powi(3) + p[0] * p[0] + p[0] + 1.0)
            }),
            dims: 1,
            train: SamplingPlan::cartesian(vec![e(0.0, 1.0, 0.05)]),
            validation: SamplingPlan::zip(u(0.0, 2.0, 100), 1),
            max_len: 35,
            simplify: true,
            expected_fail: false,
            smoke: false,
            notes: "",
        },
        Entry {
            name: "vladislavleva-1",
            text: "exp(-(x-1)^2)/(1.2 + (y-2.5)^2)",
            formula: oracle!(|p| {
                (-(p[0] - 1.0).powi(2)).exp() / (1.2 + (p[1] - 2.5).powi(2))
            }),
            dims: 2,
            train: SamplingPlan::zip(u(0.3, 4.0, 20), 2),
            validation: SamplingPlan::cartesian(vec![e(0.0, 8.0, 0.1), e(0.0, 8.0, 0.1)]),
            max_len: 35,
            simplify: true,
            expected_fail: false,
            smoke: false,
            notes: "",
        },
        Entry {
            name: "keijzer-4",
            text: "x^3*exp(-x)*cos(x)*sin(x)*(cos(x)*sin(x)^2 - 1)",
            formula: oracle!(|p| keijzer4_core(p[0])),
            dims: 1,
            train: SamplingPlan::cartesian(vec![e(0.0, 10.0, 0.1)]),
            validation: SamplingPlan::zip(u(0.0, 14.0, 1000), 1),
            max_len: 40,
            simplify: true,
            expected_fail: false,
            smoke: false,
            notes: "",
        },
        Entry {
            name: "nonic",
            text: "x + x^2 + x^3 + x^4 + x^5 + x^6 + x^7 + x^8 + x^9",
            formula: oracle!(|p| (1..=9).map(|k| p[0].powi(k)).sum()),
            dims: 1,
            train: SamplingPlan::cartesian(vec![e(0.0, 1.0, 0.05)]),
            validation: SamplingPlan::zip(u(0.0, 2.0, 100), 1),
            max_len: 40,
            simplify: true,
            expected_fail: false,
            smoke: false,
            notes: "",
        },
        Entry {
            name: "vladislavleva-3",
            text: "x^3*exp(-x)*cos(x)*sin(x)*(cos(x)*sin(x)^2 - 1)*(y - 5)",
            formula: oracle!(|p| keijzer4_core(p[0]) * (p[1] - 5.0)),
            dims: 2,
            train: SamplingPlan::cartesian(vec![e(0.05, 10.0, 0.1), e(0.05, 10.05, 2.0)]),
            validation: SamplingPlan::cartesian(vec![u(0.0, 10.0, 50), u(0.0, 10.0, 10)]),
            max_len: 45,
            simplify: true,
            expected_fail: false,
            smoke: false,
            notes: "",
        },
        // ---- expected-fail targets (published protocol reports no hits) ----
        Entry {
            name: "vladislavleva-5",
            text: "30*(x-1)*(z-1)/((x-10)*y^2)",
            formula: oracle!(|p| {
                30.0 * (p[0] - 1.0) * (p[2] - 1.0) / ((p[0] - 10.0) * p[1] * p[1])
            }),
            dims: 3,
            train: SamplingPlan::cartesian(vec![
                u(0.05, 2.0, 5),
                u(1.0, 2.0, 5),
                u(0.05, 2.0, 5),
            ]),
            validation: SamplingPlan::cartesian(vec![
                u(0.0, 2.1, 10),
                u(0.9, 2.1, 10),
                u(0.0, 2.1, 10),
            ]),
            max_len: 45,
            simplify: true,
            expected_fail: true,
            smoke: false,
            notes: "ranges are the positive cut of the published benchmark; the source protocol omits them",
        },
        Entry {
            name: "vladislavleva-7",
            text: "(x-3)*(y-3) + 2*sin((x-4)*(y-4))",
            formula: oracle!(|p| {
                (p[0] - 3.0) * (p[1] - 3.0) + 2.0 * ((p[0] - 4.0) * (p[1] - 4.0)).sin()
            }),
            dims: 2,
            train: SamplingPlan::zip(u(0.05, 6.05, 50), 2),
            validation: SamplingPlan::zip(u(0.0, 6.35, 100), 2),
            max_len: 45,
            simplify: true,
            expected_fail: true,
            smoke: false,
            notes: "ranges are the positive cut of the published benchmark; the source protocol omits them",
        },
        // ---- smoke test ----
        Entry {
            name: "korns-7",
            text: "213.80940889*(1 - exp(-0.54723748542*x))",
            formula: oracle!(|p| 213.80940889 * (1.0 - (-0.54723748542 * p[0]).exp())),
            dims: 1,
            train: SamplingPlan::zip(u(0.0, 50.0, 50), 1),
            validation: SamplingPlan::zip(u(0.0, 50.0, 200), 1),
            max_len: 15,
            simplify: false,
            expected_fail: false,
            smoke: true,
            notes: "range cut to [0,50] from the published [-50,50]",
        },
    ];

    entries
        .into_iter()
        .map(|entry| TargetSpec {
            name: entry.name.to_string(),
            formula_text: entry.text.to_string(),
            formula: entry.formula,
            dims: entry.dims,
            train: entry.train,
            validation: entry.validation,
            max_len: entry.max_len,
            simplify: entry.simplify,
            expected_fail: entry.expected_fail,
            smoke: entry.smoke,
            notes: entry.notes.to_string(),
        })
        .collect()
}

/// Case-insensitive lookup by target name.
pub fn find_target(name: &str) -> Option<TargetSpec> {
    let lower = name.to_lowercase();
    target_catalog().into_iter().find(|t| t.name == lower)
}

/// Catalog export for external audit of the benchmark definitions.
pub fn catalog_json() -> String {
    serde_json::to_string_pretty(&target_catalog()).expect("catalog serializes")
}
