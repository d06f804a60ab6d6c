//! Plain genetic-programming baseline: single population, tournament
//! selection, truncation survival. Shares genomes, variation operators, and
//! the reward function with the grid-based search so comparisons isolate the
//! effect of the archive.

use crate::expr::{random_expression, Expression, GenConfig, ScalarMode};
use crate::fitness::{check_termination, cost, nrmse, reward, Dataset, NRMSE_HIT};
use crate::par::map_batch;
use crate::variation::{crossover_with_retries, point_mutation, sample_operator, OperatorChoice, VariationConfig};
use rand::Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GpConfig {
    pub population: usize,
    pub tournament_size: usize,
    pub offspring_per_generation: usize,
    pub budget_evals: u64,
    pub max_len: usize,
    pub max_nested: usize,
}

impl GpConfig {
    pub fn new(max_len: usize, max_nested: usize, budget_evals: u64) -> GpConfig {
        GpConfig {
            population: 1000,
            tournament_size: 2,
            offspring_per_generation: 2000,
            budget_evals,
            max_len,
            max_nested,
        }
    }
}

#[derive(Debug, Clone)]
struct Member {
    expr: Expression,
    reward: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GpOutcome {
    pub hit: bool,
    pub hit_expression: Option<String>,
    pub evals_used: u64,
    pub generations: usize,
    pub best_reward: f64,
    pub best_expression: String,
}

fn tournament<'a, R: Rng + ?Sized>(
    pop: &'a [Member],
    size: usize,
    rng: &mut R,
) -> &'a Expression {
    let mut best = &pop[rng.random_range(0..pop.len())];
    for _ in 1..size {
        let challenger = &pop[rng.random_range(0..pop.len())];
        if challenger.reward > best.reward {
            best = challenger;
        }
    }
    &best.expr
}

/// Run the baseline until the evaluation budget is exhausted or a candidate
/// reaches the validation termination criterion. Initial-population
/// evaluations count toward the budget.
pub fn run_gp_baseline<R: Rng + ?Sized>(
    train: &Dataset,
    validation: &Dataset,
    cfg: &GpConfig,
    rng: &mut R,
) -> GpOutcome {
    let n_vars = train.dims;
    let gen_cfg = GenConfig {
        max_len: cfg.max_len,
        max_nested: cfg.max_nested,
        n_vars,
        mode: ScalarMode::IntegerScalars,
    };
    let var_cfg = VariationConfig::new(cfg.max_len, cfg.max_nested, n_vars, ScalarMode::IntegerScalars);

    let evaluate = |expr: &Expression| -> (f64, bool) {
        let r = reward(cost(expr, &[], train), train);
        let hit = nrmse(expr, &[], train).is_ok_and(|e| e <= NRMSE_HIT)
            && check_termination(expr, &[], validation);
        (r, hit)
    };

    let mut evals: u64 = 0;
    let mut pop: Vec<Member> = Vec::with_capacity(cfg.population);
    let mut hit: Option<Expression> = None;
    let mut generations = 0;

    let init: Vec<Expression> = (0..cfg.population)
        .map(|_| random_expression(&gen_cfg, rng))
        .collect();
    let scored = map_batch(&init, &evaluate);
    for (expr, (r, is_hit)) in init.into_iter().zip(scored) {
        if evals >= cfg.budget_evals || hit.is_some() {
            break;
        }
        evals += 1;
        if is_hit {
            hit = Some(expr.clone());
        }
        pop.push(Member { expr, reward: r });
    }

    while hit.is_none() && evals < cfg.budget_evals {
        generations += 1;
        let mut children = Vec::with_capacity(cfg.offspring_per_generation);
        while children.len() < cfg.offspring_per_generation {
            // Tournament pressure applies to mutation only: a drawn pair
            // keeps its winner for mutation, while crossover (with or
            // without a follow-up mutation) consumes both drawn parents.
            match sample_operator(&var_cfg, rng) {
                OperatorChoice::MutationOnly => {
                    let p = tournament(&pop, cfg.tournament_size, rng);
                    children.push(point_mutation(p, &var_cfg, rng));
                }
                OperatorChoice::CrossoverOnly => {
                    let a = pop[rng.random_range(0..pop.len())].expr.clone();
                    let b = pop[rng.random_range(0..pop.len())].expr.clone();
                    children.extend(crossover_with_retries(&a, &b, &var_cfg, rng));
                }
                OperatorChoice::Both => {
                    let a = pop[rng.random_range(0..pop.len())].expr.clone();
                    let b = pop[rng.random_range(0..pop.len())].expr.clone();
                    for child in crossover_with_retries(&a, &b, &var_cfg, rng) {
                        children.push(point_mutation(&child, &var_cfg, rng));
                    }
                }
            }
        }
        children.truncate(cfg.offspring_per_generation);

        let scored = map_batch(&children, &evaluate);
        for (expr, (r, is_hit)) in children.into_iter().zip(scored) {
            if evals >= cfg.budget_evals {
                break;
            }
            evals += 1;
            pop.push(Member { expr: expr.clone(), reward: r });
            if is_hit {
                hit = Some(expr);
                break;
            }
        }

        // Truncation survival: keep the best `population` of parents + children.
        pop.sort_by(|a, b| b.reward.partial_cmp(&a.reward).unwrap());
        pop.truncate(cfg.population);
    }

    let best = pop
        .iter()
        .max_by(|a, b| a.reward.partial_cmp(&b.reward).unwrap())
        .expect("population is non-empty");
    GpOutcome {
        hit: hit.is_some(),
        hit_expression: hit.map(|e| e.to_string()),
        evals_used: evals,
        generations,
        best_reward: best.reward,
        best_expression: best.expr.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn linear_data() -> (Dataset, Dataset) {
        let pts = |n: usize, hi: f64| {
            (0..n)
                .map(|i| [hi * i as f64 / (n - 1) as f64, 0.0, 0.0])
                .collect::<Vec<_>>()
        };
        let f = |p: &[f64]| 2.0 * p[0];
        (
            Dataset::from_oracle(1, pts(20, 1.0), f),
            Dataset::from_oracle(1, pts(50, 2.0), f),
        )
    }

    #[test]
    fn finds_trivial_target_and_respects_budget() {
        let (train, validation) = linear_data();
        let mut cfg = GpConfig::new(10, usize::MAX, 5_000);
        cfg.population = 100;
        cfg.offspring_per_generation = 200;
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let out = run_gp_baseline(&train, &validation, &cfg, &mut rng);
        assert!(out.hit, "2x should be found quickly: {out:?}");
        assert!(out.evals_used <= cfg.budget_evals);
    }

    #[test]
    fn budget_is_exhausted_without_hit() {
        // Target far outside the reachable set at this length bound.
        let pts: Vec<[f64; 3]> = (1..=20).map(|i| [i as f64 / 10.0, 0.0, 0.0]).collect();
        let f = |p: &[f64]| (7.13 * p[0]).sin() * 91.7 + p[0].powf(0.37);
        let train = Dataset::from_oracle(1, pts.clone(), f);
        let validation = Dataset::from_oracle(1, pts, f);
        let mut cfg = GpConfig::new(8, usize::MAX, 1_500);
        cfg.population = 50;
        cfg.offspring_per_generation = 100;
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let out = run_gp_baseline(&train, &validation, &cfg, &mut rng);
        assert!(!out.hit);
        assert_eq!(out.evals_used, 1_500);
        assert!(out.best_reward > -1.0);
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let (train, validation) = linear_data();
        let mut cfg = GpConfig::new(10, usize::MAX, 1_000);
        cfg.population = 50;
        cfg.offspring_per_generation = 100;
        let run = |seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let out = run_gp_baseline(&train, &validation, &cfg, &mut rng);
            (out.evals_used, out.best_reward.to_bits(), out.best_expression)
        };
        assert_eq!(run(5), run(5));
    }
}
