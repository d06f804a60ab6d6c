//! Three-step search orchestration: integer-scalar grid search, skeleton
//! conversion with scalar fitting, then free-scalar grid search.

use crate::expr::{random_expression, Expression, GenConfig, ScalarMode};
use crate::fitness::{check_termination, cost, nrmse, reward, Dataset, NRMSE_HIT};
use crate::gp::{run_gp_baseline, GpConfig, GpOutcome};
use crate::grid::{map_elites_iteration, Archive, BatchEval, Individual};
use crate::par::map_batch;
use crate::scalar_fit::{fit_scalars, ScalarFitConfig};
use crate::simplify::{canonical_key, simplify, to_skeleton, Simplified};
use crate::targets::{sample_dataset, TargetSpec};
use crate::tree::render_infix;
use crate::variation::VariationConfig;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Default maximum nesting depth for unary functions.
pub const DEFAULT_MAX_NESTED: usize = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RunMode {
    Full,
    Step1Only,
    GpBaseline,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunConfig {
    pub target: String,
    pub seed: u64,
    /// Initial random population for the integer-scalar stage.
    pub init_pop: usize,
    /// Grid iterations in the integer-scalar stage (P).
    pub step1_iters: usize,
    /// Grid iterations in the free-scalar stage (Q).
    pub step3_iters: usize,
    /// Skeleton budget cap (M) between the two stages.
    pub max_skeletons: usize,
    /// Simplify elites before skeletonizing; `None` uses the target default.
    pub simplify: Option<bool>,
    pub max_nested: usize,
    /// Per-stage cap on evaluation counters; `None` is unlimited.
    pub budget_evals: Option<u64>,
    pub fit: ScalarFitConfig,
    pub mode: RunMode,
}

impl RunConfig {
    pub fn new(target: &str, seed: u64) -> RunConfig {
        RunConfig {
            target: target.to_string(),
            seed,
            init_pop: 4000,
            step1_iters: 150,
            step3_iters: 150,
            max_skeletons: 256,
            simplify: None,
            max_nested: DEFAULT_MAX_NESTED,
            budget_evals: None,
            fit: ScalarFitConfig::default(),
            mode: RunMode::Full,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum HitStage {
    Step1,
    Step3,
    None,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunOutcome {
    pub target: String,
    pub seed: u64,
    pub mode: RunMode,
    pub hit: bool,
    pub hit_stage: HitStage,
    /// Fitness evaluations in the integer-scalar stage.
    pub n_evals_step1: u64,
    /// Individuals evaluated (each via a scalar fit) in the free-scalar stage.
    pub n_evals_cmaes: u64,
    pub best_expression: String,
    pub best_scalars: Vec<f64>,
    pub best_infix: String,
    pub best_reward: f64,
    pub best_validation_nrmse: Option<f64>,
}

/// Everything a run produces, including archives for grid dumps.
pub struct RunArtifacts {
    pub outcome: RunOutcome,
    pub step1_archive: Option<Archive>,
    pub step3_archive: Option<Archive>,
    pub gp: Option<GpOutcome>,
    pub train: Dataset,
    pub validation: Dataset,
    pub wall_time_s: f64,
}

fn derived_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15));
    // Decorrelate nearby seeds.
    let _ = rng.random::<u64>();
    rng
}

/// Stable content hash used to derive per-offspring fit seeds so parallel
/// execution order cannot change results.
fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

fn assess(expr: &Expression, scalars: &[f64], train: &Dataset, validation: &Dataset) -> (f64, bool) {
    let r = reward(cost(expr, scalars, train), train);
    // The validation check is gated on training accuracy to keep the hot path
    // cheap; the termination decision itself uses the validation set only.
    let hit = nrmse(expr, scalars, train).is_ok_and(|e| e <= NRMSE_HIT)
        && check_termination(expr, scalars, validation);
    (r, hit)
}

fn budget_left(archive: &Archive, budget: Option<u64>) -> bool {
    budget.is_none_or(|b| archive.eval_counter < b)
}

/// Integer-scalar stage: seed the archive with random expressions, then run
/// grid iterations, stopping early on a validation hit.
pub fn run_step1(
    target: &TargetSpec,
    cfg: &RunConfig,
    train: &Dataset,
    validation: &Dataset,
    rng: &mut ChaCha8Rng,
) -> (Archive, Option<Individual>) {
    let gen_cfg = GenConfig {
        max_len: target.max_len_step1(),
        max_nested: cfg.max_nested,
        n_vars: target.dims,
        mode: ScalarMode::IntegerScalars,
    };
    let var_cfg = VariationConfig::new(
        target.max_len_step1(),
        cfg.max_nested,
        target.dims,
        ScalarMode::IntegerScalars,
    );
    let evaluate = |expr: &Expression| -> Option<BatchEval> {
        if !expr.contains_variable() {
            return None;
        }
        let (r, hit) = assess(expr, &[], train, validation);
        Some(BatchEval {
            scalars: vec![],
            reward: r,
            hit,
        })
    };

    let mut archive = Archive::new();
    let init: Vec<Expression> = (0..cfg.init_pop)
        .map(|_| random_expression(&gen_cfg, rng))
        .collect();
    let results = map_batch(&init, &evaluate);
    for (expr, res) in init.into_iter().zip(results) {
        let Some(res) = res else { continue };
        if !budget_left(&archive, cfg.budget_evals) {
            return (archive, None);
        }
        archive.eval_counter += 1;
        let ind = Individual::new(expr, res.scalars, res.reward, archive.eval_counter);
        archive.try_insert(ind.clone());
        if res.hit {
            return (archive, Some(ind));
        }
    }

    for _ in 0..cfg.step1_iters {
        if archive.is_empty() || !budget_left(&archive, cfg.budget_evals) {
            break;
        }
        if let Some(hit) = map_elites_iteration(&mut archive, &var_cfg, &evaluate, rng) {
            return (archive, Some(hit));
        }
    }
    (archive, None)
}

/// Skeletonize the integer-scalar elites, deduplicate, cap at the skeleton
/// budget, fit each skeleton's scalars, and seed a fresh free-scalar archive.
pub fn run_step2_convert(
    step1: &Archive,
    target: &TargetSpec,
    cfg: &RunConfig,
    train: &Dataset,
    validation: &Dataset,
) -> (Archive, Option<Individual>) {
    let do_simplify = cfg.simplify.unwrap_or(target.simplify);
    let mut elites: Vec<&Individual> = step1.elites();
    elites.sort_by(|a, b| b.reward.partial_cmp(&a.reward).unwrap());

    let mut seen = std::collections::BTreeSet::new();
    let mut skeletons: Vec<Expression> = Vec::new();
    for ind in elites {
        let expr = if do_simplify {
            match simplify(&ind.expr) {
                Simplified::Expr(e) => e,
                Simplified::Degenerate => continue,
            }
        } else {
            ind.expr.clone()
        };
        let skel = to_skeleton(&expr);
        if !skel.contains_variable() || skel.len() > target.max_len {
            continue;
        }
        if seen.insert(canonical_key(&skel)) {
            skeletons.push(skel);
        }
        if skeletons.len() >= cfg.max_skeletons {
            break;
        }
    }

    // Pre-drawn seeds keep parallel fits deterministic.
    let jobs: Vec<(Expression, u64)> = skeletons
        .into_iter()
        .map(|s| {
            let seed = fnv1a(s.to_string().as_bytes()) ^ cfg.seed.rotate_left(17);
            (s, seed)
        })
        .collect();
    let results = map_batch(&jobs, |(skel, seed)| {
        let mut rng = ChaCha8Rng::seed_from_u64(*seed);
        let fit = fit_scalars(skel, train, &cfg.fit, &mut rng);
        let (r, hit) = assess(skel, &fit.scalars, train, validation);
        (fit.scalars, r, hit)
    });

    let mut archive = Archive::new();
    for ((skel, _), (scalars, r, hit)) in jobs.into_iter().zip(results) {
        if !budget_left(&archive, cfg.budget_evals) {
            break;
        }
        archive.eval_counter += 1;
        let ind = Individual::new(skel, scalars, r, archive.eval_counter);
        archive.try_insert(ind.clone());
        if hit {
            return (archive, Some(ind));
        }
    }
    (archive, None)
}

/// Free-scalar stage: grid iterations where every offspring is fit before
/// reward computation.
pub fn run_step3(
    archive: &mut Archive,
    target: &TargetSpec,
    cfg: &RunConfig,
    train: &Dataset,
    validation: &Dataset,
    rng: &mut ChaCha8Rng,
) -> Option<Individual> {
    let var_cfg = VariationConfig::new(
        target.max_len,
        cfg.max_nested,
        target.dims,
        ScalarMode::FreeScalars,
    );
    for iter in 0..cfg.step3_iters {
        if archive.is_empty() || !budget_left(archive, cfg.budget_evals) {
            return None;
        }
        let evaluate = |expr: &Expression| -> Option<BatchEval> {
            if !expr.contains_variable() || expr.len() > target.max_len {
                return None;
            }
            let seed = fnv1a(expr.to_string().as_bytes())
                ^ cfg.seed.rotate_left(29)
                ^ (iter as u64).rotate_left(47);
            let mut fit_rng = ChaCha8Rng::seed_from_u64(seed);
            let fit = fit_scalars(expr, train, &cfg.fit, &mut fit_rng);
            let (r, hit) = assess(expr, &fit.scalars, train, validation);
            Some(BatchEval {
                scalars: fit.scalars,
                reward: r,
                hit,
            })
        };
        if let Some(hit) = map_elites_iteration(archive, &var_cfg, &evaluate, rng) {
            return Some(hit);
        }
    }
    None
}

fn outcome_from_best(
    cfg: &RunConfig,
    best: Option<&Individual>,
    hit_stage: HitStage,
    n_step1: u64,
    n_cmaes: u64,
    validation: &Dataset,
) -> RunOutcome {
    let (expr_text, scalars, infix, best_reward, val_nrmse) = match best {
        Some(ind) => (
            ind.expr.to_string(),
            ind.scalars.clone(),
            render_infix(&ind.expr, Some(&ind.scalars)),
            ind.reward,
            nrmse(&ind.expr, &ind.scalars, validation).ok(),
        ),
        None => (String::new(), vec![], String::new(), -1.0, None),
    };
    RunOutcome {
        target: cfg.target.clone(),
        seed: cfg.seed,
        mode: cfg.mode,
        hit: hit_stage != HitStage::None,
        hit_stage,
        n_evals_step1: n_step1,
        n_evals_cmaes: n_cmaes,
        best_expression: expr_text,
        best_scalars: scalars,
        best_infix: infix,
        best_reward,
        best_validation_nrmse: val_nrmse,
    }
}

/// Execute one full run of the configured mode against a catalog target.
pub fn run(target: &TargetSpec, cfg: &RunConfig) -> RunArtifacts {
    let started = std::time::Instant::now();
    let mut train_rng = derived_rng(cfg.seed, 1);
    let mut validation_rng = derived_rng(cfg.seed, 2);
    let train =
        sample_dataset(&target.train, target.formula, &mut train_rng).expect("training oracle");
    let validation = sample_dataset(&target.validation, target.formula, &mut validation_rng)
        .expect("validation oracle");

    if cfg.mode == RunMode::GpBaseline {
        // Same length limit as the integer-scalar grid stage (L+10), so the
        // two searchers compete under identical genetic parameters.
        let gp_cfg = GpConfig::new(
            target.max_len_step1(),
            cfg.max_nested,
            cfg.budget_evals.unwrap_or(100_000),
        );
        let mut rng = derived_rng(cfg.seed, 3);
        let gp = run_gp_baseline(&train, &validation, &gp_cfg, &mut rng);
        let outcome = RunOutcome {
            target: cfg.target.clone(),
            seed: cfg.seed,
            mode: cfg.mode,
            hit: gp.hit,
            hit_stage: if gp.hit { HitStage::Step1 } else { HitStage::None },
            n_evals_step1: gp.evals_used,
            n_evals_cmaes: 0,
            best_expression: gp.best_expression.clone(),
            best_scalars: vec![],
            best_infix: String::new(),
            best_reward: gp.best_reward,
            best_validation_nrmse: None,
        };
        return RunArtifacts {
            outcome,
            step1_archive: None,
            step3_archive: None,
            gp: Some(gp),
            train,
            validation,
            wall_time_s: started.elapsed().as_secs_f64(),
        };
    }

    let mut rng = derived_rng(cfg.seed, 3);
    let (step1_archive, step1_hit) = run_step1(target, cfg, &train, &validation, &mut rng);
    let n_step1 = step1_archive.eval_counter;

    if let Some(hit) = step1_hit {
        let outcome = outcome_from_best(cfg, Some(&hit), HitStage::Step1, n_step1, 0, &validation);
        return RunArtifacts {
            outcome,
            step1_archive: Some(step1_archive),
            step3_archive: None,
            gp: None,
            train,
            validation,
            wall_time_s: started.elapsed().as_secs_f64(),
        };
    }
    if cfg.mode == RunMode::Step1Only {
        let outcome = outcome_from_best(
            cfg,
            step1_archive.best(),
            HitStage::None,
            n_step1,
            0,
            &validation,
        );
        return RunArtifacts {
            outcome,
            step1_archive: Some(step1_archive),
            step3_archive: None,
            gp: None,
            train,
            validation,
            wall_time_s: started.elapsed().as_secs_f64(),
        };
    }

    let (mut step3_archive, step2_hit) =
        run_step2_convert(&step1_archive, target, cfg, &train, &validation);
    let hit = match step2_hit {
        Some(h) => Some(h),
        None => run_step3(
            &mut step3_archive,
            target,
            cfg,
            &train,
            &validation,
            &mut rng,
        ),
    };
    let n_cmaes = step3_archive.eval_counter;

    let (best, stage) = match &hit {
        Some(h) => (Some(h), HitStage::Step3),
        None => (
            step3_archive.best().or(step1_archive.best()),
            HitStage::None,
        ),
    };
    let outcome = outcome_from_best(cfg, best, stage, n_step1, n_cmaes, &validation);
    RunArtifacts {
        outcome,
        step1_archive: Some(step1_archive),
        step3_archive: Some(step3_archive),
        gp: None,
        train,
        validation,
        wall_time_s: started.elapsed().as_secs_f64(),
    }
}
