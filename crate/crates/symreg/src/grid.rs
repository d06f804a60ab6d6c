//! The 3-D MAP-Elites archive: binning, insert-if-better, uniform selection,
//! and the 2N batch iteration loop.

use crate::expr::{Expression, FeatureDescriptor};
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

/// Function-count bins are clamped to 0..=8.
pub const MAX_FUNCTION_BIN: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct GridKey {
    pub length_bin: usize,
    pub function_bin: usize,
    pub scalar_bin: usize,
}

/// Deterministic binning of a feature descriptor.
pub fn bin_of(f: &FeatureDescriptor) -> GridKey {
    GridKey {
        length_bin: f.length,
        function_bin: f.n_functions.min(MAX_FUNCTION_BIN),
        scalar_bin: f.n_scalars,
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Individual {
    pub expr: Expression,
    /// Fitted scalar values; empty in integer mode.
    pub scalars: Vec<f64>,
    pub reward: f64,
    pub features: FeatureDescriptor,
    pub eval_count_at_birth: u64,
}

impl Individual {
    pub fn new(expr: Expression, scalars: Vec<f64>, reward: f64, eval_count_at_birth: u64) -> Self {
        let features = expr.describe();
        Individual {
            expr,
            scalars,
            reward,
            features,
            eval_count_at_birth,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InsertOutcome {
    Inserted,
    ReplacedWorse,
    RejectedWorse,
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("selection from an empty archive")]
pub struct EmptyArchive;

/// One best individual per occupied bin. Ties keep the incumbent.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct Archive {
    bins: BTreeMap<GridKey, Individual>,
    /// Total fitness evaluations consumed so far (discarded-before-evaluation
    /// genomes do not count).
    pub eval_counter: u64,
}

impl Archive {
    pub fn new() -> Archive {
        Archive::default()
    }

    pub fn len(&self) -> usize {
        self.bins.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bins.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&GridKey, &Individual)> {
        self.bins.iter()
    }

    pub fn get(&self, key: &GridKey) -> Option<&Individual> {
        self.bins.get(key)
    }

    pub fn best(&self) -> Option<&Individual> {
        self.bins
            .values()
            .max_by(|a, b| a.reward.total_cmp(&b.reward))
    }

    pub fn try_insert(&mut self, ind: Individual) -> InsertOutcome {
        let key = bin_of(&ind.features);
        match self.bins.get(&key) {
            None => {
                self.bins.insert(key, ind);
                InsertOutcome::Inserted
            }
            Some(incumbent) if ind.reward > incumbent.reward => {
                self.bins.insert(key, ind);
                InsertOutcome::ReplacedWorse
            }
            Some(_) => InsertOutcome::RejectedWorse,
        }
    }

    /// `k` independent uniform draws over occupied bins, with replacement.
    pub fn select_uniform<R: Rng + ?Sized>(
        &self,
        k: usize,
        rng: &mut R,
    ) -> Result<Vec<&Individual>, EmptyArchive> {
        if self.bins.is_empty() {
            return Err(EmptyArchive);
        }
        let elites: Vec<&Individual> = self.bins.values().collect();
        Ok((0..k)
            .map(|_| elites[rng.random_range(0..elites.len())])
            .collect())
    }

    pub fn elites(&self) -> Vec<&Individual> {
        self.bins.values().collect()
    }
}

/// Outcome of evaluating one offspring.
#[derive(Debug, Clone)]
pub struct BatchEval {
    pub scalars: Vec<f64>,
    pub reward: f64,
    /// Validation termination reached by this individual.
    pub hit: bool,
}

/// One batch iteration: with N occupied bins, propose 2N offspring from
/// uniformly selected parents, evaluate them (in parallel when enabled), and
/// insert in offspring order.
///
/// `evaluate` returns `None` for genomes discarded prior to evaluation; those
/// do not consume evaluation budget. On a hit, insertion stops at the hitting
/// offspring and its `Individual` is returned; later offspring of the batch
/// are neither counted nor inserted.
pub fn map_elites_iteration<R, F>(
    archive: &mut Archive,
    cfg: &crate::variation::VariationConfig,
    evaluate: &F,
    rng: &mut R,
) -> Option<Individual>
where
    R: Rng + ?Sized,
    F: Fn(&Expression) -> Option<BatchEval> + Sync + Send,
{
    assert!(!archive.is_empty());
    let pool: Vec<Expression> = archive
        .elites()
        .iter()
        .map(|ind| ind.expr.clone())
        .collect();
    let n_offspring = 2 * archive.len();
    let offspring = crate::variation::propose_offspring(&pool, n_offspring, cfg, rng);
    let results = crate::par::map_batch(&offspring, evaluate);
    for (expr, result) in offspring.into_iter().zip(results) {
        let Some(res) = result else { continue };
        archive.eval_counter += 1;
        let ind = Individual::new(expr, res.scalars, res.reward, archive.eval_counter);
        if res.hit {
            archive.try_insert(ind.clone());
            return Some(ind);
        }
        archive.try_insert(ind);
    }
    None
}
