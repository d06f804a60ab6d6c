//! Machine-readable run artifacts: per-run JSON reports, aggregate CSV,
//! archive grid-slice CSV, and target-vs-prediction curve CSV.
//!
//! File formats (column by column):
//! - `report.json`: versioned schema holding the full `RunOutcome` record.
//! - `meta.json`: non-deterministic extras (wall time); kept out of
//!   `report.json` so reruns with the same seed are byte-identical.
//! - `grid.csv`: `length_bin,function_bin,scalar_bin,reward,expression,scalars`
//!   — one row per occupied archive bin; `scalars` is `;`-separated.
//! - `curve.csv`: `x,y,z,target,prediction` over the validation set for the
//!   best individual (unused dimensions written as 0).
//! - `aggregate.csv`: per-target summary —
//!   `target,mode,runs,hits,hit_rate,step1_hits,mean_evals_step1_at_hit,mean_evals_cmaes_at_hit,mean_miss_nrmse`.

use crate::eval::evaluate;
use crate::grid::Archive;
use crate::pipeline::{run, HitStage, RunArtifacts, RunConfig, RunOutcome};
use crate::targets::TargetSpec;
use serde::{Deserialize, Serialize};
use std::io::Write;
use std::path::{Path, PathBuf};

pub const REPORT_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub outcome: RunOutcome,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunMeta {
    pub wall_time_s: f64,
}

/// Deterministic JSON body of a run report.
pub fn report_json(outcome: &RunOutcome) -> String {
    let report = RunReport {
        schema_version: REPORT_SCHEMA_VERSION,
        outcome: outcome.clone(),
    };
    let mut s = serde_json::to_string_pretty(&report).expect("report serializes");
    s.push('\n');
    s
}

/// Grid-slice CSV of all bins whose function bin is at most
/// `function_bin_max` (`usize::MAX` dumps the whole archive).
pub fn grid_slice_csv(archive: &Archive, function_bin_max: usize) -> String {
    let mut out = String::from("length_bin,function_bin,scalar_bin,reward,expression,scalars\n");
    for (key, ind) in archive.iter() {
        if key.function_bin > function_bin_max {
            continue;
        }
        let scalars = ind
            .scalars
            .iter()
            .map(|v| v.to_string())
            .collect::<Vec<_>>()
            .join(";");
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            key.length_bin, key.function_bin, key.scalar_bin, ind.reward, ind.expr, scalars
        ));
    }
    out
}

/// Target-vs-prediction curve over the validation set for the best
/// individual of the run; empty when the run produced no individual.
pub fn curve_csv(art: &RunArtifacts) -> String {
    let mut out = String::from("x,y,z,target,prediction\n");
    if art.outcome.best_expression.is_empty() {
        return out;
    }
    let expr = art
        .outcome
        .best_expression
        .parse()
        .expect("own report expression parses");
    for (p, t) in art.validation.points.iter().zip(&art.validation.targets) {
        let pred = match evaluate(&expr, &p[..art.validation.dims], &art.outcome.best_scalars) {
            Ok(v) => v.to_string(),
            Err(_) => String::from("failed"),
        };
        out.push_str(&format!("{},{},{},{},{}\n", p[0], p[1], p[2], t, pred));
    }
    out
}

/// Per-target aggregate rows over a batch of outcomes.
pub fn aggregate_csv(outcomes: &[RunOutcome]) -> String {
    let mut out = String::from(
        "target,mode,runs,hits,hit_rate,step1_hits,mean_evals_step1_at_hit,mean_evals_cmaes_at_hit,mean_miss_nrmse\n",
    );
    let mut groups: Vec<(String, Vec<&RunOutcome>)> = Vec::new();
    for o in outcomes {
        let key = format!("{},{:?}", o.target, o.mode);
        match groups.iter_mut().find(|(k, _)| *k == key) {
            Some((_, v)) => v.push(o),
            None => groups.push((key, vec![o])),
        }
    }
    for (key, group) in groups {
        let runs = group.len();
        let hits: Vec<&&RunOutcome> = group.iter().filter(|o| o.hit).collect();
        let step1_hits = group
            .iter()
            .filter(|o| o.hit_stage == HitStage::Step1)
            .count();
        let mean = |vals: Vec<f64>| {
            if vals.is_empty() {
                String::from("-")
            } else {
                (vals.iter().sum::<f64>() / vals.len() as f64).to_string()
            }
        };
        let mean_step1 = mean(hits.iter().map(|o| o.n_evals_step1 as f64).collect());
        let mean_cmaes = mean(hits.iter().map(|o| o.n_evals_cmaes as f64).collect());
        let mean_miss_nrmse = mean(
            group
                .iter()
                .filter(|o| !o.hit)
                .filter_map(|o| o.best_validation_nrmse)
                .collect(),
        );
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            key,
            runs,
            hits.len(),
            hits.len() as f64 / runs as f64,
            step1_hits,
            mean_step1,
            mean_cmaes,
            mean_miss_nrmse,
        ));
    }
    out
}

fn write_file(path: &Path, content: &str) -> std::io::Result<()> {
    let mut f = std::fs::File::create(path)?;
    f.write_all(content.as_bytes())
}

/// Write all per-run artifacts into `dir` (created if needed). Returns the
/// path of the deterministic report.
pub fn write_run_dir(dir: &Path, art: &RunArtifacts) -> std::io::Result<PathBuf> {
    std::fs::create_dir_all(dir)?;
    let report_path = dir.join("report.json");
    write_file(&report_path, &report_json(&art.outcome))?;
    write_file(
        &dir.join("meta.json"),
        &serde_json::to_string_pretty(&RunMeta {
            wall_time_s: art.wall_time_s,
        })
        .expect("meta serializes"),
    )?;
    if let Some(a) = &art.step1_archive {
        write_file(&dir.join("grid-step1.csv"), &grid_slice_csv(a, usize::MAX))?;
    }
    if let Some(a) = &art.step3_archive {
        write_file(&dir.join("grid-step3.csv"), &grid_slice_csv(a, usize::MAX))?;
    }
    write_file(&dir.join("curve.csv"), &curve_csv(art))?;
    Ok(report_path)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentSummary {
    pub outcomes: Vec<RunOutcome>,
    pub failures: Vec<String>,
}

/// Run `runs` independent seeds of `base` against each target, writing one
/// run directory per (target, seed) plus an aggregate CSV. Per-run panics are
/// recorded and do not abort the batch.
pub fn run_experiment(
    targets: &[TargetSpec],
    runs: usize,
    base: &RunConfig,
    out_dir: &Path,
) -> std::io::Result<ExperimentSummary> {
    std::fs::create_dir_all(out_dir)?;
    let mut outcomes = Vec::new();
    let mut failures = Vec::new();
    for target in targets {
        for k in 0..runs {
            let mut cfg = base.clone();
            cfg.target = target.name.clone();
            cfg.seed = base.seed.wrapping_add(k as u64);
            let label = format!("{}-seed{}", target.name, cfg.seed);
            let result = std::panic::catch_unwind(std::panic::AssertUnwindSafe(|| {
                run(target, &cfg)
            }));
            match result {
                Ok(art) => {
                    write_run_dir(&out_dir.join(&label), &art)?;
                    outcomes.push(art.outcome);
                }
                Err(cause) => {
                    let msg = cause
                        .downcast_ref::<String>()
                        .map(String::as_str)
                        .or_else(|| cause.downcast_ref::<&str>().copied())
                        .unwrap_or("unknown panic");
                    failures.push(format!("{label}: {msg}"));
                }
            }
        }
    }
    write_file(&out_dir.join("aggregate.csv"), &aggregate_csv(&outcomes))?;
    if !failures.is_empty() {
        write_file(&out_dir.join("failures.txt"), &failures.join("\n"))?;
    }
    Ok(ExperimentSummary { outcomes, failures })
}
