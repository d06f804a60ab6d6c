//! Command-line driver: run experiments over the target catalog, export the
//! catalog, and re-slice archived grid dumps.

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use symreg::pipeline::{RunConfig, RunMode};
use symreg::report::run_experiment;
use symreg::targets::{catalog_json, find_target};

/// Environment variable holding the default output directory.
const OUT_DIR_ENV: &str = "SYMREG_OUT_DIR";

#[derive(Parser)]
#[command(name = "symreg", about = "Symbolic regression by quality-diversity search", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one or more seeded searches against a catalog target.
    Run(RunArgs),
    /// Print the benchmark target catalog.
    Catalog {
        /// Emit the catalog as JSON (the only supported format).
        #[arg(long)]
        json: bool,
    },
    /// Re-slice a stored run's archive dump as CSV on stdout.
    DumpGrid(DumpGridArgs),
}

/// All flags are optional here so a config file can supply them; the
/// command line takes precedence over the file.
#[derive(Parser, Debug, Default)]
struct RunArgs {
    /// Catalog target name (e.g. nguyen-2).
    #[arg(long)]
    target: Option<String>,
    /// Base seed; run k uses seed + k.
    #[arg(long)]
    seed: Option<u64>,
    /// Number of independent runs.
    #[arg(long)]
    runs: Option<usize>,
    /// Integer-scalar stage grid iterations.
    #[arg(long = "step1-iters")]
    step1_iters: Option<usize>,
    /// Free-scalar stage grid iterations.
    #[arg(long = "step3-iters")]
    step3_iters: Option<usize>,
    /// Skeleton budget cap between the stages.
    #[arg(long = "max-skeletons")]
    max_skeletons: Option<usize>,
    /// Simplify elites before skeletonizing (default: per-target setting).
    #[arg(long)]
    simplify: bool,
    /// Worker thread count for batch evaluation.
    #[arg(long)]
    workers: Option<usize>,
    /// Per-stage evaluation budget.
    #[arg(long = "budget-evals")]
    budget_evals: Option<u64>,
    /// full | step1-only | gp-baseline
    #[arg(long)]
    mode: Option<String>,
    /// Output directory (default: $SYMREG_OUT_DIR or ./runs).
    #[arg(long)]
    out: Option<PathBuf>,
    /// key=value file mirroring the flags above.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Parser, Debug)]
struct DumpGridArgs {
    /// A run directory written by `run`.
    run_dir: PathBuf,
    /// Keep only bins with at most this many functions.
    #[arg(long = "function-bin-max", default_value_t = usize::MAX)]
    function_bin_max: usize,
    /// Emit CSV (the only supported format).
    #[arg(long)]
    csv: bool,
    /// Which stage's grid to slice: step1 | step3 (default: step3 if present).
    #[arg(long)]
    stage: Option<String>,
}

fn parse_mode(s: &str) -> Result<RunMode> {
    match s {
        "full" => Ok(RunMode::Full),
        "step1-only" => Ok(RunMode::Step1Only),
        "gp-baseline" => Ok(RunMode::GpBaseline),
        other => bail!("unknown mode '{other}' (expected full|step1-only|gp-baseline)"),
    }
}

fn read_config(path: &Path) -> Result<BTreeMap<String, String>> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading config {}", path.display()))?;
    let mut map = BTreeMap::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| anyhow!("{}:{}: expected key=value", path.display(), lineno + 1))?;
        map.insert(key.trim().to_string(), value.trim().to_string());
    }
    Ok(map)
}

fn merge<T: std::str::FromStr>(
    cli: Option<T>,
    file: &BTreeMap<String, String>,
    key: &str,
) -> Result<Option<T>>
where
    T::Err: std::fmt::Display,
{
    if cli.is_some() {
        return Ok(cli);
    }
    match file.get(key) {
        Some(raw) => raw
            .parse()
            .map(Some)
            .map_err(|e| anyhow!("config key '{key}': {e}")),
        None => Ok(None),
    }
}

fn cmd_run(args: RunArgs) -> Result<()> {
    let file = match &args.config {
        Some(path) => read_config(path)?,
        None => BTreeMap::new(),
    };
    let target_name: String = merge(args.target, &file, "target")?
        .ok_or_else(|| anyhow!("--target is required (flag or config file)"))?;
    let target = find_target(&target_name)
        .ok_or_else(|| anyhow!("unknown target '{target_name}'; see `symreg catalog --json`"))?;
    let seed = merge(args.seed, &file, "seed")?
        .ok_or_else(|| anyhow!("--seed is required (flag or config file)"))?;
    let runs: usize = merge(args.runs, &file, "runs")?.unwrap_or(1);

    let mut cfg = RunConfig::new(&target.name, seed);
    if let Some(p) = merge(args.step1_iters, &file, "step1-iters")? {
        cfg.step1_iters = p;
    }
    if let Some(q) = merge(args.step3_iters, &file, "step3-iters")? {
        cfg.step3_iters = q;
    }
    if let Some(m) = merge(args.max_skeletons, &file, "max-skeletons")? {
        cfg.max_skeletons = m;
    }
    if args.simplify || file.get("simplify").is_some_and(|v| v == "true") {
        cfg.simplify = Some(true);
    }
    cfg.budget_evals = merge(args.budget_evals, &file, "budget-evals")?;
    if let Some(mode) = merge(args.mode, &file, "mode")? {
        cfg.mode = parse_mode(&mode)?;
    }
    if let Some(w) = merge(args.workers, &file, "workers")? {
        symreg::par::configure_workers(w);
    }

    let out_root: PathBuf = merge(args.out, &file, "out")?
        .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("runs"));

    let summary = run_experiment(&[target], runs, &cfg, &out_root)?;
    for outcome in &summary.outcomes {
        println!(
            "{} seed={} hit={} stage={:?} evals_step1={} evals_cmaes={} best={}",
            outcome.target,
            outcome.seed,
            outcome.hit,
            outcome.hit_stage,
            outcome.n_evals_step1,
            outcome.n_evals_cmaes,
            if outcome.best_infix.is_empty() {
                &outcome.best_expression
            } else {
                &outcome.best_infix
            },
        );
    }
    for failure in &summary.failures {
        eprintln!("failed: {failure}");
    }
    println!("wrote {}", out_root.join("aggregate.csv").display());
    Ok(())
}

fn cmd_dump_grid(args: DumpGridArgs) -> Result<()> {
    let file = match args.stage.as_deref() {
        Some("step1") => args.run_dir.join("grid-step1.csv"),
        Some("step3") => args.run_dir.join("grid-step3.csv"),
        Some(other) => bail!("unknown stage '{other}' (expected step1|step3)"),
        None => {
            let step3 = args.run_dir.join("grid-step3.csv");
            if step3.exists() {
                step3
            } else {
                args.run_dir.join("grid-step1.csv")
            }
        }
    };
    let text = std::fs::read_to_string(&file)
        .with_context(|| format!("reading {}", file.display()))?;
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| anyhow!("empty grid dump"))?;
    println!("{header}");
    for line in lines {
        let function_bin: usize = line
            .splitn(3, ',')
            .nth(1)
            .and_then(|v| v.parse().ok())
            .ok_or_else(|| anyhow!("malformed grid row: {line}"))?;
        if function_bin <= args.function_bin_max {
            println!("{line}");
        }
    }
    Ok(())
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    match cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Catalog { json: _ } => {
            println!("{}", catalog_json());
            Ok(())
        }
        Command::DumpGrid(args) => cmd_dump_grid(args),
    }
}
