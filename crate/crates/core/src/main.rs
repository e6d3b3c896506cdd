use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::Deserialize;
use serde_json::json;

use trac_core::blocksworld::{builtin_domain, universe, PoolKind};
use trac_core::dataset::{
    self, assign_splits, compute_stats, format_records, merge_datasets, read_dataset, read_manifest, records_for,
    split_seed, verify_dataset, write_atomic, write_dataset, write_suite, DatasetRecord, Split, SplitSpec,
    VerifyReport, MANIFEST_FILE,
};
use trac_core::oracles::{oracle_optimal_cost, oracle_prefix_check, OracleBudget};
use trac_core::planner::{default_bound, optimal_cost};
use trac_core::strips::{ground_action, parse_atom, parse_call, parse_condition, Grounding};
use trac_core::taskgen::{gen_dataset, ConditionShape, GeTag, GenConfig, InstanceMeta, ProblemInstance, Task};
use trac_core::textgen::{LmStyle, TemplateSet};

#[derive(Parser)]
#[command(name = "trac", version, about = "Generate and check reasoning-about-actions datasets")]
struct Cli {
    /// Worker threads for generation and verification (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate one dataset.
    Generate(GenerateArgs),
    /// Generate all 32 standard and generalization datasets with a manifest.
    Suite {
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value = "trac-data")]
        out: PathBuf,
    },
    /// Recompute labels, renderings and ids; accepts a file or a suite directory.
    Verify { path: PathBuf },
    /// Label, length and shape statistics as JSON.
    Stats { path: PathBuf },
    /// Convert a dataset to model input/target rows.
    FormatLm {
        path: PathBuf,
        #[arg(long, default_value = "separator")]
        style: LmStyle,
        #[arg(long)]
        out: PathBuf,
    },
    /// Label one symbolic instance given as JSON.
    Solve {
        path: PathBuf,
        /// Also run the brute-force oracles and compare.
        #[arg(long)]
        oracle: bool,
    },
    /// Concatenate datasets, optionally taking a balanced prefix of each.
    Merge {
        inputs: Vec<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        /// Records taken from each input, half per label.
        #[arg(long)]
        take: Option<usize>,
    },
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long)]
    task: Task,
    #[arg(long, default_value_t = 5)]
    objects: usize,
    #[arg(long)]
    length: usize,
    #[arg(long, default_value_t = 15_000)]
    count: usize,
    #[arg(long)]
    seed: u64,
    #[arg(long, default_value = "standard")]
    pool: PoolKind,
    #[arg(long, default_value = "mixed")]
    shape: ConditionShape,
    /// Goal-recognition goal horizon (default 2M+2).
    #[arg(long)]
    horizon: Option<usize>,
    #[arg(long)]
    out: PathBuf,
    /// Also write train/dev/test files; sizes as `train,dev,test`, or
    /// 2/3, 2/15 and the rest when given without a value.
    #[arg(long, num_args = 0..=1, default_missing_value = "auto")]
    splits: Option<String>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.jobs {
        configure_workers(n);
    }
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("{}", json!({ "error": format!("{e:#}") }));
            ExitCode::from(2)
        }
    }
}

#[cfg(feature = "parallel")]
fn configure_workers(n: usize) {
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().expect("thread pool is configured once");
}

#[cfg(not(feature = "parallel"))]
fn configure_workers(_: usize) {}

fn run(cmd: Command) -> Result<ExitCode> {
    match cmd {
        Command::Generate(a) => generate(a),
        Command::Suite { seed, out } => {
            let manifest = write_suite(seed, &out, |e| {
                eprintln!("{}", json!({ "dataset": e.name, "records": e.records, "sha256": e.sha256 }));
            })?;
            println!("{}", json!({ "datasets": manifest.datasets.len(), "manifest": out.join(MANIFEST_FILE) }));
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify { path } => verify(&path),
        Command::Stats { path } => {
            let records = read_dataset(&path)?;
            let stats = compute_stats(&records, TemplateSet::builtin())?;
            println!("{}", serde_json::to_string_pretty(&stats)?);
            Ok(ExitCode::SUCCESS)
        }
        Command::FormatLm { path, style, out } => {
            let rows = format_records(&read_dataset(&path)?, style);
            let mut body = String::new();
            for r in &rows {
                body.push_str(&serde_json::to_string(r)?);
                body.push('\n');
            }
            write_atomic(&out, body.as_bytes())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Solve { path, oracle } => solve(&path, oracle),
        Command::Merge { inputs, out, take } => {
            if inputs.is_empty() {
                bail!("merge needs at least one input");
            }
            let all = inputs.iter().map(|p| read_dataset(p)).collect::<Result<Vec<_>, _>>()?;
            let (merged, dropped) = merge_datasets(&all, take)?;
            write_dataset(&merged, &out)?;
            println!("{}", json!({ "records": merged.len(), "duplicates_dropped": dropped }));
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn generate(a: GenerateArgs) -> Result<ExitCode> {
    let cfg = GenConfig {
        task: a.task,
        objects: a.objects,
        length: a.length,
        count: a.count,
        seed: a.seed,
        pool: a.pool,
        shape: a.shape,
        ge_tag: GeTag::None,
        goal_horizon: a.horizon,
    };
    let ds = gen_dataset(&cfg)?;
    let mut records = records_for(&ds, TemplateSet::builtin());
    let spec = match a.splits.as_deref() {
        None => None,
        Some("auto") => Some(SplitSpec::proportional(cfg.count)),
        Some(s) => Some(s.parse::<SplitSpec>().map_err(anyhow::Error::msg)?),
    };
    if let Some(spec) = spec {
        assign_splits(&mut records, spec, split_seed(&cfg))?;
    }
    write_dataset(&records, &a.out)?;
    let mut files = vec![a.out.clone()];
    if spec.is_some() {
        for split in Split::ALL {
            let part: Vec<DatasetRecord> = records.iter().filter(|r| r.meta.split == split).cloned().collect();
            let path = sibling(&a.out, split.as_str());
            write_dataset(&part, &path)?;
            files.push(path);
        }
    }
    println!("{}", json!({ "records": records.len(), "files": files, "counters": ds.counters }));
    Ok(ExitCode::SUCCESS)
}

/// `data/pr.jsonl` -> `data/pr.train.jsonl`
fn sibling(path: &Path, tag: &str) -> PathBuf {
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("dataset");
    let ext = path.extension().and_then(|s| s.to_str()).unwrap_or("jsonl");
    path.with_file_name(format!("{stem}.{tag}.{ext}"))
}

fn summarize(name: &str, r: &VerifyReport) -> serde_json::Value {
    json!({
        "dataset": name,
        "records": r.records,
        "true_labels": r.true_labels,
        "balanced": r.balanced(),
        "label_mismatches": r.label_mismatches.len(),
        "render_mismatches": r.render_mismatches.len(),
        "id_mismatches": r.id_mismatches.len(),
        "invalid": r.invalid.len(),
        "duplicates": r.duplicates.len(),
        "first_problems": r.label_mismatches.iter()
            .chain(&r.render_mismatches).chain(&r.id_mismatches).chain(&r.invalid).chain(&r.duplicates)
            .take(5).collect::<Vec<_>>(),
    })
}

fn verify(path: &Path) -> Result<ExitCode> {
    let mut ok = true;
    if path.is_dir() {
        let manifest = read_manifest(path)?;
        for e in &manifest.datasets {
            let file = path.join(&e.file);
            let digest = dataset::file_digest(&file)?;
            let report = verify_dataset(&file)?;
            let good = report.is_clean() && report.balanced() && digest == e.sha256 && report.records == e.records;
            ok &= good;
            let mut line = summarize(&e.name, &report);
            line["digest_matches"] = json!(digest == e.sha256);
            println!("{line}");
        }
    } else {
        let report = verify_dataset(path)?;
        ok = report.is_clean() && report.balanced();
        println!("{}", summarize(&path.display().to_string(), &report));
    }
    Ok(if ok { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

/// A bare symbolic instance: names default to the objects mentioned.
#[derive(Deserialize)]
struct SolveInput {
    task: Task,
    initial_state: Vec<String>,
    #[serde(default)]
    actions: Vec<String>,
    #[serde(default)]
    condition: Option<String>,
    #[serde(default)]
    names: Option<Vec<String>>,
}

fn read_instance(path: &Path) -> Result<ProblemInstance> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    if let Ok(record) = serde_json::from_str::<DatasetRecord>(text.trim()) {
        return Ok(record.to_instance()?);
    }
    let input: SolveInput = serde_json::from_str(&text).context("expected a dataset record or {task, initial_state, actions, condition}")?;
    let initial_state = input.initial_state.iter().map(|a| parse_atom(a)).collect::<Result<Vec<_>, _>>()?;
    let calls = input.actions.iter().map(|a| parse_call(a)).collect::<Result<Vec<_>, _>>()?;
    let names = input.names.unwrap_or_else(|| {
        let mut v: Vec<String> = initial_state.iter().flat_map(|a| a.args.clone()).chain(calls.iter().flat_map(|c| c.1.clone())).collect();
        v.sort();
        v.dedup();
        v
    });
    let u = universe(&names)?;
    let actions = calls.iter().map(|(n, args)| ground_action(builtin_domain(), &u, n, args)).collect::<Result<Vec<_>, _>>()?;
    let length = actions.len();
    Ok(ProblemInstance {
        task: input.task,
        initial_state,
        actions,
        condition: input.condition.as_deref().map(parse_condition).transpose()?,
        label: false,
        meta: InstanceMeta { objects: names.len(), length, ge_tag: GeTag::None, seed: 0, pool: PoolKind::Standard, names },
    })
}

fn solve(path: &Path, oracle: bool) -> Result<ExitCode> {
    let p = read_instance(path)?;
    let g = Grounding::new(builtin_domain(), universe(&p.meta.names)?)?;
    let label = p.recompute_label(&g)?;
    let bound = default_bound(p.meta.objects);
    let cost = match (&p.condition, p.task) {
        (Some(c), Task::Planning | Task::GoalRecognition) => optimal_cost(&g, &p.state(), c, bound)?.finite(),
        _ => None,
    };
    let mut out = json!({ "task": p.task, "label": label, "optimal_cost": cost });
    if oracle {
        let budget = OracleBudget::new(200_000_000, bound);
        let d = builtin_domain();
        let u = g.universe();
        out["oracle"] = match (&p.condition, p.task) {
            (Some(c), Task::GoalRecognition) => {
                let o_label = oracle_prefix_check(d, u, &p.state(), c, &p.actions, budget)?;
                let o_cost = oracle_optimal_cost(d, u, &p.state(), c, budget)?.finite();
                json!({ "label": o_label, "optimal_cost": o_cost, "agrees": o_label == label && o_cost == cost })
            }
            (Some(c), Task::Planning) => {
                let o_cost = oracle_optimal_cost(d, u, &p.state(), c, budget)?.finite();
                json!({ "optimal_cost": o_cost, "agrees": o_cost == cost })
            }
            _ => json!(null),
        };
    }
    println!("{out}");
    let disagrees = out["oracle"]["agrees"] == json!(false);
    Ok(if disagrees { ExitCode::from(1) } else { ExitCode::SUCCESS })
}
