//! `planarcc` command implementations. The binary is a thin wrapper around
//! [`run`], which keeps every command callable in-process.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use planar_cc::bound::{optimize_lower_bound_with, BoundResult};
use planar_cc::decode::best_decode_with;
use planar_cc::instances::{gen_grid, gen_random_planar, instance_to_json, read_instance, Instance, WeightModel};
use planar_cc::oracle::{brute_cc, brute_cc2, brute_cck, check_proposition1, full_lp_bound};
use planar_cc::par::{with_threads, Execution};
use planar_cc::pipeline::{solve_instance, SolveOptions};
use planar_cc::CutOracle;
use serde::Serialize;
use serde_json::json;

/// Version of the JSON documents written by `solve`, `bound` and `decode`.
pub const FORMAT_VERSION: u32 = 1;

/// Exit status when a clustering was certified optimal.
pub const EXIT_CERTIFIED: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
/// Exit status when a gap between bound and clustering remains.
pub const EXIT_GAP: i32 = 2;

pub const CSV_HEADER: [&str; 8] = ["name", "bound", "energy", "gap", "certificate", "batches", "ms_bound", "ms_decode"];

#[derive(Parser, Debug)]
#[command(name = "planarcc", version, about = "Certified correlation clustering on planar graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Lower bound plus decoding; prints a result document.
    Solve {
        instance: PathBuf,
        #[command(flatten)]
        flags: SolveFlags,
    },
    /// Lower bound only.
    Bound {
        instance: PathBuf,
        #[command(flatten)]
        flags: SolveFlags,
        /// Where to save the full bound state (multipliers and cut pool).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Decode from a bound saved by `bound --out`.
    Decode {
        instance: PathBuf,
        #[arg(long)]
        bound: PathBuf,
        #[command(flatten)]
        flags: SolveFlags,
    },
    /// Exhaustive reference values for small instances.
    Oracle(OracleArgs),
    /// Generate an instance file.
    Gen(GenArgs),
    /// Solve every `*.json` instance in a directory and write a CSV summary.
    Bench {
        dir: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Instances solved concurrently (0: one per core).
        #[arg(long, default_value_t = 0)]
        jobs: usize,
        #[command(flatten)]
        flags: SolveFlags,
    },
}

#[derive(Args, Debug, Clone)]
struct SolveFlags {
    /// Oracle violation tolerance for the cutting-plane loop.
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    /// Recursive decoding restarts.
    #[arg(long, default_value_t = 10)]
    restarts: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Rounding threshold on the cut-cone solution.
    #[arg(long, default_value_t = 0.5)]
    threshold: f64,
    #[arg(long, default_value_t = 1000)]
    max_batches: usize,
    /// Run restarts on the calling thread only.
    #[arg(long)]
    sequential: bool,
}

impl SolveFlags {
    fn options(&self) -> Result<SolveOptions> {
        if !(self.tol > 0.0) {
            bail!("--tol must be positive");
        }
        if self.restarts == 0 {
            bail!("--restarts must be at least 1");
        }
        if !(self.threshold > 0.0 && self.threshold < 1.0) {
            bail!("--threshold must lie in (0, 1)");
        }
        Ok(SolveOptions {
            tol: self.tol,
            restarts: self.restarts,
            seed: self.seed,
            threshold: self.threshold,
            max_batches: self.max_batches,
            execution: if self.sequential { Execution::Sequential } else { Execution::Parallel },
        })
    }
}

#[derive(Args, Debug)]
#[command(group = clap::ArgGroup::new("query").required(true).multiple(true))]
struct OracleArgs {
    instance: PathBuf,
    /// Exact clustering optimum (at most 12 vertices).
    #[arg(long, group = "query")]
    cc: bool,
    /// Exact best bipartition (at most 20 vertices).
    #[arg(long, group = "query")]
    cc2: bool,
    /// Exact optimum with at most K labels.
    #[arg(long, value_name = "K", group = "query")]
    cck: Option<usize>,
    /// Check the bipartition / four-label relations.
    #[arg(long, group = "query")]
    chain: bool,
    /// Lower-bound LP with every cut constraint (at most 10 vertices).
    #[arg(long, group = "query")]
    full_lp: bool,
    /// Drop the upper bounds on the multipliers in `--full-lp`.
    #[arg(long, requires = "full_lp")]
    no_upper: bool,
}

#[derive(Args, Debug)]
#[command(group = clap::ArgGroup::new("shape").required(true))]
struct GenArgs {
    /// Grid size as WIDTHxHEIGHT.
    #[arg(long, value_name = "WxH", group = "shape")]
    grid: Option<String>,
    /// Random planar graph with N vertices.
    #[arg(long, value_name = "N", group = "shape")]
    random: Option<usize>,
    /// Threshold for boundary-probability weights (presets 0.35, 0.27, 0.20, 0.12).
    #[arg(long, conflicts_with = "uniform")]
    beta: Option<f64>,
    /// Uniform grid weights in [LO, HI].
    #[arg(long, value_name = "LO,HI", allow_hyphen_values = true)]
    uniform: Option<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    name: Option<String>,
    /// Output file (stdout if absent).
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Parses arguments and runs one command; returns the process exit status.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let informational =
                matches!(e.kind(), clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion);
            let target: &mut dyn Write = if informational { stdout } else { stderr };
            let _ = write!(target, "{}", e.render());
            return if informational { 0 } else { EXIT_ERROR };
        }
    };
    match execute(cli.command, stdout) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e:#}");
            EXIT_ERROR
        }
    }
}

fn execute(command: Command, stdout: &mut dyn Write) -> Result<i32> {
    match command {
        Command::Solve { instance, flags } => cmd_solve(&instance, &flags, stdout),
        Command::Bound { instance, flags, out } => cmd_bound(&instance, &flags, out.as_deref(), stdout),
        Command::Decode { instance, bound, flags } => cmd_decode(&instance, &bound, &flags, stdout),
        Command::Oracle(args) => cmd_oracle(&args, stdout),
        Command::Gen(args) => cmd_gen(&args, stdout),
        Command::Bench { dir, out, jobs, flags } => cmd_bench(&dir, &out, jobs, &flags, stdout),
    }
}

fn load(path: &Path) -> Result<Instance> {
    read_instance(path).with_context(|| format!("cannot load instance {}", path.display()))
}

fn print_json<T: Serialize>(stdout: &mut dyn Write, value: &T) -> Result<()> {
    serde_json::to_writer_pretty(&mut *stdout, value)?;
    writeln!(stdout)?;
    Ok(())
}

fn settings(options: &SolveOptions) -> serde_json::Value {
    json!({
        "tol": options.tol,
        "restarts": options.restarts,
        "seed": options.seed,
        "threshold": options.threshold,
        "max_batches": options.max_batches,
    })
}

fn cmd_solve(path: &Path, flags: &SolveFlags, stdout: &mut dyn Write) -> Result<i32> {
    let options = flags.options()?;
    let instance = load(path)?;
    let report = solve_instance(&instance.graph, &instance.theta, &options)?;
    let doc = json!({
        "format_version": FORMAT_VERSION,
        "instance": instance.name,
        "bound": report.bound.bound,
        "energy": report.decode.energy,
        "gap": report.gap,
        "certificate": report.certificate,
        "converged": report.bound.converged,
        "batches": report.bound.batches,
        "oracle_calls": report.bound.oracle_calls,
        "method": report.decode.method,
        "clusters": report.decode.partition.cluster_count(),
        "wall_times": {
            "bound_ms": report.ms_bound,
            "decode_ms": report.ms_decode,
            "total_ms": report.ms_bound + report.ms_decode,
        },
        "settings": settings(&options),
        "labels": report.decode.partition.labels(),
    });
    print_json(stdout, &doc)?;
    Ok(if report.certificate { EXIT_CERTIFIED } else { EXIT_GAP })
}

#[derive(Serialize, serde::Deserialize)]
struct SavedBound {
    format_version: u32,
    instance: String,
    result: BoundResult,
}

fn cmd_bound(path: &Path, flags: &SolveFlags, out: Option<&Path>, stdout: &mut dyn Write) -> Result<i32> {
    let options = flags.options()?;
    let instance = load(path)?;
    let oracle = CutOracle::new(&instance.graph);
    let started = Instant::now();
    let result = optimize_lower_bound_with(&oracle, &instance.theta, &options.bound_options())?;
    let ms = started.elapsed().as_secs_f64() * 1e3;
    if let Some(out) = out {
        let saved =
            SavedBound { format_version: FORMAT_VERSION, instance: instance.name.clone(), result: result.clone() };
        let text = serde_json::to_string_pretty(&saved)?;
        std::fs::write(out, text + "\n").with_context(|| format!("cannot write {}", out.display()))?;
    }
    let doc = json!({
        "format_version": FORMAT_VERSION,
        "instance": instance.name,
        "bound": result.bound,
        "converged": result.converged,
        "batches": result.batches,
        "oracle_calls": result.oracle_calls,
        "pool_size": result.pool.len(),
        "wall_times": {"bound_ms": ms},
        "settings": settings(&options),
        "lambda": result.lambda,
    });
    print_json(stdout, &doc)?;
    Ok(EXIT_CERTIFIED)
}

fn cmd_decode(path: &Path, bound_path: &Path, flags: &SolveFlags, stdout: &mut dyn Write) -> Result<i32> {
    let options = flags.options()?;
    let instance = load(path)?;
    let text = std::fs::read_to_string(bound_path).with_context(|| format!("cannot read {}", bound_path.display()))?;
    let saved: SavedBound =
        serde_json::from_str(&text).with_context(|| format!("cannot parse bound file {}", bound_path.display()))?;
    let bound = saved.result;
    let m = instance.graph.edge_count();
    if bound.lambda.len() != m || bound.pool.edge_count() != m {
        bail!("bound file was computed for a graph with {} edges, instance has {m}", bound.lambda.len());
    }
    let oracle = CutOracle::new(&instance.graph);
    let started = Instant::now();
    let result = best_decode_with(&oracle, &instance.theta, &bound, &options.decode_options())?;
    let ms = started.elapsed().as_secs_f64() * 1e3;
    let doc = json!({
        "format_version": FORMAT_VERSION,
        "instance": instance.name,
        "bound": bound.bound,
        "energy": result.energy,
        "gap": result.energy - bound.bound,
        "certificate": result.certificate,
        "method": result.method,
        "clusters": result.partition.cluster_count(),
        "wall_times": {"decode_ms": ms},
        "settings": settings(&options),
        "labels": result.partition.labels(),
    });
    print_json(stdout, &doc)?;
    Ok(if result.certificate { EXIT_CERTIFIED } else { EXIT_GAP })
}

fn cmd_oracle(args: &OracleArgs, stdout: &mut dyn Write) -> Result<i32> {
    let instance = load(&args.instance)?;
    let (g, theta) = (&instance.graph, &instance.theta[..]);
    let mut doc = serde_json::Map::new();
    doc.insert("instance".into(), json!(instance.name));
    if args.cc {
        let (partition, value) = brute_cc(g, theta)?;
        doc.insert("cc".into(), json!({"value": value, "labels": partition.labels()}));
    }
    if args.cc2 {
        let (cut, value) = brute_cc2(g, theta)?;
        doc.insert("cc2".into(), json!({"value": value, "cut_edges": cut.cut_edges()}));
    }
    if let Some(k) = args.cck {
        doc.insert("cck".into(), json!({"k": k, "value": brute_cck(g, theta, k)?}));
    }
    if args.chain {
        let report = check_proposition1(g, theta)?;
        let passed = report.passed();
        let mut value = serde_json::to_value(&report)?;
        value["passed"] = json!(passed);
        doc.insert("chain".into(), value);
    }
    if args.full_lp {
        let value = full_lp_bound(g, theta, !args.no_upper)?;
        doc.insert("full_lp".into(), json!({"upper_bounds": !args.no_upper, "value": value}));
    }
    print_json(stdout, &doc)?;
    Ok(EXIT_CERTIFIED)
}

fn parse_grid(text: &str) -> Result<(usize, usize)> {
    let (w, h) = text.split_once(['x', 'X']).ok_or_else(|| anyhow!("grid size {text:?} is not WIDTHxHEIGHT"))?;
    Ok((w.trim().parse()?, h.trim().parse()?))
}

fn parse_range(text: &str) -> Result<(f64, f64)> {
    let (lo, hi) = text.split_once(',').ok_or_else(|| anyhow!("range {text:?} is not LO,HI"))?;
    Ok((lo.trim().parse()?, hi.trim().parse()?))
}

fn cmd_gen(args: &GenArgs, stdout: &mut dyn Write) -> Result<i32> {
    let mut instance = if let Some(grid) = &args.grid {
        let (w, h) = parse_grid(grid)?;
        let model = match (&args.uniform, args.beta) {
            (Some(range), _) => {
                let (low, high) = parse_range(range)?;
                WeightModel::Uniform { low, high }
            }
            (None, Some(beta)) => WeightModel::GpbLike { beta },
            (None, None) => bail!("--grid needs --beta or --uniform"),
        };
        gen_grid(w, h, model, args.seed)?
    } else {
        if args.beta.is_some() || args.uniform.is_some() {
            bail!("--beta and --uniform apply to --grid only");
        }
        let n = args.random.expect("clap enforces one shape");
        gen_random_planar(n, args.seed)?
    };
    if let Some(name) = &args.name {
        instance.name = name.clone();
    }
    let text = instance_to_json(&instance) + "\n";
    match &args.out {
        Some(path) => std::fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))?,
        None => stdout.write_all(text.as_bytes())?,
    }
    Ok(EXIT_CERTIFIED)
}

struct BenchRow {
    name: String,
    bound: f64,
    energy: f64,
    gap: f64,
    certificate: bool,
    batches: usize,
    ms_bound: f64,
    ms_decode: f64,
}

fn cmd_bench(dir: &Path, out: &Path, jobs: usize, flags: &SolveFlags, stdout: &mut dyn Write) -> Result<i32> {
    let options = flags.options()?;
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)
        .with_context(|| format!("cannot list {}", dir.display()))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|ext| ext == "json"))
        .collect();
    files.sort();
    let rows: Vec<Result<BenchRow>> = with_threads(jobs, || {
        Execution::Parallel.map(&files, |path| {
            let instance = load(path)?;
            let report = solve_instance(&instance.graph, &instance.theta, &options)?;
            Ok(BenchRow {
                name: instance.name,
                bound: report.bound.bound,
                energy: report.decode.energy,
                gap: report.gap,
                certificate: report.certificate,
                batches: report.bound.batches,
                ms_bound: report.ms_bound,
                ms_decode: report.ms_decode,
            })
        })
    });
    let mut writer = csv::Writer::from_path(out).with_context(|| format!("cannot write {}", out.display()))?;
    writer.write_record(CSV_HEADER)?;
    let mut certified = 0;
    let total = rows.len();
    for row in rows {
        let row = row?;
        certified += row.certificate as usize;
        writer.write_record([
            row.name,
            row.bound.to_string(),
            row.energy.to_string(),
            row.gap.to_string(),
            row.certificate.to_string(),
            row.batches.to_string(),
            format!("{:.3}", row.ms_bound),
            format!("{:.3}", row.ms_decode),
        ])?;
    }
    writer.flush()?;
    print_json(stdout, &json!({"instances": total, "certified": certified, "out": out.display().to_string()}))?;
    Ok(EXIT_CERTIFIED)
}
