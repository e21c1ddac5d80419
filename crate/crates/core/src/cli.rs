//! `rsim` command line: `simulate`, `generate` and `bench`.
//!
//! Exit codes: 0 success, 2 usage or input error, 3 engine disagreement.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::bench::{self, BenchError, BenchPlan};
use crate::engine::graph::GraphEngine;
use crate::engine::{run_steps, EngineKind, KernelChoice};
use crate::formats;
use crate::generator::{generate_context, generate_system, GenSpec};
use crate::system::{ContextSequence, ReactionSystem, Strictness};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_CORRECTNESS: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "rsim", version, about = "Reaction systems simulator")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the interactive process of a model under a context sequence.
    Simulate(SimulateArgs),
    /// Write a random |S|x|A|xalpha model and context.
    Generate(GenerateArgs),
    /// Time engines over repeated runs and write a CSV of wall times.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum EngineName {
    Direct,
    Graph,
    Matrix,
}

fn parse_kernel(s: &str) -> Result<KernelChoice, String> {
    s.parse()
}

#[derive(Debug, Args)]
struct SimulateArgs {
    #[arg(long, value_name = "FILE")]
    model: PathBuf,
    #[arg(long, value_name = "FILE")]
    context: PathBuf,
    #[arg(long, value_enum, default_value = "direct")]
    engine: EngineName,
    #[arg(long, value_parser = parse_kernel, default_value = "auto")]
    matrix_kernel: KernelChoice,
    #[arg(long, value_name = "FILE")]
    output: PathBuf,
    /// Pad the context with empty states, or truncate it, to this many steps.
    #[arg(long)]
    steps: Option<usize>,
    #[arg(long)]
    allow_empty_inhibitors: bool,
    /// With the graph engine: write per-step candidate counts here.
    #[arg(long, value_name = "FILE")]
    candidate_csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct GenerateArgs {
    #[arg(long)]
    entities: usize,
    #[arg(long)]
    reactions: usize,
    #[arg(long)]
    alpha: f64,
    #[arg(long, default_value_t = 1000)]
    ctx_steps: usize,
    /// Per-entity inclusion probability of context states.
    #[arg(long, default_value_t = 0.5)]
    ctx_density: f64,
    #[arg(long, env = "RSIM_SEED", default_value_t = 0)]
    seed: u64,
    /// Files are written to PREFIX.rsys and PREFIX.ctx.
    #[arg(long, value_name = "PREFIX")]
    out_prefix: PathBuf,
}

#[derive(Debug, Args)]
struct BenchArgs {
    #[arg(long, value_name = "FILE", conflicts_with = "gen", required_unless_present = "gen")]
    model: Option<PathBuf>,
    /// Context for --model; a random one of --ctx-steps steps is used if absent.
    #[arg(long, value_name = "FILE", requires = "model")]
    context: Option<PathBuf>,
    /// Generate the model: entities, reactions, alpha.
    #[arg(long, num_args = 3, value_names = ["ENTITIES", "REACTIONS", "ALPHA"])]
    gen: Option<Vec<String>>,
    #[arg(long, default_value_t = 1000)]
    ctx_steps: usize,
    #[arg(long, env = "RSIM_SEED", default_value_t = 0)]
    seed: u64,
    #[arg(long, value_delimiter = ',', default_value = "direct,graph,matrix")]
    engines: Vec<String>,
    #[arg(long, value_parser = parse_kernel, default_value = "auto")]
    matrix_kernel: KernelChoice,
    #[arg(long, default_value_t = bench::DEFAULT_REPETITIONS)]
    reps: usize,
    #[arg(long, default_value_t = bench::DEFAULT_WARMUPS)]
    warmups: usize,
    #[arg(long, value_name = "FILE")]
    csv: PathBuf,
    /// Write per-step candidate counts of the graph engine here.
    #[arg(long, value_name = "FILE")]
    candidate_csv: Option<PathBuf>,
    #[arg(long)]
    allow_empty_inhibitors: bool,
}

#[derive(Debug)]
enum CliError {
    Input(String),
    Correctness(String),
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => EXIT_USAGE,
            CliError::Correctness(_) => EXIT_CORRECTNESS,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Input(m) | CliError::Correctness(m) => m,
        }
    }
}

impl From<BenchError> for CliError {
    fn from(e: BenchError) -> Self {
        match e {
            BenchError::Divergence { .. } => CliError::Correctness(e.to_string()),
            other => CliError::Input(other.to_string()),
        }
    }
}

type CliResult = Result<(), CliError>;

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> CliResult {
    fs::write(path, text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn strictness(allow_empty_inhibitors: bool) -> Strictness {
    if allow_empty_inhibitors {
        Strictness::AllowEmptyInhibitors
    } else {
        Strictness::Strict
    }
}

fn load_model(path: &Path, mode: Strictness) -> Result<ReactionSystem, CliError> {
    formats::parse_model(&read(path)?, mode)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn load_context(path: &Path, sys: &ReactionSystem) -> Result<ContextSequence, CliError> {
    formats::parse_context(&read(path)?, sys)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn simulate(args: SimulateArgs) -> CliResult {
    let sys = load_model(&args.model, strictness(args.allow_empty_inhibitors))?;
    let ctx = load_context(&args.context, &sys)?;
    let steps = args.steps.unwrap_or(ctx.len());

    let tr = match (args.engine, &args.candidate_csv) {
        (EngineName::Graph, Some(trace_path)) => {
            let mut g = GraphEngine::new(&sys).with_trace();
            let tr = run_steps(&mut g, &ctx, steps).map_err(|e| CliError::Input(e.to_string()))?;
            let mut buf = Vec::new();
            g.write_trace_csv(&mut buf).expect("write to Vec");
            write(trace_path, &String::from_utf8(buf).expect("ascii csv"))?;
            tr
        }
        (name, _) => {
            let kind = match name {
                EngineName::Direct => EngineKind::Direct,
                EngineName::Graph => EngineKind::Graph,
                EngineName::Matrix => EngineKind::Matrix(args.matrix_kernel),
            };
            run_steps(&mut kind.build(&sys), &ctx, steps).map_err(|e| CliError::Input(e.to_string()))?
        }
    };
    write(&args.output, &formats::write_trajectory(&tr, &sys))?;
    Ok(())
}

fn generate(args: GenerateArgs, out: &mut dyn Write) -> CliResult {
    let spec = GenSpec::new(args.entities, args.reactions, args.alpha, args.seed)
        .with_ctx_steps(args.ctx_steps)
        .with_ctx_density(args.ctx_density);
    let sys = generate_system(&spec).map_err(|e| CliError::Input(e.to_string()))?;
    let ctx = generate_context(&spec);
    let prefix = args.out_prefix.as_os_str();
    let with_ext = |ext: &str| {
        let mut p = OsString::from(prefix);
        p.push(ext);
        PathBuf::from(p)
    };
    write(&with_ext(".rsys"), &formats::write_model(&sys))?;
    write(&with_ext(".ctx"), &formats::write_context(&ctx, &sys))?;
    let _ = writeln!(out, "{}", spec.label());
    Ok(())
}

fn parse_engines(names: &[String], kernel: KernelChoice) -> Result<Vec<EngineKind>, CliError> {
    names
        .iter()
        .map(|n| match n.parse::<EngineKind>() {
            Ok(EngineKind::Matrix(KernelChoice::Auto)) => Ok(EngineKind::Matrix(kernel)),
            Ok(k) => Ok(k),
            Err(e) => Err(CliError::Input(e)),
        })
        .collect()
}

fn bench_cmd(args: BenchArgs, out: &mut dyn Write) -> CliResult {
    let engines = parse_engines(&args.engines, args.matrix_kernel)?;
    let mode = strictness(args.allow_empty_inhibitors);
    let plan = match (&args.model, &args.gen) {
        (Some(path), _) => {
            let sys = load_model(path, mode)?;
            let ctx = match &args.context {
                Some(c) => load_context(c, &sys)?,
                None => {
                    let spec = GenSpec::new(sys.n_entities(), 1, 0.0, args.seed)
                        .with_ctx_steps(args.ctx_steps);
                    generate_context(&spec)
                }
            };
            let label = path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| path.display().to_string());
            BenchPlan::new(label, sys, ctx)
        }
        (None, Some(g)) => {
            let bad = |what: &str, v: &str| CliError::Input(format!("--gen: invalid {what} `{v}`"));
            let n = g[0].parse().map_err(|_| bad("entity count", &g[0]))?;
            let m = g[1].parse().map_err(|_| bad("reaction count", &g[1]))?;
            let alpha = g[2].parse().map_err(|_| bad("alpha", &g[2]))?;
            let spec = GenSpec::new(n, m, alpha, args.seed).with_ctx_steps(args.ctx_steps);
            BenchPlan::generated(&spec)?
        }
        (None, None) => return Err(CliError::Input("one of --model or --gen is required".into())),
    };
    let mut plan = plan
        .engines(engines)
        .repetitions(args.reps)
        .warmups(args.warmups);
    plan.graph_trace = args.candidate_csv.is_some();

    let report = bench::run_bench(&plan)?;
    bench::write_csv(&report.records, &args.csv)?;
    if let (Some(path), Some(trace)) = (&args.candidate_csv, &report.graph_trace) {
        let mut text = String::from("step,candidates,fired\n");
        for s in trace {
            text.push_str(&format!("{},{},{}\n", s.step, s.candidates, s.fired));
        }
        write(path, &text)?;
    }
    let summaries = bench::summarize(&report.records)?;
    let _ = writeln!(
        out,
        "model {} ({} entities, {} reactions, {} steps)",
        plan.model_label,
        plan.system.n_entities(),
        plan.system.n_reactions(),
        plan.context.len()
    );
    let _ = write!(out, "{}", bench::format_summary(&summaries));
    let _ = writeln!(out, "total {:.3} ms", report.total_ms);
    Ok(())
}

/// Runs the CLI on `args` (including the program name) and returns the
/// process exit code.
pub fn run_cli<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(err, "{text}");
            } else {
                let _ = write!(out, "{text}");
            }
            return code;
        }
    };
    let result = match cli.command {
        Command::Simulate(a) => simulate(a),
        Command::Generate(a) => generate(a, out),
        Command::Bench(a) => bench_cmd(a, out),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {}", e.message());
            e.exit_code()
        }
    }
}
