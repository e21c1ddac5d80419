//! Repeated timed runs of several engines on one model.
//!
//! Every repetition builds the engine (timed as `<engine>:setup`) and then
//! runs the full context (timed as `<engine>`). Trajectories of all engines
//! and repetitions must agree; a mismatch aborts the benchmark.
//!
//! Times are captured with a monotonic clock at microsecond resolution and
//! reported in milliseconds. Summaries use two-pass mean and population
//! standard deviation in `f64`, summing in record order.

use std::fmt::Write as _;
use std::io;
use std::path::Path;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::engine::graph::{GraphEngine, StepStats};
use crate::engine::{run, Engine, EngineKind};
use crate::error::DimensionError;
use crate::generator::{generate_context, generate_system, GenError, GenSpec};
use crate::system::{ContextSequence, ReactionSystem, Trajectory};

pub const DEFAULT_REPETITIONS: usize = 30;
pub const DEFAULT_WARMUPS: usize = 2;
pub const SETUP_SUFFIX: &str = ":setup";

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("engines `{first}` and `{second}` diverge at step {step}")]
    Divergence {
        first: String,
        second: String,
        step: usize,
    },
    #[error("no engines selected")]
    NoEngines,
    #[error("repetitions must be at least 1")]
    NoRepetitions,
    #[error("no records for engine `{0}`")]
    EmptyGroup(String),
    #[error(transparent)]
    Dimension(#[from] DimensionError),
    #[error(transparent)]
    Generate(#[from] GenError),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] io::Error),
}

#[derive(Debug, Clone)]
pub struct BenchPlan {
    pub model_label: String,
    pub system: ReactionSystem,
    pub context: ContextSequence,
    pub engines: Vec<EngineKind>,
    pub repetitions: usize,
    pub warmups: usize,
    /// Also collect per-step candidate counts from an untimed graph run.
    pub graph_trace: bool,
}

impl BenchPlan {
    pub fn new(model_label: impl Into<String>, system: ReactionSystem, context: ContextSequence) -> Self {
        BenchPlan {
            model_label: model_label.into(),
            system,
            context,
            engines: vec![EngineKind::Direct],
            repetitions: DEFAULT_REPETITIONS,
            warmups: DEFAULT_WARMUPS,
            graph_trace: false,
        }
    }

    /// Plan over a generated model and context.
    pub fn generated(spec: &GenSpec) -> Result<Self, BenchError> {
        let system = generate_system(spec)?;
        let context = generate_context(spec);
        Ok(BenchPlan::new(spec.label(), system, context))
    }

    pub fn engines(mut self, engines: Vec<EngineKind>) -> Self {
        self.engines = engines;
        self
    }

    pub fn repetitions(mut self, reps: usize) -> Self {
        self.repetitions = reps;
        self
    }

    pub fn warmups(mut self, warmups: usize) -> Self {
        self.warmups = warmups;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRecord {
    pub engine: String,
    pub model: String,
    pub steps: usize,
    pub rep: usize,
    pub wall_ms: f64,
}

#[derive(Debug, Clone)]
pub struct BenchReport {
    pub records: Vec<BenchRecord>,
    /// Wall time of the whole plan including warmups and comparisons.
    pub total_ms: f64,
    pub graph_trace: Option<Vec<StepStats>>,
}

fn millis(start: Instant) -> f64 {
    start.elapsed().as_micros() as f64 / 1000.0
}

/// Builds a fresh engine for one repetition.
pub type EngineBuilder = Box<dyn Fn(&ReactionSystem) -> Box<dyn Engine>>;

pub fn run_bench(plan: &BenchPlan) -> Result<BenchReport, BenchError> {
    let builders: Vec<EngineBuilder> = plan
        .engines
        .iter()
        .map(|&kind| Box::new(move |sys: &ReactionSystem| kind.build(sys)) as EngineBuilder)
        .collect();
    run_bench_with(plan, &builders)
}

/// [`run_bench`] over arbitrary engines; `plan.engines` is ignored.
pub fn run_bench_with(plan: &BenchPlan, builders: &[EngineBuilder]) -> Result<BenchReport, BenchError> {
    if builders.is_empty() {
        return Err(BenchError::NoEngines);
    }
    if plan.repetitions == 0 {
        return Err(BenchError::NoRepetitions);
    }
    let started = Instant::now();
    let steps = plan.context.len();
    let mut reference: Option<(String, Trajectory)> = None;
    let mut records = Vec::with_capacity(2 * builders.len() * plan.repetitions);

    let mut check = |label: &str, tr: Trajectory| -> Result<(), BenchError> {
        match &reference {
            None => reference = Some((label.to_string(), tr)),
            Some((ref_label, ref_tr)) => {
                if let Some(step) = ref_tr.first_divergence(&tr) {
                    return Err(BenchError::Divergence {
                        first: ref_label.clone(),
                        second: label.to_string(),
                        step,
                    });
                }
            }
        }
        Ok(())
    };

    for build in builders {
        for _ in 0..plan.warmups {
            let mut engine = build(&plan.system);
            let tr = run(&mut engine, &plan.context)?;
            check(engine.label(), tr)?;
        }
        let mut runs = Vec::with_capacity(plan.repetitions);
        let mut setups = Vec::with_capacity(plan.repetitions);
        for rep in 0..plan.repetitions {
            let t0 = Instant::now();
            let mut engine = build(&plan.system);
            let setup_ms = millis(t0);

            let t1 = Instant::now();
            let tr = run(&mut engine, &plan.context)?;
            let run_ms = millis(t1);

            let label = engine.label();
            check(label, tr)?;
            let record = |engine: String, wall_ms| BenchRecord {
                engine,
                model: plan.model_label.clone(),
                steps,
                rep,
                wall_ms,
            };
            runs.push(record(label.to_string(), run_ms));
            setups.push(record(format!("{label}{SETUP_SUFFIX}"), setup_ms));
        }
        records.extend(runs);
        records.extend(setups);
    }

    let graph_trace = if plan.graph_trace {
        let mut g = GraphEngine::new(&plan.system).with_trace();
        let tr = run(&mut g, &plan.context)?;
        check("graph", tr)?;
        Some(g.trace().to_vec())
    } else {
        None
    };

    Ok(BenchReport {
        records,
        total_ms: millis(started),
        graph_trace,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Summary {
    pub engine: String,
    pub runs: usize,
    pub mean_ms: f64,
    pub std_ms: f64,
    pub min_ms: f64,
    pub max_ms: f64,
    pub median_ms: f64,
}

/// Statistics of one group of timings.
pub fn summarize_times(engine: &str, times: &[f64]) -> Result<Summary, BenchError> {
    if times.is_empty() {
        return Err(BenchError::EmptyGroup(engine.to_string()));
    }
    let n = times.len() as f64;
    let mean = times.iter().sum::<f64>() / n;
    let var = times.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
    let mut sorted = times.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mid = sorted.len() / 2;
    let median = if sorted.len() % 2 == 1 {
        sorted[mid]
    } else {
        (sorted[mid - 1] + sorted[mid]) / 2.0
    };
    Ok(Summary {
        engine: engine.to_string(),
        runs: times.len(),
        mean_ms: mean,
        std_ms: var.sqrt(),
        min_ms: sorted[0],
        max_ms: sorted[sorted.len() - 1],
        median_ms: median,
    })
}

/// One summary per engine label, in order of first appearance.
pub fn summarize(records: &[BenchRecord]) -> Result<Vec<Summary>, BenchError> {
    if records.is_empty() {
        return Err(BenchError::EmptyGroup(String::new()));
    }
    let mut groups: Vec<(&str, Vec<f64>)> = Vec::new();
    for r in records {
        match groups.iter_mut().find(|(e, _)| *e == r.engine) {
            Some((_, v)) => v.push(r.wall_ms),
            None => groups.push((&r.engine, vec![r.wall_ms])),
        }
    }
    groups
        .iter()
        .map(|(e, times)| summarize_times(e, times))
        .collect()
}

/// Summary table. `mean_ms` and `std_ms` are printed at full precision; the
/// last column is the rounded `mean (std)` form.
pub fn format_summary(summaries: &[Summary]) -> String {
    let width = summaries
        .iter()
        .map(|s| s.engine.len())
        .max()
        .unwrap_or(0)
        .max("engine".len());
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<width$}  {:>4}  {:>22}  {:>22}  {:>12}  {:>12}  {:>12}  mean (std)",
        "engine", "runs", "mean_ms", "std_ms", "min_ms", "median_ms", "max_ms"
    );
    for s in summaries {
        let _ = writeln!(
            out,
            "{:<width$}  {:>4}  {:>22}  {:>22}  {:>12.3}  {:>12.3}  {:>12.3}  {:.0} ({:.0})",
            s.engine, s.runs, s.mean_ms, s.std_ms, s.min_ms, s.median_ms, s.max_ms, s.mean_ms, s.std_ms
        );
    }
    out
}

pub fn write_csv_to<W: io::Write>(records: &[BenchRecord], w: W) -> Result<(), BenchError> {
    let mut wtr = csv::WriterBuilder::new()
        .has_headers(false)
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(w);
    wtr.write_record(["engine", "model", "steps", "rep", "wall_ms"])?;
    for r in records {
        wtr.serialize(r)?;
    }
    wtr.flush()?;
    Ok(())
}

/// Writes `engine,model,steps,rep,wall_ms` rows in record order.
pub fn write_csv(records: &[BenchRecord], path: &Path) -> Result<(), BenchError> {
    let file = std::fs::File::create(path)?;
    write_csv_to(records, io::BufWriter::new(file))
}

pub fn read_csv(path: &Path) -> Result<Vec<BenchRecord>, BenchError> {
    let mut rdr = csv::Reader::from_path(path)?;
    let records = rdr.deserialize().collect::<Result<Vec<BenchRecord>, _>>()?;
    Ok(records)
}
