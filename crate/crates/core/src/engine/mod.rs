//! Simulation engines and the interactive-process driver shared by all of them.

pub mod direct;
pub mod graph;
pub mod matrix;

use std::fmt;
use std::str::FromStr;

use crate::error::DimensionError;
use crate::state::State;
use crate::system::{ContextSequence, ReactionSystem, Trajectory};

pub use direct::DirectEngine;
pub use graph::GraphEngine;
pub use matrix::{Kernel, KernelChoice, MatrixEngine};

/// A compiled form of a reaction system that can compute `res(d ∪ c)`.
///
/// Engines may keep scratch buffers and, for the graph engine, a candidate
/// set carried between calls. [`Engine::reset`] puts an engine back into the
/// state expected at the start of a run from `D_0 = ∅`.
pub trait Engine {
    fn label(&self) -> &'static str;

    fn n_entities(&self) -> usize;

    fn reset(&mut self) {}

    fn step_into(&mut self, d: &State, c: &State, out: &mut State) -> Result<(), DimensionError>;

    fn step(&mut self, d: &State, c: &State) -> Result<State, DimensionError> {
        let mut out = State::empty(self.n_entities());
        self.step_into(d, c, &mut out)?;
        Ok(out)
    }
}

impl<E: Engine + ?Sized> Engine for Box<E> {
    fn label(&self) -> &'static str {
        (**self).label()
    }

    fn n_entities(&self) -> usize {
        (**self).n_entities()
    }

    fn reset(&mut self) {
        (**self).reset()
    }

    fn step_into(&mut self, d: &State, c: &State, out: &mut State) -> Result<(), DimensionError> {
        (**self).step_into(d, c, out)
    }
}

/// Runs the interactive process `D_0 = ∅, D_i = res(D_{i-1} ∪ C_{i-1})` for
/// every entry of `ctx`, returning `D_0 ..= D_n`.
pub fn run<E: Engine + ?Sized>(
    engine: &mut E,
    ctx: &ContextSequence,
) -> Result<Trajectory, DimensionError> {
    let n = engine.n_entities();
    DimensionError::check(n, ctx.n_entities())?;
    for c in ctx.steps() {
        DimensionError::check(n, c.len())?;
    }
    engine.reset();
    let mut states = Vec::with_capacity(ctx.len() + 1);
    states.push(State::empty(n));
    for c in ctx.steps() {
        let mut next = State::empty(n);
        engine.step_into(states.last().expect("non-empty"), c, &mut next)?;
        states.push(next);
    }
    Ok(Trajectory::from_states(states))
}

/// Like [`run`] but for exactly `steps` steps, padding the context with
/// empty states or truncating it as needed.
pub fn run_steps<E: Engine + ?Sized>(
    engine: &mut E,
    ctx: &ContextSequence,
    steps: usize,
) -> Result<Trajectory, DimensionError> {
    run(engine, &ctx.resized(steps))
}

/// The engines a caller can ask for by name.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EngineKind {
    Direct,
    Graph,
    Matrix(KernelChoice),
}

impl EngineKind {
    pub fn build(self, sys: &ReactionSystem) -> Box<dyn Engine> {
        match self {
            EngineKind::Direct => Box::new(DirectEngine::compile(sys)),
            EngineKind::Graph => Box::new(GraphEngine::new(sys)),
            EngineKind::Matrix(k) => Box::new(MatrixEngine::new(sys, k)),
        }
    }
}

impl fmt::Display for EngineKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EngineKind::Direct => f.write_str("direct"),
            EngineKind::Graph => f.write_str("graph"),
            EngineKind::Matrix(KernelChoice::Auto) => f.write_str("matrix"),
            EngineKind::Matrix(KernelChoice::Dense) => f.write_str("matrix-dense"),
            EngineKind::Matrix(KernelChoice::Sparse) => f.write_str("matrix-sparse"),
        }
    }
}

impl FromStr for EngineKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "direct" => Ok(EngineKind::Direct),
            "graph" => Ok(EngineKind::Graph),
            "matrix" => Ok(EngineKind::Matrix(KernelChoice::Auto)),
            "matrix-dense" => Ok(EngineKind::Matrix(KernelChoice::Dense)),
            "matrix-sparse" => Ok(EngineKind::Matrix(KernelChoice::Sparse)),
            other => Err(format!(
                "unknown engine `{other}` (expected direct, graph, matrix, matrix-dense or matrix-sparse)"
            )),
        }
    }
}
