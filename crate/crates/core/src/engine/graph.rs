//! Direct simulation with dependency-based pruning.
//!
//! Only reactions that have at least one reactant among the entities just
//! produced, or injected by the current context, can become enabled. The
//! engine keeps a candidate bit per reaction and tests only those.
//!
//! Candidates are marked through a per-entity index of consuming reactions.
//! The reaction-level [`DependencyGraph`] (edge `i -> j` when the products of
//! `i` meet the reactants of `j`) describes the same relation and is kept for
//! inspection.

use std::io::{self, Write};

use crate::error::DimensionError;
use crate::state::State;
use crate::system::ReactionSystem;

use super::{DirectEngine, Engine};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DependencyGraph {
    edges: Vec<Vec<usize>>,
}

impl DependencyGraph {
    pub fn build(sys: &ReactionSystem) -> Self {
        let idx = EntityReactionIndex::build(sys);
        let mut seen = State::empty(sys.n_reactions());
        let edges = sys
            .reactions()
            .iter()
            .map(|r| {
                seen.clear();
                for p in r.products() {
                    for &j in idx.consumers(p.index()) {
                        seen.insert(j);
                    }
                }
                seen.ones().collect()
            })
            .collect();
        DependencyGraph { edges }
    }

    /// Sorted successors of reaction `i`.
    pub fn successors(&self, i: usize) -> &[usize] {
        &self.edges[i]
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges
            .iter()
            .enumerate()
            .flat_map(|(i, js)| js.iter().map(move |&j| (i, j)))
    }

    pub fn n_edges(&self) -> usize {
        self.edges.iter().map(Vec::len).sum()
    }
}

/// For each entity, the ascending list of reactions having it as a reactant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EntityReactionIndex {
    by_entity: Vec<Vec<usize>>,
}

impl EntityReactionIndex {
    pub fn build(sys: &ReactionSystem) -> Self {
        let mut by_entity = vec![Vec::new(); sys.n_entities()];
        for (j, r) in sys.reactions().iter().enumerate() {
            for e in r.reactants() {
                by_entity[e.index()].push(j);
            }
        }
        EntityReactionIndex { by_entity }
    }

    pub fn consumers(&self, entity: usize) -> &[usize] {
        &self.by_entity[entity]
    }
}

/// Per-step work counters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StepStats {
    pub step: usize,
    /// Reactions tested for enabledness (popcount of the candidate set).
    pub candidates: usize,
    pub fired: usize,
}

#[derive(Debug, Clone)]
pub struct GraphEngine {
    inner: DirectEngine,
    dep: DependencyGraph,
    idx: EntityReactionIndex,
    candidates: State,
    // output of the previous call; candidates are only valid if the next
    // call continues from it
    last_output: State,
    primed: bool,
    scratch: State,
    steps_taken: usize,
    trace: Option<Vec<StepStats>>,
    audit: bool,
    violations: usize,
}

impl GraphEngine {
    pub fn new(sys: &ReactionSystem) -> Self {
        let inner = DirectEngine::compile(sys);
        let n = sys.n_entities();
        GraphEngine {
            dep: DependencyGraph::build(sys),
            idx: EntityReactionIndex::build(sys),
            candidates: State::full(inner.n_reactions()),
            inner,
            last_output: State::empty(n),
            primed: false,
            scratch: State::empty(n),
            steps_taken: 0,
            trace: None,
            audit: false,
            violations: 0,
        }
    }

    /// Records a [`StepStats`] entry per step.
    pub fn with_trace(mut self) -> Self {
        self.trace = Some(Vec::new());
        self
    }

    /// Checks every step that each enabled reaction was a candidate, counting
    /// misses in [`GraphEngine::violations`]. Costs a full scan per step.
    pub fn with_audit(mut self) -> Self {
        self.audit = true;
        self
    }

    pub fn dependency_graph(&self) -> &DependencyGraph {
        &self.dep
    }

    pub fn entity_index(&self) -> &EntityReactionIndex {
        &self.idx
    }

    /// Reactions that will be tested by the next step, before the next
    /// context is folded in.
    pub fn candidates(&self) -> &State {
        &self.candidates
    }

    pub fn trace(&self) -> &[StepStats] {
        self.trace.as_deref().unwrap_or(&[])
    }

    pub fn violations(&self) -> usize {
        self.violations
    }

    fn mark_consumers(&mut self, entities: &State) {
        for e in entities.ones() {
            for &j in &self.idx.by_entity[e] {
                self.candidates.insert(j);
            }
        }
    }

    /// Writes the trace as `step,candidates,fired` CSV.
    pub fn write_trace_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "step,candidates,fired")?;
        for s in self.trace() {
            writeln!(w, "{},{},{}", s.step, s.candidates, s.fired)?;
        }
        Ok(())
    }
}

impl Engine for GraphEngine {
    fn label(&self) -> &'static str {
        "graph"
    }

    fn n_entities(&self) -> usize {
        self.inner.n_entities()
    }

    fn reset(&mut self) {
        self.candidates.fill();
        self.primed = false;
        self.steps_taken = 0;
        self.violations = 0;
        if let Some(t) = self.trace.as_mut() {
            t.clear();
        }
    }

    fn step_into(&mut self, d: &State, c: &State, out: &mut State) -> Result<(), DimensionError> {
        let n = self.inner.n_entities();
        DimensionError::check(n, d.len())?;
        DimensionError::check(n, c.len())?;
        DimensionError::check(n, out.len())?;

        if self.primed && *d == self.last_output {
            self.mark_consumers(c);
        } else {
            self.candidates.fill();
        }

        let mut t = std::mem::take(&mut self.scratch);
        t.assign_union(d, c);

        if self.audit {
            let missed = self
                .inner
                .compiled()
                .iter()
                .enumerate()
                .filter(|&(j, r)| r.is_enabled(&t) && !self.candidates.contains(j))
                .count();
            self.violations += missed;
        }

        out.clear();
        let mut tested = 0;
        let mut fired = 0;
        for j in self.candidates.ones() {
            tested += 1;
            if self.inner.is_enabled(j, &t) {
                fired += 1;
                self.inner.fire(j, out);
            }
        }
        self.scratch = t;

        if let Some(trace) = self.trace.as_mut() {
            trace.push(StepStats {
                step: self.steps_taken,
                candidates: tested,
                fired,
            });
        }
        self.steps_taken += 1;

        self.candidates.clear();
        self.mark_consumers(out);
        self.last_output.clone_from(out);
        self.primed = true;
        Ok(())
    }
}
