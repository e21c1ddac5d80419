//! Synthetic `|S| x |A| x alpha` reaction systems and random contexts.
//!
//! For each reaction the reactant, inhibitor and product counts are drawn
//! from `Binomial(|S|, alpha)` and then repaired into a valid reaction:
//! every count is raised to at least 1, reactants are capped at `|S| - 1` so
//! an inhibitor always fits, and inhibitors are capped at `|S| - r`.
//! Reactants and products are sampled uniformly without replacement from
//! `S`, inhibitors from `S \ R`.
//!
//! Randomness comes from ChaCha8 seeded with `seed`; the system uses stream 0
//! and the context stream 1, so either can be regenerated independently.

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use thiserror::Error;

use crate::state::State;
use crate::system::{ContextSequence, Reaction, ReactionSystem, Strictness};

const SYSTEM_STREAM: u64 = 0;
const CONTEXT_STREAM: u64 = 1;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GenError {
    #[error("need at least 2 entities so reactants and inhibitors can be disjoint, got {0}")]
    TooFewEntities(usize),
    #[error("need at least 1 reaction")]
    NoReactions,
    #[error("alpha must lie in [0, 1], got {0}")]
    Alpha(f64),
    #[error("context inclusion probability must lie in [0, 1], got {0}")]
    Density(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct GenSpec {
    pub n_entities: usize,
    pub n_reactions: usize,
    pub alpha: f64,
    pub seed: u64,
    pub ctx_steps: usize,
    /// Per-entity inclusion probability for context states; 0.5 makes every
    /// subset of `S` equally likely.
    pub ctx_density: f64,
}

impl GenSpec {
    pub fn new(n_entities: usize, n_reactions: usize, alpha: f64, seed: u64) -> Self {
        GenSpec {
            n_entities,
            n_reactions,
            alpha,
            seed,
            ctx_steps: 0,
            ctx_density: 0.5,
        }
    }

    pub fn with_ctx_steps(mut self, steps: usize) -> Self {
        self.ctx_steps = steps;
        self
    }

    pub fn with_ctx_density(mut self, p: f64) -> Self {
        self.ctx_density = p;
        self
    }

    pub fn validate(&self) -> Result<(), GenError> {
        if self.n_entities < 2 {
            return Err(GenError::TooFewEntities(self.n_entities));
        }
        if self.n_reactions < 1 {
            return Err(GenError::NoReactions);
        }
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(GenError::Alpha(self.alpha));
        }
        if !(0.0..=1.0).contains(&self.ctx_density) {
            return Err(GenError::Density(self.ctx_density));
        }
        Ok(())
    }

    pub fn label(&self) -> String {
        crate::formats::size_label(self.n_entities, self.n_reactions, self.alpha)
    }

    fn rng(&self, stream: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(stream);
        rng
    }
}

/// Reactant, inhibitor and product counts after repair, given raw draws.
pub fn repair_sizes(n_entities: usize, r: usize, i: usize, p: usize) -> (usize, usize, usize) {
    let r = r.clamp(1, n_entities - 1);
    let i = i.max(1).min(n_entities - r);
    let p = p.max(1);
    (r, i, p)
}

pub fn generate_system(spec: &GenSpec) -> Result<ReactionSystem, GenError> {
    spec.validate()?;
    let n = spec.n_entities;
    let mut rng = spec.rng(SYSTEM_STREAM);
    let sizes = Binomial::new(n as u64, spec.alpha).map_err(|_| GenError::Alpha(spec.alpha))?;

    let mut reactions = Vec::with_capacity(spec.n_reactions);
    let mut in_reactants = vec![false; n];
    let mut pool = Vec::with_capacity(n);
    for _ in 0..spec.n_reactions {
        let r = sizes.sample(&mut rng) as usize;
        let i = sizes.sample(&mut rng) as usize;
        let p = sizes.sample(&mut rng) as usize;
        let (r, i, p) = repair_sizes(n, r, i, p);

        let reactants = index::sample(&mut rng, n, r).into_vec();
        for &e in &reactants {
            in_reactants[e] = true;
        }
        pool.clear();
        pool.extend((0..n).filter(|&e| !in_reactants[e]));
        let inhibitors: Vec<usize> = index::sample(&mut rng, pool.len(), i)
            .into_iter()
            .map(|k| pool[k])
            .collect();
        for &e in &reactants {
            in_reactants[e] = false;
        }
        let products = index::sample(&mut rng, n, p).into_vec();
        reactions.push(Reaction::new(reactants, inhibitors, products));
    }

    let names = (0..n).map(|k| format!("e{k}")).collect();
    Ok(ReactionSystem::new(names, reactions, Strictness::Strict)
        .expect("generated reactions are valid by construction"))
}

pub fn generate_context(spec: &GenSpec) -> ContextSequence {
    let mut rng = spec.rng(CONTEXT_STREAM);
    let n = spec.n_entities;
    let p = spec.ctx_density.clamp(0.0, 1.0);
    let steps = (0..spec.ctx_steps)
        .map(|_| State::from_indices(n, (0..n).filter(|_| rng.random_bool(p))))
        .collect();
    ContextSequence::new(n, steps).expect("context built at system width")
}
