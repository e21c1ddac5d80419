//! Naive set-theoretic reference for cross-checking the engines.
//!
//! States here are sets of entity names and reactions are triples of name
//! sets. Nothing in this module touches bit vectors or entity indices except
//! the two conversion helpers at the boundary.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::state::State;
use crate::system::ReactionSystem;

pub type NaiveState = BTreeSet<String>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown entity `{0}`")]
pub struct UnknownEntity(pub String);

#[derive(Debug, Clone)]
pub struct NaiveReaction {
    pub reactants: NaiveState,
    pub inhibitors: NaiveState,
    pub products: NaiveState,
}

#[derive(Debug, Clone)]
pub struct NaiveSystem {
    pub entities: NaiveState,
    pub reactions: Vec<NaiveReaction>,
}

impl NaiveSystem {
    pub fn from_system(sys: &ReactionSystem) -> Self {
        let names = |ids: &[crate::system::EntityId]| -> NaiveState {
            ids.iter().map(|&e| sys.entity_name(e).to_string()).collect()
        };
        NaiveSystem {
            entities: sys.entity_names().iter().cloned().collect(),
            reactions: sys
                .reactions()
                .iter()
                .map(|r| NaiveReaction {
                    reactants: names(r.reactants()),
                    inhibitors: names(r.inhibitors()),
                    products: names(r.products()),
                })
                .collect(),
        }
    }

    fn check(&self, s: &NaiveState) -> Result<(), UnknownEntity> {
        match s.iter().find(|n| !self.entities.contains(*n)) {
            Some(n) => Err(UnknownEntity(n.clone())),
            None => Ok(()),
        }
    }

    /// `res(t ∪ c)` by literal subset and disjointness tests.
    pub fn step(&self, t: &NaiveState, c: &NaiveState) -> Result<NaiveState, UnknownEntity> {
        self.check(t)?;
        self.check(c)?;
        let present: NaiveState = t.union(c).cloned().collect();
        let mut out = NaiveState::new();
        for r in &self.reactions {
            if r.reactants.is_subset(&present) && r.inhibitors.is_disjoint(&present) {
                out.extend(r.products.iter().cloned());
            }
        }
        Ok(out)
    }

    /// `D_0 = ∅` followed by one state per context entry.
    pub fn run(&self, ctx: &[NaiveState]) -> Result<Vec<NaiveState>, UnknownEntity> {
        let mut out = vec![NaiveState::new()];
        for c in ctx {
            let next = self.step(out.last().expect("non-empty"), c)?;
            out.push(next);
        }
        Ok(out)
    }
}

pub fn to_naive(sys: &ReactionSystem, s: &State) -> NaiveState {
    sys.entity_names()
        .iter()
        .enumerate()
        .filter(|&(i, _)| s.contains(i))
        .map(|(_, n)| n.clone())
        .collect()
}

pub fn naive_set<const N: usize>(names: [&str; N]) -> NaiveState {
    names.iter().map(|s| s.to_string()).collect()
}
