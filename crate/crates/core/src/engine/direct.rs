//! Direct simulation over bit-vector states.
//!
//! Each reaction is compiled into three ascending index vectors. A step forms
//! `t = d | c`, probes reactant bits then inhibitor bits of every reaction
//! (stopping at the first miss), and ORs the product indices of the enabled
//! ones into the output.

use crate::error::DimensionError;
use crate::state::State;
use crate::system::ReactionSystem;

use super::Engine;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompiledReaction {
    pub reactants: Vec<u32>,
    pub inhibitors: Vec<u32>,
    pub products: Vec<u32>,
}

impl CompiledReaction {
    #[inline]
    pub fn is_enabled(&self, t: &State) -> bool {
        self.reactants.iter().all(|&e| t.contains(e as usize))
            && self.inhibitors.iter().all(|&e| !t.contains(e as usize))
    }
}

#[derive(Debug, Clone)]
pub struct DirectEngine {
    compiled: Vec<CompiledReaction>,
    n_entities: usize,
    scratch: State,
}

fn indices(ids: &[crate::system::EntityId]) -> Vec<u32> {
    // EntityId sets are kept sorted by Reaction::new
    ids.iter()
        .map(|e| u32::try_from(e.index()).expect("entity index fits in u32"))
        .collect()
}

impl DirectEngine {
    pub fn compile(sys: &ReactionSystem) -> Self {
        let compiled = sys
            .reactions()
            .iter()
            .map(|r| CompiledReaction {
                reactants: indices(r.reactants()),
                inhibitors: indices(r.inhibitors()),
                products: indices(r.products()),
            })
            .collect();
        DirectEngine {
            compiled,
            n_entities: sys.n_entities(),
            scratch: State::empty(sys.n_entities()),
        }
    }

    pub fn compiled(&self) -> &[CompiledReaction] {
        &self.compiled
    }

    pub fn n_reactions(&self) -> usize {
        self.compiled.len()
    }

    /// Enabledness of reaction `j` in an already-unioned state.
    #[inline]
    pub fn is_enabled(&self, j: usize, t: &State) -> bool {
        self.compiled[j].is_enabled(t)
    }

    /// Enabled-reaction vector for `t`, one bit per reaction.
    pub fn enabled_set(&self, t: &State) -> State {
        State::from_indices(
            self.compiled.len(),
            (0..self.compiled.len()).filter(|&j| self.is_enabled(j, t)),
        )
    }

    #[inline]
    pub(crate) fn fire(&self, j: usize, out: &mut State) {
        for &p in &self.compiled[j].products {
            out.insert(p as usize);
        }
    }

    /// `res(t)` for a state that already includes the context.
    pub fn result_into(&self, t: &State, out: &mut State) {
        out.clear();
        for r in &self.compiled {
            if r.is_enabled(t) {
                for &p in &r.products {
                    out.insert(p as usize);
                }
            }
        }
    }
}

impl Engine for DirectEngine {
    fn label(&self) -> &'static str {
        "direct"
    }

    fn n_entities(&self) -> usize {
        self.n_entities
    }

    fn step_into(&mut self, d: &State, c: &State, out: &mut State) -> Result<(), DimensionError> {
        DimensionError::check(self.n_entities, d.len())?;
        DimensionError::check(self.n_entities, c.len())?;
        DimensionError::check(self.n_entities, out.len())?;
        let mut t = std::mem::take(&mut self.scratch);
        t.assign_union(d, c);
        self.result_into(&t, out);
        self.scratch = t;
        Ok(())
    }
}
