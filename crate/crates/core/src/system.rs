//! Reaction systems and their reference semantics.
//!
//! A reaction `(R, I, P)` is enabled in a state `T` when every reactant is in
//! `T` and no inhibitor is. The result of a system on `T` is the union of the
//! products of all enabled reactions; the interactive process feeds each
//! result back in, unioned with the next context state. The functions here
//! are the plain reference the engines are checked against.

use std::collections::HashSet;

use crate::error::{DimensionError, Field, ModelError};
use crate::state::State;

/// Dense index of an entity in the background set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EntityId(pub usize);

impl EntityId {
    #[inline]
    pub fn index(self) -> usize {
        self.0
    }
}

/// Whether reactions must have a non-empty inhibitor set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Strictness {
    /// Reactants, inhibitors and products all non-empty.
    #[default]
    Strict,
    /// Inhibitor sets may be empty; reactants and products never may.
    AllowEmptyInhibitors,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Reaction {
    reactants: Vec<EntityId>,
    inhibitors: Vec<EntityId>,
    products: Vec<EntityId>,
}

fn canonical<I: IntoIterator<Item = usize>>(ids: I) -> Vec<EntityId> {
    let mut v: Vec<EntityId> = ids.into_iter().map(EntityId).collect();
    v.sort_unstable();
    v.dedup();
    v
}

impl Reaction {
    /// Sets are stored sorted and deduplicated. Invariants are checked when
    /// the reaction is placed into a [`ReactionSystem`].
    pub fn new<R, I, P>(reactants: R, inhibitors: I, products: P) -> Self
    where
        R: IntoIterator<Item = usize>,
        I: IntoIterator<Item = usize>,
        P: IntoIterator<Item = usize>,
    {
        Reaction {
            reactants: canonical(reactants),
            inhibitors: canonical(inhibitors),
            products: canonical(products),
        }
    }

    pub fn reactants(&self) -> &[EntityId] {
        &self.reactants
    }

    pub fn inhibitors(&self) -> &[EntityId] {
        &self.inhibitors
    }

    pub fn products(&self) -> &[EntityId] {
        &self.products
    }
}

/// Checks the lexical rules for entity names: non-empty, no whitespace,
/// no `,` or `#`, and not the lone `.` reserved for the empty set in text
/// formats.
pub fn is_valid_entity_name(name: &str) -> bool {
    !name.is_empty()
        && name != "."
        && !name
            .chars()
            .any(|c| c.is_whitespace() || c == ',' || c == '#')
}

/// A background set of named entities together with an ordered list of
/// reactions over it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReactionSystem {
    entity_names: Vec<String>,
    reactions: Vec<Reaction>,
}

impl ReactionSystem {
    pub fn new(
        entity_names: Vec<String>,
        reactions: Vec<Reaction>,
        mode: Strictness,
    ) -> Result<Self, ModelError> {
        let mut seen = HashSet::with_capacity(entity_names.len());
        for name in &entity_names {
            if !is_valid_entity_name(name) {
                return Err(ModelError::InvalidName(name.clone()));
            }
            if !seen.insert(name.as_str()) {
                return Err(ModelError::DuplicateName(name.clone()));
            }
        }
        let n = entity_names.len();
        for (idx, r) in reactions.iter().enumerate() {
            for (field, set) in [
                (Field::Reactants, &r.reactants),
                (Field::Inhibitors, &r.inhibitors),
                (Field::Products, &r.products),
            ] {
                if let Some(id) = set.iter().find(|e| e.0 >= n) {
                    return Err(ModelError::EntityOutOfRange {
                        reaction: idx,
                        id: id.0,
                        n_entities: n,
                    });
                }
                let may_be_empty =
                    field == Field::Inhibitors && mode == Strictness::AllowEmptyInhibitors;
                if set.is_empty() && !may_be_empty {
                    return Err(ModelError::EmptyField {
                        reaction: idx,
                        field,
                    });
                }
            }
            // both sorted: merge-style intersection
            let (mut a, mut b) = (0, 0);
            while a < r.reactants.len() && b < r.inhibitors.len() {
                match r.reactants[a].cmp(&r.inhibitors[b]) {
                    std::cmp::Ordering::Less => a += 1,
                    std::cmp::Ordering::Greater => b += 1,
                    std::cmp::Ordering::Equal => {
                        return Err(ModelError::Overlap {
                            reaction: idx,
                            entity: entity_names[r.reactants[a].0].clone(),
                        })
                    }
                }
            }
        }
        Ok(ReactionSystem {
            entity_names,
            reactions,
        })
    }

    pub fn n_entities(&self) -> usize {
        self.entity_names.len()
    }

    pub fn n_reactions(&self) -> usize {
        self.reactions.len()
    }

    pub fn entity_names(&self) -> &[String] {
        &self.entity_names
    }

    pub fn entity_name(&self, id: EntityId) -> &str {
        &self.entity_names[id.0]
    }

    pub fn entity_id(&self, name: &str) -> Option<EntityId> {
        self.entity_names.iter().position(|n| n == name).map(EntityId)
    }

    pub fn reactions(&self) -> &[Reaction] {
        &self.reactions
    }

    pub fn empty_state(&self) -> State {
        State::empty(self.n_entities())
    }

    /// Builds a state from entity names. Unknown names are returned as `Err`.
    pub fn state_of<'a, I: IntoIterator<Item = &'a str>>(&self, names: I) -> Result<State, String> {
        let mut s = self.empty_state();
        for name in names {
            match self.entity_id(name) {
                Some(id) => s.insert(id.0),
                None => return Err(name.to_string()),
            }
        }
        Ok(s)
    }

    /// Union of all product sets; no result can leave this set.
    pub fn product_support(&self) -> State {
        State::from_indices(
            self.n_entities(),
            self.reactions
                .iter()
                .flat_map(|r| r.products.iter().map(|e| e.0)),
        )
    }

    /// The worked example system over `a, b, c, d` with
    /// `r1 = ({a,b},{c},{a,b})`, `r2 = ({a},{b,c},{d})`, `r3 = ({d},{c},{b})`.
    pub fn example() -> Self {
        let names = ["a", "b", "c", "d"].map(String::from).to_vec();
        let reactions = vec![
            Reaction::new([0, 1], [2], [0, 1]),
            Reaction::new([0], [1, 2], [3]),
            Reaction::new([3], [2], [1]),
        ];
        ReactionSystem::new(names, reactions, Strictness::Strict)
            .expect("example system is valid")
    }
}

/// Reactants all present and inhibitors all absent.
pub fn enabled(r: &Reaction, t: &State) -> bool {
    r.reactants.iter().all(|e| t.contains(e.0)) && !r.inhibitors.iter().any(|e| t.contains(e.0))
}

/// Union of the products of every reaction enabled in `t`.
pub fn result(sys: &ReactionSystem, t: &State) -> State {
    let mut out = sys.empty_state();
    for r in sys.reactions.iter().filter(|r| enabled(r, t)) {
        for p in &r.products {
            out.insert(p.0);
        }
    }
    out
}

/// One step of the interactive process: `result(d ∪ c)`.
pub fn step(sys: &ReactionSystem, d: &State, c: &State) -> Result<State, DimensionError> {
    DimensionError::check(sys.n_entities(), d.len())?;
    DimensionError::check(sys.n_entities(), c.len())?;
    Ok(result(sys, &d.union(c)))
}

/// Per-step context states `C_0 .. C_{n-1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContextSequence {
    n_entities: usize,
    steps: Vec<State>,
}

impl ContextSequence {
    pub fn new(n_entities: usize, steps: Vec<State>) -> Result<Self, DimensionError> {
        for s in &steps {
            DimensionError::check(n_entities, s.len())?;
        }
        Ok(ContextSequence { n_entities, steps })
    }

    pub fn empty(n_entities: usize) -> Self {
        ContextSequence {
            n_entities,
            steps: Vec::new(),
        }
    }

    pub fn n_entities(&self) -> usize {
        self.n_entities
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn steps(&self) -> &[State] {
        &self.steps
    }

    /// Truncates to `steps` entries or pads with empty contexts up to it.
    pub fn resized(&self, steps: usize) -> ContextSequence {
        let mut v: Vec<State> = self.steps.iter().take(steps).cloned().collect();
        v.resize(steps, State::empty(self.n_entities));
        ContextSequence {
            n_entities: self.n_entities,
            steps: v,
        }
    }
}

/// States `D_0 .. D_n` of an interactive process, `D_0` always empty.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trajectory {
    states: Vec<State>,
}

impl Trajectory {
    pub(crate) fn from_states(states: Vec<State>) -> Self {
        debug_assert!(states.first().is_some_and(State::is_empty));
        Trajectory { states }
    }

    pub fn states(&self) -> &[State] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// Index of the first state where the two trajectories differ, counting a
    /// length difference as a divergence at the shorter length.
    pub fn first_divergence(&self, other: &Trajectory) -> Option<usize> {
        self.states
            .iter()
            .zip(&other.states)
            .position(|(a, b)| a != b)
            .or_else(|| (self.len() != other.len()).then(|| self.len().min(other.len())))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn st(sys: &ReactionSystem, names: &[&str]) -> State {
        sys.state_of(names.iter().copied()).unwrap()
    }

    #[test]
    fn enabled_example_cases() {
        let sys = ReactionSystem::example();
        let r = sys.reactions();
        assert!(enabled(&r[2], &st(&sys, &["b", "d"])));
        assert!(!enabled(&r[0], &st(&sys, &["b"])));
        for x in r {
            assert!(!enabled(x, &sys.empty_state()));
        }
    }

    #[test]
    fn result_example_orbit() {
        let sys = ReactionSystem::example();
        let t = st(&sys, &["b", "d"]);
        let t1 = result(&sys, &t);
        assert_eq!(t1, st(&sys, &["b"]));
        assert!(result(&sys, &t1).is_empty());
        assert!(result(&sys, &sys.empty_state()).is_empty());
    }

    #[test]
    fn step_is_symmetric_in_union() {
        let sys = ReactionSystem::example();
        let bd = st(&sys, &["b", "d"]);
        let e = sys.empty_state();
        assert_eq!(step(&sys, &bd, &e).unwrap(), st(&sys, &["b"]));
        assert_eq!(step(&sys, &e, &bd).unwrap(), st(&sys, &["b"]));
    }

    #[test]
    fn step_rejects_wrong_width() {
        let sys = ReactionSystem::example();
        let err = step(&sys, &State::empty(3), &sys.empty_state()).unwrap_err();
        assert_eq!(err, DimensionError { expected: 4, found: 3 });
    }

    #[test]
    fn construction_errors() {
        let names = || vec!["x".to_string(), "y".to_string()];
        let strict = Strictness::Strict;
        let overlap = ReactionSystem::new(names(), vec![Reaction::new([0], [0], [1])], strict);
        assert_eq!(
            overlap.unwrap_err(),
            ModelError::Overlap { reaction: 0, entity: "x".into() }
        );
        let no_inh = vec![Reaction::new([0], [], [1])];
        assert_eq!(
            ReactionSystem::new(names(), no_inh.clone(), strict).unwrap_err(),
            ModelError::EmptyField { reaction: 0, field: Field::Inhibitors }
        );
        assert!(ReactionSystem::new(names(), no_inh, Strictness::AllowEmptyInhibitors).is_ok());
        let no_react = vec![Reaction::new([], [], [1])];
        assert_eq!(
            ReactionSystem::new(names(), no_react, Strictness::AllowEmptyInhibitors).unwrap_err(),
            ModelError::EmptyField { reaction: 0, field: Field::Reactants }
        );
        let oob = vec![Reaction::new([0], [1], [2])];
        assert!(matches!(
            ReactionSystem::new(names(), oob, strict),
            Err(ModelError::EntityOutOfRange { id: 2, .. })
        ));
        let dup = vec!["x".to_string(), "x".to_string()];
        assert_eq!(
            ReactionSystem::new(dup, vec![], strict).unwrap_err(),
            ModelError::DuplicateName("x".into())
        );
        for bad in ["", ".", "a b", "a,b", "a#"] {
            assert!(ReactionSystem::new(vec![bad.to_string()], vec![], strict).is_err());
        }
    }

    #[test]
    fn resized_pads_and_truncates() {
        let ctx = ContextSequence::new(2, vec![State::full(2), State::full(2)]).unwrap();
        assert_eq!(ctx.resized(1).len(), 1);
        let padded = ctx.resized(4);
        assert_eq!(padded.len(), 4);
        assert!(padded.steps()[3].is_empty());
        assert!(ContextSequence::new(2, vec![State::empty(3)]).is_err());
    }

    fn arb_case() -> impl Strategy<Value = (usize, Vec<(Vec<usize>, Vec<usize>, Vec<usize>)>, Vec<bool>)> {
        (2usize..40).prop_flat_map(|n| {
            let set = proptest::collection::vec(0..n, 0..6);
            (
                Just(n),
                proptest::collection::vec((set.clone(), set.clone(), set), 1..20),
                proptest::collection::vec(any::<bool>(), n),
            )
        })
    }

    proptest! {
        // enabled ⟺ (R ∧ ¬t) = 0 ∧ (I ∧ t) = 0, against a HashSet membership check.
        #[test]
        fn enabled_matches_mask_and_set_forms((n, rs, bits) in arb_case()) {
            let t = State::from_bools(&bits);
            let members: HashSet<usize> = t.ones().collect();
            for (r, i, p) in rs {
                let i: Vec<usize> = i.into_iter().filter(|x| !r.contains(x)).collect();
                let reaction = Reaction::new(r.clone(), i.clone(), p);
                let naive = r.iter().all(|x| members.contains(x))
                    && i.iter().all(|x| !members.contains(x));
                let rm = State::from_indices(n, r);
                let im = State::from_indices(n, i);
                let mask = rm.is_subset(&t) && im.is_disjoint(&t);
                prop_assert_eq!(enabled(&reaction, &t), naive);
                prop_assert_eq!(naive, mask);
            }
        }

        #[test]
        fn result_within_product_support((n, rs, bits) in arb_case()) {
            let reactions: Vec<Reaction> = rs
                .into_iter()
                .map(|(mut r, i, mut p)| {
                    r.push(0);
                    p.push(n - 1);
                    let i: Vec<usize> = i.into_iter().filter(|x| !r.contains(x)).collect();
                    Reaction::new(r, i, p)
                })
                .collect();
            let names = (0..n).map(|i| format!("e{i}")).collect();
            let sys = ReactionSystem::new(names, reactions, Strictness::AllowEmptyInhibitors).unwrap();
            let out = result(&sys, &State::from_bools(&bits));
            prop_assert!(out.is_subset(&sys.product_support()));
        }
    }
}
