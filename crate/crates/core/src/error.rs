use std::fmt;

use thiserror::Error;

/// Which of the three sets of a reaction an error refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Field {
    Reactants,
    Inhibitors,
    Products,
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Field::Reactants => "reactants",
            Field::Inhibitors => "inhibitors",
            Field::Products => "products",
        })
    }
}

/// Violations of reaction-system invariants at construction time.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("reaction {reaction}: {field} set is empty")]
    EmptyField { reaction: usize, field: Field },
    #[error("reaction {reaction}: entity `{entity}` is both a reactant and an inhibitor")]
    Overlap { reaction: usize, entity: String },
    #[error("reaction {reaction}: entity id {id} out of range for {n_entities} entities")]
    EntityOutOfRange {
        reaction: usize,
        id: usize,
        n_entities: usize,
    },
    #[error("duplicate entity name `{0}`")]
    DuplicateName(String),
    #[error("invalid entity name `{0}`")]
    InvalidName(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("dimension mismatch: expected a state of width {expected}, got {found}")]
pub struct DimensionError {
    pub expected: usize,
    pub found: usize,
}

impl DimensionError {
    pub(crate) fn check(expected: usize, found: usize) -> Result<(), DimensionError> {
        if expected == found {
            Ok(())
        } else {
            Err(DimensionError { expected, found })
        }
    }
}
