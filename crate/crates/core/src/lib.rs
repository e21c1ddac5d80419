//! Reaction systems simulation.
//!
//! Three interchangeable engines compute the interactive process of a
//! reaction system: [`engine::DirectEngine`] probes every reaction against a
//! bit-vector state, [`engine::GraphEngine`] only tests reactions whose
//! reactants were just produced or injected, and [`engine::MatrixEngine`]
//! evaluates each step as two integer matrix-vector products with clipping.
//! [`system`] holds the reference semantics they are all checked against,
//! and [`oracle`] a second, name-based reference.

pub mod bench;
pub mod cli;
pub mod engine;
pub mod error;
pub mod formats;
pub mod generator;
pub mod oracle;
pub mod state;
pub mod system;

pub use engine::{run, run_steps, Engine, EngineKind};
pub use error::{DimensionError, ModelError};
pub use state::State;
pub use system::{ContextSequence, Reaction, ReactionSystem, Strictness, Trajectory};
