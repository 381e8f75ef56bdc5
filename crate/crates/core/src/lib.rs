//! Conditional collision entropies, 2-design measurement families and the
//! entanglement–uncertainty relations built on them.

pub mod designs;
pub mod entropies;
pub mod error;
pub mod game;
pub mod linops;
pub mod relations;
pub mod states;

pub use designs::{Effect, FamilyKind, MeasurementFamily};
pub use error::{Error, Result};
pub use game::{simulate_game, GameResult};
pub use linops::{ComplexMatrix, StateVector, DEFAULT_RANK_TOL};
pub use relations::{RelationReport, Verdict};
pub use states::{DensityMatrix, SeedSpec};
