//! Supports for cross-free hypergraph systems embedded on surfaces.

pub mod bypass;
pub mod chords;
pub mod embedding;
pub mod error;
pub mod fixtures;
pub mod par;
pub mod regions;
pub mod solver;
pub mod supports;
pub mod system;
pub mod verify;

pub use embedding::{DartId, EdgeId, EmbeddedGraph, VertexId};
pub use error::{ContractViolation, Error, Result};
pub use par::Execution;
pub use system::{Color, FamilyKind, GraphSystem, Scope};
