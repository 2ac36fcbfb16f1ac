//! Implication, Armstrong relations and non-interaction for functional
//! dependencies, inclusion dependencies and independence atoms.

pub mod armstrong;
pub mod axioms;
pub mod chase;
pub mod cli;
pub mod engine;
pub mod error;
pub mod model;
pub mod noninteract;
pub mod parser;
pub mod polyengine;
pub mod profiler;
pub mod semantics;
pub mod verdict;

pub use error::{Error, Result};
pub use model::{AttrId, AttrSet, DatabaseSchema, Dependency, DependencySet, Mode, RelId};
