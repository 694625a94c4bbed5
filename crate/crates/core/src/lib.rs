//! Synchronizing automata with a sink state.
//!
//! Constructions of slowly synchronizing families, exact reset thresholds
//! with witness words, the tail-append operator, and an extremal search over
//! binary almost-permutation automata.

pub mod automaton;
pub mod cli;
pub mod constructions;
pub mod error;
pub mod experiments;
pub mod format;
pub mod search;
pub mod solver;

mod pairs;

pub use automaton::{ApProfile, Dfa, SinkStatus, StateSet, Word};
pub use error::{Error, Result};
pub use solver::{RtResult, SolveError, SolverLimits};
