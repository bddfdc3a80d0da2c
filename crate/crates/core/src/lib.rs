//! Quantum walk of a colored particle coupled to Ising spins on small graphs,
//! with minimum cycle bases and entanglement entropies.

pub mod cycles;
pub mod error;
pub mod evolution;
pub mod graph;
pub mod hilbert;
pub mod observables;
pub mod runner;

pub use error::{Error, Result};
