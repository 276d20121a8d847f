pub mod bitset;
pub mod burn;
pub mod drunk;
pub mod error;
pub mod experiments;
pub mod generators;
pub mod graph;
pub mod predict;
pub mod rng;
pub mod solver;
pub mod stats;
pub mod strategies;

pub use error::{Error, Result};
pub use graph::{Graph, Hops};
