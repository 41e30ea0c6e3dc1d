//! Approximate Hamilton decompositions of graphs close to two cliques or to a
//! complete balanced bipartite graph.

pub mod assembly;
pub mod classic;
pub mod cyclic;
pub mod error;
pub mod exceptional;
pub mod extension;
pub mod graph;
pub mod pipeline;
pub mod seed;

pub use error::{Error, Result};
