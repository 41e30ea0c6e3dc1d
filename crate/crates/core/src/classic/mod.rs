//! Classical decomposition primitives.

mod euler;
mod flow;
mod matching;
mod walecki;

pub use euler::{regular_bipartite_to_matchings, split_regular};
pub use flow::{degree_target, regular_spanning_subgraph, regular_subgraph, FlowNetwork};
pub use matching::{hall_violator, hopcroft_karp, perfect_matching, perfect_matching_between};
pub use walecki::{bipartite_hamilton_decompose, walecki_decompose};
