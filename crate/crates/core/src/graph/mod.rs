//! Graph containers, cluster partitions and the structural predicates.

mod digraph;
mod dot;
mod multigraph;
mod partition;
mod paths;
mod predicates;

pub use digraph::Digraph;
pub use dot::{digraph_to_dot, multigraph_to_dot};
pub use multigraph::{multigraph_minus, multigraph_sum, Multigraph};
pub use partition::{ClusterCycle, ClusterPartition, PartitionMode, Side};
pub use paths::{OrderedDirectedMatching, PathSequence, PathSystem};
pub use predicates::{
    is_consistent_with, is_locally_balanced, verify_hamilton_cycle, winds_around, HamiltonCheck,
};
