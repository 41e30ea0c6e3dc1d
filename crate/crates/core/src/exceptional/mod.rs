//! Exceptional systems, their fictive-edge reductions and the splice back.

mod fictive;
mod record;
mod splice;
mod system;

pub use fictive::{
    build_fictive_bipartite, build_fictive_two_cliques, induce_jab, BipartiteReduction,
    CliqueReduction,
};
pub use record::{RecordKind, SystemRecord};
pub use splice::{splice_bipartite, splice_two_cliques, split_into_matchings};
pub use system::{path_ends, BalancedExceptionalSystem, ExceptionalSystem, SystemKind};
