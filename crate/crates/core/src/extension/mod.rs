//! Balanced extensions of ordered directed matchings.

mod bipartite;
mod cliques;
mod validate;

use serde::{Deserialize, Serialize};

use crate::graph::{Digraph, OrderedDirectedMatching, PathSequence};

pub use bipartite::balance_extend_bipartite;
pub use cliques::balance_extend_cliques;
pub use validate::{validate_balanced_extension, ExtensionReport};

/// Path sequences `PS_s` extending ordered matchings `M_s`, with `PS_s` a
/// `V_{i_s}`-extension of `M_s`.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct BalancedExtension {
    pub sequences: Vec<PathSequence>,
    pub matchings: Vec<OrderedDirectedMatching>,
    pub extension_clusters: Vec<usize>,
    /// Exceptional system each sequence came from.
    pub systems: Vec<usize>,
}

impl BalancedExtension {
    pub fn len(&self) -> usize {
        self.sequences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sequences.is_empty()
    }

    fn push(&mut self, ps: PathSequence, m: OrderedDirectedMatching, cluster: usize, system: usize) {
        self.sequences.push(ps);
        self.matchings.push(m);
        self.extension_clusters.push(cluster);
        self.systems.push(system);
    }
}

/// The reservoir orientation together with the extension built from it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtensionOutcome {
    pub oriented: Digraph,
    pub extension: BalancedExtension,
}

/// Orients every edge of `h` not already present in `used` (in either
/// direction) from the lower to the higher id.
fn orient_rest(h: &crate::graph::Multigraph, used: &Digraph) -> Digraph {
    let mut out = used.clone();
    for (u, v, _) in h.edges() {
        let (lo, hi) = (u.min(v), u.max(v));
        if !used.has_arc(lo, hi) && !used.has_arc(hi, lo) {
            out.add_arc(lo, hi).expect("distinct endpoints");
        }
    }
    out
}
