use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{winds_around, ClusterCycle, ClusterPartition, Digraph, PartitionMode};

/// A blown-up Hamilton cycle: `graph` winds around `cycle` on the
/// equipartition `partition`, with near-uniform degrees into the next cluster.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CyclicSystem {
    graph: Digraph,
    partition: ClusterPartition,
    cycle: ClusterCycle,
    mu: f64,
    eps: f64,
}

impl CyclicSystem {
    pub fn new(
        graph: Digraph,
        partition: ClusterPartition,
        cycle: ClusterCycle,
        mu: f64,
        eps: f64,
    ) -> Result<Self> {
        let s = CyclicSystem {
            graph,
            partition,
            cycle,
            mu,
            eps,
        };
        s.validate()?;
        Ok(s)
    }

    /// Inclusive bounds of `(1 - mu +- eps) m`.
    pub fn degree_window(&self) -> (usize, usize) {
        degree_window(self.partition.m(), self.mu, self.eps)
    }

    pub fn validate(&self) -> Result<()> {
        let p = &self.partition;
        if p.mode() != PartitionMode::Plain {
            return Err(Error::MalformedInput(
                "a cyclic system lives on a plain equipartition".into(),
            ));
        }
        if p.n() != self.graph.vertex_count() {
            return Err(Error::MalformedInput(format!(
                "partition covers 0..{} but the digraph has {} vertices",
                p.n(),
                self.graph.vertex_count()
            )));
        }
        for v in self.graph.touched() {
            if p.cluster_of(v).is_none() {
                return Err(Error::MalformedInput(format!(
                    "vertex {v} of the digraph lies outside every cluster"
                )));
            }
        }
        if !winds_around(&self.graph, p, &self.cycle)? {
            return Err(Error::MalformedInput(
                "digraph does not wind around the cluster cycle".into(),
            ));
        }
        let (lo, hi) = self.degree_window();
        for (from, to) in self.cycle.edges() {
            for &u in p.cluster(from) {
                let d = self.graph.out_degree(u);
                if d < lo || d > hi {
                    return Err(Error::InvalidParameter(format!(
                        "outdegree {d} of vertex {u} into cluster {to} outside [{lo}, {hi}]"
                    )));
                }
            }
            for &w in p.cluster(to) {
                let d = self.graph.in_degree(w);
                if d < lo || d > hi {
                    return Err(Error::InvalidParameter(format!(
                        "indegree {d} of vertex {w} from cluster {from} outside [{lo}, {hi}]"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn graph(&self) -> &Digraph {
        &self.graph
    }

    pub fn partition(&self) -> &ClusterPartition {
        &self.partition
    }

    pub fn cycle(&self) -> &ClusterCycle {
        &self.cycle
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn into_parts(self) -> (Digraph, ClusterPartition, ClusterCycle) {
        (self.graph, self.partition, self.cycle)
    }
}

pub(crate) fn degree_window(m: usize, mu: f64, eps: f64) -> (usize, usize) {
    let m = m as f64;
    let lo = ((1.0 - mu - eps) * m - 1e-9).ceil().max(0.0) as usize;
    let hi = ((1.0 - mu + eps) * m + 1e-9).floor().max(0.0) as usize;
    (lo, hi)
}
