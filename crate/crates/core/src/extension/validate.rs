use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::extension::BalancedExtension;
use crate::graph::{is_locally_balanced, ClusterCycle, ClusterPartition};

/// Outcome of checking an `(eps, ell)`-balanced extension. Each flag is one
/// defining condition; `failures` explains every flag that is false.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ExtensionReport {
    pub locally_balanced: bool,
    pub edge_disjoint: bool,
    pub contains_matchings: bool,
    pub extends_into_cluster: bool,
    pub index_load: bool,
    pub vertex_load: bool,
    pub sequence_load: bool,
    pub failures: Vec<String>,
}

impl ExtensionReport {
    pub fn holds(&self) -> bool {
        self.locally_balanced
            && self.edge_disjoint
            && self.contains_matchings
            && self.extends_into_cluster
            && self.index_load
            && self.vertex_load
            && self.sequence_load
    }
}

fn undirected(u: usize, v: usize) -> (usize, usize) {
    (u.min(v), u.max(v))
}

pub fn validate_balanced_extension(
    be: &BalancedExtension,
    q: &ClusterPartition,
    c: &ClusterCycle,
    eps: f64,
    ell: f64,
) -> ExtensionReport {
    let k = q.cluster_count();
    let m = q.m() as f64;
    let load_cap = ell * m / k as f64 + 1e-9;
    let vertex_cap = eps * m + 1e-9;
    let mut report = ExtensionReport {
        locally_balanced: true,
        edge_disjoint: true,
        contains_matchings: true,
        extends_into_cluster: true,
        index_load: true,
        vertex_load: true,
        sequence_load: true,
        failures: Vec::new(),
    };
    if be.matchings.len() != be.len() || be.extension_clusters.len() != be.len() {
        report.contains_matchings = false;
        report.failures.push("sequence, matching and cluster lists differ in length".into());
        return report;
    }

    let mut seen_edges = BTreeSet::new();
    let mut per_index = vec![0usize; k];
    let mut touching = vec![0usize; k];
    for (s, ((ps, ms), &cluster)) in be
        .sequences
        .iter()
        .zip(&be.matchings)
        .zip(&be.extension_clusters)
        .enumerate()
    {
        match ps.to_digraph(q.n()).and_then(|d| is_locally_balanced(&d, q, c)) {
            Ok(true) => {}
            Ok(false) => {
                report.locally_balanced = false;
                report.failures.push(format!("sequence {s} is not locally balanced"));
            }
            Err(e) => {
                report.locally_balanced = false;
                report.failures.push(format!("sequence {s}: {e}"));
            }
        }

        let own: BTreeSet<(usize, usize)> = ms.arcs().iter().copied().collect();
        for (u, v) in ps.arcs().filter(|a| !own.contains(a)) {
            if !seen_edges.insert(undirected(u, v)) {
                report.edge_disjoint = false;
                report
                    .failures
                    .push(format!("edge {u}-{v} of sequence {s} is used twice"));
            }
        }

        let mut paths_used = BTreeSet::new();
        for &(u, v) in ms.arcs() {
            let holder = ps
                .paths
                .iter()
                .position(|p| p.windows(2).any(|w| (w[0], w[1]) == (u, v)));
            match holder {
                None => {
                    report.contains_matchings = false;
                    report.failures.push(format!("arc {u}->{v} missing from sequence {s}"));
                }
                Some(idx) => {
                    let last = *ps.paths[idx].last().expect("paths are non-empty");
                    if !paths_used.insert(idx) || q.cluster_of(last) != Some(cluster) {
                        report.extends_into_cluster = false;
                        report.failures.push(format!(
                            "arc {u}->{v} of sequence {s} does not end its own path in cluster {cluster}"
                        ));
                    }
                }
            }
        }

        if cluster < k {
            per_index[cluster] += 1;
        }
        let mut in_cluster = vec![0usize; k];
        for v in ps.vertices() {
            if let Some(i) = q.cluster_of(v) {
                in_cluster[i] += 1;
            }
        }
        for (i, &count) in in_cluster.iter().enumerate() {
            if count > 0 {
                touching[i] += 1;
            }
            if count as f64 > vertex_cap {
                report.vertex_load = false;
                report.failures.push(format!(
                    "sequence {s} has {count} vertices in cluster {i}, above {vertex_cap:.2}"
                ));
            }
        }
    }

    for i in 0..k {
        if per_index[i] as f64 > load_cap {
            report.index_load = false;
            report.failures.push(format!(
                "{} sequences extend into cluster {i}, above {load_cap:.2}",
                per_index[i]
            ));
        }
        if touching[i] as f64 > load_cap {
            report.sequence_load = false;
            report.failures.push(format!(
                "{} sequences meet cluster {i}, above {load_cap:.2}",
                touching[i]
            ));
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{OrderedDirectedMatching, PathSequence};

    fn frame() -> (ClusterPartition, ClusterCycle) {
        let clusters = (0..3).map(|c| (c * 4..(c + 1) * 4).collect()).collect();
        (ClusterPartition::plain(12, clusters).unwrap(), ClusterCycle::identity(3))
    }

    fn single(paths: Vec<Vec<usize>>, arcs: Vec<(usize, usize)>, cluster: usize) -> BalancedExtension {
        BalancedExtension {
            sequences: vec![PathSequence::new(paths).unwrap()],
            matchings: vec![OrderedDirectedMatching::new(arcs).unwrap()],
            extension_clusters: vec![cluster],
            systems: vec![0],
        }
    }

    #[test]
    fn balanced_single_arc() {
        let (q, c) = frame();
        let be = single(vec![vec![4, 5], vec![0, 8]], vec![(4, 5)], 1);
        assert!(validate_balanced_extension(&be, &q, &c, 1.0, 3.0).holds());
    }

    #[test]
    fn unbalanced_is_flagged() {
        let (q, c) = frame();
        let be = single(vec![vec![4, 5]], vec![(4, 5)], 1);
        let r = validate_balanced_extension(&be, &q, &c, 1.0, 3.0);
        assert!(!r.locally_balanced);
        assert_eq!(r.failures.len(), 1);
    }

    #[test]
    fn wrong_cluster_is_flagged() {
        let (q, c) = frame();
        let be = single(vec![vec![4, 5], vec![0, 8]], vec![(4, 5)], 2);
        let r = validate_balanced_extension(&be, &q, &c, 1.0, 3.0);
        assert!(!r.extends_into_cluster);
    }

    #[test]
    fn shared_edges_are_flagged() {
        let (q, c) = frame();
        let mut be = single(vec![vec![4, 5], vec![0, 8]], vec![(4, 5)], 1);
        be.sequences.push(PathSequence::new(vec![vec![6, 7], vec![0, 8]]).unwrap());
        be.matchings.push(OrderedDirectedMatching::new(vec![(6, 7)]).unwrap());
        be.extension_clusters.push(1);
        be.systems.push(1);
        let r = validate_balanced_extension(&be, &q, &c, 1.0, 3.0);
        assert!(!r.edge_disjoint);
        assert!(r.locally_balanced);
    }
}
