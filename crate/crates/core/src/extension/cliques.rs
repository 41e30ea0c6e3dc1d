use crate::classic::regular_bipartite_to_matchings;
use crate::cyclic::SliceEntry;
use crate::error::{Error, Result};
use crate::extension::{orient_rest, BalancedExtension, ExtensionOutcome};
use crate::graph::{ClusterCycle, ClusterPartition, Digraph, Multigraph, PathSequence};

/// Extends each matching living in `V_i` by an equally large matching of
/// `H[V_{i-1}, V_{i+1}]` oriented forward, so every sequence is locally
/// balanced. Matchings for one cluster are cut one after another from the
/// perfect matchings of that pair.
pub fn balance_extend_cliques(
    entries: &[SliceEntry],
    q: &ClusterPartition,
    c: &ClusterCycle,
    h: &Multigraph,
) -> Result<ExtensionOutcome> {
    let mut used = Digraph::new(h.vertex_count());
    let mut be = BalancedExtension::default();
    let mut per_entry: Vec<Option<PathSequence>> = vec![None; entries.len()];

    for cluster in c.order().iter().copied() {
        let members: Vec<usize> = (0..entries.len())
            .filter(|&e| entries[e].cluster == cluster)
            .collect();
        if members.is_empty() {
            continue;
        }
        let (before, after) = (c.prev(cluster), c.next(cluster));
        let (left, right) = (q.cluster(before), q.cluster(after));
        let pair = h.between(left, right);
        let perfect = regular_bipartite_to_matchings(&pair, left, right)?;
        let mut pool = perfect.iter().map(|pm| {
            let mut edges: Vec<(usize, usize)> = left
                .iter()
                .flat_map(|&u| pm.neighbours(u).map(move |(w, _)| (u, w)))
                .collect();
            edges.sort_unstable();
            edges
        });
        let mut current: Vec<(usize, usize)> = Vec::new();
        let mut cursor = 0;
        for e in members {
            let entry = &entries[e];
            let need = entry.matching.len();
            if need > current.len() - cursor {
                current = pool.next().ok_or_else(|| {
                    Error::ReservoirExhausted(format!(
                        "cluster {cluster}: the reserve between clusters {before} and {after} \
                         has {} perfect matchings, too few for the matchings living there",
                        perfect.len()
                    ))
                })?;
                cursor = 0;
                if need > current.len() {
                    return Err(Error::ReservoirExhausted(format!(
                        "matching of size {need} exceeds a perfect matching of size {}",
                        current.len()
                    )));
                }
            }
            let mut paths: Vec<Vec<usize>> = entry.matching.arcs().iter().map(|&(u, v)| vec![u, v]).collect();
            for &(u, w) in &current[cursor..cursor + need] {
                used.add_arc(u, w)?;
                paths.push(vec![u, w]);
            }
            cursor += need;
            per_entry[e] = Some(PathSequence::new(paths)?);
        }
    }

    for (entry, ps) in entries.iter().zip(per_entry) {
        let ps = ps.expect("every entry sits on some cluster of the cycle");
        be.push(ps, entry.matching.clone(), entry.cluster, entry.system);
    }
    Ok(ExtensionOutcome {
        oriented: orient_rest(h, &used),
        extension: be,
    })
}
