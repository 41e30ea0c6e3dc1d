use std::collections::{BTreeMap, BTreeSet};

use crate::classic::{hopcroft_karp, regular_bipartite_to_matchings};
use crate::cyclic::{balancing_pair, SliceEntry, CHUNKS_PER_MATCHING};
use crate::error::{Error, Result};
use crate::extension::{orient_rest, BalancedExtension, ExtensionOutcome};
use crate::graph::{ClusterCycle, ClusterPartition, Digraph, Multigraph, PathSequence};

/// The reserve of one A-B cluster pair, split into the phase-one part and a
/// pool of matching pieces for phase two.
struct PairPool {
    phase_one: Multigraph,
    chunks: Vec<Vec<(usize, usize)>>,
    handed_out: usize,
}

fn matching_edges(pm: &Multigraph, left: &[usize]) -> Vec<(usize, usize)> {
    let mut edges: Vec<(usize, usize)> = left
        .iter()
        .flat_map(|&u| pm.neighbours(u).map(move |(w, _)| (u, w)))
        .collect();
    edges.sort_unstable();
    edges
}

fn build_pools(
    q: &ClusterPartition,
    h: &Multigraph,
    phase_one_degree: usize,
) -> Result<BTreeMap<(usize, usize), PairPool>> {
    let k = q.cluster_count() / 2;
    let mut pools = BTreeMap::new();
    for a in 0..k {
        for b in k..2 * k {
            let (left, right) = (q.cluster(a), q.cluster(b));
            let pms = regular_bipartite_to_matchings(&h.between(left, right), left, right)?;
            let split = phase_one_degree.min(pms.len());
            let phase_one = pms[..split]
                .iter()
                .fold(Multigraph::new(h.vertex_count()), |acc, pm| acc.sum(pm));
            let chunks = pms[split..]
                .iter()
                .flat_map(|pm| {
                    let edges = matching_edges(pm, left);
                    let size = edges.len().div_ceil(CHUNKS_PER_MATCHING).max(1);
                    edges.chunks(size).map(<[_]>::to_vec).collect::<Vec<_>>()
                })
                .collect();
            pools.insert(
                (a, b),
                PairPool {
                    phase_one,
                    chunks,
                    handed_out: 0,
                },
            );
        }
    }
    Ok(pools)
}

fn pair_key(x: usize, y: usize) -> (usize, usize) {
    (x.min(y), x.max(y))
}

/// Phase one: each head `y` of the fictive arcs gets a distinct partner in
/// the entry's cluster outside the fictive matching.
fn route_heads(
    entry: &SliceEntry,
    q: &ClusterPartition,
    pools: &mut BTreeMap<(usize, usize), PairPool>,
) -> Result<Vec<usize>> {
    let heads: Vec<usize> = entry.matching.heads().collect();
    let blocked = entry.matching.vertices();
    let right: Vec<usize> = q
        .cluster(entry.cluster)
        .iter()
        .copied()
        .filter(|v| !blocked.contains(v))
        .collect();
    let local: BTreeMap<usize, usize> = right.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut adj = Vec::with_capacity(heads.len());
    for &y in &heads {
        let cy = q
            .cluster_of(y)
            .ok_or_else(|| Error::MalformedInput(format!("head {y} lies outside every cluster")))?;
        let pool = pools.get(&pair_key(entry.cluster, cy)).ok_or_else(|| {
            Error::MalformedInput(format!(
                "head {y} and cluster {} do not form an A-B pair",
                entry.cluster
            ))
        })?;
        adj.push(
            pool.phase_one
                .neighbours(y)
                .filter_map(|(w, _)| local.get(&w).copied())
                .collect::<Vec<_>>(),
        );
    }
    let mate = hopcroft_karp(right.len(), &adj);
    let mut partners = Vec::with_capacity(heads.len());
    for (&y, r) in heads.iter().zip(mate) {
        let a = right[r.ok_or_else(|| {
            Error::ReservoirExhausted(format!(
                "system {}: head {y} cannot be routed into cluster {}",
                entry.system, entry.cluster
            ))
        })?];
        let cy = q.cluster_of(y).expect("checked above");
        let pool = pools.get_mut(&pair_key(entry.cluster, cy)).expect("checked above");
        pool.phase_one.remove_edge(y, a);
        partners.push(a);
    }
    Ok(partners)
}

/// Phase two: one arc of the reserve balancing each arc of `arcs`, with
/// endpoints avoiding `blocked`. Pieces of the reserve are handed to the
/// entry as needed and stay its own.
fn balance_arcs(
    entry: &SliceEntry,
    arcs: &[(usize, usize)],
    q: &ClusterPartition,
    c: &ClusterCycle,
    pools: &mut BTreeMap<(usize, usize), PairPool>,
    blocked: &mut BTreeSet<usize>,
) -> Result<Vec<(usize, usize)>> {
    let mut owned: BTreeMap<(usize, usize), Vec<Vec<(usize, usize)>>> = BTreeMap::new();
    let mut out = Vec::with_capacity(arcs.len());
    for &(x, y) in arcs {
        let (cx, cy) = (q.cluster_of(x), q.cluster_of(y));
        let (Some(cx), Some(cy)) = (cx, cy) else {
            return Err(Error::MalformedInput(format!("arc {x}->{y} leaves the clusters")));
        };
        let (from, to) = balancing_pair(c, cx, cy);
        let key = pair_key(from, to);
        let pool = pools
            .get_mut(&key)
            .ok_or_else(|| Error::MalformedInput(format!("clusters {from}, {to} are not an A-B pair")))?;
        let mine = owned.entry(key).or_default();
        let orient = |(a, b): (usize, usize)| if q.cluster_of(a) == Some(from) { (a, b) } else { (b, a) };
        let pick = |chunks: &mut Vec<Vec<(usize, usize)>>, blocked: &BTreeSet<usize>| {
            for chunk in chunks.iter_mut() {
                if let Some(pos) = chunk
                    .iter()
                    .position(|&(a, b)| !blocked.contains(&a) && !blocked.contains(&b))
                {
                    return Some(orient(chunk.swap_remove(pos)));
                }
            }
            None
        };
        let mut found = pick(mine, blocked);
        while found.is_none() {
            let Some(chunk) = pool.chunks.get(pool.handed_out).cloned() else {
                return Err(Error::ReservoirExhausted(format!(
                    "system {}: no free edge between clusters {from} and {to} balances {x}->{y}",
                    entry.system
                )));
            };
            pool.handed_out += 1;
            mine.push(chunk);
            found = pick(mine, blocked);
        }
        let f = found.expect("loop exits with an edge");
        blocked.insert(f.0);
        blocked.insert(f.1);
        out.push(f);
    }
    Ok(out)
}

/// Extends each fictive matching `x -> y` of the bipartite setting first by
/// arcs `y -> a` into the entry's cluster, then by one reserve arc balancing
/// every arc so far. The result has `4 e(M)` arcs per entry.
pub fn balance_extend_bipartite(
    entries: &[SliceEntry],
    q: &ClusterPartition,
    c: &ClusterCycle,
    h: &Multigraph,
    phase_one_degree: usize,
) -> Result<ExtensionOutcome> {
    if q.cluster_count() % 2 != 0 || c.len() != q.cluster_count() {
        return Err(Error::MalformedInput(
            "bipartite extension needs 2K clusters on the cycle".into(),
        ));
    }
    let mut pools = build_pools(q, h, phase_one_degree)?;
    let mut used = Digraph::new(h.vertex_count());
    let mut be = BalancedExtension::default();

    let mut partners = Vec::with_capacity(entries.len());
    for entry in entries {
        partners.push(route_heads(entry, q, &mut pools)?);
    }

    for (entry, partners) in entries.iter().zip(partners) {
        let mut paths: Vec<Vec<usize>> = Vec::new();
        let mut arcs = Vec::new();
        for (&(x, y), &a) in entry.matching.arcs().iter().zip(&partners) {
            paths.push(vec![x, y, a]);
            arcs.push((x, y));
            arcs.push((y, a));
            used.add_arc(y, a)?;
        }
        let mut blocked: BTreeSet<usize> = paths.iter().flatten().copied().collect();
        for (u, w) in balance_arcs(entry, &arcs, q, c, &mut pools, &mut blocked)? {
            used.add_arc(u, w)?;
            paths.push(vec![u, w]);
        }
        be.push(PathSequence::new(paths)?, entry.matching.clone(), entry.cluster, entry.system);
    }
    Ok(ExtensionOutcome {
        oriented: orient_rest(h, &used),
        extension: be,
    })
}
