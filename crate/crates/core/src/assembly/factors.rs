use crate::classic::{perfect_matching_between, regular_bipartite_to_matchings, regular_subgraph};
use crate::error::{Error, Result};
use crate::graph::{ClusterCycle, ClusterPartition, Digraph, Multigraph, PathSequence};

/// Arcs of `d` from `left` into `right`, as an undirected multigraph.
fn pair_graph(d: &Digraph, left: &[usize], right: &[usize]) -> Multigraph {
    let n = d.vertex_count();
    let mut in_right = vec![false; n];
    right.iter().for_each(|&w| in_right[w] = true);
    let mut g = Multigraph::new(n);
    for &u in left {
        for w in d.out_neighbours(u).filter(|&w| in_right[w]) {
            g.add_edge(u, w).expect("pair classes are disjoint");
        }
    }
    g
}

/// For cycle edge `from -> to`: vertices of `from` without an outgoing arc
/// of `ps`, and vertices of `to` without an incoming one.
pub(crate) fn free_classes(ps: &Digraph, q: &ClusterPartition, from: usize, to: usize) -> (Vec<usize>, Vec<usize>) {
    let tails = q.cluster(from).iter().copied().filter(|&u| ps.out_degree(u) == 0).collect();
    let heads = q.cluster(to).iter().copied().filter(|&w| ps.in_degree(w) == 0).collect();
    (tails, heads)
}

/// Completes every path sequence to a 1-factor on the clusters by adding a
/// perfect matching of `graph` between the free vertices of each pair of
/// consecutive clusters. The added parts are pairwise arc-disjoint.
///
/// Sequences with arcs are served first, one Hopcroft-Karp matching at a
/// time; empty ones share an exact regular decomposition of what is left.
pub fn extend_to_one_factors(
    graph: &Digraph,
    q: &ClusterPartition,
    c: &ClusterCycle,
    sequences: &[PathSequence],
) -> Result<Vec<Digraph>> {
    let n = graph.vertex_count();
    if c.len() != q.cluster_count() || q.n() != n {
        return Err(Error::MalformedInput("cycle, partition and digraph do not fit".into()));
    }
    let mut available = graph.clone();
    let mut factors: Vec<Option<Digraph>> = vec![None; sequences.len()];
    let (busy, idle): (Vec<usize>, Vec<usize>) = (0..sequences.len()).partition(|&s| sequences[s].arc_count() > 0);

    for s in busy {
        let ps = sequences[s].to_digraph(n)?;
        let mut factor = ps.clone();
        for (from, to) in c.edges() {
            let (tails, heads) = free_classes(&ps, q, from, to);
            if tails.len() != heads.len() {
                return Err(Error::MalformedInput(format!(
                    "sequence {s} is not locally balanced at clusters {from} -> {to}"
                )));
            }
            let pair = pair_graph(&available, &tails, &heads);
            for (u, w) in perfect_matching_between(&pair, &tails, &heads)? {
                available.remove_arc(u, w);
                factor.add_arc(u, w)?;
            }
        }
        factors[s] = Some(factor);
    }

    if !idle.is_empty() {
        let mut shared = vec![Digraph::new(n); idle.len()];
        for (from, to) in c.edges() {
            let (left, right) = (q.cluster(from), q.cluster(to));
            let pair = pair_graph(&available, left, right);
            let regular = regular_subgraph(&pair, left, right, idle.len(), None)?;
            for (slot, pm) in regular_bipartite_to_matchings(&regular, left, right)?.iter().enumerate() {
                for &u in left {
                    for (w, _) in pm.neighbours(u) {
                        available.remove_arc(u, w);
                        shared[slot].add_arc(u, w)?;
                    }
                }
            }
        }
        for (s, factor) in idle.into_iter().zip(shared) {
            factors[s] = Some(factor);
        }
    }

    let factors: Vec<Digraph> = factors.into_iter().map(|f| f.expect("every slot served")).collect();
    verify_factors(graph, q, sequences, &factors)?;
    Ok(factors)
}

fn verify_factors(graph: &Digraph, q: &ClusterPartition, sequences: &[PathSequence], factors: &[Digraph]) -> Result<()> {
    let n = graph.vertex_count();
    let mut extra_union = Digraph::new(n);
    let cluster_vertices: Vec<usize> = q.clusters().iter().flatten().copied().collect();
    for (s, (f, ps)) in factors.iter().zip(sequences).enumerate() {
        let fail = |what: &str| Err(Error::AssemblyVerificationFailed(format!("factor {s}: {what}")));
        if cluster_vertices.iter().any(|&v| f.out_degree(v) != 1 || f.in_degree(v) != 1)
            || f.arc_count() != cluster_vertices.len()
        {
            return fail("not 1-regular on the clusters");
        }
        let ps = ps.to_digraph(n)?;
        if !ps.is_subgraph_of(f) {
            return fail("misses an arc of its path sequence");
        }
        for (u, w) in f.minus(&ps).arcs() {
            if !graph.has_arc(u, w) {
                return fail("uses an arc outside the system");
            }
            if !extra_union.add_arc(u, w)? {
                return fail("shares an arc with an earlier factor");
            }
        }
    }
    Ok(())
}
