use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::graph::{ClusterCycle, ClusterPartition, Digraph, Multigraph, OrderedDirectedMatching};

/// Hamiltonicity test on the restriction of a graph to a vertex set.
pub trait HamiltonCheck {
    fn is_hamilton_cycle_on(&self, vertex_set: &[usize]) -> bool;
}

impl HamiltonCheck for Multigraph {
    fn is_hamilton_cycle_on(&self, vertex_set: &[usize]) -> bool {
        let n = self.vertex_count();
        let len = vertex_set.len();
        if len < 2 || vertex_set.iter().any(|&v| v >= n) {
            return false;
        }
        let mut inside = vec![false; n];
        for &v in vertex_set {
            if inside[v] {
                return false;
            }
            inside[v] = true;
        }
        if vertex_set.iter().any(|&v| self.degree_into(v, &inside) != 2) {
            return false;
        }
        if len == 2 {
            return self.multiplicity(vertex_set[0], vertex_set[1]) == 2;
        }
        if vertex_set
            .iter()
            .any(|&v| self.neighbours(v).any(|(w, m)| inside[w] && m > 1))
        {
            return false;
        }
        // Every vertex has degree two, so connectivity settles it.
        let start = vertex_set[0];
        let mut prev = usize::MAX;
        let mut cur = start;
        let mut steps = 0;
        loop {
            let next = self
                .neighbours(cur)
                .map(|(w, _)| w)
                .find(|&w| inside[w] && w != prev)
                .expect("degree two inside the set");
            prev = cur;
            cur = next;
            steps += 1;
            if cur == start {
                break;
            }
        }
        steps == len
    }
}

impl HamiltonCheck for Digraph {
    fn is_hamilton_cycle_on(&self, vertex_set: &[usize]) -> bool {
        let n = self.vertex_count();
        let len = vertex_set.len();
        if len < 2 || vertex_set.iter().any(|&v| v >= n) {
            return false;
        }
        let mut inside = vec![false; n];
        for &v in vertex_set {
            if inside[v] {
                return false;
            }
            inside[v] = true;
        }
        let mut succ = vec![usize::MAX; n];
        for &v in vertex_set {
            let outs: Vec<usize> = self.out_neighbours(v).filter(|&w| inside[w]).collect();
            let ins = self.in_neighbours(v).filter(|&w| inside[w]).count();
            if outs.len() != 1 || ins != 1 {
                return false;
            }
            succ[v] = outs[0];
        }
        let start = vertex_set[0];
        let mut cur = start;
        for step in 1..=len {
            cur = succ[cur];
            if cur == start {
                return step == len;
            }
        }
        false
    }
}

/// True iff `g` restricted to `vertex_set` is one cycle through exactly those vertices.
pub fn verify_hamilton_cycle<G: HamiltonCheck + ?Sized>(g: &G, vertex_set: &[usize]) -> bool {
    g.is_hamilton_cycle_on(vertex_set)
}

fn cluster_or_err(p: &ClusterPartition, v: usize) -> Result<usize> {
    p.cluster_of(v)
        .ok_or_else(|| Error::MalformedInput(format!("vertex {v} lies outside every cluster")))
}

fn check_cycle_fits(p: &ClusterPartition, c: &ClusterCycle) -> Result<()> {
    if c.len() != p.cluster_count() {
        return Err(Error::MalformedInput(format!(
            "cluster cycle has {} clusters but the partition has {}",
            c.len(),
            p.cluster_count()
        )));
    }
    Ok(())
}

/// Every arc runs from a cluster to its successor on `c`.
pub fn winds_around(d: &Digraph, p: &ClusterPartition, c: &ClusterCycle) -> Result<bool> {
    check_cycle_fits(p, c)?;
    let mut ok = true;
    for (u, v) in d.arcs() {
        let cu = cluster_or_err(p, u)?;
        let cv = cluster_or_err(p, v)?;
        if c.next(cu) != cv || cu == cv {
            ok = false;
        }
    }
    Ok(ok)
}

/// For each edge `UW` of `c`: arcs starting in `U` equal arcs ending in `W`.
pub fn is_locally_balanced(d: &Digraph, p: &ClusterPartition, c: &ClusterCycle) -> Result<bool> {
    check_cycle_fits(p, c)?;
    let k = p.cluster_count();
    let mut starts = vec![0usize; k];
    let mut ends = vec![0usize; k];
    for (u, v) in d.arcs() {
        starts[cluster_or_err(p, u)?] += 1;
        ends[cluster_or_err(p, v)?] += 1;
    }
    Ok(c.edges().all(|(from, to)| starts[from] == ends[to]))
}

/// `cycle` contains every arc of `m` and meets them in the given cyclic order.
pub fn is_consistent_with(cycle: &Digraph, m: &OrderedDirectedMatching) -> Result<bool> {
    let touched = cycle.touched();
    if !cycle.is_hamilton_cycle_on(&touched) {
        return Err(Error::MalformedInput(
            "consistency needs a directed cycle".into(),
        ));
    }
    if m.is_empty() {
        return Ok(true);
    }
    if m.arcs().iter().any(|&(u, v)| !cycle.has_arc(u, v)) {
        return Ok(false);
    }
    let succ = cycle.successor_map();
    let first_head = m.arcs()[0].1;
    let mut position = HashMap::with_capacity(touched.len());
    let mut cur = first_head;
    for step in 0..touched.len() {
        position.insert(cur, step);
        cur = succ[cur].expect("cycle vertex has a successor");
    }
    // Tails of f_2..f_l must appear in increasing order after f_1's head.
    let mut last = 0usize;
    for &(u, _) in &m.arcs()[1..] {
        let pos = position[&u];
        if pos < last {
            return Ok(false);
        }
        last = pos;
    }
    Ok(true)
}
