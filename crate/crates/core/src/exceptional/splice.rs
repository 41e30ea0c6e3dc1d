use crate::error::{Error, Result};
use crate::exceptional::fictive::{BipartiteReduction, CliqueReduction};
use crate::exceptional::system::{BalancedExceptionalSystem, ExceptionalSystem, SystemKind};
use crate::graph::{
    is_consistent_with, verify_hamilton_cycle, ClusterPartition, Digraph, Multigraph,
    OrderedDirectedMatching, Side,
};

fn require_consistent(cycle: &Digraph, on: &[usize], m: &OrderedDirectedMatching, label: &str) -> Result<()> {
    if !verify_hamilton_cycle(cycle, on) {
        return Err(Error::NotConsistent(format!("{label} is not a Hamilton cycle on its side")));
    }
    match is_consistent_with(cycle, m) {
        Ok(true) => Ok(()),
        Ok(false) => Err(Error::NotConsistent(format!(
            "{label} does not traverse its fictive arcs in order"
        ))),
        Err(e) => Err(Error::NotConsistent(e.to_string())),
    }
}

fn replace_fictive(
    base: Multigraph,
    fictive: &[(usize, usize)],
    real: impl Iterator<Item = (usize, usize)>,
) -> Result<Multigraph> {
    let mut out = base;
    for &(u, v) in fictive {
        if !out.remove_edge(u, v) {
            return Err(Error::SpliceVerificationFailed(format!(
                "fictive edge {u}-{v} missing from the cycle"
            )));
        }
    }
    for (u, v) in real {
        out.add_edge(u, v)?;
    }
    Ok(out)
}

/// `C_A + C_B - J* + J`: a Hamilton cycle on `V` for a HES, and a Hamilton
/// cycle on `A'` plus one on `B'` for a MES.
pub fn splice_two_cliques(
    c_a: &Digraph,
    c_b: &Digraph,
    j: &ExceptionalSystem,
    r: &CliqueReduction,
    p: &ClusterPartition,
) -> Result<Multigraph> {
    require_consistent(c_a, &p.side_core(Side::A), &r.a_dir, "A-side cycle")?;
    require_consistent(c_b, &p.side_core(Side::B), &r.b_dir, "B-side cycle")?;
    let base = c_a.to_multigraph().sum(&c_b.to_multigraph());
    let out = replace_fictive(base, &r.fictive_edges(), j.paths().edges())?;
    let ok = match j.kind() {
        SystemKind::Hes => {
            let all: Vec<usize> = (0..p.n()).collect();
            verify_hamilton_cycle(&out, &all)
        }
        SystemKind::Mes => {
            let a = p.side_vertices(Side::A);
            let b = p.side_vertices(Side::B);
            let crossing = out.edges().any(|(u, v, _)| p.side_of(u) != p.side_of(v));
            !crossing && verify_hamilton_cycle(&out, &a) && verify_hamilton_cycle(&out, &b)
        }
    };
    if !ok {
        return Err(Error::SpliceVerificationFailed(format!(
            "{:?} splice did not produce the expected cycles",
            j.kind()
        )));
    }
    Ok(out)
}

/// `D - J* + J`, a Hamilton cycle on `V`.
pub fn splice_bipartite(
    d: &Digraph,
    j: &BalancedExceptionalSystem,
    r: &BipartiteReduction,
    p: &ClusterPartition,
) -> Result<Multigraph> {
    let mut core = p.side_core(Side::A);
    core.extend(p.side_core(Side::B));
    require_consistent(d, &core, &r.dir, "cycle")?;
    let out = replace_fictive(d.to_multigraph(), &r.fictive_edges(), j.paths().edges())?;
    let all: Vec<usize> = (0..p.n()).collect();
    if !verify_hamilton_cycle(&out, &all) {
        return Err(Error::SpliceVerificationFailed(
            "bipartite splice is not a Hamilton cycle".into(),
        ));
    }
    Ok(out)
}

/// Splits a union of even cycles into two perfect matchings by alternating
/// along each cycle. `None` if some component is not an even cycle.
pub fn split_into_matchings(g: &Multigraph) -> Option<(Multigraph, Multigraph)> {
    let n = g.vertex_count();
    let mut first = Multigraph::new(n);
    let mut second = Multigraph::new(n);
    let mut seen = vec![false; n];
    for start in 0..n {
        if seen[start] || g.degree(start) == 0 {
            continue;
        }
        if g.degree(start) != 2 {
            return None;
        }
        let mut prev = usize::MAX;
        let mut cur = start;
        let mut parity = 0usize;
        loop {
            seen[cur] = true;
            if g.degree(cur) != 2 {
                return None;
            }
            let next = if prev != usize::MAX && g.multiplicity(cur, prev) == 2 {
                prev
            } else {
                g.neighbours(cur).map(|(w, _)| w).find(|&w| w != prev)?
            };
            if parity % 2 == 0 {
                first.add_edge(cur, next).ok()?;
            } else {
                second.add_edge(cur, next).ok()?;
            }
            parity += 1;
            prev = cur;
            cur = next;
            if cur == start {
                break;
            }
        }
        if parity % 2 == 1 {
            return None;
        }
    }
    Some((first, second))
}
