use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exceptional::system::{path_ends, BalancedExceptionalSystem, ExceptionalSystem, SystemKind};
use crate::graph::{ClusterPartition, OrderedDirectedMatching, PathSystem, Side};

/// The matching joining the two ends of every non-trivial path.
pub fn induce_jab(paths: &PathSystem) -> Vec<(usize, usize)> {
    path_ends(paths)
        .into_iter()
        .map(|(x, y)| (x.min(y), x.max(y)))
        .collect()
}

struct SplitEnds {
    inside_a: Vec<(usize, usize)>,
    inside_b: Vec<(usize, usize)>,
    /// `(a, b)` with `a` in A, sorted by `a`.
    crossing: Vec<(usize, usize)>,
}

fn split_ends(jab: &[(usize, usize)], p: &ClusterPartition) -> SplitEnds {
    let mut split = SplitEnds {
        inside_a: Vec::new(),
        inside_b: Vec::new(),
        crossing: Vec::new(),
    };
    for &(x, y) in jab {
        match (p.side_of(x), p.side_of(y)) {
            (Some(Side::A), Some(Side::A)) => split.inside_a.push((x, y)),
            (Some(Side::B), Some(Side::B)) => split.inside_b.push((x, y)),
            (Some(Side::A), _) => split.crossing.push((x, y)),
            _ => split.crossing.push((y, x)),
        }
    }
    split.inside_a.sort_unstable();
    split.inside_b.sort_unstable();
    split.crossing.sort_unstable();
    split
}

/// Fictive edges for the two-cliques setting.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CliqueReduction {
    pub jab: Vec<(usize, usize)>,
    /// Crossing edges `x_i y_i` of the induced matching, `x_i` in A.
    pub xy: Vec<(usize, usize)>,
    /// `x_1 -> x_2, x_3 -> x_4, ...` then the A-internal ends, low to high.
    pub a_dir: OrderedDirectedMatching,
    /// `y_2 -> y_3, ..., y_{2l} -> y_1` then the B-internal ends, low to high.
    pub b_dir: OrderedDirectedMatching,
}

impl CliqueReduction {
    /// Number of leading arcs of `a_dir` (and of `b_dir`) that pair crossing ends.
    pub fn pairing_len(&self) -> usize {
        self.xy.len() / 2
    }

    /// All fictive edges `J* = J*_A + J*_B` as undirected pairs.
    pub fn fictive_edges(&self) -> Vec<(usize, usize)> {
        self.a_dir
            .arcs()
            .iter()
            .chain(self.b_dir.arcs())
            .map(|&(u, v)| (u.min(v), u.max(v)))
            .collect()
    }
}

pub fn build_fictive_two_cliques(j: &ExceptionalSystem, p: &ClusterPartition) -> Result<CliqueReduction> {
    let jab = induce_jab(j.paths());
    let split = split_ends(&jab, p);
    let crossings = split.crossing.len();
    if crossings % 2 == 1 || (j.kind() == SystemKind::Hes && crossings == 0) {
        return Err(Error::InvalidExceptionalSystem(format!(
            "{crossings} crossing paths cannot be paired"
        )));
    }
    if j.kind() == SystemKind::Mes && crossings > 0 {
        return Err(Error::InvalidExceptionalSystem("MES with crossing paths".into()));
    }
    let l = crossings / 2;
    let x: Vec<usize> = split.crossing.iter().map(|e| e.0).collect();
    let y: Vec<usize> = split.crossing.iter().map(|e| e.1).collect();
    let mut a_arcs: Vec<(usize, usize)> = (0..l).map(|i| (x[2 * i], x[2 * i + 1])).collect();
    a_arcs.extend(split.inside_a.iter().copied());
    let mut b_arcs: Vec<(usize, usize)> = (0..l)
        .map(|i| (y[2 * i + 1], y[(2 * i + 2) % (2 * l)]))
        .collect();
    b_arcs.extend(split.inside_b.iter().copied());
    Ok(CliqueReduction {
        jab,
        xy: split.crossing,
        a_dir: OrderedDirectedMatching::new(a_arcs)?,
        b_dir: OrderedDirectedMatching::new(b_arcs)?,
    })
}

/// Fictive edges for the bipartite setting.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BipartiteReduction {
    pub jab: Vec<(usize, usize)>,
    /// Arcs `x_i -> y_i` in index order, `x_i` in A and `y_i` in B.
    pub dir: OrderedDirectedMatching,
}

impl BipartiteReduction {
    pub fn fictive_edges(&self) -> Vec<(usize, usize)> {
        self.dir
            .arcs()
            .iter()
            .map(|&(u, v)| (u.min(v), u.max(v)))
            .collect()
    }
}

pub fn build_fictive_bipartite(
    j: &BalancedExceptionalSystem,
    p: &ClusterPartition,
) -> Result<BipartiteReduction> {
    let jab = induce_jab(j.paths());
    let split = split_ends(&jab, p);
    if split.inside_a.len() != split.inside_b.len() {
        return Err(Error::InvalidExceptionalSystem(format!(
            "{} A-internal ends against {} B-internal ends",
            split.inside_a.len(),
            split.inside_b.len()
        )));
    }
    let mut arcs = Vec::with_capacity(jab.len());
    for (&(x1, x2), &(y1, y2)) in split.inside_a.iter().zip(&split.inside_b) {
        arcs.push((x1, y1));
        arcs.push((x2, y2));
    }
    arcs.extend(split.crossing.iter().copied());
    Ok(BipartiteReduction {
        jab,
        dir: OrderedDirectedMatching::new(arcs)?,
    })
}
