use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Digraph, Multigraph};

/// Vertex-disjoint paths, each given as a vertex sequence. Single-vertex
/// entries are trivial paths.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PathSystem {
    pub paths: Vec<Vec<usize>>,
}

impl PathSystem {
    pub fn new(paths: Vec<Vec<usize>>) -> Result<Self> {
        let ps = PathSystem { paths };
        ps.check_disjoint()?;
        Ok(ps)
    }

    fn check_disjoint(&self) -> Result<()> {
        let mut seen = BTreeSet::new();
        for path in &self.paths {
            if path.is_empty() {
                return Err(Error::MalformedInput("empty path".into()));
            }
            for &v in path {
                if !seen.insert(v) {
                    return Err(Error::MalformedInput(format!(
                        "vertex {v} appears twice in a path system"
                    )));
                }
            }
        }
        Ok(())
    }

    /// `V(J)`, trivial paths included.
    pub fn vertices(&self) -> BTreeSet<usize> {
        self.paths.iter().flatten().copied().collect()
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.paths
            .iter()
            .flat_map(|p| p.windows(2).map(|w| (w[0], w[1])))
    }

    pub fn edge_count(&self) -> usize {
        self.paths.iter().map(|p| p.len().saturating_sub(1)).sum()
    }

    pub fn nontrivial(&self) -> impl Iterator<Item = &Vec<usize>> {
        self.paths.iter().filter(|p| p.len() >= 2)
    }

    /// Degree of `v` in the path system.
    pub fn degree(&self, v: usize) -> usize {
        for path in &self.paths {
            if let Some(pos) = path.iter().position(|&w| w == v) {
                let last = path.len() - 1;
                return usize::from(pos > 0) + usize::from(pos < last);
            }
        }
        0
    }

    pub fn to_multigraph(&self, n: usize) -> Result<Multigraph> {
        Multigraph::from_edges(n, self.edges())
    }

    /// Splits a max-degree-2 forest into its paths. Isolated vertices of `g`
    /// are not reported.
    pub fn from_multigraph(g: &Multigraph) -> Result<Self> {
        let n = g.vertex_count();
        let mut seen = vec![false; n];
        let mut paths = Vec::new();
        for v in 0..n {
            if g.degree(v) > 2 {
                return Err(Error::MalformedInput(format!("vertex {v} has degree > 2")));
            }
        }
        for start in 0..n {
            if seen[start] || g.degree(start) != 1 {
                continue;
            }
            let mut path = vec![start];
            seen[start] = true;
            let mut prev = usize::MAX;
            let mut cur = start;
            loop {
                let next = g.neighbours(cur).map(|(w, _)| w).find(|&w| w != prev);
                match next {
                    Some(w) if !seen[w] => {
                        seen[w] = true;
                        path.push(w);
                        prev = cur;
                        cur = w;
                    }
                    _ => break,
                }
            }
            paths.push(path);
        }
        if let Some(v) = (0..n).find(|&v| !seen[v] && g.degree(v) > 0) {
            return Err(Error::MalformedInput(format!("vertex {v} lies on a cycle")));
        }
        Ok(PathSystem { paths })
    }
}

/// Vertex-disjoint directed paths.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PathSequence {
    pub paths: Vec<Vec<usize>>,
}

impl PathSequence {
    pub fn new(paths: Vec<Vec<usize>>) -> Result<Self> {
        PathSystem::new(paths.clone())?;
        Ok(PathSequence { paths })
    }

    pub fn arcs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.paths
            .iter()
            .flat_map(|p| p.windows(2).map(|w| (w[0], w[1])))
    }

    pub fn arc_count(&self) -> usize {
        self.paths.iter().map(|p| p.len().saturating_sub(1)).sum()
    }

    pub fn vertices(&self) -> BTreeSet<usize> {
        self.paths.iter().flatten().copied().collect()
    }

    pub fn to_digraph(&self, n: usize) -> Result<Digraph> {
        Digraph::from_arcs(n, self.arcs())
    }

    /// Splits a digraph with in/out-degrees at most one and no cycles into
    /// its directed paths.
    pub fn from_digraph(d: &Digraph) -> Result<Self> {
        let n = d.vertex_count();
        for v in 0..n {
            if d.out_degree(v) > 1 || d.in_degree(v) > 1 {
                return Err(Error::MalformedInput(format!(
                    "vertex {v} has in- or outdegree above one"
                )));
            }
        }
        let mut paths = Vec::new();
        let mut covered = 0;
        for start in 0..n {
            if d.in_degree(start) == 0 && d.out_degree(start) == 1 {
                let mut path = vec![start];
                let mut cur = start;
                while let Some(next) = d.out_neighbours(cur).next() {
                    path.push(next);
                    cur = next;
                }
                covered += path.len() - 1;
                paths.push(path);
            }
        }
        if covered != d.arc_count() {
            return Err(Error::MalformedInput("digraph contains a directed cycle".into()));
        }
        Ok(PathSequence { paths })
    }
}

/// Ordered, pairwise vertex-disjoint arcs `f_1, ..., f_l`.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(try_from = "Vec<(usize, usize)>", into = "Vec<(usize, usize)>")]
pub struct OrderedDirectedMatching {
    arcs: Vec<(usize, usize)>,
}

impl TryFrom<Vec<(usize, usize)>> for OrderedDirectedMatching {
    type Error = Error;

    fn try_from(arcs: Vec<(usize, usize)>) -> Result<Self> {
        OrderedDirectedMatching::new(arcs)
    }
}

impl From<OrderedDirectedMatching> for Vec<(usize, usize)> {
    fn from(m: OrderedDirectedMatching) -> Self {
        m.arcs
    }
}

impl OrderedDirectedMatching {
    pub fn new(arcs: Vec<(usize, usize)>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for &(u, v) in &arcs {
            if u == v {
                return Err(Error::MalformedInput(format!("loop {u}->{v} in matching")));
            }
            if !seen.insert(u) || !seen.insert(v) {
                return Err(Error::MalformedInput(format!(
                    "arc {u}->{v} shares a vertex with an earlier arc"
                )));
            }
        }
        Ok(OrderedDirectedMatching { arcs })
    }

    pub fn arcs(&self) -> &[(usize, usize)] {
        &self.arcs
    }

    pub fn len(&self) -> usize {
        self.arcs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arcs.is_empty()
    }

    pub fn vertices(&self) -> BTreeSet<usize> {
        self.arcs.iter().flat_map(|&(u, v)| [u, v]).collect()
    }

    pub fn tails(&self) -> impl Iterator<Item = usize> + '_ {
        self.arcs.iter().map(|a| a.0)
    }

    pub fn heads(&self) -> impl Iterator<Item = usize> + '_ {
        self.arcs.iter().map(|a| a.1)
    }

    pub fn to_digraph(&self, n: usize) -> Result<Digraph> {
        Digraph::from_arcs(n, self.arcs.iter().copied())
    }

    pub fn concat(&self, other: &OrderedDirectedMatching) -> Result<OrderedDirectedMatching> {
        let mut arcs = self.arcs.clone();
        arcs.extend_from_slice(&other.arcs);
        OrderedDirectedMatching::new(arcs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degrees_in_path_system() {
        let ps = PathSystem::new(vec![vec![1, 0, 2], vec![5]]).unwrap();
        assert_eq!(ps.degree(0), 2);
        assert_eq!(ps.degree(1), 1);
        assert_eq!(ps.degree(5), 0);
        assert_eq!(ps.edge_count(), 2);
        assert!(ps.vertices().contains(&5));
    }

    #[test]
    fn rejects_shared_vertex() {
        assert!(PathSystem::new(vec![vec![0, 1], vec![1, 2]]).is_err());
        assert!(OrderedDirectedMatching::new(vec![(0, 1), (1, 2)]).is_err());
    }

    #[test]
    fn digraph_splits_into_paths() {
        let d = Digraph::from_arcs(6, [(0, 1), (1, 2), (4, 3)]).unwrap();
        let ps = PathSequence::from_digraph(&d).unwrap();
        assert_eq!(ps.paths, vec![vec![0, 1, 2], vec![4, 3]]);
        let cyc = Digraph::cycle(3, &[0, 1, 2]).unwrap();
        assert!(PathSequence::from_digraph(&cyc).is_err());
    }

    #[test]
    fn multigraph_splits_into_paths() {
        let g = Multigraph::from_edges(5, [(0, 1), (1, 2), (3, 4)]).unwrap();
        let ps = PathSystem::from_multigraph(&g).unwrap();
        assert_eq!(ps.paths, vec![vec![0, 1, 2], vec![3, 4]]);
        let tri = Multigraph::from_edges(3, [(0, 1), (1, 2), (2, 0)]).unwrap();
        assert!(PathSystem::from_multigraph(&tri).is_err());
    }
}
