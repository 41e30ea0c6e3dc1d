use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Undirected multigraph on vertices `0..n` with explicit edge multiplicities.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(try_from = "MultigraphRecord", into = "MultigraphRecord")]
pub struct Multigraph {
    n: usize,
    adj: Vec<BTreeMap<usize, usize>>,
    edge_total: usize,
}

#[derive(Serialize, Deserialize)]
struct MultigraphRecord {
    n: usize,
    edges: Vec<[usize; 3]>,
}

impl TryFrom<MultigraphRecord> for Multigraph {
    type Error = Error;

    fn try_from(rec: MultigraphRecord) -> Result<Self> {
        let mut g = Multigraph::new(rec.n);
        for [u, v, mult] in rec.edges {
            if mult == 0 {
                return Err(Error::MalformedInput(format!("edge {u}-{v} has multiplicity 0")));
            }
            g.add_edge_mult(u, v, mult)?;
        }
        Ok(g)
    }
}

impl From<Multigraph> for MultigraphRecord {
    fn from(g: Multigraph) -> Self {
        MultigraphRecord {
            n: g.n,
            edges: g.edges().map(|(u, v, m)| [u, v, m]).collect(),
        }
    }
}

impl Multigraph {
    pub fn new(n: usize) -> Self {
        Multigraph {
            n,
            adj: vec![BTreeMap::new(); n],
            edge_total: 0,
        }
    }

    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut g = Multigraph::new(n);
        for (u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    /// e(G): the sum of all multiplicities.
    pub fn edge_count(&self) -> usize {
        self.edge_total
    }

    /// Number of distinct vertex pairs carrying an edge.
    pub fn support_size(&self) -> usize {
        self.adj.iter().map(BTreeMap::len).sum::<usize>() / 2
    }

    fn check_pair(&self, u: usize, v: usize) -> Result<()> {
        if u >= self.n || v >= self.n {
            return Err(Error::MalformedInput(format!(
                "edge {u}-{v} outside vertex range 0..{}",
                self.n
            )));
        }
        if u == v {
            return Err(Error::MalformedInput(format!("loop at vertex {u}")));
        }
        Ok(())
    }

    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<()> {
        self.add_edge_mult(u, v, 1)
    }

    pub fn add_edge_mult(&mut self, u: usize, v: usize, mult: usize) -> Result<()> {
        self.check_pair(u, v)?;
        if mult == 0 {
            return Ok(());
        }
        *self.adj[u].entry(v).or_insert(0) += mult;
        *self.adj[v].entry(u).or_insert(0) += mult;
        self.edge_total += mult;
        Ok(())
    }

    /// Removes up to `mult` copies of `uv`; returns how many were removed.
    pub fn remove_edge_mult(&mut self, u: usize, v: usize, mult: usize) -> usize {
        if u >= self.n || v >= self.n || u == v {
            return 0;
        }
        let have = self.multiplicity(u, v);
        let take = have.min(mult);
        if take == 0 {
            return 0;
        }
        if take == have {
            self.adj[u].remove(&v);
            self.adj[v].remove(&u);
        } else {
            *self.adj[u].get_mut(&v).unwrap() -= take;
            *self.adj[v].get_mut(&u).unwrap() -= take;
        }
        self.edge_total -= take;
        take
    }

    pub fn remove_edge(&mut self, u: usize, v: usize) -> bool {
        self.remove_edge_mult(u, v, 1) == 1
    }

    pub fn multiplicity(&self, u: usize, v: usize) -> usize {
        self.adj
            .get(u)
            .and_then(|row| row.get(&v))
            .copied()
            .unwrap_or(0)
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.multiplicity(u, v) > 0
    }

    /// Degree counted with multiplicity.
    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].values().sum()
    }

    pub fn degrees(&self) -> Vec<usize> {
        (0..self.n).map(|v| self.degree(v)).collect()
    }

    /// Degree of `v` into `set` (membership mask), counted with multiplicity.
    pub fn degree_into(&self, v: usize, set: &[bool]) -> usize {
        self.adj[v]
            .iter()
            .filter(|(w, _)| set[**w])
            .map(|(_, m)| *m)
            .sum()
    }

    /// Distinct neighbours of `v` with their multiplicities.
    pub fn neighbours(&self, v: usize) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj[v].iter().map(|(w, m)| (*w, *m))
    }

    /// Edges as `(u, v, multiplicity)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        self.adj.iter().enumerate().flat_map(|(u, row)| {
            row.range(u + 1..).map(move |(v, m)| (u, *v, *m))
        })
    }

    /// Every edge copy listed separately.
    pub fn edge_copies(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.edge_total);
        for (u, v, m) in self.edges() {
            for _ in 0..m {
                out.push((u, v));
            }
        }
        out
    }

    /// G + H: multiplicities add.
    pub fn sum(&self, other: &Multigraph) -> Multigraph {
        let mut out = self.clone();
        out.grow(other.n);
        for (u, v, m) in other.edges() {
            out.add_edge_mult(u, v, m).expect("edge valid in source graph");
        }
        out
    }

    /// G - H: multiplicities subtract, floored at zero.
    pub fn minus(&self, other: &Multigraph) -> Multigraph {
        let mut out = self.clone();
        for (u, v, m) in other.edges() {
            out.remove_edge_mult(u, v, m);
        }
        out
    }

    pub fn grow(&mut self, n: usize) {
        if n > self.n {
            self.adj.resize(n, BTreeMap::new());
            self.n = n;
        }
    }

    /// True when every edge of `self` appears in `other` with at least the same multiplicity.
    pub fn is_submultigraph_of(&self, other: &Multigraph) -> bool {
        self.edges().all(|(u, v, m)| other.multiplicity(u, v) >= m)
    }

    /// Subgraph induced by the vertices flagged in `mask` (ids are kept).
    pub fn induced(&self, mask: &[bool]) -> Multigraph {
        let mut out = Multigraph::new(self.n);
        for (u, v, m) in self.edges() {
            if mask[u] && mask[v] {
                out.add_edge_mult(u, v, m).unwrap();
            }
        }
        out
    }

    /// Edges with one end in `left` and the other in `right` (ids are kept).
    pub fn between(&self, left: &[usize], right: &[usize]) -> Multigraph {
        let mut in_right = vec![false; self.n];
        for &w in right {
            in_right[w] = true;
        }
        let mut out = Multigraph::new(self.n);
        for &u in left {
            for (w, m) in self.neighbours(u) {
                if in_right[w] {
                    out.add_edge_mult(u, w, m).unwrap();
                }
            }
        }
        out
    }

    /// Number of edge copies with one end in `left` and the other in `right`.
    pub fn count_between(&self, left: &[usize], right_mask: &[bool]) -> usize {
        left.iter().map(|&u| self.degree_into(u, right_mask)).sum()
    }

    /// Vertices of positive degree.
    pub fn non_isolated(&self) -> Vec<usize> {
        (0..self.n).filter(|&v| !self.adj[v].is_empty()).collect()
    }
}

/// Free-function form of [`Multigraph::sum`].
pub fn multigraph_sum(g: &Multigraph, h: &Multigraph) -> Multigraph {
    g.sum(h)
}

/// Free-function form of [`Multigraph::minus`].
pub fn multigraph_minus(g: &Multigraph, h: &Multigraph) -> Multigraph {
    g.minus(h)
}
