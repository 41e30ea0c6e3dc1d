use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Simple digraph on `0..n`: no loops, at most one arc per direction.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(try_from = "DigraphRecord", into = "DigraphRecord")]
pub struct Digraph {
    n: usize,
    out: Vec<BTreeSet<usize>>,
    inn: Vec<BTreeSet<usize>>,
    arc_total: usize,
}

#[derive(Serialize, Deserialize)]
struct DigraphRecord {
    n: usize,
    edges: Vec<[usize; 2]>,
}

impl TryFrom<DigraphRecord> for Digraph {
    type Error = Error;

    fn try_from(rec: DigraphRecord) -> Result<Self> {
        let mut d = Digraph::new(rec.n);
        for [u, v] in rec.edges {
            if !d.add_arc(u, v)? {
                return Err(Error::MalformedInput(format!("duplicate arc {u}->{v}")));
            }
        }
        Ok(d)
    }
}

impl From<Digraph> for DigraphRecord {
    fn from(d: Digraph) -> Self {
        DigraphRecord {
            n: d.n,
            edges: d.arcs().map(|(u, v)| [u, v]).collect(),
        }
    }
}

impl Digraph {
    pub fn new(n: usize) -> Self {
        Digraph {
            n,
            out: vec![BTreeSet::new(); n],
            inn: vec![BTreeSet::new(); n],
            arc_total: 0,
        }
    }

    pub fn from_arcs(n: usize, arcs: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut d = Digraph::new(n);
        for (u, v) in arcs {
            if !d.add_arc(u, v)? {
                return Err(Error::MalformedInput(format!("duplicate arc {u}->{v}")));
            }
        }
        Ok(d)
    }

    /// Directed cycle through `order` (closing back to the first vertex).
    pub fn cycle(n: usize, order: &[usize]) -> Result<Self> {
        let len = order.len();
        Digraph::from_arcs(n, (0..len).map(|i| (order[i], order[(i + 1) % len])))
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn arc_count(&self) -> usize {
        self.arc_total
    }

    /// Adds `u -> v`; returns `false` if the arc was already present.
    pub fn add_arc(&mut self, u: usize, v: usize) -> Result<bool> {
        if u >= self.n || v >= self.n {
            return Err(Error::MalformedInput(format!(
                "arc {u}->{v} outside vertex range 0..{}",
                self.n
            )));
        }
        if u == v {
            return Err(Error::MalformedInput(format!("loop at vertex {u}")));
        }
        if !self.out[u].insert(v) {
            return Ok(false);
        }
        self.inn[v].insert(u);
        self.arc_total += 1;
        Ok(true)
    }

    pub fn remove_arc(&mut self, u: usize, v: usize) -> bool {
        if u >= self.n || v >= self.n || !self.out[u].remove(&v) {
            return false;
        }
        self.inn[v].remove(&u);
        self.arc_total -= 1;
        true
    }

    pub fn has_arc(&self, u: usize, v: usize) -> bool {
        u < self.n && self.out[u].contains(&v)
    }

    pub fn out_degree(&self, v: usize) -> usize {
        self.out[v].len()
    }

    pub fn in_degree(&self, v: usize) -> usize {
        self.inn[v].len()
    }

    pub fn out_neighbours(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.out[v].iter().copied()
    }

    pub fn in_neighbours(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.inn[v].iter().copied()
    }

    pub fn out_set(&self, v: usize) -> &BTreeSet<usize> {
        &self.out[v]
    }

    pub fn in_set(&self, v: usize) -> &BTreeSet<usize> {
        &self.inn[v]
    }

    /// Arcs in lexicographic order.
    pub fn arcs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.out
            .iter()
            .enumerate()
            .flat_map(|(u, row)| row.iter().map(move |&v| (u, v)))
    }

    /// Vertices incident with at least one arc.
    pub fn touched(&self) -> Vec<usize> {
        (0..self.n)
            .filter(|&v| !self.out[v].is_empty() || !self.inn[v].is_empty())
            .collect()
    }

    /// Forgets orientation; antiparallel pairs become a double edge.
    pub fn to_multigraph(&self) -> crate::graph::Multigraph {
        let mut g = crate::graph::Multigraph::new(self.n);
        for (u, v) in self.arcs() {
            g.add_edge(u, v).expect("digraph arcs are valid edges");
        }
        g
    }

    /// Arc union; arcs present in both appear once.
    pub fn union(&self, other: &Digraph) -> Digraph {
        let mut out = self.clone();
        for (u, v) in other.arcs() {
            out.add_arc(u, v).expect("arc valid in source digraph");
        }
        out
    }

    /// Arcs of `self` not in `other`.
    pub fn minus(&self, other: &Digraph) -> Digraph {
        let mut out = self.clone();
        for (u, v) in other.arcs() {
            out.remove_arc(u, v);
        }
        out
    }

    pub fn is_subgraph_of(&self, other: &Digraph) -> bool {
        self.arcs().all(|(u, v)| other.has_arc(u, v))
    }

    /// Successor map of a digraph with every out-degree at most one.
    pub fn successor_map(&self) -> Vec<Option<usize>> {
        (0..self.n)
            .map(|v| self.out[v].iter().next().copied())
            .collect()
    }

    /// Sub-digraph induced by the flagged vertices (ids kept).
    pub fn induced(&self, mask: &[bool]) -> Digraph {
        let mut d = Digraph::new(self.n);
        for (u, v) in self.arcs() {
            if mask[u] && mask[v] {
                d.add_arc(u, v).unwrap();
            }
        }
        d
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_arc_per_direction() {
        let mut d = Digraph::new(3);
        assert!(d.add_arc(0, 1).unwrap());
        assert!(!d.add_arc(0, 1).unwrap());
        assert!(d.add_arc(1, 0).unwrap());
        assert_eq!(d.arc_count(), 2);
        assert!(d.add_arc(2, 2).is_err());
    }

    #[test]
    fn json_round_trip() {
        let d = Digraph::cycle(3, &[0, 2, 1]).unwrap();
        let text = serde_json::to_string(&d).unwrap();
        assert_eq!(text, r#"{"n":3,"edges":[[0,2],[1,0],[2,1]]}"#);
        let back: Digraph = serde_json::from_str(&text).unwrap();
        assert_eq!(back, d);
    }

    #[test]
    fn duplicate_arc_in_json_rejected() {
        let text = r#"{"n":2,"edges":[[0,1],[0,1]]}"#;
        assert!(serde_json::from_str::<Digraph>(text).is_err());
    }
}
