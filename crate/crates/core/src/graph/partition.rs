use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PartitionMode {
    TwoCliques,
    Bipartite,
    Plain,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    A,
    B,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::A => Side::B,
            Side::B => Side::A,
        }
    }

    pub fn letter(self) -> char {
        match self {
            Side::A => 'A',
            Side::B => 'B',
        }
    }
}

/// A `(K, m, eps0)`-partition `A0, A_1..A_K, B0, B_1..B_K`, or a plain
/// `(k, m)`-equipartition `V_1..V_k`.
///
/// Cluster indices are 0-based. In the two-sided modes `A_{i+1}` is cluster
/// `i` and `B_{i+1}` is cluster `K + i`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "PartitionRecord", into = "PartitionRecord")]
pub struct ClusterPartition {
    mode: PartitionMode,
    n: usize,
    m: usize,
    a0: Vec<usize>,
    b0: Vec<usize>,
    clusters: Vec<Vec<usize>>,
    cluster_of: Vec<Option<usize>>,
    side_of: Vec<Option<Side>>,
}

#[derive(Serialize, Deserialize)]
struct PartitionRecord {
    mode: PartitionMode,
    n: usize,
    #[serde(rename = "A0", default)]
    a0: Vec<usize>,
    #[serde(rename = "A")]
    a: Vec<Vec<usize>>,
    #[serde(rename = "B0", default)]
    b0: Vec<usize>,
    #[serde(rename = "B", default)]
    b: Vec<Vec<usize>>,
}

impl TryFrom<PartitionRecord> for ClusterPartition {
    type Error = Error;

    fn try_from(rec: PartitionRecord) -> Result<Self> {
        match rec.mode {
            PartitionMode::Plain => {
                if !rec.a0.is_empty() || !rec.b0.is_empty() || !rec.b.is_empty() {
                    return Err(Error::MalformedInput(
                        "plain equipartition carries only the A cluster list".into(),
                    ));
                }
                ClusterPartition::plain(rec.n, rec.a)
            }
            mode => ClusterPartition::two_sided(mode, rec.n, rec.a0, rec.a, rec.b0, rec.b),
        }
    }
}

impl From<ClusterPartition> for PartitionRecord {
    fn from(p: ClusterPartition) -> Self {
        let (a, b) = match p.mode {
            PartitionMode::Plain => (p.clusters.clone(), Vec::new()),
            _ => {
                let k = p.clusters.len() / 2;
                (p.clusters[..k].to_vec(), p.clusters[k..].to_vec())
            }
        };
        PartitionRecord {
            mode: p.mode,
            n: p.n,
            a0: p.a0,
            a,
            b0: p.b0,
            b,
        }
    }
}

impl ClusterPartition {
    /// Two-cliques or bipartite partition; every vertex of `0..n` must be covered.
    pub fn two_sided(
        mode: PartitionMode,
        n: usize,
        a0: Vec<usize>,
        a: Vec<Vec<usize>>,
        b0: Vec<usize>,
        b: Vec<Vec<usize>>,
    ) -> Result<Self> {
        if mode == PartitionMode::Plain {
            return Err(Error::InvalidParameter("two_sided needs a two-sided mode".into()));
        }
        if a.len() != b.len() || a.is_empty() {
            return Err(Error::MalformedInput(format!(
                "need equally many A and B clusters, got {} and {}",
                a.len(),
                b.len()
            )));
        }
        let m = a[0].len();
        let mut clusters = a;
        clusters.extend(b);
        let mut p = ClusterPartition {
            mode,
            n,
            m,
            a0,
            b0,
            clusters,
            cluster_of: vec![None; n],
            side_of: vec![None; n],
        };
        p.index()?;
        if let Some(v) = p.side_of.iter().position(Option::is_none) {
            return Err(Error::MalformedInput(format!("vertex {v} lies in no part")));
        }
        Ok(p)
    }

    /// Equipartition of a subset of `0..n` into equal clusters.
    pub fn plain(n: usize, clusters: Vec<Vec<usize>>) -> Result<Self> {
        if clusters.is_empty() {
            return Err(Error::MalformedInput("equipartition needs a cluster".into()));
        }
        let m = clusters[0].len();
        let mut p = ClusterPartition {
            mode: PartitionMode::Plain,
            n,
            m,
            a0: Vec::new(),
            b0: Vec::new(),
            clusters,
            cluster_of: vec![None; n],
            side_of: vec![None; n],
        };
        p.index()?;
        Ok(p)
    }

    fn index(&mut self) -> Result<()> {
        let k = self.clusters.len();
        let two_sided = self.mode != PartitionMode::Plain;
        let mark = |v: usize, side: Side, cluster: Option<usize>, this: &mut Self| -> Result<()> {
            if v >= this.n {
                return Err(Error::MalformedInput(format!("vertex {v} outside 0..{}", this.n)));
            }
            if this.side_of[v].is_some() {
                return Err(Error::MalformedInput(format!("vertex {v} lies in two parts")));
            }
            this.side_of[v] = Some(side);
            this.cluster_of[v] = cluster;
            Ok(())
        };
        for v in self.a0.clone() {
            mark(v, Side::A, None, self)?;
        }
        for v in self.b0.clone() {
            mark(v, Side::B, None, self)?;
        }
        for c in 0..k {
            if self.clusters[c].len() != self.m {
                return Err(Error::MalformedInput(format!(
                    "cluster {c} has size {} but clusters have size {}",
                    self.clusters[c].len(),
                    self.m
                )));
            }
            let side = if two_sided && c >= k / 2 { Side::B } else { Side::A };
            for v in self.clusters[c].clone() {
                mark(v, side, Some(c), self)?;
            }
        }
        Ok(())
    }

    /// Checks `|A0 ∪ B0| <= eps0 * n` in the two-sided modes.
    pub fn validate(&self, eps0: Option<f64>) -> Result<()> {
        if let (Some(eps0), true) = (eps0, self.mode != PartitionMode::Plain) {
            let limit = eps0 * self.n as f64 + 1e-9;
            if (self.a0.len() + self.b0.len()) as f64 > limit {
                return Err(Error::InvalidParameter(format!(
                    "|A0|+|B0| = {} exceeds eps0*n = {:.3}",
                    self.a0.len() + self.b0.len(),
                    limit
                )));
            }
        }
        Ok(())
    }

    pub fn mode(&self) -> PartitionMode {
        self.mode
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Total number of clusters (2K in the two-sided modes, k otherwise).
    pub fn cluster_count(&self) -> usize {
        self.clusters.len()
    }

    /// K in the two-sided modes; k for a plain equipartition.
    pub fn k(&self) -> usize {
        match self.mode {
            PartitionMode::Plain => self.clusters.len(),
            _ => self.clusters.len() / 2,
        }
    }

    pub fn cluster(&self, c: usize) -> &[usize] {
        &self.clusters[c]
    }

    pub fn clusters(&self) -> &[Vec<usize>] {
        &self.clusters
    }

    /// Cluster index of `A_{i+1}` (or `B_{i+1}`).
    pub fn cluster_index(&self, side: Side, i: usize) -> usize {
        match side {
            Side::A => i,
            Side::B => self.k() + i,
        }
    }

    pub fn side_cluster(&self, side: Side, i: usize) -> &[usize] {
        &self.clusters[self.cluster_index(side, i)]
    }

    pub fn a0(&self) -> &[usize] {
        &self.a0
    }

    pub fn b0(&self) -> &[usize] {
        &self.b0
    }

    pub fn exceptional(&self, side: Side) -> &[usize] {
        match side {
            Side::A => &self.a0,
            Side::B => &self.b0,
        }
    }

    /// `V0 = A0 ∪ B0`.
    pub fn v0(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.a0.iter().chain(&self.b0).copied().collect();
        v.sort_unstable();
        v
    }

    pub fn cluster_of(&self, v: usize) -> Option<usize> {
        self.cluster_of.get(v).copied().flatten()
    }

    pub fn side_of(&self, v: usize) -> Option<Side> {
        self.side_of.get(v).copied().flatten()
    }

    pub fn is_exceptional(&self, v: usize) -> bool {
        self.side_of(v).is_some() && self.cluster_of(v).is_none()
    }

    /// Position of `v`'s cluster within its side (so `A_{i+1}` gives `i`).
    pub fn index_in_side(&self, v: usize) -> Option<usize> {
        let c = self.cluster_of(v)?;
        Some(match self.mode {
            PartitionMode::Plain => c,
            _ => c % self.k(),
        })
    }

    /// All vertices on `side`, exceptional ones included (`A'` or `B'`).
    pub fn side_vertices(&self, side: Side) -> Vec<usize> {
        (0..self.n).filter(|&v| self.side_of(v) == Some(side)).collect()
    }

    /// Cluster vertices on `side` (`A` or `B`), in cluster order.
    pub fn side_core(&self, side: Side) -> Vec<usize> {
        let k = self.k();
        let range = match side {
            Side::A => 0..k,
            Side::B => k..2 * k,
        };
        self.clusters[range].iter().flatten().copied().collect()
    }

    pub fn mask(&self, vertices: &[usize]) -> Vec<bool> {
        let mut mask = vec![false; self.n];
        for &v in vertices {
            mask[v] = true;
        }
        mask
    }
}

/// A cyclic order of cluster indices `C = V_{c0} V_{c1} ... V_{c_{k-1}}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct ClusterCycle {
    order: Vec<usize>,
    position: Vec<usize>,
}

impl TryFrom<Vec<usize>> for ClusterCycle {
    type Error = Error;

    fn try_from(order: Vec<usize>) -> Result<Self> {
        ClusterCycle::new(order)
    }
}

impl From<ClusterCycle> for Vec<usize> {
    fn from(c: ClusterCycle) -> Self {
        c.order
    }
}

impl ClusterCycle {
    /// `order` must be a permutation of `0..order.len()`.
    pub fn new(order: Vec<usize>) -> Result<Self> {
        let k = order.len();
        let mut position = vec![usize::MAX; k];
        for (pos, &c) in order.iter().enumerate() {
            if c >= k || position[c] != usize::MAX {
                return Err(Error::MalformedInput(format!(
                    "cluster cycle {order:?} is not a permutation of 0..{k}"
                )));
            }
            position[c] = pos;
        }
        Ok(ClusterCycle { order, position })
    }

    pub fn identity(k: usize) -> Self {
        ClusterCycle::new((0..k).collect()).unwrap()
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn position(&self, cluster: usize) -> usize {
        self.position[cluster]
    }

    pub fn next(&self, cluster: usize) -> usize {
        let k = self.order.len();
        self.order[(self.position[cluster] + 1) % k]
    }

    pub fn prev(&self, cluster: usize) -> usize {
        let k = self.order.len();
        self.order[(self.position[cluster] + k - 1) % k]
    }

    /// Edges `(U, W)` of the cycle in order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let k = self.order.len();
        (0..k).map(move |t| (self.order[t], self.order[(t + 1) % k]))
    }

    /// Same cycle read from another starting cluster.
    pub fn rotated(&self, by: usize) -> ClusterCycle {
        let mut order = self.order.clone();
        if !order.is_empty() {
            let shift = by % order.len();
            order.rotate_left(shift);
        }
        ClusterCycle::new(order).unwrap()
    }
}
