use std::collections::VecDeque;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{CutWitness, Error, Result};
use crate::graph::Multigraph;

/// Integral max-flow by blocking flows.
#[derive(Debug, Clone)]
pub struct FlowNetwork {
    head: Vec<usize>,
    cap: Vec<usize>,
    adj: Vec<Vec<usize>>,
}

impl FlowNetwork {
    pub fn new(nodes: usize) -> Self {
        FlowNetwork {
            head: Vec::new(),
            cap: Vec::new(),
            adj: vec![Vec::new(); nodes],
        }
    }

    /// Adds `u -> v` with capacity `c`; returns the arc id.
    pub fn add_arc(&mut self, u: usize, v: usize, c: usize) -> usize {
        let id = self.head.len();
        self.head.push(v);
        self.cap.push(c);
        self.adj[u].push(id);
        self.head.push(u);
        self.cap.push(0);
        self.adj[v].push(id + 1);
        id
    }

    /// Flow currently carried by arc `id`.
    pub fn flow_on(&self, id: usize) -> usize {
        self.cap[id ^ 1]
    }

    fn levels(&self, s: usize) -> Vec<usize> {
        let mut level = vec![usize::MAX; self.adj.len()];
        level[s] = 0;
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            for &id in &self.adj[u] {
                let v = self.head[id];
                if self.cap[id] > 0 && level[v] == usize::MAX {
                    level[v] = level[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        level
    }

    fn push(&mut self, s: usize, t: usize, level: &[usize], iter: &mut [usize]) -> usize {
        let mut path: Vec<usize> = Vec::new();
        let mut u = s;
        loop {
            if u == t {
                let amount = path.iter().map(|&id| self.cap[id]).min().unwrap_or(0);
                for &id in &path {
                    self.cap[id] -= amount;
                    self.cap[id ^ 1] += amount;
                }
                return amount;
            }
            let mut advanced = false;
            while iter[u] < self.adj[u].len() {
                let id = self.adj[u][iter[u]];
                let v = self.head[id];
                if self.cap[id] > 0 && level[v] == level[u] + 1 {
                    path.push(id);
                    u = v;
                    advanced = true;
                    break;
                }
                iter[u] += 1;
            }
            if !advanced {
                match path.pop() {
                    Some(id) => {
                        u = self.head[id ^ 1];
                        iter[u] += 1;
                    }
                    None => return 0,
                }
            }
        }
    }

    pub fn max_flow(&mut self, s: usize, t: usize) -> usize {
        let mut total = 0;
        loop {
            let level = self.levels(s);
            if level[t] == usize::MAX {
                return total;
            }
            let mut iter = vec![0usize; self.adj.len()];
            loop {
                let pushed = self.push(s, t, &level, &mut iter);
                if pushed == 0 {
                    break;
                }
                total += pushed;
            }
        }
    }

    /// Nodes reachable from `s` in the residual network.
    pub fn residual_reach(&self, s: usize) -> Vec<bool> {
        self.levels(s).into_iter().map(|l| l != usize::MAX).collect()
    }
}

/// Degree target `floor((1 - mu - rho) m)`, guarded against float round-off.
pub fn degree_target(m: usize, mu: f64, rho: f64) -> usize {
    ((1.0 - mu - rho) * m as f64 + 1e-9).floor().max(0.0) as usize
}

/// Spanning `floor((1 - mu - rho) m)`-regular subgraph of the bipartite `gamma[u, v]`.
pub fn regular_spanning_subgraph(
    gamma: &Multigraph,
    u: &[usize],
    v: &[usize],
    mu: f64,
    rho: f64,
) -> Result<Multigraph> {
    let m = u.len();
    regular_subgraph(gamma, u, v, degree_target(m, mu, rho), None)
}

/// Spanning `r`-regular subgraph of `gamma[u, v]` via the source/sink
/// network with capacities `r`, multiplicity, `r`. A seed shuffles the arc
/// order so different seeds extract different subgraphs.
pub fn regular_subgraph(
    gamma: &Multigraph,
    u: &[usize],
    v: &[usize],
    r: usize,
    seed: Option<u64>,
) -> Result<Multigraph> {
    let m = u.len();
    if v.len() != m {
        return Err(Error::InvalidParameter(format!(
            "classes must have equal size, got {} and {}",
            m,
            v.len()
        )));
    }
    let n = gamma.vertex_count();
    let mut right_pos = vec![usize::MAX; n];
    for (j, &w) in v.iter().enumerate() {
        right_pos[w] = j;
    }
    let source = 2 * m;
    let sink = 2 * m + 1;
    let mut net = FlowNetwork::new(2 * m + 2);
    let mut rng = seed.map(ChaCha8Rng::seed_from_u64);

    let mut left_order: Vec<usize> = (0..m).collect();
    if let Some(rng) = rng.as_mut() {
        left_order.shuffle(rng);
    }
    for &i in &left_order {
        net.add_arc(source, i, r);
    }
    let mut middle: Vec<(usize, usize, usize)> = Vec::new();
    for &i in &left_order {
        let mut row: Vec<(usize, usize)> = gamma
            .neighbours(u[i])
            .filter(|(w, _)| right_pos[*w] != usize::MAX)
            .map(|(w, mult)| (right_pos[w], mult))
            .collect();
        if let Some(rng) = rng.as_mut() {
            row.shuffle(rng);
        }
        for (j, mult) in row {
            let id = net.add_arc(i, m + j, mult);
            middle.push((id, i, j));
        }
    }
    for j in 0..m {
        net.add_arc(m + j, sink, r);
    }

    let flow = net.max_flow(source, sink);
    let target = r * m;
    if flow < target {
        let reach = net.residual_reach(source);
        let s1: Vec<usize> = (0..m).filter(|&i| reach[i]).map(|i| u[i]).collect();
        let s2: Vec<usize> = (0..m).filter(|&j| reach[m + j]).map(|j| v[j]).collect();
        let mut in_s2 = vec![false; n];
        for &w in &s2 {
            in_s2[w] = true;
        }
        let edges_out: usize = s1
            .iter()
            .map(|&x| {
                gamma
                    .neighbours(x)
                    .filter(|(w, _)| right_pos[*w] != usize::MAX && !in_s2[*w])
                    .map(|(_, mult)| mult)
                    .sum::<usize>()
            })
            .sum();
        return Err(Error::DegreeHypothesisViolated {
            target,
            flow,
            cut: CutWitness {
                s1,
                s2,
                edges_s1_to_outside: edges_out,
                degree: r,
            },
        });
    }
    let mut out = Multigraph::new(n);
    for (id, i, j) in middle {
        let f = net.flow_on(id);
        if f > 0 {
            out.add_edge_mult(u[i], v[j], f)?;
        }
    }
    Ok(out)
}
