use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::graph::Multigraph;

/// Parameters `(eps, d, d*, c)` of a superregular pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SuperregularParams {
    pub eps: f64,
    pub d: f64,
    pub d_star: f64,
    pub c: f64,
}

impl SuperregularParams {
    pub fn new(eps: f64, d: f64, d_star: f64, c: f64) -> Self {
        SuperregularParams { eps, d, d_star, c }
    }
}

/// How the density condition is checked.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Reg1Plan {
    /// Exhaustive when `m <= 12`, sampled otherwise.
    Auto { trials: usize, seed: u64 },
    Sampled { trials: usize, seed: u64 },
    /// Every pair of sets; pairs with more than 20 vertices per class fall
    /// back to 1000 sampled trials.
    Exhaustive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Reg1Mode {
    Exhaustive,
    Sampled,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Reg1Evidence {
    pub mode: Reg1Mode,
    pub holds: bool,
    pub pairs_tested: usize,
    /// Largest `|d(A,B)/d - 1|` seen.
    pub worst_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuperregularityReport {
    pub params: SuperregularParams,
    pub reg1: Reg1Evidence,
    pub reg2: bool,
    pub max_codegree: usize,
    pub reg3: bool,
    pub max_degree: usize,
    pub reg4: bool,
    pub min_degree: usize,
}

impl SuperregularityReport {
    pub fn all_hold(&self) -> bool {
        self.reg1.holds && self.reg2 && self.reg3 && self.reg4
    }

    /// The exactly checked conditions only.
    pub fn exact_hold(&self) -> bool {
        self.reg2 && self.reg3 && self.reg4
    }

    pub fn failures(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        if !self.reg1.holds {
            out.push("Reg1");
        }
        if !self.reg2 {
            out.push("Reg2");
        }
        if !self.reg3 {
            out.push("Reg3");
        }
        if !self.reg4 {
            out.push("Reg4");
        }
        out
    }
}

const SLACK: f64 = 1e-9;

/// Neighbourhoods of one class inside the other, as bitsets over local positions.
struct PairView {
    rows_u: Vec<Vec<u64>>,
    rows_v: Vec<Vec<u64>>,
    deg_u: Vec<usize>,
    deg_v: Vec<usize>,
}

fn bitset(len: usize) -> Vec<u64> {
    vec![0; len.div_ceil(64)]
}

fn view(g: &Multigraph, u: &[usize], v: &[usize]) -> PairView {
    let n = g.vertex_count();
    let mut pos_v = vec![usize::MAX; n];
    for (j, &w) in v.iter().enumerate() {
        pos_v[w] = j;
    }
    let mut rows_u = vec![bitset(v.len()); u.len()];
    let mut rows_v = vec![bitset(u.len()); v.len()];
    let mut deg_u = vec![0; u.len()];
    let mut deg_v = vec![0; v.len()];
    for (i, &x) in u.iter().enumerate() {
        for (w, mult) in g.neighbours(x) {
            let j = pos_v[w];
            if j == usize::MAX {
                continue;
            }
            rows_u[i][j / 64] |= 1 << (j % 64);
            rows_v[j][i / 64] |= 1 << (i % 64);
            deg_u[i] += mult;
            deg_v[j] += mult;
        }
    }
    PairView {
        rows_u,
        rows_v,
        deg_u,
        deg_v,
    }
}

fn max_codegree(rows: &[Vec<u64>]) -> usize {
    let mut best = 0;
    for a in 0..rows.len() {
        for b in a + 1..rows.len() {
            let common: u32 = rows[a]
                .iter()
                .zip(&rows[b])
                .map(|(x, y)| (x & y).count_ones())
                .sum();
            best = best.max(common as usize);
        }
    }
    best
}

/// Checks (Reg1)-(Reg4) for the bipartite graph `g[u, v]`.
///
/// (Reg2)-(Reg4) are exact. (Reg1) is exact over all subsets when the plan
/// allows it; otherwise random pairs of sets of size `ceil(eps m)` are tested.
pub fn check_superregular(
    g: &Multigraph,
    u: &[usize],
    v: &[usize],
    params: SuperregularParams,
    plan: Reg1Plan,
) -> SuperregularityReport {
    let m = u.len();
    let pv = view(g, u, v);
    let mf = m as f64;

    let codegree = max_codegree(&pv.rows_u).max(max_codegree(&pv.rows_v));
    let max_degree = pv.deg_u.iter().chain(&pv.deg_v).copied().max().unwrap_or(0);
    let min_degree = pv.deg_u.iter().chain(&pv.deg_v).copied().min().unwrap_or(0);

    let exhaustive = match plan {
        Reg1Plan::Exhaustive => m <= 20,
        Reg1Plan::Auto { .. } => m <= 12,
        Reg1Plan::Sampled { .. } => false,
    };
    let reg1 = if exhaustive {
        reg1_exhaustive(&pv, m, params)
    } else {
        let (trials, seed) = match plan {
            Reg1Plan::Auto { trials, seed } | Reg1Plan::Sampled { trials, seed } => (trials, seed),
            Reg1Plan::Exhaustive => (1000, 0),
        };
        reg1_sampled(&pv, m, params, trials, seed)
    };

    SuperregularityReport {
        params,
        reg1,
        reg2: codegree as f64 <= params.c * params.c * mf + SLACK,
        max_codegree: codegree,
        reg3: max_degree as f64 <= params.c * mf + SLACK,
        max_degree,
        reg4: min_degree as f64 + SLACK >= params.d_star * mf,
        min_degree,
    }
}

fn min_set_size(m: usize, eps: f64) -> usize {
    ((eps * m as f64) - SLACK).ceil().max(1.0) as usize
}

fn ratio(edges: usize, a: usize, b: usize, d: f64) -> f64 {
    let density = edges as f64 / (a * b) as f64;
    if d > 0.0 {
        (density / d - 1.0).abs()
    } else if density == 0.0 {
        0.0
    } else {
        f64::INFINITY
    }
}

/// For every `A` the extreme sets `B` of each size are the ones taking the
/// smallest or largest degrees into `A`, so only `A` needs enumerating.
fn reg1_exhaustive(pv: &PairView, m: usize, params: SuperregularParams) -> Reg1Evidence {
    let size_u = pv.rows_u.len();
    let size_v = pv.rows_v.len();
    let lo = min_set_size(m, params.eps);
    let mut worst: f64 = 0.0;
    let mut tested = 0usize;
    let mut degs = vec![0usize; size_v];
    if lo <= size_u && lo <= size_v {
        for mask in 1u32..(1u32 << size_u) {
            let a = mask.count_ones() as usize;
            if a < lo {
                continue;
            }
            for (j, d) in degs.iter_mut().enumerate() {
                let row = pv.rows_v[j][0] as u32;
                *d = (row & mask).count_ones() as usize;
            }
            degs.sort_unstable();
            let mut low_sum = 0;
            let mut high_sum = 0;
            for b in 1..=size_v {
                low_sum += degs[b - 1];
                high_sum += degs[size_v - b];
                if b < lo {
                    continue;
                }
                tested += 2;
                worst = worst
                    .max(ratio(low_sum, a, b, params.d))
                    .max(ratio(high_sum, a, b, params.d));
            }
        }
    }
    Reg1Evidence {
        mode: Reg1Mode::Exhaustive,
        holds: worst <= params.eps + SLACK,
        pairs_tested: tested,
        worst_ratio: worst,
    }
}

fn reg1_sampled(
    pv: &PairView,
    m: usize,
    params: SuperregularParams,
    trials: usize,
    seed: u64,
) -> Reg1Evidence {
    let size_u = pv.rows_u.len();
    let size_v = pv.rows_v.len();
    let size = min_set_size(m, params.eps).min(size_u).min(size_v);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pool_u: Vec<usize> = (0..size_u).collect();
    let mut pool_v: Vec<usize> = (0..size_v).collect();
    let mut worst: f64 = 0.0;
    for _ in 0..trials {
        let (a, _) = pool_u.partial_shuffle(&mut rng, size);
        let (b, _) = pool_v.partial_shuffle(&mut rng, size);
        let mut in_b = bitset(size_v);
        for &j in b.iter() {
            in_b[j / 64] |= 1 << (j % 64);
        }
        let edges: u32 = a
            .iter()
            .map(|&i| {
                pv.rows_u[i]
                    .iter()
                    .zip(&in_b)
                    .map(|(x, y)| (x & y).count_ones())
                    .sum::<u32>()
            })
            .sum();
        worst = worst.max(ratio(edges as usize, size, size, params.d));
    }
    Reg1Evidence {
        mode: Reg1Mode::Sampled,
        holds: worst <= params.eps + SLACK,
        pairs_tested: trials,
        worst_ratio: worst,
    }
}
