use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::assembly::factors::{extend_to_one_factors, free_classes};
use crate::assembly::rewire::{merge_to_hamilton, reorder_for_consistency, MergeWindow, RewirePolicy};
use crate::assembly::search::SearchBudget;
use crate::cyclic::{reserve_sparse, sample_reservoir, CyclicSystem, ReserveParams};
use crate::error::{Error, Result};
use crate::extension::BalancedExtension;
use crate::graph::{is_consistent_with, verify_hamilton_cycle, Digraph, Multigraph};
use crate::seed;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AssemblyParams {
    pub policy: RewirePolicy,
    pub budget: SearchBudget,
    pub seed: u64,
}

impl Default for AssemblyParams {
    fn default() -> Self {
        AssemblyParams {
            policy: RewirePolicy::Economical,
            budget: SearchBudget::default(),
            seed: 0,
        }
    }
}

/// How the reservoir of one pair of consecutive clusters was obtained.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairReservoir {
    pub from: usize,
    pub to: usize,
    /// Whether the superregularity and degree checks passed.
    pub verified: bool,
    pub attempts: usize,
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SliceReservoir {
    pub reservoir: Digraph,
    pub pairs: Vec<PairReservoir>,
}

/// Drops edges of `h` until every vertex has at most `cap(v)` of them,
/// taking the vertex furthest over its cap first.
fn cap_degrees(h: &mut Multigraph, vertices: &[usize], cap: impl Fn(usize) -> usize) {
    for &u in vertices {
        while h.degree(u) > cap(u) {
            let w = h
                .neighbours(u)
                .map(|(w, _)| w)
                .max_by_key(|&w| (h.degree(w) as isize - cap(w) as isize, w))
                .expect("positive degree");
            h.remove_edge(u, w);
        }
    }
}

/// Reservoir `H` of a cyclic system: a sparse superregular piece of every
/// pair of consecutive clusters, oriented along the cycle. A pair where no
/// sample passes the checks keeps an unchecked sample, with degrees capped
/// so the remainder keeps `(1 - mu - 4 gamma) m` and `H` at most
/// `3 gamma m`, and says so.
pub fn carve_reservoir(system: &CyclicSystem, params: ReserveParams, seed: u64) -> Result<SliceReservoir> {
    let (graph, q, c) = (system.graph(), system.partition(), system.cycle());
    let n = graph.vertex_count();
    let mut reservoir = Digraph::new(n);
    let mut pairs = Vec::with_capacity(c.len());
    for (from, to) in c.edges() {
        let (left, right) = (q.cluster(from), q.cluster(to));
        let mut pair = Multigraph::new(n);
        for &u in left {
            for w in graph.out_neighbours(u) {
                pair.add_edge(u, w)?;
            }
        }
        let pair_seed = seed::derive(seed, &[from as u64, to as u64]);
        let (h, record) = match reserve_sparse(&pair, left, right, params, pair_seed) {
            Ok(r) => (
                r.reservoir,
                PairReservoir {
                    from,
                    to,
                    verified: true,
                    attempts: r.attempts,
                    note: None,
                },
            ),
            Err(Error::SamplingFailed { attempts, reason }) => {
                let mut rng = ChaCha8Rng::seed_from_u64(pair_seed);
                let mut h = sample_reservoir(&pair, left, right, params.gamma, &mut rng);
                let m = left.len() as f64;
                let most = (3.0 * params.gamma * m + 1e-9).floor() as usize;
                let keep = ((1.0 - params.mu - 4.0 * params.gamma) * m - 1e-9).ceil().max(0.0) as usize;
                let cap = |v: usize| most.min(pair.degree(v).saturating_sub(keep));
                let both: Vec<usize> = left.iter().chain(right).copied().collect();
                cap_degrees(&mut h, &both, cap);
                (
                    h,
                    PairReservoir {
                        from,
                        to,
                        verified: false,
                        attempts,
                        note: Some(reason),
                    },
                )
            }
            Err(e) => return Err(e),
        };
        for &u in left {
            for (w, _) in h.neighbours(u) {
                reservoir.add_arc(u, w)?;
            }
        }
        pairs.push(record);
    }
    Ok(SliceReservoir { reservoir, pairs })
}

/// Hamilton cycles of one cyclic system, one per sequence of the extension.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SliceAssembly {
    pub cycles: Vec<Digraph>,
    pub factors: Vec<Digraph>,
    /// Reservoir arcs consumed by the merges.
    pub reservoir_used: usize,
}

/// Builds one Hamilton cycle on the clusters for every sequence of `be`:
/// complete the sequences to 1-factors of the system minus `reservoir`,
/// merge each factor's cycles through the reservoir pair by pair, then
/// rewire the pair leaving the extension cluster so the cycle meets the
/// ordered matching in order. Reservoir arcs used by one cycle are
/// unavailable to the later ones.
pub fn assemble_slice(
    system: &CyclicSystem,
    be: &BalancedExtension,
    reservoir: &Digraph,
    params: &AssemblyParams,
) -> Result<SliceAssembly> {
    let (graph, q, c) = (system.graph(), system.partition(), system.cycle());
    let n = graph.vertex_count();
    if !reservoir.is_subgraph_of(graph) {
        return Err(Error::MalformedInput("reservoir is not part of the cyclic system".into()));
    }
    let available = graph.minus(reservoir);
    let factors = extend_to_one_factors(&available, q, c, &be.sequences)?;
    let vertices: Vec<usize> = {
        let mut v: Vec<usize> = q.clusters().iter().flatten().copied().collect();
        v.sort_unstable();
        v
    };

    let mut ledger = reservoir.clone();
    let mut cycles = Vec::with_capacity(be.len());
    for (s, factor) in factors.iter().enumerate() {
        let ps = be.sequences[s].to_digraph(n)?;
        let home = be.extension_clusters[s];
        let windows: Vec<MergeWindow> = (1..=c.len())
            .map(|step| {
                let from = c.order()[(c.position(home) + step) % c.len()];
                let (tails, heads) = free_classes(&ps, q, from, c.next(from));
                MergeWindow { tails, heads }
            })
            .collect();
        let slot_seed = seed::derive(params.seed, &[s as u64]);
        let merged = merge_to_hamilton(factor, &ledger, &windows, params.policy, params.budget, slot_seed)?;
        let order = waypoints(be, s)?;
        let home_window = windows.last().expect("the cycle has clusters");
        let cycle = reorder_for_consistency(
            &merged,
            &ledger,
            home_window,
            &order,
            params.policy,
            params.budget,
            seed::derive(slot_seed, &[u64::MAX]),
        )?;

        let fail = |what: String| Error::AssemblyVerificationFailed(format!("cycle {s}: {what}"));
        if !verify_hamilton_cycle(&cycle, &vertices) {
            return Err(fail("not a Hamilton cycle on the clusters".into()));
        }
        if !ps.is_subgraph_of(&cycle) {
            return Err(fail("misses an arc of its path sequence".into()));
        }
        if !is_consistent_with(&cycle, &be.matchings[s])? {
            return Err(fail("not consistent with its ordered matching".into()));
        }
        for (u, w) in cycle.minus(factor).arcs() {
            if !ledger.remove_arc(u, w) {
                return Err(fail(format!("arc {u}->{w} is neither in its factor nor in the reservoir left")));
            }
        }
        cycles.push(cycle);
    }
    Ok(SliceAssembly {
        reservoir_used: reservoir.arc_count() - ledger.arc_count(),
        cycles,
        factors,
    })
}

/// Final vertices of the paths carrying the arcs of the ordered matching,
/// in the matching's order.
fn waypoints(be: &BalancedExtension, s: usize) -> Result<Vec<usize>> {
    let ps = &be.sequences[s];
    be.matchings[s]
        .arcs()
        .iter()
        .map(|&(u, v)| {
            ps.paths
                .iter()
                .find(|p| p.windows(2).any(|w| (w[0], w[1]) == (u, v)))
                .map(|p| *p.last().expect("paths are non-empty"))
                .ok_or_else(|| Error::MalformedInput(format!("arc {u}->{v} is missing from sequence {s}")))
        })
        .collect()
}
