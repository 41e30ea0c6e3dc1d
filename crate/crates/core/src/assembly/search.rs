use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::classic::hopcroft_karp;
use crate::error::{Error, Result};
use crate::graph::{verify_hamilton_cycle, Digraph};

/// Longest run of consecutive cycle vertices moved in one relocation.
const MAX_SEGMENT: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchBudget {
    pub restarts: usize,
    /// Patching and relocation steps allowed per restart, per vertex.
    pub steps_per_vertex: usize,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget {
            restarts: 50,
            steps_per_vertex: 10,
        }
    }
}

/// Directed Hamilton cycle of `d` on all its vertices visiting `waypoints`
/// in cyclic order. `start`, a successor permutation whose arcs lie in `d`,
/// seeds the first attempt.
pub fn find_ordered_hamilton(
    d: &Digraph,
    waypoints: &[usize],
    budget: SearchBudget,
    seed: u64,
    start: Option<&[usize]>,
) -> Result<Digraph> {
    let succ = ordered_hamilton_successors(d, waypoints, budget, seed, start)?;
    Ok(Digraph::from_arcs(d.vertex_count(), succ.iter().copied().enumerate())
        .expect("successors come from arcs of d"))
}

/// As [`find_ordered_hamilton`], returning the successor of every vertex.
pub fn ordered_hamilton_successors(
    d: &Digraph,
    waypoints: &[usize],
    budget: SearchBudget,
    seed: u64,
    start: Option<&[usize]>,
) -> Result<Vec<usize>> {
    let n = d.vertex_count();
    let mut seen = vec![false; n];
    for &w in waypoints {
        if w >= n || std::mem::replace(&mut seen[w], true) {
            return Err(Error::MalformedInput(format!(
                "waypoint {w} is repeated or outside 0..{n}"
            )));
        }
    }
    if let Some(s) = start {
        let is_perm = s.len() == n && {
            let mut hit = vec![false; n];
            s.iter().all(|&w| w < n && !std::mem::replace(&mut hit[w], true))
        };
        if !is_perm || s.iter().enumerate().any(|(u, &w)| !d.has_arc(u, w)) {
            return Err(Error::MalformedInput(
                "start cover is not a permutation along arcs of the digraph".into(),
            ));
        }
    }
    let exhausted = |restarts| Error::HamiltonSearchExhausted { restarts, vertices: n };
    if n < 2 {
        return Err(exhausted(0));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let adjacency: Vec<Vec<usize>> = (0..n).map(|v| d.out_neighbours(v).collect()).collect();
    for attempt in 0..budget.restarts.max(1) {
        let cover = match (attempt, start) {
            (0, Some(s)) => Some(s.to_vec()),
            _ => random_cover(&adjacency, &mut rng),
        };
        // Without a cycle cover there is no Hamilton cycle at all.
        let Some(mut succ) = cover else {
            return Err(exhausted(attempt));
        };
        let mut steps = budget.steps_per_vertex.max(1) * n;
        if patch_cycles(d, &mut succ, &mut rng, &mut steps)
            && order_waypoints(d, &mut succ, waypoints, &mut rng, &mut steps)
        {
            let cycle = Digraph::from_arcs(n, succ.iter().copied().enumerate())?;
            let all: Vec<usize> = (0..n).collect();
            if verify_hamilton_cycle(&cycle, &all)
                && cycle.is_subgraph_of(d)
                && in_cyclic_order(&succ, waypoints)
            {
                return Ok(succ);
            }
        }
    }
    Err(exhausted(budget.restarts.max(1)))
}

/// Cycle cover from a perfect matching of tails to heads, on a random
/// relabelling so restarts see different covers.
fn random_cover(adjacency: &[Vec<usize>], rng: &mut ChaCha8Rng) -> Option<Vec<usize>> {
    let n = adjacency.len();
    let mut label: Vec<usize> = (0..n).collect();
    label.shuffle(rng);
    let mut unlabel = vec![0; n];
    for (v, &l) in label.iter().enumerate() {
        unlabel[l] = v;
    }
    let adj: Vec<Vec<usize>> = (0..n)
        .map(|l| {
            let mut out: Vec<usize> = adjacency[unlabel[l]].iter().map(|&w| label[w]).collect();
            out.shuffle(rng);
            out
        })
        .collect();
    let mate = hopcroft_karp(n, &adj);
    let mut succ = vec![0; n];
    for (l, r) in mate.into_iter().enumerate() {
        succ[unlabel[l]] = unlabel[r?];
    }
    Some(succ)
}

fn cycle_labels(succ: &[usize]) -> (Vec<usize>, usize) {
    let n = succ.len();
    let mut label = vec![usize::MAX; n];
    let mut count = 0;
    for v in 0..n {
        if label[v] != usize::MAX {
            continue;
        }
        let mut cur = v;
        while label[cur] == usize::MAX {
            label[cur] = count;
            cur = succ[cur];
        }
        count += 1;
    }
    (label, count)
}

/// Merges the cycles of `succ` into one by exchanging successors of two
/// vertices on different cycles.
fn patch_cycles(d: &Digraph, succ: &mut [usize], rng: &mut ChaCha8Rng, steps: &mut usize) -> bool {
    let n = succ.len();
    loop {
        let (label, count) = cycle_labels(succ);
        if count == 1 {
            return true;
        }
        if *steps == 0 {
            return false;
        }
        *steps -= 1;
        let mut sizes = vec![0usize; count];
        label.iter().for_each(|&l| sizes[l] += 1);
        let smallest = (0..count).min_by_key(|&l| sizes[l]).expect("at least two cycles");
        let mut inside: Vec<usize> = (0..n).filter(|&v| label[v] == smallest).collect();
        let mut outside: Vec<usize> = (0..n).filter(|&v| label[v] != smallest).collect();
        inside.shuffle(rng);
        outside.shuffle(rng);
        let exchange = inside.iter().find_map(|&a| {
            outside
                .iter()
                .find(|&&b| d.has_arc(a, succ[b]) && d.has_arc(b, succ[a]))
                .map(|&b| (a, b))
        });
        match exchange {
            Some((a, b)) => succ.swap(a, b),
            None => return false,
        }
    }
}

fn positions(succ: &[usize], from: usize) -> Vec<usize> {
    let mut pos = vec![0; succ.len()];
    let mut cur = from;
    for step in 0..succ.len() {
        pos[cur] = step;
        cur = succ[cur];
    }
    pos
}

fn in_cyclic_order(succ: &[usize], waypoints: &[usize]) -> bool {
    let Some(&first) = waypoints.first() else {
        return true;
    };
    let pos = positions(succ, first);
    waypoints.windows(2).all(|w| pos[w[0]] < pos[w[1]])
}

/// Moves out-of-order waypoints, each with a short run of neighbours, to a
/// point after their predecessor in the order.
fn order_waypoints(
    d: &Digraph,
    succ: &mut [usize],
    waypoints: &[usize],
    rng: &mut ChaCha8Rng,
    steps: &mut usize,
) -> bool {
    let n = succ.len();
    let mut is_waypoint = vec![false; n];
    waypoints.iter().for_each(|&w| is_waypoint[w] = true);
    loop {
        let Some(&first) = waypoints.first() else {
            return true;
        };
        let pos = positions(succ, first);
        let Some(j) = (1..waypoints.len()).find(|&j| pos[waypoints[j]] < pos[waypoints[j - 1]]) else {
            return true;
        };
        if *steps == 0 {
            return false;
        }
        *steps -= 1;
        let v = waypoints[j];
        let after = pos[waypoints[j - 1]];
        let mut pred = vec![0; n];
        for (u, &w) in succ.iter().enumerate() {
            pred[w] = u;
        }
        let mut targets: Vec<usize> = (0..n).filter(|&x| pos[x] >= after).collect();
        targets.shuffle(rng);

        let mut moved = false;
        'search: for len in 1..=MAX_SEGMENT.min(n - 2) {
            for back in 0..len {
                // Segment a..=b of `len` vertices with v at offset `back`.
                let mut a = v;
                for _ in 0..back {
                    a = pred[a];
                }
                let mut b = a;
                let mut members = vec![a];
                for _ in 1..len {
                    b = succ[b];
                    members.push(b);
                }
                if members.iter().any(|&x| x != v && is_waypoint[x]) || members.contains(&first) {
                    continue;
                }
                let (before, beyond) = (pred[a], succ[b]);
                if !d.has_arc(before, beyond) {
                    continue;
                }
                for &x in &targets {
                    let y = succ[x];
                    if members.contains(&x) || members.contains(&y) || x == before {
                        continue;
                    }
                    if d.has_arc(x, a) && d.has_arc(b, y) {
                        succ[before] = beyond;
                        succ[x] = a;
                        succ[b] = y;
                        moved = true;
                        break 'search;
                    }
                }
            }
        }
        if !moved {
            return false;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn complete(n: usize) -> Digraph {
        Digraph::from_arcs(n, (0..n).flat_map(|u| (0..n).filter(move |&v| v != u).map(move |v| (u, v)))).unwrap()
    }

    #[test]
    fn complete_digraph_with_waypoints() {
        let d = complete(8);
        let c = find_ordered_hamilton(&d, &[3, 5, 1], SearchBudget::default(), 1, None).unwrap();
        assert!(verify_hamilton_cycle(&c, &(0..8).collect::<Vec<_>>()));
        let succ: Vec<usize> = (0..8).map(|v| c.out_neighbours(v).next().unwrap()).collect();
        assert!(in_cyclic_order(&succ, &[3, 5, 1]));
    }

    #[test]
    fn dense_random_without_waypoints() {
        let n = 40;
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let arcs: Vec<(usize, usize)> = (0..n)
            .flat_map(|u| (0..n).map(move |v| (u, v)))
            .filter(|&(u, v)| u != v)
            .filter(|_| rng.gen_bool(0.8))
            .collect();
        let d = Digraph::from_arcs(n, arcs).unwrap();
        let c = find_ordered_hamilton(&d, &[], SearchBudget::default(), 2, None).unwrap();
        assert!(verify_hamilton_cycle(&c, &(0..n).collect::<Vec<_>>()));
        assert!(c.is_subgraph_of(&d));
    }

    #[test]
    fn directed_path_is_exhausted() {
        let d = Digraph::from_arcs(5, [(0, 1), (1, 2), (2, 3), (3, 4)]).unwrap();
        let err = find_ordered_hamilton(&d, &[], SearchBudget::default(), 0, None).unwrap_err();
        assert!(matches!(err, Error::HamiltonSearchExhausted { .. }));
    }

    #[test]
    fn sparse_random_with_many_waypoints() {
        let n = 36;
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let arcs: Vec<(usize, usize)> = (0..n)
            .flat_map(|u| (0..n).map(move |v| (u, v)))
            .filter(|&(u, v)| u != v)
            .filter(|_| rng.gen_bool(0.35))
            .collect();
        let d = Digraph::from_arcs(n, arcs).unwrap();
        let wps = [7, 2, 30, 11, 19, 4];
        let c = find_ordered_hamilton(&d, &wps, SearchBudget::default(), 5, None).unwrap();
        let succ: Vec<usize> = (0..n).map(|v| c.out_neighbours(v).next().unwrap()).collect();
        assert!(in_cyclic_order(&succ, &wps));
    }

    #[test]
    fn start_cover_is_checked() {
        let d = complete(4);
        assert!(matches!(
            find_ordered_hamilton(&d, &[], SearchBudget::default(), 0, Some(&[0, 1, 2, 3])),
            Err(Error::MalformedInput(_))
        ));
        let c = find_ordered_hamilton(&d, &[], SearchBudget::default(), 0, Some(&[1, 0, 3, 2])).unwrap();
        assert!(verify_hamilton_cycle(&c, &[0, 1, 2, 3]));
    }

    #[test]
    fn repeated_waypoint_is_rejected() {
        let d = complete(4);
        assert!(find_ordered_hamilton(&d, &[1, 1], SearchBudget::default(), 0, None).is_err());
    }
}
