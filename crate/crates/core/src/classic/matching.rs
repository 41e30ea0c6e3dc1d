use std::collections::VecDeque;

use crate::error::{Error, HallWitness, Result};
use crate::graph::Multigraph;

const FREE: usize = usize::MAX;

/// Maximum matching in a bipartite graph given as left-to-right adjacency lists.
///
/// Returns `mate[l]` for every left vertex.
pub fn hopcroft_karp(right_count: usize, adj: &[Vec<usize>]) -> Vec<Option<usize>> {
    let left_count = adj.len();
    let mut mate_l = vec![FREE; left_count];
    let mut mate_r = vec![FREE; right_count];
    let mut dist = vec![0usize; left_count];

    loop {
        // Layered BFS from free left vertices.
        let mut queue = VecDeque::new();
        let mut found = false;
        for l in 0..left_count {
            if mate_l[l] == FREE {
                dist[l] = 0;
                queue.push_back(l);
            } else {
                dist[l] = usize::MAX;
            }
        }
        while let Some(l) = queue.pop_front() {
            for &r in &adj[l] {
                let next = mate_r[r];
                if next == FREE {
                    found = true;
                } else if dist[next] == usize::MAX {
                    dist[next] = dist[l] + 1;
                    queue.push_back(next);
                }
            }
        }
        if !found {
            break;
        }
        let mut iter = vec![0usize; left_count];
        for l in 0..left_count {
            if mate_l[l] == FREE {
                augment(l, adj, &mut mate_l, &mut mate_r, &mut dist, &mut iter);
            }
        }
    }
    mate_l
        .into_iter()
        .map(|r| (r != FREE).then_some(r))
        .collect()
}

fn augment(
    start: usize,
    adj: &[Vec<usize>],
    mate_l: &mut [usize],
    mate_r: &mut [usize],
    dist: &mut [usize],
    iter: &mut [usize],
) -> bool {
    // Iterative DFS along the layered graph.
    let mut stack: Vec<usize> = vec![start];
    let mut via: Vec<usize> = Vec::new();
    while let Some(&l) = stack.last() {
        if iter[l] < adj[l].len() {
            let r = adj[l][iter[l]];
            iter[l] += 1;
            let next = mate_r[r];
            if next == FREE {
                via.push(r);
                for (depth, &lv) in stack.iter().enumerate() {
                    let rv = via[depth];
                    mate_l[lv] = rv;
                    mate_r[rv] = lv;
                }
                return true;
            }
            if dist[next] == dist[l] + 1 {
                via.push(r);
                stack.push(next);
            }
        } else {
            dist[l] = usize::MAX;
            stack.pop();
            via.pop();
        }
    }
    false
}

/// Perfect matching or a Hall violator (in local indices).
pub fn perfect_matching(right_count: usize, adj: &[Vec<usize>]) -> Result<Vec<usize>> {
    if adj.len() != right_count {
        return Err(Error::InvalidParameter(format!(
            "perfect matching needs equal sides, got {} and {right_count}",
            adj.len()
        )));
    }
    let mate = hopcroft_karp(right_count, adj);
    if mate.iter().all(Option::is_some) {
        return Ok(mate.into_iter().map(Option::unwrap).collect());
    }
    Err(Error::MatchingInfeasible {
        witness: hall_violator(right_count, adj, &mate),
    })
}

/// Left vertices reachable from unmatched ones by alternating paths, with
/// their neighbourhood; the neighbourhood is strictly smaller.
pub fn hall_violator(right_count: usize, adj: &[Vec<usize>], mate: &[Option<usize>]) -> HallWitness {
    let mut mate_r = vec![FREE; right_count];
    for (l, r) in mate.iter().enumerate() {
        if let Some(r) = r {
            mate_r[*r] = l;
        }
    }
    let mut seen_l = vec![false; adj.len()];
    let mut seen_r = vec![false; right_count];
    let mut queue: VecDeque<usize> = (0..adj.len()).filter(|&l| mate[l].is_none()).collect();
    for &l in &queue {
        seen_l[l] = true;
    }
    while let Some(l) = queue.pop_front() {
        for &r in &adj[l] {
            if !seen_r[r] {
                seen_r[r] = true;
                let next = mate_r[r];
                if next != FREE && !seen_l[next] {
                    seen_l[next] = true;
                    queue.push_back(next);
                }
            }
        }
    }
    HallWitness {
        left: (0..adj.len()).filter(|&l| seen_l[l]).collect(),
        neighbourhood: (0..right_count).filter(|&r| seen_r[r]).collect(),
    }
}

/// Perfect matching of `g[left, right]` as `(left, right)` vertex pairs.
/// Witnesses are reported in global ids.
pub fn perfect_matching_between(
    g: &Multigraph,
    left: &[usize],
    right: &[usize],
) -> Result<Vec<(usize, usize)>> {
    let n = g.vertex_count();
    let mut local = vec![FREE; n];
    for (i, &v) in right.iter().enumerate() {
        local[v] = i;
    }
    let adj: Vec<Vec<usize>> = left
        .iter()
        .map(|&u| {
            g.neighbours(u)
                .filter_map(|(w, _)| (local[w] != FREE).then_some(local[w]))
                .collect()
        })
        .collect();
    match perfect_matching(right.len(), &adj) {
        Ok(mate) => Ok(left.iter().zip(mate).map(|(&u, r)| (u, right[r])).collect()),
        Err(Error::MatchingInfeasible { witness }) => Err(Error::MatchingInfeasible {
            witness: HallWitness {
                left: witness.left.iter().map(|&l| left[l]).collect(),
                neighbourhood: witness.neighbourhood.iter().map(|&r| right[r]).collect(),
            },
        }),
        Err(e) => Err(e),
    }
}
