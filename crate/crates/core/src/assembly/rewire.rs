use serde::{Deserialize, Serialize};

use crate::assembly::search::{ordered_hamilton_successors, SearchBudget};
use crate::error::{Error, Result};
use crate::graph::{verify_hamilton_cycle, Digraph};
use crate::seed;

/// Which arcs a replacement matching may use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RewirePolicy {
    /// Reservoir arcs plus the arcs being replaced, starting from the
    /// current matching. Draws on the reservoir only where needed.
    #[default]
    Economical,
    /// Reservoir arcs only: the whole matching is replaced.
    Faithful,
}

/// Sets `V_i^1` and `V_{i+1}^2` between which the current 1-factor is a
/// perfect matching that may be replaced.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MergeWindow {
    pub tails: Vec<usize>,
    pub heads: Vec<usize>,
}

/// Successor map of a 1-factor on `vertices`; other entries are `usize::MAX`.
pub(crate) fn successors(f: &Digraph, vertices: &[usize]) -> Result<Vec<usize>> {
    let mut succ = vec![usize::MAX; f.vertex_count()];
    for &v in vertices {
        let mut outs = f.out_neighbours(v);
        match (outs.next(), outs.next()) {
            (Some(w), None) if f.in_degree(v) == 1 => succ[v] = w,
            _ => {
                return Err(Error::MalformedInput(format!(
                    "vertex {v} does not have in- and outdegree one"
                )))
            }
        }
    }
    if f.arc_count() != vertices.len() {
        return Err(Error::MalformedInput("1-factor has arcs outside its vertex set".into()));
    }
    Ok(succ)
}

pub(crate) fn to_digraph(succ: &[usize]) -> Digraph {
    Digraph::from_arcs(
        succ.len(),
        succ.iter().enumerate().filter(|&(_, &w)| w != usize::MAX).map(|(u, &w)| (u, w)),
    )
    .expect("successors are distinct from their vertices")
}

/// Replaces the matching from `window.tails` to `window.heads` in the
/// 1-factor `succ` by one of the auxiliary Hamilton cycle, merging every
/// cycle through the window into one. Each tail `u` is represented by
/// `f(u)`, the first head met walking backwards from `u`; an arc `u -> w`
/// becomes the auxiliary arc `f(u) -> w`. `waypoints` are tails whose
/// segments must then be met in this order.
pub(crate) fn rewire_pair(
    succ: &mut [usize],
    reservoir: &Digraph,
    window: &MergeWindow,
    waypoints: &[usize],
    policy: RewirePolicy,
    budget: SearchBudget,
    seed: u64,
) -> Result<()> {
    let n = succ.len();
    let mut head_idx = vec![usize::MAX; n];
    for (i, &w) in window.heads.iter().enumerate() {
        head_idx[w] = i;
    }
    if window.tails.len() != window.heads.len()
        || window.tails.iter().any(|&u| succ[u] == usize::MAX || head_idx[succ[u]] == usize::MAX)
    {
        return Err(Error::MalformedInput(
            "the 1-factor is not a perfect matching on the window".into(),
        ));
    }
    let mut pred = vec![usize::MAX; n];
    for (u, &w) in succ.iter().enumerate() {
        if w != usize::MAX {
            pred[w] = u;
        }
    }
    let mut rep = vec![usize::MAX; n];
    for &u in &window.tails {
        let mut cur = u;
        while head_idx[cur] == usize::MAX {
            cur = pred[cur];
        }
        rep[u] = head_idx[cur];
    }
    let mut aux_waypoints = Vec::with_capacity(waypoints.len());
    for &x in waypoints {
        if rep[x] == usize::MAX {
            return Err(Error::MalformedInput(format!("waypoint {x} is not a tail of the window")));
        }
        aux_waypoints.push(rep[x]);
    }

    let size = window.heads.len();
    if size == 0 {
        return Ok(());
    }
    if size == 1 {
        let u = window.tails[0];
        let keep = policy == RewirePolicy::Economical || reservoir.has_arc(u, succ[u]);
        return if keep {
            Ok(())
        } else {
            Err(Error::HamiltonSearchExhausted { restarts: 0, vertices: 1 })
        };
    }
    let mut aux = Digraph::new(size);
    let mut start = vec![0; size];
    let mut start_ok = true;
    for &u in &window.tails {
        let x = rep[u];
        for w in reservoir.out_neighbours(u) {
            let y = head_idx[w];
            if y != usize::MAX && y != x {
                aux.add_arc(x, y)?;
            }
        }
        let current = head_idx[succ[u]];
        start[x] = current;
        // A cycle crossing the window once gives a loop; the other current
        // arcs stay usable even though they no longer form a start cover.
        if current == x {
            start_ok = false;
        } else if policy == RewirePolicy::Economical {
            aux.add_arc(x, current)?;
        }
    }
    let start = (policy == RewirePolicy::Economical && start_ok).then_some(start.as_slice());
    let aux_succ = ordered_hamilton_successors(&aux, &aux_waypoints, budget, seed, start)?;
    for &u in &window.tails {
        succ[u] = window.heads[aux_succ[rep[u]]];
    }
    Ok(())
}

fn cycle_count(succ: &[usize], vertices: &[usize]) -> usize {
    let mut seen = vec![false; succ.len()];
    let mut count = 0;
    for &v in vertices {
        if seen[v] {
            continue;
        }
        count += 1;
        let mut cur = v;
        while !seen[cur] {
            seen[cur] = true;
            cur = succ[cur];
        }
    }
    count
}

/// Turns the 1-factor `f` into a Hamilton cycle on its vertices by
/// replacing, window by window, its matching there with one drawn from
/// `reservoir` (and, under the economical policy, from the replaced arcs).
pub fn merge_to_hamilton(
    f: &Digraph,
    reservoir: &Digraph,
    windows: &[MergeWindow],
    policy: RewirePolicy,
    budget: SearchBudget,
    seed: u64,
) -> Result<Digraph> {
    let vertices = f.touched();
    let mut succ = successors(f, &vertices)?;
    let mut in_tails = vec![false; succ.len()];
    windows.iter().flat_map(|w| &w.tails).for_each(|&u| in_tails[u] = true);
    let mut seen = vec![false; succ.len()];
    for &v in &vertices {
        if seen[v] {
            continue;
        }
        let mut cur = v;
        let mut hits = false;
        while !seen[cur] {
            seen[cur] = true;
            hits |= in_tails[cur];
            cur = succ[cur];
        }
        if !hits && cycle_count(&succ, &vertices) > 1 {
            return Err(Error::MalformedInput(format!(
                "the cycle through {v} avoids every window"
            )));
        }
    }
    for pass in 0..2u64 {
        for (i, window) in windows.iter().enumerate() {
            if policy == RewirePolicy::Economical && cycle_count(&succ, &vertices) == 1 {
                break;
            }
            let local = seed::derive(seed, &[pass, i as u64]);
            // A window whose search fails is left as it is; later windows
            // may still merge its cycles, and the result is checked below.
            match rewire_pair(&mut succ, reservoir, window, &[], policy, budget, local) {
                Err(Error::HamiltonSearchExhausted { .. }) => {}
                other => other?,
            }
        }
        if cycle_count(&succ, &vertices) == 1 {
            break;
        }
    }
    let out = to_digraph(&succ);
    if !verify_hamilton_cycle(&out, &vertices) {
        return Err(Error::HamiltonSearchExhausted {
            restarts: budget.restarts,
            vertices: vertices.len(),
        });
    }
    Ok(out)
}

fn meets_in_order(succ: &[usize], order: &[usize]) -> bool {
    let Some(&first) = order.first() else {
        return true;
    };
    let mut pos = vec![usize::MAX; succ.len()];
    let mut cur = first;
    let mut step = 0;
    while pos[cur] == usize::MAX {
        pos[cur] = step;
        step += 1;
        cur = succ[cur];
    }
    order.iter().all(|&x| pos[x] != usize::MAX) && order.windows(2).all(|w| pos[w[0]] < pos[w[1]])
}

/// Rewires the Hamilton cycle `cycle` inside `window` so that it meets the
/// tails `order` in the given cyclic order.
pub fn reorder_for_consistency(
    cycle: &Digraph,
    reservoir: &Digraph,
    window: &MergeWindow,
    order: &[usize],
    policy: RewirePolicy,
    budget: SearchBudget,
    seed: u64,
) -> Result<Digraph> {
    let vertices = cycle.touched();
    if !verify_hamilton_cycle(cycle, &vertices) {
        return Err(Error::MalformedInput("reordering needs a Hamilton cycle".into()));
    }
    if let Some(&x) = order.iter().find(|x| !window.tails.contains(x)) {
        return Err(Error::MalformedInput(format!("waypoint {x} is not a tail of the window")));
    }
    let mut succ = successors(cycle, &vertices)?;
    if meets_in_order(&succ, order) {
        return Ok(cycle.clone());
    }
    rewire_pair(&mut succ, reservoir, window, order, policy, budget, seed)?;
    let out = to_digraph(&succ);
    if !verify_hamilton_cycle(&out, &vertices) || !meets_in_order(&succ, order) {
        return Err(Error::AssemblyVerificationFailed(
            "reordered cycle is not an ordered Hamilton cycle".into(),
        ));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Four clusters of three on the cycle 0 1 2 3; the complete reservoir
    /// between cluster 0 and cluster 1.
    fn window() -> (MergeWindow, Digraph) {
        let tails = vec![0, 1, 2];
        let heads = vec![3, 4, 5];
        let h = Digraph::from_arcs(12, tails.iter().flat_map(|&u| heads.iter().map(move |&w| (u, w)))).unwrap();
        (MergeWindow { tails, heads }, h)
    }

    fn factor(cycles: &[&[usize]]) -> Digraph {
        let arcs = cycles
            .iter()
            .flat_map(|c| (0..c.len()).map(move |i| (c[i], c[(i + 1) % c.len()])));
        Digraph::from_arcs(12, arcs).unwrap()
    }

    #[test]
    fn two_cycles_merge() {
        let (w, h) = window();
        let f = factor(&[&[0, 3, 6, 9], &[1, 4, 7, 10, 2, 5, 8, 11]]);
        for policy in [RewirePolicy::Economical, RewirePolicy::Faithful] {
            let c = merge_to_hamilton(&f, &h, std::slice::from_ref(&w), policy, SearchBudget::default(), 3).unwrap();
            assert!(verify_hamilton_cycle(&c, &(0..12).collect::<Vec<_>>()));
            // Only arcs out of the window tails change.
            for (u, v) in f.arcs().filter(|&(u, _)| u > 2) {
                assert!(c.has_arc(u, v));
            }
        }
    }

    #[test]
    fn hamilton_factor_is_kept() {
        let (_, h) = window();
        let f = factor(&[&[0, 3, 6, 9, 1, 4, 7, 10, 2, 5, 8, 11]]);
        let c = merge_to_hamilton(&f, &h, &[], RewirePolicy::Economical, SearchBudget::default(), 0).unwrap();
        assert_eq!(c, f);
    }

    #[test]
    fn cycle_avoiding_windows_is_reported() {
        let (w, h) = window();
        let f = factor(&[&[0, 3, 1, 4, 2, 5], &[6, 9, 7, 10, 8, 11]]);
        let err = merge_to_hamilton(&f, &h, &[w], RewirePolicy::Economical, SearchBudget::default(), 0).unwrap_err();
        assert!(matches!(err, Error::MalformedInput(_)));
    }

    #[test]
    fn reorder_two_waypoints() {
        let (w, h) = window();
        let f = factor(&[&[0, 3, 6, 9, 1, 4, 7, 10, 2, 5, 8, 11]]);
        let succ = successors(&f, &(0..12).collect::<Vec<_>>()).unwrap();
        assert!(!meets_in_order(&succ, &[2, 1, 0]));
        let c = reorder_for_consistency(&f, &h, &w, &[2, 1, 0], RewirePolicy::Economical, SearchBudget::default(), 1).unwrap();
        let succ = successors(&c, &(0..12).collect::<Vec<_>>()).unwrap();
        assert!(meets_in_order(&succ, &[2, 1, 0]));
    }

    #[test]
    fn empty_order_keeps_cycle() {
        let (w, h) = window();
        let f = factor(&[&[0, 3, 6, 9, 1, 4, 7, 10, 2, 5, 8, 11]]);
        let c = reorder_for_consistency(&f, &h, &w, &[], RewirePolicy::Economical, SearchBudget::default(), 1).unwrap();
        assert_eq!(c, f);
    }

    #[test]
    fn foreign_waypoint_is_rejected() {
        let (w, h) = window();
        let f = factor(&[&[0, 3, 6, 9, 1, 4, 7, 10, 2, 5, 8, 11]]);
        let err = reorder_for_consistency(&f, &h, &w, &[6], RewirePolicy::Economical, SearchBudget::default(), 1).unwrap_err();
        assert!(matches!(err, Error::MalformedInput(_)));
    }
}
