//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fails.

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use hamdec_core::classic::{bipartite_hamilton_decompose, degree_target, regular_spanning_subgraph, walecki_decompose};
use hamdec_core::cyclic::{
    check_robust_outexpander, check_superregular, reserve_sparse, ExpanderPlan, Reg1Plan, ReserveParams, SliceEntry,
    SuperregularParams,
};
use hamdec_core::error::Error;
use hamdec_core::exceptional::{
    build_fictive_bipartite, build_fictive_two_cliques, splice_bipartite, splice_two_cliques,
    BalancedExceptionalSystem, ExceptionalSystem, SystemKind,
};
use hamdec_core::extension::{balance_extend_bipartite, balance_extend_cliques, validate_balanced_extension};
use hamdec_core::graph::{
    ClusterCycle, ClusterPartition, Digraph, Multigraph, OrderedDirectedMatching, PartitionMode, PathSystem, Side,
};
use hamdec_core::pipeline::{decompose, generate_instance, verify_certificate, InstanceConfig, PipelineParams};

struct Verdict {
    pass: bool,
    detail: String,
}

impl Verdict {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Verdict {
            pass,
            detail: detail.into(),
        }
    }
}

fn run(id: usize, name: &str, budget: Duration, check: impl FnOnce() -> Verdict) -> bool {
    let start = Instant::now();
    let v = check();
    let took = start.elapsed();
    let in_time = took <= budget;
    let pass = v.pass && in_time;
    let late = if in_time { String::new() } else { format!(", over the {budget:?} budget") };
    println!(
        "{} criterion {id} {name}: {} [{:.2}s{late}]",
        if pass { "PASS" } else { "FAIL" },
        v.detail,
        took.as_secs_f64()
    );
    pass
}

/// Undirected edges of the cycle through `order`, if `order` is a
/// permutation of `0..n`.
fn cycle_edges(order: &[usize], n: usize) -> Option<Vec<(usize, usize)>> {
    let distinct: BTreeSet<usize> = order.iter().copied().collect();
    if order.len() != n || distinct.len() != n || distinct.iter().any(|&v| v >= n) {
        return None;
    }
    Some(
        (0..n)
            .map(|i| {
                let (a, b) = (order[i], order[(i + 1) % n]);
                (a.min(b), a.max(b))
            })
            .collect(),
    )
}

fn walecki_suite() -> Verdict {
    for k in (3..=21).step_by(2) {
        let cycles = match walecki_decompose(k) {
            Ok(c) => c,
            Err(e) => return Verdict::new(false, format!("K = {k}: {e}")),
        };
        if cycles.len() != (k - 1) / 2 {
            return Verdict::new(false, format!("K = {k}: {} cycles", cycles.len()));
        }
        let mut seen = BTreeSet::new();
        for c in &cycles {
            let Some(edges) = cycle_edges(c.order(), k) else {
                return Verdict::new(false, format!("K = {k}: a cycle is not Hamiltonian"));
            };
            for e in edges {
                if !seen.insert(e) {
                    return Verdict::new(false, format!("K = {k}: edge {e:?} used twice"));
                }
            }
        }
        if seen.len() != k * (k - 1) / 2 {
            return Verdict::new(false, format!("K = {k}: {} edges covered", seen.len()));
        }
    }
    Verdict::new(true, "odd K from 3 to 21 decompose exactly")
}

fn bipartite_suite() -> Verdict {
    for k in (2..=20).step_by(2) {
        let cycles = match bipartite_hamilton_decompose(k) {
            Ok(c) => c,
            Err(e) => return Verdict::new(false, format!("K = {k}: {e}")),
        };
        if cycles.len() != k / 2 {
            return Verdict::new(false, format!("K = {k}: {} cycles", cycles.len()));
        }
        let mut seen = BTreeSet::new();
        for c in &cycles {
            let Some(edges) = cycle_edges(c.order(), 2 * k) else {
                return Verdict::new(false, format!("K = {k}: a cycle is not Hamiltonian"));
            };
            for (a, b) in edges {
                if (a < k) == (b < k) {
                    return Verdict::new(false, format!("K = {k}: edge {a}-{b} inside a side"));
                }
                if !seen.insert((a, b)) {
                    return Verdict::new(false, format!("K = {k}: edge {a}-{b} used twice"));
                }
            }
        }
        if seen.len() != k * k {
            return Verdict::new(false, format!("K = {k}: {} edges covered", seen.len()));
        }
    }
    Verdict::new(true, "even K from 2 to 20 decompose K_{K,K} exactly")
}

/// A `d`-regular bipartite graph on `U = 0..m`, `V = m..2m` from `d` random
/// shifts composed with a random relabelling of `V`.
fn random_regular_pair(m: usize, d: usize, rng: &mut ChaCha8Rng) -> (Multigraph, Vec<usize>, Vec<usize>) {
    let u: Vec<usize> = (0..m).collect();
    let v: Vec<usize> = (m..2 * m).collect();
    let mut shifts: Vec<usize> = (0..m).collect();
    shifts.shuffle(rng);
    let mut label = v.clone();
    label.shuffle(rng);
    let mut g = Multigraph::new(2 * m);
    for i in 0..m {
        for &s in &shifts[..d] {
            g.add_edge(u[i], label[(i + s) % m]).unwrap();
        }
    }
    (g, u, v)
}

fn degrees_within(g: &Multigraph, verts: &[usize], lo: usize, hi: usize) -> bool {
    verts.iter().all(|&x| (lo..=hi).contains(&g.degree(x)))
}

/// Moves degrees around inside `[lo, hi]` by random edge deletions and additions.
fn perturb(g: &mut Multigraph, u: &[usize], v: &[usize], lo: usize, hi: usize, steps: usize, rng: &mut ChaCha8Rng) {
    for _ in 0..steps {
        let a = *u.choose(rng).unwrap();
        let b = *v.choose(rng).unwrap();
        if g.has_edge(a, b) {
            if g.degree(a) > lo && g.degree(b) > lo {
                g.remove_edge(a, b);
            }
        } else if g.degree(a) < hi && g.degree(b) < hi {
            g.add_edge(a, b).unwrap();
        }
    }
}

fn is_r_regular_inside(h: &Multigraph, g: &Multigraph, u: &[usize], v: &[usize], r: usize) -> bool {
    let in_u: BTreeSet<usize> = u.iter().copied().collect();
    let in_v: BTreeSet<usize> = v.iter().copied().collect();
    let spanning = u.iter().chain(v).all(|&x| h.degree(x) == r);
    let inside = h.edges().all(|(a, b, k)| {
        g.multiplicity(a, b) >= k && ((in_u.contains(&a) && in_v.contains(&b)) || (in_u.contains(&b) && in_v.contains(&a)))
    });
    spanning && inside
}

/// Recounts `e(S1, V - S2)` in `g` and tests the violated cut inequality.
fn witness_is_valid(g: &Multigraph, u: &[usize], v: &[usize], s1: &[usize], s2: &[usize], r: usize) -> (bool, usize) {
    let in_u: BTreeSet<usize> = u.iter().copied().collect();
    let in_v: BTreeSet<usize> = v.iter().copied().collect();
    let in_s2: BTreeSet<usize> = s2.iter().copied().collect();
    if !s1.iter().all(|x| in_u.contains(x)) || !s2.iter().all(|x| in_v.contains(x)) {
        return (false, 0);
    }
    let out: usize = s1
        .iter()
        .map(|&x| {
            g.neighbours(x)
                .filter(|(w, _)| in_v.contains(w) && !in_s2.contains(w))
                .map(|(_, k)| k)
                .sum::<usize>()
        })
        .sum();
    let valid = (out as i64) < r as i64 * (s1.len() as i64 - s2.len() as i64);
    (valid, out)
}

fn adversarial_pair(kind: usize, m: usize, rng: &mut ChaCha8Rng) -> (Multigraph, Vec<usize>, Vec<usize>) {
    match kind {
        // A left vertex of low degree.
        0 => {
            let (mut g, u, v) = random_regular_pair(m, 180, rng);
            let x = *u.choose(rng).unwrap();
            let nbrs: Vec<usize> = g.neighbours(x).map(|(w, _)| w).collect();
            for &w in nbrs.iter().take(rng.gen_range(20..100)) {
                g.remove_edge(x, w);
            }
            (g, u, v)
        }
        // 172 left vertices whose neighbourhoods all lie in 171 right ones.
        1 => {
            let (mut g, u, v) = random_regular_pair(m, 180, rng);
            let mut left = u.clone();
            left.shuffle(rng);
            let mut right = v.clone();
            right.shuffle(rng);
            let target: BTreeSet<usize> = right[..171].iter().copied().collect();
            for &x in &left[..172] {
                let nbrs: Vec<usize> = g.neighbours(x).map(|(w, _)| w).collect();
                for w in nbrs {
                    if !target.contains(&w) {
                        g.remove_edge(x, w);
                    }
                }
                for &w in &target {
                    if !g.has_edge(x, w) {
                        g.add_edge(x, w).unwrap();
                    }
                }
            }
            (g, u, v)
        }
        // Too sparse everywhere.
        2 => {
            let u: Vec<usize> = (0..m).collect();
            let v: Vec<usize> = (m..2 * m).collect();
            let mut g = Multigraph::new(2 * m);
            for &a in &u {
                for &b in &v {
                    if rng.gen_bool(0.7) {
                        g.add_edge(a, b).unwrap();
                    }
                }
            }
            (g, u, v)
        }
        // A right vertex of low degree.
        _ => {
            let (mut g, u, v) = random_regular_pair(m, 180, rng);
            let y = *v.choose(rng).unwrap();
            let nbrs: Vec<usize> = g.neighbours(y).map(|(w, _)| w).collect();
            for &w in nbrs.iter().take(rng.gen_range(20..100)) {
                g.remove_edge(y, w);
            }
            (g, u, v)
        }
    }
}

fn regular_flow_suite() -> Verdict {
    let (m, mu, eps, rho) = (200usize, 0.1, 0.01, 0.05);
    let r = degree_target(m, mu, rho);
    let lo = ((1.0 - mu - eps) * m as f64).ceil() as usize;
    let hi = ((1.0 - mu + eps) * m as f64).floor() as usize;
    for seed in 0..100u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (mut g, u, v) = random_regular_pair(m, 180, &mut rng);
        perturb(&mut g, &u, &v, lo, hi, 400, &mut rng);
        if !degrees_within(&g, &u, lo, hi) || !degrees_within(&g, &v, lo, hi) {
            return Verdict::new(false, format!("seed {seed}: generator left the degree window"));
        }
        match regular_spanning_subgraph(&g, &u, &v, mu, rho) {
            Ok(h) if is_r_regular_inside(&h, &g, &u, &v, r) => {}
            Ok(_) => return Verdict::new(false, format!("seed {seed}: output is not {r}-regular inside G")),
            Err(e) => return Verdict::new(false, format!("seed {seed}: {e}")),
        }
    }
    let mut failed = 0;
    for seed in 0..20u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(1000 + seed);
        let (g, u, v) = adversarial_pair(seed as usize % 4, m, &mut rng);
        match regular_spanning_subgraph(&g, &u, &v, mu, rho) {
            Ok(h) => {
                if !is_r_regular_inside(&h, &g, &u, &v, r) {
                    return Verdict::new(false, format!("adversarial {seed}: bad output"));
                }
            }
            Err(Error::DegreeHypothesisViolated { cut, .. }) => {
                failed += 1;
                let (valid, out) = witness_is_valid(&g, &u, &v, &cut.s1, &cut.s2, r);
                if !valid || out != cut.edges_s1_to_outside || cut.degree != r {
                    return Verdict::new(false, format!("adversarial {seed}: witness does not violate the cut bound"));
                }
            }
            Err(e) => return Verdict::new(false, format!("adversarial {seed}: {e}")),
        }
    }
    Verdict::new(
        true,
        format!("100/100 exactly {r}-regular; {failed}/20 adversarial failures, each with a valid cut witness"),
    )
}

/// Independent test that `g` restricted to `set` is one cycle through all of
/// `set` and has no other edges at those vertices.
fn is_hamilton_cycle_on(g: &Multigraph, set: &[usize]) -> bool {
    let members: BTreeSet<usize> = set.iter().copied().collect();
    if set.len() < 3 {
        return false;
    }
    for &x in set {
        let nbrs: Vec<(usize, usize)> = g.neighbours(x).collect();
        if nbrs.len() != 2 || nbrs.iter().any(|&(w, k)| k != 1 || !members.contains(&w)) {
            return false;
        }
    }
    let (mut prev, mut cur) = (usize::MAX, set[0]);
    for step in 0..set.len() {
        let next = g.neighbours(cur).map(|(w, _)| w).find(|&w| w != prev).unwrap();
        prev = cur;
        cur = next;
        if cur == set[0] {
            return step + 1 == set.len();
        }
    }
    false
}

/// Randomized backtracking over every directed Hamilton cycle on `verts`
/// whose arcs satisfy `allowed`, returning the first that contains the
/// arcs of `fictive` and meets them in order.
fn consistent_cycle(
    verts: &[usize],
    fictive: &[(usize, usize)],
    allowed: &dyn Fn(usize, usize) -> bool,
    rng: &mut ChaCha8Rng,
) -> Option<Vec<usize>> {
    struct Search<'a> {
        verts: &'a [usize],
        fictive: &'a [(usize, usize)],
        allowed: &'a dyn Fn(usize, usize) -> bool,
        tail: std::collections::BTreeMap<usize, usize>,
        heads: BTreeSet<usize>,
    }
    impl Search<'_> {
        fn go(&self, path: &mut Vec<usize>, used: &mut BTreeSet<usize>, next: usize, rng: &mut ChaCha8Rng) -> bool {
            let cur = *path.last().unwrap();
            if path.len() == self.verts.len() {
                return next == self.fictive.len() && !self.tail.contains_key(&cur) && (self.allowed)(cur, path[0]);
            }
            let options: Vec<usize> = match self.tail.get(&cur) {
                Some(&j) if j != next => return false,
                Some(&j) => vec![self.fictive[j].1],
                None => {
                    let mut o: Vec<usize> = self
                        .verts
                        .iter()
                        .copied()
                        .filter(|w| !self.heads.contains(w) && (self.allowed)(cur, *w))
                        .collect();
                    o.shuffle(rng);
                    o
                }
            };
            let step = usize::from(self.tail.contains_key(&cur));
            for w in options {
                if used.contains(&w) {
                    continue;
                }
                path.push(w);
                used.insert(w);
                if self.go(path, used, next + step, rng) {
                    return true;
                }
                used.remove(&w);
                path.pop();
            }
            false
        }
    }
    let search = Search {
        verts,
        fictive,
        allowed,
        tail: fictive.iter().enumerate().map(|(j, &(x, _))| (x, j)).collect(),
        heads: fictive.iter().map(|&(_, y)| y).collect(),
    };
    let start = fictive.first().map_or(verts[0], |&(x, _)| x);
    let mut path = vec![start];
    let mut used = BTreeSet::from([start]);
    search.go(&mut path, &mut used, 0, rng).then_some(path)
}

/// Random paths through the exceptional vertices of `p`, with ends drawn
/// from the cluster vertices of the sides `ends` picks for each path.
fn random_paths(
    p: &ClusterPartition,
    rng: &mut ChaCha8Rng,
    mut ends: impl FnMut(usize, &mut ChaCha8Rng) -> (Side, Side),
) -> Option<PathSystem> {
    let mut v0 = p.v0();
    v0.shuffle(rng);
    let mut free_a = p.side_core(Side::A);
    let mut free_b = p.side_core(Side::B);
    free_a.shuffle(rng);
    free_b.shuffle(rng);
    let mut paths = Vec::new();
    let mut rest = v0.as_slice();
    while !rest.is_empty() {
        let take = rng.gen_range(1..=rest.len().min(2));
        let (inner, tail) = rest.split_at(take);
        rest = tail;
        let (s, t) = ends(paths.len(), rng);
        let mut pick = |side| match side {
            Side::A => free_a.pop(),
            Side::B => free_b.pop(),
        };
        let mut path = vec![pick(s)?];
        path.extend_from_slice(inner);
        path.push(pick(t)?);
        paths.push(path);
    }
    PathSystem::new(paths).ok()
}

fn tiny_two_sided(mode: PartitionMode, rng: &mut ChaCha8Rng) -> ClusterPartition {
    let s = rng.gen_range(3..=6);
    let a0 = rng.gen_range(0..=2);
    let b0 = rng.gen_range(usize::from(a0 == 0)..=3 - a0);
    let a0v: Vec<usize> = (0..a0).collect();
    let a: Vec<usize> = (a0..a0 + s).collect();
    let b0v: Vec<usize> = (a0 + s..a0 + s + b0).collect();
    let b: Vec<usize> = (a0 + s + b0..a0 + 2 * s + b0).collect();
    ClusterPartition::two_sided(mode, a0 + b0 + 2 * s, a0v, vec![a], b0v, vec![b]).unwrap()
}

enum TinyKind {
    Hes,
    Mes,
    Bes,
}

/// Builds one random tiny instance of `kind`, finds consistent cycles by
/// search, splices and checks the result. `None` when the random draw does
/// not give a valid system; `Some(Err)` on a genuine failure.
fn tiny_splice(kind: &TinyKind, rng: &mut ChaCha8Rng) -> Option<Result<(), String>> {
    let side_of = |flip: bool| if flip { Side::B } else { Side::A };
    match kind {
        TinyKind::Hes | TinyKind::Mes => {
            let p = tiny_two_sided(PartitionMode::TwoCliques, rng);
            let hes = matches!(kind, TinyKind::Hes);
            let paths = random_paths(&p, rng, |i, rng| {
                if hes && i < 2 {
                    (Side::A, Side::B)
                } else if hes {
                    let s = side_of(rng.gen_bool(0.5));
                    (s, if rng.gen_bool(0.5) { s } else { s.other() })
                } else {
                    let s = side_of(rng.gen_bool(0.5));
                    (s, s)
                }
            })?;
            let kind = if hes { SystemKind::Hes } else { SystemKind::Mes };
            let j = ExceptionalSystem::new(paths, kind, None, &p, 1.0).ok()?;
            let r = build_fictive_two_cliques(&j, &p).ok()?;
            let any = |_: usize, _: usize| true;
            let (a, b) = (p.side_core(Side::A), p.side_core(Side::B));
            let Some(oa) = consistent_cycle(&a, r.a_dir.arcs(), &any, rng) else {
                return Some(Err("no consistent A-cycle found".into()));
            };
            let Some(ob) = consistent_cycle(&b, r.b_dir.arcs(), &any, rng) else {
                return Some(Err("no consistent B-cycle found".into()));
            };
            let (ca, cb) = (Digraph::cycle(p.n(), &oa).unwrap(), Digraph::cycle(p.n(), &ob).unwrap());
            let out = match splice_two_cliques(&ca, &cb, &j, &r, &p) {
                Ok(g) => g,
                Err(e) => return Some(Err(format!("{kind:?} splice: {e}"))),
            };
            let ok = match kind {
                SystemKind::Hes => is_hamilton_cycle_on(&out, &(0..p.n()).collect::<Vec<_>>()),
                SystemKind::Mes => {
                    is_hamilton_cycle_on(&out, &p.side_vertices(Side::A))
                        && is_hamilton_cycle_on(&out, &p.side_vertices(Side::B))
                        && out.edge_count() == p.n()
                }
            };
            let contains = j.paths().edges().all(|(u, v)| out.has_edge(u, v));
            Some(if ok && contains { Ok(()) } else { Err(format!("{kind:?} splice output fails the check")) })
        }
        TinyKind::Bes => {
            let p = tiny_two_sided(PartitionMode::Bipartite, rng);
            let paths = random_paths(&p, rng, |_, rng| (side_of(rng.gen_bool(0.5)), side_of(rng.gen_bool(0.5))))?;
            let j = BalancedExceptionalSystem::new(paths, [0; 4], &p, 1.0).ok()?;
            let r = build_fictive_bipartite(&j, &p).ok()?;
            let mut core = p.side_core(Side::A);
            core.extend(p.side_core(Side::B));
            let across = |x: usize, y: usize| p.side_of(x) != p.side_of(y);
            let Some(order) = consistent_cycle(&core, r.dir.arcs(), &across, rng) else {
                return Some(Err("no consistent cycle found".into()));
            };
            let d = Digraph::cycle(p.n(), &order).unwrap();
            let out = match splice_bipartite(&d, &j, &r, &p) {
                Ok(g) => g,
                Err(e) => return Some(Err(format!("bipartite splice: {e}"))),
            };
            let ok = is_hamilton_cycle_on(&out, &(0..p.n()).collect::<Vec<_>>());
            let contains = j.paths().edges().all(|(u, v)| out.has_edge(u, v));
            Some(if ok && contains { Ok(()) } else { Err("bipartite splice output fails the check".into()) })
        }
    }
}

fn splice_suite() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let kinds = [TinyKind::Hes, TinyKind::Mes, TinyKind::Bes];
    let mut counts = [0usize; 3];
    let mut done = 0;
    let mut draws = 0;
    while done < 1000 {
        let which = done % 3;
        draws += 1;
        if draws > 200_000 {
            return Verdict::new(false, format!("only {done} valid instances drawn"));
        }
        match tiny_splice(&kinds[which], &mut rng) {
            None => continue,
            Some(Ok(())) => {
                counts[which] += 1;
                done += 1;
            }
            Some(Err(e)) => return Verdict::new(false, format!("instance {done}: {e}")),
        }
    }
    Verdict::new(
        true,
        format!("1000/1000 verified ({} HES, {} MES, {} BES)", counts[0], counts[1], counts[2]),
    )
}

fn plain_frame(clusters: usize, m: usize) -> ClusterPartition {
    ClusterPartition::plain(clusters * m, (0..clusters).map(|c| (c * m..(c + 1) * m).collect()).collect()).unwrap()
}

/// Adds an `r`-regular random bipartite graph between clusters `a` and `b`.
fn add_regular(h: &mut Multigraph, q: &ClusterPartition, a: usize, b: usize, r: usize, rng: &mut ChaCha8Rng) {
    let m = q.m();
    let mut shifts: Vec<usize> = (0..m).collect();
    shifts.shuffle(rng);
    let mut right = q.cluster(b).to_vec();
    right.shuffle(rng);
    for (i, &x) in q.cluster(a).iter().enumerate() {
        for &s in &shifts[..r] {
            h.add_edge(x, right[(i + s) % m]).unwrap();
        }
    }
}

fn random_matching(from: &[usize], to: &[usize], size: usize, rng: &mut ChaCha8Rng) -> OrderedDirectedMatching {
    let mut pool: BTreeSet<usize> = BTreeSet::new();
    let mut arcs = Vec::new();
    while arcs.len() < size {
        let (x, y) = (*from.choose(rng).unwrap(), *to.choose(rng).unwrap());
        if x != y && !pool.contains(&x) && !pool.contains(&y) {
            pool.insert(x);
            pool.insert(y);
            arcs.push((x, y));
        }
    }
    OrderedDirectedMatching::new(arcs).unwrap()
}

fn extension_suite() -> Verdict {
    let (m, eps) = (40usize, 0.1);
    for seed in 0..50u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let k = [3, 5, 7][seed as usize % 3];
        let q = plain_frame(k, m);
        let c = ClusterCycle::identity(k);
        let r = (2.0 * eps * m as f64).round() as usize;
        let mut h = Multigraph::new(q.n());
        for i in 0..k {
            add_regular(&mut h, &q, c.prev(i), c.next(i), r, &mut rng);
        }
        let mut entries = Vec::new();
        for i in 0..k {
            for _ in 0..rng.gen_range(0..=m / k) {
                let size = rng.gen_range(1..=(eps * m as f64) as usize);
                entries.push(SliceEntry {
                    system: entries.len(),
                    cluster: i,
                    matching: random_matching(q.cluster(i), q.cluster(i), size, &mut rng),
                });
            }
        }
        let out = match balance_extend_cliques(&entries, &q, &c, &h) {
            Ok(o) => o,
            Err(e) => return Verdict::new(false, format!("cliques seed {seed}: {e}")),
        };
        let report = validate_balanced_extension(&out.extension, &q, &c, 2.0 * eps, 3.0);
        if !report.holds() {
            return Verdict::new(false, format!("cliques seed {seed}: {}", report.failures.join("; ")));
        }
    }

    let (k, eps0) = (4usize, 0.0125);
    for seed in 0..50u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(100 + seed);
        let q = plain_frame(2 * k, m);
        let cycles = bipartite_hamilton_decompose(k).unwrap();
        let c = cycles[seed as usize % cycles.len()].clone();
        let mut h = Multigraph::new(q.n());
        for a in 0..k {
            for b in k..2 * k {
                add_regular(&mut h, &q, a, b, 14, &mut rng);
            }
        }
        let entries: Vec<SliceEntry> = (0..16)
            .map(|s| {
                let (i1, i2) = (rng.gen_range(0..k), rng.gen_range(0..k));
                let (i3, i4) = (k + rng.gen_range(0..k), k + rng.gen_range(0..k));
                let from: Vec<usize> = q.cluster(i1).iter().chain(q.cluster(i2)).copied().collect();
                let to: Vec<usize> = q.cluster(i3).iter().chain(q.cluster(i4)).copied().collect();
                SliceEntry {
                    system: s,
                    cluster: i1,
                    matching: random_matching(&from, &to, rng.gen_range(1..=2), &mut rng),
                }
            })
            .collect();
        let out = match balance_extend_bipartite(&entries, &q, &c, &h, 4) {
            Ok(o) => o,
            Err(e) => return Verdict::new(false, format!("bipartite seed {seed}: {e}")),
        };
        let report = validate_balanced_extension(&out.extension, &q, &c, 12.0 * eps0 * k as f64, 12.0);
        if !report.holds() {
            return Verdict::new(false, format!("bipartite seed {seed}: {}", report.failures.join("; ")));
        }
        for (ps, e) in out.extension.sequences.iter().zip(&entries) {
            if ps.arc_count() != 4 * e.matching.len() {
                return Verdict::new(false, format!("bipartite seed {seed}: e(PS') != 4 e(J*)"));
            }
        }
    }
    Verdict::new(true, "50/50 clique inputs pass (2 eps, 3); 50/50 bipartite pass (12 eps K, 12) with e(PS') = 4 e(J*)")
}

fn bitrows(g: &Multigraph, from: &[usize], to: &[usize]) -> Vec<Vec<u64>> {
    let pos: std::collections::BTreeMap<usize, usize> = to.iter().enumerate().map(|(i, &w)| (w, i)).collect();
    from.iter()
        .map(|&x| {
            let mut row = vec![0u64; to.len().div_ceil(64)];
            for (w, _) in g.neighbours(x) {
                if let Some(&j) = pos.get(&w) {
                    row[j / 64] |= 1 << (j % 64);
                }
            }
            row
        })
        .collect()
}

fn max_codegree(rows: &[Vec<u64>]) -> usize {
    let mut best = 0;
    for i in 0..rows.len() {
        for j in i + 1..rows.len() {
            let c: u32 = rows[i].iter().zip(&rows[j]).map(|(a, b)| (a & b).count_ones()).sum();
            best = best.max(c as usize);
        }
    }
    best
}

fn reservoir_suite() -> Verdict {
    let (m, mu, gamma) = (200usize, 0.1, 0.1);
    let params = ReserveParams::new(mu, gamma, 0.3);
    let mf = m as f64;
    let mut successes = 0;
    for seed in 0..50u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (g, u, v) = random_regular_pair(m, 180, &mut rng);
        let Ok(res) = reserve_sparse(&g, &u, &v, params, seed) else {
            continue;
        };
        let h = &res.reservoir;
        let split_ok = h.is_submultigraph_of(&g) && h.sum(&res.remainder) == g;
        let degs: Vec<usize> = u.iter().chain(&v).map(|&x| h.degree(x)).collect();
        let codegree = max_codegree(&bitrows(h, &u, &v)).max(max_codegree(&bitrows(h, &v, &u)));
        let reg2 = codegree as f64 <= (3.0 * gamma).powi(2) * mf + 1e-9;
        let reg3 = *degs.iter().max().unwrap() as f64 <= 3.0 * gamma * mf + 1e-9;
        let reg4 = *degs.iter().min().unwrap() as f64 >= gamma * mf - 1e-9;
        let window = u.iter().chain(&v).all(|&x| {
            let d = res.remainder.degree(x) as f64;
            d >= (1.0 - mu - 4.0 * gamma) * mf - 1e-9 && d <= (1.0 - mu + 4.0 * gamma) * mf + 1e-9
        });
        if !(split_ok && reg2 && reg3 && reg4 && window) {
            return Verdict::new(
                false,
                format!("seed {seed}: accepted a reservoir failing an exact check (codegree {codegree})"),
            );
        }
        successes += 1;
    }
    Verdict::new(
        successes >= 48,
        format!("{successes}/50 succeeded; every success passes Reg2-Reg4 and the remainder window exactly"),
    )
}

fn end_to_end(cfg: &InstanceConfig, slots: usize) -> Verdict {
    let inst = match generate_instance(cfg) {
        Ok(i) => i,
        Err(e) => return Verdict::new(false, e.to_string()),
    };
    let cert = match decompose(&inst, &PipelineParams::from_config(cfg)) {
        Ok(c) => c,
        Err(e) => return Verdict::new(false, e.to_string()),
    };
    let report = verify_certificate(&inst, &cert);
    let every = report
        .slots
        .iter()
        .all(|s| s.structure && s.contains_system && s.in_graph && s.digest);
    let cycles = cert.slots.iter().filter(|s| s.matchings.is_none()).count();
    let pass = report.passed() && every && report.slots.len() == slots && report.systems_covered && report.edge_disjoint;
    Verdict::new(
        pass,
        format!(
            "n = {}, {}/{slots} slots verified ({cycles} Hamilton cycles, {} two-cycle splits), coverage {:.3}{}",
            inst.partition.n(),
            report.slots.iter().filter(|s| s.structure && s.contains_system && s.in_graph).count(),
            cert.slots.len() - cycles,
            report.coverage,
            if report.failures.is_empty() { String::new() } else { format!("; {}", report.failures.join("; ")) }
        ),
    )
}

/// Deletes up to `budget` edges at every vertex, never pushing a vertex past it.
fn thin(g: &Multigraph, verts: &[usize], budget: usize, rng: &mut ChaCha8Rng) -> Multigraph {
    let mut out = g.clone();
    let mut removed = vec![0usize; g.vertex_count()];
    let mut order = verts.to_vec();
    order.shuffle(rng);
    for x in order {
        let mut nbrs: Vec<usize> = out.neighbours(x).map(|(w, _)| w).collect();
        nbrs.shuffle(rng);
        for w in nbrs {
            if removed[x] == budget {
                break;
            }
            if removed[w] < budget {
                out.remove_edge(x, w);
                removed[x] += 1;
                removed[w] += 1;
            }
        }
    }
    out
}

/// The digraph on `V` with `f(u) -> w` for every edge `uw` of the pair,
/// `f` a bijection `U -> V`; vertices relabelled to `0..m`.
fn auxiliary(g: &Multigraph, u: &[usize], v: &[usize], rng: &mut ChaCha8Rng) -> Digraph {
    let m = u.len();
    let local: std::collections::BTreeMap<usize, usize> = v.iter().enumerate().map(|(i, &w)| (w, i)).collect();
    let mut f: Vec<usize> = (0..m).collect();
    f.shuffle(rng);
    let mut d = Digraph::new(m);
    for (i, &x) in u.iter().enumerate() {
        for (w, _) in g.neighbours(x) {
            if let Some(&j) = local.get(&w) {
                if j != f[i] {
                    d.add_arc(f[i], j).unwrap();
                }
            }
        }
    }
    d
}

fn robustness_suite() -> Verdict {
    let (m, p) = (120usize, 0.3);
    let base = SuperregularParams::new(0.25, 0.3, 0.15, 0.5);
    let eps_prime = 0.05;
    let (nu, tau) = (0.05, 0.2);
    let mut expanders = 0;
    for seed in 0..20u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u: Vec<usize> = (0..m).collect();
        let v: Vec<usize> = (m..2 * m).collect();
        let plan = |s: u64| Reg1Plan::Sampled { trials: 200, seed: s };
        let g = loop {
            let mut g = Multigraph::new(2 * m);
            for &a in &u {
                for &b in &v {
                    if rng.gen_bool(p) {
                        g.add_edge(a, b).unwrap();
                    }
                }
            }
            if check_superregular(&g, &u, &v, base, plan(seed)).all_hold() {
                break g;
            }
        };

        let cut = rng.gen_range(1..=(eps_prime * m as f64) as usize);
        let mut uu = u.clone();
        let mut vv = v.clone();
        uu.shuffle(&mut rng);
        vv.shuffle(&mut rng);
        uu.truncate(m - cut);
        vv.truncate(m - cut);
        let restricted = SuperregularParams::new(2.0 * base.eps, base.d, base.d_star / 2.0, 2.0 * base.c);
        let r1 = check_superregular(&g, &uu, &vv, restricted, plan(seed + 1));
        if !r1.all_hold() {
            return Verdict::new(false, format!("pair {seed}: restriction fails {:?}", r1.failures()));
        }

        let budget = (base.eps * base.eps * base.d * m as f64).floor() as usize;
        let all: Vec<usize> = u.iter().chain(&v).copied().collect();
        let thinned = thin(&g, &all, budget, &mut rng);
        let relaxed = SuperregularParams::new(
            2.0 * base.eps,
            base.d,
            base.d_star - base.eps * base.eps * base.d,
            base.c,
        );
        let r2 = check_superregular(&thinned, &u, &v, relaxed, plan(seed + 2));
        if !r2.all_hold() {
            return Verdict::new(false, format!("pair {seed}: edge removal fails {:?}", r2.failures()));
        }

        for (name, pair) in [("pair", &g), ("thinned pair", &thinned)] {
            let aux = auxiliary(pair, &u, &v, &mut rng);
            let verdict = check_robust_outexpander(&aux, nu, tau, ExpanderPlan::Sampled { samples: 500, seed });
            if !verdict.holds || verdict.sets_tested != 500 {
                return Verdict::new(
                    false,
                    format!("{name} {seed}: auxiliary digraph margin {:.1}", verdict.worst_margin),
                );
            }
            expanders += 1;
        }
    }
    Verdict::new(
        true,
        format!("20/20 pairs keep their relaxed verdicts; {expanders} auxiliary digraphs, 500 samples each, no violation"),
    )
}

fn determinism() -> Verdict {
    let cfg = InstanceConfig::two_cliques(5, 40, 2024);
    let once = || -> Result<String, Error> {
        let inst = generate_instance(&cfg)?;
        Ok(decompose(&inst, &PipelineParams::from_config(&cfg))?.to_json())
    };
    match (once(), once()) {
        (Ok(a), Ok(b)) => Verdict::new(a == b, format!("two certificates of {} bytes, identical: {}", a.len(), a == b)),
        (Err(e), _) | (_, Err(e)) => Verdict::new(false, e.to_string()),
    }
}

fn main() -> ExitCode {
    let s = Duration::from_secs;
    let results = [
        run(1, "walecki", s(1), walecki_suite),
        run(2, "bipartite-decomposition", s(1), bipartite_suite),
        run(3, "regular-subgraph-flow", s(30), regular_flow_suite),
        run(4, "splice", s(60), splice_suite),
        run(5, "balanced-extension", s(30), extension_suite),
        run(6, "sparse-reservoir", s(60), reservoir_suite),
        run(7, "two-cliques-end-to-end", s(120), || end_to_end(&InstanceConfig::two_cliques(5, 40, 2024), 25)),
        run(8, "bipartite-end-to-end", s(120), || end_to_end(&InstanceConfig::bipartite(4, 40, 2024), 16)),
        run(9, "robustness", s(60), robustness_suite),
        run(10, "determinism", s(240), determinism),
    ];
    let passed = results.iter().filter(|&&p| p).count();
    println!("{passed}/{} criteria passed", results.len());
    if passed == results.len() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
