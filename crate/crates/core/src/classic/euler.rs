use crate::classic::matching::perfect_matching_between;
use crate::error::{Error, Result};
use crate::graph::Multigraph;

fn regular_degree(g: &Multigraph, u: &[usize], v: &[usize]) -> Result<usize> {
    if u.len() != v.len() {
        return Err(Error::InvalidParameter(format!(
            "classes differ in size: {} and {}",
            u.len(),
            v.len()
        )));
    }
    let n = g.vertex_count();
    let mut in_v = vec![false; n];
    for &w in v {
        in_v[w] = true;
    }
    let mut in_u = vec![false; n];
    for &w in u {
        in_u[w] = true;
    }
    let r = u.first().map_or(0, |&x| g.degree(x));
    for &x in u.iter().chain(v) {
        if g.degree(x) != r {
            return Err(Error::InvalidParameter(format!(
                "graph is not regular: vertex {x} has degree {} instead of {r}",
                g.degree(x)
            )));
        }
    }
    let inside: usize = u.iter().map(|&x| g.degree_into(x, &in_v)).sum();
    if inside != g.edge_count() {
        return Err(Error::InvalidParameter(
            "graph has edges outside the bipartition".into(),
        ));
    }
    Ok(r)
}

/// Halves a bipartite graph with all degrees even: parallel pairs are split
/// evenly and the rest is cut along closed trails, U-to-V steps on one side.
fn euler_split(g: &Multigraph, in_u: &[bool]) -> (Multigraph, Multigraph) {
    let n = g.vertex_count();
    let mut first = Multigraph::new(n);
    let mut second = Multigraph::new(n);
    let mut ends: Vec<(usize, usize)> = Vec::new();
    let mut incident: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (a, b, c) in g.edges() {
        if c >= 2 {
            first.add_edge_mult(a, b, c / 2).unwrap();
            second.add_edge_mult(a, b, c / 2).unwrap();
        }
        if c % 2 == 1 {
            let id = ends.len();
            ends.push((a, b));
            incident[a].push(id);
            incident[b].push(id);
        }
    }
    let mut used = vec![false; ends.len()];
    let mut cursor = vec![0usize; n];
    for start in 0..n {
        loop {
            while cursor[start] < incident[start].len() && used[incident[start][cursor[start]]] {
                cursor[start] += 1;
            }
            if cursor[start] == incident[start].len() {
                break;
            }
            let mut cur = start;
            loop {
                while cursor[cur] < incident[cur].len() && used[incident[cur][cursor[cur]]] {
                    cursor[cur] += 1;
                }
                if cursor[cur] == incident[cur].len() {
                    break;
                }
                let id = incident[cur][cursor[cur]];
                used[id] = true;
                let (a, b) = ends[id];
                let next = if a == cur { b } else { a };
                if in_u[cur] {
                    first.add_edge(cur, next).unwrap();
                } else {
                    second.add_edge(cur, next).unwrap();
                }
                cur = next;
            }
        }
    }
    (first, second)
}

fn decompose(g: Multigraph, u: &[usize], in_u: &[bool], r: usize, out: &mut Vec<Multigraph>) -> Result<()> {
    if r == 0 {
        return Ok(());
    }
    if r == 1 {
        out.push(g);
        return Ok(());
    }
    let v: Vec<usize> = {
        let mut seen = vec![false; g.vertex_count()];
        let mut v = Vec::new();
        for &x in u {
            for (w, _) in g.neighbours(x) {
                if !seen[w] {
                    seen[w] = true;
                    v.push(w);
                }
            }
        }
        v.sort_unstable();
        v
    };
    if r % 2 == 1 {
        let pairs = perfect_matching_between(&g, u, &v)?;
        let matching = Multigraph::from_edges(g.vertex_count(), pairs)?;
        let rest = g.minus(&matching);
        out.push(matching);
        return decompose(rest, u, in_u, r - 1, out);
    }
    let (first, second) = euler_split(&g, in_u);
    decompose(first, u, in_u, r / 2, out)?;
    decompose(second, u, in_u, r / 2, out)
}

/// Exact decomposition of an `r`-regular bipartite multigraph `g[u, v]` into
/// `r` perfect matchings.
pub fn regular_bipartite_to_matchings(
    g: &Multigraph,
    u: &[usize],
    v: &[usize],
) -> Result<Vec<Multigraph>> {
    let r = regular_degree(g, u, v)?;
    let mut in_u = vec![false; g.vertex_count()];
    for &x in u {
        in_u[x] = true;
    }
    let mut out = Vec::with_capacity(r);
    decompose(g.clone(), u, &in_u, r, &mut out)?;
    debug_assert_eq!(out.len(), r);
    Ok(out)
}

/// `t` edge-disjoint spanning `s`-regular subgraphs of an `r`-regular
/// bipartite multigraph, each the union of `s` of its perfect matchings.
pub fn split_regular(
    g: &Multigraph,
    u: &[usize],
    v: &[usize],
    t: usize,
    s: usize,
) -> Result<Vec<Multigraph>> {
    let r = regular_degree(g, u, v)?;
    if t * s > r {
        return Err(Error::InvalidParameter(format!(
            "cannot cut {t} parts of degree {s} from a {r}-regular graph"
        )));
    }
    let matchings = regular_bipartite_to_matchings(g, u, v)?;
    let n = g.vertex_count();
    Ok(matchings
        .chunks(s.max(1))
        .take(t)
        .map(|chunk| {
            if s == 0 {
                return Multigraph::new(n);
            }
            chunk.iter().fold(Multigraph::new(n), |acc, m| acc.sum(m))
        })
        .chain(std::iter::repeat_with(|| Multigraph::new(n)))
        .take(t)
        .collect())
}
