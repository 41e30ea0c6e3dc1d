use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cyclic::{check_superregular, Reg1Plan, SuperregularParams, SuperregularityReport};
use crate::error::{Error, Result};
use crate::graph::Multigraph;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReserveParams {
    pub mu: f64,
    pub gamma: f64,
    pub eps: f64,
    pub reg1_trials: usize,
    pub retries: usize,
}

impl ReserveParams {
    pub fn new(mu: f64, gamma: f64, eps: f64) -> Self {
        ReserveParams {
            mu,
            gamma,
            eps,
            reg1_trials: 200,
            retries: 20,
        }
    }

    pub fn superregular(&self) -> SuperregularParams {
        SuperregularParams::new(self.eps, 2.0 * self.gamma, self.gamma, 3.0 * self.gamma)
    }
}

/// A sparse reservoir `H` and the remainder `G - H`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Reservation {
    pub reservoir: Multigraph,
    pub remainder: Multigraph,
    pub attempts: usize,
    pub report: SuperregularityReport,
    pub remainder_degrees: (usize, usize),
}

/// Keeps each edge copy of `g[u, v]` independently with probability `2 gamma`.
pub fn sample_reservoir(g: &Multigraph, u: &[usize], v: &[usize], gamma: f64, rng: &mut ChaCha8Rng) -> Multigraph {
    let n = g.vertex_count();
    let mut in_v = vec![false; n];
    for &w in v {
        in_v[w] = true;
    }
    let p = (2.0 * gamma).clamp(0.0, 1.0);
    let mut h = Multigraph::new(n);
    for &x in u {
        for (w, mult) in g.neighbours(x) {
            if !in_v[w] {
                continue;
            }
            let kept = (0..mult).filter(|_| rng.gen_bool(p)).count();
            if kept > 0 {
                h.add_edge_mult(x, w, kept).expect("endpoints are distinct");
            }
        }
    }
    h
}

fn degree_range(g: &Multigraph, u: &[usize], v: &[usize]) -> (usize, usize) {
    let n = g.vertex_count();
    let mut in_u = vec![false; n];
    let mut in_v = vec![false; n];
    u.iter().for_each(|&x| in_u[x] = true);
    v.iter().for_each(|&x| in_v[x] = true);
    let degs = u
        .iter()
        .map(|&x| g.degree_into(x, &in_v))
        .chain(v.iter().map(|&x| g.degree_into(x, &in_u)));
    degs.fold((usize::MAX, 0), |(lo, hi), d| (lo.min(d), hi.max(d)))
}

/// Samples a reservoir that is `(eps, 2 gamma, gamma, 3 gamma)`-superregular
/// and leaves `G - H` with degrees `(1 - mu +- 4 gamma) m`, resampling up to
/// the retry limit.
pub fn reserve_sparse(
    g: &Multigraph,
    u: &[usize],
    v: &[usize],
    params: ReserveParams,
    seed: u64,
) -> Result<Reservation> {
    let m = u.len();
    let mf = m as f64;
    if 3.0 * params.gamma * mf < 1.0 {
        return Err(Error::SamplingFailed {
            attempts: 0,
            reason: format!(
                "Reg4 unattainable: 3 gamma m = {:.3} < 1 leaves no room for degree >= gamma m",
                3.0 * params.gamma * mf
            ),
        });
    }
    let lo = ((1.0 - params.mu - 4.0 * params.gamma) * mf - 1e-9).ceil();
    let hi = ((1.0 - params.mu + 4.0 * params.gamma) * mf + 1e-9).floor();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut last_reason = String::new();
    for attempt in 1..=params.retries {
        let h = sample_reservoir(g, u, v, params.gamma, &mut rng);
        let report = check_superregular(
            &h,
            u,
            v,
            params.superregular(),
            Reg1Plan::Sampled {
                trials: params.reg1_trials,
                seed: seed ^ (attempt as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15),
            },
        );
        let remainder = g.minus(&h);
        let (dmin, dmax) = degree_range(&remainder, u, v);
        let window = (dmin as f64) >= lo && (dmax as f64) <= hi;
        if report.all_hold() && window {
            return Ok(Reservation {
                reservoir: h,
                remainder,
                attempts: attempt,
                report,
                remainder_degrees: (dmin, dmax),
            });
        }
        let mut failed: Vec<String> = report.failures().iter().map(|s| s.to_string()).collect();
        if !window {
            failed.push(format!("remainder degrees [{dmin}, {dmax}] outside [{lo}, {hi}]"));
        }
        last_reason = format!(
            "{} (codegree {}, max degree {}, min degree {}, density deviation {:.3})",
            failed.join(", "),
            report.max_codegree,
            report.max_degree,
            report.min_degree,
            report.reg1.worst_ratio
        );
    }
    Err(Error::SamplingFailed {
        attempts: params.retries,
        reason: last_reason,
    })
}
