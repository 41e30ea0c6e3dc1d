use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cyclic::Reg1Mode;
use crate::graph::Digraph;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ExpanderPlan {
    /// Exhaustive when `n <= 18`, sampled otherwise.
    Auto { samples: usize, seed: u64 },
    Sampled { samples: usize, seed: u64 },
    Exhaustive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpanderVerdict {
    pub holds: bool,
    pub mode: Reg1Mode,
    pub sets_tested: usize,
    /// Smallest `|RN(S)| - (|S| + nu n)` seen.
    pub worst_margin: f64,
    pub worst_set: Vec<usize>,
}

/// Tests whether every `S` with `tau n <= |S| <= (1 - tau) n` has at least
/// `|S| + nu n` vertices receiving `nu n` or more arcs from `S`.
pub fn check_robust_outexpander(d: &Digraph, nu: f64, tau: f64, plan: ExpanderPlan) -> ExpanderVerdict {
    let n = d.vertex_count();
    let nf = n as f64;
    let lo = ((tau * nf) - 1e-9).ceil().max(1.0) as usize;
    let hi = (((1.0 - tau) * nf) + 1e-9).floor() as usize;
    let threshold = nu * nf;
    let exhaustive = match plan {
        ExpanderPlan::Exhaustive => true,
        ExpanderPlan::Auto { .. } => n <= 18,
        ExpanderPlan::Sampled { .. } => false,
    };

    let mut verdict = ExpanderVerdict {
        holds: true,
        mode: if exhaustive {
            Reg1Mode::Exhaustive
        } else {
            Reg1Mode::Sampled
        },
        sets_tested: 0,
        worst_margin: f64::INFINITY,
        worst_set: Vec::new(),
    };
    if lo > hi || n == 0 {
        return verdict;
    }

    let mut hits = vec![0usize; n];
    let mut assess = |set: &[usize], verdict: &mut ExpanderVerdict| {
        hits.iter_mut().for_each(|h| *h = 0);
        for &x in set {
            for w in d.out_neighbours(x) {
                hits[w] += 1;
            }
        }
        let robust = hits.iter().filter(|&&h| h as f64 + 1e-9 >= threshold).count();
        let margin = robust as f64 - (set.len() as f64 + threshold);
        verdict.sets_tested += 1;
        if margin < verdict.worst_margin {
            verdict.worst_margin = margin;
            verdict.worst_set = set.to_vec();
        }
        if margin < -1e-9 {
            verdict.holds = false;
        }
    };

    if exhaustive {
        let mut set = Vec::with_capacity(n);
        for mask in 1u64..(1u64 << n) {
            let size = mask.count_ones() as usize;
            if size < lo || size > hi {
                continue;
            }
            set.clear();
            set.extend((0..n).filter(|&v| mask >> v & 1 == 1));
            assess(&set, &mut verdict);
        }
    } else {
        let (samples, seed) = match plan {
            ExpanderPlan::Auto { samples, seed } | ExpanderPlan::Sampled { samples, seed } => {
                (samples, seed)
            }
            ExpanderPlan::Exhaustive => unreachable!(),
        };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut pool: Vec<usize> = (0..n).collect();
        for _ in 0..samples {
            let size = rng.gen_range(lo..=hi);
            let (set, _) = pool.partial_shuffle(&mut rng, size);
            let set = set.to_vec();
            assess(&set, &mut verdict);
        }
    }
    verdict
}
