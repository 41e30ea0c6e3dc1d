use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::exceptional::{RecordKind, SystemRecord};
use crate::graph::{ClusterPartition, PartitionMode, Side};
use crate::pipeline::config::{Instance, InstanceConfig, SCHEMA};

/// Probability of an extra edge between an exceptional vertex and a cluster
/// vertex no system uses.
const EXTRA_EXCEPTIONAL_DENSITY: f64 = 0.5;

fn layout(cfg: &InstanceConfig) -> Result<ClusterPartition> {
    let (k, m) = (cfg.k, cfg.m);
    let a0: Vec<usize> = (0..cfg.a0).collect();
    let a_start = cfg.a0;
    let a: Vec<Vec<usize>> = (0..k).map(|i| (a_start + i * m..a_start + (i + 1) * m).collect()).collect();
    let b0_start = a_start + k * m;
    let b0: Vec<usize> = (b0_start..b0_start + cfg.b0).collect();
    let b_start = b0_start + cfg.b0;
    let b: Vec<Vec<usize>> = (0..k).map(|i| (b_start + i * m..b_start + (i + 1) * m).collect()).collect();
    ClusterPartition::two_sided(cfg.mode, cfg.n(), a0, a, b0, b)
}

/// Fresh cluster vertices, each handed out at most once.
struct Pools {
    pools: Vec<Vec<usize>>,
}

impl Pools {
    fn new(p: &ClusterPartition, rng: &mut ChaCha8Rng) -> Self {
        let pools = p
            .clusters()
            .iter()
            .map(|c| {
                let mut v = c.clone();
                v.shuffle(rng);
                v
            })
            .collect();
        Pools { pools }
    }

    fn take(&mut self, p: &ClusterPartition, side: Side, i: usize) -> Result<usize> {
        self.pools[p.cluster_index(side, i)].pop().ok_or_else(|| {
            Error::InvalidParameter(format!(
                "cluster {}{} has no fresh vertex left: the exceptional vertices need \
                 2 |J| distinct neighbours but the localized clusters are too small",
                side.letter(),
                i + 1
            ))
        })
    }
}

fn hes_positions(systems: usize, hes: usize) -> Vec<bool> {
    (0..systems)
        .map(|s| (s + 1) * hes / systems.max(1) > s * hes / systems.max(1))
        .collect()
}

fn two_cliques_system(
    p: &ClusterPartition,
    pools: &mut Pools,
    hes: bool,
    (i, i2): (usize, usize),
) -> Result<SystemRecord> {
    let exceptional: Vec<(usize, Side)> = p
        .a0()
        .iter()
        .map(|&v| (v, Side::A))
        .chain(p.b0().iter().map(|&v| (v, Side::B)))
        .collect();
    let crossing = if hes { exceptional.len() / 2 * 2 } else { 0 };
    if hes && crossing == 0 {
        return Err(Error::InvalidParameter(
            "a Hamilton exceptional system needs two exceptional vertices for its AB-paths".into(),
        ));
    }
    let local = |side| if side == Side::A { i } else { i2 };
    let mut paths = Vec::with_capacity(exceptional.len());
    for (t, &(v, side)) in exceptional.iter().enumerate() {
        let path = if t < crossing {
            vec![pools.take(p, Side::A, i)?, v, pools.take(p, Side::B, i2)?]
        } else {
            vec![pools.take(p, side, local(side))?, v, pools.take(p, side, local(side))?]
        };
        paths.push(path);
    }
    Ok(SystemRecord {
        kind: if hes { RecordKind::Hes } else { RecordKind::Mes },
        paths,
        locality: Some(vec![i, i2]),
    })
}

fn bipartite_system(p: &ClusterPartition, pools: &mut Pools, locality: [usize; 4]) -> Result<SystemRecord> {
    let [i1, i2, i3, i4] = locality;
    let exceptional: Vec<usize> = p.a0().iter().chain(p.b0()).copied().collect();
    let mut paths = Vec::with_capacity(exceptional.len());
    for (t, &v) in exceptional.iter().enumerate() {
        let (a, b) = if t % 2 == 0 { (i1, i3) } else { (i2, i4) };
        paths.push(vec![pools.take(p, Side::A, a)?, v, pools.take(p, Side::B, b)?]);
    }
    Ok(SystemRecord {
        kind: RecordKind::Bes,
        paths,
        locality: Some(locality.to_vec()),
    })
}

/// Locality of system `s`: consecutive blocks of `K^2` (resp. `K^4`)
/// systems run through every locality once.
fn two_cliques_locality(s: usize, k: usize) -> (usize, usize) {
    (s % k, (s / k) % k)
}

fn bipartite_locality(s: usize, k: usize) -> [usize; 4] {
    let (i1, i3) = (s % k, (s / k) % k);
    let i2 = (i1 + 1 + (s / (k * k)) % k) % k;
    let i4 = (i3 + 1 + (s / (k * k * k)) % k) % k;
    [i1, i2, i3, i4]
}

/// A random instance meeting the hypotheses of the decomposition for
/// `cfg`: dense sides (resp. a dense bipartite core), a sparse remainder,
/// and `cfg.systems` edge-disjoint localized exceptional systems, each on
/// fresh cluster vertices.
pub fn generate_instance(cfg: &InstanceConfig) -> Result<Instance> {
    cfg.validate()?;
    let p = layout(cfg)?;
    p.validate(Some(cfg.eps0))?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut pools = Pools::new(&p, &mut rng);

    let systems = match cfg.mode {
        PartitionMode::TwoCliques => {
            let a_even = (p.a0().len() + cfg.k * cfg.m) % 2 == 0;
            let b_even = (p.b0().len() + cfg.k * cfg.m) % 2 == 0;
            if cfg.hes < cfg.systems && !(a_even && b_even) {
                return Err(Error::InvalidParameter(format!(
                    "matching exceptional systems need |A'| and |B'| even, got {} and {}",
                    p.a0().len() + cfg.k * cfg.m,
                    p.b0().len() + cfg.k * cfg.m
                )));
            }
            hes_positions(cfg.systems, cfg.hes)
                .into_iter()
                .enumerate()
                .map(|(s, hes)| two_cliques_system(&p, &mut pools, hes, two_cliques_locality(s, cfg.k)))
                .collect::<Result<Vec<_>>>()?
        }
        PartitionMode::Bipartite => {
            let edges = 2 * (cfg.a0 + cfg.b0);
            if edges as f64 > cfg.eps0 * cfg.n() as f64 + 1e-9 {
                return Err(Error::InvalidParameter(format!(
                    "each balanced system has {edges} edges, above eps0 n = {:.3}",
                    cfg.eps0 * cfg.n() as f64
                )));
            }
            (0..cfg.systems)
                .map(|s| bipartite_system(&p, &mut pools, bipartite_locality(s, cfg.k)))
                .collect::<Result<Vec<_>>>()?
        }
        PartitionMode::Plain => unreachable!("validated above"),
    };

    let mut edges: BTreeSet<(usize, usize)> = BTreeSet::new();
    for path in systems.iter().flat_map(|s| &s.paths) {
        for w in path.windows(2) {
            edges.insert((w[0].min(w[1]), w[0].max(w[1])));
        }
    }
    let used: BTreeSet<usize> = systems.iter().flat_map(|s| s.paths.iter().flatten().copied()).collect();
    let core: Vec<usize> = p.clusters().iter().flatten().copied().collect();
    let dense = |u: usize, v: usize| {
        let same = p.side_of(u) == p.side_of(v);
        match cfg.mode {
            PartitionMode::Bipartite => !same,
            _ => same,
        }
    };
    for (idx, &u) in core.iter().enumerate() {
        for &v in &core[idx + 1..] {
            let prob = if dense(u, v) { cfg.density } else { cfg.sparse_density };
            if rng.gen_bool(prob) {
                edges.insert((u.min(v), u.max(v)));
            }
        }
    }
    for v in p.v0() {
        for &u in &core {
            if !used.contains(&u) && rng.gen_bool(EXTRA_EXCEPTIONAL_DENSITY) {
                edges.insert((u.min(v), u.max(v)));
            }
        }
    }

    Ok(Instance {
        schema: SCHEMA,
        config: cfg.clone(),
        partition: p,
        edges: edges.into_iter().collect(),
        systems,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn localities_are_distinct_within_a_block() {
        let k: usize = 4;
        let all: BTreeSet<[usize; 4]> = (0..k.pow(4)).map(|s| bipartite_locality(s, k)).collect();
        assert_eq!(all.len(), k.pow(4));
        let two: BTreeSet<(usize, usize)> = (0..25).map(|s| two_cliques_locality(s, 5)).collect();
        assert_eq!(two.len(), 25);
    }

    #[test]
    fn hes_are_spread() {
        let pos = hes_positions(25, 10);
        assert_eq!(pos.iter().filter(|&&h| h).count(), 10);
        assert!(pos.windows(3).all(|w| w.iter().any(|&h| h) || w.iter().all(|&h| !h)));
    }

    #[test]
    fn same_seed_same_instance() {
        let cfg = InstanceConfig { eps0: 0.06, ..InstanceConfig::two_cliques(3, 12, 5) };
        let a = generate_instance(&InstanceConfig { systems: 4, hes: 2, ..cfg.clone() }).unwrap();
        let b = generate_instance(&InstanceConfig { systems: 4, hes: 2, ..cfg }).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn odd_side_rejects_matching_systems() {
        let cfg = InstanceConfig {
            a0: 1,
            b0: 1,
            hes: 0,
            systems: 9,
            eps0: 0.04,
            ..InstanceConfig::two_cliques(3, 20, 1)
        };
        assert!(matches!(generate_instance(&cfg), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn small_clusters_run_dry() {
        let cfg = InstanceConfig {
            systems: 4,
            hes: 0,
            eps0: 0.1,
            ..InstanceConfig::two_cliques(3, 6, 1)
        };
        let err = generate_instance(&cfg).unwrap_err();
        assert!(matches!(err, Error::InvalidParameter(msg) if msg.contains("fresh")));
    }
}
