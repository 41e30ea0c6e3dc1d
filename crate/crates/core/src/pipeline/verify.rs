//! Checks a certificate against its instance using only graph primitives.
//! Nothing here calls into the code that built the certificate.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::exceptional::RecordKind;
use crate::graph::{verify_hamilton_cycle, Multigraph, PartitionMode, Side};
use crate::pipeline::certificate::DecompositionCertificate;
use crate::pipeline::config::{Instance, SCHEMA};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SlotVerdict {
    pub slot: usize,
    pub system: usize,
    /// Hamilton cycle on all vertices (HES, BES), or two edge-disjoint
    /// perfect matchings whose union is the slot (MES).
    pub structure: bool,
    pub contains_system: bool,
    pub in_graph: bool,
    pub digest: bool,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct VerificationReport {
    pub slots: Vec<SlotVerdict>,
    /// Every system has exactly one slot.
    pub systems_covered: bool,
    /// The slots are edge-disjoint as a multiset inside `G`.
    pub edge_disjoint: bool,
    /// Edges of the slots outside the exceptional systems, over the edges
    /// of the dense core.
    pub coverage: f64,
    pub failures: Vec<String>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

fn digest_of(edges: &[(usize, usize)]) -> String {
    let mut h = Sha256::new();
    for (u, v) in edges {
        h.update(format!("{u}-{v};"));
    }
    hex::encode(h.finalize())
}

fn is_perfect_matching(edges: &[(usize, usize)], n: usize) -> bool {
    let mut deg = vec![0usize; n];
    for &(u, v) in edges {
        if u >= n || v >= n || u == v {
            return false;
        }
        deg[u] += 1;
        deg[v] += 1;
    }
    deg.iter().all(|&d| d == 1)
}

fn build(n: usize, edges: &[(usize, usize)]) -> Option<Multigraph> {
    Multigraph::from_edges(n, edges.iter().copied()).ok()
}

fn fits_inside(small: &Multigraph, big: &Multigraph) -> bool {
    small.edges().all(|(u, v, k)| big.multiplicity(u, v) >= k)
}

/// Verifies every slot and the global conditions. Failures are listed,
/// never thrown.
pub fn verify_certificate(inst: &Instance, cert: &DecompositionCertificate) -> VerificationReport {
    let n = inst.partition.n();
    let mut failures = Vec::new();
    if cert.schema != SCHEMA {
        failures.push(format!("certificate schema {} is not {SCHEMA}", cert.schema));
    }
    if cert.mode != inst.partition.mode() {
        failures.push(format!("certificate mode {:?} differs from the instance", cert.mode));
    }
    let Some(g) = build(n, &inst.edges) else {
        failures.push("instance edges do not form a graph".into());
        return VerificationReport {
            failures,
            ..VerificationReport::default()
        };
    };

    let mut seen = vec![0usize; inst.systems.len()];
    let mut union = Multigraph::new(n);
    let mut covered_edges = 0usize;
    let all: Vec<usize> = (0..n).collect();
    let mut slots = Vec::with_capacity(cert.slots.len());
    for (idx, slot) in cert.slots.iter().enumerate() {
        let fail = |what: &str| format!("slot {idx} (system {}): {what}", slot.system);
        let Some(record) = inst.systems.get(slot.system) else {
            failures.push(fail("names no system of the instance"));
            continue;
        };
        seen[slot.system] += 1;
        let Some(h) = build(n, &slot.edges) else {
            failures.push(fail("edges do not form a graph"));
            continue;
        };
        let mut j = Multigraph::new(n);
        let mut j_ok = true;
        for path in &record.paths {
            for w in path.windows(2) {
                j_ok &= j.add_edge(w[0], w[1]).is_ok();
            }
        }
        let contains_system = j_ok && fits_inside(&j, &h);
        let in_graph = fits_inside(&h, &g);
        let structure = match (slot.kind, record.kind) {
            (a, b) if a != b => false,
            (RecordKind::Mes, _) => match &slot.matchings {
                Some([m1, m2]) => {
                    let mut both = Multigraph::new(n);
                    let ok = m1.iter().chain(m2).all(|&(u, v)| both.add_edge(u, v).is_ok());
                    let disjoint = m1.iter().all(|e| !m2.contains(e) && !m2.contains(&(e.1, e.0)));
                    ok && disjoint
                        && is_perfect_matching(m1, n)
                        && is_perfect_matching(m2, n)
                        && fits_inside(&both, &h)
                        && fits_inside(&h, &both)
                }
                None => false,
            },
            _ => verify_hamilton_cycle(&h, &all),
        };
        let digest = digest_of(&slot.edges) == slot.digest;
        for (ok, what) in [
            (structure, "wrong structure"),
            (contains_system, "misses an edge of its exceptional system"),
            (in_graph, "uses an edge outside G"),
            (digest, "digest mismatch"),
        ] {
            if !ok {
                failures.push(fail(what));
            }
        }
        if contains_system {
            covered_edges += h.edge_count() - j.edge_count();
        }
        union = union.sum(&h);
        slots.push(SlotVerdict {
            slot: idx,
            system: slot.system,
            structure,
            contains_system,
            in_graph,
            digest,
        });
    }

    let systems_covered = cert.slots.len() == inst.systems.len() && seen.iter().all(|&c| c == 1);
    if !systems_covered {
        failures.push(format!(
            "{} slots for {} systems, some system missing or repeated",
            cert.slots.len(),
            inst.systems.len()
        ));
    }
    let edge_disjoint = fits_inside(&union, &g);
    if !edge_disjoint {
        failures.push("slots share an edge of G".into());
    }
    let chained = {
        let mut h = Sha256::new();
        for s in &cert.slots {
            h.update(s.digest.as_bytes());
            h.update(b"\n");
        }
        hex::encode(h.finalize())
    };
    if chained != cert.digest {
        failures.push("global digest mismatch".into());
    }

    let p = &inst.partition;
    let core: Vec<Option<Side>> = (0..n)
        .map(|v| if p.is_exceptional(v) { None } else { p.side_of(v) })
        .collect();
    let dense = g
        .edges()
        .filter(|&(u, v, _)| match (core[u], core[v]) {
            (Some(a), Some(b)) => match p.mode() {
                PartitionMode::Bipartite => a != b,
                _ => a == b,
            },
            _ => false,
        })
        .map(|(_, _, k)| k)
        .sum::<usize>();
    let coverage = if dense == 0 { 0.0 } else { covered_edges as f64 / dense as f64 };

    VerificationReport {
        slots,
        systems_covered,
        edge_disjoint,
        coverage,
        failures,
    }
}
