use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::exceptional::RecordKind;
use crate::graph::{Multigraph, PartitionMode, Side};
use crate::pipeline::config::{Instance, PipelineParams};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HypothesisCheck {
    pub name: String,
    pub holds: bool,
    pub detail: String,
}

/// Every input condition of a decomposition run, checked before any work.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct HypothesisReport {
    pub checks: Vec<HypothesisCheck>,
}

impl HypothesisReport {
    pub fn holds(&self) -> bool {
        self.checks.iter().all(|c| c.holds)
    }

    pub fn failures(&self) -> Vec<&HypothesisCheck> {
        self.checks.iter().filter(|c| !c.holds).collect()
    }

    fn push(&mut self, name: &str, holds: bool, detail: String) {
        self.checks.push(HypothesisCheck {
            name: name.into(),
            holds,
            detail,
        });
    }
}

fn degree_window(g: &Multigraph, inst: &Instance, params: &PipelineParams) -> (bool, String) {
    let p = &inst.partition;
    let (k, m) = (p.k(), p.m() as f64);
    let lo = (1.0 - 4.0 * params.mu - 4.0 / k as f64) * m;
    let hi = (1.0 - 4.0 * params.mu + 4.0 / k as f64) * m;
    let mut worst: Option<(usize, usize, usize)> = None;
    for side in [Side::A, Side::B] {
        let target = match p.mode() {
            PartitionMode::Bipartite => side.other(),
            _ => side,
        };
        let masks: Vec<Vec<bool>> = (0..k).map(|i| p.mask(p.side_cluster(target, i))).collect();
        for v in p.side_core(side) {
            for (i, mask) in masks.iter().enumerate() {
                let d = g.degree_into(v, mask);
                if ((d as f64) < lo - 1e-9 || (d as f64) > hi + 1e-9) && worst.is_none() {
                    worst = Some((v, p.cluster_index(target, i), d));
                }
            }
        }
    }
    match worst {
        None => (true, format!("every cluster degree lies in [{lo:.1}, {hi:.1}]")),
        Some((v, c, d)) => (false, format!("vertex {v} has {d} neighbours in cluster {c}, outside [{lo:.1}, {hi:.1}]")),
    }
}

/// Checks the partition, the degree window, the number of systems, the
/// validity, disjointness and containment of the systems, the locality
/// split and the parity (two cliques) or incidence (bipartite) condition.
pub fn check_hypotheses(inst: &Instance, params: &PipelineParams) -> HypothesisReport {
    let mut report = HypothesisReport::default();
    let p = &inst.partition;
    let g = match inst.graph() {
        Ok(g) => g,
        Err(e) => {
            report.push("graph", false, e.to_string());
            return report;
        }
    };
    let mode_ok = p.mode() == inst.config.mode && p.mode() != PartitionMode::Plain;
    match p.validate(Some(params.eps0)) {
        Ok(()) if mode_ok => report.push("partition", true, format!("K = {}, m = {}", p.k(), p.m())),
        Ok(()) => report.push("partition", false, "partition mode differs from the configuration".into()),
        Err(e) => report.push("partition", false, e.to_string()),
    }
    if !mode_ok {
        return report;
    }

    let (holds, detail) = degree_window(&g, inst, params);
    report.push("degree-window", holds, detail);

    let n = p.n() as f64;
    let limit = (0.25 - params.mu - params.rho) * n;
    report.push(
        "system-count",
        inst.systems.len() as f64 <= limit + 1e-9,
        format!("{} systems against (1/4 - mu - rho) n = {limit:.2}", inst.systems.len()),
    );

    let mut invalid = Vec::new();
    for (idx, rec) in inst.systems.iter().enumerate() {
        let checked = match p.mode() {
            PartitionMode::Bipartite => rec.clone().into_balanced(p, params.eps0).map(|_| ()),
            _ => rec.clone().into_exceptional(p, params.eps0).map(|j| {
                if j.locality().is_none() {
                    invalid.push(format!("system {idx} carries no locality"));
                }
            }),
        };
        if let Err(e) = checked {
            invalid.push(format!("system {idx}: {e}"));
        }
    }
    report.push(
        "systems-valid",
        invalid.is_empty(),
        if invalid.is_empty() {
            format!("{} systems", inst.systems.len())
        } else {
            invalid.join("; ")
        },
    );

    let mut used = Multigraph::new(p.n());
    let mut problem = None;
    for (idx, rec) in inst.systems.iter().enumerate() {
        for path in &rec.paths {
            for w in path.windows(2) {
                if used.add_edge(w[0], w[1]).is_err() || used.multiplicity(w[0], w[1]) > g.multiplicity(w[0], w[1]) {
                    problem.get_or_insert(format!(
                        "edge {}-{} of system {idx} is missing from G or already used",
                        w[0], w[1]
                    ));
                }
            }
        }
    }
    report.push(
        "systems-disjoint",
        problem.is_none(),
        problem.unwrap_or_else(|| format!("{} edges in the union of the systems", used.edge_count())),
    );

    let k = p.k();
    let slots = match p.mode() {
        PartitionMode::Bipartite => k.pow(4),
        _ => k * k,
    };
    let mut counts: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
    for rec in &inst.systems {
        if let Some(l) = &rec.locality {
            *counts.entry(l.clone()).or_default() += 1;
        }
    }
    let max = counts.values().copied().max().unwrap_or(0);
    let min = if counts.len() < slots { 0 } else { counts.values().copied().min().unwrap_or(0) };
    let divisible = inst.systems.len() % slots == 0;
    report.push(
        "locality-split",
        max - min <= 1,
        format!(
            "{} systems over {slots} localities, between {min} and {max} each{}",
            inst.systems.len(),
            if divisible { "" } else { "; not divisible, split as equally as possible" }
        ),
    );

    match p.mode() {
        PartitionMode::Bipartite => {
            let cap = 2.0 * params.eps0 * n;
            let worst = p
                .clusters()
                .iter()
                .flatten()
                .map(|&v| (used.degree(v), v))
                .max()
                .unwrap_or((0, 0));
            report.push(
                "incidence",
                worst.0 as f64 <= cap + 1e-9,
                format!("largest cluster-vertex incidence {} at vertex {}, cap 2 eps0 n = {cap:.2}", worst.0, worst.1),
            );
        }
        _ => {
            let has_mes = inst.systems.iter().any(|r| r.kind == RecordKind::Mes);
            let (a, b) = (p.side_vertices(Side::A).len(), p.side_vertices(Side::B).len());
            report.push(
                "parity",
                !has_mes || (a % 2 == 0 && b % 2 == 0),
                format!("|A'| = {a}, |B'| = {b}{}", if has_mes { ", MES present" } else { ", no MES" }),
            );
        }
    }
    report
}
