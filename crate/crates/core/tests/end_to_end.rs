use std::collections::BTreeSet;

use hamdec_core::error::Error;
use hamdec_core::exceptional::{RecordKind, SystemRecord};
use hamdec_core::graph::Side;
use hamdec_core::pipeline::{
    check_hypotheses, decompose, generate_instance, verify_certificate, Instance, InstanceConfig, PipelineParams,
};

fn run(cfg: &InstanceConfig) -> (Instance, hamdec_core::pipeline::DecompositionCertificate) {
    let inst = generate_instance(cfg).unwrap();
    let cert = decompose(&inst, &PipelineParams::from_config(cfg)).unwrap();
    (inst, cert)
}

#[test]
fn two_cliques_desk_instance() {
    let cfg = InstanceConfig::two_cliques(5, 40, 2024);
    let (inst, cert) = run(&cfg);
    assert_eq!(cert.slots.len(), 25);
    assert!(cert.verdicts.passed(), "{:?}", cert.verdicts.failures);
    let hes = cert.slots.iter().filter(|s| s.kind == RecordKind::Hes).count();
    assert_eq!(hes, 10);
    assert!(cert.verdicts.coverage > 0.0 && cert.verdicts.coverage <= 1.0);
    assert_eq!(verify_certificate(&inst, &cert), cert.verdicts);
}

#[test]
fn matching_systems_only() {
    let cfg = InstanceConfig {
        hes: 0,
        ..InstanceConfig::two_cliques(5, 40, 9)
    };
    let (_, cert) = run(&cfg);
    assert!(cert.verdicts.passed(), "{:?}", cert.verdicts.failures);
    assert!(cert.slots.iter().all(|s| s.matchings.is_some()));
}

#[test]
fn bipartite_desk_instance() {
    let cfg = InstanceConfig::bipartite(4, 40, 2024);
    let (_, cert) = run(&cfg);
    assert_eq!(cert.slots.len(), 16);
    assert!(cert.verdicts.passed(), "{:?}", cert.verdicts.failures);
}

#[test]
fn empty_system_list_is_vacuous() {
    let cfg = InstanceConfig {
        systems: 0,
        ..InstanceConfig::bipartite(4, 40, 1)
    };
    let (_, cert) = run(&cfg);
    assert!(cert.slots.is_empty());
    assert!(cert.verdicts.passed());
}

#[test]
fn hot_vertex_is_rejected() {
    // With eps0 = 0.0125 a system has at most four edges and no vertex can
    // exceed the incidence cap, so loosen eps0 enough for a six-edge system.
    let cfg = InstanceConfig {
        eps0: 0.02,
        ..InstanceConfig::bipartite(4, 40, 3)
    };
    let mut inst = generate_instance(&cfg).unwrap();
    let p = inst.partition.clone();
    let mut used: BTreeSet<usize> = inst.systems.iter().flat_map(|s| s.paths.iter().flatten().copied()).collect();
    let mut fresh = |side, i| {
        let v = *p.side_cluster(side, i).iter().find(|v| !used.contains(v)).unwrap();
        used.insert(v);
        v
    };
    let hot = fresh(Side::A, 0);
    let (a0, b0) = (p.a0()[0], p.b0()[0]);
    // Sixteen systems, all localized at A_1, each with one extra path
    // ending at the hot vertex: valid and disjoint, but the hot vertex
    // meets far more than 2 eps0 n system edges.
    inst.systems = (0..16)
        .map(|s| {
            let loc = vec![0, s % 3 + 1, s % 4, s / 4];
            let paths = vec![
                vec![fresh(Side::A, 0), a0, fresh(Side::B, loc[2])],
                vec![fresh(Side::A, loc[1]), b0, fresh(Side::B, loc[3])],
                vec![hot, fresh(Side::A, loc[1])],
                vec![fresh(Side::B, loc[2]), fresh(Side::B, loc[3])],
            ];
            SystemRecord {
                kind: RecordKind::Bes,
                paths,
                locality: Some(loc),
            }
        })
        .collect();
    for path in inst.systems.iter().flat_map(|s| &s.paths) {
        for w in path.windows(2) {
            inst.edges.push((w[0].min(w[1]), w[0].max(w[1])));
        }
    }
    let params = PipelineParams::from_config(&cfg);
    let failed: Vec<String> = check_hypotheses(&inst, &params).failures().iter().map(|c| c.name.clone()).collect();
    assert_eq!(failed, vec!["incidence".to_string()]);
    let err = decompose(&inst, &params).unwrap_err();
    assert!(matches!(err.root(), Error::InvalidParameter(msg) if msg.contains("incidence")), "{err}");
}

#[test]
fn duplicated_slot_breaks_disjointness() {
    let cfg = InstanceConfig {
        eps0: 0.02,
        ..InstanceConfig::two_cliques(3, 40, 5)
    };
    let (inst, mut cert) = run(&cfg);
    cert.slots[1] = cert.slots[0].clone();
    let report = verify_certificate(&inst, &cert);
    assert!(!report.edge_disjoint);
    assert!(!report.systems_covered);
}

#[test]
fn wrong_graph_fails_containment() {
    let cfg = InstanceConfig {
        eps0: 0.02,
        ..InstanceConfig::two_cliques(3, 40, 5)
    };
    let (inst, cert) = run(&cfg);
    let other = generate_instance(&InstanceConfig { seed: 6, ..cfg }).unwrap();
    let report = verify_certificate(&Instance { systems: inst.systems.clone(), ..other }, &cert);
    assert!(report.slots.iter().any(|s| !s.in_graph));
}
