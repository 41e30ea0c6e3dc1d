use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::assembly::PairReservoir;
use crate::cyclic::SysVerdicts;
use crate::exceptional::RecordKind;
use crate::graph::{Multigraph, PartitionMode};
use crate::pipeline::config::PipelineParams;
use crate::pipeline::hypotheses::HypothesisReport;
use crate::pipeline::verify::VerificationReport;

/// One Hamilton cycle (HES, BES) or pair of cycles (MES) of the output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlotRecord {
    pub system: usize,
    pub kind: RecordKind,
    /// Index of the cyclic system the slot was built in.
    pub slice: usize,
    /// Edge copies `u < v`, sorted.
    pub edges: Vec<(usize, usize)>,
    /// For a MES, the two perfect matchings whose union is the slot.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matchings: Option<[Vec<(usize, usize)>; 2]>,
    pub digest: String,
}

/// Diagnostics of a slice's run, kept in the certificate for inspection.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SliceNotes {
    pub side: Option<char>,
    pub index: usize,
    pub slots: usize,
    /// Every condition of the balanced extension held.
    pub extension_valid: bool,
    pub extension_failures: Vec<String>,
    pub reservoir_arcs: usize,
    pub reservoir_used: usize,
    pub reservoir_pairs: Vec<PairReservoir>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BuildNotes {
    pub hypotheses: HypothesisReport,
    pub decomposition: Vec<SysVerdicts>,
    pub slices: Vec<SliceNotes>,
    /// Edges outside the dense core that no exceptional system uses.
    pub unused_outside_edges: usize,
    pub trimmed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecompositionCertificate {
    pub schema: u32,
    pub mode: PartitionMode,
    pub params: PipelineParams,
    pub instance_digest: String,
    pub slots: Vec<SlotRecord>,
    /// Digest over the slot digests in order.
    pub digest: String,
    pub notes: BuildNotes,
    pub verdicts: VerificationReport,
}

pub(crate) fn sorted_copies(g: &Multigraph) -> Vec<(usize, usize)> {
    let mut e: Vec<(usize, usize)> = g.edge_copies().into_iter().map(|(u, v)| (u.min(v), u.max(v))).collect();
    e.sort_unstable();
    e
}

pub(crate) fn edge_digest(edges: &[(usize, usize)]) -> String {
    let mut h = Sha256::new();
    for (u, v) in edges {
        h.update(format!("{u}-{v};"));
    }
    hex::encode(h.finalize())
}

pub(crate) fn chain_digest<'a>(parts: impl IntoIterator<Item = &'a str>) -> String {
    let mut h = Sha256::new();
    for p in parts {
        h.update(p.as_bytes());
        h.update(b"\n");
    }
    hex::encode(h.finalize())
}

impl DecompositionCertificate {
    /// Canonical JSON; equal runs give byte-identical output.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate serializes")
    }
}
