//! Instances, the two decomposition runs, certificates and their verifier.

mod certificate;
mod config;
mod generate;
mod hypotheses;
mod run;
mod verify;

pub use certificate::{BuildNotes, DecompositionCertificate, SliceNotes, SlotRecord};
pub use config::{Instance, InstanceConfig, PipelineParams, SCHEMA};
pub use generate::generate_instance;
pub use hypotheses::{check_hypotheses, HypothesisCheck, HypothesisReport};
pub use run::{approx_decompose_bipartite, approx_decompose_two_cliques, decompose};
pub use verify::{verify_certificate, SlotVerdict, VerificationReport};
