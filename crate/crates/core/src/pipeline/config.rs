use serde::{Deserialize, Serialize};

use crate::assembly::{RewirePolicy, SearchBudget};
use crate::cyclic::ReservePolicy;
use crate::error::{Error, Result};
use crate::exceptional::SystemRecord;
use crate::graph::{ClusterPartition, Multigraph, PartitionMode};

pub const SCHEMA: u32 = 1;

/// Shape of a synthetic instance and the fractions its hypotheses use.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceConfig {
    pub mode: PartitionMode,
    #[serde(rename = "K")]
    pub k: usize,
    pub m: usize,
    pub a0: usize,
    pub b0: usize,
    pub eps0: f64,
    pub mu: f64,
    pub rho: f64,
    pub gamma: f64,
    /// Number of exceptional systems.
    pub systems: usize,
    /// How many of them are Hamilton exceptional systems; two cliques only.
    pub hes: usize,
    /// Edge probability inside a side (two cliques) or across (bipartite).
    pub density: f64,
    /// Edge probability of the sparse part.
    pub sparse_density: f64,
    pub seed: u64,
}

impl InstanceConfig {
    pub fn two_cliques(k: usize, m: usize, seed: u64) -> Self {
        InstanceConfig {
            mode: PartitionMode::TwoCliques,
            k,
            m,
            a0: 2,
            b0: 2,
            eps0: 0.01,
            mu: 0.05,
            rho: 0.1,
            gamma: 0.15,
            systems: k * k,
            hes: 2 * k * k / 5,
            density: 0.95,
            sparse_density: 0.02,
            seed,
        }
    }

    pub fn bipartite(k: usize, m: usize, seed: u64) -> Self {
        InstanceConfig {
            mode: PartitionMode::Bipartite,
            k,
            m,
            a0: 1,
            b0: 1,
            eps0: 0.0125,
            mu: 0.05,
            rho: 0.1,
            gamma: 0.15,
            systems: k * k,
            hes: 0,
            density: 0.95,
            sparse_density: 0.02,
            seed,
        }
    }

    pub fn for_mode(mode: PartitionMode, k: usize, m: usize, seed: u64) -> Result<Self> {
        match mode {
            PartitionMode::TwoCliques => Ok(Self::two_cliques(k, m, seed)),
            PartitionMode::Bipartite => Ok(Self::bipartite(k, m, seed)),
            PartitionMode::Plain => Err(Error::InvalidParameter("instances are two cliques or bipartite".into())),
        }
    }

    pub fn n(&self) -> usize {
        self.a0 + self.b0 + 2 * self.k * self.m
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        match self.mode {
            PartitionMode::TwoCliques if self.k % 2 == 0 || self.k < 3 => {
                return bad(format!("two cliques need an odd K >= 3, got {}", self.k))
            }
            PartitionMode::Bipartite if self.k % 2 == 1 || self.k < 2 => {
                return bad(format!("bipartite instances need an even K >= 2, got {}", self.k))
            }
            PartitionMode::Plain => return bad("instances are two cliques or bipartite".into()),
            _ => {}
        }
        if self.m == 0 {
            return bad("clusters must be non-empty".into());
        }
        for (name, x) in [
            ("eps0", self.eps0),
            ("mu", self.mu),
            ("rho", self.rho),
            ("gamma", self.gamma),
            ("density", self.density),
            ("sparse_density", self.sparse_density),
        ] {
            if !(0.0..=1.0).contains(&x) {
                return bad(format!("{name} = {x} lies outside [0, 1]"));
            }
        }
        if self.hes > self.systems {
            return bad(format!("{} HES among {} systems", self.hes, self.systems));
        }
        if self.mode == PartitionMode::Bipartite && self.hes > 0 {
            return bad("bipartite instances carry balanced systems only".into());
        }
        let limit = (0.25 - self.mu - self.rho) * self.n() as f64;
        if self.systems as f64 > limit + 1e-9 {
            return bad(format!(
                "{} systems exceed (1/4 - mu - rho) n = {limit:.2}",
                self.systems
            ));
        }
        Ok(())
    }
}

/// Parameters of a decomposition run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineParams {
    pub eps0: f64,
    pub mu: f64,
    pub rho: f64,
    pub gamma: f64,
    /// `eps` of the reservoir superregularity checks.
    pub reservoir_eps: f64,
    pub reserve: ReservePolicy,
    pub rewire: RewirePolicy,
    pub budget: SearchBudget,
    pub seed: u64,
    /// Drop edges outside the cliques (resp. outside `G[A, B]`) that no
    /// exceptional system uses, instead of only reporting them.
    pub trim: bool,
}

impl Default for PipelineParams {
    fn default() -> Self {
        PipelineParams {
            eps0: 0.01,
            mu: 0.05,
            rho: 0.1,
            gamma: 0.15,
            reservoir_eps: 0.3,
            reserve: ReservePolicy::Auto,
            rewire: RewirePolicy::Economical,
            budget: SearchBudget::default(),
            seed: 0,
            trim: false,
        }
    }
}

impl PipelineParams {
    pub fn from_config(cfg: &InstanceConfig) -> Self {
        PipelineParams {
            eps0: cfg.eps0,
            mu: cfg.mu,
            rho: cfg.rho,
            gamma: cfg.gamma,
            seed: cfg.seed,
            ..PipelineParams::default()
        }
    }
}

/// A graph with its partition and exceptional systems, as exchanged in JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    pub schema: u32,
    pub config: InstanceConfig,
    pub partition: ClusterPartition,
    pub edges: Vec<(usize, usize)>,
    pub systems: Vec<SystemRecord>,
}

impl Instance {
    pub fn graph(&self) -> Result<Multigraph> {
        Multigraph::from_edges(self.partition.n(), self.edges.iter().copied())
    }

    pub fn check_schema(&self) -> Result<()> {
        if self.schema != SCHEMA {
            return Err(Error::MalformedInput(format!(
                "instance schema {} is not {SCHEMA}",
                self.schema
            )));
        }
        Ok(())
    }
}
