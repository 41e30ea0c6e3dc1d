use serde::{Deserialize, Serialize};
use thiserror::Error;

/// A violated cut of the regular-subgraph flow network.
///
/// `s1` lies in the left class, `s2` in the right class. The witness is valid
/// when `edges_s1_to_outside < degree * (|s1| - |s2|)`, which
/// [`CutWitness::is_violating`] checks directly.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CutWitness {
    pub s1: Vec<usize>,
    pub s2: Vec<usize>,
    pub edges_s1_to_outside: usize,
    pub degree: usize,
}

impl CutWitness {
    pub fn is_violating(&self) -> bool {
        let lhs = self.edges_s1_to_outside as i64;
        let rhs = self.degree as i64 * (self.s1.len() as i64 - self.s2.len() as i64);
        lhs < rhs
    }
}

/// A Hall violator: `left` has strictly fewer than `left.len()` neighbours.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HallWitness {
    pub left: Vec<usize>,
    pub neighbourhood: Vec<usize>,
}

/// Where in a pipeline run an error surfaced.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageContext {
    pub stage: String,
    pub side: Option<char>,
    pub slice: Option<usize>,
    pub slot: Option<usize>,
    pub seed: u64,
}

impl std::fmt::Display for StageContext {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "stage={}", self.stage)?;
        if let Some(side) = self.side {
            write!(f, " side={side}")?;
        }
        if let Some(slice) = self.slice {
            write!(f, " slice={slice}")?;
        }
        if let Some(slot) = self.slot {
            write!(f, " slot={slot}")?;
        }
        write!(f, " seed={}", self.seed)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("malformed input: {0}")]
    MalformedInput(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("degree hypothesis violated: flow {flow} < {target}")]
    DegreeHypothesisViolated {
        target: usize,
        flow: usize,
        cut: CutWitness,
    },

    #[error("invalid exceptional system: {0}")]
    InvalidExceptionalSystem(String),

    #[error("cycle is not consistent with the ordered matching: {0}")]
    NotConsistent(String),

    #[error("splice verification failed: {0}")]
    SpliceVerificationFailed(String),

    #[error("sampling failed after {attempts} attempts: {reason}")]
    SamplingFailed { attempts: usize, reason: String },

    #[error("reservoir exhausted: {0}")]
    ReservoirExhausted(String),

    #[error("no perfect matching: {} left vertices see only {} right vertices", witness.left.len(), witness.neighbourhood.len())]
    MatchingInfeasible { witness: HallWitness },

    #[error("hamilton search exhausted after {restarts} restarts on {vertices} vertices")]
    HamiltonSearchExhausted { restarts: usize, vertices: usize },

    #[error("assembly verification failed: {0}")]
    AssemblyVerificationFailed(String),

    #[error("{context}: {source}")]
    Staged {
        context: StageContext,
        source: Box<Error>,
    },
}

impl Error {
    /// Strips stage wrappers.
    pub fn root(&self) -> &Error {
        match self {
            Error::Staged { source, .. } => source.root(),
            other => other,
        }
    }

    pub fn at(self, context: StageContext) -> Error {
        Error::Staged {
            context,
            source: Box::new(self),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
