use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exceptional::system::{BalancedExceptionalSystem, ExceptionalSystem, SystemKind};
use crate::graph::{ClusterPartition, PathSystem};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RecordKind {
    #[serde(rename = "HES")]
    Hes,
    #[serde(rename = "MES")]
    Mes,
    #[serde(rename = "BES")]
    Bes,
}

/// Unvalidated JSON form of an exceptional system.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SystemRecord {
    pub kind: RecordKind,
    pub paths: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub locality: Option<Vec<usize>>,
}

impl From<&ExceptionalSystem> for SystemRecord {
    fn from(es: &ExceptionalSystem) -> Self {
        SystemRecord {
            kind: match es.kind() {
                SystemKind::Hes => RecordKind::Hes,
                SystemKind::Mes => RecordKind::Mes,
            },
            paths: es.paths().paths.clone(),
            locality: es.locality().map(|(i, j)| vec![i, j]),
        }
    }
}

impl From<&BalancedExceptionalSystem> for SystemRecord {
    fn from(bes: &BalancedExceptionalSystem) -> Self {
        SystemRecord {
            kind: RecordKind::Bes,
            paths: bes.paths().paths.clone(),
            locality: Some(bes.locality().to_vec()),
        }
    }
}

impl SystemRecord {
    pub fn into_exceptional(self, p: &ClusterPartition, eps0: f64) -> Result<ExceptionalSystem> {
        let kind = match self.kind {
            RecordKind::Hes => SystemKind::Hes,
            RecordKind::Mes => SystemKind::Mes,
            RecordKind::Bes => {
                return Err(Error::MalformedInput(
                    "balanced system given where an exceptional system is expected".into(),
                ))
            }
        };
        let locality = match self.locality.as_deref() {
            None => None,
            Some([i, j]) => Some((*i, *j)),
            Some(other) => {
                return Err(Error::MalformedInput(format!(
                    "exceptional locality needs two indices, got {other:?}"
                )))
            }
        };
        let paths = PathSystem::new(self.paths)?;
        ExceptionalSystem::new(paths, kind, locality, p, eps0)
    }

    pub fn into_balanced(self, p: &ClusterPartition, eps0: f64) -> Result<BalancedExceptionalSystem> {
        if self.kind != RecordKind::Bes {
            return Err(Error::MalformedInput(
                "exceptional system given where a balanced one is expected".into(),
            ));
        }
        let locality: [usize; 4] = self
            .locality
            .as_deref()
            .and_then(|l| l.try_into().ok())
            .ok_or_else(|| Error::MalformedInput("balanced locality needs four indices".into()))?;
        let paths = PathSystem::new(self.paths)?;
        BalancedExceptionalSystem::new(paths, locality, p, eps0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::PartitionMode;

    #[test]
    fn round_trip() {
        let p = ClusterPartition::two_sided(
            PartitionMode::TwoCliques,
            6,
            vec![0],
            vec![vec![1, 2]],
            vec![3],
            vec![vec![4, 5]],
        )
        .unwrap();
        let text = r#"{"kind":"MES","paths":[[1,0,2],[4,3,5]],"locality":[0,0]}"#;
        let rec: SystemRecord = serde_json::from_str(text).unwrap();
        let es = rec.clone().into_exceptional(&p, 1.0).unwrap();
        assert_eq!(serde_json::to_string(&SystemRecord::from(&es)).unwrap(), text);
        assert!(rec.into_balanced(&p, 1.0).is_err());
    }
}
