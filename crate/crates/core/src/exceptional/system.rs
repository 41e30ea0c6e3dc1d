use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{ClusterPartition, PathSystem, Side};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SystemKind {
    #[serde(rename = "HES")]
    Hes,
    #[serde(rename = "MES")]
    Mes,
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidExceptionalSystem(msg.into())
}

fn check_range(paths: &PathSystem, p: &ClusterPartition) -> Result<()> {
    match paths.vertices().iter().find(|&&v| v >= p.n()) {
        Some(v) => Err(invalid(format!("vertex {v} outside 0..{}", p.n()))),
        None => Ok(()),
    }
}

/// Exceptional-vertex degree 2, everything else degree at most 1.
fn check_degrees(paths: &PathSystem, p: &ClusterPartition) -> Result<()> {
    let covered = paths.vertices();
    for v in p.v0() {
        if !covered.contains(&v) {
            return Err(invalid(format!("exceptional vertex {v} is not covered")));
        }
    }
    for path in &paths.paths {
        let last = path.len() - 1;
        for (pos, &v) in path.iter().enumerate() {
            let degree = usize::from(pos > 0) + usize::from(pos < last);
            if p.is_exceptional(v) && degree != 2 {
                return Err(invalid(format!("exceptional vertex {v} has degree {degree}")));
            }
            if !p.is_exceptional(v) && degree > 1 {
                return Err(invalid(format!("cluster vertex {v} has degree {degree}")));
            }
        }
    }
    Ok(())
}

/// Endpoints of the non-trivial paths as `(first, last)`.
pub fn path_ends(paths: &PathSystem) -> Vec<(usize, usize)> {
    paths
        .nontrivial()
        .map(|path| (path[0], path[path.len() - 1]))
        .collect()
}

/// An exceptional system: a path system covering `V0` that extends to a
/// Hamilton cycle (HES) or to two perfect matchings (MES).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExceptionalSystem {
    paths: PathSystem,
    kind: SystemKind,
    locality: Option<(usize, usize)>,
}

impl ExceptionalSystem {
    /// Validates every axiom against `p` and `eps0`. Locality indices are
    /// 0-based positions of `A_i` and `B_i'` within their sides.
    pub fn new(
        paths: PathSystem,
        kind: SystemKind,
        locality: Option<(usize, usize)>,
        p: &ClusterPartition,
        eps0: f64,
    ) -> Result<Self> {
        let es = ExceptionalSystem {
            paths,
            kind,
            locality,
        };
        es.validate(p, eps0)?;
        Ok(es)
    }

    pub fn validate(&self, p: &ClusterPartition, eps0: f64) -> Result<()> {
        PathSystem::new(self.paths.paths.clone()).map_err(|e| invalid(e.to_string()))?;
        check_range(&self.paths, p)?;
        check_degrees(&self.paths, p)?;
        for (u, v) in self.paths.edges() {
            let (cu, cv) = (p.cluster_of(u), p.cluster_of(v));
            if cu.is_some() && cv.is_some() && p.side_of(u) == p.side_of(v) {
                return Err(invalid(format!("edge {u}-{v} lies inside one side")));
            }
        }
        let crossings = self.ab_path_count(p);
        match self.kind {
            SystemKind::Hes => {
                if crossings == 0 || crossings % 2 == 1 {
                    return Err(invalid(format!(
                        "HES needs an even positive number of AB-paths, found {crossings}"
                    )));
                }
            }
            SystemKind::Mes => {
                if let Some((u, v)) = self.paths.edges().find(|&(u, v)| p.side_of(u) != p.side_of(v)) {
                    return Err(invalid(format!("MES contains the cross edge {u}-{v}")));
                }
            }
        }
        let limit = eps0.sqrt() * p.n() as f64 + 1e-9;
        if crossings as f64 > limit {
            return Err(invalid(format!(
                "{crossings} AB-paths exceed sqrt(eps0)*n = {limit:.3}"
            )));
        }
        if let Some((i, j)) = self.locality {
            if i >= p.k() || j >= p.k() {
                return Err(invalid(format!("locality ({i},{j}) outside 0..{}", p.k())));
            }
            for v in self.paths.vertices() {
                let ok = match (p.side_of(v), p.index_in_side(v)) {
                    (_, None) => true,
                    (Some(Side::A), Some(c)) => c == i,
                    (Some(Side::B), Some(c)) => c == j,
                    _ => false,
                };
                if !ok {
                    return Err(invalid(format!("vertex {v} breaks locality ({i},{j})")));
                }
            }
        }
        Ok(())
    }

    /// Number of paths joining a vertex of `A` to a vertex of `B`.
    pub fn ab_path_count(&self, p: &ClusterPartition) -> usize {
        path_ends(&self.paths)
            .into_iter()
            .filter(|&(x, y)| p.side_of(x) != p.side_of(y))
            .count()
    }

    pub fn paths(&self) -> &PathSystem {
        &self.paths
    }

    pub fn kind(&self) -> SystemKind {
        self.kind
    }

    pub fn locality(&self) -> Option<(usize, usize)> {
        self.locality
    }

    pub fn edge_count(&self) -> usize {
        self.paths.edge_count()
    }
}

/// A balanced exceptional system for the bipartite setting, localized at
/// `(i1, i2, i3, i4)`: A-side clusters `i1, i2` and B-side clusters `i3, i4`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BalancedExceptionalSystem {
    paths: PathSystem,
    locality: [usize; 4],
}

impl BalancedExceptionalSystem {
    pub fn new(
        paths: PathSystem,
        locality: [usize; 4],
        p: &ClusterPartition,
        eps0: f64,
    ) -> Result<Self> {
        let bes = BalancedExceptionalSystem { paths, locality };
        bes.validate(p, eps0)?;
        Ok(bes)
    }

    pub fn validate(&self, p: &ClusterPartition, eps0: f64) -> Result<()> {
        PathSystem::new(self.paths.paths.clone()).map_err(|e| invalid(e.to_string()))?;
        check_range(&self.paths, p)?;
        let [i1, i2, i3, i4] = self.locality;
        if self.locality.iter().any(|&i| i >= p.k()) {
            return Err(invalid(format!("locality {:?} outside 0..{}", self.locality, p.k())));
        }
        for v in self.paths.vertices() {
            let ok = match (p.side_of(v), p.index_in_side(v)) {
                (_, None) => true,
                (Some(Side::A), Some(c)) => c == i1 || c == i2,
                (Some(Side::B), Some(c)) => c == i3 || c == i4,
                _ => false,
            };
            if !ok {
                return Err(invalid(format!("vertex {v} breaks locality {:?}", self.locality)));
            }
        }
        check_degrees(&self.paths, p)?;
        for (u, v) in self.paths.edges() {
            if p.is_exceptional(u) || p.is_exceptional(v) {
                continue;
            }
            let cu = p.index_in_side(u).unwrap();
            let cv = p.index_in_side(v).unwrap();
            let ok = match (p.side_of(u), p.side_of(v)) {
                (Some(Side::A), Some(Side::A)) => (cu, cv) == (i1, i2) || (cu, cv) == (i2, i1),
                (Some(Side::B), Some(Side::B)) => (cu, cv) == (i3, i4) || (cu, cv) == (i4, i3),
                _ => false,
            };
            if !ok {
                return Err(invalid(format!("edge {u}-{v} is not an allowed cluster edge")));
            }
        }
        let touched: BTreeSet<usize> = self.paths.edges().flat_map(|(u, v)| [u, v]).collect();
        let count = |side| {
            touched
                .iter()
                .filter(|&&v| !p.is_exceptional(v) && p.side_of(v) == Some(side))
                .count()
        };
        let (on_a, on_b) = (count(Side::A), count(Side::B));
        if on_a != on_b {
            return Err(invalid(format!(
                "edges cover {on_a} vertices of A but {on_b} of B"
            )));
        }
        let limit = eps0 * p.n() as f64 + 1e-9;
        if self.paths.edge_count() as f64 > limit {
            return Err(invalid(format!(
                "{} edges exceed eps0*n = {limit:.3}",
                self.paths.edge_count()
            )));
        }
        Ok(())
    }

    pub fn paths(&self) -> &PathSystem {
        &self.paths
    }

    pub fn locality(&self) -> [usize; 4] {
        self.locality
    }

    pub fn edge_count(&self) -> usize {
        self.paths.edge_count()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::PartitionMode;

    /// A0 = {0}, A_1 = {1,2,3,4}, B0 = {5}, B_1 = {6,7,8,9}.
    fn tiny() -> ClusterPartition {
        ClusterPartition::two_sided(
            PartitionMode::TwoCliques,
            10,
            vec![0],
            vec![vec![1, 2, 3, 4]],
            vec![5],
            vec![vec![6, 7, 8, 9]],
        )
        .unwrap()
    }

    fn ps(paths: &[&[usize]]) -> PathSystem {
        PathSystem::new(paths.iter().map(|p| p.to_vec()).collect()).unwrap()
    }

    #[test]
    fn mes_accepts_same_side_paths() {
        let p = tiny();
        let es = ExceptionalSystem::new(ps(&[&[1, 0, 2], &[6, 5, 7]]), SystemKind::Mes, Some((0, 0)), &p, 1.0);
        assert!(es.is_ok());
    }

    #[test]
    fn hes_counts_crossings() {
        let p = tiny();
        let two = ps(&[&[1, 0, 6], &[2, 5, 7]]);
        let es = ExceptionalSystem::new(two.clone(), SystemKind::Hes, None, &p, 1.0).unwrap();
        assert_eq!(es.ab_path_count(&p), 2);
        assert!(ExceptionalSystem::new(two, SystemKind::Mes, None, &p, 1.0).is_err());
        let one = ps(&[&[1, 0, 6], &[7, 5, 8]]);
        assert!(ExceptionalSystem::new(one, SystemKind::Hes, None, &p, 1.0).is_err());
    }

    #[test]
    fn hes_without_crossings_rejected() {
        let p = tiny();
        let none = ps(&[&[1, 0, 2], &[6, 5, 7]]);
        assert!(matches!(
            ExceptionalSystem::new(none, SystemKind::Hes, None, &p, 1.0),
            Err(Error::InvalidExceptionalSystem(_))
        ));
    }

    #[test]
    fn axioms_enforced() {
        let p = tiny();
        // Exceptional vertex left uncovered.
        assert!(ExceptionalSystem::new(ps(&[&[1, 0, 2]]), SystemKind::Mes, None, &p, 1.0).is_err());
        // Edge inside A.
        assert!(ExceptionalSystem::new(ps(&[&[1, 0, 2, 3]]), SystemKind::Mes, None, &p, 1.0).is_err());
        // Crossing budget sqrt(eps0) n = 1 with two crossings.
        let two = ps(&[&[1, 0, 6], &[2, 5, 7]]);
        assert!(ExceptionalSystem::new(two, SystemKind::Hes, None, &p, 0.01).is_err());
    }

    #[test]
    fn balanced_system_checks() {
        let p = ClusterPartition::two_sided(
            PartitionMode::Bipartite,
            10,
            vec![0],
            vec![vec![1, 2], vec![3, 4]],
            vec![5],
            vec![vec![6, 7], vec![8, 9]],
        )
        .unwrap();
        let ok = ps(&[&[1, 0, 3], &[6, 5, 8]]);
        assert!(BalancedExceptionalSystem::new(ok, [0, 1, 0, 1], &p, 1.0).is_ok());
        let lopsided = ps(&[&[1, 0, 3], &[6, 5, 8], &[2, 4]]);
        assert!(BalancedExceptionalSystem::new(lopsided, [0, 1, 0, 1], &p, 1.0).is_err());
        let crossing = ps(&[&[1, 0, 6], &[8, 5, 3]]);
        assert!(BalancedExceptionalSystem::new(crossing, [0, 1, 0, 1], &p, 1.0).is_ok());
        let direct_cross = ps(&[&[1, 0, 3], &[6, 5, 8], &[2, 7]]);
        assert!(BalancedExceptionalSystem::new(direct_cross, [0, 1, 0, 1], &p, 1.0).is_err());
    }
}
