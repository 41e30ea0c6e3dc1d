use crate::error::{Error, Result};
use crate::graph::ClusterCycle;

/// `(K-1)/2` Hamilton cycles decomposing the complete graph on `0..K`.
///
/// Vertex `K-1` is the hub; cycle `j` runs hub, j, j+1, j-1, j+2, j-2, ...,
/// j+p over the remaining `2p` vertices taken mod `2p`.
pub fn walecki_decompose(k: usize) -> Result<Vec<ClusterCycle>> {
    if k < 3 || k % 2 == 0 {
        return Err(Error::InvalidParameter(format!(
            "Walecki decomposition needs an odd K >= 3, got {k}"
        )));
    }
    let p = (k - 1) / 2;
    let ring = 2 * p;
    let hub = k - 1;
    let cycles = (0..p)
        .map(|j| {
            let mut order = Vec::with_capacity(k);
            order.push(hub);
            order.push(j);
            for step in 1..p {
                order.push((j + step) % ring);
                order.push((j + ring - step) % ring);
            }
            order.push((j + p) % ring);
            ClusterCycle::new(order).expect("zig-zag visits every vertex once")
        })
        .collect();
    Ok(cycles)
}

/// `K/2` Hamilton cycles decomposing `K_{K,K}` on clusters `A_i = i`,
/// `B_i = K + i`. Each cycle starts at an A cluster and alternates sides.
pub fn bipartite_hamilton_decompose(k: usize) -> Result<Vec<ClusterCycle>> {
    if k < 2 || k % 2 == 1 {
        return Err(Error::InvalidParameter(format!(
            "bipartite decomposition needs an even K >= 2, got {k}"
        )));
    }
    // Cycle j is the union of the shifted matchings a_x b_{x+2j} and a_x b_{x+2j+1}.
    let cycles = (0..k / 2)
        .map(|j| {
            let mut order = Vec::with_capacity(2 * k);
            let mut x = 0usize;
            for _ in 0..k {
                order.push(x);
                order.push(k + (x + 2 * j) % k);
                x = (x + k - 1) % k;
            }
            ClusterCycle::new(order).expect("alternating walk visits every cluster once")
        })
        .collect();
    Ok(cycles)
}
