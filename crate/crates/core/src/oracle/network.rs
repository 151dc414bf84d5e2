//! Series-parallel networks: graphs on two poles (vertices 0 and 1) and
//! `n` internal vertices that are connected and become 2-connected and
//! K4-minor-free once the pole edge is added.

use serde::{Deserialize, Serialize};

use super::canon::is_canonical_fixing;
use super::graph::{pair_count, SmallGraph, MAX_N};
use super::minor::k4_free_by_reduction;

pub const MAX_INTERNAL: usize = MAX_N - 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum NetworkKind {
    /// The pole edge alone.
    Link,
    /// Poles separated by a cut vertex of the network.
    Series,
    /// Everything else: at least two parallel components.
    Parallel,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NetworkCounts {
    pub n: usize,
    /// Internal vertices labelled, poles distinguished.
    pub labelled: u64,
    /// Up to isomorphisms fixing each pole.
    pub unlabelled: u64,
    pub series_labelled: u64,
    pub parallel_labelled: u64,
    pub series_unlabelled: u64,
    pub parallel_unlabelled: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("network census supports at most {MAX_INTERNAL} internal vertices, got {0}")]
pub struct NetworkRange(pub usize);

pub fn is_network(g: &SmallGraph) -> bool {
    if g.order() < 2 || !g.is_connected() {
        return false;
    }
    let h = g.with_edge(0, 1);
    h.is_biconnected() && k4_free_by_reduction(&h)
}

/// Assumes `is_network(g)`.
pub fn classify(g: &SmallGraph) -> NetworkKind {
    if g.order() == 2 {
        return NetworkKind::Link;
    }
    if g.has_edge(0, 1) {
        return NetworkKind::Parallel;
    }
    let adj = g.adjacency();
    let all = ((1u16 << g.n) - 1) as u8;
    let separated = (2..g.order()).any(|v| {
        let rest = all & !(1 << v);
        SmallGraph::reach(&adj, 0, rest) >> 1 & 1 == 0
    });
    if separated {
        NetworkKind::Series
    } else {
        NetworkKind::Parallel
    }
}

pub fn network_census(n: usize) -> Result<NetworkCounts, NetworkRange> {
    if n > MAX_INTERNAL {
        return Err(NetworkRange(n));
    }
    let v = n + 2;
    let mut out = NetworkCounts {
        n,
        labelled: 0,
        unlabelled: 0,
        series_labelled: 0,
        parallel_labelled: 0,
        series_unlabelled: 0,
        parallel_unlabelled: 0,
    };
    let max_edges = if n == 0 { 1 } else { 2 * v - 3 };
    let bits = pair_count(v);
    for mask in 0..1u32 << bits {
        if mask.count_ones() as usize > max_edges {
            continue;
        }
        let g = SmallGraph::new(v, mask);
        // every internal vertex needs degree at least two
        let deg = g.degrees();
        if (2..v).any(|i| deg[i] < 2) || !is_network(&g) {
            continue;
        }
        let canon = is_canonical_fixing(&g, 2);
        out.labelled += 1;
        out.unlabelled += u64::from(canon);
        match classify(&g) {
            NetworkKind::Series => {
                out.series_labelled += 1;
                out.series_unlabelled += u64::from(canon);
            }
            NetworkKind::Parallel => {
                out.parallel_labelled += 1;
                out.parallel_unlabelled += u64::from(canon);
            }
            NetworkKind::Link => {}
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tiny_networks() {
        let c0 = network_census(0).unwrap();
        assert_eq!((c0.labelled, c0.unlabelled), (1, 1));
        let c1 = network_census(1).unwrap();
        // path through the internal vertex, with and without the pole edge
        assert_eq!((c1.labelled, c1.series_labelled, c1.parallel_labelled), (2, 1, 1));
    }

    #[test]
    fn three_vertex_path_is_series() {
        let g = SmallGraph::from_edges(3, &[(0, 2), (2, 1)]);
        assert!(is_network(&g));
        assert_eq!(classify(&g), NetworkKind::Series);
        assert_eq!(classify(&g.with_edge(0, 1)), NetworkKind::Parallel);
    }

    #[test]
    fn pendant_vertices_are_not_networks() {
        let g = SmallGraph::from_edges(4, &[(0, 2), (2, 1), (2, 3)]);
        assert!(!is_network(&g));
    }

    #[test]
    fn unlabelled_at_most_labelled() {
        for n in 0..=4 {
            let c = network_census(n).unwrap();
            assert!(c.unlabelled <= c.labelled);
            assert_eq!(c.labelled, c.series_labelled + c.parallel_labelled + u64::from(n == 0));
        }
    }
}
