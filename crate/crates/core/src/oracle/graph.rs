//! Simple graphs on at most eight vertices stored as edge bitmasks.
//!
//! Pair `{i, j}` with `i < j` has index `j(j-1)/2 + i` (colex order), so the
//! masks of graphs on `n` vertices are exactly the integers below
//! `2^(n(n-1)/2)`.

pub const MAX_N: usize = 8;

pub const fn pair_index(i: usize, j: usize) -> usize {
    let (a, b) = if i < j { (i, j) } else { (j, i) };
    b * (b - 1) / 2 + a
}

pub const fn pair_count(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// `PAIRS[k] = (i, j)` for pair index `k`.
pub const PAIRS: [(u8, u8); 28] = {
    let mut out = [(0u8, 0u8); 28];
    let mut j = 1;
    while j < MAX_N {
        let mut i = 0;
        while i < j {
            out[pair_index(i, j)] = (i as u8, j as u8);
            i += 1;
        }
        j += 1;
    }
    out
};

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct SmallGraph {
    pub n: u8,
    pub mask: u32,
}

impl SmallGraph {
    pub fn new(n: usize, mask: u32) -> Self {
        assert!(n <= MAX_N, "at most {MAX_N} vertices");
        debug_assert!(pair_count(n) == 32 || (mask as u64) < (1u64 << pair_count(n)));
        SmallGraph { n: n as u8, mask }
    }

    pub fn empty(n: usize) -> Self {
        Self::new(n, 0)
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Self {
        let mut g = Self::empty(n);
        for &(a, b) in edges {
            g.mask |= 1 << pair_index(a, b);
        }
        g
    }

    pub fn complete(n: usize) -> Self {
        let e = pair_count(n);
        Self::new(n, if e == 32 { u32::MAX } else { (1u32 << e) - 1 })
    }

    pub fn order(&self) -> usize {
        self.n as usize
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        a != b && self.mask >> pair_index(a, b) & 1 == 1
    }

    pub fn with_edge(&self, a: usize, b: usize) -> Self {
        SmallGraph { n: self.n, mask: self.mask | 1 << pair_index(a, b) }
    }

    pub fn without_edge(&self, a: usize, b: usize) -> Self {
        SmallGraph { n: self.n, mask: self.mask & !(1 << pair_index(a, b)) }
    }

    pub fn edge_count(&self) -> u32 {
        self.mask.count_ones()
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let mut m = self.mask;
        std::iter::from_fn(move || {
            if m == 0 {
                return None;
            }
            let k = m.trailing_zeros() as usize;
            m &= m - 1;
            let (a, b) = PAIRS[k];
            Some((a as usize, b as usize))
        })
    }

    /// Neighbour sets as vertex bitmasks.
    pub fn adjacency(&self) -> [u8; MAX_N] {
        let mut adj = [0u8; MAX_N];
        for (a, b) in self.edges() {
            adj[a] |= 1 << b;
            adj[b] |= 1 << a;
        }
        adj
    }

    pub fn degrees(&self) -> [u8; MAX_N] {
        let mut d = [0u8; MAX_N];
        for (a, b) in self.edges() {
            d[a] += 1;
            d[b] += 1;
        }
        d
    }

    pub fn degree(&self, v: usize) -> u32 {
        self.adjacency()[v].count_ones()
    }

    fn all_vertices(&self) -> u8 {
        ((1u16 << self.n) - 1) as u8
    }

    /// Vertex set reachable from `start` within `allowed`.
    pub fn reach(adj: &[u8; MAX_N], start: usize, allowed: u8) -> u8 {
        let mut seen = 1u8 << start;
        let mut frontier = seen;
        while frontier != 0 {
            let mut next = 0u8;
            let mut f = frontier;
            while f != 0 {
                let v = f.trailing_zeros() as usize;
                f &= f - 1;
                next |= adj[v];
            }
            next &= allowed & !seen;
            seen |= next;
            frontier = next;
        }
        seen
    }

    pub fn is_connected(&self) -> bool {
        if self.n <= 1 {
            return true;
        }
        let all = self.all_vertices();
        Self::reach(&self.adjacency(), 0, all) == all
    }

    pub fn component_count(&self) -> usize {
        let adj = self.adjacency();
        let all = self.all_vertices();
        let mut left = all;
        let mut c = 0;
        while left != 0 {
            let v = left.trailing_zeros() as usize;
            left &= !Self::reach(&adj, v, all);
            c += 1;
        }
        c
    }

    /// Connected, at least two vertices, and no cut vertex (so `K2` counts).
    pub fn is_biconnected(&self) -> bool {
        if self.n < 2 || !self.is_connected() {
            return false;
        }
        if self.n == 2 {
            return true;
        }
        let adj = self.adjacency();
        let all = self.all_vertices();
        (0..self.order()).all(|v| {
            let rest = all & !(1 << v);
            let start = rest.trailing_zeros() as usize;
            Self::reach(&adj, start, rest) == rest
        })
    }

    /// Relabels vertex `v` as `perm[v]`.
    pub fn permute(&self, perm: &[u8]) -> Self {
        let mut mask = 0u32;
        for (a, b) in self.edges() {
            mask |= 1 << pair_index(perm[a] as usize, perm[b] as usize);
        }
        SmallGraph { n: self.n, mask }
    }

    /// Merges `b` into `a` and renumbers the remaining vertices in order.
    pub fn contract(&self, a: usize, b: usize) -> Self {
        let (keep, gone) = (a.min(b), a.max(b));
        let map = |v: usize| -> usize {
            let v = if v == gone { keep } else { v };
            if v > gone {
                v - 1
            } else {
                v
            }
        };
        let mut mask = 0u32;
        for (x, y) in self.edges() {
            let (p, q) = (map(x), map(y));
            if p != q {
                mask |= 1 << pair_index(p, q);
            }
        }
        SmallGraph { n: self.n - 1, mask }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockDecomposition {
    /// Edge masks of the blocks.
    pub blocks: Vec<u32>,
    /// Vertex bitmask of the cut vertices.
    pub cut_vertices: u8,
}

impl BlockDecomposition {
    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    pub fn cut_vertex_count(&self) -> u32 {
        self.cut_vertices.count_ones()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("block decomposition needs a connected graph")]
pub struct Disconnected;

/// Biconnected components by Tarjan's edge-stack depth-first search.
pub fn block_decompose(g: &SmallGraph) -> Result<BlockDecomposition, Disconnected> {
    if !g.is_connected() {
        return Err(Disconnected);
    }
    Ok(blocks_any(g))
}

/// Blocks and cut vertices of every component.
pub fn blocks_any(g: &SmallGraph) -> BlockDecomposition {
    struct St<'a> {
        adj: &'a [u8; MAX_N],
        disc: [i8; MAX_N],
        low: [i8; MAX_N],
        time: i8,
        stack: Vec<(usize, usize)>,
        out: BlockDecomposition,
    }
    fn dfs(s: &mut St, u: usize, parent: Option<usize>) {
        s.disc[u] = s.time;
        s.low[u] = s.time;
        s.time += 1;
        let mut children = 0;
        let mut nb = s.adj[u];
        while nb != 0 {
            let w = nb.trailing_zeros() as usize;
            nb &= nb - 1;
            if s.disc[w] < 0 {
                children += 1;
                s.stack.push((u, w));
                dfs(s, w, Some(u));
                s.low[u] = s.low[u].min(s.low[w]);
                if s.low[w] >= s.disc[u] {
                    if parent.is_some() || children > 1 {
                        s.out.cut_vertices |= 1 << u;
                    }
                    let mut block = 0u32;
                    while let Some((a, b)) = s.stack.pop() {
                        block |= 1 << pair_index(a, b);
                        if (a, b) == (u, w) {
                            break;
                        }
                    }
                    s.out.blocks.push(block);
                }
            } else if Some(w) != parent && s.disc[w] < s.disc[u] {
                s.stack.push((u, w));
                s.low[u] = s.low[u].min(s.disc[w]);
            }
        }
        if parent.is_none() && children <= 1 {
            s.out.cut_vertices &= !(1 << u);
        }
    }
    let adj = g.adjacency();
    let mut s = St {
        adj: &adj,
        disc: [-1; MAX_N],
        low: [0; MAX_N],
        time: 0,
        stack: Vec::new(),
        out: BlockDecomposition { blocks: Vec::new(), cut_vertices: 0 },
    };
    for v in 0..g.order() {
        if s.disc[v] < 0 {
            dfs(&mut s, v, None);
        }
    }
    s.out
}

/// Every block is a single edge or a cycle.
pub fn is_cactus(g: &SmallGraph) -> bool {
    blocks_any(g).blocks.iter().all(|&b| {
        let e = b.count_ones();
        if e == 1 {
            return true;
        }
        let mut verts = 0u8;
        let mut m = b;
        while m != 0 {
            let (x, y) = PAIRS[m.trailing_zeros() as usize];
            m &= m - 1;
            verts |= 1 << x | 1 << y;
        }
        verts.count_ones() == e
    })
}

pub fn is_forest(g: &SmallGraph) -> bool {
    g.edge_count() as usize + g.component_count() == g.order()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pair_indexing_is_colex() {
        assert_eq!(pair_index(0, 1), 0);
        assert_eq!(pair_index(1, 2), 2);
        assert_eq!(pair_index(6, 7), 27);
        assert_eq!(PAIRS[5], (2, 3));
    }

    #[test]
    fn blocks_of_small_graphs() {
        let p3 = SmallGraph::from_edges(3, &[(0, 1), (1, 2)]);
        let b = block_decompose(&p3).unwrap();
        assert_eq!((b.block_count(), b.cut_vertex_count()), (2, 1));
        let tri = SmallGraph::from_edges(3, &[(0, 1), (1, 2), (0, 2)]);
        let b = block_decompose(&tri).unwrap();
        assert_eq!((b.block_count(), b.cut_vertex_count()), (1, 0));
        let paw = SmallGraph::from_edges(4, &[(0, 1), (1, 2), (0, 2), (2, 3)]);
        let b = block_decompose(&paw).unwrap();
        assert_eq!((b.block_count(), b.cut_vertex_count()), (2, 1));
        assert_eq!(b.cut_vertices, 1 << 2);
        assert!(block_decompose(&SmallGraph::empty(2)).is_err());
    }

    #[test]
    fn cactus_and_forest_predicates() {
        let c4 = SmallGraph::from_edges(4, &[(0, 1), (1, 2), (2, 3), (0, 3)]);
        assert!(is_cactus(&c4));
        let diamond = c4.with_edge(0, 2);
        assert!(!is_cactus(&diamond));
        assert!(is_forest(&SmallGraph::from_edges(4, &[(0, 1), (2, 3)])));
        assert!(!is_forest(&c4));
    }

    #[test]
    fn contraction_renumbers() {
        let c4 = SmallGraph::from_edges(4, &[(0, 1), (1, 2), (2, 3), (0, 3)]);
        let t = c4.contract(0, 1);
        assert_eq!(t, SmallGraph::from_edges(3, &[(0, 1), (1, 2), (0, 2)]));
        assert!(SmallGraph::complete(3).is_biconnected());
        assert!(!SmallGraph::from_edges(3, &[(0, 1), (1, 2)]).is_biconnected());
    }
}
