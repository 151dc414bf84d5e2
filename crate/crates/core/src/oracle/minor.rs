//! Minor tests against K4, K2,3 and K3,3 by deletion/contraction.
//!
//! For `n <= 7` a per-pattern bit table over all masks is filled lazily in
//! increasing mask order: `G` has the minor iff `G` is the pattern plus
//! isolated vertices, or some `G - e` or `G / e` has it.  Deletions have
//! smaller masks and contractions live in the `n - 1` table.  For `n = 8`
//! the same recursion runs with a memo.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use super::graph::{pair_count, SmallGraph, MAX_N};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Pattern {
    K4,
    K23,
    K33,
}

impl Pattern {
    fn edges(self) -> u32 {
        match self {
            Pattern::K4 | Pattern::K23 => 6,
            Pattern::K33 => 9,
        }
    }

    fn vertices(self) -> usize {
        match self {
            Pattern::K4 => 4,
            Pattern::K23 => 5,
            Pattern::K33 => 6,
        }
    }

    fn slot(self) -> usize {
        self as usize
    }
}

/// `g` is the pattern plus isolated vertices.
fn is_base(g: &SmallGraph, p: Pattern) -> bool {
    if g.edge_count() != p.edges() {
        return false;
    }
    let adj = g.adjacency();
    let live: Vec<usize> = (0..g.order()).filter(|&v| adj[v] != 0).collect();
    if live.len() != p.vertices() {
        return false;
    }
    let deg = |v: usize| adj[v].count_ones();
    match p {
        Pattern::K4 => live.iter().all(|&v| deg(v) == 3),
        Pattern::K23 => {
            let big: Vec<usize> = live.iter().copied().filter(|&v| deg(v) == 3).collect();
            let small: Vec<usize> = live.iter().copied().filter(|&v| deg(v) == 2).collect();
            if big.len() != 2 || small.len() != 3 || g.has_edge(big[0], big[1]) {
                return false;
            }
            small.iter().all(|&s| g.has_edge(s, big[0]) && g.has_edge(s, big[1]))
        }
        Pattern::K33 => {
            if !live.iter().all(|&v| deg(v) == 3) {
                return false;
            }
            // 3-regular on 6 vertices and bipartite
            let mut side = [u8::MAX; MAX_N];
            side[live[0]] = 0;
            let mut stack = vec![live[0]];
            while let Some(u) = stack.pop() {
                let mut nb = adj[u];
                while nb != 0 {
                    let w = nb.trailing_zeros() as usize;
                    nb &= nb - 1;
                    if side[w] == u8::MAX {
                        side[w] = 1 - side[u];
                        stack.push(w);
                    } else if side[w] == side[u] {
                        return false;
                    }
                }
            }
            live.iter().all(|&v| side[v] != u8::MAX)
        }
    }
}

struct Table {
    bits: Vec<u64>,
}

impl Table {
    fn get(&self, mask: u32) -> bool {
        self.bits[(mask >> 6) as usize] >> (mask & 63) & 1 == 1
    }
}

const TABLE_MAX_N: usize = 7;

fn tables() -> &'static [[OnceLock<Table>; TABLE_MAX_N + 1]; 3] {
    static T: OnceLock<[[OnceLock<Table>; TABLE_MAX_N + 1]; 3]> = OnceLock::new();
    T.get_or_init(Default::default)
}

fn table(n: usize, p: Pattern) -> &'static Table {
    tables()[p.slot()][n].get_or_init(|| build_table(n, p))
}

fn build_table(n: usize, p: Pattern) -> Table {
    let total = 1usize << pair_count(n);
    let mut bits = vec![0u64; total.div_ceil(64)];
    if n < p.vertices() {
        return Table { bits };
    }
    let smaller = table(n - 1, p);
    for mask in 0..total as u32 {
        let g = SmallGraph::new(n, mask);
        let hit = mask.count_ones() >= p.edges() && {
            is_base(&g, p) || {
                let mut m = mask;
                let mut found = false;
                while m != 0 && !found {
                    let bit = m & m.wrapping_neg();
                    m &= m - 1;
                    let sub = (mask & !bit) as usize;
                    found = bits[sub >> 6] >> (sub & 63) & 1 == 1;
                }
                found || g.edges().any(|(a, b)| smaller.get(g.contract(a, b).mask))
            }
        };
        if hit {
            bits[(mask >> 6) as usize] |= 1 << (mask & 63);
        }
    }
    Table { bits }
}

fn memo8() -> &'static Mutex<HashMap<(u32, Pattern), bool>> {
    static M: OnceLock<Mutex<HashMap<(u32, Pattern), bool>>> = OnceLock::new();
    M.get_or_init(Default::default)
}

fn has_minor_8(g: &SmallGraph, p: Pattern) -> bool {
    if g.edge_count() < p.edges() {
        return false;
    }
    if let Some(&b) = memo8().lock().unwrap().get(&(g.mask, p)) {
        return b;
    }
    let hit = is_base(g, p)
        || g.edges().any(|(a, b)| table(7, p).get(g.contract(a, b).mask))
        || g.edges().any(|(a, b)| has_minor_8(&g.without_edge(a, b), p));
    memo8().lock().unwrap().insert((g.mask, p), hit);
    hit
}

pub fn has_minor(g: &SmallGraph, p: Pattern) -> bool {
    if g.order() <= TABLE_MAX_N {
        table(g.order(), p).get(g.mask)
    } else {
        has_minor_8(g, p)
    }
}

/// K4-minor-free by series-parallel reduction: delete vertices of degree at
/// most one and suppress degree-two vertices until nothing changes.  The
/// graph is K4-minor-free iff this empties it.
pub fn k4_free_by_reduction(g: &SmallGraph) -> bool {
    let mut adj = g.adjacency();
    let mut alive: u8 = ((1u16 << g.n) - 1) as u8;
    loop {
        let mut changed = false;
        let mut a = alive;
        while a != 0 {
            let v = a.trailing_zeros() as usize;
            a &= a - 1;
            let d = adj[v].count_ones();
            if d <= 2 {
                let nb = adj[v];
                for w in 0..MAX_N {
                    if nb >> w & 1 == 1 {
                        adj[w] &= !(1 << v);
                    }
                }
                if d == 2 {
                    let x = nb.trailing_zeros() as usize;
                    let y = (nb & (nb - 1)).trailing_zeros() as usize;
                    adj[x] |= 1 << y;
                    adj[y] |= 1 << x;
                }
                adj[v] = 0;
                alive &= !(1 << v);
                changed = true;
            }
        }
        if alive == 0 {
            return true;
        }
        if !changed {
            return false;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn wheel4() -> SmallGraph {
        SmallGraph::from_edges(5, &[(0, 1), (1, 2), (2, 3), (3, 0), (4, 0), (4, 1), (4, 2), (4, 3)])
    }

    #[test]
    fn k4_examples() {
        assert!(has_minor(&SmallGraph::complete(4), Pattern::K4));
        let c4 = SmallGraph::from_edges(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]);
        assert!(!has_minor(&c4, Pattern::K4));
        let diamond = c4.with_edge(0, 2);
        assert!(!has_minor(&diamond, Pattern::K4));
        assert!(has_minor(&wheel4(), Pattern::K4));
    }

    #[test]
    fn k23_and_k33() {
        let k23 = SmallGraph::from_edges(5, &[(0, 2), (0, 3), (0, 4), (1, 2), (1, 3), (1, 4)]);
        assert!(has_minor(&k23, Pattern::K23));
        assert!(!has_minor(&k23, Pattern::K4));
        assert!(has_minor(&SmallGraph::complete(4), Pattern::K23) == false);
        let k33 = SmallGraph::from_edges(6, &[(0, 3), (0, 4), (0, 5), (1, 3), (1, 4), (1, 5), (2, 3), (2, 4), (2, 5)]);
        assert!(has_minor(&k33, Pattern::K33));
        assert!(!has_minor(&SmallGraph::complete(5), Pattern::K33));
        // subdividing an edge keeps the minor
        let sub = SmallGraph::from_edges(
            7,
            &[(0, 3), (0, 4), (0, 6), (6, 5), (1, 3), (1, 4), (1, 5), (2, 3), (2, 4), (2, 5)],
        );
        assert!(has_minor(&sub, Pattern::K33));
    }

    #[test]
    fn reduction_agrees_with_minor_table_on_six_vertices() {
        for mask in 0..(1u32 << 15) {
            let g = SmallGraph::new(6, mask);
            assert_eq!(k4_free_by_reduction(&g), !has_minor(&g, Pattern::K4), "{mask}");
        }
    }

    #[test]
    fn eight_vertices_recurse() {
        let mut edges = vec![(0, 1), (1, 2), (2, 3), (3, 0), (4, 0), (4, 1), (4, 2), (4, 3)];
        edges.extend([(5, 6), (6, 7)]);
        let g = SmallGraph::from_edges(8, &edges);
        assert!(has_minor(&g, Pattern::K4));
        let c8 = SmallGraph::from_edges(8, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (6, 7), (7, 0)]);
        assert!(!has_minor(&c8, Pattern::K4));
    }
}
