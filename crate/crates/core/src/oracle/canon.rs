//! Canonical forms by exhaustive relabelling.
//!
//! The canonical form of `g` is the smallest mask among relabellings that
//! keep the first `fixed` vertices in place and list the others by
//! non-increasing degree.  Restricting to degree-sorted relabellings is an
//! isomorphism-invariant choice, so the minimum is still canonical, and it
//! lets [`is_canonical`] reject most masks with a single pass.

use super::graph::{SmallGraph, MAX_N};

fn sorted_by_degree(deg: &[u8; MAX_N], n: usize, fixed: usize) -> bool {
    (fixed + 1..n).all(|i| deg[i - 1] >= deg[i] || i == fixed)
}

/// Calls `f(perm)` for every relabelling `perm` (old vertex -> new vertex)
/// that fixes `0..fixed` and makes new degrees non-increasing from
/// `fixed`; stops early when `f` returns `false`.
fn for_each_sorted_perm(g: &SmallGraph, fixed: usize, mut f: impl FnMut(&[u8; MAX_N]) -> bool) {
    let n = g.order();
    let deg = g.degrees();
    let mut order: Vec<usize> = (fixed..n).collect();
    order.sort_by(|&a, &b| deg[b].cmp(&deg[a]));
    let target: Vec<u8> = order.iter().map(|&v| deg[v]).collect();
    let mut perm = [0u8; MAX_N];
    for (v, p) in perm.iter_mut().enumerate().take(fixed) {
        *p = v as u8;
    }
    let mut used = 0u8;
    fn rec(
        pos: usize,
        n: usize,
        fixed: usize,
        deg: &[u8; MAX_N],
        target: &[u8],
        perm: &mut [u8; MAX_N],
        used: &mut u8,
        f: &mut dyn FnMut(&[u8; MAX_N]) -> bool,
    ) -> bool {
        if pos == n {
            return f(perm);
        }
        for v in fixed..n {
            if *used >> v & 1 == 0 && deg[v] == target[pos - fixed] {
                *used |= 1 << v;
                perm[v] = pos as u8;
                if !rec(pos + 1, n, fixed, deg, target, perm, used, f) {
                    return false;
                }
                *used &= !(1 << v);
            }
        }
        true
    }
    rec(fixed, n, fixed, &deg, &target, &mut perm, &mut used, &mut f);
}

pub fn canonical_fixing(g: &SmallGraph, fixed: usize) -> SmallGraph {
    let mut best = u32::MAX;
    for_each_sorted_perm(g, fixed, |p| {
        best = best.min(g.permute(p).mask);
        true
    });
    SmallGraph { n: g.n, mask: best }
}

pub fn canonical(g: &SmallGraph) -> SmallGraph {
    canonical_fixing(g, 0)
}

/// `g` equals its own canonical form (with `fixed` leading vertices pinned).
pub fn is_canonical_fixing(g: &SmallGraph, fixed: usize) -> bool {
    let deg = g.degrees();
    if !sorted_by_degree(&deg, g.order(), fixed) {
        return false;
    }
    let mut ok = true;
    for_each_sorted_perm(g, fixed, |p| {
        if g.permute(p).mask < g.mask {
            ok = false;
        }
        ok
    });
    ok
}

pub fn is_canonical(g: &SmallGraph) -> bool {
    is_canonical_fixing(g, 0)
}

/// Size of the automorphism group (relabellings fixing `0..fixed`).
pub fn automorphisms_fixing(g: &SmallGraph, fixed: usize) -> u64 {
    let n = g.order();
    let deg = g.degrees();
    let mut count = 0u64;
    let mut perm = [0u8; MAX_N];
    fn rec(pos: usize, n: usize, g: &SmallGraph, deg: &[u8; MAX_N], perm: &mut [u8; MAX_N], used: u8, count: &mut u64) {
        if pos == n {
            if g.permute(perm).mask == g.mask {
                *count += 1;
            }
            return;
        }
        for v in 0..n {
            if used >> v & 1 == 0 && deg[v] == deg[pos] {
                perm[pos] = v as u8;
                rec(pos + 1, n, g, deg, perm, used | 1 << v, count);
            }
        }
    }
    for (v, p) in perm.iter_mut().enumerate().take(fixed) {
        *p = v as u8;
    }
    let used = if fixed == 0 { 0 } else { ((1u16 << fixed) - 1) as u8 };
    rec(fixed, n, g, &deg, &mut perm, used, &mut count);
    count
}
