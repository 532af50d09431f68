//! Exhaustive enumeration of every vertex subset, in Gray-code order so each
//! step updates the boundary in O(1).

use super::graph::{lex_less, ClusterGraph};
use super::profile::SizeProfile;

pub const BRUTE_LIMIT: usize = 24;

fn gray_walk(g: &ClusterGraph, mut visit: impl FnMut(u32, usize, u64)) {
    let n = g.len();
    debug_assert!(n <= BRUTE_LIMIT);
    let adj: Vec<u32> = g.adjacency_masks().into_iter().map(|m| m as u32).collect();
    let deg: Vec<i64> = (0..n).map(|i| g.degree(i) as i64).collect();
    let mut mask = 0u32;
    let mut size = 0usize;
    let mut boundary = 0i64;
    for i in 1u64..(1u64 << n) {
        let v = i.trailing_zeros() as usize;
        let bit = 1u32 << v;
        if mask & bit == 0 {
            boundary += deg[v] - 2 * (adj[v] & mask).count_ones() as i64;
            mask |= bit;
            size += 1;
        } else {
            mask &= !bit;
            boundary -= deg[v] - 2 * (adj[v] & mask).count_ones() as i64;
            size -= 1;
        }
        visit(mask, size, boundary as u64);
    }
}

pub(crate) fn brute_profile(g: &ClusterGraph) -> SizeProfile {
    let half = g.half();
    let mut min_boundary = vec![None; half + 1];
    gray_walk(g, |_, size, b| {
        if size <= half && size > 0 {
            let slot = &mut min_boundary[size];
            if slot.is_none_or(|cur| b < cur) {
                *slot = Some(b);
            }
        }
    });
    SizeProfile { min_boundary }
}

/// Lexicographically smallest set with the given size and boundary.
pub(crate) fn brute_find(g: &ClusterGraph, size: usize, boundary: u64) -> Option<u128> {
    let mut best: Option<u32> = None;
    gray_walk(g, |mask, s, b| {
        if s == size && b == boundary && best.is_none_or(|cur| lex_less(mask as u128, cur as u128))
        {
            best = Some(mask);
        }
    });
    best.map(u128::from)
}
