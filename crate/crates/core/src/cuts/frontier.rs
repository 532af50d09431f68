//! Exact size profile by dynamic programming over a vertex elimination order.
//!
//! Vertices are decided in a fixed order. The DP state is the in/out
//! assignment of the "live" vertices, those already decided that still have
//! an undecided neighbour, together with the number of vertices chosen so
//! far; the value is the least number of cut edges among decided pairs. A
//! vertex leaves the state as soon as its last neighbour is decided, by
//! minimising over its bit. On a torus slab order the live set is about two
//! hyperplanes, `2 n^(d-1)` vertices, which makes `d = 2` and small `n` cheap.
//!
//! The table covers every subset, not only connected ones, so the largest
//! minimiser (including unions of non-adjacent pieces) comes out directly.

use super::graph::ClusterGraph;
use super::profile::SizeProfile;

const INF: u8 = u8::MAX;
const MAX_WIDTH: usize = 24;
const MAX_TABLE_BYTES: usize = 1 << 26;

#[derive(Debug, Clone)]
pub(crate) struct Frontier<'a> {
    g: &'a ClusterGraph,
    order: Vec<u32>,
    pos: Vec<u32>,
    /// Vertices whose last undecided neighbour is decided at step `t`.
    retire: Vec<Vec<u32>>,
    /// Whether the vertex decided at step `t` has later neighbours.
    keeps_slot: Vec<bool>,
    width: usize,
    half: usize,
    stride: usize,
}

impl<'a> Frontier<'a> {
    /// `None` when the table would be too large or boundaries overflow `u8`.
    pub fn new(g: &'a ClusterGraph) -> Option<Self> {
        if g.edge_count >= INF as usize || g.len() < 2 {
            return None;
        }
        let order = best_order(g);
        let n = g.len();
        let mut pos = vec![0u32; n];
        for (t, &v) in order.iter().enumerate() {
            pos[v as usize] = t as u32;
        }
        let mut retire = vec![Vec::new(); n];
        let mut keeps_slot = vec![false; n];
        for (t, &v) in order.iter().enumerate() {
            let last = g.adj[v as usize]
                .iter()
                .map(|&u| pos[u as usize])
                .max()
                .unwrap_or(0);
            if last as usize > t {
                keeps_slot[t] = true;
                retire[last as usize].push(v);
            }
        }
        let width = live_width(&keeps_slot, &retire);
        let half = g.half();
        let stride = (half + 1).next_multiple_of(16);
        if width > MAX_WIDTH || (stride << width) > MAX_TABLE_BYTES {
            return None;
        }
        Some(Self {
            g,
            order,
            pos,
            retire,
            keeps_slot,
            width,
            half,
            stride,
        })
    }

    pub fn profile(&self) -> SizeProfile {
        self.run(None)
    }

    /// Profile restricted to sets agreeing with `force` (indexed by local vertex).
    pub fn run(&self, force: Option<&[Option<bool>]>) -> SizeProfile {
        let k = self.half + 1;
        let kp = self.stride;
        let mut dp = vec![INF; kp << self.width];
        dp[0] = 0;
        let n = self.g.len();
        let mut slot = vec![u8::MAX; n];
        let mut free: Vec<u8> = (0..self.width as u8).rev().collect();
        let mut live: u32 = 0;
        let mut scratch = vec![INF; kp];

        for (t, &v) in self.order.iter().enumerate() {
            let v = v as usize;
            let mut nb_mask = 0u32;
            let mut deg_before = 0u8;
            for &u in &self.g.adj[v] {
                if (self.pos[u as usize] as usize) < t {
                    nb_mask |= 1 << slot[u as usize];
                    deg_before += 1;
                }
            }
            let (allow_in, allow_out) = match force.and_then(|f| f[v]) {
                Some(true) => (true, false),
                Some(false) => (false, true),
                None => (true, true),
            };

            if self.keeps_slot[t] {
                let s = free.pop().expect("frontier width accounting");
                slot[v] = s;
                let sbit = 1u32 << s;
                for_each_submask(live, |m| {
                    let cut_in = (m & nb_mask).count_ones() as u8;
                    let cost_out = cut_in;
                    let cost_in = deg_before - cut_in;
                    let base = m as usize * kp;
                    let (lo, hi) = dp.split_at_mut((m | sbit) as usize * kp);
                    let row = &mut lo[base..base + kp];
                    let target = &mut hi[..kp];
                    if allow_in {
                        target[0] = INF;
                        for c in 1..k {
                            target[c] = row[c - 1].saturating_add(cost_in);
                        }
                    }
                    if allow_out {
                        for x in &mut row[..k] {
                            *x = x.saturating_add(cost_out);
                        }
                    } else {
                        row.fill(INF);
                    }
                });
                live |= sbit;
            } else {
                for_each_submask(live, |m| {
                    let cut_in = (m & nb_mask).count_ones() as u8;
                    let cost_out = cut_in;
                    let cost_in = deg_before - cut_in;
                    let base = m as usize * kp;
                    let row = &mut dp[base..base + kp];
                    scratch.copy_from_slice(row);
                    for c in 0..k {
                        let out = if allow_out {
                            scratch[c].saturating_add(cost_out)
                        } else {
                            INF
                        };
                        let inn = if allow_in && c > 0 {
                            scratch[c - 1].saturating_add(cost_in)
                        } else {
                            INF
                        };
                        row[c] = out.min(inn);
                    }
                });
            }

            for &u in &self.retire[t] {
                let s = slot[u as usize];
                let sbit = 1u32 << s;
                live &= !sbit;
                for_each_submask(live, |m| {
                    let base = m as usize * kp;
                    let (lo, hi) = dp.split_at_mut((m | sbit) as usize * kp);
                    let row = &mut lo[base..base + kp];
                    let other = &mut hi[..kp];
                    for (x, y) in row.iter_mut().zip(other.iter()) {
                        *x = (*x).min(*y);
                    }
                    other.fill(INF);
                });
                free.push(s);
            }
        }
        debug_assert_eq!(live, 0);

        let min_boundary = dp[..k]
            .iter()
            .enumerate()
            .map(|(c, &b)| (c > 0 && b != INF).then_some(b as u64))
            .collect();
        SizeProfile { min_boundary }
    }

    /// Lexicographically smallest set (as local ids) with the given size and
    /// boundary, by fixing vertices greedily in increasing order.
    pub fn find(&self, size: usize, boundary: u64) -> Option<Vec<usize>> {
        let feasible =
            |p: &SizeProfile| p.min_boundary.get(size).copied().flatten() == Some(boundary);
        let mut force = vec![None; self.g.len()];
        if !feasible(&self.run(Some(&force))) {
            return None;
        }
        let mut chosen = Vec::with_capacity(size);
        for v in 0..self.g.len() {
            if chosen.len() == size {
                force[v] = Some(false);
                continue;
            }
            force[v] = Some(true);
            if feasible(&self.run(Some(&force))) {
                chosen.push(v);
            } else {
                force[v] = Some(false);
            }
        }
        Some(chosen)
    }
}

#[inline]
fn for_each_submask(mask: u32, mut f: impl FnMut(u32)) {
    let mut m = mask;
    loop {
        f(m);
        if m == 0 {
            break;
        }
        m = (m - 1) & mask;
    }
}

fn live_width(keeps_slot: &[bool], retire: &[Vec<u32>]) -> usize {
    let mut live = 0usize;
    let mut width = 0usize;
    for (t, &keep) in keeps_slot.iter().enumerate() {
        if keep {
            live += 1;
            width = width.max(live);
        }
        live -= retire[t].len();
    }
    width
}

/// Slab orders over every axis permutation (all of them for `d <= 4`) and
/// every cyclic shift of the slowest axis; returns the narrowest.
fn best_order(g: &ClusterGraph) -> Vec<u32> {
    let spec = g.spec;
    let (d, n) = (spec.d(), spec.n());
    let coords: Vec<Vec<usize>> = g
        .vertices
        .iter()
        .map(|&v| spec.coords(v).expect("cluster vertex"))
        .collect();
    let perms = axis_orders(d);
    let mut best: Option<(usize, Vec<u32>)> = None;
    for perm in &perms {
        for shift in 0..n {
            let key = |i: usize| -> usize {
                let c = &coords[i];
                let mut k = 0;
                for j in (0..d).rev() {
                    let mut x = c[perm[j]];
                    if j == d - 1 {
                        x = (x + shift) % n;
                    }
                    k = k * n + x;
                }
                k
            };
            let mut order: Vec<u32> = (0..g.len() as u32).collect();
            order.sort_by_key(|&i| key(i as usize));
            let w = width_of(g, &order);
            if best.as_ref().is_none_or(|(bw, _)| w < *bw) {
                best = Some((w, order));
            }
        }
    }
    best.map(|(_, o)| o).unwrap_or_default()
}

fn width_of(g: &ClusterGraph, order: &[u32]) -> usize {
    let mut pos = vec![0usize; g.len()];
    for (t, &v) in order.iter().enumerate() {
        pos[v as usize] = t;
    }
    let mut keeps = vec![false; g.len()];
    let mut retire = vec![Vec::new(); g.len()];
    for (t, &v) in order.iter().enumerate() {
        let last = g.adj[v as usize]
            .iter()
            .map(|&u| pos[u as usize])
            .max()
            .unwrap_or(0);
        if last > t {
            keeps[t] = true;
            retire[last].push(v);
        }
    }
    live_width(&keeps, &retire)
}

fn axis_orders(d: usize) -> Vec<Vec<usize>> {
    if d <= 4 {
        let mut out = Vec::new();
        permute(&mut (0..d).collect::<Vec<_>>(), 0, &mut out);
        out
    } else {
        (0..d)
            .map(|r| (0..d).map(|j| (j + r) % d).collect())
            .collect()
    }
}

fn permute(items: &mut Vec<usize>, at: usize, out: &mut Vec<Vec<usize>>) {
    if at == items.len() {
        out.push(items.clone());
        return;
    }
    for i in at..items.len() {
        items.swap(at, i);
        permute(items, at + 1, out);
        items.swap(at, i);
    }
}
