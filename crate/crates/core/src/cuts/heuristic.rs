//! Upper bounds for large components: Fiedler-vector sweep cuts followed by
//! a boundary-vertex exchange local search.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use super::graph::ClusterGraph;
use super::ratio::ExactRatio;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HeuristicParams {
    /// Number of best sweep cuts used as local-search starting points.
    pub starts: usize,
    /// Move limit per local search.
    pub max_moves: usize,
    /// Power-iteration steps when the component is too large for a dense
    /// eigendecomposition.
    pub power_iterations: usize,
}

impl Default for HeuristicParams {
    fn default() -> Self {
        Self {
            starts: 8,
            max_moves: 10_000,
            power_iterations: 3_000,
        }
    }
}

const DENSE_LIMIT: usize = 1_200;

#[derive(Debug, Clone)]
pub(crate) struct Candidate {
    pub member: Vec<bool>,
    pub size: usize,
    pub boundary: u64,
}

impl Candidate {
    fn ratio(&self) -> ExactRatio {
        ExactRatio::new(self.boundary, self.size as u64)
    }

    /// Lower ratio first, then larger size.
    fn better_than(&self, other: &Candidate) -> bool {
        match self.ratio().cmp(&other.ratio()) {
            std::cmp::Ordering::Less => true,
            std::cmp::Ordering::Equal => self.size > other.size,
            std::cmp::Ordering::Greater => false,
        }
    }
}

pub(crate) fn run(g: &ClusterGraph, params: &HeuristicParams) -> Candidate {
    let fiedler = fiedler_vector(g, params.power_iterations);
    let mut order: Vec<usize> = (0..g.len()).collect();
    order.sort_by(|&a, &b| fiedler[a].total_cmp(&fiedler[b]).then(a.cmp(&b)));

    let mut sweeps = sweep(g, &order);
    order.reverse();
    sweeps.extend(sweep(g, &order));
    // Lowest-degree vertex as an extra seed; pendant pieces are common.
    if let Some(v) = (0..g.len()).min_by_key(|&v| (g.degree(v), v)) {
        let mut member = vec![false; g.len()];
        member[v] = true;
        sweeps.push(Candidate {
            member,
            size: 1,
            boundary: g.degree(v) as u64,
        });
    }
    sweeps.sort_by(|a, b| a.ratio().cmp(&b.ratio()).then(b.size.cmp(&a.size)));

    let mut best: Option<Candidate> = None;
    for start in sweeps.into_iter().take(params.starts.max(1)) {
        let c = local_search(g, start, params.max_moves);
        if best.as_ref().is_none_or(|b| c.better_than(b)) {
            best = Some(c);
        }
    }
    best.expect("component has at least two vertices")
}

/// Prefixes of `order` of every admissible size.
fn sweep(g: &ClusterGraph, order: &[usize]) -> Vec<Candidate> {
    let half = g.half();
    let mut member = vec![false; g.len()];
    let mut boundary: i64 = 0;
    let mut out = Vec::with_capacity(half);
    for (i, &v) in order.iter().take(half).enumerate() {
        let inside = g.adj[v].iter().filter(|&&u| member[u as usize]).count() as i64;
        boundary += g.degree(v) as i64 - 2 * inside;
        member[v] = true;
        out.push(Candidate {
            member: member.clone(),
            size: i + 1,
            boundary: boundary as u64,
        });
    }
    out
}

/// Steepest-descent single-vertex moves; ties in ratio are accepted only
/// when they grow the set, so the search terminates.
fn local_search(g: &ClusterGraph, mut cur: Candidate, max_moves: usize) -> Candidate {
    let half = g.half();
    let n = g.len();
    let mut inside: Vec<i64> = (0..n)
        .map(|v| g.adj[v].iter().filter(|&&u| cur.member[u as usize]).count() as i64)
        .collect();
    for _ in 0..max_moves {
        let mut best_move: Option<(usize, u64, usize)> = None;
        let mut best_ratio = cur.ratio();
        let mut best_size = cur.size;
        for (v, &links) in inside.iter().enumerate() {
            let deg = g.degree(v) as i64;
            let (size, boundary) = if cur.member[v] {
                if cur.size == 1 {
                    continue;
                }
                (cur.size - 1, cur.boundary as i64 - (deg - 2 * links))
            } else {
                if cur.size == half || links == 0 {
                    continue;
                }
                (cur.size + 1, cur.boundary as i64 + deg - 2 * links)
            };
            let r = ExactRatio::new(boundary as u64, size as u64);
            if r < best_ratio || (r == best_ratio && size > best_size) {
                best_ratio = r;
                best_size = size;
                best_move = Some((v, boundary as u64, size));
            }
        }
        let Some((v, boundary, size)) = best_move else {
            break;
        };
        let added = !cur.member[v];
        cur.member[v] = added;
        cur.size = size;
        cur.boundary = boundary;
        for &u in &g.adj[v] {
            inside[u as usize] += if added { 1 } else { -1 };
        }
    }
    cur
}

fn fiedler_vector(g: &ClusterGraph, power_iterations: usize) -> Vec<f64> {
    let n = g.len();
    if n <= 2 {
        return (0..n).map(|i| i as f64).collect();
    }
    if n <= DENSE_LIMIT {
        let mut lap = DMatrix::<f64>::zeros(n, n);
        for v in 0..n {
            lap[(v, v)] = g.degree(v) as f64;
            for &u in &g.adj[v] {
                lap[(v, u as usize)] -= 1.0;
            }
        }
        let eig = SymmetricEigen::new(lap);
        let mut idx: Vec<usize> = (0..n).collect();
        idx.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let col = eig.eigenvectors.column(idx[1]);
        return col.iter().copied().collect();
    }
    // Power iteration on (c I - L) with the constant vector projected out.
    let shift = 2.0 * g.max_degree() as f64 + 1.0;
    let mut x: Vec<f64> = (0..n)
        .map(|i| ((i as f64 + 1.0) * 0.618_033_988_75).fract() - 0.5)
        .collect();
    let mut y = vec![0.0; n];
    for _ in 0..power_iterations {
        let mean = x.iter().sum::<f64>() / n as f64;
        x.iter_mut().for_each(|v| *v -= mean);
        for v in 0..n {
            let lx: f64 =
                g.degree(v) as f64 * x[v] - g.adj[v].iter().map(|&u| x[u as usize]).sum::<f64>();
            y[v] = shift * x[v] - lx;
        }
        let norm = y
            .iter()
            .map(|v| v * v)
            .sum::<f64>()
            .sqrt()
            .max(f64::MIN_POSITIVE);
        for v in 0..n {
            x[v] = y[v] / norm;
        }
    }
    x
}
