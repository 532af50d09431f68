use crate::error::{Error, Result};
use crate::percolation::{Configuration, GiantComponent};
use crate::torus::{TorusSpec, VertexId};

/// The open subgraph induced on a vertex set, relabelled `0..len` in
/// increasing [`VertexId`] order so that local order and global order agree.
#[derive(Debug, Clone)]
pub(crate) struct ClusterGraph {
    pub spec: TorusSpec,
    pub vertices: Vec<VertexId>,
    pub adj: Vec<Vec<u32>>,
    pub edge_count: usize,
}

impl ClusterGraph {
    pub fn build(omega: &Configuration, component: &GiantComponent) -> Result<Self> {
        let spec = omega.spec();
        let vertices = component.vertices().to_vec();
        let mut local = vec![u32::MAX; spec.vertex_count()];
        for (i, v) in vertices.iter().enumerate() {
            if v.0 >= spec.vertex_count() {
                return Err(Error::SpecMismatch);
            }
            local[v.0] = i as u32;
        }
        let mut adj = vec![Vec::with_capacity(2 * spec.d()); vertices.len()];
        let mut edge_count = 0;
        for (i, &v) in vertices.iter().enumerate() {
            for (w, e) in spec.neighbors_with_edges(v) {
                if !omega.is_open(e) {
                    continue;
                }
                let j = local[w.0];
                if j == u32::MAX {
                    return Err(Error::Invariant(format!(
                        "open edge {e} leaves the component at vertex {v}"
                    )));
                }
                adj[i].push(j);
                if (j as usize) > i {
                    edge_count += 1;
                }
            }
        }
        Ok(Self {
            spec,
            vertices,
            adj,
            edge_count,
        })
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    /// Largest admissible set size, `floor(|C| / 2)`.
    pub fn half(&self) -> usize {
        self.vertices.len() / 2
    }

    pub fn degree(&self, i: usize) -> usize {
        self.adj[i].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn to_global(&self, locals: impl IntoIterator<Item = usize>) -> Vec<VertexId> {
        let mut out: Vec<VertexId> = locals.into_iter().map(|i| self.vertices[i]).collect();
        out.sort_unstable();
        out
    }

    /// Adjacency as bitmasks; callers guarantee `len() <= 128`.
    pub fn adjacency_masks(&self) -> Vec<u128> {
        self.adj
            .iter()
            .map(|nb| nb.iter().fold(0u128, |m, &j| m | (1u128 << j)))
            .collect()
    }

    /// Boundary of a local membership vector.
    pub fn boundary_of(&self, member: &[bool]) -> u64 {
        let mut b = 0;
        for (i, nb) in self.adj.iter().enumerate() {
            if member[i] {
                b += nb.iter().filter(|&&j| !member[j as usize]).count() as u64;
            }
        }
        b
    }
}

pub(crate) fn mask_to_locals(mut mask: u128) -> Vec<usize> {
    let mut out = Vec::with_capacity(mask.count_ones() as usize);
    while mask != 0 {
        out.push(mask.trailing_zeros() as usize);
        mask &= mask - 1;
    }
    out
}

/// For two distinct sets of equal size, `a` precedes `b` in the
/// lexicographic order of their sorted element lists iff the smallest
/// element of the symmetric difference lies in `a`.
pub(crate) fn lex_less(a: u128, b: u128) -> bool {
    let diff = a ^ b;
    diff != 0 && (a & (diff & diff.wrapping_neg())) != 0
}
