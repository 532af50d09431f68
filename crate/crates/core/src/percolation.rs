//! Bernoulli bond percolation on the torus and its open clusters.

use crate::error::{Error, Result};
use crate::rng::{stream_at, unit_f64};
use crate::torus::{EdgeId, TorusSpec, VertexId};

/// One bit per torus edge, in canonical [`EdgeId`] order; 1 means open.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Configuration {
    spec: TorusSpec,
    words: Vec<u64>,
}

impl Configuration {
    pub fn all_closed(spec: TorusSpec) -> Self {
        Self {
            spec,
            words: vec![0; spec.edge_count().div_ceil(64)],
        }
    }

    pub fn all_open(spec: TorusSpec) -> Self {
        let mut c = Self::all_closed(spec);
        for e in 0..spec.edge_count() {
            c.set(EdgeId(e), true);
        }
        c
    }

    pub fn from_bits(spec: TorusSpec, bits: &[bool]) -> Result<Self> {
        if bits.len() != spec.edge_count() {
            return Err(Error::Parse(format!(
                "expected {} edge bits, got {}",
                spec.edge_count(),
                bits.len()
            )));
        }
        let mut c = Self::all_closed(spec);
        for (e, &b) in bits.iter().enumerate() {
            c.set(EdgeId(e), b);
        }
        Ok(c)
    }

    /// Configuration whose open edges are exactly `open`.
    pub fn with_open_edges(spec: TorusSpec, open: &[EdgeId]) -> Result<Self> {
        let mut c = Self::all_closed(spec);
        for &e in open {
            spec.check_edge(e)?;
            c.set(e, true);
        }
        Ok(c)
    }

    pub fn spec(&self) -> TorusSpec {
        self.spec
    }

    #[inline]
    pub fn is_open(&self, e: EdgeId) -> bool {
        (self.words[e.0 / 64] >> (e.0 % 64)) & 1 == 1
    }

    pub(crate) fn set(&mut self, e: EdgeId, open: bool) {
        let mask = 1u64 << (e.0 % 64);
        if open {
            self.words[e.0 / 64] |= mask;
        } else {
            self.words[e.0 / 64] &= !mask;
        }
    }

    pub(crate) fn toggle(&mut self, e: EdgeId) {
        self.words[e.0 / 64] ^= 1u64 << (e.0 % 64);
    }

    pub fn open_count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn bits(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.spec.edge_count()).map(move |e| self.is_open(EdgeId(e)))
    }

    pub fn open_edges(&self) -> impl Iterator<Item = EdgeId> + '_ {
        (0..self.spec.edge_count())
            .map(EdgeId)
            .filter(move |&e| self.is_open(e))
    }

    /// The same configuration viewed after translating the torus by `shift`.
    pub fn translated(&self, shift: &[usize]) -> Self {
        let mut out = Self::all_closed(self.spec);
        for e in self.open_edges() {
            out.set(self.spec.translate_edge(e, shift), true);
        }
        out
    }
}

/// Samples each edge independently open with probability `p`.
///
/// Bit `i` is open iff `u_i < p`, where `u_i` is the top 53 bits of the
/// `i`-th SplitMix64 output for `seed`, scaled to `[0, 1)`. Bit-exact.
pub fn sample_configuration(spec: TorusSpec, p: f64, seed: u64) -> Result<Configuration> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidProbability(p));
    }
    let mut c = Configuration::all_closed(spec);
    for i in 0..spec.edge_count() {
        if unit_f64(stream_at(seed, i as u64)) < p {
            c.set(EdgeId(i), true);
        }
    }
    Ok(c)
}

#[derive(Debug, Clone)]
struct DisjointSet {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl DisjointSet {
    fn new(len: usize) -> Self {
        Self {
            parent: (0..len).collect(),
            size: vec![1; len],
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (mut a, mut b) = (self.find(a), self.find(b));
        if a == b {
            return;
        }
        if self.size[a] < self.size[b] {
            std::mem::swap(&mut a, &mut b);
        }
        self.parent[b] = a;
        self.size[a] += self.size[b];
    }
}

/// Open clusters. Cluster ids are assigned in order of each cluster's
/// smallest vertex, so id 0 always contains vertex 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClusterDecomposition {
    pub labels: Vec<usize>,
    pub sizes: Vec<usize>,
}

impl ClusterDecomposition {
    pub fn cluster_count(&self) -> usize {
        self.sizes.len()
    }

    pub fn label(&self, v: VertexId) -> usize {
        self.labels[v.0]
    }
}

pub fn cluster_decomposition(omega: &Configuration) -> ClusterDecomposition {
    let spec = omega.spec;
    let mut ds = DisjointSet::new(spec.vertex_count());
    for e in omega.open_edges() {
        let (a, b, _) = spec.endpoints_unchecked(e);
        ds.union(a.0, b.0);
    }
    let mut root_label = vec![usize::MAX; spec.vertex_count()];
    let mut labels = Vec::with_capacity(spec.vertex_count());
    let mut sizes = Vec::new();
    for v in 0..spec.vertex_count() {
        let r = ds.find(v);
        if root_label[r] == usize::MAX {
            root_label[r] = sizes.len();
            sizes.push(0);
        }
        labels.push(root_label[r]);
        sizes[root_label[r]] += 1;
    }
    ClusterDecomposition { labels, sizes }
}

/// The largest open cluster; among equal sizes, the one holding the smallest vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GiantComponent {
    vertices: Vec<VertexId>,
    member: Vec<bool>,
}

impl GiantComponent {
    /// Builds a component from an explicit vertex set (sorted and deduplicated).
    pub fn from_vertices(spec: TorusSpec, mut vertices: Vec<VertexId>) -> Result<Self> {
        vertices.sort_unstable();
        vertices.dedup();
        let mut member = vec![false; spec.vertex_count()];
        for v in &vertices {
            spec.check_vertex(*v)?;
            member[v.0] = true;
        }
        Ok(Self { vertices, member })
    }

    pub fn vertices(&self) -> &[VertexId] {
        &self.vertices
    }

    pub fn size(&self) -> usize {
        self.vertices.len()
    }

    #[inline]
    pub fn contains(&self, v: VertexId) -> bool {
        self.member.get(v.0).copied().unwrap_or(false)
    }

    /// `|self \ other|`
    pub fn difference_size(&self, other: &GiantComponent) -> usize {
        self.vertices
            .iter()
            .filter(|v| !other.contains(**v))
            .count()
    }

    pub fn symmetric_difference_size(&self, other: &GiantComponent) -> usize {
        self.difference_size(other) + other.difference_size(self)
    }
}

pub fn giant_component(omega: &Configuration) -> GiantComponent {
    let clusters = cluster_decomposition(omega);
    // Labels follow smallest-vertex order, so the first maximum wins the tie.
    let mut best = 0;
    for (id, &s) in clusters.sizes.iter().enumerate() {
        if s > clusters.sizes[best] {
            best = id;
        }
    }
    let vertices: Vec<VertexId> = clusters
        .labels
        .iter()
        .enumerate()
        .filter(|(_, &l)| l == best)
        .map(|(v, _)| VertexId(v))
        .collect();
    let member = clusters.labels.iter().map(|&l| l == best).collect();
    GiantComponent { vertices, member }
}

/// `|C(omega) \triangle C(omega^e)|`
pub fn symmetric_difference_size(omega: &Configuration, e: EdgeId) -> Result<usize> {
    omega.spec.check_edge(e)?;
    let mut flipped = omega.clone();
    flipped.toggle(e);
    Ok(giant_component(omega).symmetric_difference_size(&giant_component(&flipped)))
}
