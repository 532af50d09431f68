//! Geometry and canonical indexing of the torus `Z^d / nZ^d`.
//!
//! Vertices are numbered little-endian mixed radix, `index = sum_i x_i * n^i`.
//! The edge from `v` to `v + unit_k` gets id `index(v) * d + k`, so every
//! edge is encoded once, from its "lower" endpoint in direction `k`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest edge count accepted, to keep all indices comfortably in `usize`
/// and the per-edge bit vectors small.
const MAX_EDGES: usize = 1 << 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct VertexId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct EdgeId(pub usize);

impl std::fmt::Display for VertexId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.0.fmt(f)
    }
}

impl std::fmt::Display for EdgeId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.0.fmt(f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TorusSpec {
    d: usize,
    n: usize,
    vertex_count: usize,
}

impl TorusSpec {
    pub fn new(d: usize, n: usize) -> Result<Self> {
        if d == 0 || n < 3 {
            return Err(Error::InvalidTorus { d, n });
        }
        let mut vertex_count: usize = 1;
        for _ in 0..d {
            vertex_count = vertex_count
                .checked_mul(n)
                .ok_or(Error::TorusTooLarge { d, n })?;
        }
        match vertex_count.checked_mul(d) {
            Some(e) if e <= MAX_EDGES => Ok(Self { d, n, vertex_count }),
            _ => Err(Error::TorusTooLarge { d, n }),
        }
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.vertex_count * self.d
    }

    /// `n^k`, the index stride of axis `k`.
    #[inline]
    pub fn stride(&self, k: usize) -> usize {
        self.n.pow(k as u32)
    }

    pub fn vertex_index(&self, coords: &[usize]) -> Result<VertexId> {
        if coords.len() != self.d {
            return Err(Error::DimensionMismatch {
                expected: self.d,
                got: coords.len(),
            });
        }
        let mut index = 0;
        for (axis, &x) in coords.iter().enumerate().rev() {
            if x >= self.n {
                return Err(Error::CoordinateOutOfRange {
                    axis,
                    value: x,
                    n: self.n,
                });
            }
            index = index * self.n + x;
        }
        Ok(VertexId(index))
    }

    pub fn coords(&self, v: VertexId) -> Result<Vec<usize>> {
        self.check_vertex(v)?;
        let mut rest = v.0;
        Ok((0..self.d)
            .map(|_| {
                let x = rest % self.n;
                rest /= self.n;
                x
            })
            .collect())
    }

    /// Coordinate of `v` along `axis`; `v` must be valid.
    #[inline]
    pub fn coord(&self, v: VertexId, axis: usize) -> usize {
        (v.0 / self.stride(axis)) % self.n
    }

    /// `v + unit_k (mod n)`.
    #[inline]
    pub fn step_up(&self, v: VertexId, k: usize) -> VertexId {
        let s = self.stride(k);
        if self.coord(v, k) == self.n - 1 {
            VertexId(v.0 - (self.n - 1) * s)
        } else {
            VertexId(v.0 + s)
        }
    }

    /// `v - unit_k (mod n)`.
    #[inline]
    pub fn step_down(&self, v: VertexId, k: usize) -> VertexId {
        let s = self.stride(k);
        if self.coord(v, k) == 0 {
            VertexId(v.0 + (self.n - 1) * s)
        } else {
            VertexId(v.0 - s)
        }
    }

    pub fn check_vertex(&self, v: VertexId) -> Result<()> {
        if v.0 < self.vertex_count {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange {
                what: "vertex",
                index: v.0,
                limit: self.vertex_count,
            })
        }
    }

    pub fn check_edge(&self, e: EdgeId) -> Result<()> {
        if e.0 < self.edge_count() {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange {
                what: "edge",
                index: e.0,
                limit: self.edge_count(),
            })
        }
    }

    /// The edge `v -> v + unit_k`.
    #[inline]
    pub fn edge_id(&self, v: VertexId, k: usize) -> EdgeId {
        EdgeId(v.0 * self.d + k)
    }

    /// Returns `(v, v + unit_k, k)` for the edge `e`.
    pub fn edge_endpoints(&self, e: EdgeId) -> Result<(VertexId, VertexId, usize)> {
        self.check_edge(e)?;
        Ok(self.endpoints_unchecked(e))
    }

    #[inline]
    pub(crate) fn endpoints_unchecked(&self, e: EdgeId) -> (VertexId, VertexId, usize) {
        let v = VertexId(e.0 / self.d);
        let k = e.0 % self.d;
        (v, self.step_up(v, k), k)
    }

    /// The `d` outgoing edges followed by the `d` incoming ones.
    pub fn incident_edges(&self, v: VertexId) -> Result<Vec<EdgeId>> {
        self.check_vertex(v)?;
        let mut out = Vec::with_capacity(2 * self.d);
        out.extend((0..self.d).map(|k| self.edge_id(v, k)));
        out.extend((0..self.d).map(|k| self.edge_id(self.step_down(v, k), k)));
        Ok(out)
    }

    /// Neighbours paired with the connecting edge, in `incident_edges` order.
    pub(crate) fn neighbors_with_edges(
        &self,
        v: VertexId,
    ) -> impl Iterator<Item = (VertexId, EdgeId)> + '_ {
        (0..self.d)
            .map(move |k| (self.step_up(v, k), self.edge_id(v, k)))
            .chain((0..self.d).map(move |k| {
                let w = self.step_down(v, k);
                (w, self.edge_id(w, k))
            }))
    }

    /// Translate a vertex by `shift` (componentwise, mod n).
    pub fn translate(&self, v: VertexId, shift: &[usize]) -> VertexId {
        let mut index = 0;
        for axis in (0..self.d).rev() {
            index = index * self.n + (self.coord(v, axis) + shift[axis]) % self.n;
        }
        VertexId(index)
    }

    /// Image of an edge under translation.
    pub fn translate_edge(&self, e: EdgeId, shift: &[usize]) -> EdgeId {
        let (v, _, k) = self.endpoints_unchecked(e);
        self.edge_id(self.translate(v, shift), k)
    }
}
