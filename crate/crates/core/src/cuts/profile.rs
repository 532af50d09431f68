use serde::{Deserialize, Serialize};

use super::ratio::ExactRatio;
use crate::error::{Error, Result};
use crate::torus::{TorusSpec, VertexId};

/// Minimum boundary over all admissible sets of each size:
/// `min_boundary[s]` for `s` in `0..=floor(|C|/2)`, `None` when no set of
/// that size exists (only `s = 0` in practice).
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct SizeProfile {
    pub min_boundary: Vec<Option<u64>>,
}

/// Cheeger optimum read off a size profile.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct RatioOptimum {
    pub phi: ExactRatio,
    pub size: usize,
    pub boundary: u64,
}

impl SizeProfile {
    /// Minimum ratio over sizes `>= 1`; `size` is the largest size attaining it.
    pub fn ratio_optimum(&self) -> Option<RatioOptimum> {
        let mut best: Option<RatioOptimum> = None;
        for (size, b) in self.min_boundary.iter().enumerate().skip(1) {
            let Some(b) = *b else { continue };
            let r = ExactRatio::new(b, size as u64);
            match best {
                Some(cur) if r > cur.phi => {}
                _ => {
                    best = Some(RatioOptimum {
                        phi: r,
                        size,
                        boundary: b,
                    })
                }
            }
        }
        best
    }

    /// Minimum of `b / s^gamma`; returns `(value, size, boundary)`, smallest size on ties.
    pub fn profile_optimum(&self, gamma: f64) -> Option<(f64, usize, u64)> {
        let mut best: Option<(f64, usize, u64)> = None;
        for (size, b) in self.min_boundary.iter().enumerate().skip(1) {
            let Some(b) = *b else { continue };
            let v = b as f64 / (size as f64).powf(gamma);
            if best.is_none_or(|(cur, _, _)| v < cur) {
                best = Some((v, size, b));
            }
        }
        best
    }
}

/// `eps(n) = d + 2d * ln(ln n) / ln n`.
pub fn epsilon_n(spec: TorusSpec) -> Result<f64> {
    let (d, n) = (spec.d() as f64, spec.n() as f64);
    if spec.n() < 3 {
        return Err(Error::InvalidTorus {
            d: spec.d(),
            n: spec.n(),
        });
    }
    Ok(d + 2.0 * d * n.ln().ln() / n.ln())
}

/// `min |dA| / |A|^((eps-1)/eps)` over admissible `A`, with a minimiser.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IsoProfileResult {
    pub epsilon: f64,
    pub value: f64,
    pub witness: Vec<VertexId>,
    pub witness_boundary: u64,
}

pub(crate) fn exponent(epsilon: f64) -> Result<f64> {
    if !epsilon.is_finite() || epsilon <= 1.0 {
        return Err(Error::InvalidEpsilon(epsilon));
    }
    Ok((epsilon - 1.0) / epsilon)
}
