//! The typicality events and the single-edge gradient bound they imply.
//!
//! Everything is driven by a [`FlipAnalysis`]: the Cheeger value of `omega`
//! and of every single-edge flip, solved once and shared by the event
//! checks, the gradient claim and the experiment records.

use num_rational::Rational64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cuts::{
    cheeger_value, epsilon_n, iso_profile, CheegerValue, ExactRatio, Method, ProfileMode,
};
use crate::error::{Error, Result};
use crate::flips::{classify_with, FlipCase};
use crate::percolation::{giant_component, Configuration, GiantComponent};
use crate::torus::{EdgeId, TorusSpec};

const DEFAULT_CONSTANTS: &str = include_str!("../data/default.constants");

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EventConstants {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub c4: f64,
    pub c5: f64,
    pub c6: f64,
    #[serde(rename = "C_claim")]
    pub c_claim: f64,
}

impl Default for EventConstants {
    fn default() -> Self {
        Self::parse(DEFAULT_CONSTANTS).expect("shipped constants file is valid")
    }
}

impl EventConstants {
    pub const KEYS: [&'static str; 7] = ["c1", "c2", "c3", "c4", "c5", "c6", "C_claim"];

    /// `key=value` lines; blank lines and `#` comments are skipped. Every
    /// key must appear exactly once.
    pub fn parse(text: &str) -> Result<Self> {
        let mut values = [None; 7];
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("line {}: expected key=value", lineno + 1)))?;
            let key = key.trim();
            let slot = Self::KEYS
                .iter()
                .position(|k| *k == key)
                .ok_or_else(|| Error::Parse(format!("unknown constant {key:?}")))?;
            if values[slot].is_some() {
                return Err(Error::Parse(format!("duplicate constant {key:?}")));
            }
            let v: f64 = value
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("constant {key}: malformed value {value:?}")))?;
            values[slot] = Some(v);
        }
        let mut out = [0.0; 7];
        for (i, v) in values.iter().enumerate() {
            out[i] =
                v.ok_or_else(|| Error::Parse(format!("missing constant {:?}", Self::KEYS[i])))?;
        }
        let k = Self {
            c1: out[0],
            c2: out[1],
            c3: out[2],
            c4: out[3],
            c5: out[4],
            c6: out[5],
            c_claim: out[6],
        };
        k.validate()?;
        Ok(k)
    }

    pub fn set(&mut self, key: &str, value: f64) -> Result<()> {
        let slot = match key {
            "c1" => &mut self.c1,
            "c2" => &mut self.c2,
            "c3" => &mut self.c3,
            "c4" => &mut self.c4,
            "c5" => &mut self.c5,
            "c6" => &mut self.c6,
            "C_claim" => &mut self.c_claim,
            _ => return Err(Error::Parse(format!("unknown constant {key:?}"))),
        };
        *slot = value;
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        let all = [
            self.c1,
            self.c2,
            self.c3,
            self.c4,
            self.c5,
            self.c6,
            self.c_claim,
        ];
        if let Some(i) = all.iter().position(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(Error::Parse(format!(
                "constant {} must be positive, got {}",
                Self::KEYS[i],
                all[i]
            )));
        }
        if self.c2 >= self.c3 {
            return Err(Error::Parse(format!(
                "c2 = {} must be below c3 = {}",
                self.c2, self.c3
            )));
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        format!(
            "c1={}\nc2={}\nc3={}\nc4={}\nc5={}\nc6={}\nC_claim={}\n",
            self.c1, self.c2, self.c3, self.c4, self.c5, self.c6, self.c_claim
        )
    }
}

/// One flipped configuration `omega^e`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlipOutcome {
    pub edge: EdgeId,
    pub case: FlipCase,
    pub symmetric_difference: usize,
    /// `None` when the flipped giant has fewer than two vertices.
    pub value: Option<CheegerValue>,
}

impl FlipOutcome {
    /// `phi(omega) - phi(omega^e)` when both sides are defined.
    pub fn gradient(&self, base: Option<&CheegerValue>) -> Option<Rational64> {
        let (a, b) = (base?.phi, self.value.as_ref()?.phi);
        Some(ratio(a) - ratio(b))
    }
}

fn ratio(r: ExactRatio) -> Rational64 {
    r.to_rational()
}

/// Cheeger values of a configuration and all of its single-edge flips.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlipAnalysis {
    pub spec: TorusSpec,
    pub method: Method,
    pub giant_size: usize,
    pub base: Option<CheegerValue>,
    /// Isoperimetric profile at `eps(n)`; `None` when `phi` is undefined.
    pub epsilon: f64,
    pub iso_value: Option<f64>,
    pub flips: Vec<FlipOutcome>,
}

impl FlipAnalysis {
    /// Solves `omega` and every `omega^e`. A flip that changes neither the
    /// giant's vertex set nor its internal edges (the edge is not inside the
    /// giant) reuses the base value instead of solving again.
    pub fn compute(omega: &Configuration, mode: Method) -> Result<Self> {
        let spec = omega.spec();
        let giant = giant_component(omega);
        let base = solve(omega, &giant, mode)?;
        let epsilon = epsilon_n(spec)?;
        let iso_value = match base {
            Some(_) => {
                let pm = if mode == Method::Brute {
                    ProfileMode::Brute
                } else {
                    ProfileMode::Exact
                };
                Some(iso_profile(omega, &giant, epsilon, pm)?.value)
            }
            None => None,
        };
        let flips = (0..spec.edge_count())
            .into_par_iter()
            .map(|e| flip_outcome(omega, &giant, base.as_ref(), EdgeId(e), mode))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            spec,
            method: mode,
            giant_size: giant.size(),
            base,
            epsilon,
            iso_value,
            flips,
        })
    }

    pub fn gradients(&self) -> impl Iterator<Item = (EdgeId, FlipCase, Option<Rational64>)> + '_ {
        self.flips
            .iter()
            .map(|f| (f.edge, f.case, f.gradient(self.base.as_ref())))
    }

    pub fn events(&self, k: &EventConstants) -> EventReport {
        let (d, n) = (self.spec.d(), self.spec.n());
        let volume = self.spec.vertex_count() as f64;
        let nf = n as f64;

        let h1 = self.giant_size as f64 > k.c1 * volume;

        let (max_sd, max_sd_edge) = self
            .flips
            .iter()
            .map(|f| (f.symmetric_difference, f.edge))
            .fold(
                (0, None),
                |acc, (s, e)| if s > acc.0 { (s, Some(e)) } else { acc },
            );
        // |Delta| <= sqrt(n) is |Delta|^2 <= n for integers.
        let h3 = max_sd * max_sd <= n;

        let (min_flip, min_flip_edge) = self.flips.iter().fold((None, None), |acc, f| {
            let size = f.value.map_or(0, |v| v.max_minimizer_size);
            match acc.0 {
                Some(m) if m <= size => acc,
                _ => (Some(size), Some(f.edge)),
            }
        });
        let undefined_flips = self.flips.iter().filter(|f| f.value.is_none()).count();

        let iso_threshold = k.c6 * nf.powf(d as f64 / self.epsilon - 1.0);
        let (h2, h4, h5, g) = match &self.base {
            Some(b) => {
                let phi = b.phi.to_f64();
                let h2 = k.c2 / nf < phi && phi < k.c3 / nf;
                let h4 = b.max_minimizer_size as f64 > k.c4 * volume;
                let h5 = min_flip.is_some_and(|m| m as f64 > k.c5 * volume);
                let g = self.iso_value.is_some_and(|v| v >= iso_threshold);
                (h2, h4, h5, g)
            }
            None => (false, false, false, false),
        };

        EventReport {
            h1,
            h2,
            h3,
            h4,
            h5,
            g,
            h_all: h1 && h2 && h3 && h4 && h5,
            phi_defined: self.base.is_some(),
            details: EventDetails {
                d,
                n,
                giant_size: self.giant_size,
                phi: self.base.map(|b| b.phi),
                max_minimizer_size: self.base.map(|b| b.max_minimizer_size),
                max_symmetric_difference: max_sd,
                max_symmetric_difference_edge: max_sd_edge,
                min_flipped_minimizer_size: min_flip,
                min_flipped_minimizer_edge: min_flip_edge,
                undefined_flips,
                epsilon: self.epsilon,
                iso_value: self.iso_value,
                iso_threshold,
                method: self.method,
            },
        }
    }

    pub fn gradient_claim(&self, k: &EventConstants) -> GradientClaim {
        let in_hn = self.events(k).h_all;
        let mut sup: Option<(Rational64, EdgeId)> = None;
        let mut undefined_edges = Vec::new();
        for (e, _, g) in self.gradients() {
            match g {
                Some(g) => {
                    let a = if g < Rational64::from_integer(0) {
                        -g
                    } else {
                        g
                    };
                    if sup.is_none_or(|(s, _)| a > s) {
                        sup = Some((a, e));
                    }
                }
                None => undefined_edges.push(e),
            }
        }
        let volume = self.spec.vertex_count() as f64;
        let bound = k.c_claim / volume;
        let holds = in_hn.then(|| {
            sup.is_none_or(|(s, _)| *s.numer() as f64 * volume <= k.c_claim * *s.denom() as f64)
        });
        GradientClaim {
            in_hn,
            sup_grad: sup.map(|(s, _)| s),
            sup_edge: sup.map(|(_, e)| e),
            bound,
            holds,
            undefined_edges,
        }
    }
}

fn solve(
    omega: &Configuration,
    giant: &GiantComponent,
    mode: Method,
) -> Result<Option<CheegerValue>> {
    match cheeger_value(omega, giant, mode) {
        Ok(v) => Ok(Some(v)),
        Err(Error::PhiUndefined { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

fn flip_outcome(
    omega: &Configuration,
    giant: &GiantComponent,
    base: Option<&CheegerValue>,
    e: EdgeId,
    mode: Method,
) -> Result<FlipOutcome> {
    let mut flipped = omega.clone();
    flipped.toggle(e);
    let flipped_giant = giant_component(&flipped);
    let case = classify_with(omega, giant, e, Some(&flipped_giant))?;
    let (x, y, _) = omega.spec().edge_endpoints(e)?;
    let inside = giant.contains(x) && giant.contains(y);
    let value = if !inside && flipped_giant == *giant {
        base.copied()
    } else {
        solve(&flipped, &flipped_giant, mode)?
    };
    Ok(FlipOutcome {
        edge: e,
        case,
        symmetric_difference: giant.symmetric_difference_size(&flipped_giant),
        value,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventDetails {
    pub d: usize,
    pub n: usize,
    pub giant_size: usize,
    pub phi: Option<ExactRatio>,
    pub max_minimizer_size: Option<usize>,
    pub max_symmetric_difference: usize,
    /// First edge attaining the largest symmetric difference.
    pub max_symmetric_difference_edge: Option<EdgeId>,
    /// Smallest largest-minimiser size over all flips (0 where undefined).
    pub min_flipped_minimizer_size: Option<usize>,
    pub min_flipped_minimizer_edge: Option<EdgeId>,
    pub undefined_flips: usize,
    pub epsilon: f64,
    pub iso_value: Option<f64>,
    pub iso_threshold: f64,
    pub method: Method,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventReport {
    pub h1: bool,
    pub h2: bool,
    pub h3: bool,
    pub h4: bool,
    pub h5: bool,
    pub g: bool,
    pub h_all: bool,
    pub phi_defined: bool,
    pub details: EventDetails,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GradientClaim {
    pub in_hn: bool,
    /// Largest `|phi(omega) - phi(omega^e)|` over edges where both are defined.
    pub sup_grad: Option<Rational64>,
    pub sup_edge: Option<EdgeId>,
    /// `C_claim / n^d`.
    pub bound: f64,
    /// `None` when `omega` is outside the event (the claim does not apply).
    pub holds: Option<bool>,
    pub undefined_edges: Vec<EdgeId>,
}

pub fn check_events(
    omega: &Configuration,
    k: &EventConstants,
    mode: Method,
) -> Result<EventReport> {
    Ok(FlipAnalysis::compute(omega, mode)?.events(k))
}

pub fn verify_gradient_claim(omega: &Configuration, k: &EventConstants) -> Result<GradientClaim> {
    Ok(FlipAnalysis::compute(omega, Method::Exact)?.gradient_claim(k))
}
