//! Edge boundaries, the Cheeger constant of the giant cluster, and the
//! isoperimetric profile.
//!
//! Three routes compute the Cheeger constant:
//!
//! * [`cheeger_brute`] enumerates every subset (the reference oracle, `|C| <= 24`);
//! * [`cheeger_exact`] uses a frontier dynamic program when the cluster has a
//!   narrow elimination order and connected-set branch and bound otherwise;
//! * [`cheeger_heuristic`] gives an upper bound for clusters too big for either.
//!
//! Admissible sets satisfy `2|A| <= |C|`. Witnesses are the lexicographically
//! smallest minimiser among those of maximum size.

mod bnb;
mod brute;
mod frontier;
mod graph;
mod heuristic;
mod profile;
mod ratio;

use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use heuristic::HeuristicParams;
pub use profile::{epsilon_n, IsoProfileResult};
pub use ratio::ExactRatio;

use crate::error::{Error, Result};
use crate::percolation::{Configuration, GiantComponent};
use crate::torus::VertexId;
use graph::{mask_to_locals, ClusterGraph};

pub use bnb::BNB_LIMIT;
pub use brute::BRUTE_LIMIT;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CutSet {
    pub vertices: Vec<VertexId>,
    pub boundary: u64,
    pub ratio: ExactRatio,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Brute,
    Exact,
    Heuristic,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Brute => "brute",
            Method::Exact => "exact",
            Method::Heuristic => "heuristic",
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Which solver a caller asks for. Same spelling as [`Method`].
pub type SolverMode = Method;

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "brute" => Ok(Method::Brute),
            "exact" => Ok(Method::Exact),
            "heuristic" => Ok(Method::Heuristic),
            other => Err(Error::Parse(format!("unknown solver mode {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheegerResult {
    /// Reduced form of the optimum (or best found) ratio.
    pub phi: ExactRatio,
    pub witness: CutSet,
    pub max_minimizer_size: usize,
    pub method: Method,
    pub optimal: bool,
}

/// The part of a [`CheegerResult`] the event checks need.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheegerValue {
    pub phi: ExactRatio,
    pub max_minimizer_size: usize,
    pub giant_size: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum ExactStrategy {
    /// Frontier dynamic program when it fits, branch and bound otherwise.
    #[default]
    Auto,
    Frontier,
    BranchAndBound,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ExactOptions {
    pub strategy: ExactStrategy,
    /// Search-node limit for branch and bound; exceeding it is an error.
    pub node_budget: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProfileMode {
    Brute,
    Exact,
}

/// Open edges with exactly one endpoint in `a`. Duplicates in `a` are ignored.
pub fn boundary_size(a: &[VertexId], omega: &Configuration, c: &GiantComponent) -> Result<u64> {
    let spec = omega.spec();
    let mut member = vec![false; spec.vertex_count()];
    for &v in a {
        spec.check_vertex(v)?;
        if !c.contains(v) {
            return Err(Error::NotInComponent(v.0));
        }
        member[v.0] = true;
    }
    let mut b = 0;
    for (v, _) in member.iter().enumerate().filter(|(_, &m)| m) {
        for (w, e) in spec.neighbors_with_edges(VertexId(v)) {
            if omega.is_open(e) && !member[w.0] {
                b += 1;
            }
        }
    }
    Ok(b)
}

pub fn psi(a: &[VertexId], omega: &Configuration, c: &GiantComponent) -> Result<ExactRatio> {
    let mut distinct = a.to_vec();
    distinct.sort_unstable();
    distinct.dedup();
    if distinct.is_empty() {
        return Err(Error::EmptySet);
    }
    let b = boundary_size(&distinct, omega, c)?;
    Ok(ExactRatio::new(b, distinct.len() as u64))
}

fn cluster_graph(omega: &Configuration, c: &GiantComponent) -> Result<ClusterGraph> {
    if c.size() < 2 {
        return Err(Error::PhiUndefined {
            giant_size: c.size(),
        });
    }
    ClusterGraph::build(omega, c)
}

fn finish(
    g: &ClusterGraph,
    phi: ExactRatio,
    locals: Vec<usize>,
    boundary: u64,
    method: Method,
    optimal: bool,
) -> CheegerResult {
    let size = locals.len();
    CheegerResult {
        phi: phi.reduced(),
        witness: CutSet {
            vertices: g.to_global(locals),
            boundary,
            ratio: ExactRatio::new(boundary, size as u64),
        },
        max_minimizer_size: size,
        method,
        optimal,
    }
}

pub fn cheeger_brute(omega: &Configuration, c: &GiantComponent) -> Result<CheegerResult> {
    let g = cluster_graph(omega, c)?;
    if g.len() > BRUTE_LIMIT {
        return Err(Error::Guard {
            what: "component size for brute force",
            value: g.len(),
            limit: BRUTE_LIMIT,
        });
    }
    let opt = brute::brute_profile(&g)
        .ratio_optimum()
        .ok_or_else(|| Error::Invariant("empty size profile".into()))?;
    let mask = brute::brute_find(&g, opt.size, opt.boundary)
        .ok_or_else(|| Error::Invariant("optimum not attained".into()))?;
    Ok(finish(
        &g,
        opt.phi,
        mask_to_locals(mask),
        opt.boundary,
        Method::Brute,
        true,
    ))
}

pub fn cheeger_exact(omega: &Configuration, c: &GiantComponent) -> Result<CheegerResult> {
    cheeger_exact_with(omega, c, ExactOptions::default())
}

fn frontier_for(
    g: &ClusterGraph,
    strategy: ExactStrategy,
) -> Result<Option<frontier::Frontier<'_>>> {
    match strategy {
        ExactStrategy::BranchAndBound => Ok(None),
        ExactStrategy::Auto => Ok(frontier::Frontier::new(g)),
        ExactStrategy::Frontier => frontier::Frontier::new(g).map(Some).ok_or(Error::Guard {
            what: "frontier width",
            value: g.len(),
            limit: 24,
        }),
    }
}

fn bnb_ratio(g: &ClusterGraph, budget: Option<u64>) -> Result<bnb::BnbOutcome> {
    let incumbent = heuristic::run(g, &HeuristicParams::default());
    bnb::solve_ratio(
        g,
        Some(ExactRatio::new(incumbent.boundary, incumbent.size as u64)),
        budget,
    )
}

pub fn cheeger_exact_with(
    omega: &Configuration,
    c: &GiantComponent,
    options: ExactOptions,
) -> Result<CheegerResult> {
    let g = cluster_graph(omega, c)?;
    if let Some(f) = frontier_for(&g, options.strategy)? {
        let opt = f
            .profile()
            .ratio_optimum()
            .ok_or_else(|| Error::Invariant("empty size profile".into()))?;
        let locals = f
            .find(opt.size, opt.boundary)
            .ok_or_else(|| Error::Invariant("optimum not attained".into()))?;
        return Ok(finish(
            &g,
            opt.phi,
            locals,
            opt.boundary,
            Method::Exact,
            true,
        ));
    }
    let out = bnb_ratio(&g, options.node_budget)?;
    let locals = mask_to_locals(out.witness);
    let member = {
        let mut m = vec![false; g.len()];
        locals.iter().for_each(|&i| m[i] = true);
        m
    };
    let boundary = g.boundary_of(&member);
    Ok(finish(&g, out.phi, locals, boundary, Method::Exact, true))
}

/// Optimum ratio and largest minimiser size, skipping the witness search.
pub fn cheeger_value(
    omega: &Configuration,
    c: &GiantComponent,
    mode: Method,
) -> Result<CheegerValue> {
    let g = cluster_graph(omega, c)?;
    let (phi, max_minimizer_size) = match mode {
        Method::Brute => {
            if g.len() > BRUTE_LIMIT {
                return Err(Error::Guard {
                    what: "component size for brute force",
                    value: g.len(),
                    limit: BRUTE_LIMIT,
                });
            }
            let o = brute::brute_profile(&g)
                .ratio_optimum()
                .ok_or_else(|| Error::Invariant("empty size profile".into()))?;
            (o.phi, o.size)
        }
        Method::Exact => match frontier::Frontier::new(&g) {
            Some(f) => {
                let o = f
                    .profile()
                    .ratio_optimum()
                    .ok_or_else(|| Error::Invariant("empty size profile".into()))?;
                (o.phi, o.size)
            }
            None => {
                let o = bnb_ratio(&g, None)?;
                (o.phi, o.max_size)
            }
        },
        Method::Heuristic => {
            let h = heuristic::run(&g, &HeuristicParams::default());
            (ExactRatio::new(h.boundary, h.size as u64), h.size)
        }
    };
    Ok(CheegerValue {
        phi: phi.reduced(),
        max_minimizer_size,
        giant_size: g.len(),
    })
}

/// Dispatch on a solver mode with default options.
pub fn cheeger(omega: &Configuration, c: &GiantComponent, mode: Method) -> Result<CheegerResult> {
    match mode {
        Method::Brute => cheeger_brute(omega, c),
        Method::Exact => cheeger_exact(omega, c),
        Method::Heuristic => cheeger_heuristic(omega, c, &HeuristicParams::default()),
    }
}

/// Upper bound on the Cheeger constant; `optimal` is always false.
pub fn cheeger_heuristic(
    omega: &Configuration,
    c: &GiantComponent,
    params: &HeuristicParams,
) -> Result<CheegerResult> {
    let g = cluster_graph(omega, c)?;
    let h = heuristic::run(&g, params);
    let locals: Vec<usize> = (0..g.len()).filter(|&i| h.member[i]).collect();
    let phi = ExactRatio::new(h.boundary, h.size as u64);
    Ok(finish(
        &g,
        phi,
        locals,
        h.boundary,
        Method::Heuristic,
        false,
    ))
}

/// `min |dA| / |A|^((eps-1)/eps)` over admissible `A`.
pub fn iso_profile(
    omega: &Configuration,
    c: &GiantComponent,
    epsilon: f64,
    mode: ProfileMode,
) -> Result<IsoProfileResult> {
    let gamma = profile::exponent(epsilon)?;
    let g = cluster_graph(omega, c)?;
    let (value, locals, boundary) = match mode {
        ProfileMode::Brute => {
            if g.len() > BRUTE_LIMIT {
                return Err(Error::Guard {
                    what: "component size for brute force",
                    value: g.len(),
                    limit: BRUTE_LIMIT,
                });
            }
            let (v, size, b) = brute::brute_profile(&g)
                .profile_optimum(gamma)
                .ok_or_else(|| Error::Invariant("empty size profile".into()))?;
            let mask = brute::brute_find(&g, size, b)
                .ok_or_else(|| Error::Invariant("optimum not attained".into()))?;
            (v, mask_to_locals(mask), b)
        }
        ProfileMode::Exact => match frontier::Frontier::new(&g) {
            Some(f) => {
                let (v, size, b) = f
                    .profile()
                    .profile_optimum(gamma)
                    .ok_or_else(|| Error::Invariant("empty size profile".into()))?;
                let locals = f
                    .find(size, b)
                    .ok_or_else(|| Error::Invariant("optimum not attained".into()))?;
                (v, locals, b)
            }
            None => {
                let o = bnb::solve_profile(&g, gamma, None)?;
                (o.value, mask_to_locals(o.witness), o.boundary)
            }
        },
    };
    Ok(IsoProfileResult {
        epsilon,
        value,
        witness: g.to_global(locals),
        witness_boundary: boundary,
    })
}
