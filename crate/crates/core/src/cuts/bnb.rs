//! Branch and bound over connected vertex sets.
//!
//! Restricting to connected sets loses nothing for the optimum value: the
//! boundary is additive over the induced components of a set, and by the
//! mediant inequality some component is at least as good. The largest
//! minimiser, however, may be a union of several pairwise non-adjacent
//! optimal pieces, so a second pass collects every connected set at the
//! optimum and packs them.
//!
//! Each connected set is generated exactly once, from its smallest vertex,
//! by include/exclude branching on frontier vertices. An excluded neighbour
//! of the current set contributes a boundary edge forever, which gives the
//! admissible bound used for pruning.

use super::graph::{lex_less, ClusterGraph};
use super::ratio::ExactRatio;
use crate::error::{Error, Result};

pub const BNB_LIMIT: usize = 128;

struct Search {
    adj: Vec<u128>,
    deg: Vec<u64>,
    n: usize,
    half: usize,
    max_deg: u64,
    nodes: u64,
    budget: Option<u64>,
}

trait Visitor {
    /// Whether a set with boundary at least `lb` and size at most `max_size`
    /// can still matter.
    fn may_improve(&self, lb: u64, max_size: usize) -> bool;
    fn visit(&mut self, mask: u128, boundary: u64, size: usize);
}

/// Strictly improves an incumbent ratio.
struct BestRatio {
    best: ExactRatio,
    best_set: Option<(u128, u64)>,
}

impl Visitor for BestRatio {
    fn may_improve(&self, lb: u64, max_size: usize) -> bool {
        ExactRatio::new(lb, max_size as u64) < self.best
    }

    fn visit(&mut self, mask: u128, boundary: u64, size: usize) {
        let r = ExactRatio::new(boundary, size as u64);
        if r < self.best {
            self.best = r;
            self.best_set = Some((mask, boundary));
        }
    }
}

/// Collects every connected set whose ratio equals `target`.
struct AtRatio {
    target: ExactRatio,
    found: Vec<u128>,
}

impl Visitor for AtRatio {
    fn may_improve(&self, lb: u64, max_size: usize) -> bool {
        ExactRatio::new(lb, max_size as u64) <= self.target
    }

    fn visit(&mut self, mask: u128, boundary: u64, size: usize) {
        if ExactRatio::new(boundary, size as u64) == self.target {
            self.found.push(mask);
        }
    }
}

struct BestProfile {
    gamma: f64,
    best: f64,
    best_set: Option<(u128, u64)>,
}

impl Visitor for BestProfile {
    fn may_improve(&self, lb: u64, max_size: usize) -> bool {
        (lb as f64) / (max_size as f64).powf(self.gamma) < self.best
    }

    fn visit(&mut self, mask: u128, boundary: u64, size: usize) {
        let v = boundary as f64 / (size as f64).powf(self.gamma);
        if v < self.best {
            self.best = v;
            self.best_set = Some((mask, boundary));
        }
    }
}

impl Search {
    fn new(g: &ClusterGraph, budget: Option<u64>) -> Result<Self> {
        if g.len() > BNB_LIMIT {
            return Err(Error::Guard {
                what: "component size for connected search",
                value: g.len(),
                limit: BNB_LIMIT,
            });
        }
        Ok(Self {
            adj: g.adjacency_masks(),
            deg: (0..g.len()).map(|i| g.degree(i) as u64).collect(),
            n: g.len(),
            half: g.half(),
            max_deg: g.max_degree() as u64,
            nodes: 0,
            budget,
        })
    }

    fn run<V: Visitor>(&mut self, visitor: &mut V) -> Result<()> {
        for root in 0..self.n {
            let excluded = (1u128 << root) - 1;
            let s = 1u128 << root;
            let fixed = (self.adj[root] & excluded).count_ones() as u64;
            visitor.visit(s, self.deg[root], 1);
            self.branch(
                visitor,
                s,
                excluded,
                self.adj[root],
                1,
                self.deg[root],
                fixed,
            )?;
        }
        Ok(())
    }

    /// `fixed` counts edges from `set` to `excluded`; `reach` is `N(set)`.
    #[allow(clippy::too_many_arguments)]
    fn branch<V: Visitor>(
        &mut self,
        visitor: &mut V,
        set: u128,
        excluded: u128,
        reach: u128,
        size: usize,
        boundary: u64,
        fixed: u64,
    ) -> Result<()> {
        self.nodes += 1;
        if self.budget.is_some_and(|b| self.nodes > b) {
            return Err(Error::BudgetExceeded { nodes: self.nodes });
        }
        if size >= self.half {
            return Ok(());
        }
        let frontier = reach & !set & !excluded;
        if frontier == 0 {
            return Ok(());
        }
        let max_size = self.half.min(self.n - excluded.count_ones() as usize);
        let shrink = self.max_deg * (max_size - size) as u64;
        let lb = fixed.max(boundary.saturating_sub(shrink));
        if !visitor.may_improve(lb, max_size) {
            return Ok(());
        }

        // Branch on the frontier vertex most attached to the set.
        let mut pick = 0;
        let mut pick_links = 0;
        let mut f = frontier;
        while f != 0 {
            let v = f.trailing_zeros() as usize;
            f &= f - 1;
            let links = (self.adj[v] & set).count_ones();
            if links > pick_links {
                pick = v;
                pick_links = links;
            }
        }
        let v = pick;
        let bit = 1u128 << v;
        let links = pick_links as u64;

        let grown = set | bit;
        let grown_boundary = boundary + self.deg[v] - 2 * links;
        visitor.visit(grown, grown_boundary, size + 1);
        self.branch(
            visitor,
            grown,
            excluded,
            reach | self.adj[v],
            size + 1,
            grown_boundary,
            fixed + (self.adj[v] & excluded).count_ones() as u64,
        )?;
        self.branch(
            visitor,
            set,
            excluded | bit,
            reach,
            size,
            boundary,
            fixed + links,
        )
    }
}

#[derive(Debug, Clone)]
pub(crate) struct BnbOutcome {
    pub phi: ExactRatio,
    pub witness: u128,
    pub max_size: usize,
}

/// Exact optimum, largest minimiser and its lexicographically smallest
/// instance. `incumbent` is any known upper bound (a set's ratio).
pub(crate) fn solve_ratio(
    g: &ClusterGraph,
    incumbent: Option<ExactRatio>,
    budget: Option<u64>,
) -> Result<BnbOutcome> {
    let mut search = Search::new(g, budget)?;
    // Anything strictly above the trivial bound 2d works as a sentinel.
    let sentinel = ExactRatio::new(search.max_deg + 1, 1);
    let start = incumbent.map_or(sentinel, |r| r.min(sentinel));
    let mut best = BestRatio {
        best: start,
        best_set: None,
    };
    search.run(&mut best)?;
    let phi = best.best;

    let mut at = AtRatio {
        target: phi,
        found: Vec::new(),
    };
    search.run(&mut at)?;
    if at.found.is_empty() {
        return Err(Error::Invariant(
            "no connected set attains the incumbent ratio".into(),
        ));
    }
    let (witness, max_size) = pack(&search, &at.found, budget)?;
    Ok(BnbOutcome {
        phi,
        witness,
        max_size,
    })
}

/// Largest union of pairwise disjoint, non-adjacent optimal pieces that fits
/// in half the component; lexicographically smallest among the largest.
fn pack(search: &Search, pieces: &[u128], budget: Option<u64>) -> Result<(u128, usize)> {
    let closure: Vec<u128> = pieces
        .iter()
        .map(|&p| {
            let mut c = p;
            let mut m = p;
            while m != 0 {
                c |= search.adj[m.trailing_zeros() as usize];
                m &= m - 1;
            }
            c
        })
        .collect();

    struct Packer<'b> {
        pieces: &'b [u128],
        closure: &'b [u128],
        half: usize,
        best: (usize, u128),
        steps: u64,
        budget: Option<u64>,
    }

    impl Packer<'_> {
        fn go(&mut self, from: usize, union: u128, blocked: u128) -> Result<()> {
            self.steps += 1;
            if self.budget.is_some_and(|b| self.steps > b) {
                return Err(Error::BudgetExceeded { nodes: self.steps });
            }
            let size = union.count_ones() as usize;
            if size > self.best.0 || (size == self.best.0 && lex_less(union, self.best.1)) {
                self.best = (size, union);
            }
            for i in from..self.pieces.len() {
                let p = self.pieces[i];
                if p & blocked != 0 || size + p.count_ones() as usize > self.half {
                    continue;
                }
                self.go(i + 1, union | p, blocked | self.closure[i])?;
            }
            Ok(())
        }
    }

    let mut packer = Packer {
        pieces,
        closure: &closure,
        half: search.half,
        best: (0, 0),
        steps: 0,
        budget,
    };
    packer.go(0, 0, 0)?;
    Ok((packer.best.1, packer.best.0))
}

#[derive(Debug, Clone)]
pub(crate) struct ProfileOutcome {
    pub value: f64,
    pub witness: u128,
    pub boundary: u64,
}

pub(crate) fn solve_profile(
    g: &ClusterGraph,
    gamma: f64,
    budget: Option<u64>,
) -> Result<ProfileOutcome> {
    let mut search = Search::new(g, budget)?;
    let mut best = BestProfile {
        gamma,
        best: f64::INFINITY,
        best_set: None,
    };
    search.run(&mut best)?;
    let (witness, boundary) = best
        .best_set
        .ok_or_else(|| Error::Invariant("empty connected search".into()))?;
    Ok(ProfileOutcome {
        value: best.best,
        witness,
        boundary,
    })
}
