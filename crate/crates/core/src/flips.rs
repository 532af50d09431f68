//! Single-edge perturbations `omega^e`, the extremal pair, the discrete
//! gradient `f(omega) - f(omega^e)`, and the six-cell case table used to
//! bound how much one edge can move the Cheeger constant.

use std::ops::Sub;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::percolation::{giant_component, Configuration, GiantComponent};
use crate::torus::EdgeId;

/// Cell of the case table: rows are the endpoint membership in the giant
/// component of `omega`, columns are the state of `e` in `omega`.
///
/// | endpoints of e      | closed | open     |
/// |---------------------|--------|----------|
/// | both outside C      | Case1  | Case2    |
/// | both inside C       | Case3  | Case4a/b |
/// | exactly one inside  | Case5  | Case6    |
///
/// Case 4 splits on whether closing `e` removes vertices from the giant
/// (`Case4b`) or not (`Case4a`). Case 6 cannot occur: an open edge never
/// leaves a cluster.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FlipCase {
    Case1,
    Case2,
    Case3,
    Case4a,
    Case4b,
    Case5,
    Case6,
}

impl FlipCase {
    pub const ALL: [FlipCase; 7] = [
        FlipCase::Case1,
        FlipCase::Case2,
        FlipCase::Case3,
        FlipCase::Case4a,
        FlipCase::Case4b,
        FlipCase::Case5,
        FlipCase::Case6,
    ];

    pub fn label(self) -> &'static str {
        match self {
            FlipCase::Case1 => "1",
            FlipCase::Case2 => "2",
            FlipCase::Case3 => "3",
            FlipCase::Case4a => "4a",
            FlipCase::Case4b => "4b",
            FlipCase::Case5 => "5",
            FlipCase::Case6 => "6",
        }
    }

    pub fn from_label(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|c| c.label() == s)
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

impl std::fmt::Display for FlipCase {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.label())
    }
}

/// `omega^e`: `omega` with edge `e` toggled.
pub fn flip(omega: &Configuration, e: EdgeId) -> Result<Configuration> {
    omega.spec().check_edge(e)?;
    let mut out = omega.clone();
    out.toggle(e);
    Ok(out)
}

/// `(min{omega, omega^e}, max{omega, omega^e})`: `e` forced closed, then open.
pub fn extremal_pair(omega: &Configuration, e: EdgeId) -> Result<(Configuration, Configuration)> {
    omega.spec().check_edge(e)?;
    let mut lower = omega.clone();
    lower.set(e, false);
    let mut upper = omega.clone();
    upper.set(e, true);
    Ok((lower, upper))
}

/// `f(omega) - f(omega^e)`. Errors from either evaluation propagate.
pub fn grad<T, E, F>(f: F, omega: &Configuration, e: EdgeId) -> std::result::Result<T, E>
where
    F: Fn(&Configuration) -> std::result::Result<T, E>,
    T: Sub<Output = T>,
    E: From<Error>,
{
    let flipped = flip(omega, e)?;
    Ok(f(omega)? - f(&flipped)?)
}

pub fn classify_case(omega: &Configuration, e: EdgeId) -> Result<FlipCase> {
    omega.spec().check_edge(e)?;
    classify_with(omega, &giant_component(omega), e, None)
}

/// Classification against a precomputed giant. `flipped_giant`, when known,
/// saves recomputing `C(omega^e)` for Case 4.
pub(crate) fn classify_with(
    omega: &Configuration,
    giant: &GiantComponent,
    e: EdgeId,
    flipped_giant: Option<&GiantComponent>,
) -> Result<FlipCase> {
    let (x, y, _) = omega.spec().endpoints_unchecked(e);
    let open = omega.is_open(e);
    let inside = giant.contains(x) as u8 + giant.contains(y) as u8;
    match (inside, open) {
        (0, false) => Ok(FlipCase::Case1),
        (0, true) => Ok(FlipCase::Case2),
        (2, false) => Ok(FlipCase::Case3),
        (2, true) => {
            let lost = match flipped_giant {
                Some(g) => giant.difference_size(g),
                None => {
                    let mut f = omega.clone();
                    f.toggle(e);
                    giant.difference_size(&giant_component(&f))
                }
            };
            Ok(if lost == 0 {
                FlipCase::Case4a
            } else {
                FlipCase::Case4b
            })
        }
        (_, false) => Ok(FlipCase::Case5),
        (_, true) => Err(Error::Invariant(format!(
            "open edge {e} has exactly one endpoint in the giant component"
        ))),
    }
}
