//! Seeded instance generators and exact checks shared by the property
//! suites and the acceptance harness. Each check returns `Err` with a
//! description of the first violated identity.

use isoperc_core::rng::SplitMix64;
use isoperc_core::{
    boundary_size, cheeger_value, classify_case, extremal_pair, flip, giant_component, grad,
    sample_configuration, symmetric_difference_size, Configuration, EdgeId, Error, FlipCase,
    GiantComponent, Method, TorusSpec, VertexId,
};
use num_rational::Rational64;

pub type Check = std::result::Result<(), String>;

fn ensure(ok: bool, what: impl FnOnce() -> String) -> Check {
    if ok {
        Ok(())
    } else {
        Err(what())
    }
}

pub fn random_config(rng: &mut SplitMix64, n_range: (usize, usize), p: f64) -> Configuration {
    let n = n_range.0 + rng.below((n_range.1 - n_range.0 + 1) as u64) as usize;
    let spec = TorusSpec::new(2, n).unwrap();
    sample_configuration(spec, p, rng.next_u64()).unwrap()
}

pub fn random_edge(rng: &mut SplitMix64, w: &Configuration) -> EdgeId {
    EdgeId(rng.below(w.spec().edge_count() as u64) as usize)
}

fn phi(w: &Configuration) -> isoperc_core::Result<Rational64> {
    let c = giant_component(w);
    Ok(cheeger_value(w, &c, Method::Exact)?.phi.to_rational())
}

fn giant_size(w: &Configuration) -> isoperc_core::Result<i64> {
    Ok(giant_component(w).size() as i64)
}

/// Involution, commutation with a second edge, the extremal pair identities
/// and antisymmetry of the gradient of `|C|` and of `phi`.
pub fn flip_algebra(w: &Configuration, e: EdgeId, f: EdgeId) -> Check {
    let we = flip(w, e).unwrap();
    ensure(flip(&we, e).unwrap() == *w, || {
        format!("flip not an involution at {e}")
    })?;
    ensure(
        (0..w.spec().edge_count())
            .all(|i| (i == e.0) != (w.is_open(EdgeId(i)) == we.is_open(EdgeId(i)))),
        || format!("flip at {e} touched another edge"),
    )?;
    if e != f {
        let ef = flip(&we, f).unwrap();
        let fe = flip(&flip(w, f).unwrap(), e).unwrap();
        ensure(ef == fe, || format!("flips at {e} and {f} do not commute"))?;
    }

    let (lo, hi) = extremal_pair(w, e).unwrap();
    ensure(!lo.is_open(e) && hi.is_open(e), || {
        "extremal pair bits".into()
    })?;
    let same = |a: &Configuration| {
        (0..w.spec().edge_count()).all(|i| i == e.0 || a.is_open(EdgeId(i)) == w.is_open(EdgeId(i)))
    };
    ensure(same(&lo) && same(&hi), || {
        "extremal pair changed another edge".into()
    })?;
    let pair_ok = if w.is_open(e) {
        hi == *w && lo == we
    } else {
        lo == *w && hi == we
    };
    ensure(pair_ok, || "{w, w^e} != {lower, upper}".into())?;
    ensure(extremal_pair(&we, e).unwrap() == (lo, hi), || {
        "extremal pair not flip invariant".into()
    })?;

    let g1: i64 = grad(giant_size, w, e).unwrap();
    let g2: i64 = grad(giant_size, &we, e).unwrap();
    ensure(g1 == -g2, || {
        format!("|C| gradient not antisymmetric: {g1} vs {g2}")
    })?;
    ensure(
        symmetric_difference_size(w, e).unwrap() == symmetric_difference_size(&we, e).unwrap(),
        || "symmetric difference not flip symmetric".into(),
    )?;
    match (grad(phi, w, e), grad(phi, &we, e)) {
        (Ok(a), Ok(b)) => ensure(a == -b, || {
            format!("phi gradient not antisymmetric: {a} vs {b}")
        }),
        (Err(Error::PhiUndefined { .. }), Err(Error::PhiUndefined { .. })) => Ok(()),
        (a, b) => Err(format!(
            "phi gradient defined on one side only: {a:?} / {b:?}"
        )),
    }
}

/// `classify_case` on a random edge; `Err` if the impossible cell shows up.
pub fn case_is_possible(w: &Configuration, e: EdgeId) -> std::result::Result<FlipCase, String> {
    match classify_case(w, e) {
        Ok(FlipCase::Case6) => Err(format!("Case6 returned at {e}")),
        Ok(c) => Ok(c),
        Err(err) => Err(format!("classification failed at {e}: {err}")),
    }
}

fn random_subset(rng: &mut SplitMix64, pool: &[VertexId]) -> Vec<VertexId> {
    let m = 1 + rng.below(pool.len() as u64) as usize;
    let mut v = pool.to_vec();
    for i in 0..m {
        let j = i + rng.below((v.len() - i) as u64) as usize;
        v.swap(i, j);
    }
    v.truncate(m);
    v
}

/// One instance of the single-edge bound for `psi_A`: `A` is a random
/// subset of the giant component of the lower configuration, and
/// `|psi_A(w) - psi_A(w^e)| <= 1/|A|` must hold exactly.
pub fn single_edge_psi(rng: &mut SplitMix64) -> Check {
    let p = [0.3, 0.5, 0.7, 0.9][rng.below(4) as usize];
    let w = random_config(rng, (3, 7), p);
    let e = random_edge(rng, &w);
    let (lo, _) = extremal_pair(&w, e).unwrap();
    let c = giant_component(&lo);
    let a = random_subset(rng, c.vertices());
    let m = a.len() as i64;
    let we = flip(&w, e).unwrap();
    let before = Rational64::new(boundary_size(&a, &w, &c).unwrap() as i64, m);
    let after = Rational64::new(boundary_size(&a, &we, &c).unwrap() as i64, m);
    let diff = before - after;
    let abs = if diff < Rational64::from_integer(0) {
        -diff
    } else {
        diff
    };
    ensure(abs <= Rational64::new(1, m), || {
        format!("|grad psi_A| = {abs} > 1/{m} (n={}, e={e})", w.spec().n())
    })
}

/// Disjoint `A`, `B` grown inside one cluster from the two ends of an open
/// edge, never adding a vertex with an open edge to the other set, so that
/// edge is the only open edge between them.
pub fn joined_pair(
    rng: &mut SplitMix64,
    w: &Configuration,
    c: &GiantComponent,
) -> Option<(Vec<VertexId>, Vec<VertexId>)> {
    let spec = w.spec();
    let inner: Vec<EdgeId> = w
        .open_edges()
        .filter(|&e| c.contains(spec.edge_endpoints(e).unwrap().0))
        .collect();
    if inner.is_empty() {
        return None;
    }
    let e = inner[rng.below(inner.len() as u64) as usize];
    let (x, y, _) = spec.edge_endpoints(e).unwrap();
    let mut side = vec![0u8; spec.vertex_count()];
    side[x.0] = 1;
    side[y.0] = 2;
    let mut sets = [vec![x], vec![y]];
    let open_nbrs = |v: VertexId| -> Vec<VertexId> {
        spec.incident_edges(v)
            .unwrap()
            .into_iter()
            .filter(|&f| w.is_open(f))
            .map(|f| {
                let (a, b, _) = spec.edge_endpoints(f).unwrap();
                if a == v {
                    b
                } else {
                    a
                }
            })
            .collect()
    };
    let target = [1 + rng.below(10) as usize, 1 + rng.below(10) as usize];
    for _ in 0..40 {
        let s = rng.below(2) as usize;
        if sets[s].len() >= target[s] {
            continue;
        }
        let from = sets[s][rng.below(sets[s].len() as u64) as usize];
        let own = s as u8 + 1;
        let candidates: Vec<VertexId> = open_nbrs(from)
            .into_iter()
            .filter(|&u| side[u.0] == 0)
            .filter(|&u| {
                open_nbrs(u)
                    .iter()
                    .all(|z| side[z.0] == 0 || side[z.0] == own)
            })
            .collect();
        if let Some(&u) = candidates.get(rng.below(candidates.len().max(1) as u64) as usize) {
            side[u.0] = own;
            sets[s].push(u);
        }
    }
    let [a, b] = sets;
    Some((a, b))
}

/// `|bd(A u B)| = |bd A| + |bd B| - 2` and
/// `psi_{A u B} >= min(psi_A, psi_B) - 2/(|A|+|B|)` on one random instance.
pub fn two_component(rng: &mut SplitMix64) -> Check {
    loop {
        let p = [0.5, 0.7, 0.9][rng.below(3) as usize];
        let w = random_config(rng, (3, 8), p);
        let c = giant_component(&w);
        let Some((a, b)) = joined_pair(rng, &w, &c) else {
            continue;
        };
        let ba = boundary_size(&a, &w, &c).unwrap() as i64;
        let bb = boundary_size(&b, &w, &c).unwrap() as i64;
        let union: Vec<VertexId> = a.iter().chain(&b).copied().collect();
        let bu = boundary_size(&union, &w, &c).unwrap() as i64;
        ensure(bu == ba + bb - 2, || {
            format!("|bd(AuB)| = {bu} but {ba} + {bb} - 2")
        })?;
        let (sa, sb) = (a.len() as i64, b.len() as i64);
        let lhs = Rational64::new(bu, sa + sb);
        let rhs =
            Rational64::new(ba, sa).min(Rational64::new(bb, sb)) - Rational64::new(2, sa + sb);
        return ensure(lhs >= rhs, || format!("psi_(AuB) = {lhs} < {rhs}"));
    }
}

/// Vertices whose coordinate on `axis` lies in `start..start+width` (mod n).
pub fn band(spec: TorusSpec, axis: usize, start: usize, width: usize) -> Vec<VertexId> {
    let n = spec.n();
    (0..spec.vertex_count())
        .map(VertexId)
        .filter(|&v| (spec.coord(v, axis) + n - start) % n < width)
        .collect()
}

/// True when `a` is a band of width `n/2` along some axis.
pub fn is_half_strip(spec: TorusSpec, a: &[VertexId]) -> bool {
    let mut sorted = a.to_vec();
    sorted.sort_unstable();
    (0..spec.d()).any(|axis| (0..spec.n()).any(|s| band(spec, axis, s, spec.n() / 2) == sorted))
}

/// Smallest `psi` over every admissible band of the full torus.
pub fn strip_family_min(w: &Configuration) -> Rational64 {
    let spec = w.spec();
    let c = giant_component(w);
    let mut best: Option<Rational64> = None;
    for axis in 0..spec.d() {
        for width in 1..=spec.n() / 2 {
            let a = band(spec, axis, 0, width);
            let r = Rational64::new(boundary_size(&a, w, &c).unwrap() as i64, a.len() as i64);
            best = Some(best.map_or(r, |b| b.min(r)));
        }
    }
    best.unwrap()
}
