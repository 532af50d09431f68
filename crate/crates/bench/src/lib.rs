//! Fixed workloads shared by the benchmarks.

use isoperc_core::{
    giant_component, sample_configuration, Configuration, GiantComponent, TorusSpec,
};

/// The first `count` seeds from `base` whose giant cluster has at least
/// `min_size` vertices, for a `d = 2` torus of side `n` at density `p`.
pub fn clusters(
    n: usize,
    p: f64,
    base: u64,
    count: usize,
    min_size: usize,
) -> Vec<(Configuration, GiantComponent)> {
    let spec = TorusSpec::new(2, n).expect("valid torus");
    (base..)
        .map(|seed| {
            let w = sample_configuration(spec, p, seed).expect("valid density");
            let c = giant_component(&w);
            (w, c)
        })
        .filter(|(_, c)| c.size() >= min_size)
        .take(count)
        .collect()
}
