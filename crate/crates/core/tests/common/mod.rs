#![allow(dead_code)]

use isoperc_core::{
    giant_component, sample_configuration, Configuration, GiantComponent, TorusSpec,
};

/// Random giant clusters of brute-forceable size (2 to 24 vertices) from
/// `d = 2`, `n` in {3, 4, 5}, `p` in {0.5, 0.7, 0.9}, spread evenly over the
/// nine cells. Deterministic.
pub fn oracle_corpus(total: usize) -> Vec<(Configuration, GiantComponent)> {
    let cells: Vec<(usize, f64)> = [3, 4, 5]
        .into_iter()
        .flat_map(|n| [0.5, 0.7, 0.9].into_iter().map(move |p| (n, p)))
        .collect();
    let per_cell = total.div_ceil(cells.len());
    let mut out = Vec::new();
    for (i, &(n, p)) in cells.iter().enumerate() {
        let spec = TorusSpec::new(2, n).unwrap();
        let mut taken = 0;
        for k in 0..100_000u64 {
            if taken == per_cell {
                break;
            }
            let seed = ((i as u64) << 32) | k;
            let w = sample_configuration(spec, p, seed).unwrap();
            let c = giant_component(&w);
            if (2..=24).contains(&c.size()) {
                out.push((w, c));
                taken += 1;
            }
        }
        assert_eq!(taken, per_cell, "cell n={n} p={p} too sparse");
    }
    out.truncate(total);
    out
}

pub mod checks;
