//! Sample statistics: two-pass and streaming variance, percentile bootstrap,
//! and Wilson intervals for binomial rates.

use serde::{Deserialize, Serialize};

use crate::rng::SplitMix64;

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Unbiased sample variance by the two-pass formula; `NaN` below two points.
pub fn variance(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return f64::NAN;
    }
    let m = mean(xs);
    xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() - 1) as f64
}

/// Welford's single-pass mean and variance.
#[derive(Debug, Clone, Copy, Default)]
pub struct Welford {
    count: u64,
    mean: f64,
    m2: f64,
}

impl Welford {
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            f64::NAN
        } else {
            self.m2 / (self.count - 1) as f64
        }
    }
}

/// A point estimate with a 95% interval and a standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub estimate: f64,
    pub lo: f64,
    pub hi: f64,
    pub se: f64,
}

/// Percentile bootstrap over resamples of `rows` (indices drawn with
/// replacement). `stat` sees the resampled index list. The interval is
/// widened to contain the point estimate if needed.
pub fn bootstrap<F>(rows: usize, resamples: usize, seed: u64, stat: F) -> Interval
where
    F: Fn(&[usize]) -> f64,
{
    let identity: Vec<usize> = (0..rows).collect();
    let estimate = stat(&identity);
    if rows == 0 || resamples == 0 {
        return Interval {
            estimate,
            lo: estimate,
            hi: estimate,
            se: 0.0,
        };
    }
    let mut rng = SplitMix64::new(seed);
    let mut idx = vec![0usize; rows];
    let mut values = Vec::with_capacity(resamples);
    for _ in 0..resamples {
        for slot in idx.iter_mut() {
            *slot = rng.below(rows as u64) as usize;
        }
        values.push(stat(&idx));
    }
    let se = variance(&values).sqrt();
    values.sort_by(f64::total_cmp);
    let q = |p: f64| values[((p * (resamples - 1) as f64).round() as usize).min(resamples - 1)];
    Interval {
        estimate,
        lo: q(0.025).min(estimate),
        hi: q(0.975).max(estimate),
        se: if se.is_nan() { 0.0 } else { se },
    }
}

/// A binomial rate with its 95% Wilson score interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Frequency {
    pub count: usize,
    pub trials: usize,
    pub rate: f64,
    pub lo: f64,
    pub hi: f64,
}

pub fn wilson(count: usize, trials: usize) -> Frequency {
    const Z: f64 = 1.959_963_984_540_054;
    if trials == 0 {
        return Frequency {
            count,
            trials,
            rate: f64::NAN,
            lo: 0.0,
            hi: 1.0,
        };
    }
    let n = trials as f64;
    let p = count as f64 / n;
    let z2 = Z * Z;
    let centre = (p + z2 / (2.0 * n)) / (1.0 + z2 / n);
    let half = Z / (1.0 + z2 / n) * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    Frequency {
        count,
        trials,
        rate: p,
        lo: (centre - half).clamp(0.0, p),
        hi: (centre + half).clamp(p, 1.0),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn variance_agrees_with_streaming() {
        let mut g = SplitMix64::new(3);
        let xs: Vec<f64> = (0..5000).map(|_| 0.2 + 0.01 * g.next_f64()).collect();
        let mut w = Welford::default();
        xs.iter().for_each(|&x| w.push(x));
        let (a, b) = (variance(&xs), w.variance());
        assert!((a - b).abs() <= 1e-12 * a);
        assert!((mean(&xs) - w.mean()).abs() < 1e-15);
    }

    #[test]
    fn constant_data() {
        let xs = [0.5; 10];
        assert_eq!(variance(&xs), 0.0);
        let ci = bootstrap(xs.len(), 200, 1, |idx| {
            variance(&idx.iter().map(|&i| xs[i]).collect::<Vec<_>>())
        });
        assert_eq!((ci.lo, ci.hi, ci.se), (0.0, 0.0, 0.0));
    }

    #[test]
    fn bootstrap_contains_estimate_and_is_seeded() {
        let xs: Vec<f64> = (0..50).map(|i| (i * i % 17) as f64).collect();
        let f = |idx: &[usize]| mean(&idx.iter().map(|&i| xs[i]).collect::<Vec<_>>());
        let a = bootstrap(xs.len(), 1000, 9, f);
        assert!(a.lo <= a.estimate && a.estimate <= a.hi && a.se > 0.0);
        assert_eq!(a, bootstrap(xs.len(), 1000, 9, f));
    }

    #[test]
    fn wilson_reference() {
        // Standard worked value: 8 of 10 gives roughly [0.490, 0.943].
        let f = wilson(8, 10);
        assert!((f.lo - 0.4902).abs() < 1e-3 && (f.hi - 0.9433).abs() < 1e-3);
        let all = wilson(20, 20);
        assert_eq!(all.hi, 1.0);
        assert!(all.lo < 1.0 && all.lo > 0.8);
        assert_eq!(wilson(0, 20).lo, 0.0);
    }
}
