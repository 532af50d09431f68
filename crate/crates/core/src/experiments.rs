//! Reproducible Monte Carlo campaigns over a list of torus sizes.
//!
//! Every sample is a pure function of `(master_seed, n, sample index)`, and
//! results are reduced in sample order, so the output does not depend on the
//! worker count.

use std::time::Instant;

use num_rational::Rational64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cuts::{ExactRatio, Method};
use crate::error::{Error, Result};
use crate::events::{EventConstants, EventReport, FlipAnalysis};
use crate::flips::FlipCase;
use crate::percolation::sample_configuration;
use crate::rng::{mix64, stream_at};
use crate::stats::{bootstrap, mean, variance, wilson, Frequency, Interval, Welford};
use crate::torus::{EdgeId, TorusSpec};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentPlan {
    pub d: usize,
    pub n_list: Vec<usize>,
    pub p: f64,
    pub samples: usize,
    pub master_seed: u64,
    pub constants: EventConstants,
    pub solver_mode: Method,
    pub record_gradients: bool,
    /// Thread count; `None` uses the global pool. Never affects results.
    pub workers: Option<usize>,
    pub bootstrap_resamples: usize,
}

impl ExperimentPlan {
    pub fn new(d: usize, n_list: Vec<usize>, p: f64, samples: usize, master_seed: u64) -> Self {
        Self {
            d,
            n_list,
            p,
            samples,
            master_seed,
            constants: EventConstants::default(),
            solver_mode: Method::Exact,
            record_gradients: false,
            workers: None,
            bootstrap_resamples: 1000,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.samples < 2 {
            return Err(Error::Parse(format!(
                "samples must be at least 2, got {}",
                self.samples
            )));
        }
        if self.n_list.is_empty() {
            return Err(Error::Parse("n_list is empty".into()));
        }
        for &n in &self.n_list {
            TorusSpec::new(self.d, n)?;
        }
        if !(0.0..=1.0).contains(&self.p) {
            return Err(Error::InvalidProbability(self.p));
        }
        if self.workers == Some(0) {
            return Err(Error::Parse("workers must be positive".into()));
        }
        self.constants.validate()
    }

    /// Seed of sample `index` at side length `n`.
    pub fn sample_seed(&self, n: usize, index: usize) -> u64 {
        stream_at(stream_at(self.master_seed, n as u64), index as u64)
    }

    fn bootstrap_seed(&self, n: usize, stream: u64) -> u64 {
        mix64(self.sample_seed(n, usize::MAX) ^ stream)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeGradient {
    pub edge: EdgeId,
    pub case: FlipCase,
    /// `phi(omega) - phi(omega^e)`; `None` if either side is undefined.
    pub grad: Option<Rational64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleRecord {
    pub d: usize,
    pub n: usize,
    pub p: f64,
    pub sample_index: usize,
    pub seed: u64,
    pub giant_size: usize,
    pub phi: Option<ExactRatio>,
    pub max_minimizer_size: Option<usize>,
    pub method: Method,
    pub events: EventReport,
    /// Largest `|grad_e phi|` over the sample's edges.
    pub max_abs_grad: Option<Rational64>,
    pub gradients: Option<Vec<EdgeGradient>>,
    pub timing_ms: f64,
}

impl SampleRecord {
    pub fn phi_real(&self) -> Option<f64> {
        self.phi.map(ExactRatio::to_f64)
    }
}

fn abs(r: Rational64) -> Rational64 {
    if r < Rational64::from_integer(0) {
        -r
    } else {
        r
    }
}

fn to_f64(r: Rational64) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

fn run_sample(plan: &ExperimentPlan, spec: TorusSpec, index: usize) -> Result<SampleRecord> {
    let start = Instant::now();
    let n = spec.n();
    let seed = plan.sample_seed(n, index);
    let omega = sample_configuration(spec, plan.p, seed)?;
    let analysis = FlipAnalysis::compute(&omega, plan.solver_mode)?;
    let events = analysis.events(&plan.constants);

    let gradients: Vec<EdgeGradient> = analysis
        .gradients()
        .map(|(edge, case, grad)| EdgeGradient { edge, case, grad })
        .collect();
    let max_abs_grad = gradients.iter().filter_map(|g| g.grad.map(abs)).max();
    // phi lies in (0, 2d], so no single flip can move it by more than 4d.
    let cap = Rational64::from_integer(4 * spec.d() as i64);
    if let Some(m) = max_abs_grad.filter(|m| *m > cap) {
        return Err(Error::Invariant(format!(
            "n={n} sample {index}: |grad phi| = {m} exceeds 4d"
        )));
    }

    Ok(SampleRecord {
        d: spec.d(),
        n,
        p: plan.p,
        sample_index: index,
        seed,
        giant_size: analysis.giant_size,
        phi: analysis.base.map(|b| b.phi),
        max_minimizer_size: analysis.base.map(|b| b.max_minimizer_size),
        method: plan.solver_mode,
        events,
        max_abs_grad,
        gradients: plan.record_gradients.then_some(gradients),
        timing_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}

/// Draws every sample of the plan, in `(n, sample index)` order.
pub fn run_samples(plan: &ExperimentPlan) -> Result<Vec<SampleRecord>> {
    plan.validate()?;
    let work = || -> Result<Vec<SampleRecord>> {
        let mut out = Vec::with_capacity(plan.n_list.len() * plan.samples);
        for &n in &plan.n_list {
            let spec = TorusSpec::new(plan.d, n)?;
            let batch = (0..plan.samples)
                .into_par_iter()
                .map(|i| run_sample(plan, spec, i))
                .collect::<Result<Vec<_>>>()?;
            out.extend(batch);
        }
        Ok(out)
    };
    match plan.workers {
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build()
            .map_err(|e| Error::Invariant(format!("thread pool: {e}")))?
            .install(work),
        None => work(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventFrequencies {
    pub h1: Frequency,
    pub h2: Frequency,
    pub h3: Frequency,
    pub h4: Frequency,
    pub h5: Frequency,
    pub g: Frequency,
    pub h_all: Frequency,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TalagrandSummary {
    /// `sum_e ||grad_e||_2^2 / (1 + ln(||grad_e||_2 / ||grad_e||_1))`.
    pub full_sum: Interval,
    /// `sum_e ||grad_e||_2^2`, the same sum without the log correction.
    pub naive_sum: Interval,
    /// `d n^d ||grad_e0||_2^2` with `e0` the edge with id 0.
    pub reduced_estimate: Interval,
    /// `d n^d ||grad_e0||_2^2 / (1 + ln(||grad_e0||_2 / ||grad_e0||_1))`.
    pub reduced_corrected: Interval,
    /// `n^d * full_sum`.
    pub scaled_full_sum: f64,
    /// Bootstrap standard error of `full_sum - reduced_estimate`.
    pub difference_se: f64,
    /// Bootstrap standard error of `naive_sum - reduced_estimate`.
    pub naive_difference_se: f64,
    /// Bootstrap standard error of `full_sum - reduced_corrected`.
    pub corrected_difference_se: f64,
    pub max_norm_ratio: f64,
}

/// Gradient magnitudes of one flip case, binned by `n^d |grad|`: bin 0 holds
/// exact zeros, bin 1 holds `(0, 1/2]`, bin `k > 1` holds
/// `(2^(k-3), 2^(k-2)]`, and the last bin is open-ended.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseTail {
    pub case: FlipCase,
    pub count: usize,
    pub nonzero: usize,
    pub max_abs: Option<Rational64>,
    pub histogram: Vec<usize>,
}

pub const TAIL_BINS: usize = 8;

fn tail_bin(scaled: f64) -> usize {
    if scaled == 0.0 {
        return 0;
    }
    let mut bin = 1;
    let mut edge = 0.5;
    while scaled > edge && bin < TAIL_BINS - 1 {
        bin += 1;
        edge *= 2.0;
    }
    bin
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GradientTails {
    pub max_abs: Option<Rational64>,
    /// Largest `n^d |grad_e phi|` over samples in `H_n`.
    pub max_scaled_in_hn: Option<f64>,
    pub per_case: Vec<CaseTail>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryStats {
    pub n: usize,
    pub samples: usize,
    pub censored: usize,
    pub mean_phi: Interval,
    /// Unbiased, two-pass.
    pub var_phi: Interval,
    /// Welford estimate of the same variance, as a cross-check.
    pub var_phi_streaming: f64,
    pub n_mean: f64,
    pub scaled_var: Interval,
    /// Observed range of `n phi`.
    pub n_phi_min: f64,
    pub n_phi_max: f64,
    pub events: EventFrequencies,
    pub sup_grad: Option<Rational64>,
    pub sup_scaled_grad_in_hn: Option<f64>,
    pub talagrand: Option<TalagrandSummary>,
    pub tails: Option<GradientTails>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentOutput {
    pub plan: ExperimentPlan,
    pub records: Vec<SampleRecord>,
    pub summaries: Vec<SummaryStats>,
}

pub fn run_experiment(plan: &ExperimentPlan) -> Result<ExperimentOutput> {
    let records = run_samples(plan)?;
    let summaries = plan
        .n_list
        .iter()
        .map(|&n| {
            let rows: Vec<&SampleRecord> = records.iter().filter(|r| r.n == n).collect();
            summarize(plan, n, &rows)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ExperimentOutput {
        plan: plan.clone(),
        records,
        summaries,
    })
}

fn event_frequencies(rows: &[&SampleRecord]) -> EventFrequencies {
    let count = |f: fn(&EventReport) -> bool| {
        wilson(rows.iter().filter(|r| f(&r.events)).count(), rows.len())
    };
    EventFrequencies {
        h1: count(|e| e.h1),
        h2: count(|e| e.h2),
        h3: count(|e| e.h3),
        h4: count(|e| e.h4),
        h5: count(|e| e.h5),
        g: count(|e| e.g),
        h_all: count(|e| e.h_all),
    }
}

/// Per-n statistics from that n's records (in sample order).
pub fn summarize(plan: &ExperimentPlan, n: usize, rows: &[&SampleRecord]) -> Result<SummaryStats> {
    let volume = (n as f64).powi(plan.d as i32);
    let phis: Vec<f64> = rows.iter().filter_map(|r| r.phi_real()).collect();
    if phis.len() < 2 {
        return Err(Error::Censored {
            n,
            defined: phis.len(),
        });
    }
    let mut w = Welford::default();
    phis.iter().for_each(|&x| w.push(x));
    let resamples = plan.bootstrap_resamples;
    let pick = |idx: &[usize]| -> Vec<f64> { idx.iter().map(|&i| phis[i]).collect() };
    let mean_phi = bootstrap(phis.len(), resamples, plan.bootstrap_seed(n, 1), |idx| {
        mean(&pick(idx))
    });
    let var_phi = bootstrap(phis.len(), resamples, plan.bootstrap_seed(n, 2), |idx| {
        variance(&pick(idx))
    });
    let scale = |i: Interval, s: f64| Interval {
        estimate: i.estimate * s,
        lo: i.lo * s,
        hi: i.hi * s,
        se: i.se * s,
    };
    let n_phis: Vec<f64> = phis.iter().map(|x| x * n as f64).collect();

    let sup_grad = rows.iter().filter_map(|r| r.max_abs_grad).max();
    let sup_scaled_grad_in_hn = rows
        .iter()
        .filter(|r| r.events.h_all)
        .filter_map(|r| r.max_abs_grad)
        .max()
        .map(|m| to_f64(m) * volume);

    let (talagrand, tails) = if plan.record_gradients {
        (
            Some(talagrand(plan, n, rows)?),
            Some(gradient_tails(n, plan.d, rows)),
        )
    } else {
        (None, None)
    };

    Ok(SummaryStats {
        n,
        samples: rows.len(),
        censored: rows.len() - phis.len(),
        mean_phi,
        var_phi,
        var_phi_streaming: w.variance(),
        n_mean: mean_phi.estimate * n as f64,
        scaled_var: scale(var_phi, volume),
        n_phi_min: n_phis.iter().copied().fold(f64::INFINITY, f64::min),
        n_phi_max: n_phis.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        events: event_frequencies(rows),
        sup_grad,
        sup_scaled_grad_in_hn,
        talagrand,
        tails,
    })
}

/// Per-sample, per-edge gradients as reals; `NaN` where undefined. Samples
/// with undefined `phi` are dropped.
fn gradient_matrix(rows: &[&SampleRecord]) -> Result<Vec<Vec<f64>>> {
    rows.iter()
        .filter(|r| r.phi.is_some())
        .map(|r| {
            let g = r
                .gradients
                .as_ref()
                .ok_or_else(|| Error::Invariant("no gradient records".into()))?;
            Ok(g.iter().map(|e| e.grad.map_or(f64::NAN, to_f64)).collect())
        })
        .collect()
}

struct EdgeNorms {
    /// `E[grad^2]` per edge.
    sq: Vec<f64>,
    /// `E[|grad|]` per edge.
    abs: Vec<f64>,
}

fn edge_norms(m: &[Vec<f64>], idx: &[usize]) -> EdgeNorms {
    let edges = m.first().map_or(0, Vec::len);
    let mut sq = vec![0.0; edges];
    let mut ab = vec![0.0; edges];
    let mut cnt = vec![0usize; edges];
    for &i in idx {
        for (e, &g) in m[i].iter().enumerate() {
            if !g.is_nan() {
                sq[e] += g * g;
                ab[e] += g.abs();
                cnt[e] += 1;
            }
        }
    }
    for e in 0..edges {
        if cnt[e] > 0 {
            sq[e] /= cnt[e] as f64;
            ab[e] /= cnt[e] as f64;
        }
    }
    EdgeNorms { sq, abs: ab }
}

fn talagrand_terms(norms: &EdgeNorms) -> (f64, f64) {
    let mut full = 0.0;
    let mut max_ratio: f64 = 1.0;
    for (&sq, &ab) in norms.sq.iter().zip(&norms.abs) {
        if ab == 0.0 {
            continue;
        }
        // >= 1 by Cauchy-Schwarz; the clamp only absorbs rounding.
        let ratio = (sq.sqrt() / ab).max(1.0);
        max_ratio = max_ratio.max(ratio);
        full += sq / (1.0 + ratio.ln());
    }
    (full, max_ratio)
}

fn talagrand(plan: &ExperimentPlan, n: usize, rows: &[&SampleRecord]) -> Result<TalagrandSummary> {
    let m = gradient_matrix(rows)?;
    if m.is_empty() {
        return Err(Error::Invariant("no gradient records".into()));
    }
    let edges = m[0].len() as f64;
    let volume = (n as f64).powi(plan.d as i32);
    let full_of = |idx: &[usize]| talagrand_terms(&edge_norms(&m, idx)).0;
    let naive_of = |idx: &[usize]| edge_norms(&m, idx).sq.iter().sum::<f64>();
    let e0 = |idx: &[usize]| -> (f64, f64) {
        let g: Vec<f64> = idx
            .iter()
            .map(|&i| m[i][0])
            .filter(|g| !g.is_nan())
            .collect();
        if g.is_empty() {
            return (0.0, 0.0);
        }
        let k = g.len() as f64;
        (
            g.iter().map(|x| x * x).sum::<f64>() / k,
            g.iter().map(|x| x.abs()).sum::<f64>() / k,
        )
    };
    let reduced_of = |idx: &[usize]| edges * e0(idx).0;
    let corrected_of = |idx: &[usize]| {
        let (sq, ab) = e0(idx);
        edges
            * talagrand_terms(&EdgeNorms {
                sq: vec![sq],
                abs: vec![ab],
            })
            .0
    };
    let r = plan.bootstrap_resamples;
    let seed = |k| plan.bootstrap_seed(n, k);
    let rows_n = m.len();
    let all: Vec<usize> = (0..rows_n).collect();
    let (_, max_norm_ratio) = talagrand_terms(&edge_norms(&m, &all));
    let full_sum = bootstrap(rows_n, r, seed(3), full_of);
    Ok(TalagrandSummary {
        full_sum,
        naive_sum: bootstrap(rows_n, r, seed(4), naive_of),
        reduced_estimate: bootstrap(rows_n, r, seed(5), reduced_of),
        reduced_corrected: bootstrap(rows_n, r, seed(6), corrected_of),
        scaled_full_sum: volume * full_sum.estimate,
        difference_se: bootstrap(rows_n, r, seed(7), |i| full_of(i) - reduced_of(i)).se,
        naive_difference_se: bootstrap(rows_n, r, seed(8), |i| naive_of(i) - reduced_of(i)).se,
        corrected_difference_se: bootstrap(rows_n, r, seed(9), |i| full_of(i) - corrected_of(i)).se,
        max_norm_ratio,
    })
}

fn gradient_tails(n: usize, d: usize, rows: &[&SampleRecord]) -> GradientTails {
    let volume = (n as f64).powi(d as i32);
    let mut per_case: Vec<CaseTail> = FlipCase::ALL
        .iter()
        .map(|&case| CaseTail {
            case,
            count: 0,
            nonzero: 0,
            max_abs: None,
            histogram: vec![0; TAIL_BINS],
        })
        .collect();
    for r in rows {
        for g in r.gradients.iter().flatten() {
            let Some(v) = g.grad.map(abs) else { continue };
            let t = &mut per_case[g.case.index()];
            t.count += 1;
            if v != Rational64::from_integer(0) {
                t.nonzero += 1;
            }
            t.max_abs = t.max_abs.max(Some(v));
            t.histogram[tail_bin(to_f64(v) * volume)] += 1;
        }
    }
    GradientTails {
        max_abs: rows.iter().filter_map(|r| r.max_abs_grad).max(),
        max_scaled_in_hn: rows
            .iter()
            .filter(|r| r.events.h_all)
            .filter_map(|r| r.max_abs_grad)
            .max()
            .map(|m| to_f64(m) * volume),
        per_case,
    }
}

/// Per-n mean and variance of `phi` with bootstrap intervals.
pub fn run_variance_experiment(plan: &ExperimentPlan) -> Result<Vec<SummaryStats>> {
    Ok(run_experiment(plan)?.summaries)
}

/// Per-n event frequencies with Wilson intervals.
pub fn estimate_event_probabilities(
    plan: &ExperimentPlan,
) -> Result<Vec<(usize, EventFrequencies)>> {
    Ok(run_experiment(plan)?
        .summaries
        .into_iter()
        .map(|s| (s.n, s.events))
        .collect())
}

fn with_gradients(plan: &ExperimentPlan) -> Result<ExperimentOutput> {
    if !plan.record_gradients {
        return Err(Error::Parse("record_gradients must be enabled".into()));
    }
    run_experiment(plan)
}

pub fn talagrand_diagnostic(plan: &ExperimentPlan) -> Result<Vec<(usize, TalagrandSummary)>> {
    if plan.solver_mode == Method::Heuristic {
        return Err(Error::Parse(
            "the diagnostic needs an optimal solver mode".into(),
        ));
    }
    with_gradients(plan)?
        .summaries
        .into_iter()
        .map(|s| {
            let t = s
                .talagrand
                .ok_or_else(|| Error::Invariant("no gradient records".into()))?;
            Ok((s.n, t))
        })
        .collect()
}

pub fn gradient_tail_summary(plan: &ExperimentPlan) -> Result<Vec<(usize, GradientTails)>> {
    with_gradients(plan)?
        .summaries
        .into_iter()
        .map(|s| {
            let t = s
                .tails
                .ok_or_else(|| Error::Invariant("no gradient records".into()))?;
            Ok((s.n, t))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_torus_is_deterministic() {
        let mut plan = ExperimentPlan::new(2, vec![4], 1.0, 3, 11);
        plan.record_gradients = true;
        plan.bootstrap_resamples = 50;
        let out = run_experiment(&plan).unwrap();
        let s = &out.summaries[0];
        assert_eq!(s.var_phi.estimate, 0.0);
        assert_eq!(s.mean_phi.estimate, 1.0);
        let t = s.talagrand.as_ref().unwrap();
        assert_eq!(t.full_sum.estimate, 0.5);
        assert_eq!(t.reduced_estimate.estimate, 0.5);
        assert_eq!(t.reduced_corrected.estimate, 0.5);
        assert_eq!(t.naive_sum.estimate, 0.5);
        assert_eq!(t.max_norm_ratio, 1.0);
        assert_eq!(s.events.h1.rate, 1.0);
        let tails = s.tails.as_ref().unwrap();
        assert_eq!(tails.max_abs, Some(Rational64::new(1, 8)));
        assert_eq!(tails.per_case[FlipCase::Case4a.index()].count, 3 * 32);
    }

    #[test]
    fn closed_torus_is_censored() {
        let plan = ExperimentPlan::new(2, vec![5], 0.0, 4, 1);
        let out = run_experiment(&plan);
        assert!(matches!(out, Err(Error::Censored { n: 5, defined: 0 })));
        let recs = run_samples(&plan).unwrap();
        assert!(recs.iter().all(|r| !r.events.h1 && r.phi.is_none()));
    }

    #[test]
    fn worker_count_does_not_matter() {
        let mut plan = ExperimentPlan::new(2, vec![3, 4], 0.6, 6, 5);
        plan.bootstrap_resamples = 20;
        plan.workers = Some(1);
        let a = run_experiment(&plan).unwrap();
        plan.workers = Some(3);
        let mut b = run_experiment(&plan).unwrap();
        b.plan.workers = Some(1);
        for (x, y) in a.records.iter().zip(b.records.iter_mut()) {
            y.timing_ms = x.timing_ms;
        }
        assert_eq!(a, b);
    }

    #[test]
    fn tail_bins() {
        assert_eq!(tail_bin(0.0), 0);
        assert_eq!(tail_bin(0.3), 1);
        assert_eq!(tail_bin(1.0), 2);
        assert_eq!(tail_bin(1.5), 3);
        assert_eq!(tail_bin(1e9), TAIL_BINS - 1);
    }

    #[test]
    fn plan_validation() {
        assert!(ExperimentPlan::new(2, vec![2], 0.5, 10, 0)
            .validate()
            .is_err());
        assert!(ExperimentPlan::new(2, vec![4], 0.5, 1, 0)
            .validate()
            .is_err());
        assert!(ExperimentPlan::new(2, vec![4], 1.5, 10, 0)
            .validate()
            .is_err());
        assert!(ExperimentPlan::new(2, vec![4], 0.5, 10, 0)
            .validate()
            .is_ok());
    }
}
