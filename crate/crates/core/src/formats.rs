//! Text formats: configuration files, experiment plans, JSON-lines result
//! records and CSV tables. Parsing and rendering only; callers do the I/O.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_rational::Rational64;
use serde::{Deserialize, Serialize};

use crate::cuts::{CheegerResult, Method};
use crate::error::{Error, Result};
use crate::events::{EventConstants, EventReport};
use crate::experiments::{ExperimentPlan, SampleRecord, SummaryStats};
use crate::flips::FlipCase;
use crate::percolation::Configuration;
use crate::torus::{EdgeId, TorusSpec};

pub const CONFIG_MAGIC: &str = "PERC1";

/// `PERC1 d n`, one line of `d n^d` bits in edge-id order, then optional
/// `#` comment lines.
pub fn write_config(omega: &Configuration, comments: &[String]) -> String {
    let spec = omega.spec();
    let mut out = format!("{CONFIG_MAGIC} {} {}\n", spec.d(), spec.n());
    out.extend(omega.bits().map(|b| if b { '1' } else { '0' }));
    out.push('\n');
    for c in comments {
        for line in c.lines() {
            out.push_str("# ");
            out.push_str(line);
            out.push('\n');
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigFile {
    pub omega: Configuration,
    /// Comment lines with the leading `#` and one space removed.
    pub comments: Vec<String>,
}

impl ConfigFile {
    /// Value of a `key=value` token in the comments, e.g. `p` or `seed`.
    pub fn comment_value(&self, key: &str) -> Option<&str> {
        self.comments
            .iter()
            .flat_map(|c| c.split_whitespace())
            .find_map(|tok| tok.strip_prefix(key)?.strip_prefix('='))
    }
}

pub fn parse_config(text: &str) -> Result<ConfigFile> {
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Parse("empty configuration file".into()))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    let [magic, d, n] = fields[..] else {
        return Err(Error::Parse(format!(
            "bad header {header:?}, expected \"PERC1 d n\""
        )));
    };
    if magic != CONFIG_MAGIC {
        return Err(Error::Parse(format!("bad magic {magic:?}")));
    }
    let d: usize = d
        .parse()
        .map_err(|_| Error::Parse(format!("bad dimension {d:?}")))?;
    let n: usize = n
        .parse()
        .map_err(|_| Error::Parse(format!("bad side length {n:?}")))?;
    let spec = TorusSpec::new(d, n)?;
    let body = lines
        .next()
        .ok_or_else(|| Error::Parse("missing configuration body".into()))?;
    let body = body.trim_end();
    if body.len() != spec.edge_count() {
        return Err(Error::Parse(format!(
            "body has {} characters, expected {}",
            body.len(),
            spec.edge_count()
        )));
    }
    let bits = body
        .bytes()
        .enumerate()
        .map(|(i, b)| match b {
            b'0' => Ok(false),
            b'1' => Ok(true),
            _ => Err(Error::Parse(format!("body character {i} is not 0 or 1"))),
        })
        .collect::<Result<Vec<_>>>()?;
    let omega = Configuration::from_bits(spec, &bits)?;
    let mut comments = Vec::new();
    for line in lines {
        if line.trim().is_empty() {
            continue;
        }
        let c = line
            .strip_prefix('#')
            .ok_or_else(|| Error::Parse(format!("unexpected line after body: {line:?}")))?;
        comments.push(c.strip_prefix(' ').unwrap_or(c).to_string());
    }
    Ok(ConfigFile { omega, comments })
}

const PLAN_REQUIRED: [&str; 5] = ["d", "n_list", "p", "samples", "master_seed"];
const PLAN_OPTIONAL: [&str; 4] = [
    "solver_mode",
    "record_gradients",
    "workers",
    "bootstrap_resamples",
];

fn parse_value<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::Parse(format!("key {key:?}: malformed value {value:?}")))
}

/// `key=value` plan file. `n_list` is comma separated; the event constants
/// may be overridden individually by their own keys.
pub fn parse_plan(text: &str) -> Result<ExperimentPlan> {
    let mut kv: BTreeMap<String, String> = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("line {}: expected key=value", lineno + 1)))?;
        let (k, v) = (k.trim(), v.trim());
        let known = PLAN_REQUIRED.contains(&k)
            || PLAN_OPTIONAL.contains(&k)
            || EventConstants::KEYS.contains(&k);
        if !known {
            return Err(Error::Parse(format!("unknown key {k:?}")));
        }
        if kv.insert(k.to_string(), v.to_string()).is_some() {
            return Err(Error::Parse(format!("duplicate key {k:?}")));
        }
    }
    for key in PLAN_REQUIRED {
        if !kv.contains_key(key) {
            return Err(Error::Parse(format!("missing required key {key:?}")));
        }
    }
    let n_list = kv["n_list"]
        .split(',')
        .map(|s| parse_value::<usize>("n_list", s.trim()))
        .collect::<Result<Vec<_>>>()?;
    let mut plan = ExperimentPlan::new(
        parse_value("d", &kv["d"])?,
        n_list,
        parse_value("p", &kv["p"])?,
        parse_value("samples", &kv["samples"])?,
        parse_value("master_seed", &kv["master_seed"])?,
    );
    if let Some(v) = kv.get("solver_mode") {
        plan.solver_mode = v.parse()?;
    }
    if let Some(v) = kv.get("record_gradients") {
        plan.record_gradients = parse_value("record_gradients", v)?;
    }
    if let Some(v) = kv.get("workers") {
        plan.workers = Some(parse_value("workers", v)?);
    }
    if let Some(v) = kv.get("bootstrap_resamples") {
        plan.bootstrap_resamples = parse_value("bootstrap_resamples", v)?;
    }
    for key in EventConstants::KEYS {
        if let Some(v) = kv.get(key) {
            plan.constants.set(key, parse_value(key, v)?)?;
        }
    }
    plan.validate()?;
    Ok(plan)
}

pub fn write_plan(plan: &ExperimentPlan) -> String {
    let list: Vec<String> = plan.n_list.iter().map(usize::to_string).collect();
    let mut out = format!(
        "d={}\nn_list={}\np={}\nsamples={}\nmaster_seed={}\nsolver_mode={}\nrecord_gradients={}\nbootstrap_resamples={}\n",
        plan.d,
        list.join(","),
        plan.p,
        plan.samples,
        plan.master_seed,
        plan.solver_mode,
        plan.record_gradients,
        plan.bootstrap_resamples
    );
    if let Some(w) = plan.workers {
        let _ = writeln!(out, "workers={w}");
    }
    out.push_str(&plan.constants.to_text());
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EventFlags {
    pub h1: bool,
    pub h2: bool,
    pub h3: bool,
    pub h4: bool,
    pub h5: bool,
    pub g: bool,
    pub h_all: bool,
    pub phi_defined: bool,
}

impl From<&EventReport> for EventFlags {
    fn from(r: &EventReport) -> Self {
        Self {
            h1: r.h1,
            h2: r.h2,
            h3: r.h3,
            h4: r.h4,
            h5: r.h5,
            g: r.g,
            h_all: r.h_all,
            phi_defined: r.phi_defined,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GradientEntry {
    pub edge_id: usize,
    pub case: String,
    pub grad_num: Option<i64>,
    pub grad_den: Option<i64>,
}

/// One JSON line of output. `timing_ms` is the only nondeterministic field.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub kind: String,
    pub d: usize,
    pub n: usize,
    pub p: Option<f64>,
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub sample_index: Option<usize>,
    pub phi_num: Option<u64>,
    pub phi_den: Option<u64>,
    pub phi_real: Option<f64>,
    pub giant_size: usize,
    pub max_minimizer_size: Option<usize>,
    pub method: Method,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub optimal: Option<bool>,
    pub events: Option<EventFlags>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub gradients: Option<Vec<GradientEntry>>,
    pub timing_ms: f64,
}

impl ResultRecord {
    pub fn from_solve(
        result: &CheegerResult,
        spec: TorusSpec,
        giant_size: usize,
        p: Option<f64>,
        seed: Option<u64>,
        timing_ms: f64,
    ) -> Self {
        Self {
            kind: "solve".into(),
            d: spec.d(),
            n: spec.n(),
            p,
            seed,
            sample_index: None,
            phi_num: Some(result.phi.num),
            phi_den: Some(result.phi.den),
            phi_real: Some(result.phi.to_f64()),
            giant_size,
            max_minimizer_size: Some(result.max_minimizer_size),
            method: result.method,
            optimal: Some(result.optimal),
            events: None,
            gradients: None,
            timing_ms,
        }
    }

    pub fn from_sample(r: &SampleRecord) -> Self {
        Self {
            kind: "sample".into(),
            d: r.d,
            n: r.n,
            p: Some(r.p),
            seed: Some(r.seed),
            sample_index: Some(r.sample_index),
            phi_num: r.phi.map(|x| x.num),
            phi_den: r.phi.map(|x| x.den),
            phi_real: r.phi_real(),
            giant_size: r.giant_size,
            max_minimizer_size: r.max_minimizer_size,
            method: r.method,
            optimal: None,
            events: Some((&r.events).into()),
            gradients: r.gradients.as_ref().map(|g| {
                g.iter()
                    .map(|e| GradientEntry {
                        edge_id: e.edge.0,
                        case: e.case.label().to_string(),
                        grad_num: e.grad.map(|x| *x.numer()),
                        grad_den: e.grad.map(|x| *x.denom()),
                    })
                    .collect()
            }),
            timing_ms: r.timing_ms,
        }
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("record serialises")
    }
}

/// `edge_id,case,grad_num,grad_den`; an undefined gradient leaves the last
/// two columns empty.
pub fn gradient_csv(
    rows: impl IntoIterator<Item = (EdgeId, FlipCase, Option<Rational64>)>,
) -> String {
    let mut out = String::from("edge_id,case,grad_num,grad_den\n");
    for (e, case, g) in rows {
        match g {
            Some(g) => {
                let _ = writeln!(out, "{},{},{},{}", e.0, case.label(), g.numer(), g.denom());
            }
            None => {
                let _ = writeln!(out, "{},{},,", e.0, case.label());
            }
        }
    }
    out
}

pub fn parse_gradient_csv(text: &str) -> Result<Vec<(EdgeId, FlipCase, Option<Rational64>)>> {
    let mut lines = text.lines();
    if lines.next() != Some("edge_id,case,grad_num,grad_den") {
        return Err(Error::Parse("bad gradient CSV header".into()));
    }
    lines
        .filter(|l| !l.is_empty())
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            let [e, c, num, den] = f[..] else {
                return Err(Error::Parse(format!("bad gradient row {l:?}")));
            };
            let case =
                FlipCase::from_label(c).ok_or_else(|| Error::Parse(format!("bad case {c:?}")))?;
            let grad = match (num, den) {
                ("", "") => None,
                _ => Some(Rational64::new(
                    parse_value("grad_num", num)?,
                    parse_value("grad_den", den)?,
                )),
            };
            Ok((EdgeId(parse_value("edge_id", e)?), case, grad))
        })
        .collect()
}

pub const SUMMARY_COLUMNS: &str = "n,samples,censored,mean_phi,mean_phi_lo,mean_phi_hi,var_phi,var_phi_lo,var_phi_hi,var_phi_streaming,n_mean,scaled_var,scaled_var_lo,scaled_var_hi,n_phi_min,n_phi_max,p_h1,p_h2,p_h3,p_h4,p_h5,p_g,p_h,p_h_lo,p_h_hi,p_h1_fail,sup_grad,sup_scaled_grad_in_hn,talagrand_sum,talagrand_scaled,talagrand_reduced";

fn opt(v: Option<f64>) -> String {
    v.map_or_else(String::new, |x| x.to_string())
}

pub fn summary_csv(rows: &[SummaryStats]) -> String {
    let mut out = String::from(SUMMARY_COLUMNS);
    out.push('\n');
    for s in rows {
        let e = &s.events;
        let t = s.talagrand.as_ref();
        let cells = [
            s.n.to_string(),
            s.samples.to_string(),
            s.censored.to_string(),
            s.mean_phi.estimate.to_string(),
            s.mean_phi.lo.to_string(),
            s.mean_phi.hi.to_string(),
            s.var_phi.estimate.to_string(),
            s.var_phi.lo.to_string(),
            s.var_phi.hi.to_string(),
            s.var_phi_streaming.to_string(),
            s.n_mean.to_string(),
            s.scaled_var.estimate.to_string(),
            s.scaled_var.lo.to_string(),
            s.scaled_var.hi.to_string(),
            s.n_phi_min.to_string(),
            s.n_phi_max.to_string(),
            e.h1.rate.to_string(),
            e.h2.rate.to_string(),
            e.h3.rate.to_string(),
            e.h4.rate.to_string(),
            e.h5.rate.to_string(),
            e.g.rate.to_string(),
            e.h_all.rate.to_string(),
            e.h_all.lo.to_string(),
            e.h_all.hi.to_string(),
            (1.0 - e.h1.rate).to_string(),
            opt(s.sup_grad.map(|g| *g.numer() as f64 / *g.denom() as f64)),
            opt(s.sup_scaled_grad_in_hn),
            opt(t.map(|t| t.full_sum.estimate)),
            opt(t.map(|t| t.scaled_full_sum)),
            opt(t.map(|t| t.reduced_estimate.estimate)),
        ];
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::percolation::sample_configuration;

    #[test]
    fn config_round_trip() {
        let spec = TorusSpec::new(2, 5).unwrap();
        let w = sample_configuration(spec, 0.6, 3).unwrap();
        let text = write_config(&w, &["p=0.6 seed=3".into()]);
        assert!(text.starts_with("PERC1 2 5\n"));
        let back = parse_config(&text).unwrap();
        assert_eq!(back.omega, w);
        assert_eq!(back.comment_value("seed"), Some("3"));
        assert_eq!(back.comment_value("p"), Some("0.6"));
        assert_eq!(back.comment_value("q"), None);
    }

    #[test]
    fn config_errors() {
        assert!(parse_config("").is_err());
        assert!(parse_config("PERC2 2 3\n").is_err());
        assert!(parse_config("PERC1 2 3\n0101\n").is_err());
        assert!(parse_config(&format!("PERC1 2 3\n{}\n", "2".repeat(18))).is_err());
        assert!(parse_config(&format!("PERC1 2 3\n{}\nextra\n", "0".repeat(18))).is_err());
        assert!(parse_config(&format!("PERC1 2 2\n{}\n", "0".repeat(8))).is_err());
        assert!(parse_config(&format!("PERC1 2 3\n{}\n\n# ok\n", "1".repeat(18))).is_ok());
    }

    const MINIMAL: &str = "d=2\nn_list=5,6\np=0.7\nsamples=10\nmaster_seed=42\n";

    #[test]
    fn plan_defaults() {
        let plan = parse_plan(MINIMAL).unwrap();
        assert_eq!(plan.n_list, vec![5, 6]);
        assert_eq!(plan.solver_mode, Method::Exact);
        assert!(!plan.record_gradients);
        assert_eq!(plan.constants, EventConstants::default());
        assert_eq!(parse_plan(&write_plan(&plan)).unwrap(), plan);
    }

    #[test]
    fn plan_errors() {
        let missing = MINIMAL.replace("p=0.7\n", "");
        let err = parse_plan(&missing).unwrap_err().to_string();
        assert!(err.contains("\"p\""), "{err}");
        assert!(parse_plan(&MINIMAL.replace("5,6", "2,5")).is_err());
        assert!(parse_plan(&format!("{MINIMAL}colour=blue\n")).is_err());
        assert!(parse_plan(&format!("{MINIMAL}d=3\n")).is_err());
        assert!(parse_plan(&MINIMAL.replace("samples=10", "samples=ten")).is_err());
        let over = parse_plan(&format!(
            "{MINIMAL}c4=0.02\nsolver_mode=brute\nrecord_gradients=true\n"
        ))
        .unwrap();
        assert_eq!(over.constants.c4, 0.02);
        assert_eq!(over.solver_mode, Method::Brute);
        assert!(over.record_gradients);
    }

    #[test]
    fn gradient_csv_round_trip() {
        let rows = vec![
            (EdgeId(0), FlipCase::Case3, Some(Rational64::new(-1, 12))),
            (
                EdgeId(1),
                FlipCase::Case1,
                Some(Rational64::from_integer(0)),
            ),
            (EdgeId(2), FlipCase::Case4b, None),
        ];
        let text = gradient_csv(rows.clone());
        assert!(text.contains("0,3,-1,12\n"));
        assert!(text.contains("2,4b,,\n"));
        assert_eq!(parse_gradient_csv(&text).unwrap(), rows);
    }
}
