use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn isoperc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_isoperc"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn error_line(out: &Output) -> Value {
    let text = String::from_utf8(out.stderr.clone()).unwrap();
    assert_eq!(text.lines().count(), 1, "{text}");
    serde_json::from_str(text.trim()).unwrap()
}

#[test]
fn sample_then_solve_full_torus() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("w.cfg");
    let out = isoperc(&[
        "sample",
        "--d",
        "2",
        "--n",
        "4",
        "--p",
        "1",
        "--seed",
        "7",
        "--out",
        path(&cfg),
    ]);
    assert!(out.status.success());
    for mode in [
        &["--exact"][..],
        &["--mode", "brute"],
        &["--mode", "heuristic"],
    ] {
        let mut args = vec!["solve", "--in", path(&cfg)];
        args.extend_from_slice(mode);
        let out = isoperc(&args);
        assert!(out.status.success());
        let rec: Value = serde_json::from_slice(&out.stdout).unwrap();
        assert_eq!(rec["phi_num"], 1);
        assert_eq!(rec["phi_den"], 1);
        assert_eq!(rec["seed"], 7);
        assert_eq!(rec["giant_size"], 16);
    }
}

#[test]
fn undefined_phi_exits_4() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("w.cfg");
    isoperc(&[
        "sample",
        "--d",
        "2",
        "--n",
        "4",
        "--p",
        "0",
        "--seed",
        "1",
        "--out",
        path(&cfg),
    ]);
    let out = isoperc(&["solve", "--in", path(&cfg)]);
    assert_eq!(out.status.code(), Some(4));
    let e = error_line(&out);
    assert_eq!(e["message"], "phi undefined: giant component has size 1");
}

#[test]
fn guard_exits_3_with_value() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("w.cfg");
    isoperc(&[
        "sample",
        "--d",
        "2",
        "--n",
        "6",
        "--p",
        "1",
        "--seed",
        "1",
        "--out",
        path(&cfg),
    ]);
    let out = isoperc(&["solve", "--in", path(&cfg), "--mode", "brute"]);
    assert_eq!(out.status.code(), Some(3));
    let e = error_line(&out);
    assert_eq!(e["guard"]["value"], 36);
    assert_eq!(e["guard"]["limit"], 24);
}

#[test]
fn usage_errors_exit_2() {
    let out = isoperc(&["solve", "--in", "x.cfg", "--mode", "fast"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(error_line(&out)["error"], "usage");
    assert_eq!(isoperc(&["frobnicate"]).status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    fs::write(&cfg, "PERC1 2 3\n0101\n").unwrap();
    let out = isoperc(&["solve", "--in", path(&cfg)]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(error_line(&out)["error"], "parse_error");
    assert!(isoperc(&["--help"]).status.success());
}

#[test]
fn missing_file_exits_1() {
    let out = isoperc(&["solve", "--in", "/nonexistent/w.cfg"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(error_line(&out)["error"], "io");
}

#[test]
fn gradient_events_profile() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("w.cfg");
    isoperc(&[
        "sample",
        "--d",
        "2",
        "--n",
        "4",
        "--p",
        "1",
        "--seed",
        "3",
        "--out",
        path(&cfg),
    ]);

    let csv = dir.path().join("g.csv");
    assert!(isoperc(&[
        "gradient",
        "--in",
        path(&cfg),
        "--mode",
        "exact",
        "--out",
        path(&csv)
    ])
    .status
    .success());
    let text = fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("edge_id,case,grad_num,grad_den"));
    assert_eq!(lines.clone().count(), 32);
    assert!(lines.all(|l| l.ends_with(",4a,1,8")));

    let consts = dir.path().join("k.txt");
    fs::write(
        &consts,
        "c1=0.4\nc2=0.1\nc3=10\nc4=0.01\nc5=0.01\nc6=0.1\nC_claim=16\n",
    )
    .unwrap();
    let ev = dir.path().join("e.json");
    let out = isoperc(&[
        "events",
        "--in",
        path(&cfg),
        "--constants",
        path(&consts),
        "--mode",
        "exact",
        "--out",
        path(&ev),
    ]);
    assert!(out.status.success());
    let report: Value = serde_json::from_str(&fs::read_to_string(&ev).unwrap()).unwrap();
    for key in ["h1", "h2", "h3", "h4", "h5", "g", "h_all"] {
        assert_eq!(report[key], true, "{key}");
    }
    fs::write(&consts, "c1=0.4\nbogus=1\n").unwrap();
    assert_eq!(
        isoperc(&["events", "--in", path(&cfg), "--constants", path(&consts)])
            .status
            .code(),
        Some(2)
    );

    let out = isoperc(&["profile", "--in", path(&cfg), "--epsilon", "2"]);
    let prof: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!((prof["value"].as_f64().unwrap() - 2.0 * 2f64.sqrt()).abs() < 1e-9);
    let out = isoperc(&["profile", "--in", path(&cfg), "--epsilon", "auto"]);
    let prof: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!((prof["epsilon"].as_f64().unwrap() - 2.942_467_254_110_204_6).abs() < 1e-12);
    assert_eq!(
        isoperc(&["profile", "--in", path(&cfg), "--epsilon", "1"])
            .status
            .code(),
        Some(2)
    );
}

fn strip_timing(jsonl: &str) -> Vec<Value> {
    jsonl
        .lines()
        .map(|l| {
            let mut v: Value = serde_json::from_str(l).unwrap();
            v.as_object_mut().unwrap().remove("timing_ms");
            v
        })
        .collect()
}

#[test]
fn experiment_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let plan = dir.path().join("plan.txt");
    let base = "d=2\nn_list=3,4\np=0.7\nsamples=6\nmaster_seed=99\nrecord_gradients=true\nbootstrap_resamples=50\n";
    let mut runs = Vec::new();
    for workers in [1, 2] {
        fs::write(&plan, format!("{base}workers={workers}\n")).unwrap();
        let out_dir = dir.path().join(format!("run{workers}"));
        let out = isoperc(&[
            "experiment",
            "--plan",
            path(&plan),
            "--out-dir",
            path(&out_dir),
        ]);
        assert!(
            out.status.success(),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
        runs.push((
            fs::read_to_string(out_dir.join("records.jsonl")).unwrap(),
            fs::read_to_string(out_dir.join("summary.csv")).unwrap(),
        ));
    }
    assert_eq!(strip_timing(&runs[0].0), strip_timing(&runs[1].0));
    assert_eq!(runs[0].1, runs[1].1);
    let recs = strip_timing(&runs[0].0);
    assert_eq!(recs.len(), 12);
    assert_eq!(recs[0]["kind"], "sample");
    assert_eq!(runs[0].1.lines().count(), 3);

    fs::write(&plan, "d=2\nn_list=2\np=0.7\nsamples=6\nmaster_seed=1\n").unwrap();
    let out = isoperc(&[
        "experiment",
        "--plan",
        path(&plan),
        "--out-dir",
        path(dir.path()),
    ]);
    assert_eq!(out.status.code(), Some(2));
    fs::write(&plan, "d=2\nn_list=4\nsamples=6\nmaster_seed=1\n").unwrap();
    let out = isoperc(&[
        "experiment",
        "--plan",
        path(&plan),
        "--out-dir",
        path(dir.path()),
    ]);
    assert!(error_line(&out)["message"]
        .as_str()
        .unwrap()
        .contains("\"p\""));
}
