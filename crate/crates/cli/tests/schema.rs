//! Records checked against `schema/result_record.schema.json` with a small
//! validator covering the keywords that file uses.

use std::fs;
use std::path::Path;
use std::process::Command;

use serde_json::Value;

fn type_matches(ty: &str, v: &Value) -> bool {
    match ty {
        "null" => v.is_null(),
        "boolean" => v.is_boolean(),
        "integer" => v.is_u64() || v.is_i64(),
        "number" => v.is_number(),
        "string" => v.is_string(),
        "array" => v.is_array(),
        "object" => v.is_object(),
        _ => panic!("unsupported type {ty}"),
    }
}

fn validate(schema: &Value, v: &Value, at: &str) -> Result<(), String> {
    let fail = |what: &str| Err(format!("{at}: {what}"));
    if let Some(ty) = schema.get("type") {
        let ok = match ty {
            Value::String(t) => type_matches(t, v),
            Value::Array(ts) => ts.iter().any(|t| type_matches(t.as_str().unwrap(), v)),
            _ => false,
        };
        if !ok {
            return fail(&format!("expected type {ty}, got {v}"));
        }
    }
    if let Some(opts) = schema.get("enum").and_then(Value::as_array) {
        if !opts.contains(v) {
            return fail(&format!("{v} not in enum"));
        }
    }
    if let Some(x) = v.as_f64() {
        if schema
            .get("minimum")
            .and_then(Value::as_f64)
            .is_some_and(|m| x < m)
        {
            return fail("below minimum");
        }
        if schema
            .get("maximum")
            .and_then(Value::as_f64)
            .is_some_and(|m| x > m)
        {
            return fail("above maximum");
        }
    }
    if let Some(alts) = schema.get("oneOf").and_then(Value::as_array) {
        let hits = alts.iter().filter(|s| validate(s, v, at).is_ok()).count();
        if hits != 1 {
            return fail(&format!("{hits} oneOf branches match"));
        }
    }
    if let Some(obj) = v.as_object() {
        let props = schema.get("properties").and_then(Value::as_object);
        for key in schema
            .get("required")
            .and_then(Value::as_array)
            .into_iter()
            .flatten()
        {
            if !obj.contains_key(key.as_str().unwrap()) {
                return fail(&format!("missing {key}"));
            }
        }
        for (key, val) in obj {
            match props.and_then(|p| p.get(key)) {
                Some(sub) => validate(sub, val, &format!("{at}.{key}"))?,
                None if schema.get("additionalProperties") == Some(&Value::Bool(false)) => {
                    return fail(&format!("unexpected key {key}"))
                }
                None => {}
            }
        }
    }
    if let (Some(items), Some(arr)) = (schema.get("items"), v.as_array()) {
        for (i, x) in arr.iter().enumerate() {
            validate(items, x, &format!("{at}[{i}]"))?;
        }
    }
    Ok(())
}

fn schema() -> Value {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../schema/result_record.schema.json");
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn isoperc(args: &[&str]) -> String {
    let out = Command::new(env!("CARGO_BIN_EXE_isoperc"))
        .args(args)
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn validator_rejects_bad_records() {
    let s = schema();
    let good: Value = serde_json::from_str(
        r#"{"kind":"solve","d":2,"n":4,"p":null,"seed":null,"phi_num":1,"phi_den":1,
            "phi_real":1.0,"giant_size":16,"max_minimizer_size":8,"method":"exact",
            "events":null,"timing_ms":0.1}"#,
    )
    .unwrap();
    validate(&s, &good, "$").unwrap();
    let mut extra = good.clone();
    extra["colour"] = Value::from("red");
    assert!(validate(&s, &extra, "$").is_err());
    let mut missing = good.clone();
    missing.as_object_mut().unwrap().remove("phi_num");
    assert!(validate(&s, &missing, "$").is_err());
    let mut bad_method = good;
    bad_method["method"] = Value::from("fast");
    assert!(validate(&s, &bad_method, "$").is_err());
}

#[test]
fn cli_records_match_schema() {
    let s = schema();
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("w.cfg");
    let cfg_s = cfg.to_str().unwrap();
    for (p, seed) in [("1", "1"), ("0.6", "5"), ("0.8", "9")] {
        isoperc(&[
            "sample", "--d", "2", "--n", "4", "--p", p, "--seed", seed, "--out", cfg_s,
        ]);
        for mode in ["brute", "exact", "heuristic"] {
            let line = isoperc(&["solve", "--in", cfg_s, "--mode", mode]);
            validate(&s, &serde_json::from_str(&line).unwrap(), "$").unwrap();
        }
    }

    let plan = dir.path().join("plan.txt");
    fs::write(
        &plan,
        "d=2\nn_list=3,4\np=0.5\nsamples=5\nmaster_seed=3\nrecord_gradients=true\nbootstrap_resamples=20\n",
    )
    .unwrap();
    let out_dir = dir.path().join("out");
    isoperc(&[
        "experiment",
        "--plan",
        plan.to_str().unwrap(),
        "--out-dir",
        out_dir.to_str().unwrap(),
    ]);
    let jsonl = fs::read_to_string(out_dir.join("records.jsonl")).unwrap();
    for line in jsonl.lines() {
        validate(&s, &serde_json::from_str(line).unwrap(), "$").unwrap();
    }
}
