use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_iterperiod")).args(args).output().expect("binary runs")
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("bad JSON ({e}); stderr: {}", String::from_utf8_lossy(&out.stderr))
    })
}

fn tmp(name: &str, contents: &str) -> PathBuf {
    let p = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name);
    std::fs::write(&p, contents).unwrap();
    p
}

#[test]
fn verify_cocycle_passes() {
    let out = run(&["verify", "cocycle"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["pass"], true);
    assert!(r["result"]["max"].as_f64().unwrap() <= 1e-7);
    assert_eq!(r["result"]["reports"].as_array().unwrap().len(), 4);
    // the resolved config is echoed, including defaults filled per command
    assert_eq!(r["config"]["degree"], 3);
    assert_eq!(r["config"]["panel"].as_array().unwrap().len(), 5);
    assert!(r["config"]["collection"]["forms"]["A1"].is_object());
    assert!(r["result"]["reports"][0]["per_degree_max"]["3"].is_number());
}

#[test]
fn eta_example_four() {
    let out = run(&["verify", "eta-example", "--n", "4"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report(&out)["config"]["alphabet"], "eta:4");
}

#[test]
fn rel2_with_zero_form_is_exact() {
    let out = run(&["verify", "rel2", "--forms", "delta,0*delta"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report(&out)["result"]["max"].as_f64(), Some(0.0));
}

#[test]
fn tiny_threshold_is_a_verification_failure() {
    let out = run(&["verify", "cocycle", "--threshold", "1e-30"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(report(&out)["pass"], false);
}

#[test]
fn unsupported_precision_is_a_config_error() {
    let out = run(&["verify", "cocycle", "--precision", "f128"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("precision"));
}

#[test]
fn config_file_and_flag_override() {
    let cfg = tmp("run.json", r#"{"alphabet": "trivial:10,trivial:4", "degree": 2, "seed": 5}"#);
    let out = run(&["catalog", "--config", cfg.to_str().unwrap(), "--degree", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["config"]["degree"], 3);
    assert_eq!(r["config"]["seed"], 5);
    let bad = tmp("bad_run.json", r#"{"alphabett": "trivial:10"}"#);
    assert_eq!(run(&["catalog", "--config", bad.to_str().unwrap()]).status.code(), Some(1));
}

#[test]
fn catalog_lists_nonzero_spaces() {
    let out = run(&["catalog", "--alphabet", "trivial:10,trivial:4", "--degree", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let rows = report(&out)["result"]["monomials"].as_array().unwrap().clone();
    let names: Vec<&str> = rows.iter().map(|r| r["monomial"].as_str().unwrap()).collect();
    // weights 12, 6, 22, 16, 16, 10: only S_6 and S_10 vanish
    assert_eq!(names, ["A1", "A1*A1", "A1*A2", "A2*A1"]);
}

#[test]
fn roundtrip_zero_collection() {
    let h = tmp("h0.json", r#"{"alphabet": "trivial:10", "degree": 3, "forms": {}}"#);
    let out = run(&["roundtrip", "--input", h.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["result"]["max_relative_error"].as_f64(), Some(0.0));
}

#[test]
fn roundtrip_rejects_component_outside_catalog() {
    // A2 has weight 4, where there are no cusp forms
    let h = tmp(
        "h_bad.json",
        r#"{"alphabet": "trivial:10,trivial:2", "degree": 2,
            "forms": {"A2": {"weight": 4, "multiplier": {"type": "trivial"}, "kappa": "1", "coeffs": [[0, 0]]}}}"#,
    );
    let out = run(&["roundtrip", "--input", h.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let missing = run(&["roundtrip", "--input", "/nonexistent/h.json"]);
    assert_eq!(missing.status.code(), Some(1));
}

#[test]
fn roundtrip_random_single_letter() {
    let out = run(&["roundtrip", "--random", "--seed", "7", "--degree", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert!(r["result"]["max_relative_error"].as_f64().unwrap() <= 1e-4);
}

#[test]
fn tabulated_cocycle_peels() {
    let h = tmp("h_tab.json", r#"{"alphabet": "trivial:10", "degree": 2, "forms": {"A1": {"name": "delta", "scale": [1.5, 0]}}}"#);
    let dump = run(&["psi", "--gamma", "S", "--collection", h.to_str().unwrap(), "--degree", "2"]);
    assert_eq!(dump.status.code(), Some(0));
    let d = report(&dump);
    // re-pack the dump as a tabulated cocycle with X_T = 1
    let mut s = serde_json::Map::new();
    let values = d["result"]["values"].as_array().unwrap();
    for key in values[0]["coeffs"].as_object().unwrap().keys() {
        let col: Vec<Value> = values.iter().map(|v| v["coeffs"][key].clone()).collect();
        s.insert(key.clone(), Value::Array(col));
    }
    let table = serde_json::json!({
        "alphabet": "trivial:10",
        "degree": 2,
        "panel": values.iter().map(|v| v["t"].clone()).collect::<Vec<_>>(),
        "S": s,
    });
    let p = tmp("tab.json", &table.to_string());
    let out = run(&["roundtrip", "--tabulated", p.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = report(&out);
    let c = &r["result"]["recovered"]["A1"][0];
    assert!((c[0].as_f64().unwrap() - 1.5).abs() <= 1e-6);
}

#[test]
fn mlv_tables() {
    let out = run(&["mlv", "--forms", ""]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert!(r["result"]["moments"].as_array().unwrap().is_empty());

    let out = run(&["mlv", "--max-order", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["result"]["moments"].as_array().unwrap().len(), 11);
    let pairs = r["result"]["pairs"].as_array().unwrap();
    assert_eq!(pairs.len(), 1);
    assert_eq!(pairs[0]["double_moments"].as_array().unwrap().len(), 121);
    assert!(pairs[0]["shuffle"]["max"].as_f64().unwrap() <= 1e-7);

    let odd = run(&["mlv", "--forms", "eta4"]);
    assert_eq!(odd.status.code(), Some(1));
}

#[test]
fn csv_output_has_config_header() {
    let out = run(&["catalog", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# command catalog"));
    assert!(lines.next().unwrap().starts_with("# config {"));
    assert!(text.contains("\npath,value\n"));
    assert!(text.contains("monomials.0.monomial,A1"));
}

#[test]
fn reports_are_byte_identical() {
    for args in [&["verify", "equivariance"][..], &["roundtrip", "--random", "--seed", "2", "--degree", "2"]] {
        let a = run(args);
        let b = run(args);
        assert_eq!(a.status.code(), Some(0));
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn report_file_output() {
    let p = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("psi_t.json");
    let out = run(&["psi", "--gamma", "T", "--out", p.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let r: Value = serde_json::from_str(&std::fs::read_to_string(&p).unwrap()).unwrap();
    // Ψ_T = 1 exactly
    for v in r["result"]["values"].as_array().unwrap() {
        for (k, c) in v["coeffs"].as_object().unwrap() {
            let want = if k == "1" { 1.0 } else { 0.0 };
            assert_eq!(c[0].as_f64(), Some(want));
            assert_eq!(c[1].as_f64(), Some(0.0));
        }
    }
}
