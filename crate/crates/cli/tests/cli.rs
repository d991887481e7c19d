use std::io::Write;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::NamedTempFile;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_legendre"))
        .args(args)
        .env_remove("LEGENDRE_CONFIG")
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> (i32, Value) {
    let out = run(args);
    let v = serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "{args:?}: {e}\nstderr: {}",
            String::from_utf8_lossy(&out.stderr)
        )
    });
    (out.status.code().expect("exit code"), v)
}

fn strings(v: &Value) -> Vec<&str> {
    v.as_array()
        .expect("array")
        .iter()
        .map(|s| s.as_str().expect("string"))
        .collect()
}

#[test]
fn stirling_rows() {
    let (code, v) = json(&["stirling", "--n", "3"]);
    assert_eq!(code, 0);
    let rows = v["result"].as_array().unwrap();
    assert_eq!(strings(&rows[0]["values"]), ["1"]);
    assert_eq!(strings(&rows[1]["values"]), ["2", "1"]);
    assert_eq!(strings(&rows[2]["values"]), ["4", "8", "1"]);
}

#[test]
fn stirling_zero_is_a_usage_error() {
    let out = run(&["stirling", "--n", "0"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());
}

#[test]
fn operator_expansions() {
    let (code, v) = json(&["operator", "--n", "1", "--expand"]);
    assert_eq!(code, 0);
    let e = &v["result"]["operator"]["expanded"];
    assert_eq!(strings(&e[1]), ["0", "2"]);
    assert_eq!(strings(&e[2]), ["-1", "0", "1"]);

    let (_, v) = json(&["operator", "--n", "2", "--expand"]);
    let e = &v["result"]["operator"]["expanded"];
    assert_eq!(strings(&e[1]), ["0", "4"]);
    assert_eq!(strings(&e[2]), ["-6", "0", "14"]);
    assert_eq!(strings(&e[3]), ["0", "-8", "0", "8"]);
    assert_eq!(strings(&e[4]), ["1", "0", "-2", "0", "1"]);
}

#[test]
fn operator_compose_check() {
    let (code, v) = json(&["operator", "--n", "5", "--compose-check"]);
    assert_eq!(code, 0);
    assert_eq!(
        v["result"]["compose_check"]["mismatches"],
        Value::Array(vec![])
    );
    assert_eq!(v["result"]["order"], 10);
}

#[test]
fn pretty_operator_shows_fractions_exactly() {
    let out = run(&["operator", "--n", "2", "--expand", "--format", "pretty"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("a_4 = x^4 - 2*x^2 + 1"), "{text}");
    assert!(text.contains("a_2 = 14*x^2 - 6"), "{text}");
}

#[test]
fn spectrum_of_square() {
    let out = run(&[
        "spectrum", "--op", "A2", "--basis", "legendre", "--N", "8", "--format", "csv",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("index,eigenvalue,target,abs_error"));
    let want = [0.0, 4.0, 36.0, 144.0, 400.0, 900.0, 1764.0, 3136.0];
    let got: Vec<f64> = lines
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert_eq!(got.len(), want.len());
    for (g, w) in got.iter().zip(want) {
        assert!((g - w).abs() <= 1e-7 * w.max(1.0), "{g} vs {w}");
    }
}

#[test]
fn spectrum_rejects_bad_input() {
    assert_eq!(
        run(&["spectrum", "--op", "A3", "--N", "8"]).status.code(),
        Some(2)
    );
    assert_eq!(
        run(&["spectrum", "--op", "A", "--N", "2"]).status.code(),
        Some(2)
    );
    assert_eq!(
        run(&["spectrum", "--basis", "monomial", "--N", "15"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn forms_limit_of_x_with_one() {
    let (code, v) = json(&[
        "forms", "--f", "x", "--g", "1", "--order", "2", "--limit", "1",
    ]);
    assert_eq!(code, 0);
    let l = &v["result"]["limit"];
    assert_eq!(l["converged"], true);
    assert_eq!(l["endpoint"], 1);
    assert!(l["estimate"].as_f64().unwrap().abs() <= 1e-8);
}

#[test]
fn forms_at_a_point() {
    // [x,1]_2 = -2(1-x^2)
    let (code, v) = json(&["forms", "--f", "x", "--g", "1", "--at", "0.5"]);
    assert_eq!(code, 0);
    assert!((v["result"]["value"].as_f64().unwrap() + 1.5).abs() <= 1e-12);
}

#[test]
fn forms_boundary_functions() {
    let (code, v) = json(&[
        "forms",
        "--f",
        "bc:f3",
        "--g",
        "bc:g1",
        "--difference",
        "--delta",
        "0.1",
    ]);
    assert_eq!(code, 0);
    assert!((v["result"]["value"].as_f64().unwrap() + 4.0).abs() <= 1e-6);
}

#[test]
fn forms_nonconvergent_limit_fails() {
    // [ln(1-x)^2, 1]_1 = -2(1+x)ln(1-x), unbounded at 1.
    let out = run(&[
        "forms",
        "--f",
        "ln(1-x)^2",
        "--g",
        "1",
        "--order",
        "1",
        "--limit",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn green_residual_small() {
    let (code, v) = json(&[
        "green", "--f", "ln(1-x)", "--g", "x", "--alpha", "-0.5", "--beta", "0.5", "--n", "2",
    ]);
    assert_eq!(code, 0);
    assert!(v["result"]["residual"].as_f64().unwrap() <= 1e-8);
}

#[test]
fn classify_examples() {
    let (code, v) = json(&["classify", "--expr", "ln(1-x)"]);
    assert_eq!(code, 0);
    let r = &v["result"]["report"];
    assert_eq!(r["delta2_max"]["status"], "member");
    assert_eq!(r["main4"]["iii_s"]["status"], "non-member");

    let (code, v) = json(&["classify", "--expr", "x^3"]);
    assert_eq!(code, 0);
    let r = &v["result"]["report"];
    for key in ["delta1_max", "domain_a", "delta2_max"] {
        assert_eq!(r[key]["status"], "member", "{key}");
    }
    for key in ["i_algebraic", "ii_b", "iii_s", "iv_d"] {
        assert_eq!(r["main4"][key]["status"], "member", "{key}");
    }

    let (code, v) = json(&["classify", "--expr", "(1-x)^(-3/4)"]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["report"]["delta1_max"]["status"], "non-member");
}

#[test]
fn classify_parse_error_reports_position() {
    let out = run(&["classify", "--expr", "(1-x"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("at 4"));
}

#[test]
fn classify_corpus_keeps_order() {
    let mut file = NamedTempFile::new().unwrap();
    writeln!(file, "# comment\nx^2\n\nln(1+x)\n1 - x^4").unwrap();
    let (code, v) = json(&["classify", "--corpus", file.path().to_str().unwrap()]);
    assert_eq!(code, 0);
    let items = v["result"].as_array().unwrap();
    let lines: Vec<u64> = items.iter().map(|i| i["line"].as_u64().unwrap()).collect();
    assert_eq!(lines, [2, 4, 5]);
    assert_eq!(items[1]["input"], "ln(1+x)");
}

#[test]
fn ce_presets_hold() {
    for preset in ["ce-p1", "ce-p2"] {
        let (code, v) = json(&["ce", "--preset", preset]);
        assert_eq!(code, 0, "{preset}");
        assert_eq!(v["result"]["violations"], Value::Array(vec![]));
    }
    assert_eq!(run(&["ce", "--preset", "nope"]).status.code(), Some(2));
}

#[test]
fn json_is_byte_identical_across_runs() {
    for args in [
        &["ce", "--preset", "ce-p2", "--seed", "5"][..],
        &["classify", "--expr", "(1+x)*ln(1+x)"][..],
        &["spectrum", "--op", "A", "--N", "10"][..],
    ] {
        assert_eq!(run(args).stdout, run(args).stdout, "{args:?}");
    }
}

#[test]
fn config_file_and_flag_override() {
    let mut file = NamedTempFile::new().unwrap();
    write!(file, r#"{{"format": "csv", "delta": 0.1}}"#).unwrap();
    let path = file.path().to_str().unwrap();
    let out = run(&["--config", path, "stirling", "--n", "2"]);
    assert_eq!(
        String::from_utf8(out.stdout).unwrap(),
        "n,j,value\n1,1,1\n2,1,2\n2,2,1\n"
    );
    let out = run(&["--config", path, "--format", "json", "stirling", "--n", "1"]);
    assert!(out.stdout.starts_with(b"{"));

    let mut bad = NamedTempFile::new().unwrap();
    write!(bad, r#"{{"delta": 0.7}}"#).unwrap();
    assert_eq!(
        run(&[
            "--config",
            bad.path().to_str().unwrap(),
            "stirling",
            "--n",
            "1"
        ])
        .status
        .code(),
        Some(2)
    );
}
