//! Acceptance suite for the command-line front end: byte-exact golden
//! outputs on the reference model, the exit-code taxonomy, output
//! determinism, and serialization round trips.

use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> String {
    let mut path = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    path.push("tests/fixtures");
    path.push(name);
    path.to_string_lossy().into_owned()
}

fn cooc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cooc"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_of(output: &Output) -> String {
    String::from_utf8(output.stdout.clone()).expect("utf-8 output")
}

#[test]
fn criterion_6_golden_values() {
    let model = fixture("m0.json");
    let golden: &[(&[&str], &str)] = &[
        (&["--model", &model, "prob", "--query", "joint"], "1/4\n"),
        (&["--model", &model, "prob", "--query", "cond"], "1/2\n"),
        (&["--model", &model, "prob", "--query", "sure"], "1/2\n"),
        (
            &["--model", &model, "eint", "--query", "ey_given_even"],
            "1/2\n",
        ),
        (
            &["--model", &model, "density", "--query", "joint_density"],
            "1,1,1,1\n",
        ),
        (
            &["--model", &model, "ci", "--query", "parity_vs_level"],
            "independent: true\n",
        ),
        (
            &["--model", &model, "ci", "--query", "level_vs_identity"],
            "independent: false\n",
        ),
        (
            &["--model", &model, "kernel", "--query", "level_given_parity"],
            "{\"rows\":[[\"1/2\",\"1/2\"],[\"1/2\",\"1/2\"]],\"source\":\"X1\",\"support\":[0,1],\"target\":\"X2\"}\n",
        ),
        (
            &["--model", &model, "scm", "--name", "copy", "dist"],
            "1/3,2/3\n",
        ),
        (
            &["--model", &model, "scm", "--name", "chain", "--do", "1=1", "dist"],
            "0,0,0,1\n",
        ),
        (
            &["--model", &model, "--decimal", "2", "prob", "--query", "cond"],
            "1/2 (0.50)\n",
        ),
    ];
    let mut failures = 0;
    for (args, expected) in golden {
        let output = cooc(args);
        let actual = stdout_of(&output);
        if actual != *expected || !output.status.success() {
            eprintln!("golden mismatch for {args:?}: got {actual:?}, want {expected:?}");
            failures += 1;
        }
    }
    // the degenerate fully-dependent model concentrates its density on the
    // diagonal
    let diagonal = fixture("diagonal.json");
    let out = cooc(&["--model", &diagonal, "density", "--query", "joint_density"]);
    if stdout_of(&out) != "2,0,0,2\n" {
        eprintln!("diagonal density mismatch: {:?}", stdout_of(&out));
        failures += 1;
    }
    println!(
        "criterion 6 (golden values): {} ({} commands)",
        if failures == 0 { "PASS" } else { "FAIL" },
        golden.len() + 1
    );
    assert_eq!(failures, 0);
}

#[test]
fn exit_code_taxonomy() {
    let model = fixture("m0.json");

    // 0: clean query
    assert!(cooc(&["--model", &model, "prob", "--query", "joint"]).status.success());

    // 2: unresolvable reference, named with its id
    let out = cooc(&[
        "--model",
        &model,
        "prob",
        "--query",
        r#"{"targets":[{"object":"ghost","event":[0]}]}"#,
    ]);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.contains("ghost"), "witness missing: {stderr}");

    // 2: model file that does not load
    let out = cooc(&["--model", "/nonexistent/m.json", "prob", "--query", "joint"]);
    assert_eq!(out.status.code(), Some(2));

    // 2: corrupted measure (mass not one) rejected at load
    let dir = std::env::temp_dir().join("cooc-acceptance");
    std::fs::create_dir_all(&dir).unwrap();
    let bad_path = dir.join("bad-measure.json");
    let text = std::fs::read_to_string(&model).unwrap();
    let corrupted = text.replacen("\"1/4\"", "\"1/2\"", 1);
    std::fs::write(&bad_path, corrupted).unwrap();
    let out = cooc(&[
        "--model",
        bad_path.to_str().unwrap(),
        "prob",
        "--query",
        "joint",
    ]);
    assert_eq!(out.status.code(), Some(2));

    // 3: query-domain error (event member out of range)
    let out = cooc(&[
        "--model",
        &model,
        "prob",
        "--query",
        r#"{"targets":[{"object":"X1","event":[7]}]}"#,
    ]);
    assert_eq!(out.status.code(), Some(3));

    // 4: ambiguous mechanism, witness printed
    let out = cooc(&["--model", &model, "scm", "--name", "stuck", "solve"]);
    assert_eq!(out.status.code(), Some(4));
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(
        stderr.contains("non-unique solution"),
        "witness missing: {stderr}"
    );

    // 4: dist on the ambiguous mechanism as well
    let out = cooc(&["--model", &model, "scm", "--name", "stuck", "dist"]);
    assert_eq!(out.status.code(), Some(4));

    println!("exit-code taxonomy: PASS");
}

#[test]
fn null_condition_is_printed() {
    let model = fixture("m0.json");
    let out = cooc(&[
        "--model",
        &model,
        "prob",
        "--query",
        r#"{"targets":[{"object":"X1","event":[0]}],"conditions":[{"object":"X2","event":[]}]}"#,
    ]);
    assert!(out.status.success());
    assert_eq!(stdout_of(&out), "0 [null-condition]\n");
}

#[test]
fn check_command_is_deterministic_and_filters() {
    let model = fixture("m0.json");
    let args = [
        "--model", &model, "check", "--theorems", "6.6", "--cases", "5", "--seed", "7",
    ];
    let first = cooc(&args);
    let second = cooc(&args);
    assert!(first.status.success());
    assert_eq!(first.stdout, second.stdout, "same seed must give identical bytes");
    let text = stdout_of(&first);
    assert!(text.contains("6.6 tower property"), "unexpected report: {text}");
    assert!(text.lines().count() == 2, "filter selected more than one check: {text}");
    assert!(text.ends_with("all checks passed\n"));

    // JSON mode parses and reports the same counts
    let out = cooc(&[
        "--model", &model, "--json", "check", "--theorems", "6.6", "--cases", "5", "--seed", "7",
    ]);
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["passed"], serde_json::Value::Bool(true));
    assert_eq!(doc["checks"][0]["id"], "6.6");

    // unknown ids are load errors
    let out = cooc(&["--model", &model, "check", "--theorems", "9.99"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn serialized_results_reparse() {
    let model = fixture("m0.json");
    // kernels re-parse into the same rows
    let out = cooc(&["--model", &model, "kernel", "--query", "level_given_parity"]);
    let doc: cooc_core::model::KernelDoc = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc.source, "X1");
    for row in &doc.rows {
        for w in row {
            cooc_core::rational::parse_rat(w).unwrap();
        }
    }
    // densities in JSON mode re-parse losslessly
    let out = cooc(&[
        "--model", &model, "--json", "density", "--query", "joint_density",
    ]);
    let doc: cooc_core::model::DensityDoc = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc.base, "marginals");
    assert_eq!(doc.indices, vec![1, 2]);
    assert_eq!(doc.values.len(), 4);
    for v in &doc.values {
        assert_eq!(cooc_core::rational::parse_rat(v).unwrap(), cooc_core::rational::int(1));
    }
    // scalar outputs re-parse as rationals
    let out = cooc(&["--model", &model, "prob", "--query", "joint"]);
    let value = cooc_core::rational::parse_rat(stdout_of(&out).trim()).unwrap();
    assert_eq!(value, cooc_core::rational::ratio(1, 4));
}

#[test]
fn check_runs_the_model_scenario() {
    // a model scenario rides along with the randomized ones: the law ids
    // all pass on the reference model too
    let model = fixture("m0.json");
    let out = cooc(&[
        "--model", &model, "check", "--cases", "2", "--seed", "3",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout_of(&out);
    assert!(text.ends_with("all checks passed\n"));
}
