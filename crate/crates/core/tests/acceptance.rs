//! Acceptance suite: the release gate. Each test drives one group of laws
//! at full scale (randomized exact models, fixed seeds, zero tolerated
//! failures) and prints a one-line verdict.

use std::time::{Duration, Instant};

use cooc_core::checks::{run_checks, CheckReport, RunOptions};

fn run(ids: &[&str], cases: usize, seed: u64) -> (Vec<CheckReport>, Duration) {
    let options = RunOptions {
        cases,
        seed,
        only: ids.iter().map(|s| s.to_string()).collect(),
    };
    let start = Instant::now();
    let reports = run_checks(&options, &[], &[]);
    (reports, start.elapsed())
}

fn assert_all_pass(criterion: &str, reports: &[CheckReport], elapsed: Duration, budget: Duration) {
    let mut ok = true;
    for r in reports {
        if !r.passed() {
            ok = false;
            for f in &r.failures {
                eprintln!("  {} failed: {f}", r.id);
            }
        }
    }
    let total_cases: usize = reports.iter().map(|r| r.cases).sum();
    let verdict = if ok && elapsed <= budget { "PASS" } else { "FAIL" };
    println!(
        "criterion {criterion}: {verdict} ({} checks, {} cases, {:.2?})",
        reports.len(),
        total_cases,
        elapsed
    );
    assert!(ok, "criterion {criterion} had failing checks");
    assert!(
        elapsed <= budget,
        "criterion {criterion} exceeded its time budget: {elapsed:.2?} > {budget:.2?}"
    );
}

#[test]
fn criterion_1_defining_equations() {
    // every pointwise conditional, conditional kernel, and conditional
    // E-integral satisfies its defining integral equation over 500 models
    let (reports, elapsed) = run(&["2.7", "2.11", "5.7"], 500, 101);
    for r in &reports {
        assert!(
            r.cases >= 500,
            "{} ran only {} cases, expected at least one per model",
            r.id,
            r.cases
        );
    }
    assert_all_pass("1 (defining equations)", &reports, elapsed, Duration::from_secs(60));
}

#[test]
fn criterion_2_transformation_calculus() {
    // shift round trips, joint rebuilds, composition, and the six
    // conditional-independence equivalences with exhaustive events
    let (reports, elapsed) = run(
        &["3.1", "3.2", "3.4", "3.5", "3.7", "3.8", "3.9"],
        60,
        102,
    );
    let equivalences = reports.iter().find(|r| r.id == "3.9").unwrap();
    assert!(
        equivalences.cases >= 1000,
        "equivalence enumeration looks truncated: {} cases",
        equivalences.cases
    );
    assert_all_pass("2 (transformation calculus)", &reports, elapsed, Duration::from_secs(120));
}

#[test]
fn criterion_3_densities() {
    // density defining equations, absolute continuity both ways, kernels
    // from densities against measure kernels, change of base: 200 models
    let (reports, elapsed) = run(&["4.1", "4.2", "4.3", "4.7"], 200, 103);
    let kernel_check = reports.iter().find(|r| r.id == "4.3").unwrap();
    assert!(kernel_check.cases >= 200);
    assert_all_pass("3 (densities)", &reports, elapsed, Duration::from_secs(60));
}

#[test]
fn criterion_4_e_integral_suite() {
    let (reports, elapsed) = run(
        &[
            "5.1", "5.4", "6.1", "6.2", "6.3", "6.4", "6.5", "6.6", "6.7", "6.8", "6.9",
            "6.10", "6.11", "6.12", "6.13", "6.14",
        ],
        60,
        104,
    );
    // the convex-inequality check must cover at least 50 random functions:
    // three per scenario
    let jensen = reports.iter().find(|r| r.id == "6.14").unwrap();
    assert!(jensen.cases >= 50, "only {} convex cases", jensen.cases);
    assert_all_pass("4 (E-integral suite)", &reports, elapsed, Duration::from_secs(180));
}

#[test]
fn criterion_5_structural_models() {
    let (reports, elapsed) = run(&["scm.1", "scm.2", "scm.3"], 200, 105);
    let observational = reports.iter().find(|r| r.id == "scm.1").unwrap();
    assert!(
        observational.cases >= 200,
        "only {} observational cases",
        observational.cases
    );
    assert_all_pass("5 (structural models)", &reports, elapsed, Duration::from_secs(30));
}

#[test]
fn criterion_7_null_conventions() {
    let (reports, elapsed) = run(&["null"], 50, 107);
    assert!(
        reports[0].cases >= 50,
        "only {} null-condition cases",
        reports[0].cases
    );
    assert_all_pass("7 (null conventions)", &reports, elapsed, Duration::from_secs(60));
}
