//! Release gate: every criterion from `sd selftest` as its own test, so the
//! harness prints one pass/fail line per criterion. Run with `--nocapture`
//! to see the same one-line summaries the CLI prints.

use std::path::PathBuf;
use std::time::Instant;

use sd_cli::criteria::{all, Failure};

fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

/// Runs one criterion by name and enforces its time budget in milliseconds
/// (0 = no budget). Budgets follow the published targets with no headroom;
/// a slow box fails loudly rather than papering over a regression.
fn run(name: &str, budget_ms: u128) {
    let c = all()
        .into_iter()
        .find(|c| c.name == name)
        .unwrap_or_else(|| panic!("no criterion named {name}"));
    let start = Instant::now();
    let outcome = (c.run)(&fixtures());
    let ms = start.elapsed().as_millis();
    match outcome {
        Ok(detail) => println!("pass {name}: {detail} ({ms} ms)"),
        Err(Failure::Fixture(e)) => panic!("FAIL {name}: fixture problem: {e}"),
        Err(Failure::Check(e)) => panic!("FAIL {name}: {e}"),
    }
    if budget_ms > 0 {
        assert!(ms < budget_ms, "{name} took {ms} ms, budget {budget_ms} ms");
    }
}

#[test]
fn criterion_01_example_reproduction() {
    run("example-reproduction", 1_000);
}

#[test]
fn criterion_02_bracket_recovery() {
    run("bracket-recovery", 1_000);
}

#[test]
fn criterion_03_dual_routes() {
    run("dual-routes", 0);
}

#[test]
fn criterion_04_semi_freeness() {
    run("semi-freeness", 0);
}

#[test]
fn criterion_05_dga_certificate() {
    run("dga-certificate", 0);
}

#[test]
fn criterion_06_dold_kan_roundtrip() {
    run("dold-kan-roundtrip", 0);
}

#[test]
fn criterion_07_interchange_counit() {
    run("interchange-counit", 0);
}

#[test]
fn criterion_08_unravel_signs() {
    run("unravel-signs", 10_000);
}

#[test]
fn criterion_09_vanest_comparison() {
    run("vanest-comparison", 5_000);
}

#[test]
fn criterion_10_weil_extension() {
    run("weil-extension", 0);
}
