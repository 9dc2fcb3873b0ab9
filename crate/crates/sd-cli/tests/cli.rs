//! End-to-end runs of the `sd` binary: exit codes, report shape, and the
//! byte-determinism guarantee. Fixture files come from the checked-in
//! `fixtures/` directory at the workspace root.

use std::path::PathBuf;
use std::process::{Command, Output};
use std::time::Instant;

fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn sd(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sd"))
        .args(args)
        .output()
        .expect("spawn sd")
}

fn sd_env(args: &[&str], key: &str, value: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sd"))
        .args(args)
        .env(key, value)
        .output()
        .expect("spawn sd")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf8 stdout")
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("utf8 stderr")
}

fn fixture(name: &str) -> String {
    fixtures().join(name).to_str().expect("utf8 path").to_owned()
}

#[test]
fn selftest_passes_clean_and_under_budget() {
    let start = Instant::now();
    let out = sd(&["selftest", "--fixtures", fixtures().to_str().unwrap()]);
    let wall = start.elapsed();
    let text = stdout(&out);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 10, "one verdict line per criterion:\n{text}");
    for line in &lines {
        assert!(line.starts_with("pass "), "unexpected verdict: {line}");
    }
    assert!(wall.as_secs() < 60, "suite took {wall:?}, budget 60 s");
}

#[test]
fn selftest_filter_selects_by_name() {
    let out = sd(&[
        "selftest",
        "--fixtures",
        fixtures().to_str().unwrap(),
        "--filter",
        "bracket",
    ]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert_eq!(text.lines().count(), 1, "{text}");
    assert!(text.contains("bracket-recovery"), "{text}");
}

#[test]
fn selftest_names_a_corrupt_fixture_and_exits_one() {
    let dir = tempfile::tempdir().expect("tempdir");
    std::fs::copy(
        fixtures().join("abelian_line.json"),
        dir.path().join("abelian_line.json"),
    )
    .unwrap();
    std::fs::write(dir.path().join("mangled.json"), "{\"kind\": \"framed\", \"bogus\": 1}").unwrap();
    let out = sd(&[
        "selftest",
        "--fixtures",
        dir.path().to_str().unwrap(),
        "--filter",
        "dual-routes",
    ]);
    assert_eq!(code(&out), 1, "stdout: {}", stdout(&out));
    assert!(
        stdout(&out).contains("mangled.json"),
        "failing fixture not named: {}",
        stdout(&out)
    );
}

#[test]
fn selftest_unknown_filter_is_a_usage_error() {
    let out = sd(&[
        "selftest",
        "--fixtures",
        fixtures().to_str().unwrap(),
        "--filter",
        "nonesuch",
    ]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("nonesuch"), "{}", stderr(&out));
}

#[test]
fn differentiate_reports_are_byte_identical_across_runs() {
    let dir = tempfile::tempdir().expect("tempdir");
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for path in [&a, &b] {
        let out = sd(&[
            "differentiate",
            &fixture("heisenberg.json"),
            "--degree",
            "2",
            "--out",
            path.to_str().unwrap(),
        ]);
        assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    }
    let left = std::fs::read(&a).unwrap();
    let right = std::fs::read(&b).unwrap();
    assert!(!left.is_empty());
    assert_eq!(left, right, "report bytes differ between runs");
}

#[test]
fn differentiate_recovers_the_heisenberg_bracket() {
    let out = sd(&["differentiate", &fixture("heisenberg.json"), "--degree", "1"]);
    assert_eq!(code(&out), 0);
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["differential"]["xi1:2"], "-xi1:0*xi1:1");
    let table = &report["bracket_tables"]["degrees (1,1)"];
    assert_eq!(table["[1:0, 1:1] -> 1:2"], "1");
    assert_eq!(table["[1:0, 1:2] -> 1:1"], "0");
    assert_eq!(report["conventions"]["structure_sign"], "-1");
    for check in report["checks"].as_array().unwrap() {
        assert_eq!(check["pass"], true, "{check}");
    }
}

#[test]
fn rationals_in_reports_are_strings_not_floats() {
    let out = sd(&["differentiate", &fixture("abelian_line.json"), "--degree", "2"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    let report: serde_json::Value = serde_json::from_str(&text).unwrap();
    for (_, poly) in report["differential"].as_object().unwrap() {
        assert!(poly.is_string(), "differential entries must be strings: {poly}");
    }
    // The only numbers anywhere in a report are structural (the truncation);
    // every scalar travels as an exact "p/q" or integer string.
    fn no_floats(v: &serde_json::Value) {
        match v {
            serde_json::Value::Number(n) => assert!(n.is_u64() || n.is_i64(), "float leaked: {n}"),
            serde_json::Value::Array(xs) => xs.iter().for_each(no_floats),
            serde_json::Value::Object(m) => m.values().for_each(no_floats),
            _ => {}
        }
    }
    no_floats(&report);
}

#[test]
fn differentiate_rejects_insufficient_truncation() {
    let out = sd(&[
        "differentiate",
        &fixture("heisenberg.json"),
        "--degree",
        "2",
        "--truncation",
        "1",
    ]);
    assert_eq!(code(&out), 1);
    assert!(
        stderr(&out).contains("truncation insufficient"),
        "{}",
        stderr(&out)
    );
}

#[test]
fn malformed_json_is_an_input_error() {
    let dir = tempfile::tempdir().expect("tempdir");
    let path = dir.path().join("garbage.json");
    std::fs::write(&path, "{ this is not json").unwrap();
    let out = sd(&["differentiate", path.to_str().unwrap(), "--degree", "1"]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("garbage.json"), "{}", stderr(&out));
}

#[test]
fn vanest_finds_all_plane_slices_isomorphic() {
    let out = sd(&["vanest", &fixture("abelian_plane.json")]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let slots = report["vanest"].as_array().unwrap();
    assert!(!slots.is_empty());
    for slot in slots {
        assert_eq!(slot["iso"], true, "{slot}");
    }
    // H^0, H^1, H^2 of the plane: ranks 1, 2, 1.
    let rank_sum = |d: u64| -> u64 {
        slots
            .iter()
            .filter(|s| s["degree"] == d)
            .map(|s| s["cochain_rank"].as_u64().unwrap())
            .sum()
    };
    assert_eq!((rank_sum(0), rank_sum(1), rank_sum(2)), (1, 2, 1));
}

#[test]
fn vanest_report_bytes_ignore_thread_count() {
    let dir = tempfile::tempdir().expect("tempdir");
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    let one = sd_env(
        &["vanest", &fixture("abelian_plane.json"), "--out", a.to_str().unwrap()],
        "SD_THREADS",
        "1",
    );
    let four = sd_env(
        &["vanest", &fixture("abelian_plane.json"), "--out", b.to_str().unwrap()],
        "SD_THREADS",
        "4",
    );
    assert_eq!(code(&one), 0);
    assert_eq!(code(&four), 0);
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn vanest_refuses_nonlinear_faces() {
    let out = sd(&["vanest", &fixture("heisenberg.json")]);
    assert_eq!(code(&out), 1);
    assert!(
        stderr(&out).contains("limited to linear faces"),
        "{}",
        stderr(&out)
    );
}

#[test]
fn abstract_reports_the_odd_line_infinitesimal() {
    let out = sd(&["abstract", &fixture("odd_line.json")]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["abstract"]["infinitesimal"], true);
    assert_eq!(report["abstract"]["witness"], serde_json::Value::Null);
}

#[test]
fn abstract_counit_is_an_isomorphism_on_the_exterior_line() {
    let out = sd(&["abstract", &fixture("exterior_line_levels.json")]);
    assert_eq!(code(&out), 0);
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let section = &report["abstract"];
    assert_eq!(section["infinitesimal"], true);
    assert_eq!(section["counit"], "isomorphism");
    assert_eq!(section["quotient_dims"], serde_json::json!([1, 1, 0, 0]));
}

#[test]
fn abstract_prints_a_witness_when_not_infinitesimal() {
    let out = sd(&["abstract", &fixture("line_functions.json")]);
    assert_eq!(code(&out), 0);
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let section = &report["abstract"];
    assert_eq!(section["infinitesimal"], false);
    let witness = section["witness"].as_str().expect("witness string");
    assert!(witness.contains("level"), "{witness}");
    assert!(witness.contains("normalized part"), "{witness}");
}

#[test]
fn abstract_rejects_broken_level_identities() {
    // Swap one codegeneracy row so s^0 stops being a ring map; the identity
    // audit must refuse before any analysis, exit 1 per the error contract.
    let text = std::fs::read_to_string(fixtures().join("exterior_line_levels.json")).unwrap();
    let mut file: serde_json::Value = serde_json::from_str(&text).unwrap();
    let row = &mut file["codegeneracy"][0][0][0];
    assert_eq!(*row, serde_json::json!(["1", "0"]));
    *row = serde_json::json!(["0", "1"]);
    let dir = tempfile::tempdir().expect("tempdir");
    let path = dir.path().join("twisted.json");
    std::fs::write(&path, serde_json::to_string(&file).unwrap()).unwrap();
    let out = sd(&["abstract", path.to_str().unwrap()]);
    assert_eq!(code(&out), 1, "stdout: {}", stdout(&out));
    assert!(!stderr(&out).is_empty());
}

#[test]
fn validate_accepts_every_fixture() {
    for entry in std::fs::read_dir(fixtures()).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_none_or(|e| e != "json") {
            continue;
        }
        let out = sd(&["validate", path.to_str().unwrap()]);
        assert_eq!(code(&out), 0, "{path:?} stderr: {}", stderr(&out));
    }
}

#[test]
fn presentation_files_round_trip_through_their_json() {
    for entry in std::fs::read_dir(fixtures()).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_none_or(|e| e != "json") {
            continue;
        }
        let first = sd_cli::formats::load_presentation(&path).unwrap();
        let text = sd_cli::formats::presentation_to_json(&first);
        let dir = tempfile::tempdir().unwrap();
        let copy = dir.path().join("copy.json");
        std::fs::write(&copy, &text).unwrap();
        let second = sd_cli::formats::load_presentation(&copy).unwrap();
        assert_eq!(
            text,
            sd_cli::formats::presentation_to_json(&second),
            "round trip drifted for {path:?}"
        );
    }
}
