//! End-to-end runs of the command line over the shipped corpus.
//!
//! Golden reports live in `tests/golden/`; regenerate them with
//! `UPDATE_GOLDEN=1 cargo test -p qtype-cli --test cli`.

use std::fs;
use std::path::PathBuf;

use qtype_cli::run;
use qtype_core::report::type_from_json;
use qtype_core::syntax::{parse_program, parse_type};
use qtype_core::types::types_equal;
use serde_json::Value;

fn corpus(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("corpus").join(name).to_string_lossy().into_owned()
}

fn qtype(args: &[&str]) -> qtype_cli::Output {
    run(std::iter::once("qtype").chain(args.iter().copied()))
}

fn stdout_line(args: &[&str]) -> String {
    let out = qtype(args);
    assert_eq!(out.code, 0, "{args:?}: {}", out.stderr);
    out.stdout.trim_end().to_string()
}

fn json(args: &[&str]) -> (i32, Value) {
    let mut all = vec!["--json"];
    all.extend_from_slice(args);
    let out = qtype(&all);
    (out.code, serde_json::from_str(&out.stdout).expect("report is JSON"))
}

#[test]
fn every_corpus_file_checks() {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("corpus");
    let mut seen = 0;
    for entry in fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "qt") {
            let out = qtype(&["check", path.to_str().unwrap()]);
            assert_eq!(out.code, 0, "{}: {}{}", path.display(), out.stdout, out.stderr);
            seen += 1;
        }
    }
    assert!(seen >= 15, "corpus has only {seen} files");
}

#[test]
fn corpus_files_survive_the_oracle() {
    for name in ["deutsch.qt", "ghz_measure.qt", "toffoli.qt", "ccz.qt", "control_s.qt", "injection.qt", "steane_s.qt"] {
        for seed in ["0", "1", "2"] {
            let out = qtype(&["verify", "--oracle", "--seed", seed, &corpus(name)]);
            assert_eq!(out.code, 0, "{name}: {}{}", out.stdout, out.stderr);
        }
    }
}

#[test]
fn documented_invocations() {
    assert_eq!(stdout_line(&["tbound", &corpus("ccz.qt")]), "2");
    assert_eq!(stdout_line(&["tbound", "ccz"]), "2");
    assert_eq!(stdout_line(&["separable", "XXI & ZZI & IIZ", "--qubits", "1,2"]), "(XX & ZZ)@{1,2} & Z@{3}");
    assert_eq!(stdout_line(&["normalize", "ZZZ & XXI & ZZI"]), "XXI & ZZI & IIZ");
}

#[test]
fn exit_codes() {
    // 1: check failure, with a diff.
    let dir = std::env::temp_dir().join(format!("qtype-cli-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    let wrong = dir.join("ghz_wrong.qt");
    fs::write(&wrong, "QUBITS 3\nH 1\nCNOT 1 2\nCNOT 2 3\nEXPECT ZII & IZI & IIZ\n").unwrap();
    let out = qtype(&["check", wrong.to_str().unwrap()]);
    assert_eq!(out.code, 1);
    assert!(out.stdout.contains("inferred only"), "{}", out.stdout);
    assert_eq!(qtype(&["separable", "XXX & ZZI & IZZ", "--qubits", "1,2"]).code, 1);
    // 2: usage and parse errors.
    assert_eq!(qtype(&["frobnicate"]).code, 2);
    assert_eq!(qtype(&["normalize", "X + Y"]).code, 2);
    let bad = dir.join("bad.qt");
    fs::write(&bad, "QUBITS 2\nH 3\n").unwrap();
    let out = qtype(&["infer", bad.to_str().unwrap()]);
    assert_eq!(out.code, 2);
    assert!(out.stderr.contains('3'), "{}", out.stderr);
    assert_eq!(qtype(&["verify", &corpus("deutsch.qt")]).code, 2);
    // 3: outside the supported fragment.
    let deep = dir.join("deep.qt");
    fs::write(&deep, "QUBITS 3\nH 1; T 1; H 1; T 1; CNOT 1 2; H 2; T 2; CNOT 2 3; H 1; H 3; T 3\nMEAS 2\n").unwrap();
    let (code, report) = json(&["measure", deep.to_str().unwrap()]);
    assert_eq!(code, 3, "{report}");
    assert_eq!(report["verdict"], "unsupported");
    assert_eq!(qtype(&["verify", "--oracle", &corpus("steane_cnot.qt")]).code, 3);
    // Help is not an error.
    assert_eq!(qtype(&["--help"]).code, 0);
    fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn strict_mode_compares_raw_text() {
    // Normal forms agree but the raw inferred text differs from EXPECT.
    assert_eq!(qtype(&["check", &corpus("ghz_split.qt")]).code, 0);
    assert_eq!(qtype(&["check", "--strict", &corpus("ghz_split.qt")]).code, 1);
}

#[test]
fn gate_names_are_case_insensitive() {
    let dir = std::env::temp_dir().join(format!("qtype-case-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    let f = dir.join("t.qt");
    fs::write(&f, "QUBITS 2\nINIT XI & IX\nt 1; Tdg 1; cnot 1 2; h 2\nEXPECT XZ & IZ\n").unwrap();
    assert_eq!(qtype(&["check", f.to_str().unwrap()]).code, 0);
    fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn reports_carry_exact_types() {
    let (code, r) = json(&["infer", "--trace", &corpus("injection.qt")]);
    assert_eq!(code, 0);
    let inferred = type_from_json(&r["inferred"]).unwrap();
    let want = parse_type("Z@{1} & (rt2/2)(X + Y)@{2} | -Z@{1} & (rt2/2)(X - Y)@{2}").unwrap();
    assert!(types_equal(&inferred.normalized().unwrap(), &want.normalized().unwrap()));
    assert_eq!(r["trace"].as_array().unwrap().len(), 2);
    let outcomes = &r["probabilities"][0]["outcomes"][0]["outcomes"];
    for o in outcomes.as_array().unwrap() {
        assert_eq!(o["probability"], serde_json::json!({"a": 1, "b": 0, "k": 1}));
    }
}

#[test]
fn synthesized_files_check() {
    let dir = std::env::temp_dir().join(format!("qtype-synth-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    for (i, ty) in ["XX & ZZ", "XXI & ZZI & IIZ", "(rt2/2)(XX + YX) & ZZ", "-Y"].iter().enumerate() {
        let out = qtype(&["synth", ty]);
        assert_eq!(out.code, 0, "{ty}: {}", out.stderr);
        // The emitted file carries its own EXPECT clause.
        let f = dir.join(format!("s{i}.qt"));
        fs::write(&f, &out.stdout).unwrap();
        assert!(parse_program(&out.stdout).unwrap().expect.is_some());
        assert_eq!(qtype(&["check", f.to_str().unwrap()]).code, 0, "{}", out.stdout);
    }
    fs::remove_dir_all(&dir).unwrap();
}

fn golden(name: &str, args: &[&str]) {
    let mut all = vec!["--json"];
    all.extend_from_slice(args);
    let out = qtype(&all);
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(format!("{name}.json"));
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        fs::create_dir_all(path.parent().unwrap()).unwrap();
        fs::write(&path, &out.stdout).unwrap();
    }
    let want = fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    assert_eq!(out.stdout, want, "{name} drifted from its golden report");
}

#[test]
fn golden_reports() {
    golden("check_deutsch", &["check", &corpus("deutsch.qt")]);
    golden("measure_injection", &["measure", &corpus("injection.qt")]);
    golden("tbound_ccz", &["tbound", &corpus("ccz.qt")]);
    golden("separable_ghz_tail", &["separable", "XXI & ZZI & IIZ", "--qubits", "1,2"]);
    golden("normalize_example", &["normalize", "XXI & ZZI & ZZZ"]);
    golden("synth_one_t", &["synth", "(rt2/2)(XX + YX) & ZZ"]);
    golden("check_toffoli", &["check", &corpus("toffoli.qt")]);
}
