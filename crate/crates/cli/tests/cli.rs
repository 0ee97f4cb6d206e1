//! End-to-end tests of the command-line surface: golden reduction chains,
//! the exit-code contract, and cache behaviour.

use std::process::{Command, Output};

fn hermite(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hermite"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).trim().to_string()
}

#[test]
fn golden_reduction_chains() {
    let cases = [
        (
            vec!["reduce", "(~4,2)", "-d", "2", "--stop", "3"],
            "(~4,2) -> (~3,3) -> (~2,2,1) -> (~2)",
        ),
        (
            vec!["reduce", "(~5,3)", "-d", "3", "-v", "1,3,2", "--stop", "6"],
            "(~5,3) -(1,3,2)-> (~3,3,2,1) -> (~3)",
        ),
        (
            vec![
                "reduce", "(~6,6,3)", "-d", "3", "-v", "1,3,2", "--stop", "18",
            ],
            "(~6,6,3) -(1,3,2)-> (~5,5,3,1) -> (~5,3)",
        ),
        (
            vec!["reduce", "(~6,4,3,2)", "-d", "3", "--stop", "6"],
            "(~6,4,3,2) -> (~6,3) -> (~4,4,4) -> (~3,3,2,1) -> (~3)",
        ),
        (
            vec!["reduce", "(~5,5,5,5)", "-d", "3", "--stop", "18"],
            "(~5,5,5,5) -> (~5,4,3,2) -> (~5,3)",
        ),
    ];
    for (args, expected) in cases {
        let out = hermite(&args);
        assert!(out.status.success(), "args {args:?}");
        assert_eq!(stdout(&out), expected, "args {args:?}");
    }
}

#[test]
fn reduce_defaults_to_one_node() {
    let out = hermite(&["reduce", "(~4,2)", "-d", "2"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "(~4,2) -> (~3,3) -> (~2,2,1) -> (~2)");
}

#[test]
fn reduce_reports_irreducible_diagrams() {
    let out = hermite(&["reduce", "(~3,1,1)", "-d", "2"]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("not 2-reducible"), "stderr: {err}");
}

#[test]
fn check_exit_codes() {
    // correct problem
    let out = hermite(&["check", "--nodes", "F2x3", "--onestep"]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    // certified incorrect (small exact fallback)
    let out = hermite(&["check", "--nodes", "F2x2", "--onestep"]);
    assert_eq!(out.status.code(), Some(2), "{}", stdout(&out));
    // probabilistic negative
    let out = hermite(&["check", "--nodes", "F2x5", "--onestep"]);
    assert_eq!(out.status.code(), Some(3), "{}", stdout(&out));
    // single Lagrange node with explicit basis
    let out = hermite(&["check", "--nodes", "F1x1", "--basis", "(1)"]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    // usage error
    let out = hermite(&["check", "--nodes", "Fx", "--onestep"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn identical_invocations_are_byte_identical() {
    let a = hermite(&["check", "--nodes", "F3x4", "--onestep", "--format", "json"]);
    let b = hermite(&["check", "--nodes", "F3x4", "--onestep", "--format", "json"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn cache_hits_preserve_verdicts() {
    let dir = std::env::temp_dir().join(format!("hermite-cache-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let cache = dir.join("verdicts.jsonl");
    let cache_arg = cache.to_str().unwrap();

    let first = hermite(&[
        "check",
        "--nodes",
        "F2x4",
        "--onestep",
        "--cache",
        cache_arg,
    ]);
    assert_eq!(first.status.code(), Some(0));
    assert!(!stdout(&first).contains("cached"));

    let second = hermite(&[
        "check",
        "--nodes",
        "F2x4",
        "--onestep",
        "--cache",
        cache_arg,
    ]);
    assert_eq!(second.status.code(), Some(0));
    assert!(stdout(&second).contains("cached"), "{}", stdout(&second));

    // one record per line, append-only
    let contents = std::fs::read_to_string(&cache).unwrap();
    assert_eq!(contents.lines().count(), 1);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn tables_counts_smoke() {
    let out = hermite(&["tables", "counts", "--d", "2..4", "--nodes", "6"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("d,k,count"));
    // Counts of proper diagrams under the normalize-based predicate.
    assert_eq!(lines.next(), Some("2,6,3"));
    assert_eq!(lines.next(), Some("3,6,11"));
    assert_eq!(lines.next(), Some("4,6,44"));
}

#[test]
fn tables_triples_golden() {
    let out = hermite(&["tables", "triples"]);
    assert!(out.status.success());
    let expected = "\
(0,0,2)
(0,0,5)
(0,1,1)
(0,1,2)
(0,1,4)
(0,2,0)
(0,3,2)
(0,5,0)
(1,0,2)
(1,1,1)
(1,1,4)
(2,0,2)
(3,0,2)";
    assert_eq!(stdout(&out), expected);
}

#[test]
fn tables_rmk_bounds_smoke() {
    let out = hermite(&["tables", "rmk-bounds", "--max", "2", "--format", "csv"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("0,0,6"));
    assert!(text.contains("1,0,12"));
    assert!(text.contains("2,0,30"));
    assert!(text.contains("2,2,18"));

    let out = hermite(&["tables", "rmk-bounds", "--max", "1"]);
    let text = stdout(&out);
    assert!(text.lines().next().unwrap().starts_with("m=0"));
}

#[test]
fn tables_rmk_exact_rows() {
    let out = hermite(&["tables", "rmk", "--max", "2", "--format", "csv"]);
    assert!(out.status.success());
    let text = stdout(&out);
    for line in ["0,0,0", "1,0,0", "1,1,5", "2,0,3", "2,1,5", "2,2,5"] {
        assert!(text.contains(line), "missing {line} in {text}");
    }
}

#[test]
fn rejects_composite_prime() {
    let out = hermite(&[
        "check",
        "--nodes",
        "F1x1",
        "--onestep",
        "--prime",
        "4611686018427387846",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("prime"));
}

#[test]
fn enumerate_lists_diagrams() {
    let out = hermite(&["enumerate", "-d", "2", "--nodes", "6", "--filter", "proper"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines, vec!["(~4,4,4)", "(~5,2,1)", "(~5,3)"]);
}

#[test]
fn basis_output() {
    let out = hermite(&["basis", "--nodes", "F1x2"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "(0,0) (1,0)");
}
