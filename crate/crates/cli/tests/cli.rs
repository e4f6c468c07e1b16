use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use bdqbf_core::dimacs::parse_qdimacs;
use bdqbf_core::formula::{check_class, ClassBounds};
use bdqbf_core::hypergraph::parse_hypergraph;
use proptest::prelude::*;

fn bdqbf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bdqbf")).args(args).output().expect("binary runs")
}

fn bdqbf_stdin(args: &[&str], input: &str) -> Output {
    use std::io::Write;
    use std::process::Stdio;
    let mut child = Command::new(env!("CARGO_BIN_EXE_bdqbf"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

/// Scratch directory per test, wiped on creation.
fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("bdqbf-cli-{}-{name}", std::process::id()));
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn put(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn universal_unit_is_false() {
    let dir = scratch("forall");
    let f = put(&dir, "f.qdimacs", "p cnf 1 1\na 1 0\n1 0\n");
    let o = bdqbf(&["solve", "--qbf", &f]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "FALSE\n");

    let g = put(&dir, "g.qdimacs", "p cnf 1 1\ne 1 0\n1 0\n");
    assert_eq!(stdout(&bdqbf(&["solve", "--qbf", &g])), "TRUE\n");
}

#[test]
fn solve_paired_sat_and_games() {
    let dir = scratch("solve");
    let p = put(&dir, "p.psat", "p psat 2 1 1\nd 1 2 0\n-2 0\n");
    assert_eq!(stdout(&bdqbf(&["solve", "--psat", &p])), "FALSE\n");

    let tri = put(&dir, "tri.pos", "p pos 3 3\n1 2 0\n1 3 0\n2 3 0\n");
    assert_eq!(stdout(&bdqbf(&["solve", "--game", "mb", &tri])), "MakerWin\n");
    assert_eq!(stdout(&bdqbf(&["solve", "--game", "mb", "--first", "breaker", &tri])), "BreakerWin\n");
    assert_eq!(stdout(&bdqbf(&["solve", "--game", "mm", &tri])), "FirstWin\n");
    assert_eq!(stdout(&bdqbf(&["solve", "--game", "ae", &tri])), "EnforcerWin\n");
    assert_eq!(stdout(&bdqbf(&["solve", "--game", "ae", "--first", "enforcer", &tri])), "AvoiderWin\n");
    assert_eq!(stdout(&bdqbf(&["solve", "--game", "cw", &tri])), "ClientWin\n");
    assert_eq!(stdout(&bdqbf(&["solve", "--game", "cw", "--lone-vertex", "waiter", &tri])), "WaiterWin\n");

    let fork = put(&dir, "fork.pos", "p pos 3 2\n1 2 0\n1 3 0\n");
    assert_eq!(stdout(&bdqbf(&["solve", "--game", "ae", "--ae-rule", "monotone", &fork])), "AvoiderWin\n");
}

#[test]
fn reduce_3qbf3_lands_in_class() {
    let dir = scratch("reduce");
    let src = dir.join("src.qdimacs");
    let o = bdqbf(&[
        "gen", "qbf", "--seed", "11", "--vars", "8", "--clauses", "9", "--max-degree", "3", "--out",
        src.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let out = dir.join("out.qdimacs");
    let trace = dir.join("trace.json");
    let o = bdqbf(&[
        "reduce", "--kind", "3qbf3", "--in", src.to_str().unwrap(), "--out", out.to_str().unwrap(), "--trace",
        trace.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let f = parse_qdimacs(&fs::read_to_string(&out).unwrap()).unwrap();
    assert!(check_class(&f, ClassBounds::exact(3, 3)).passes());
    let t: serde_json::Value = serde_json::from_str(&fs::read_to_string(&trace).unwrap()).unwrap();
    assert!(t.get("split").is_some());

    let a = bdqbf(&["solve", "--qbf", src.to_str().unwrap()]);
    let b = bdqbf(&["solve", "--qbf", out.to_str().unwrap()]);
    assert_eq!(stdout(&a), stdout(&b));
}

#[test]
fn reduce_game_kinds_emit_hypergraphs() {
    let dir = scratch("games");
    let h = put(&dir, "h.pos", "p pos 4 2\n1 2 3 0\n3 4 0\n");
    for kind in ["mb_bounded", "mm"] {
        let out = dir.join(format!("{kind}.pos"));
        let o = bdqbf(&["reduce", "--kind", kind, "--in", &h, "--out", out.to_str().unwrap()]);
        assert!(o.status.success(), "{kind}: {}", String::from_utf8_lossy(&o.stderr));
        parse_hypergraph(&fs::read_to_string(&out).unwrap()).unwrap();
    }
    let q = put(&dir, "q.qdimacs", "p cnf 2 2\ne 1 0\na 2 0\n1 2 0\n-1 -2 0\n");
    for kind in ["ae", "psat", "alternation", "normalize"] {
        let out = dir.join(format!("{kind}.out"));
        let o = bdqbf(&["reduce", "--kind", kind, "--in", &q, "--out", out.to_str().unwrap()]);
        assert!(o.status.success(), "{kind}: {}", String::from_utf8_lossy(&o.stderr));
    }
}

#[test]
fn verify_mb_bounded_passes_and_is_deterministic() {
    let args = ["verify", "--kind", "mb_bounded", "--seed", "7", "--count", "50"];
    let a = bdqbf(&args);
    assert_eq!(a.status.code(), Some(0), "{}", String::from_utf8_lossy(&a.stderr));
    let report: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(report["summary"]["fail"], 0);
    let b = bdqbf(&["--jobs", "1", "verify", "--kind", "mb_bounded", "--seed", "7", "--count", "50"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn verify_without_calibration_fails_with_a_record() {
    let o = bdqbf(&["verify", "--kind", "ae", "--seed", "1", "--count", "2"]);
    assert_eq!(o.status.code(), Some(1));
    let report: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let recs = report["records"].as_array().unwrap();
    assert!(recs.iter().any(|r| r["check"] == "ae.calibration" && r["status"] == "fail"));

    let o = bdqbf(&["verify", "--kind", "ae", "--seed", "1", "--count", "2", "--structure-only"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn exit_codes() {
    let dir = scratch("exit");
    assert_eq!(bdqbf(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(bdqbf(&["verify", "--kind", "nope"]).status.code(), Some(2));
    assert_eq!(bdqbf(&["solve", "--qbf", dir.join("missing").to_str().unwrap()]).status.code(), Some(2));
    let bad = put(&dir, "bad.qdimacs", "p cnf 1 1\n2 0\n");
    assert_eq!(bdqbf(&["solve", "--qbf", &bad]).status.code(), Some(2));

    let pairs = put(&dir, "pairs.pos", "p pos 10 5\n1 2 0\n3 4 0\n5 6 0\n7 8 0\n9 10 0\n");
    let o = bdqbf(&["solve", "--game", "mm", "--budget", "5", &pairs]);
    assert_eq!(o.status.code(), Some(3));
    assert!(o.stdout.is_empty());

    // the Client-Waiter construction refuses a clause over Falsifier variables only
    let p = put(&dir, "p.psat", "p psat 2 1 1\nd 1 2 0\n-2 0\n");
    let out = dir.join("o.pos");
    assert_eq!(bdqbf(&["reduce", "--kind", "cw", "--in", &p, "--out", out.to_str().unwrap()]).status.code(), Some(1));
}

#[test]
fn stats_reports_each_format() {
    let dir = scratch("stats");
    let q = put(&dir, "q.qdimacs", "p cnf 3 2\ne 1 0\na 2 0\ne 3 0\n1 2 3 0\n-1 0\n");
    let v: serde_json::Value = serde_json::from_slice(&bdqbf(&["stats", &q]).stdout).unwrap();
    assert_eq!((v["rank"].as_u64(), v["max_degree"].as_u64()), (Some(3), Some(2)));
    assert_eq!(v["prefix"], "eae");
    assert_eq!(v["quantifier_blocks"], 3);

    let p = put(&dir, "p.psat", "p psat 4 1 2\nd 1 2 0\nd 3 4 0\n1 -4 0\n");
    let v: serde_json::Value = serde_json::from_slice(&bdqbf(&["stats", &p]).stdout).unwrap();
    assert_eq!(v["pairs"], 2);

    let h = put(&dir, "h.pos", "p pos 4 1\n1 2 0\n");
    let v: serde_json::Value = serde_json::from_slice(&bdqbf(&["stats", &h]).stdout).unwrap();
    assert_eq!(v["isolated_vertices"], 2);

    let none = put(&dir, "none.txt", "hello\n");
    assert_eq!(bdqbf(&["stats", &none]).status.code(), Some(2));
}

#[test]
fn play_against_the_solver() {
    let dir = scratch("play");
    let edge = put(&dir, "e.pos", "p pos 2 1\n1 2 0\n");
    let o = bdqbf_stdin(&["play", "--game", "mb", &edge], "7\n1\n");
    let text = stdout(&o);
    assert!(o.status.success());
    assert!(text.contains("illegal"), "{text}");
    assert!(text.contains("Breaker plays 2"), "{text}");
    assert!(text.trim_end().ends_with("BreakerWin"), "{text}");

    // the solver as Maker on a triangle never lets the human win
    let tri = put(&dir, "tri.pos", "p pos 3 3\n1 2 0\n1 3 0\n2 3 0\n");
    let o = bdqbf_stdin(&["play", "--game", "mb", "--as", "breaker", &tri], "2\n");
    assert!(stdout(&o).trim_end().ends_with("MakerWin"), "{}", stdout(&o));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn gen_is_seed_deterministic(seed in 0u64..1000, vars in 1usize..10, clauses in 0usize..10) {
        let args = |s: u64| {
            vec![
                "gen".to_string(), "qbf".into(), "--seed".into(), s.to_string(), "--vars".into(), vars.to_string(),
                "--clauses".into(), clauses.to_string(), "--max-degree".into(), "3".into(),
            ]
        };
        prop_assume!(clauses <= vars);
        let run = |s| Command::new(env!("CARGO_BIN_EXE_bdqbf")).args(args(s)).output().unwrap();
        let a = run(seed);
        prop_assert!(a.status.success());
        prop_assert_eq!(&a.stdout, &run(seed).stdout);
        let f = parse_qdimacs(std::str::from_utf8(&a.stdout).unwrap()).unwrap();
        prop_assert_eq!(f.num_vars(), vars);
        prop_assert!(check_class(&f, ClassBounds::new(3, 3)).passes());
    }
}
