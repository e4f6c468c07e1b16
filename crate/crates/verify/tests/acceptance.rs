//! End-to-end acceptance suite. Each test prints one `PASS`/`FAIL` line for
//! its criterion on stderr, then asserts it.
//!
//! Run with `cargo test -p bdqbf-verify --test acceptance -- --nocapture`.

use std::io::Write;
use std::time::{Duration, Instant};

use bdqbf_core::dimacs::{emit_paired_sat, emit_qdimacs, parse_paired_sat, parse_qdimacs};
use bdqbf_core::game::{solve_positional, Convention, Side, Winner};
use bdqbf_core::hypergraph::{emit_hypergraph, parse_hypergraph, Hypergraph};
use bdqbf_core::qbf::solve_qbf2;
use bdqbf_verify::calibrate::{calibrate_cw_mapping, FrozenConfiguration};
use bdqbf_verify::families::{load_hypergraph_fixture, load_paired_sat_fixture, load_qbf_fixture};
use bdqbf_verify::gen::{gen_random_hypergraph, gen_random_paired_sat, gen_random_qbf, HypergraphParams, QbfParams};
use bdqbf_verify::{generate_sources, run_batch, Budgets, CheckStatus, ReductionKind, Source, VerificationReport};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

const SEED: u64 = 20_240_601;

fn verdict(criterion: u32, title: &str, pass: bool, detail: &str) {
    let tag = if pass { "PASS" } else { "FAIL" };
    // straight to stderr so the line shows even when output is captured
    let _ = writeln!(std::io::stderr(), "[acceptance] {tag} criterion {criterion:>2} {title}: {detail}");
}

fn counts(report: &VerificationReport, prefix: &str) -> (usize, usize, usize) {
    let mut c = (0, 0, 0);
    for r in report.records.iter().filter(|r| r.check.starts_with(prefix)) {
        match r.status {
            CheckStatus::Pass => c.0 += 1,
            CheckStatus::Fail => c.1 += 1,
            CheckStatus::Unknown => c.2 += 1,
        }
    }
    c
}

fn first_failure(report: &VerificationReport) -> String {
    report
        .failures()
        .next()
        .map(|r| format!("; first failure {} on {}: expected {}, observed {}", r.check, r.fingerprint, r.expected, r.observed))
        .unwrap_or_default()
}

fn qbf_sources(name: &str) -> Vec<Source> {
    load_qbf_fixture(name).unwrap().into_iter().map(Source::Qbf).collect()
}

fn qbf2_corpus() -> Vec<Source> {
    let mut corpus = qbf_sources("qbf2_exhaustive");
    corpus.extend(generate_sources(ReductionKind::Qbf2, SEED, 10_000).unwrap());
    corpus
}

#[test]
fn criterion_01_qbf2_matches_oracle() {
    let start = Instant::now();
    let corpus = qbf2_corpus();
    let frozen = FrozenConfiguration::default();
    let report = run_batch(ReductionKind::Qbf2, &corpus, &Budgets::default(), &frozen, true).unwrap();
    let (pass, fail, unknown) = counts(&report, "qbf2.agreement");
    let elapsed = start.elapsed();
    let ok = fail == 0 && unknown == 0 && pass == corpus.len() && elapsed < Duration::from_secs(300);
    let detail = format!(
        "{pass}/{} agree, {fail} disagree, {unknown} unknown, {:.1}s{}",
        corpus.len(),
        elapsed.as_secs_f64(),
        first_failure(&report)
    );
    verdict(1, "QBF-2 decider vs oracle", ok, &detail);
    assert!(ok, "{detail}");
}

fn median_solve_time(n: usize, runs: usize) -> Duration {
    let mut times: Vec<Duration> = (0..runs)
        .map(|k| {
            let f = gen_random_qbf(SEED + k as u64, &QbfParams::new(n, n, 3, 2).tautologies(0.05)).unwrap();
            let start = Instant::now();
            let sol = solve_qbf2(&f).unwrap();
            let t = start.elapsed();
            assert!(sol.outcome.winner.is_some());
            t
        })
        .collect();
    times.sort();
    times[runs / 2]
}

#[test]
fn criterion_02_qbf2_scaling() {
    let sizes = [1000, 2000, 4000];
    let times: Vec<Duration> = sizes.iter().map(|&n| median_solve_time(n, 5)).collect();
    let ratios: Vec<f64> = times.windows(2).map(|w| w[1].as_secs_f64() / w[0].as_secs_f64().max(1e-9)).collect();
    // a doubling that finishes under a millisecond is timer noise, not growth
    let ok = times.iter().all(|t| *t < Duration::from_secs(10))
        && ratios.iter().zip(&times[1..]).all(|(r, t)| *r <= 5.0 || *t < Duration::from_millis(1));
    let detail = format!(
        "median solve {} ; doubling ratios {}",
        sizes.iter().zip(&times).map(|(n, t)| format!("n={n}: {:.2}ms", t.as_secs_f64() * 1e3)).collect::<Vec<_>>().join(", "),
        ratios.iter().map(|r| format!("{r:.2}x")).collect::<Vec<_>>().join(", ")
    );
    verdict(2, "QBF-2 scaling", ok, &detail);
    assert!(ok, "{detail}");
}

#[test]
fn criterion_03_rule_soundness() {
    let corpus = qbf2_corpus();
    let frozen = FrozenConfiguration::default();
    let report = run_batch(ReductionKind::Qbf2, &corpus, &Budgets::default(), &frozen, true).unwrap();
    let (pass, fail, unknown) = counts(&report, "qbf2.rules");
    let ok = fail == 0 && unknown == 0 && pass == corpus.len();
    let detail = format!("{pass}/{} traces sound, {fail} with violations, {unknown} unknown{}", corpus.len(), first_failure(&report));
    verdict(3, "per-rule soundness", ok, &detail);
    assert!(ok, "{detail}");
}

#[test]
fn criterion_04_3qbf3_expansion() {
    let start = Instant::now();
    let sources = generate_sources(ReductionKind::ThreeQbfThree, SEED, 500).unwrap();
    let frozen = FrozenConfiguration::default();
    let report = run_batch(ReductionKind::ThreeQbfThree, &sources, &Budgets::default(), &frozen, true).unwrap();
    let class = counts(&report, "3qbf3.class");
    let outcome = counts(&report, "3qbf3.outcome");
    let elapsed = start.elapsed();
    let ok = class == (500, 0, 0) && outcome == (500, 0, 0) && elapsed < Duration::from_secs(600);
    let detail = format!(
        "class {}/500, outcome {}/500 ({} unknown), {:.1}s{}",
        class.0,
        outcome.0,
        outcome.2,
        elapsed.as_secs_f64(),
        first_failure(&report)
    );
    verdict(4, "3-QBF-3 expansion", ok, &detail);
    assert!(ok, "{detail}");
}

#[test]
fn criterion_05_avoider_enforcer() {
    let budgets = Budgets::default();
    let sources = generate_sources(ReductionKind::AvoiderEnforcer, SEED, 200).unwrap();
    let structural = run_batch(ReductionKind::AvoiderEnforcer, &sources, &budgets, &FrozenConfiguration::default(), false).unwrap();
    let structure_ok = !structural.has_failures() && structural.summary.unknown == 0;

    let family = load_qbf_fixture("ae_n1").unwrap();
    let frozen = FrozenConfiguration::calibrate(&family, &[], budgets.game_nodes);
    let (correspondence, calibration) = match frozen.ae {
        Some(config) => {
            let fam: Vec<Source> = family.into_iter().map(Source::Qbf).collect();
            let report = run_batch(ReductionKind::AvoiderEnforcer, &fam, &budgets, &frozen, true).unwrap();
            let c = counts(&report, "ae.outcome");
            (c.1 == 0 && c.2 == 0, format!("frozen [{config}], outcome {}/{} {}", c.0, fam.len(), first_failure(&report)))
        }
        None => (false, format!("no frozen configuration: {}", frozen.ae_finding.clone().unwrap_or_default())),
    };
    let ok = structure_ok && correspondence;
    let detail = format!(
        "structure {}/{} checks on 200 instances{}; calibration (strict, then monotone): {calibration}",
        structural.summary.pass,
        structural.summary.total,
        first_failure(&structural)
    );
    verdict(5, "Avoider-Enforcer construction", ok, &detail);
    assert!(ok, "{detail}");
}

#[test]
fn criterion_06_paired_sat() {
    let budgets = Budgets::default();
    let frozen = FrozenConfiguration::default();
    let sources = generate_sources(ReductionKind::PairedSat, SEED, 200).unwrap();
    let structural = run_batch(ReductionKind::PairedSat, &sources, &budgets, &frozen, false).unwrap();
    let degree = counts(&structural, "psat.degree");
    let family = qbf_sources("psat_sources");
    let report = run_batch(ReductionKind::PairedSat, &family, &budgets, &frozen, true).unwrap();
    let outcome = counts(&report, "psat.outcome");
    let ok = degree == (200, 0, 0) && !structural.has_failures() && outcome == (family.len(), 0, 0);
    let detail = format!(
        "degree <= 7 on {}/200, outcome {}/{} ({} unknown){}{}",
        degree.0,
        outcome.0,
        family.len(),
        outcome.2,
        first_failure(&structural),
        first_failure(&report)
    );
    verdict(6, "Paired-SAT reduction", ok, &detail);
    assert!(ok, "{detail}");
}

#[test]
fn criterion_07_client_waiter() {
    let budgets = Budgets::default();
    let sources = generate_sources(ReductionKind::ClientWaiter, SEED, 200).unwrap();
    let structural = run_batch(ReductionKind::ClientWaiter, &sources, &budgets, &FrozenConfiguration::default(), false).unwrap();
    let structure_ok = !structural.has_failures();

    let n1 = load_paired_sat_fixture("cw_n1").unwrap();
    let calibration = calibrate_cw_mapping(&n1, budgets.game_nodes);
    let frozen = FrozenConfiguration::calibrate(&[], &n1, budgets.game_nodes);
    let detail_cal = match &calibration {
        Ok(c) => format!("frozen [{}] on {} boards", c.frozen, c.samples),
        Err(e) => format!("calibration failed: {e}"),
    };
    let (n1_counts, n2_counts, extra) = if frozen.cw.is_some() {
        let fam: Vec<Source> = n1.into_iter().map(Source::PairedSat).collect();
        let r1 = run_batch(ReductionKind::ClientWaiter, &fam, &budgets, &frozen, true).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(SEED);
        let n2: Vec<Source> = (0..100)
            .map(|_| {
                let m = rng.gen_range(1..=5);
                Source::PairedSat(gen_random_paired_sat(rng.gen(), 2, m, 3, 7).unwrap())
            })
            .collect();
        let n2_budgets = Budgets { game_nodes: 20_000_000, ..budgets };
        let r2 = run_batch(ReductionKind::ClientWaiter, &n2, &n2_budgets, &frozen, true).unwrap();
        let decided = |r: &VerificationReport| {
            let a = counts(r, "cw.outcome");
            let b = counts(r, "cw.shortcut");
            (a.0 + b.0, a.1 + b.1, a.2 + b.2)
        };
        (decided(&r1), decided(&r2), format!("{}{}", first_failure(&r1), first_failure(&r2)))
    } else {
        ((0, 0, 0), (0, 0, 0), String::new())
    };
    let ok = structure_ok
        && frozen.cw.is_some()
        && n1_counts.1 == 0
        && n1_counts.2 == 0
        && n1_counts.0 == 256
        && n2_counts.1 == 0;
    let detail = format!(
        "structure {}/{} checks{}; {detail_cal}; n=1 {}/256 agree; n=2 {} agree, {} disagree, {} unknown{extra}",
        structural.summary.pass,
        structural.summary.total,
        first_failure(&structural),
        n1_counts.0,
        n2_counts.0,
        n2_counts.1,
        n2_counts.2
    );
    verdict(7, "Client-Waiter construction", ok, &detail);
    assert!(ok, "{detail}");
}

#[test]
fn criterion_08_maker_breaker_bounded_degree() {
    let budgets = Budgets { seed: SEED, ..Budgets::default() };
    let sources = generate_sources(ReductionKind::MbBounded, SEED, 100).unwrap();
    let report = run_batch(ReductionKind::MbBounded, &sources, &budgets, &FrozenConfiguration::default(), true).unwrap();
    let structure: Vec<(usize, usize, usize)> =
        ["mb.degree", "mb.rank", "mb.big_edges", "mb.tree_leaves"].iter().map(|c| counts(&report, c)).collect();
    let pairing = counts(&report, "mb.pairing");
    let playouts = counts(&report, "mb.playouts");
    let ok = structure.iter().all(|c| *c == (100, 0, 0)) && pairing.1 + pairing.2 == 0 && playouts.1 + playouts.2 == 0
        && pairing.0 + playouts.0 == 100;
    let detail = format!(
        "structure {:?}; Breaker-win sources fully paired {}/{}; Maker-win sources with {} MakerWin playouts {}/{}{}",
        structure.iter().map(|c| c.0).collect::<Vec<_>>(),
        pairing.0,
        pairing.0 + pairing.1 + pairing.2,
        budgets.playouts,
        playouts.0,
        playouts.0 + playouts.1 + playouts.2,
        first_failure(&report)
    );
    verdict(8, "Maker-Breaker bounded degree", ok, &detail);
    assert!(ok, "{detail}");
}

#[test]
fn criterion_09_maker_maker() {
    let family: Vec<Source> = load_hypergraph_fixture("mm_sources").unwrap().into_iter().map(Source::Hypergraph).collect();
    let report = run_batch(ReductionKind::MakerMaker, &family, &Budgets::default(), &FrozenConfiguration::default(), true).unwrap();
    let outcome = counts(&report, "mm.outcome");
    let second = counts(&report, "mm.no_second_win");
    let ok = !report.has_failures() && report.summary.unknown == 0 && outcome.0 == family.len();
    let detail = format!(
        "{} sources, structure and outcome {}/{} checks, equivalence {}/{}, SecondWin {} times{}",
        family.len(),
        report.summary.pass,
        report.summary.total,
        outcome.0,
        family.len(),
        second.1,
        first_failure(&report)
    );
    verdict(9, "Maker-Maker construction", ok, &detail);
    assert!(ok, "{detail}");
}

/// Random hypergraph `h` and `h` plus one extra hyperedge.
fn hypergraph_pair(seed: u64) -> (Hypergraph, Hypergraph) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(2..=7);
    let m = rng.gen_range(0..=4);
    let p = HypergraphParams { num_vertices: n, num_edges: m, min_edge: 1, max_edge: n.min(4) };
    let small = gen_random_hypergraph(rng.gen(), &p).unwrap();
    let extra = gen_random_hypergraph(rng.gen(), &HypergraphParams { num_edges: 1, ..p }).unwrap();
    let mut large = small.clone();
    large.add_edge(extra.edge(0).to_vec()).unwrap();
    (small, large)
}

/// Counts pairs where the larger board flips `from` into `to` (or the
/// smaller one, with `deleting`), plus unsolved pairs.
fn monotonicity(conv: Convention, salt: u64, from: Winner, to: Winner, deleting: bool) -> (usize, usize) {
    let results: Vec<Option<bool>> = (0..500u64)
        .into_par_iter()
        .map(|k| {
            let (small, large) = hypergraph_pair(SEED ^ salt ^ k.wrapping_mul(0x9e37_79b9));
            let a = solve_positional(&small, conv, 2_000_000).winner?;
            let b = solve_positional(&large, conv, 2_000_000).winner?;
            let (before, after) = if deleting { (b, a) } else { (a, b) };
            Some(before == from && after == to)
        })
        .collect();
    let violations = results.iter().filter(|r| **r == Some(true)).count();
    let unknown = results.iter().filter(|r| r.is_none()).count();
    (violations, unknown)
}

fn round_trip_failures() -> (usize, usize) {
    let mut total = 0;
    let mut bad = 0;
    let mut check = |ok: bool| {
        total += 1;
        bad += usize::from(!ok);
    };
    let mut formulas = Vec::new();
    for name in ["qbf2_exhaustive", "ae_n1", "psat_sources"] {
        formulas.extend(load_qbf_fixture(name).unwrap());
    }
    let mut psat = load_paired_sat_fixture("cw_n1").unwrap();
    let mut graphs = load_hypergraph_fixture("mm_sources").unwrap();
    for kind in ReductionKind::ALL {
        for s in generate_sources(kind, SEED, 200).unwrap() {
            match s {
                Source::Qbf(f) => formulas.push(f),
                Source::PairedSat(p) => psat.push(p),
                Source::Hypergraph(h) => graphs.push(h),
            }
        }
    }
    for seed in 0..1000 {
        formulas.push(gen_random_qbf(seed, &QbfParams::new(6, 8, 3, 3).tautologies(0.1)).unwrap());
    }
    for f in &formulas {
        let text = emit_qdimacs(f);
        check(parse_qdimacs(&text).map(|g| g == *f && emit_qdimacs(&g) == text).unwrap_or(false));
    }
    for p in &psat {
        let text = emit_paired_sat(p);
        check(parse_paired_sat(&text).map(|q| q == *p && emit_paired_sat(&q) == text).unwrap_or(false));
    }
    for h in &graphs {
        let text = emit_hypergraph(h);
        check(parse_hypergraph(&text).map(|g| g.num_vertices() == h.num_vertices() && g.edges() == h.edges() && emit_hypergraph(&g) == text).unwrap_or(false));
    }
    (bad, total)
}

#[test]
fn criterion_10_engine_sanity() {
    let mb = monotonicity(Convention::maker_breaker(), 1, Winner::MakerWin, Winner::BreakerWin, false);
    let mb_del = monotonicity(Convention::maker_breaker(), 2, Winner::BreakerWin, Winner::MakerWin, true);
    let ae = monotonicity(Convention::avoider_enforcer(Side::Primary), 3, Winner::AvoiderWin, Winner::EnforcerWin, true);
    let cw = monotonicity(Convention::client_waiter(), 4, Winner::ClientWin, Winner::WaiterWin, false);
    let (bad, total) = round_trip_failures();
    let all = [mb, mb_del, ae, cw];
    let ok = all.iter().all(|(v, u)| *v == 0 && *u == 0) && bad == 0;
    let detail = format!(
        "violations/unknown over 500 pairs: MB add {:?}, MB delete {:?}, AE delete {:?}, CW add {:?}; round-trip {}/{} identical",
        mb,
        mb_del,
        ae,
        cw,
        total - bad,
        total
    );
    verdict(10, "engine sanity", ok, &detail);
    assert!(ok, "{detail}");
}
