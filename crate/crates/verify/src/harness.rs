//! Per-instance verification of the decider and the reductions: structural
//! bounds always, outcome equality when both sides solve within budget, and
//! strategy-level checks for the bounded-degree Maker-Breaker board.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use bdqbf_core::dimacs::{emit_paired_sat, emit_qdimacs};
use bdqbf_core::formula::{check_class, degree_profile, ClassBounds, PairedSatInstance, QbfFormula};
use bdqbf_core::gadgets::{
    breaker_pairing, cw_falsifier_only_clause, maker_forcing_playout, mb_to_bounded_degree, mb_to_maker_maker,
    pairing_coverage, paired_sat_to_client_waiter, qbf3_to_avoider_enforcer, BreakerPolicy, MbGadgetTrace,
    PlayoutResult, SourceStrategy,
};
use bdqbf_core::game::{
    bits, solve_positional, terminal_value, Board, Convention, GamePosition, Side, SolveOptions, Solver, Winner,
};
use bdqbf_core::hypergraph::{emit_hypergraph, Hypergraph};
use bdqbf_core::qbf::{apply_rule, solve_paired_sat, solve_qbf2, solve_qbf_oracle, QbfOutcome, Verdict};
use bdqbf_core::transform::{
    is_alternating, normalize_3qbf, pad_alternation, qbf_to_paired_sat, to_3qbf3, AlternationPattern,
};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::calibrate::FrozenConfiguration;
use crate::gen::{gen_random_hypergraph, gen_random_paired_sat, gen_random_qbf, GenError, HypergraphParams, QbfParams};
use crate::report::{fingerprint, CheckRecord, CheckStatus, VerificationReport};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ReductionKind {
    /// The degree-two decider against the oracle, rule by rule.
    Qbf2,
    Normalize,
    ThreeQbfThree,
    Alternation,
    PairedSat,
    AvoiderEnforcer,
    ClientWaiter,
    MbBounded,
    MakerMaker,
}

impl ReductionKind {
    pub const ALL: [ReductionKind; 9] = [
        ReductionKind::Qbf2,
        ReductionKind::Normalize,
        ReductionKind::ThreeQbfThree,
        ReductionKind::Alternation,
        ReductionKind::PairedSat,
        ReductionKind::AvoiderEnforcer,
        ReductionKind::ClientWaiter,
        ReductionKind::MbBounded,
        ReductionKind::MakerMaker,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ReductionKind::Qbf2 => "qbf2",
            ReductionKind::Normalize => "normalize",
            ReductionKind::ThreeQbfThree => "3qbf3",
            ReductionKind::Alternation => "alternation",
            ReductionKind::PairedSat => "psat",
            ReductionKind::AvoiderEnforcer => "ae",
            ReductionKind::ClientWaiter => "cw",
            ReductionKind::MbBounded => "mb_bounded",
            ReductionKind::MakerMaker => "mm",
        }
    }

    fn source_kind(self) -> &'static str {
        match self {
            ReductionKind::ClientWaiter => "Paired-SAT",
            ReductionKind::MbBounded | ReductionKind::MakerMaker => "hypergraph",
            _ => "QBF",
        }
    }
}

impl fmt::Display for ReductionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ReductionKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ReductionKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| {
                let names: Vec<&str> = ReductionKind::ALL.iter().map(|k| k.name()).collect();
                format!("unknown kind `{s}` (expected one of {})", names.join(", "))
            })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Source {
    Qbf(QbfFormula),
    PairedSat(PairedSatInstance),
    Hypergraph(Hypergraph),
}

impl Source {
    pub fn canonical_text(&self) -> String {
        match self {
            Source::Qbf(f) => emit_qdimacs(f),
            Source::PairedSat(p) => emit_paired_sat(p),
            Source::Hypergraph(h) => emit_hypergraph(h),
        }
    }

    pub fn fingerprint(&self) -> String {
        fingerprint(&self.canonical_text())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budgets {
    pub qbf_nodes: u64,
    pub game_nodes: u64,
    /// Forcing playouts per Maker-win source.
    pub playouts: usize,
    /// Source games played out per Breaker-win source to obtain pairings.
    pub pairing_games: usize,
    pub seed: u64,
    pub timings: bool,
}

impl Default for Budgets {
    fn default() -> Self {
        Budgets { qbf_nodes: 50_000_000, game_nodes: 2_000_000, playouts: 200, pairing_games: 20, seed: 0, timings: false }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HarnessError {
    #[error("{kind} expects a {expected} source")]
    WrongSource { kind: ReductionKind, expected: &'static str },
    #[error("{kind} source violates a precondition: {reason}")]
    Precondition { kind: ReductionKind, reason: String },
    #[error("{kind} outcome checks need a frozen configuration ({finding})")]
    NotCalibrated { kind: ReductionKind, finding: String },
    #[error(transparent)]
    Gen(#[from] GenError),
}

struct Ctx<'a> {
    kind: ReductionKind,
    fp: String,
    budgets: &'a Budgets,
    records: Vec<CheckRecord>,
}

impl Ctx<'_> {
    fn push(&mut self, r: CheckRecord) {
        self.records.push(r);
    }

    fn bound(&mut self, check: &str, observed: usize, max: usize) {
        let status = if observed <= max { CheckStatus::Pass } else { CheckStatus::Fail };
        self.push(CheckRecord::new(check, &self.fp, format!("<= {max}"), observed, status));
    }

    fn equal<T: PartialEq + ToString>(&mut self, check: &str, expected: T, observed: T) {
        self.push(CheckRecord::compare(check, &self.fp, expected, observed));
    }

    fn truth(&mut self, check: &str, expected: &QbfOutcome, observed: Option<bool>, nodes: u64) {
        let label = |t: Option<bool>| t.map_or("unknown".to_string(), |t| t.to_string());
        let exp = expected.winner.map(|w| w.is_true());
        let status = match (exp, observed) {
            (Some(a), Some(b)) if a == b => CheckStatus::Pass,
            (Some(_), Some(_)) => CheckStatus::Fail,
            _ => CheckStatus::Unknown,
        };
        self.push(CheckRecord::new(check, &self.fp, label(exp), label(observed), status).with_nodes(expected.nodes_explored + nodes));
    }

    fn precondition(&self, reason: impl ToString) -> HarnessError {
        HarnessError::Precondition { kind: self.kind, reason: reason.to_string() }
    }
}

/// Runs every check of `kind` on `source`. With `outcomes` false only the
/// structural checks run, which never need a frozen configuration.
pub fn verify_reduction(
    kind: ReductionKind,
    source: &Source,
    budgets: &Budgets,
    frozen: &FrozenConfiguration,
    outcomes: bool,
) -> Result<Vec<CheckRecord>, HarnessError> {
    let start = Instant::now();
    let mut ctx = Ctx { kind, fp: source.fingerprint(), budgets, records: Vec::new() };
    match (kind, source) {
        (ReductionKind::Qbf2, Source::Qbf(f)) => check_qbf2(&mut ctx, f)?,
        (ReductionKind::Normalize, Source::Qbf(f)) => check_normalize(&mut ctx, f, outcomes)?,
        (ReductionKind::ThreeQbfThree, Source::Qbf(f)) => check_3qbf3(&mut ctx, f, outcomes)?,
        (ReductionKind::Alternation, Source::Qbf(f)) => check_alternation(&mut ctx, f, outcomes),
        (ReductionKind::PairedSat, Source::Qbf(f)) => check_psat(&mut ctx, f, outcomes)?,
        (ReductionKind::AvoiderEnforcer, Source::Qbf(f)) => check_ae(&mut ctx, f, frozen, outcomes)?,
        (ReductionKind::ClientWaiter, Source::PairedSat(p)) => check_cw(&mut ctx, p, frozen, outcomes)?,
        (ReductionKind::MbBounded, Source::Hypergraph(h)) => check_mb(&mut ctx, h, outcomes)?,
        (ReductionKind::MakerMaker, Source::Hypergraph(h)) => check_mm(&mut ctx, h, outcomes),
        _ => return Err(HarnessError::WrongSource { kind, expected: kind.source_kind() }),
    }
    if budgets.timings {
        let ms = start.elapsed().as_secs_f64() * 1e3;
        for r in &mut ctx.records {
            r.elapsed_ms = Some(ms);
        }
    }
    Ok(ctx.records)
}

/// Checks every source in parallel and assembles one report.
pub fn run_batch(
    kind: ReductionKind,
    sources: &[Source],
    budgets: &Budgets,
    frozen: &FrozenConfiguration,
    outcomes: bool,
) -> Result<VerificationReport, HarnessError> {
    let results: Result<Vec<Vec<CheckRecord>>, HarnessError> =
        sources.par_iter().map(|s| verify_reduction(kind, s, budgets, frozen, outcomes)).collect();
    let mut report = VerificationReport::new(kind.name(), frozen.clone());
    report.extend(results?.into_iter().flatten());
    Ok(report)
}

fn qbf_source(seed: u64, vars: std::ops::RangeInclusive<usize>, clauses: std::ops::RangeInclusive<usize>, rank: usize, degree: usize, taut: f64) -> Result<Source, GenError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(vars);
    let m = rng.gen_range(clauses).min(n * degree);
    Ok(Source::Qbf(gen_random_qbf(rng.gen(), &QbfParams::new(n, m, rank, degree).tautologies(taut))?))
}

/// Seeded random sources sized so that both sides of the kind's outcome
/// check usually solve exactly.
pub fn generate_sources(kind: ReductionKind, seed: u64, count: usize) -> Result<Vec<Source>, HarnessError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    (0..count)
        .map(|_| {
            let s: u64 = rng.gen();
            let source = match kind {
                ReductionKind::Qbf2 => qbf_source(s, 1..=14, 0..=20, 3, 2, 0.1)?,
                ReductionKind::Normalize | ReductionKind::ThreeQbfThree => qbf_source(s, 1..=3, 0..=3, 3, 3, 0.0)?,
                ReductionKind::Alternation => qbf_source(s, 1..=6, 0..=5, 3, 3, 0.0)?,
                ReductionKind::PairedSat => qbf_source(s, 1..=4, 0..=4, 3, 3, 0.0)?,
                ReductionKind::AvoiderEnforcer => qbf_source(s, 1..=8, 0..=8, 3, 3, 0.0)?,
                ReductionKind::ClientWaiter => {
                    let mut r = ChaCha8Rng::seed_from_u64(s);
                    let pairs = r.gen_range(1..=3);
                    let clauses = r.gen_range(1..=2 * pairs + 1);
                    Source::PairedSat(gen_random_paired_sat(r.gen(), pairs, clauses, 3, 7)?)
                }
                ReductionKind::MbBounded => {
                    let mut r = ChaCha8Rng::seed_from_u64(s);
                    // half small dense sources, where Maker tends to win
                    let (n, max_edge) = if r.gen_bool(0.5) {
                        let n = r.gen_range(2..=8);
                        (n, n.min(6))
                    } else {
                        let n = r.gen_range(2..=4);
                        (n, n.min(3))
                    };
                    let m = r.gen_range(1..=3);
                    let p = HypergraphParams { num_vertices: n, num_edges: m, min_edge: 2, max_edge };
                    Source::Hypergraph(gen_random_hypergraph(r.gen(), &p)?)
                }
                ReductionKind::MakerMaker => {
                    let mut r = ChaCha8Rng::seed_from_u64(s);
                    let n = r.gen_range(1..=6);
                    let m = r.gen_range(1..=3);
                    let p = HypergraphParams { num_vertices: n, num_edges: m, min_edge: 1, max_edge: n };
                    Source::Hypergraph(gen_random_hypergraph(r.gen(), &p)?)
                }
            };
            Ok(source)
        })
        .collect()
}

fn check_qbf2(ctx: &mut Ctx, f: &QbfFormula) -> Result<(), HarnessError> {
    let fast = solve_qbf2(f).map_err(|e| ctx.precondition(e))?;
    let oracle = solve_qbf_oracle(f, ctx.budgets.qbf_nodes);
    ctx.truth("qbf2.agreement", &oracle, fast.outcome.winner.map(|w| w.is_true()), fast.outcome.nodes_explored);
    let limit = f.num_vars() + f.num_clauses();
    ctx.bound("qbf2.trace_length", fast.trace.len(), limit);

    // replay rule by rule on explicit formulas
    let mut current = f.clone();
    let mut violations = Vec::new();
    let mut unknown = false;
    let mut steps = 0;
    let mut nodes = 0;
    let mut before = oracle.winner;
    while let Ok(app) = apply_rule(&current) {
        steps += 1;
        let after = solve_qbf_oracle(&app.result, ctx.budgets.qbf_nodes);
        nodes += after.nodes_explored;
        match (before, after.winner) {
            (Some(a), Some(b)) if a != b => violations.push(format!("step {steps} {:?}", app.rule)),
            (Some(_), Some(_)) => {}
            _ => unknown = true,
        }
        let verdict_truth = match app.verdict {
            Verdict::True => Some(true),
            Verdict::False => Some(false),
            Verdict::Continue => None,
        };
        if let (Some(v), Some(b)) = (verdict_truth, after.winner) {
            if v != b.is_true() {
                violations.push(format!("step {steps} verdict {:?}", app.verdict));
            }
        }
        if app.verdict != Verdict::Continue || steps > limit + 1 {
            break;
        }
        before = after.winner;
        current = app.result;
    }
    let status = match (violations.is_empty(), unknown) {
        (false, _) => CheckStatus::Fail,
        (true, true) => CheckStatus::Unknown,
        (true, false) => CheckStatus::Pass,
    };
    let observed = if violations.is_empty() { format!("{steps} steps preserve outcome") } else { violations.join(", ") };
    ctx.push(CheckRecord::new("qbf2.rules", &ctx.fp, "every step preserves outcome", observed, status).with_nodes(nodes));
    Ok(())
}

fn check_normalize(ctx: &mut Ctx, f: &QbfFormula, outcomes: bool) -> Result<(), HarnessError> {
    let (g, _) = normalize_3qbf(f).map_err(|e| ctx.precondition(e))?;
    let profile = degree_profile(g.matrix());
    ctx.equal("normalize.uniform", true, profile.is_k_uniform(3));
    ctx.equal("normalize.degree_mod3", true, profile.degrees.iter().all(|d| d % 3 == 0));
    ctx.equal("normalize.clause_count", 3 * f.num_clauses(), g.num_clauses());
    if outcomes {
        let a = solve_qbf_oracle(f, ctx.budgets.qbf_nodes);
        let b = solve_qbf_oracle(&g, ctx.budgets.qbf_nodes);
        ctx.truth("normalize.outcome", &a, b.winner.map(|w| w.is_true()), b.nodes_explored);
    }
    Ok(())
}

fn check_3qbf3(ctx: &mut Ctx, f: &QbfFormula, outcomes: bool) -> Result<(), HarnessError> {
    let (g, _) = normalize_3qbf(f).map_err(|e| ctx.precondition(e))?;
    let (out, _) = to_3qbf3(&g).map_err(|e| ctx.precondition(e))?;
    let report = check_class(&out, ClassBounds::exact(3, 3));
    let observed = if report.passes() {
        "pass".to_string()
    } else {
        report.violations.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; ")
    };
    ctx.equal("3qbf3.class", "pass".to_string(), observed);
    if outcomes {
        let a = solve_qbf_oracle(f, ctx.budgets.qbf_nodes);
        let b = solve_qbf_oracle(&out, ctx.budgets.qbf_nodes);
        ctx.truth("3qbf3.outcome", &a, b.winner.map(|w| w.is_true()), b.nodes_explored);
    }
    Ok(())
}

fn check_alternation(ctx: &mut Ctx, f: &QbfFormula, outcomes: bool) {
    for (pattern, tag) in [(AlternationPattern::ExistsFirst, "exists_first"), (AlternationPattern::ForallFirst, "forall_first")] {
        let (g, _) = pad_alternation(f, pattern, true);
        ctx.equal(&format!("alternation.{tag}.shape"), true, is_alternating(g.prefix(), pattern) && g.num_vars() % 2 == 0);
        ctx.equal(&format!("alternation.{tag}.matrix"), true, g.matrix().clauses() == f.matrix().clauses());
        if outcomes {
            let a = solve_qbf_oracle(f, ctx.budgets.qbf_nodes);
            let b = solve_qbf_oracle(&g, ctx.budgets.qbf_nodes);
            ctx.truth(&format!("alternation.{tag}.outcome"), &a, b.winner.map(|w| w.is_true()), b.nodes_explored);
        }
    }
}

fn check_psat(ctx: &mut Ctx, f: &QbfFormula, outcomes: bool) -> Result<(), HarnessError> {
    let (padded, _) = pad_alternation(f, AlternationPattern::ExistsFirst, true);
    let (inst, map) = qbf_to_paired_sat(&padded).map_err(|e| ctx.precondition(e))?;
    ctx.bound("psat.degree", degree_profile(inst.matrix()).max_degree, 7);
    let n = padded.num_vars() / 2;
    ctx.equal("psat.pairs", 2 * n + 1, inst.pairs().len());
    ctx.equal("psat.xor_blocks", n, map.xor_clauses.len());
    if outcomes {
        let a = solve_qbf_oracle(f, ctx.budgets.qbf_nodes);
        let b = solve_paired_sat(&inst, ctx.budgets.qbf_nodes);
        ctx.truth("psat.outcome", &a, b.winner.map(|w| w.is_true()), b.nodes_explored);
    }
    Ok(())
}

fn check_ae(ctx: &mut Ctx, f: &QbfFormula, frozen: &FrozenConfiguration, outcomes: bool) -> Result<(), HarnessError> {
    let (padded, _) = pad_alternation(f, AlternationPattern::ExistsFirst, true);
    let (h, trace) = qbf3_to_avoider_enforcer(&padded).map_err(|e| ctx.precondition(e))?;
    ctx.bound("ae.rank", h.rank(), 6);
    ctx.bound("ae.degree", h.max_degree(), 8);
    ctx.equal("ae.edges", 8 * padded.num_vars() / 2 + padded.num_clauses(), h.num_edges());
    ctx.equal("ae.vertices", 2 * padded.num_vars() + trace.u.len(), h.num_vertices());
    if outcomes {
        let Some(config) = frozen.ae else {
            return Err(HarnessError::NotCalibrated {
                kind: ctx.kind,
                finding: frozen.ae_finding.clone().unwrap_or_else(|| "not calibrated".into()),
            });
        };
        let a = solve_qbf_oracle(f, ctx.budgets.qbf_nodes);
        let game = solve_positional(&h, config.convention(), ctx.budgets.game_nodes);
        let observed = game.winner.map(|w| config.predicted_truth(w));
        ctx.truth("ae.outcome", &a, observed, game.nodes_explored);
    }
    Ok(())
}

fn check_cw(ctx: &mut Ctx, p: &PairedSatInstance, frozen: &FrozenConfiguration, outcomes: bool) -> Result<(), HarnessError> {
    if cw_falsifier_only_clause(p).is_some() {
        if outcomes {
            let a = solve_paired_sat(p, ctx.budgets.qbf_nodes);
            ctx.truth("cw.shortcut", &a, Some(false), 0);
        }
        return Ok(());
    }
    let (h, trace) = paired_sat_to_client_waiter(p).map_err(|e| ctx.precondition(e))?;
    let n = p.pairs().len();
    ctx.equal("cw.vertices", 8 * n, h.num_vertices());
    ctx.bound("cw.rank", h.rank(), 6);
    ctx.bound("cw.degree", h.max_degree(), 35);
    ctx.equal("cw.gadget_edges", format!("{} block, {} pair", 8 * n, 4 * n), format!("{} block, {} pair", trace.block_edges.len(), trace.pair_edges.len()));
    if outcomes {
        let Some(config) = frozen.cw else {
            return Err(HarnessError::NotCalibrated {
                kind: ctx.kind,
                finding: frozen.cw_finding.clone().unwrap_or_else(|| "not calibrated".into()),
            });
        };
        let a = solve_paired_sat(p, ctx.budgets.qbf_nodes);
        let game = solve_positional(&h, config.convention(), ctx.budgets.game_nodes);
        let observed = game.winner.map(|w| config.predicted_truth(w));
        ctx.truth("cw.outcome", &a, observed, game.nodes_explored);
    }
    Ok(())
}

fn check_mb(ctx: &mut Ctx, h: &Hypergraph, outcomes: bool) -> Result<(), HarnessError> {
    let (out, trace) = mb_to_bounded_degree(h).map_err(|e| ctx.precondition(e))?;
    ctx.bound("mb.degree", out.max_degree(), 5);
    ctx.bound("mb.rank", out.rank(), 12);
    let expected_big: usize = h.edges().iter().map(|e| 1usize << e.len()).sum();
    ctx.equal("mb.big_edges", expected_big, trace.big_edges.len());
    let src = &trace.reduced_source;
    let mut leaves = vec![0usize; src.num_vertices()];
    for e in src.edges() {
        for &u in e {
            leaves[u] += 1 << (e.len() - 1);
        }
    }
    let observed: Vec<usize> = trace.gadgets.iter().flat_map(|g| g.trees.iter().map(|t| t.num_leaves())).collect();
    let expected: Vec<usize> = leaves.iter().flat_map(|&l| [l, l]).collect();
    ctx.equal("mb.tree_leaves", format!("{expected:?}"), format!("{observed:?}"));
    if !outcomes {
        return Ok(());
    }
    let source = solve_positional(src, Convention::maker_breaker(), ctx.budgets.game_nodes);
    match source.winner {
        None => ctx.push(
            CheckRecord::new("mb.strategy", &ctx.fp, "solved source", "unknown", CheckStatus::Unknown)
                .with_nodes(source.nodes_explored),
        ),
        Some(Winner::MakerWin) => mb_playouts(ctx, &out, &trace),
        Some(_) => mb_pairings(ctx, &out, &trace),
    }
    Ok(())
}

fn mb_playouts(ctx: &mut Ctx, out: &Hypergraph, trace: &MbGadgetTrace) {
    let mut strategy = match SourceStrategy::new(&trace.reduced_source, ctx.budgets.game_nodes) {
        Ok(s) => s,
        Err(e) => {
            ctx.push(CheckRecord::new("mb.playouts", &ctx.fp, "Maker-win source strategy", e, CheckStatus::Unknown));
            return;
        }
    };
    let total = ctx.budgets.playouts;
    let mut wins = 0;
    let mut defect = None;
    for k in 0..total {
        let policy = if k % 2 == 0 { BreakerPolicy::Random } else { BreakerPolicy::GreedyBlock };
        let seed = ctx.budgets.seed.wrapping_mul(1_000_003).wrapping_add(k as u64);
        let rec = maker_forcing_playout(out, trace, &mut strategy, policy, seed);
        match rec.result {
            PlayoutResult::MakerWin { .. } => wins += 1,
            PlayoutResult::Defect(d) => {
                defect.get_or_insert(format!("playout {k} ({policy:?}): {d}"));
            }
        }
    }
    let status = if wins == total { CheckStatus::Pass } else { CheckStatus::Fail };
    let observed = match defect {
        None => format!("{wins}/{total}"),
        Some(d) => format!("{wins}/{total} MakerWin; {d}"),
    };
    ctx.push(CheckRecord::new("mb.playouts", &ctx.fp, format!("{total}/{total} MakerWin"), observed, status));
}

/// Breaker's source vertices after playing his winning strategy against a
/// random Maker, or `None` when the solver gives up.
fn breaker_source_game(solver: &mut Solver, seed: u64) -> Option<Vec<usize>> {
    let conv = *solver.convention();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pos = GamePosition::initial(solver.board(), &conv);
    while terminal_value(solver.board(), &conv, &pos).is_none() {
        let free: Vec<usize> = bits(pos.unclaimed(solver.board())).collect();
        match pos.to_move {
            Side::Primary => {
                let v = *free.choose(&mut rng)?;
                pos = GamePosition { primary: pos.primary | 1 << v, to_move: Side::Secondary, ..pos };
            }
            Side::Secondary => {
                let mut chosen = None;
                for &v in &free {
                    let child = GamePosition { secondary: pos.secondary | 1 << v, to_move: Side::Primary, ..pos };
                    if solver.value(&child)? < 1 {
                        chosen = Some(child);
                        break;
                    }
                }
                pos = chosen?;
            }
        }
    }
    Some(bits(pos.secondary).collect())
}

fn mb_pairings(ctx: &mut Ctx, out: &Hypergraph, trace: &MbGadgetTrace) {
    let src = &trace.reduced_source;
    let board = match Board::new(src) {
        Ok(b) => b,
        Err(e) => {
            ctx.push(CheckRecord::new("mb.pairing", &ctx.fp, "full coverage", e, CheckStatus::Unknown));
            return;
        }
    };
    let opts = SolveOptions { budget: ctx.budgets.game_nodes, transposition: true };
    let mut solver = Solver::new(board, Convention::maker_breaker(), opts);
    let games = ctx.budgets.pairing_games.max(1);
    let mut uncovered_total = 0;
    let mut not_transversal = 0;
    let mut unknown = false;
    for g in 0..games {
        let seed = ctx.budgets.seed.wrapping_mul(7_919).wrapping_add(g as u64);
        let Some(breaker_x) = breaker_source_game(&mut solver, seed) else {
            unknown = true;
            break;
        };
        if src.edges().iter().any(|e| !e.iter().any(|u| breaker_x.contains(u))) {
            not_transversal += 1;
        }
        let pairing = breaker_pairing(trace, &breaker_x);
        uncovered_total += pairing_coverage(out, &pairing).len();
    }
    let status = match (uncovered_total + not_transversal, unknown) {
        (0, true) => CheckStatus::Unknown,
        (0, false) => CheckStatus::Pass,
        _ => CheckStatus::Fail,
    };
    let observed = format!("{uncovered_total} uncovered hyperedges, {not_transversal} non-transversal games over {games} games");
    ctx.push(CheckRecord::new("mb.pairing", &ctx.fp, "0 uncovered hyperedges, 0 non-transversal games", observed, status).with_nodes(solver.nodes()));
}

fn check_mm(ctx: &mut Ctx, h: &Hypergraph, outcomes: bool) {
    let (out, _) = mb_to_maker_maker(h);
    let m = h.num_edges();
    ctx.equal("mm.rank", h.rank() + 1, out.rank());
    ctx.equal("mm.degree", h.max_degree().max(2), out.max_degree());
    ctx.equal("mm.vertices", h.num_vertices() + 2 * m, out.num_vertices());
    ctx.equal("mm.edges", 2 * m, out.num_edges());
    if !outcomes {
        return;
    }
    let mb = solve_positional(h, Convention::maker_breaker(), ctx.budgets.game_nodes);
    let mm = solve_positional(&out, Convention::maker_maker(), ctx.budgets.game_nodes);
    let label = |w: Option<Winner>| w.map_or("unknown".to_string(), |w| format!("{w:?}"));
    let expected = mb.winner.map(|w| if w == Winner::MakerWin { Winner::FirstWin } else { Winner::Draw });
    let status = match (expected, mm.winner) {
        (Some(a), Some(b)) if a == b => CheckStatus::Pass,
        (Some(_), Some(_)) => CheckStatus::Fail,
        _ => CheckStatus::Unknown,
    };
    ctx.push(CheckRecord::new("mm.outcome", &ctx.fp, label(expected), label(mm.winner), status).with_nodes(mb.nodes_explored + mm.nodes_explored));
    let second = mm.winner == Some(Winner::SecondWin);
    ctx.equal("mm.no_second_win", false, second);
}

#[cfg(test)]
mod tests {
    use super::*;
    use bdqbf_core::formula::Quantifier::*;

    fn frozen() -> FrozenConfiguration {
        FrozenConfiguration::default()
    }

    #[test]
    fn kind_names_round_trip() {
        for k in ReductionKind::ALL {
            assert_eq!(k.name().parse::<ReductionKind>().unwrap(), k);
        }
        assert!("bogus".parse::<ReductionKind>().is_err());
    }

    #[test]
    fn two_variable_source_through_3qbf3() {
        let f = QbfFormula::from_dimacs(&[Exists, Forall], &[&[1, 2], &[-1, -2]]);
        let recs = verify_reduction(ReductionKind::ThreeQbfThree, &Source::Qbf(f), &Budgets::default(), &frozen(), true).unwrap();
        assert!(recs.iter().all(|r| r.status == CheckStatus::Pass), "{recs:?}");
        assert!(recs.iter().any(|r| r.check == "3qbf3.outcome" && r.expected == "false"));
    }

    #[test]
    fn wrong_source_kind() {
        let h = Hypergraph::from_edges(2, &[&[0, 1]]);
        let e = verify_reduction(ReductionKind::Normalize, &Source::Hypergraph(h), &Budgets::default(), &frozen(), true);
        assert!(matches!(e, Err(HarnessError::WrongSource { .. })));
    }

    #[test]
    fn outcome_checks_refuse_without_calibration() {
        let f = QbfFormula::from_dimacs(&[Exists, Forall], &[&[1, 2]]);
        let src = Source::Qbf(f);
        let e = verify_reduction(ReductionKind::AvoiderEnforcer, &src, &Budgets::default(), &frozen(), true);
        assert!(matches!(e, Err(HarnessError::NotCalibrated { .. })));
        let ok = verify_reduction(ReductionKind::AvoiderEnforcer, &src, &Budgets::default(), &frozen(), false).unwrap();
        assert!(ok.iter().all(|r| r.status == CheckStatus::Pass));
    }

    #[test]
    fn breaker_win_source_is_fully_covered() {
        // six vertices, Breaker pairs {0,1} {2,3} {4,5}
        let h = Hypergraph::from_edges(6, &[&[0, 1, 2], &[2, 3, 4], &[4, 5, 0]]);
        let budgets = Budgets { pairing_games: 5, ..Budgets::default() };
        let recs = verify_reduction(ReductionKind::MbBounded, &Source::Hypergraph(h), &budgets, &frozen(), true).unwrap();
        let pairing = recs.iter().find(|r| r.check == "mb.pairing").expect("Breaker wins this source");
        assert_eq!(pairing.status, CheckStatus::Pass, "{pairing:?}");
    }

    #[test]
    fn mm_single_edge() {
        let h = Hypergraph::from_edges(2, &[&[0, 1]]);
        let recs = verify_reduction(ReductionKind::MakerMaker, &Source::Hypergraph(h), &Budgets::default(), &frozen(), true).unwrap();
        let outcome = recs.iter().find(|r| r.check == "mm.outcome").unwrap();
        assert_eq!((outcome.expected.as_str(), outcome.observed.as_str()), ("Draw", "Draw"));
    }

    #[test]
    fn generated_sources_are_deterministic() {
        for k in ReductionKind::ALL {
            assert_eq!(generate_sources(k, 5, 4).unwrap(), generate_sources(k, 5, 4).unwrap());
        }
    }
}
