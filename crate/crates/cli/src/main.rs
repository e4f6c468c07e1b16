use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use bdqbf_core::dimacs::{emit_paired_sat, emit_qdimacs, parse_paired_sat, parse_qdimacs};
use bdqbf_core::formula::{check_class, degree_profile, ClassBounds, CnfMatrix, PairedSatInstance, QbfFormula};
use bdqbf_core::gadgets::{
    mb_to_bounded_degree, mb_to_maker_maker, paired_sat_to_client_waiter, qbf3_to_avoider_enforcer,
};
use bdqbf_core::game::{solve_positional, AeRule, Convention, GameKind, LoneVertexRule, Side};
use bdqbf_core::hypergraph::{emit_hypergraph, parse_hypergraph, Hypergraph};
use bdqbf_core::qbf::{solve_paired_sat, solve_qbf2, solve_qbf_oracle, QbfOutcome};
use bdqbf_core::transform::{normalize_3qbf, pad_alternation, qbf_to_paired_sat, to_3qbf3, AlternationPattern};
use bdqbf_verify::families::{load_paired_sat_fixture, load_qbf_fixture};
use bdqbf_verify::gen::{gen_random_hypergraph, gen_random_paired_sat, gen_random_qbf, HypergraphParams, QbfParams, QuantifierPattern};
use bdqbf_verify::{
    fingerprint, generate_sources, run_batch, Budgets, CheckRecord, CheckStatus, FrozenConfiguration, ReductionKind,
};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

mod play;

#[derive(Parser)]
#[command(name = "bdqbf", version, about = "Bounded-degree QBF and positional game toolkit")]
struct Cli {
    /// Worker threads for batch runs (default: all cores)
    #[arg(long, global = true)]
    jobs: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide a QBF, a Paired-SAT instance, or a positional game
    Solve(SolveArgs),
    /// Apply one reduction to a file
    Reduce(ReduceArgs),
    /// Run the verification harness on seeded random sources
    Verify(VerifyArgs),
    /// Write a seeded random instance
    #[command(subcommand)]
    Gen(GenCommand),
    /// Print size, rank and degree statistics of a file
    Stats { file: PathBuf },
    /// Play a positional game against the exact solver
    Play(play::PlayArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum GameArg {
    /// Maker-Breaker
    Mb,
    /// Maker-Maker
    Mm,
    /// Avoider-Enforcer
    Ae,
    /// Client-Waiter
    Cw,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FirstArg {
    Primary,
    Secondary,
    Maker,
    Breaker,
    Avoider,
    Enforcer,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum AeRuleArg {
    Strict,
    Monotone,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum LoneArg {
    Client,
    Waiter,
}

/// Everything that picks a game convention.
#[derive(Args, Clone, Debug)]
pub struct ConventionArgs {
    /// Who moves first (ignored for Client-Waiter, where Waiter offers first)
    #[arg(long, value_enum, default_value_t = FirstArg::Primary)]
    first: FirstArg,

    #[arg(long, value_enum, default_value_t = AeRuleArg::Strict)]
    ae_rule: AeRuleArg,

    /// Who gets the last vertex when Waiter cannot offer a pair
    #[arg(long, value_enum, default_value_t = LoneArg::Client)]
    lone_vertex: LoneArg,
}

impl ConventionArgs {
    pub fn convention(&self, game: GameArg) -> Convention {
        let first = match self.first {
            FirstArg::Primary | FirstArg::Maker | FirstArg::Avoider => Side::Primary,
            FirstArg::Secondary | FirstArg::Breaker | FirstArg::Enforcer => Side::Secondary,
        };
        let kind = match game {
            GameArg::Mb => GameKind::MakerBreaker,
            GameArg::Mm => GameKind::MakerMaker,
            GameArg::Ae => GameKind::AvoiderEnforcer,
            GameArg::Cw => GameKind::ClientWaiter,
        };
        let rule = match self.ae_rule {
            AeRuleArg::Strict => AeRule::Strict,
            AeRuleArg::Monotone => AeRule::Monotone,
        };
        let lone = match self.lone_vertex {
            LoneArg::Client => LoneVertexRule::ToClient,
            LoneArg::Waiter => LoneVertexRule::ToWaiter,
        };
        Convention::new(kind, first).with_ae_rule(rule).with_lone_vertex(lone)
    }
}

#[derive(Args)]
#[command(group(clap::ArgGroup::new("what").required(true).args(["qbf", "psat", "game"])))]
struct SolveArgs {
    /// Input is QDIMACS
    #[arg(long)]
    qbf: bool,
    /// Input is Paired-SAT
    #[arg(long)]
    psat: bool,
    /// Input is a hypergraph, played under this game
    #[arg(long, value_enum)]
    game: Option<GameArg>,

    file: PathBuf,

    #[command(flatten)]
    conv: ConventionArgs,

    /// Search node budget
    #[arg(long, default_value_t = 50_000_000)]
    budget: u64,

    /// Print the rule trace of the degree-two decider
    #[arg(long)]
    trace: bool,
}

#[derive(Args)]
struct ReduceArgs {
    #[arg(long)]
    kind: ReductionKind,
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Write the construction trace as JSON
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    kind: ReductionKind,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 100)]
    count: usize,
    /// Node budget for every QBF and game search
    #[arg(long)]
    budget: Option<u64>,
    /// Skip outcome checks; structure only
    #[arg(long)]
    structure_only: bool,
    /// Record wall-clock time per check
    #[arg(long)]
    timings: bool,
    /// Write the report here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum PatternArg {
    Random,
    ExistsFirst,
    ForallFirst,
    AllExists,
    AllForall,
}

#[derive(Subcommand)]
enum GenCommand {
    /// Random QBF in QDIMACS
    Qbf {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        vars: usize,
        #[arg(long)]
        clauses: usize,
        #[arg(long, default_value_t = 3)]
        rank: usize,
        #[arg(long, default_value_t = 3)]
        max_degree: usize,
        #[arg(long, value_enum, default_value_t = PatternArg::Random)]
        pattern: PatternArg,
        /// Probability that a clause is made tautological
        #[arg(long, default_value_t = 0.0)]
        tautologies: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Random Paired-SAT instance
    Psat {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        pairs: usize,
        #[arg(long)]
        clauses: usize,
        #[arg(long, default_value_t = 3)]
        rank: usize,
        #[arg(long, default_value_t = 7)]
        max_degree: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Random hypergraph
    Hypergraph {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        vertices: usize,
        #[arg(long)]
        edges: usize,
        #[arg(long, default_value_t = 2)]
        min_edge: usize,
        #[arg(long, default_value_t = 3)]
        max_edge: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// A search ran out of nodes before deciding the question.
#[derive(Debug)]
pub struct BudgetExhausted(pub u64);

impl fmt::Display for BudgetExhausted {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "budget exhausted after {} nodes", self.0)
    }
}

impl std::error::Error for BudgetExhausted {}

/// The input parsed but the requested operation does not apply to it.
#[derive(Debug)]
pub struct Logical(pub String);

impl fmt::Display for Logical {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Logical {}

fn logical(e: impl fmt::Display) -> anyhow::Error {
    anyhow!(Logical(e.to_string()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<BudgetExhausted>().is_some() {
                ExitCode::from(3)
            } else if e.downcast_ref::<Logical>().is_some() {
                ExitCode::from(1)
            } else {
                ExitCode::from(2)
            }
        }
    }
}

fn run(command: Command) -> Result<ExitCode> {
    match command {
        Command::Solve(args) => solve(args),
        Command::Reduce(args) => reduce(args),
        Command::Verify(args) => verify(args),
        Command::Gen(cmd) => gen(cmd),
        Command::Stats { file } => stats(&file),
        Command::Play(args) => play::play(args),
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

pub fn read_qbf(path: &Path) -> Result<QbfFormula> {
    parse_qdimacs(&read(path)?).with_context(|| format!("parsing {}", path.display()))
}

pub fn read_psat(path: &Path) -> Result<PairedSatInstance> {
    parse_paired_sat(&read(path)?).with_context(|| format!("parsing {}", path.display()))
}

pub fn read_hypergraph(path: &Path) -> Result<Hypergraph> {
    parse_hypergraph(&read(path)?).with_context(|| format!("parsing {}", path.display()))
}

fn truth(outcome: &QbfOutcome) -> Result<ExitCode> {
    let w = outcome.winner.ok_or(BudgetExhausted(outcome.nodes_explored))?;
    println!("{}", if w.is_true() { "TRUE" } else { "FALSE" });
    Ok(ExitCode::SUCCESS)
}

fn solve(args: SolveArgs) -> Result<ExitCode> {
    if args.qbf {
        let f = read_qbf(&args.file)?;
        if degree_profile(f.matrix()).max_degree <= 2 {
            let sol = solve_qbf2(&f).map_err(logical)?;
            if args.trace {
                eprint!("{}", sol.trace_log());
            }
            return truth(&sol.outcome);
        }
        return truth(&solve_qbf_oracle(&f, args.budget));
    }
    if args.psat {
        return truth(&solve_paired_sat(&read_psat(&args.file)?, args.budget));
    }
    let game = args.game.expect("clap enforces one input kind");
    let h = read_hypergraph(&args.file)?;
    if h.num_vertices() > bdqbf_core::game::MAX_BOARD_VERTICES {
        return Err(logical(format!(
            "board has {} vertices, the exact solver handles at most {}",
            h.num_vertices(),
            bdqbf_core::game::MAX_BOARD_VERTICES
        )));
    }
    let out = solve_positional(&h, args.conv.convention(game), args.budget);
    let w = out.winner.ok_or(BudgetExhausted(out.nodes_explored))?;
    println!("{w:?}");
    Ok(ExitCode::SUCCESS)
}

fn reduce(args: ReduceArgs) -> Result<ExitCode> {
    let (text, trace) = match args.kind {
        ReductionKind::Qbf2 => bail!("qbf2 is a decider, not a reduction; use `solve --qbf`"),
        ReductionKind::Normalize => {
            let (g, prov) = normalize_3qbf(&read_qbf(&args.input)?).map_err(logical)?;
            (emit_qdimacs(&g), json!({ "normalize": prov }))
        }
        ReductionKind::ThreeQbfThree => {
            let (g, prov) = normalize_3qbf(&read_qbf(&args.input)?).map_err(logical)?;
            let (out, split) = to_3qbf3(&g).map_err(logical)?;
            let report = check_class(&out, ClassBounds::exact(3, 3));
            if !report.passes() {
                return Err(logical(format!("output misses the 3-uniform 3-regular class: {:?}", report.violations)));
            }
            (emit_qdimacs(&out), json!({ "normalize": prov, "split": split }))
        }
        ReductionKind::Alternation => {
            let (g, added) = pad_alternation(&read_qbf(&args.input)?, AlternationPattern::ExistsFirst, true);
            let ids: Vec<u32> = added.iter().map(|v| v.id()).collect();
            (emit_qdimacs(&g), json!({ "inserted": ids }))
        }
        ReductionKind::PairedSat => {
            let (g, added) = pad_alternation(&read_qbf(&args.input)?, AlternationPattern::ExistsFirst, true);
            let (inst, map) = qbf_to_paired_sat(&g).map_err(logical)?;
            let ids: Vec<u32> = added.iter().map(|v| v.id()).collect();
            (emit_paired_sat(&inst), json!({ "inserted": ids, "map": map }))
        }
        ReductionKind::AvoiderEnforcer => {
            let (g, added) = pad_alternation(&read_qbf(&args.input)?, AlternationPattern::ExistsFirst, true);
            let (h, trace) = qbf3_to_avoider_enforcer(&g).map_err(logical)?;
            let ids: Vec<u32> = added.iter().map(|v| v.id()).collect();
            (emit_hypergraph(&h), json!({ "inserted": ids, "construction": trace }))
        }
        ReductionKind::ClientWaiter => {
            let (h, trace) = paired_sat_to_client_waiter(&read_psat(&args.input)?).map_err(logical)?;
            (emit_hypergraph(&h), json!({ "construction": trace }))
        }
        ReductionKind::MbBounded => {
            let (h, trace) = mb_to_bounded_degree(&read_hypergraph(&args.input)?).map_err(logical)?;
            (emit_hypergraph(&h), json!({ "construction": trace }))
        }
        ReductionKind::MakerMaker => {
            let (h, trace) = mb_to_maker_maker(&read_hypergraph(&args.input)?);
            (emit_hypergraph(&h), json!({ "construction": trace }))
        }
    };
    write(&args.out, &text)?;
    if let Some(path) = args.trace {
        write(&path, &(serde_json::to_string_pretty(&trace)? + "\n"))?;
    }
    Ok(ExitCode::SUCCESS)
}

fn verify(args: VerifyArgs) -> Result<ExitCode> {
    let mut budgets = Budgets { seed: args.seed, timings: args.timings, ..Budgets::default() };
    if let Some(b) = args.budget {
        budgets.qbf_nodes = b;
        budgets.game_nodes = b;
    }
    let sources = generate_sources(args.kind, args.seed, args.count)?;
    let outcomes = !args.structure_only;
    let frozen = match (args.kind, outcomes) {
        (ReductionKind::AvoiderEnforcer, true) => {
            FrozenConfiguration::calibrate(&load_qbf_fixture("ae_n1")?, &[], budgets.game_nodes)
        }
        (ReductionKind::ClientWaiter, true) => {
            FrozenConfiguration::calibrate(&[], &load_paired_sat_fixture("cw_n1")?, budgets.game_nodes)
        }
        _ => FrozenConfiguration::default(),
    };
    let missing = match args.kind {
        ReductionKind::AvoiderEnforcer if outcomes && frozen.ae.is_none() => frozen.ae_finding.clone(),
        ReductionKind::ClientWaiter if outcomes && frozen.cw.is_none() => frozen.cw_finding.clone(),
        _ => None,
    };
    let mut report = match &missing {
        // structure still gets checked; the missing calibration is itself a failure
        Some(finding) => {
            let mut r = run_batch(args.kind, &sources, &budgets, &frozen, false)?;
            let check = format!("{}.calibration", args.kind);
            r.extend([CheckRecord::new(&check, &fingerprint(&check), "frozen configuration", finding, CheckStatus::Fail)]);
            r
        }
        None => run_batch(args.kind, &sources, &budgets, &frozen, outcomes)?,
    };
    if !args.timings {
        report.strip_timings();
    }
    let json = report.to_json() + "\n";
    match &args.out {
        Some(path) => write(path, &json)?,
        None => print!("{json}"),
    }
    let s = report.summary;
    eprintln!("{}: {} checks, {} pass, {} fail, {} unknown", report.kind, s.total, s.pass, s.fail, s.unknown);
    Ok(if report.has_failures() { ExitCode::from(1) } else { ExitCode::SUCCESS })
}

fn emit_to(out: Option<PathBuf>, text: &str) -> Result<ExitCode> {
    match out {
        Some(path) => write(&path, text)?,
        None => print!("{text}"),
    }
    Ok(ExitCode::SUCCESS)
}

fn gen(cmd: GenCommand) -> Result<ExitCode> {
    match cmd {
        GenCommand::Qbf { seed, vars, clauses, rank, max_degree, pattern, tautologies, out } => {
            if !(0.0..=1.0).contains(&tautologies) {
                bail!("--tautologies must lie in [0, 1]");
            }
            let pattern = match pattern {
                PatternArg::Random => QuantifierPattern::Random,
                PatternArg::ExistsFirst => QuantifierPattern::ExistsFirst,
                PatternArg::ForallFirst => QuantifierPattern::ForallFirst,
                PatternArg::AllExists => QuantifierPattern::AllExists,
                PatternArg::AllForall => QuantifierPattern::AllForall,
            };
            let params = QbfParams::new(vars, clauses, rank, max_degree).pattern(pattern).tautologies(tautologies);
            emit_to(out, &emit_qdimacs(&gen_random_qbf(seed, &params)?))
        }
        GenCommand::Psat { seed, pairs, clauses, rank, max_degree, out } => {
            emit_to(out, &emit_paired_sat(&gen_random_paired_sat(seed, pairs, clauses, rank, max_degree)?))
        }
        GenCommand::Hypergraph { seed, vertices, edges, min_edge, max_edge, out } => {
            let params = HypergraphParams { num_vertices: vertices, num_edges: edges, min_edge, max_edge };
            emit_to(out, &emit_hypergraph(&gen_random_hypergraph(seed, &params)?))
        }
    }
}

fn header_kind(text: &str) -> Option<&str> {
    text.lines()
        .map(str::trim)
        .find(|l| l.starts_with("p "))
        .and_then(|l| l.split_whitespace().nth(1))
}

fn matrix_stats(m: &CnfMatrix) -> serde_json::Value {
    let p = degree_profile(m);
    json!({
        "variables": m.num_vars(),
        "clauses": m.num_clauses(),
        "rank": p.rank,
        "min_clause_size": p.min_clause_size,
        "max_degree": p.max_degree,
        "uniform": p.is_k_uniform(p.rank),
        "regular": p.is_k_regular(p.max_degree),
    })
}

fn stats(path: &Path) -> Result<ExitCode> {
    let text = read(path)?;
    let value = match header_kind(&text) {
        Some("cnf") => {
            let f = parse_qdimacs(&text).with_context(|| format!("parsing {}", path.display()))?;
            let mut v = matrix_stats(f.matrix());
            let prefix: String = f.prefix().entries().iter().map(|e| e.1.symbol()).collect();
            let blocks = prefix.as_bytes().chunk_by(|a, b| a == b).count();
            v["format"] = json!("qdimacs");
            v["prefix"] = json!(prefix);
            v["quantifier_blocks"] = json!(blocks);
            v
        }
        Some("psat") => {
            let p = parse_paired_sat(&text).with_context(|| format!("parsing {}", path.display()))?;
            let mut v = matrix_stats(p.matrix());
            v["format"] = json!("psat");
            v["pairs"] = json!(p.pairs().len());
            v
        }
        Some("pos") => {
            let h = parse_hypergraph(&text).with_context(|| format!("parsing {}", path.display()))?;
            let min_edge = h.edges().iter().map(Vec::len).min().unwrap_or(0);
            let isolated = h.degrees().iter().filter(|&&d| d == 0).count();
            json!({
                "format": "hypergraph",
                "vertices": h.num_vertices(),
                "edges": h.num_edges(),
                "rank": h.rank(),
                "min_edge": min_edge,
                "max_degree": h.max_degree(),
                "uniform": h.is_k_uniform(h.rank()),
                "isolated_vertices": isolated,
            })
        }
        _ => bail!("{}: no `p cnf`, `p psat` or `p pos` header", path.display()),
    };
    println!("{}", serde_json::to_string_pretty(&value)?);
    Ok(ExitCode::SUCCESS)
}
