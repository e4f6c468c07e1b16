use std::io::{self, BufRead, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use bdqbf_core::game::{
    bits, legal_moves, play_move, status, Board, GameKind, GamePosition, Move, SolveOptions, Side, Solver,
};
use clap::Args;

use crate::{logical, read_hypergraph, BudgetExhausted, ConventionArgs, FirstArg, GameArg};

#[derive(Args)]
pub struct PlayArgs {
    #[arg(long, value_enum)]
    game: GameArg,

    file: PathBuf,

    #[command(flatten)]
    conv: ConventionArgs,

    /// The side you play; the solver takes the other one
    #[arg(long = "as", value_enum, default_value_t = FirstArg::Primary)]
    side: FirstArg,

    /// Node budget for each solver decision
    #[arg(long, default_value_t = 50_000_000)]
    budget: u64,
}

fn side_name(kind: GameKind, side: Side) -> &'static str {
    match (kind, side) {
        (GameKind::MakerBreaker, Side::Primary) => "Maker",
        (GameKind::MakerBreaker, Side::Secondary) => "Breaker",
        (GameKind::MakerMaker, Side::Primary) => "Alice",
        (GameKind::MakerMaker, Side::Secondary) => "Bob",
        (GameKind::AvoiderEnforcer, Side::Primary) => "Avoider",
        (GameKind::AvoiderEnforcer, Side::Secondary) => "Enforcer",
        (GameKind::ClientWaiter, Side::Primary) => "Client",
        (GameKind::ClientWaiter, Side::Secondary) => "Waiter",
    }
}

fn show_set(mask: u128) -> String {
    let items: Vec<String> = bits(mask).map(|v| (v + 1).to_string()).collect();
    format!("{{{}}}", items.join(" "))
}

fn show_move(mv: Move) -> String {
    match mv {
        Move::Claim(v) | Move::Pick(v) => (v + 1).to_string(),
        Move::Offer(a, b) => format!("{} {}", a + 1, b + 1),
        Move::ClaimSet(s) => show_set(s),
    }
}

/// Reads 1-based vertex numbers and turns them into the move the position expects.
fn parse_move(line: &str, pos: &GamePosition, kind: GameKind, sets: bool) -> Result<Move> {
    let vs = line
        .split_whitespace()
        .map(|t| match t.parse::<usize>() {
            Ok(v) if v >= 1 => Ok(v - 1),
            _ => bail!("`{t}` is not a vertex number"),
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(match (kind, pos.offer, vs.as_slice()) {
        (GameKind::ClientWaiter, Some(_), [v]) => Move::Pick(*v),
        (GameKind::ClientWaiter, None, [a, b]) => Move::Offer(*a, *b),
        (GameKind::ClientWaiter, Some(_), _) => bail!("pick one of the offered vertices"),
        (GameKind::ClientWaiter, None, _) => bail!("offer two vertices"),
        (_, _, [v]) => Move::Claim(*v),
        (_, _, vs) if sets && !vs.is_empty() && vs.iter().all(|&v| v < 128) => {
            Move::ClaimSet(vs.iter().fold(0u128, |m, &v| m | 1 << v))
        }
        _ if sets => bail!("claim one or more vertices"),
        _ => bail!("claim exactly one vertex"),
    })
}

pub fn play(args: PlayArgs) -> Result<ExitCode> {
    let conv = args.conv.convention(args.game);
    let h = read_hypergraph(&args.file)?;
    let board = Board::new(&h).map_err(logical)?;
    let human = match args.side {
        FirstArg::Primary | FirstArg::Maker | FirstArg::Avoider => Side::Primary,
        _ => Side::Secondary,
    };
    let sets = conv.kind == GameKind::AvoiderEnforcer && conv.ae_rule == bdqbf_core::game::AeRule::Monotone;
    let mut solver = Solver::new(board.clone(), conv, SolveOptions { budget: args.budget, transposition: true });
    let mut pos = GamePosition::initial(&board, &conv);

    let stdin = io::stdin();
    let mut lines = stdin.lock().lines();
    let mut out = io::stdout().lock();
    writeln!(out, "you are {}; vertices are numbered 1..={}", side_name(conv.kind, human), board.num_vertices())?;
    loop {
        writeln!(
            out,
            "{}: {}  {}: {}",
            side_name(conv.kind, Side::Primary),
            show_set(pos.primary),
            side_name(conv.kind, Side::Secondary),
            show_set(pos.secondary)
        )?;
        if let Some(w) = status(&board, &conv, &pos) {
            writeln!(out, "{w:?}")?;
            return Ok(ExitCode::SUCCESS);
        }
        if pos.to_move == human {
            write!(out, "{}> ", side_name(conv.kind, human))?;
            out.flush()?;
            let Some(line) = lines.next() else {
                writeln!(out)?;
                return Ok(ExitCode::SUCCESS);
            };
            let line = line.context("reading stdin")?;
            if line.trim() == "quit" {
                return Ok(ExitCode::SUCCESS);
            }
            match parse_move(&line, &pos, conv.kind, sets)
                .and_then(|mv| play_move(&board, &conv, &pos, mv).map_err(anyhow::Error::from))
            {
                Ok(next) => pos = next,
                Err(e) => writeln!(out, "illegal: {e}")?,
            }
            continue;
        }
        // solver side: first move reaching the best value
        let maximizing = pos.to_move == Side::Primary;
        let mut best: Option<(i8, Move, GamePosition)> = None;
        for mv in legal_moves(&board, &conv, &pos) {
            let child = play_move(&board, &conv, &pos, mv)?;
            let v = solver.value(&child).ok_or(BudgetExhausted(solver.nodes()))?;
            let improves = best.as_ref().is_none_or(|&(b, _, _)| if maximizing { v > b } else { v < b });
            if improves {
                best = Some((v, mv, child));
            }
        }
        let (_, mv, next) = best.expect("an undecided position has a legal move");
        writeln!(out, "{} plays {}", side_name(conv.kind, pos.to_move), show_move(mv))?;
        pos = next;
    }
}
