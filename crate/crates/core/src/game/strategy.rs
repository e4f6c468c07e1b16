use thiserror::Error;

use super::{
    legal_moves, play_move, status, terminal_value, Board, Convention, GameError, GamePosition, Move, Side,
    SolveOptions, Solver, Winner,
};
use crate::hypergraph::Hypergraph;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StrategyError {
    #[error(transparent)]
    Board(#[from] GameError),
    #[error("node budget exhausted")]
    Budget,
    #[error("{0:?} has no strategy securing a non-losing result")]
    NotWinner(Side),
    #[error("invalid strategy: {0}")]
    Invalid(String),
}

/// A strategy for one side, expanded over every opponent reply.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StrategyNode {
    Terminal(Winner),
    /// The strategy's own move.
    Choose { mv: Move, next: Box<StrategyNode> },
    /// One subtree per legal opponent move.
    Respond(Vec<(Move, StrategyNode)>),
}

impl StrategyNode {
    pub fn size(&self) -> usize {
        match self {
            StrategyNode::Terminal(_) => 1,
            StrategyNode::Choose { next, .. } => 1 + next.size(),
            StrategyNode::Respond(r) => 1 + r.iter().map(|(_, n)| n.size()).sum::<usize>(),
        }
    }
}

fn perspective(side: Side, v: i8) -> i8 {
    match side {
        Side::Primary => v,
        Side::Secondary => -v,
    }
}

/// Builds a strategy for `side` that secures the solved value: a win when
/// `side` wins, a draw when the game is drawn. `budget` bounds both search
/// nodes and tree size.
pub fn extract_strategy(
    h: &Hypergraph,
    conv: Convention,
    side: Side,
    budget: u64,
) -> Result<StrategyNode, StrategyError> {
    let board = Board::new(h)?;
    let mut solver = Solver::new(board, conv, SolveOptions { budget, transposition: true });
    let root = GamePosition::initial(solver.board(), &conv);
    let value = solver.value(&root).ok_or(StrategyError::Budget)?;
    let target = perspective(side, value);
    if target < 0 {
        return Err(StrategyError::NotWinner(side));
    }
    let mut size = 0u64;
    build(&mut solver, side, target, &root, &mut size, budget)
}

fn build(
    solver: &mut Solver,
    side: Side,
    target: i8,
    pos: &GamePosition,
    size: &mut u64,
    budget: u64,
) -> Result<StrategyNode, StrategyError> {
    *size += 1;
    if *size > budget {
        return Err(StrategyError::Budget);
    }
    let conv = *solver.convention();
    if let Some(w) = status(solver.board(), &conv, pos) {
        return Ok(StrategyNode::Terminal(w));
    }
    let moves = legal_moves(solver.board(), &conv, pos);
    if pos.to_move == side {
        for mv in moves {
            let child = play_move(solver.board(), &conv, pos, mv)?;
            let v = solver.value(&child).ok_or(StrategyError::Budget)?;
            if perspective(side, v) >= target {
                let next = build(solver, side, target, &child, size, budget)?;
                return Ok(StrategyNode::Choose { mv, next: Box::new(next) });
            }
        }
        Err(StrategyError::Invalid("no move keeps the solved value".into()))
    } else {
        let mut replies = Vec::with_capacity(moves.len());
        for mv in moves {
            let child = play_move(solver.board(), &conv, pos, mv)?;
            replies.push((mv, build(solver, side, target, &child, size, budget)?));
        }
        Ok(StrategyNode::Respond(replies))
    }
}

/// Plays `tree` for `side` against every opponent reply, checking that it
/// is well formed, and returns the worst final value it reaches from
/// `side`'s perspective (+1 win, 0 draw, -1 loss).
pub fn replay_strategy(
    h: &Hypergraph,
    conv: Convention,
    side: Side,
    tree: &StrategyNode,
) -> Result<i8, StrategyError> {
    let board = Board::new(h)?;
    let root = GamePosition::initial(&board, &conv);
    replay(&board, &conv, side, &root, tree)
}

fn replay(board: &Board, conv: &Convention, side: Side, pos: &GamePosition, node: &StrategyNode) -> Result<i8, StrategyError> {
    let invalid = |m: &str| Err(StrategyError::Invalid(m.to_string()));
    match (terminal_value(board, conv, pos), node) {
        (Some(v), StrategyNode::Terminal(w)) => {
            if conv.winner_for_value(v) != *w {
                return invalid("terminal label disagrees with the rules");
            }
            Ok(perspective(side, v))
        }
        (Some(_), _) | (None, StrategyNode::Terminal(_)) => invalid("terminal mismatch"),
        (None, StrategyNode::Choose { mv, next }) => {
            if pos.to_move != side {
                return invalid("strategy moves out of turn");
            }
            let child = play_move(board, conv, pos, *mv)?;
            replay(board, conv, side, &child, next)
        }
        (None, StrategyNode::Respond(replies)) => {
            if pos.to_move == side {
                return invalid("strategy waits on its own turn");
            }
            let legal = legal_moves(board, conv, pos);
            if legal.len() != replies.len() || legal.iter().zip(replies).any(|(a, (b, _))| a != b) {
                return invalid("opponent replies are incomplete");
            }
            let mut worst = 1;
            for (mv, sub) in replies {
                let child = play_move(board, conv, pos, *mv)?;
                worst = worst.min(replay(board, conv, side, &child, sub)?);
            }
            Ok(worst)
        }
    }
}
