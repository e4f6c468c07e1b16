//! Positional games on hypergraphs: rules for the Maker-Breaker,
//! Maker-Maker, strict Avoider-Enforcer and Client-Waiter conventions, an
//! exact budgeted solver, and strategy extraction.
//!
//! Every convention has a *primary* side (Maker, Alice, Avoider, Client)
//! and a *secondary* side (Breaker, Bob, Enforcer, Waiter). Positions store
//! the two claim sets as bitsets, which limits boards to 128 vertices.

mod solver;
mod strategy;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hypergraph::Hypergraph;

pub use solver::{solve_positional, solve_positional_with, SolveOptions, Solver};
pub use strategy::{extract_strategy, replay_strategy, StrategyError, StrategyNode};

pub const MAX_BOARD_VERTICES: usize = 128;
pub const DEFAULT_GAME_BUDGET: u64 = 50_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GameKind {
    MakerBreaker,
    MakerMaker,
    AvoiderEnforcer,
    ClientWaiter,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    /// Maker, Alice, Avoider or Client.
    Primary,
    /// Breaker, Bob, Enforcer or Waiter.
    Secondary,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::Primary => Side::Secondary,
            Side::Secondary => Side::Primary,
        }
    }
}

/// Who receives the last unclaimed vertex when Waiter cannot offer two.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum LoneVertexRule {
    #[default]
    ToClient,
    ToWaiter,
}

/// Avoider-Enforcer move size: exactly one vertex per turn, or any nonempty
/// set of unclaimed vertices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum AeRule {
    #[default]
    Strict,
    Monotone,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Convention {
    pub kind: GameKind,
    /// Ignored for Client-Waiter, where Waiter always offers first.
    pub first: Side,
    pub lone_vertex: LoneVertexRule,
    /// Only read for Avoider-Enforcer.
    #[serde(default)]
    pub ae_rule: AeRule,
}

impl Convention {
    pub fn new(kind: GameKind, first: Side) -> Self {
        Convention { kind, first, lone_vertex: LoneVertexRule::default(), ae_rule: AeRule::default() }
    }

    pub fn maker_breaker() -> Self {
        Convention::new(GameKind::MakerBreaker, Side::Primary)
    }

    pub fn maker_maker() -> Self {
        Convention::new(GameKind::MakerMaker, Side::Primary)
    }

    pub fn avoider_enforcer(first: Side) -> Self {
        Convention::new(GameKind::AvoiderEnforcer, first)
    }

    pub fn client_waiter() -> Self {
        Convention::new(GameKind::ClientWaiter, Side::Secondary)
    }

    pub fn with_lone_vertex(mut self, rule: LoneVertexRule) -> Self {
        self.lone_vertex = rule;
        self
    }

    pub fn with_ae_rule(mut self, rule: AeRule) -> Self {
        self.ae_rule = rule;
        self
    }

    pub(crate) fn claims_sets(&self) -> bool {
        self.kind == GameKind::AvoiderEnforcer && self.ae_rule == AeRule::Monotone
    }

    fn first_mover(&self) -> Side {
        match self.kind {
            GameKind::ClientWaiter => Side::Secondary,
            _ => self.first,
        }
    }

    /// Winner label for a game value from the primary side's perspective
    /// (+1 primary wins, 0 draw, -1 secondary wins).
    pub fn winner_for_value(&self, value: i8) -> Winner {
        match (self.kind, value.signum()) {
            (GameKind::MakerBreaker, 1) => Winner::MakerWin,
            (GameKind::MakerBreaker, _) => Winner::BreakerWin,
            (GameKind::MakerMaker, 0) => Winner::Draw,
            (GameKind::MakerMaker, v) => {
                if (v == 1) == (self.first == Side::Primary) {
                    Winner::FirstWin
                } else {
                    Winner::SecondWin
                }
            }
            (GameKind::AvoiderEnforcer, 1) => Winner::AvoiderWin,
            (GameKind::AvoiderEnforcer, _) => Winner::EnforcerWin,
            (GameKind::ClientWaiter, 1) => Winner::ClientWin,
            (GameKind::ClientWaiter, _) => Winner::WaiterWin,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Winner {
    MakerWin,
    BreakerWin,
    FirstWin,
    Draw,
    SecondWin,
    AvoiderWin,
    EnforcerWin,
    ClientWin,
    WaiterWin,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GameOutcome {
    /// `None` iff the node budget ran out.
    pub winner: Option<Winner>,
    pub exact: bool,
    pub nodes_explored: u64,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GameError {
    #[error("board has {0} vertices, at most {MAX_BOARD_VERTICES} supported")]
    TooManyVertices(usize),
    #[error("vertex {0} is out of range or already claimed")]
    Unavailable(usize),
    #[error("offer must name two distinct vertices")]
    BadOffer,
    #[error("pick {0} is not part of the pending offer")]
    BadPick(usize),
    #[error("move does not fit the position (wrong phase or convention)")]
    WrongPhase,
    #[error("game is already over")]
    GameOver,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Move {
    /// Maker-Breaker, Maker-Maker, Avoider-Enforcer: claim one vertex.
    Claim(usize),
    /// Client-Waiter: Waiter offers two unclaimed vertices.
    Offer(usize, usize),
    /// Client-Waiter: Client keeps one offered vertex.
    Pick(usize),
    /// Monotone Avoider-Enforcer: claim a nonempty set of vertices (bitmask).
    ClaimSet(u128),
}

/// A hypergraph compiled to bitsets.
#[derive(Clone, Debug)]
pub struct Board {
    num_vertices: usize,
    edges: Vec<u128>,
    all: u128,
    has_empty_edge: bool,
}

impl Board {
    pub fn new(h: &Hypergraph) -> Result<Self, GameError> {
        let n = h.num_vertices();
        if n > MAX_BOARD_VERTICES {
            return Err(GameError::TooManyVertices(n));
        }
        let edges: Vec<u128> = h.edges().iter().map(|e| e.iter().fold(0u128, |m, &v| m | 1 << v)).collect();
        Ok(Board {
            num_vertices: n,
            has_empty_edge: edges.contains(&0),
            edges,
            all: if n == 128 { u128::MAX } else { (1u128 << n) - 1 },
        })
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn edge_masks(&self) -> &[u128] {
        &self.edges
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GamePosition {
    pub primary: u128,
    pub secondary: u128,
    pub to_move: Side,
    /// Client-Waiter offer waiting for Client's pick.
    pub offer: Option<(usize, usize)>,
}

impl GamePosition {
    pub fn initial(board: &Board, conv: &Convention) -> Self {
        let pos = GamePosition { primary: 0, secondary: 0, to_move: conv.first_mover(), offer: None };
        settle(board, conv, pos)
    }

    pub fn unclaimed(&self, board: &Board) -> u128 {
        board.all & !(self.primary | self.secondary)
    }

    pub fn claimed_by(&self, side: Side) -> u128 {
        match side {
            Side::Primary => self.primary,
            Side::Secondary => self.secondary,
        }
    }

    fn claim(&mut self, side: Side, v: usize) {
        match side {
            Side::Primary => self.primary |= 1 << v,
            Side::Secondary => self.secondary |= 1 << v,
        }
    }
}

/// Iterates the set bit positions of `m` in increasing order.
pub fn bits(mut m: u128) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if m == 0 {
            None
        } else {
            let v = m.trailing_zeros() as usize;
            m &= m - 1;
            Some(v)
        }
    })
}

/// In Client-Waiter, hands a lone remaining vertex to the side the rule names.
pub(crate) fn settle(board: &Board, conv: &Convention, mut pos: GamePosition) -> GamePosition {
    if conv.kind == GameKind::ClientWaiter && pos.offer.is_none() {
        let free = pos.unclaimed(board);
        if free.count_ones() == 1 && terminal_value(board, conv, &pos).is_none() {
            let v = free.trailing_zeros() as usize;
            match conv.lone_vertex {
                LoneVertexRule::ToClient => pos.claim(Side::Primary, v),
                LoneVertexRule::ToWaiter => pos.claim(Side::Secondary, v),
            }
        }
    }
    pos
}

/// Game value from the primary side's perspective if the position is
/// decided, `None` while play continues.
pub fn terminal_value(board: &Board, conv: &Convention, pos: &GamePosition) -> Option<i8> {
    if board.has_empty_edge {
        return Some(match conv.kind {
            GameKind::AvoiderEnforcer => -1,
            GameKind::MakerMaker => {
                if conv.first == Side::Primary {
                    1
                } else {
                    -1
                }
            }
            _ => 1,
        });
    }
    let (p, s) = (pos.primary, pos.secondary);
    let full_p = board.edges.iter().any(|&e| e & !p == 0);
    let no_moves = pos.offer.is_none() && pos.unclaimed(board) == 0;
    match conv.kind {
        GameKind::MakerBreaker | GameKind::ClientWaiter => {
            if full_p {
                Some(1)
            } else if no_moves || board.edges.iter().all(|&e| e & s != 0) {
                Some(-1)
            } else {
                None
            }
        }
        GameKind::AvoiderEnforcer => {
            if full_p {
                Some(-1)
            } else if no_moves || board.edges.iter().all(|&e| e & s != 0) {
                Some(1)
            } else {
                None
            }
        }
        GameKind::MakerMaker => {
            if full_p {
                Some(1)
            } else if board.edges.iter().any(|&e| e & !s == 0) {
                Some(-1)
            } else if no_moves || board.edges.iter().all(|&e| e & s != 0 && e & p != 0) {
                Some(0)
            } else {
                None
            }
        }
    }
}

pub fn status(board: &Board, conv: &Convention, pos: &GamePosition) -> Option<Winner> {
    terminal_value(board, conv, pos).map(|v| conv.winner_for_value(v))
}

pub fn legal_moves(board: &Board, conv: &Convention, pos: &GamePosition) -> Vec<Move> {
    if terminal_value(board, conv, pos).is_some() {
        return Vec::new();
    }
    let free: Vec<usize> = bits(pos.unclaimed(board)).collect();
    match (conv.kind, pos.offer) {
        (GameKind::ClientWaiter, Some((a, b))) => vec![Move::Pick(a), Move::Pick(b)],
        (GameKind::ClientWaiter, None) => {
            let mut out = Vec::with_capacity(free.len() * free.len().saturating_sub(1) / 2);
            for (i, &a) in free.iter().enumerate() {
                for &b in &free[i + 1..] {
                    out.push(Move::Offer(a, b));
                }
            }
            out
        }
        _ if conv.claims_sets() => {
            let all = pos.unclaimed(board);
            let mut out = Vec::new();
            let mut sub = all;
            while sub != 0 {
                out.push(Move::ClaimSet(sub));
                sub = (sub - 1) & all;
            }
            out.reverse();
            out
        }
        _ => free.into_iter().map(Move::Claim).collect(),
    }
}

pub fn play_move(
    board: &Board,
    conv: &Convention,
    pos: &GamePosition,
    mv: Move,
) -> Result<GamePosition, GameError> {
    if terminal_value(board, conv, pos).is_some() {
        return Err(GameError::GameOver);
    }
    let free = pos.unclaimed(board);
    let available = |v: usize| v < board.num_vertices && free & (1 << v) != 0;
    let mut next = *pos;
    match (conv.kind, mv) {
        (GameKind::ClientWaiter, Move::Offer(a, b)) => {
            if pos.offer.is_some() {
                return Err(GameError::WrongPhase);
            }
            if a == b {
                return Err(GameError::BadOffer);
            }
            for v in [a, b] {
                if !available(v) {
                    return Err(GameError::Unavailable(v));
                }
            }
            next.offer = Some((a.min(b), a.max(b)));
            next.to_move = Side::Primary;
        }
        (GameKind::ClientWaiter, Move::Pick(v)) => {
            let (a, b) = pos.offer.ok_or(GameError::WrongPhase)?;
            let other = if v == a {
                b
            } else if v == b {
                a
            } else {
                return Err(GameError::BadPick(v));
            };
            next.claim(Side::Primary, v);
            next.claim(Side::Secondary, other);
            next.offer = None;
            next.to_move = Side::Secondary;
        }
        (GameKind::ClientWaiter, Move::Claim(_) | Move::ClaimSet(_)) => return Err(GameError::WrongPhase),
        (_, Move::ClaimSet(set)) => {
            if !conv.claims_sets() || set == 0 {
                return Err(GameError::WrongPhase);
            }
            if let Some(v) = bits(set).find(|&v| !available(v)) {
                return Err(GameError::Unavailable(v));
            }
            for v in bits(set) {
                next.claim(pos.to_move, v);
            }
            next.to_move = pos.to_move.other();
        }
        (_, Move::Claim(v)) => {
            if !available(v) {
                return Err(GameError::Unavailable(v));
            }
            next.claim(pos.to_move, v);
            next.to_move = pos.to_move.other();
        }
        _ => return Err(GameError::WrongPhase),
    }
    Ok(settle(board, conv, next))
}
