use std::collections::HashMap;

use super::{bits, settle, terminal_value, Board, Convention, GameKind, GameOutcome, GamePosition, Side};
use crate::hypergraph::Hypergraph;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SolveOptions {
    pub budget: u64,
    pub transposition: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { budget: super::DEFAULT_GAME_BUDGET, transposition: true }
    }
}

pub fn solve_positional(h: &Hypergraph, conv: Convention, budget: u64) -> GameOutcome {
    solve_positional_with(h, conv, SolveOptions { budget, transposition: true })
}

/// Exact minimax. Panics if the board exceeds the bitset width; callers
/// with untrusted input should build a [`Board`] first.
pub fn solve_positional_with(h: &Hypergraph, conv: Convention, opts: SolveOptions) -> GameOutcome {
    let board = Board::new(h).expect("board too large for the exact solver");
    let mut solver = Solver::new(board, conv, opts);
    let root = GamePosition::initial(&solver.board, &conv);
    let value = solver.value(&root);
    GameOutcome {
        winner: value.map(|v| conv.winner_for_value(v)),
        exact: value.is_some(),
        nodes_explored: solver.nodes(),
    }
}

struct BudgetExceeded;

type Key = (u128, u128, u16);

/// Reusable search state; values are from the primary side's perspective.
pub struct Solver {
    board: Board,
    conv: Convention,
    table: HashMap<Key, i8>,
    use_table: bool,
    nodes: u64,
    budget: u64,
}

impl Solver {
    pub fn new(board: Board, conv: Convention, opts: SolveOptions) -> Self {
        Solver { board, conv, table: HashMap::new(), use_table: opts.transposition, nodes: 0, budget: opts.budget }
    }

    pub fn board(&self) -> &Board {
        &self.board
    }

    pub fn convention(&self) -> &Convention {
        &self.conv
    }

    pub fn nodes(&self) -> u64 {
        self.nodes
    }

    /// `None` once the node budget is spent; further calls stay `None`.
    pub fn value(&mut self, pos: &GamePosition) -> Option<i8> {
        if self.nodes > self.budget {
            return None;
        }
        self.eval(*pos).ok()
    }

    fn key(pos: &GamePosition) -> Key {
        let offer = pos.offer.map_or(0, |(a, b)| 1 + (a as u16) * 128 + b as u16);
        (pos.primary, pos.secondary, (offer << 1) | (pos.to_move == Side::Secondary) as u16)
    }

    fn eval(&mut self, pos: GamePosition) -> Result<i8, BudgetExceeded> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(BudgetExceeded);
        }
        if let Some(v) = terminal_value(&self.board, &self.conv, &pos) {
            return Ok(v);
        }
        let key = Self::key(&pos);
        if self.use_table {
            if let Some(&v) = self.table.get(&key) {
                return Ok(v);
            }
        }
        let maximizing = pos.to_move == Side::Primary;
        let (goal, mut best) = if maximizing { (1, -1) } else { (-1, 1) };
        let free = pos.unclaimed(&self.board);
        let better = |v: i8, best: i8| if maximizing { v > best } else { v < best };

        match (self.conv.kind, pos.offer) {
            (GameKind::ClientWaiter, Some((a, b))) => {
                for (keep, give) in [(a, b), (b, a)] {
                    let mut child = pos;
                    child.primary |= 1 << keep;
                    child.secondary |= 1 << give;
                    child.offer = None;
                    child.to_move = Side::Secondary;
                    let v = self.eval(settle(&self.board, &self.conv, child))?;
                    if better(v, best) {
                        best = v;
                    }
                    if best == goal {
                        break;
                    }
                }
            }
            (GameKind::ClientWaiter, None) => {
                'offers: for a in bits(free) {
                    for b in bits(free & !((2u128 << a) - 1)) {
                        let mut child = pos;
                        child.offer = Some((a, b));
                        child.to_move = Side::Primary;
                        let v = self.eval(child)?;
                        if better(v, best) {
                            best = v;
                        }
                        if best == goal {
                            break 'offers;
                        }
                    }
                }
            }
            _ if self.conv.claims_sets() => {
                let mut sub = free;
                while sub != 0 {
                    let mut child = pos;
                    match pos.to_move {
                        Side::Primary => child.primary |= sub,
                        Side::Secondary => child.secondary |= sub,
                    }
                    child.to_move = pos.to_move.other();
                    let val = self.eval(child)?;
                    if better(val, best) {
                        best = val;
                    }
                    if best == goal {
                        break;
                    }
                    sub = (sub - 1) & free;
                }
            }
            _ => {
                for v in bits(free) {
                    let mut child = pos;
                    match pos.to_move {
                        Side::Primary => child.primary |= 1 << v,
                        Side::Secondary => child.secondary |= 1 << v,
                    }
                    child.to_move = pos.to_move.other();
                    let val = self.eval(child)?;
                    if better(val, best) {
                        best = val;
                    }
                    if best == goal {
                        break;
                    }
                }
            }
        }
        if self.use_table {
            self.table.insert(key, best);
        }
        Ok(best)
    }
}
