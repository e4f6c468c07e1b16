use std::collections::VecDeque;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::mb::{MbGadgetTrace, VertexRole};
use crate::game::{terminal_value, Board, Convention, GameError, GamePosition, Side, SolveOptions, Solver};
use crate::hypergraph::Hypergraph;

/// Maker's winning strategy on the source board, answered on demand by the
/// exact solver. Positions may give Maker surplus vertices (when she spends
/// a free move on the source game); in Maker-Breaker that never hurts her.
pub struct SourceStrategy {
    solver: Solver,
}

impl SourceStrategy {
    /// Fails unless Maker, moving first, wins `source` within `budget`.
    pub fn new(source: &Hypergraph, budget: u64) -> Result<Self, String> {
        let board = Board::new(source).map_err(|e: GameError| e.to_string())?;
        let conv = Convention::maker_breaker();
        let mut solver = Solver::new(board, conv, SolveOptions { budget, transposition: true });
        let root = GamePosition::initial(solver.board(), &conv);
        match solver.value(&root) {
            Some(1) => Ok(SourceStrategy { solver }),
            Some(_) => Err("Breaker wins the source game".into()),
            None => Err("source game not solved within budget".into()),
        }
    }

    /// Maker's next source vertex, `Ok(None)` once she owns a full hyperedge.
    fn next(&mut self, maker: u128, breaker: u128) -> Result<Option<usize>, String> {
        let pos = GamePosition { primary: maker, secondary: breaker, to_move: Side::Primary, offer: None };
        let conv = *self.solver.convention();
        match terminal_value(self.solver.board(), &conv, &pos) {
            Some(1) => return Ok(None),
            Some(_) => return Err("source position already lost".into()),
            None => {}
        }
        let free = pos.unclaimed(self.solver.board());
        for v in crate::game::bits(free) {
            let child = GamePosition { primary: maker | 1 << v, to_move: Side::Secondary, ..pos };
            match self.solver.value(&child) {
                Some(1) => return Ok(Some(v)),
                Some(_) => {}
                None => return Err("source strategy ran out of budget".into()),
            }
        }
        Err("source strategy has no winning move".into())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BreakerPolicy {
    /// Uniformly random unclaimed vertex.
    Random,
    /// Blocks a live hyperedge with the fewest unclaimed vertices left,
    /// ties broken at random.
    GreedyBlock,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PlayoutResult {
    MakerWin { edge: usize },
    Defect(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlayoutRecord {
    pub result: PlayoutResult,
    /// Claimed vertices in order; Maker moves first.
    pub moves: Vec<usize>,
    /// Source vertices claimed in the mirrored source game, per side.
    pub source_maker: Vec<usize>,
    pub source_breaker: Vec<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Gadget {
    Fresh,
    /// Maker holds `x`, no Breaker vertex inside yet.
    Maker,
    Resolved,
    Breaker,
}

struct Sweep {
    order: Vec<usize>,
    next: usize,
}

struct Board2<'a> {
    h: &'a Hypergraph,
    incidence: Vec<Vec<usize>>,
    owner: Vec<Option<Side>>,
    maker_count: Vec<usize>,
    breaker_count: Vec<usize>,
    /// Unclaimed vertices with their slot in `free`.
    free: Vec<usize>,
    slot: Vec<usize>,
    threats: Vec<usize>,
    /// Greedy buckets of edge ids by unclaimed count, lazily validated.
    buckets: Vec<Vec<usize>>,
}

impl<'a> Board2<'a> {
    fn new(h: &'a Hypergraph) -> Self {
        let n = h.num_vertices();
        let rank = h.rank();
        let mut buckets = vec![Vec::new(); rank + 1];
        for (i, e) in h.edges().iter().enumerate() {
            buckets[e.len()].push(i);
        }
        Board2 {
            h,
            incidence: h.incidence(),
            owner: vec![None; n],
            maker_count: vec![0; h.num_edges()],
            breaker_count: vec![0; h.num_edges()],
            free: (0..n).collect(),
            slot: (0..n).collect(),
            threats: h.edges().iter().enumerate().filter(|(_, e)| e.len() == 1).map(|(i, _)| i).collect(),
            buckets,
        }
    }

    fn remaining(&self, e: usize) -> usize {
        self.h.edge(e).len() - self.maker_count[e] - self.breaker_count[e]
    }

    /// Claims `v`; returns a hyperedge Maker completed, if any.
    fn claim(&mut self, v: usize, side: Side) -> Option<usize> {
        debug_assert!(self.owner[v].is_none());
        self.owner[v] = Some(side);
        let s = self.slot[v];
        let last = *self.free.last().unwrap();
        self.free.swap_remove(s);
        if last != v {
            self.slot[last] = s;
        }
        let mut won = None;
        for &e in &self.incidence[v] {
            match side {
                Side::Primary => {
                    self.maker_count[e] += 1;
                    if self.breaker_count[e] == 0 {
                        let left = self.remaining(e);
                        if left == 0 {
                            won = Some(e);
                        } else {
                            if left == 1 {
                                self.threats.push(e);
                            }
                            self.buckets[left].push(e);
                        }
                    }
                }
                Side::Secondary => self.breaker_count[e] += 1,
            }
        }
        won
    }

    fn winning_vertex(&mut self) -> Option<usize> {
        while let Some(&e) = self.threats.last() {
            if self.breaker_count[e] == 0 && self.remaining(e) == 1 {
                return self.h.edge(e).iter().copied().find(|&v| self.owner[v].is_none());
            }
            self.threats.pop();
        }
        None
    }

    fn greedy_block(&mut self, rng: &mut ChaCha8Rng) -> Option<usize> {
        for left in 1..self.buckets.len() {
            while !self.buckets[left].is_empty() {
                let k = rng.gen_range(0..self.buckets[left].len());
                let e = self.buckets[left][k];
                if self.breaker_count[e] == 0 && self.remaining(e) == left {
                    let options: Vec<usize> =
                        self.h.edge(e).iter().copied().filter(|&v| self.owner[v].is_none()).collect();
                    return Some(options[rng.gen_range(0..options.len())]);
                }
                self.buckets[left].swap_remove(k);
            }
        }
        None
    }
}

/// Plays Maker's forcing strategy on the bounded-degree board `out` built
/// from `trace`, against `policy`, with Maker moving first.
///
/// Maker claims `x_i` wherever the source strategy claims `u_i`; Breaker's
/// first vertex inside an untouched gadget counts as his source move.
/// When Breaker enters a gadget whose `x` Maker holds, Maker sweeps the
/// other tree root to leaves claiming `v` then `w`, each claim threatening
/// the matching `a`/`b`. Free moves go to the source game, then to
/// sweeping the first tree of every gadget she holds.
pub fn maker_forcing_playout(
    out: &Hypergraph,
    trace: &MbGadgetTrace,
    strategy: &mut SourceStrategy,
    policy: BreakerPolicy,
    seed: u64,
) -> PlayoutRecord {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut b = Board2::new(out);
    let mut gadget = vec![Gadget::Fresh; trace.gadgets.len()];
    let (mut src_maker, mut src_breaker) = (0u128, 0u128);
    let mut record = PlayoutRecord {
        result: PlayoutResult::Defect("unfinished".into()),
        moves: Vec::new(),
        source_maker: Vec::new(),
        source_breaker: Vec::new(),
    };
    let mut sweeps: VecDeque<Sweep> = VecDeque::new();
    let mut source_done = false;

    let sweep_of = |g: usize, tree: usize| Sweep {
        order: trace.gadgets[g].trees[tree].nodes.iter().flat_map(|n| [n.v, n.w]).collect(),
        next: 0,
    };

    loop {
        // Maker
        let mut mv = b.winning_vertex();
        if mv.is_none() {
            while let Some(s) = sweeps.front_mut() {
                while s.next < s.order.len() && b.owner[s.order[s.next]] == Some(Side::Primary) {
                    s.next += 1;
                }
                if s.next == s.order.len() {
                    sweeps.pop_front();
                    continue;
                }
                let v = s.order[s.next];
                if b.owner[v].is_some() {
                    record.result = PlayoutResult::Defect(format!("sweep blocked at vertex {v}"));
                    return record;
                }
                mv = Some(v);
                break;
            }
        }
        if mv.is_none() && !source_done {
            match strategy.next(src_maker, src_breaker) {
                Ok(Some(u)) => {
                    if gadget[u] != Gadget::Fresh {
                        record.result = PlayoutResult::Defect(format!("source move {u} is not fresh"));
                        return record;
                    }
                    gadget[u] = Gadget::Maker;
                    src_maker |= 1 << u;
                    record.source_maker.push(u);
                    mv = Some(trace.gadgets[u].x);
                }
                Ok(None) => source_done = true,
                Err(e) => {
                    record.result = PlayoutResult::Defect(e);
                    return record;
                }
            }
        }
        if mv.is_none() {
            if let Some(g) = gadget.iter().position(|&s| s == Gadget::Maker) {
                gadget[g] = Gadget::Resolved;
                let s = sweep_of(g, 0);
                mv = Some(s.order[0]);
                sweeps.push_back(s);
            }
        }
        if mv.is_none() {
            mv = b
                .free
                .iter()
                .copied()
                .find(|&v| gadget[trace.roles[v].gadget()] != Gadget::Fresh)
                .or_else(|| b.free.first().copied());
        }
        let Some(v) = mv else {
            record.result = PlayoutResult::Defect("board exhausted without a Maker win".into());
            return record;
        };
        record.moves.push(v);
        if let Some(edge) = b.claim(v, Side::Primary) {
            record.result = PlayoutResult::MakerWin { edge };
            return record;
        }

        // Breaker
        let reply = match policy {
            BreakerPolicy::Random => {
                if b.free.is_empty() {
                    None
                } else {
                    Some(b.free[rng.gen_range(0..b.free.len())])
                }
            }
            BreakerPolicy::GreedyBlock => b.greedy_block(&mut rng).or_else(|| b.free.first().copied()),
        };
        let Some(y) = reply else {
            record.result = PlayoutResult::Defect("board exhausted without a Maker win".into());
            return record;
        };
        record.moves.push(y);
        b.claim(y, Side::Secondary);
        let role = trace.roles[y];
        let g = role.gadget();
        match gadget[g] {
            Gadget::Fresh => {
                gadget[g] = Gadget::Breaker;
                src_breaker |= 1 << g;
                record.source_breaker.push(g);
            }
            Gadget::Maker => {
                let VertexRole::Tree { tree, .. } = role else { unreachable!("Maker holds x") };
                gadget[g] = Gadget::Resolved;
                sweeps.push_back(sweep_of(g, 1 - tree));
            }
            Gadget::Resolved | Gadget::Breaker => {}
        }
    }
}
