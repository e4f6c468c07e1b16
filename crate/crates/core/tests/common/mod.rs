//! Strategies and brute-force oracles shared by the integration tests. The
//! oracles walk the raw game trees with no pruning or memoisation.
#![allow(dead_code)]

use bdqbf_core::formula::{PairedSatInstance, QbfFormula, Quantifier};
use bdqbf_core::hypergraph::Hypergraph;
use proptest::prelude::*;

pub fn quantifier() -> impl Strategy<Value = Quantifier> {
    prop_oneof![Just(Quantifier::Exists), Just(Quantifier::Forall)]
}

/// Clauses as DIMACS literal lists over `1..=n`.
pub fn clauses(n: usize, max_len: usize, max_clauses: usize) -> impl Strategy<Value = Vec<Vec<i32>>> {
    let lit = (1..=n as i32, any::<bool>()).prop_map(|(v, neg)| if neg { -v } else { v });
    prop::collection::vec(prop::collection::vec(lit, 1..=max_len), 0..=max_clauses)
}

pub fn qbf(max_vars: usize, max_len: usize, max_clauses: usize) -> impl Strategy<Value = QbfFormula> {
    (1..=max_vars).prop_flat_map(move |n| {
        (prop::collection::vec(quantifier(), n), clauses(n, max_len, max_clauses)).prop_map(|(qs, cls)| {
            let refs: Vec<&[i32]> = cls.iter().map(|c| c.as_slice()).collect();
            QbfFormula::from_dimacs(&qs, &refs)
        })
    })
}

pub fn hypergraph(max_vertices: usize, max_edges: usize, max_edge: usize) -> impl Strategy<Value = Hypergraph> {
    (1..=max_vertices).prop_flat_map(move |n| {
        prop::collection::vec(prop::collection::btree_set(0..n, 1..=max_edge.min(n)), 0..=max_edges)
            .prop_map(move |es| Hypergraph::new(n, es.into_iter().map(|e| e.into_iter().collect()).collect()).unwrap())
    })
}

fn satisfied(f: &[Vec<i32>], assignment: &[bool]) -> bool {
    f.iter().all(|c| c.iter().any(|&l| assignment[l.unsigned_abs() as usize - 1] == (l > 0)))
}

fn dimacs(f: &QbfFormula) -> Vec<Vec<i32>> {
    f.matrix().clauses().iter().map(|c| c.to_dimacs()).collect()
}

/// Truth of a QBF by expanding every assignment in prefix order.
pub fn brute_qbf(f: &QbfFormula) -> bool {
    fn go(order: &[(usize, Quantifier)], k: usize, a: &mut Vec<bool>, cls: &[Vec<i32>]) -> bool {
        if k == order.len() {
            return satisfied(cls, a);
        }
        let (v, q) = order[k];
        let mut results = [false; 2];
        for (i, val) in [false, true].into_iter().enumerate() {
            a[v] = val;
            results[i] = go(order, k + 1, a, cls);
        }
        match q {
            Quantifier::Exists => results[0] || results[1],
            Quantifier::Forall => results[0] && results[1],
        }
    }
    let order: Vec<(usize, Quantifier)> = f.prefix().entries().iter().map(|e| (e.0.index(), e.1)).collect();
    go(&order, 0, &mut vec![false; f.num_vars()], &dimacs(f))
}

/// Paired-SAT value: Satisfier picks a pair and sets its first variable,
/// Falsifier sets the second.
pub fn brute_paired_sat(p: &PairedSatInstance) -> bool {
    fn go(pairs: &[(usize, usize)], used: u32, a: &mut Vec<bool>, cls: &[Vec<i32>]) -> bool {
        if used.count_ones() as usize == pairs.len() {
            return satisfied(cls, a);
        }
        (0..pairs.len()).filter(|i| used >> i & 1 == 0).any(|i| {
            let (x, y) = pairs[i];
            [false, true].into_iter().any(|vx| {
                a[x] = vx;
                [false, true].into_iter().all(|vy| {
                    a[y] = vy;
                    go(pairs, used | 1 << i, a, cls)
                })
            })
        })
    }
    let pairs: Vec<(usize, usize)> = p.pairs().iter().map(|&(x, y)| (x.index(), y.index())).collect();
    let cls: Vec<Vec<i32>> = p.matrix().clauses().iter().map(|c| c.to_dimacs()).collect();
    go(&pairs, 0, &mut vec![false; p.matrix().num_vars()], &cls)
}

fn owns_edge(h: &Hypergraph, set: u32) -> bool {
    h.edges().iter().any(|e| e.iter().all(|&v| set >> v & 1 == 1))
}

/// Maker-Breaker with Maker first: does Maker win?
pub fn brute_mb(h: &Hypergraph) -> bool {
    fn go(h: &Hypergraph, free: u32, maker: u32, maker_turn: bool) -> bool {
        if owns_edge(h, maker) {
            return true;
        }
        if free == 0 {
            return false;
        }
        let moves = (0..32).filter(|v| free >> v & 1 == 1);
        if maker_turn {
            moves.into_iter().any(|v| go(h, free & !(1 << v), maker | 1 << v, false))
        } else {
            moves.into_iter().all(|v| go(h, free & !(1 << v), maker, true))
        }
    }
    go(h, (1u32 << h.num_vertices()) - 1, 0, true)
}

/// Maker-Maker value for the first player: 1 win, 0 draw, -1 loss.
pub fn brute_mm(h: &Hypergraph) -> i8 {
    fn go(h: &Hypergraph, free: u32, me: u32, other: u32) -> i8 {
        if free == 0 {
            return 0;
        }
        let mut best = -1;
        for v in (0..32).filter(|v| free >> v & 1 == 1) {
            let mine = me | 1 << v;
            let val = if owns_edge(h, mine) { 1 } else { -go(h, free & !(1 << v), other, mine) };
            best = best.max(val);
            if best == 1 {
                break;
            }
        }
        best
    }
    if h.edges().iter().any(|e| e.is_empty()) {
        return 1;
    }
    go(h, (1u32 << h.num_vertices()) - 1, 0, 0)
}

/// Strict Avoider-Enforcer: does Avoider win?
pub fn brute_ae(h: &Hypergraph, avoider_first: bool) -> bool {
    fn go(h: &Hypergraph, free: u32, avoider: u32, avoider_turn: bool) -> bool {
        if owns_edge(h, avoider) {
            return false;
        }
        if free == 0 {
            return true;
        }
        let moves = (0..32).filter(|v| free >> v & 1 == 1);
        if avoider_turn {
            moves.into_iter().any(|v| go(h, free & !(1 << v), avoider | 1 << v, false))
        } else {
            moves.into_iter().all(|v| go(h, free & !(1 << v), avoider, true))
        }
    }
    go(h, (1u32 << h.num_vertices()) - 1, 0, avoider_first)
}

/// Client-Waiter with the lone last vertex going to Client: does Client win?
pub fn brute_cw(h: &Hypergraph) -> bool {
    fn go(h: &Hypergraph, free: u32, client: u32) -> bool {
        if owns_edge(h, client) {
            return true;
        }
        match free.count_ones() {
            0 => false,
            1 => owns_edge(h, client | free),
            _ => {
                let vs: Vec<u32> = (0..32).filter(|v| free >> v & 1 == 1).collect();
                vs.iter().enumerate().all(|(i, &a)| {
                    vs[i + 1..].iter().all(|&b| {
                        let rest = free & !(1 << a) & !(1 << b);
                        go(h, rest, client | 1 << a) || go(h, rest, client | 1 << b)
                    })
                })
            }
        }
    }
    go(h, (1u32 << h.num_vertices()) - 1, 0)
}
