use std::collections::HashMap;

use super::{restrict, BudgetExceeded, QbfOutcome, Residual};
use crate::formula::{QbfFormula, Quantifier};

/// Exact minimax evaluation of the QBF game in prefix order.
///
/// Positions are memoized on (prefix position, residual clause set). A
/// position is lost for Satisfier as soon as some residual clause has no
/// existential literal left: Falsifier falsifies it whatever else happens.
pub fn solve_qbf_oracle(formula: &QbfFormula, node_budget: u64) -> QbfOutcome {
    let order: Vec<(i32, Quantifier)> = formula
        .prefix()
        .entries()
        .iter()
        .map(|&(v, q)| (v.id() as i32, q))
        .collect();
    let table = formula.prefix().quantifier_table();
    let initial: Residual = {
        let mut r: Residual = formula
            .matrix()
            .clauses()
            .iter()
            .filter(|c| !c.is_tautology())
            .map(|c| c.to_dimacs())
            .collect();
        r.sort_unstable();
        r.dedup();
        r
    };
    let mut search = Search {
        order,
        universal: table.iter().map(|&q| q == Quantifier::Forall).collect(),
        memo: HashMap::new(),
        nodes: 0,
        budget: node_budget,
    };
    match search.eval(0, initial) {
        Ok(v) => QbfOutcome::decided(v, search.nodes),
        Err(BudgetExceeded) => QbfOutcome::exhausted(search.nodes),
    }
}

struct Search {
    order: Vec<(i32, Quantifier)>,
    universal: Vec<bool>,
    memo: HashMap<(usize, Residual), bool>,
    nodes: u64,
    budget: u64,
}

impl Search {
    fn eval(&mut self, mut pos: usize, residual: Residual) -> Result<bool, BudgetExceeded> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(BudgetExceeded);
        }
        if residual.is_empty() {
            return Ok(true);
        }
        if residual
            .iter()
            .any(|c| c.iter().all(|&l| self.universal[l.unsigned_abs() as usize - 1]))
        {
            return Ok(false);
        }
        // variables absent from the residual cannot change the outcome
        while !residual.iter().any(|c| c.iter().any(|&l| l.abs() == self.order[pos].0)) {
            pos += 1;
        }
        let key = (pos, residual);
        if let Some(&v) = self.memo.get(&key) {
            return Ok(v);
        }
        let (pos, residual) = key;
        let (var, q) = self.order[pos];
        let exists = q == Quantifier::Exists;
        let mut result = !exists;
        for lit in [var, -var] {
            let child = restrict(&residual, &[lit]);
            let v = self.eval(pos + 1, child)?;
            if v == exists {
                result = exists;
                break;
            }
        }
        self.memo.insert((pos, residual), result);
        Ok(result)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::Quantifier::*;
    use crate::qbf::QbfWinner::*;

    fn solve(qs: &[Quantifier], clauses: &[&[i32]]) -> Option<crate::qbf::QbfWinner> {
        solve_qbf_oracle(&QbfFormula::from_dimacs(qs, clauses), 1_000_000).winner
    }

    /// Plain recursive evaluation without memo or pruning.
    fn brute(f: &QbfFormula) -> bool {
        fn go(f: &QbfFormula, pos: usize, assign: &mut Vec<bool>) -> bool {
            if pos == f.prefix().len() {
                return f.matrix().eval(assign);
            }
            let (v, q) = f.prefix().entries()[pos];
            let mut results = [false; 2];
            for (i, val) in [true, false].into_iter().enumerate() {
                assign[v.index()] = val;
                results[i] = go(f, pos + 1, assign);
            }
            match q {
                Exists => results[0] || results[1],
                Forall => results[0] && results[1],
            }
        }
        go(f, 0, &mut vec![false; f.num_vars()])
    }

    #[test]
    fn basic_outcomes() {
        assert_eq!(solve(&[Exists], &[&[1, -1]]), Some(SatisfierWin));
        assert_eq!(solve(&[Forall], &[&[1]]), Some(FalsifierWin));
        assert_eq!(solve(&[Exists, Forall], &[&[1, 2], &[-1, -2]]), Some(FalsifierWin));
        assert_eq!(solve(&[Forall, Exists], &[&[1, 2], &[-1, -2]]), Some(SatisfierWin));
        assert_eq!(solve(&[Exists], &[&[]]), Some(FalsifierWin));
        assert_eq!(solve(&[], &[]), Some(SatisfierWin));
    }

    #[test]
    fn budget_exhaustion_is_inexact() {
        let f = QbfFormula::from_dimacs(&[Exists, Forall, Exists], &[&[1, 2, 3], &[-1, -2, -3]]);
        let out = solve_qbf_oracle(&f, 1);
        assert!(!out.exact);
        assert_eq!(out.winner, None);
    }

    #[test]
    fn prefix_order_not_id_order() {
        use crate::formula::{CnfMatrix, QuantifierPrefix, Var};
        // ∀x2 ∃x1 (x1 ∨ x2)(¬x1 ∨ ¬x2) is true; id order would make it false
        let m = CnfMatrix::from_dimacs(2, &[&[1, 2], &[-1, -2]]);
        let p = QuantifierPrefix::new(vec![(Var::new(2), Forall), (Var::new(1), Exists)]);
        let f = QbfFormula::new(p, m).unwrap();
        assert_eq!(solve_qbf_oracle(&f, 1000).winner, Some(SatisfierWin));
        assert!(brute(&f));
    }

    #[test]
    fn agrees_with_plain_recursion() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..400 {
            let n = rng.gen_range(1..=6);
            let qs: Vec<Quantifier> =
                (0..n).map(|_| if rng.gen_bool(0.5) { Exists } else { Forall }).collect();
            let m = rng.gen_range(0..=6);
            let clauses: Vec<Vec<i32>> = (0..m)
                .map(|_| {
                    let k = rng.gen_range(1..=3);
                    (0..k)
                        .map(|_| {
                            let v = rng.gen_range(1..=n);
                            if rng.gen_bool(0.5) { v } else { -v }
                        })
                        .collect()
                })
                .collect();
            let refs: Vec<&[i32]> = clauses.iter().map(Vec::as_slice).collect();
            let f = QbfFormula::from_dimacs(&qs, &refs);
            let out = solve_qbf_oracle(&f, u64::MAX);
            assert_eq!(out.winner.unwrap().is_true(), brute(&f), "{f:?}");
        }
    }
}
