use std::collections::HashMap;

use super::{restrict, BudgetExceeded, QbfOutcome, Residual};
use crate::formula::PairedSatInstance;

/// Exact evaluation of the Paired-SAT game.
///
/// Each round Satisfier picks an unselected pair and values its first
/// variable; Falsifier then values the second. Positions are memoized on
/// (unselected pairs, residual clause set). Pairs whose variables are absent
/// from the residual are dropped: selecting one changes nothing.
pub fn solve_paired_sat(instance: &PairedSatInstance, node_budget: u64) -> QbfOutcome {
    assert!(instance.pairs().len() <= 64, "at most 64 pairs supported");
    let n = instance.matrix().num_vars();
    let mut falsifier_owned = vec![false; n];
    for &(_, b) in instance.pairs() {
        falsifier_owned[b.index()] = true;
    }
    let mut initial: Residual = instance
        .matrix()
        .clauses()
        .iter()
        .filter(|c| !c.is_tautology())
        .map(|c| c.to_dimacs())
        .collect();
    initial.sort_unstable();
    initial.dedup();
    let mut search = PairSearch {
        pairs: instance.pairs().iter().map(|&(a, b)| (a.id() as i32, b.id() as i32)).collect(),
        falsifier_owned,
        memo: HashMap::new(),
        nodes: 0,
        budget: node_budget,
    };
    let all = if instance.pairs().len() == 64 { u64::MAX } else { (1u64 << instance.pairs().len()) - 1 };
    match search.eval(all, initial) {
        Ok(v) => QbfOutcome::decided(v, search.nodes),
        Err(BudgetExceeded) => QbfOutcome::exhausted(search.nodes),
    }
}

struct PairSearch {
    pairs: Vec<(i32, i32)>,
    falsifier_owned: Vec<bool>,
    memo: HashMap<(u64, Residual), bool>,
    nodes: u64,
    budget: u64,
}

impl PairSearch {
    fn eval(&mut self, mut remaining: u64, residual: Residual) -> Result<bool, BudgetExceeded> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(BudgetExceeded);
        }
        if residual.is_empty() {
            return Ok(true);
        }
        // a clause over Falsifier variables only is falsified by him
        if residual
            .iter()
            .any(|c| c.iter().all(|&l| self.falsifier_owned[l.unsigned_abs() as usize - 1]))
        {
            return Ok(false);
        }
        for (i, &(a, b)) in self.pairs.iter().enumerate() {
            let live = residual.iter().flatten().any(|&l| l.abs() == a || l.abs() == b);
            if !live {
                remaining &= !(1u64 << i);
            }
        }
        let key = (remaining, residual);
        if let Some(&v) = self.memo.get(&key) {
            return Ok(v);
        }
        let (remaining, residual) = key;
        let mut result = false;
        'pick: for i in 0..self.pairs.len() {
            if remaining & (1u64 << i) == 0 {
                continue;
            }
            let (a, b) = self.pairs[i];
            for sa in [a, -a] {
                let mut satisfier_wins = true;
                for sb in [b, -b] {
                    let child = restrict(&residual, &[sa, sb]);
                    if !self.eval(remaining & !(1u64 << i), child)? {
                        satisfier_wins = false;
                        break;
                    }
                }
                if satisfier_wins {
                    result = true;
                    break 'pick;
                }
            }
        }
        self.memo.insert((remaining, residual), result);
        Ok(result)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{CnfMatrix, Var};
    use crate::qbf::QbfWinner::*;

    fn inst(num_vars: usize, pairs: &[(u32, u32)], clauses: &[&[i32]]) -> PairedSatInstance {
        PairedSatInstance::new(
            CnfMatrix::from_dimacs(num_vars, clauses),
            pairs.iter().map(|&(a, b)| (Var::new(a), Var::new(b))).collect(),
        )
        .unwrap()
    }

    #[test]
    fn single_pair_games() {
        let win = |i: &PairedSatInstance| solve_paired_sat(i, 10_000).winner;
        assert_eq!(win(&inst(2, &[(1, 2)], &[&[1]])), Some(SatisfierWin));
        assert_eq!(win(&inst(2, &[(1, 2)], &[&[2]])), Some(FalsifierWin));
        assert_eq!(win(&inst(2, &[(1, 2)], &[&[1, 2], &[-1, -2]])), Some(FalsifierWin));
        assert_eq!(win(&inst(2, &[(1, 2)], &[&[1, 2], &[-1, 2]])), Some(FalsifierWin));
        assert_eq!(win(&inst(2, &[(1, 2)], &[&[2, -2]])), Some(SatisfierWin));
    }

    #[test]
    fn pair_order_is_satisfier_choice() {
        // x3 must copy y2's value: Satisfier plays pair (1,2) first, then (3,4).
        let i = inst(4, &[(3, 4), (1, 2)], &[&[3, -2], &[-3, 2]]);
        assert_eq!(solve_paired_sat(&i, 10_000).winner, Some(SatisfierWin));
        // symmetric requirement on both sides cannot be met
        let i = inst(4, &[(1, 2), (3, 4)], &[&[3, -2], &[-3, 2], &[1, -4], &[-1, 4]]);
        assert_eq!(solve_paired_sat(&i, 10_000).winner, Some(FalsifierWin));
    }

    #[test]
    fn budget_exhaustion() {
        let i = inst(4, &[(1, 2), (3, 4)], &[&[1, 3], &[-1, -3, 2]]);
        assert!(!solve_paired_sat(&i, 1).exact);
    }
}
