//! Deciding QBF games: an exhaustive game-tree oracle, the rule-based
//! polynomial decider for formulas of maximum degree two, and the Paired-SAT
//! game solver.

mod oracle;
mod paired;
mod qbf2;

use serde::{Deserialize, Serialize};

pub use oracle::solve_qbf_oracle;
pub use paired::solve_paired_sat;
pub use qbf2::{apply_rule, solve_qbf2, Qbf2Error, Qbf2Solution, Rule, RuleApplication, TraceStep, Verdict};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum QbfWinner {
    SatisfierWin,
    FalsifierWin,
}

impl QbfWinner {
    pub fn from_truth(value: bool) -> Self {
        if value {
            QbfWinner::SatisfierWin
        } else {
            QbfWinner::FalsifierWin
        }
    }

    pub fn is_true(self) -> bool {
        self == QbfWinner::SatisfierWin
    }
}

/// Result of a (possibly budgeted) QBF or Paired-SAT solve.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QbfOutcome {
    /// `None` iff the node budget ran out.
    pub winner: Option<QbfWinner>,
    pub exact: bool,
    pub nodes_explored: u64,
}

impl QbfOutcome {
    pub(crate) fn decided(value: bool, nodes: u64) -> Self {
        QbfOutcome { winner: Some(QbfWinner::from_truth(value)), exact: true, nodes_explored: nodes }
    }

    pub(crate) fn exhausted(nodes: u64) -> Self {
        QbfOutcome { winner: None, exact: false, nodes_explored: nodes }
    }
}

/// Default node budget used by callers that do not pick one.
pub const DEFAULT_NODE_BUDGET: u64 = 50_000_000;

/// Residual clause set used as a memo key: clauses with satisfied ones removed
/// and falsified literals dropped, sorted and deduplicated.
pub(crate) type Residual = Vec<Vec<i32>>;

/// Applies `lit := true` for each literal in `assign` to `residual`.
pub(crate) fn restrict(residual: &[Vec<i32>], assign: &[i32]) -> Residual {
    let mut out: Residual = Vec::with_capacity(residual.len());
    'clauses: for c in residual {
        let mut kept = Vec::with_capacity(c.len());
        for &l in c {
            if assign.contains(&l) {
                continue 'clauses;
            }
            if !assign.contains(&-l) {
                kept.push(l);
            }
        }
        out.push(kept);
    }
    out.sort_unstable();
    out.dedup();
    out
}

pub(crate) struct BudgetExceeded;
