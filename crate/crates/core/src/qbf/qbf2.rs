//! Rule-based decision procedure for QBF formulas in which every variable
//! occurs in at most two clauses.
//!
//! Rules, applied one at a time under a fixed precedence:
//!
//! * `R1`: a clause holding a literal and its complement is removed
//!   (first such clause in matrix order);
//! * otherwise the innermost prefix variable `x` is examined:
//!   * `R0`: `x` occurs nowhere, its quantifier is dropped;
//!   * `R2`: `x` is universal, it is deleted from its clauses; an emptied
//!     clause makes the formula false;
//!   * `R3`: `x` is existential and pure, its clauses are removed together
//!     with `x`;
//!   * `R4`: `x` is existential with one positive and one negative
//!     occurrence, the two clauses are replaced by their resolvent (repeated
//!     literals merged) at the position of the earlier one.
//!
//! The formula is true once neither clauses nor variables remain.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{QbfOutcome, QbfWinner};
use crate::formula::{degree_profile, Clause, CnfMatrix, Lit, QbfFormula, Quantifier, QuantifierPrefix, Var};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Rule {
    R0UnusedVariable,
    R1TautologyRemoval,
    R2UniversalElimination,
    R3PureExistential,
    R4ExistentialResolution,
}

impl Rule {
    pub fn tag(self) -> &'static str {
        match self {
            Rule::R0UnusedVariable => "R0",
            Rule::R1TautologyRemoval => "R1",
            Rule::R2UniversalElimination => "R2",
            Rule::R3PureExistential => "R3",
            Rule::R4ExistentialResolution => "R4",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Verdict {
    Continue,
    True,
    False,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Qbf2Error {
    #[error("{var} occurs in {degree} clauses; the procedure needs degree at most 2")]
    DegreeTooHigh { var: Var, degree: usize },
    #[error("formula has neither variables nor clauses")]
    Exhausted,
    #[error("clause {clause} is empty; the formula is already false")]
    EmptyClause { clause: usize },
}

/// One rule application on an explicit formula.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RuleApplication {
    pub rule: Rule,
    /// The eliminated variable, in the numbering of the input formula.
    pub variable: Option<Var>,
    /// Indices (in the input matrix) of the clauses removed or rewritten.
    pub affected: Vec<usize>,
    /// Clauses written in their place.
    pub produced: Vec<Clause>,
    /// The formula after the step. Variables above an eliminated one are
    /// renumbered down by one so ids stay contiguous.
    pub result: QbfFormula,
    pub verdict: Verdict,
}

fn verdict_for(result: &QbfFormula, falsified: bool) -> Verdict {
    if falsified {
        Verdict::False
    } else if result.num_clauses() == 0 && result.num_vars() == 0 {
        Verdict::True
    } else {
        Verdict::Continue
    }
}

fn check_degree(matrix: &CnfMatrix) -> Result<(), Qbf2Error> {
    let profile = degree_profile(matrix);
    match profile.degrees.iter().position(|&d| d > 2) {
        Some(i) => Err(Qbf2Error::DegreeTooHigh { var: Var::from_index(i), degree: profile.degrees[i] }),
        None => Ok(()),
    }
}

/// Removes `var` from the formula, renumbering the variables above it.
fn eliminate(prefix: &QuantifierPrefix, clauses: Vec<Clause>, num_vars: usize, var: Var) -> QbfFormula {
    let shift = |v: Var| if v > var { Var::new(v.id() - 1) } else { v };
    let entries = prefix
        .entries()
        .iter()
        .filter(|(v, _)| *v != var)
        .map(|&(v, q)| (shift(v), q))
        .collect();
    let clauses = clauses
        .into_iter()
        .map(|c| {
            debug_assert!(!c.mentions(var));
            Clause::new(c.lits().iter().map(|l| Lit::new(shift(l.var()), l.is_positive())))
        })
        .collect();
    let matrix = CnfMatrix::new(num_vars - 1, clauses).expect("renumbering keeps literals in range");
    QbfFormula::new(QuantifierPrefix::new(entries), matrix).expect("prefix stays a bijection")
}

/// Applies exactly one rule to `formula`.
pub fn apply_rule(formula: &QbfFormula) -> Result<RuleApplication, Qbf2Error> {
    let matrix = formula.matrix();
    check_degree(matrix)?;
    if let Some(i) = matrix.clauses().iter().position(Clause::is_empty) {
        return Err(Qbf2Error::EmptyClause { clause: i });
    }
    let clauses = matrix.clauses();

    if let Some(i) = clauses.iter().position(Clause::is_tautology) {
        let mut rest = clauses.to_vec();
        rest.remove(i);
        let result = QbfFormula::new(
            formula.prefix().clone(),
            CnfMatrix::new(matrix.num_vars(), rest).unwrap(),
        )
        .unwrap();
        return Ok(RuleApplication {
            rule: Rule::R1TautologyRemoval,
            variable: None,
            affected: vec![i],
            produced: vec![],
            verdict: verdict_for(&result, false),
            result,
        });
    }

    let &(x, q) = formula.prefix().entries().last().ok_or(Qbf2Error::Exhausted)?;
    let occurrences: Vec<usize> = (0..clauses.len()).filter(|&i| clauses[i].mentions(x)).collect();
    let n = matrix.num_vars();

    let (rule, produced, new_clauses, falsified) = if occurrences.is_empty() {
        (Rule::R0UnusedVariable, vec![], clauses.to_vec(), false)
    } else if q == Quantifier::Forall {
        let mut new_clauses = clauses.to_vec();
        let mut produced = Vec::new();
        for &i in &occurrences {
            let c = Clause::new(clauses[i].lits().iter().copied().filter(|l| l.var() != x));
            new_clauses[i] = c.clone();
            produced.push(c);
        }
        let falsified = produced.iter().any(Clause::is_empty);
        (Rule::R2UniversalElimination, produced, new_clauses, falsified)
    } else {
        let polarity = |i: usize| clauses[i].contains(x.positive());
        let pure = occurrences.iter().all(|&i| polarity(i) == polarity(occurrences[0]));
        if pure {
            let kept = (0..clauses.len())
                .filter(|i| !occurrences.contains(i))
                .map(|i| clauses[i].clone())
                .collect();
            (Rule::R3PureExistential, vec![], kept, false)
        } else {
            // degree <= 2 and no tautologies: exactly one occurrence per polarity
            let (first, second) = (occurrences[0], occurrences[1]);
            let resolvent = Clause::new(
                clauses[first]
                    .lits()
                    .iter()
                    .chain(clauses[second].lits())
                    .copied()
                    .filter(|l| l.var() != x),
            );
            let mut new_clauses = clauses.to_vec();
            new_clauses[first] = resolvent.clone();
            new_clauses.remove(second);
            let falsified = resolvent.is_empty();
            (Rule::R4ExistentialResolution, vec![resolvent], new_clauses, falsified)
        }
    };

    let result = eliminate(formula.prefix(), new_clauses, n, x);
    Ok(RuleApplication {
        rule,
        variable: Some(x),
        affected: occurrences,
        produced,
        verdict: verdict_for(&result, falsified),
        result,
    })
}

/// One step of the fast decider. Variables keep their input ids.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceStep {
    pub rule: Rule,
    pub variable: Option<Var>,
    pub removed: Vec<Clause>,
    pub added: Vec<Clause>,
    pub verdict: Verdict,
}

impl fmt::Display for TraceStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.rule.tag())?;
        if let Some(v) = self.variable {
            write!(f, " var={}", v.id())?;
        }
        let list = |f: &mut fmt::Formatter<'_>, name: &str, cs: &[Clause]| -> fmt::Result {
            write!(f, " {name}=[")?;
            for (i, c) in cs.iter().enumerate() {
                if i > 0 {
                    write!(f, ",")?;
                }
                for l in c.lits() {
                    write!(f, "{} ", l)?;
                }
                write!(f, "0")?;
            }
            write!(f, "]")
        };
        list(f, "removed", &self.removed)?;
        list(f, "added", &self.added)?;
        write!(f, " verdict={:?}", self.verdict)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Qbf2Solution {
    pub outcome: QbfOutcome,
    pub trace: Vec<TraceStep>,
}

impl Qbf2Solution {
    /// Line-oriented log, one rule application per line.
    pub fn trace_log(&self) -> String {
        self.trace.iter().map(|s| format!("{s}\n")).collect()
    }
}

/// Decides a formula of maximum degree two by exhaustive rule application.
///
/// Works incrementally over clause slots with per-variable occurrence lists,
/// making the same choices as repeated [`apply_rule`] calls.
pub fn solve_qbf2(formula: &QbfFormula) -> Result<Qbf2Solution, Qbf2Error> {
    check_degree(formula.matrix())?;
    let mut engine = Engine::new(formula);
    let truth = engine.run();
    Ok(Qbf2Solution {
        outcome: QbfOutcome::decided(truth, engine.trace.len() as u64),
        trace: engine.trace,
    })
}

struct Engine {
    slots: Vec<Option<Clause>>,
    occ: Vec<Vec<usize>>,
    tautologies: BTreeSet<usize>,
    live: usize,
    prefix: Vec<(Var, Quantifier)>,
    trace: Vec<TraceStep>,
}

impl Engine {
    fn new(formula: &QbfFormula) -> Self {
        let n = formula.num_vars();
        let mut occ = vec![Vec::new(); n];
        let mut tautologies = BTreeSet::new();
        let slots: Vec<Option<Clause>> = formula.matrix().clauses().iter().cloned().map(Some).collect();
        for (s, c) in slots.iter().enumerate() {
            let c = c.as_ref().unwrap();
            for v in c.vars() {
                occ[v.index()].push(s);
            }
            if c.is_tautology() {
                tautologies.insert(s);
            }
        }
        Engine {
            live: slots.len(),
            slots,
            occ,
            tautologies,
            prefix: formula.prefix().entries().to_vec(),
            trace: Vec::new(),
        }
    }

    fn take(&mut self, s: usize) -> Clause {
        let c = self.slots[s].take().expect("live slot");
        for v in c.vars() {
            let list = &mut self.occ[v.index()];
            let at = list.iter().position(|&t| t == s).unwrap();
            list.swap_remove(at);
        }
        self.tautologies.remove(&s);
        self.live -= 1;
        c
    }

    fn put(&mut self, s: usize, c: Clause) {
        for v in c.vars() {
            self.occ[v.index()].push(s);
        }
        if c.is_tautology() {
            self.tautologies.insert(s);
        }
        self.slots[s] = Some(c);
        self.live += 1;
    }

    fn record(&mut self, rule: Rule, variable: Option<Var>, removed: Vec<Clause>, added: Vec<Clause>, falsified: bool) -> Verdict {
        let verdict = if falsified {
            Verdict::False
        } else if self.live == 0 && self.prefix.is_empty() {
            Verdict::True
        } else {
            Verdict::Continue
        };
        self.trace.push(TraceStep { rule, variable, removed, added, verdict });
        verdict
    }

    fn run(&mut self) -> bool {
        if self.slots.iter().flatten().any(Clause::is_empty) {
            return false;
        }
        if self.live == 0 && self.prefix.is_empty() {
            return true;
        }
        loop {
            let verdict = if let Some(&s) = self.tautologies.first() {
                let c = self.take(s);
                self.record(Rule::R1TautologyRemoval, None, vec![c], vec![], false)
            } else {
                let (x, q) = self.prefix.pop().expect("clauses without variables are empty");
                let mut occ = std::mem::take(&mut self.occ[x.index()]);
                occ.sort_unstable();
                if occ.is_empty() {
                    self.record(Rule::R0UnusedVariable, Some(x), vec![], vec![], false)
                } else if q == Quantifier::Forall {
                    let mut removed = Vec::new();
                    let mut added = Vec::new();
                    for &s in &occ {
                        self.occ[x.index()] = vec![s];
                        let c = self.take(s);
                        let shorter = Clause::new(c.lits().iter().copied().filter(|l| l.var() != x));
                        removed.push(c);
                        added.push(shorter.clone());
                        self.put(s, shorter);
                    }
                    let falsified = added.iter().any(Clause::is_empty);
                    self.record(Rule::R2UniversalElimination, Some(x), removed, added, falsified)
                } else {
                    self.occ[x.index()] = occ.clone();
                    let positive = |c: &Clause| c.contains(x.positive());
                    let first_pos = positive(self.slots[occ[0]].as_ref().unwrap());
                    let pure = occ.iter().all(|&s| positive(self.slots[s].as_ref().unwrap()) == first_pos);
                    let removed: Vec<Clause> = occ.iter().map(|&s| self.take(s)).collect();
                    if pure {
                        self.record(Rule::R3PureExistential, Some(x), removed, vec![], false)
                    } else {
                        let resolvent = Clause::new(
                            removed.iter().flat_map(|c| c.lits()).copied().filter(|l| l.var() != x),
                        );
                        let falsified = resolvent.is_empty();
                        self.put(occ[0], resolvent.clone());
                        self.record(Rule::R4ExistentialResolution, Some(x), removed, vec![resolvent], falsified)
                    }
                }
            };
            match verdict {
                Verdict::Continue => {}
                Verdict::True => return true,
                Verdict::False => return false,
            }
        }
    }
}

impl From<Verdict> for Option<QbfWinner> {
    fn from(v: Verdict) -> Self {
        match v {
            Verdict::Continue => None,
            Verdict::True => Some(QbfWinner::SatisfierWin),
            Verdict::False => Some(QbfWinner::FalsifierWin),
        }
    }
}
