//! CNF, QBF and Paired-SAT instance types together with their structural
//! metrics (degree, rank, uniformity, regularity).

use std::fmt;
use std::num::NonZeroI32;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// A propositional variable, 1-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Var(u32);

impl Var {
    /// Panics on `0`; variable ids start at 1.
    pub fn new(id: u32) -> Self {
        assert!(id >= 1 && id <= i32::MAX as u32, "variable id out of range: {id}");
        Var(id)
    }

    pub fn id(self) -> u32 {
        self.0
    }

    /// Zero-based slot for per-variable tables.
    pub fn index(self) -> usize {
        self.0 as usize - 1
    }

    pub fn from_index(index: usize) -> Self {
        Var::new(index as u32 + 1)
    }

    pub fn positive(self) -> Lit {
        Lit::new(self, true)
    }

    pub fn negative(self) -> Lit {
        Lit::new(self, false)
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x{}", self.0)
    }
}

/// A literal in DIMACS encoding: `+v` or `-v`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "i32", try_from = "i32")]
pub struct Lit(NonZeroI32);

impl Lit {
    pub fn new(var: Var, positive: bool) -> Self {
        let v = var.id() as i32;
        Lit(NonZeroI32::new(if positive { v } else { -v }).unwrap())
    }

    /// `None` for `0`.
    pub fn from_dimacs(code: i32) -> Option<Self> {
        if code == i32::MIN {
            return None;
        }
        NonZeroI32::new(code).map(Lit)
    }

    pub fn to_dimacs(self) -> i32 {
        self.0.get()
    }

    pub fn var(self) -> Var {
        Var(self.0.get().unsigned_abs())
    }

    pub fn is_positive(self) -> bool {
        self.0.get() > 0
    }

    pub fn negate(self) -> Lit {
        Lit(NonZeroI32::new(-self.0.get()).unwrap())
    }

    /// Truth value of the literal under `value` for its variable.
    pub fn eval(self, value: bool) -> bool {
        value == self.is_positive()
    }

    fn sort_key(self) -> (u32, bool) {
        (self.var().id(), !self.is_positive())
    }
}

impl From<Lit> for i32 {
    fn from(l: Lit) -> i32 {
        l.to_dimacs()
    }
}

impl TryFrom<i32> for Lit {
    type Error = &'static str;
    fn try_from(code: i32) -> Result<Self, Self::Error> {
        Lit::from_dimacs(code).ok_or("literal code must be nonzero")
    }
}

impl Ord for Lit {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.sort_key().cmp(&other.sort_key())
    }
}

impl PartialOrd for Lit {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_dimacs())
    }
}

/// A disjunction of literals, deduplicated and sorted by variable id
/// (positive before negative). Tautologies are representable.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Clause(Vec<Lit>);

impl Clause {
    pub fn new(lits: impl IntoIterator<Item = Lit>) -> Self {
        let mut lits: Vec<Lit> = lits.into_iter().collect();
        lits.sort();
        lits.dedup();
        Clause(lits)
    }

    /// Builds from DIMACS codes; panics on `0`.
    pub fn from_dimacs(codes: &[i32]) -> Self {
        Clause::new(codes.iter().map(|&c| Lit::from_dimacs(c).expect("zero literal")))
    }

    pub fn empty() -> Self {
        Clause(Vec::new())
    }

    pub fn lits(&self) -> &[Lit] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, lit: Lit) -> bool {
        self.0.binary_search(&lit).is_ok()
    }

    pub fn mentions(&self, var: Var) -> bool {
        self.0.iter().any(|l| l.var() == var)
    }

    /// True when the clause holds both `x` and `¬x` for some `x`.
    pub fn is_tautology(&self) -> bool {
        // sorted: x and ¬x are adjacent
        self.0.windows(2).any(|w| w[0].var() == w[1].var())
    }

    /// Distinct variables, ascending.
    pub fn vars(&self) -> impl Iterator<Item = Var> + '_ {
        let mut last = None;
        self.0.iter().filter_map(move |l| {
            let v = l.var();
            if last == Some(v) {
                None
            } else {
                last = Some(v);
                Some(v)
            }
        })
    }

    pub fn num_vars(&self) -> usize {
        self.vars().count()
    }

    pub fn to_dimacs(&self) -> Vec<i32> {
        self.0.iter().map(|l| l.to_dimacs()).collect()
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, l) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{l}")?;
        }
        write!(f, ")")
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FormulaError {
    #[error("literal {lit} in clause {clause} references a variable beyond {num_vars}")]
    LiteralOutOfRange { clause: usize, lit: i32, num_vars: usize },
    #[error("prefix quantifies {var} more than once")]
    DuplicateQuantifier { var: Var },
    #[error("prefix does not quantify {var}")]
    MissingQuantifier { var: Var },
    #[error("prefix variable {var} is beyond {num_vars}")]
    PrefixOutOfRange { var: Var, num_vars: usize },
    #[error("{var} occurs in more than one pair position")]
    DuplicatePairVariable { var: Var },
    #[error("{var} occurs in no pair")]
    UnpairedVariable { var: Var },
    #[error("pair variable {var} is beyond {num_vars}")]
    PairOutOfRange { var: Var, num_vars: usize },
}

/// An ordered multiset of clauses over variables `1..=num_vars`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct CnfMatrix {
    num_vars: usize,
    clauses: Vec<Clause>,
}

impl CnfMatrix {
    pub fn new(num_vars: usize, clauses: Vec<Clause>) -> Result<Self, FormulaError> {
        for (i, c) in clauses.iter().enumerate() {
            for l in c.lits() {
                if l.var().index() >= num_vars {
                    return Err(FormulaError::LiteralOutOfRange {
                        clause: i,
                        lit: l.to_dimacs(),
                        num_vars,
                    });
                }
            }
        }
        Ok(CnfMatrix { num_vars, clauses })
    }

    /// Test and construction shorthand; panics on out-of-range literals.
    pub fn from_dimacs(num_vars: usize, clauses: &[&[i32]]) -> Self {
        CnfMatrix::new(num_vars, clauses.iter().map(|c| Clause::from_dimacs(c)).collect())
            .expect("invalid matrix")
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn num_clauses(&self) -> usize {
        self.clauses.len()
    }

    pub fn into_clauses(self) -> Vec<Clause> {
        self.clauses
    }

    /// Whether every clause holds under `assignment` (indexed by variable slot).
    pub fn eval(&self, assignment: &[bool]) -> bool {
        self.clauses
            .iter()
            .all(|c| c.lits().iter().any(|l| l.eval(assignment[l.var().index()])))
    }

    pub fn degree_profile(&self) -> DegreeProfile {
        degree_profile(self)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Quantifier {
    Exists,
    Forall,
}

impl Quantifier {
    pub fn symbol(self) -> char {
        match self {
            Quantifier::Exists => 'e',
            Quantifier::Forall => 'a',
        }
    }
}

/// Quantifier prefix, outermost first. Sequence order is play order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct QuantifierPrefix(Vec<(Var, Quantifier)>);

impl QuantifierPrefix {
    pub fn new(entries: Vec<(Var, Quantifier)>) -> Self {
        QuantifierPrefix(entries)
    }

    /// All variables `1..=n` in id order under one quantifier.
    pub fn uniform(n: usize, q: Quantifier) -> Self {
        QuantifierPrefix((0..n).map(|i| (Var::from_index(i), q)).collect())
    }

    /// Id-ordered prefix with the given quantifiers.
    pub fn from_quantifiers(qs: &[Quantifier]) -> Self {
        QuantifierPrefix(qs.iter().enumerate().map(|(i, &q)| (Var::from_index(i), q)).collect())
    }

    pub fn entries(&self) -> &[(Var, Quantifier)] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Quantifier of each variable, indexed by slot. Assumes a validated prefix.
    pub fn quantifier_table(&self) -> Vec<Quantifier> {
        let mut table = vec![Quantifier::Exists; self.0.len()];
        for &(v, q) in &self.0 {
            table[v.index()] = q;
        }
        table
    }

    fn validate(&self, num_vars: usize) -> Result<(), FormulaError> {
        let mut seen = vec![false; num_vars];
        for &(v, _) in &self.0 {
            if v.index() >= num_vars {
                return Err(FormulaError::PrefixOutOfRange { var: v, num_vars });
            }
            if std::mem::replace(&mut seen[v.index()], true) {
                return Err(FormulaError::DuplicateQuantifier { var: v });
            }
        }
        match seen.iter().position(|s| !s) {
            Some(i) => Err(FormulaError::MissingQuantifier { var: Var::from_index(i) }),
            None => Ok(()),
        }
    }
}

/// A closed prenex QBF: `Q1 x1 ... Qn xn . matrix`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QbfFormula {
    prefix: QuantifierPrefix,
    matrix: CnfMatrix,
}

impl QbfFormula {
    pub fn new(prefix: QuantifierPrefix, matrix: CnfMatrix) -> Result<Self, FormulaError> {
        prefix.validate(matrix.num_vars())?;
        Ok(QbfFormula { prefix, matrix })
    }

    /// Id-ordered prefix shorthand for tests and generators.
    pub fn from_dimacs(quantifiers: &[Quantifier], clauses: &[&[i32]]) -> Self {
        let matrix = CnfMatrix::from_dimacs(quantifiers.len(), clauses);
        QbfFormula::new(QuantifierPrefix::from_quantifiers(quantifiers), matrix).unwrap()
    }

    pub fn prefix(&self) -> &QuantifierPrefix {
        &self.prefix
    }

    pub fn matrix(&self) -> &CnfMatrix {
        &self.matrix
    }

    pub fn num_vars(&self) -> usize {
        self.matrix.num_vars()
    }

    pub fn num_clauses(&self) -> usize {
        self.matrix.num_clauses()
    }

    pub fn into_parts(self) -> (QuantifierPrefix, CnfMatrix) {
        (self.prefix, self.matrix)
    }
}

/// A Paired-SAT game: the matrix plus ordered `(first, second)` pairs.
/// Satisfier values first components, Falsifier second components.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PairedSatInstance {
    matrix: CnfMatrix,
    pairs: Vec<(Var, Var)>,
}

impl PairedSatInstance {
    pub fn new(matrix: CnfMatrix, pairs: Vec<(Var, Var)>) -> Result<Self, FormulaError> {
        let n = matrix.num_vars();
        let mut seen = vec![false; n];
        for &(a, b) in &pairs {
            for v in [a, b] {
                if v.index() >= n {
                    return Err(FormulaError::PairOutOfRange { var: v, num_vars: n });
                }
                if std::mem::replace(&mut seen[v.index()], true) {
                    return Err(FormulaError::DuplicatePairVariable { var: v });
                }
            }
        }
        if let Some(i) = seen.iter().position(|s| !s) {
            return Err(FormulaError::UnpairedVariable { var: Var::from_index(i) });
        }
        Ok(PairedSatInstance { matrix, pairs })
    }

    pub fn matrix(&self) -> &CnfMatrix {
        &self.matrix
    }

    pub fn pairs(&self) -> &[(Var, Var)] {
        &self.pairs
    }

    /// For each variable slot, whether Satisfier (first component) values it.
    pub fn satisfier_owned(&self) -> Vec<bool> {
        let mut owned = vec![false; self.matrix.num_vars()];
        for &(a, _) in &self.pairs {
            owned[a.index()] = true;
        }
        owned
    }
}

/// Degree and size metrics of a clause multiset.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeProfile {
    /// `degrees[i]` is the degree of variable `i + 1`.
    pub degrees: Vec<usize>,
    pub max_degree: usize,
    pub rank: usize,
    /// Smallest clause size; `None` for an empty matrix.
    pub min_clause_size: Option<usize>,
}

impl DegreeProfile {
    pub fn degree(&self, v: Var) -> usize {
        self.degrees[v.index()]
    }

    /// Every clause has exactly `k` literals (vacuous for no clauses).
    pub fn is_k_uniform(&self, k: usize) -> bool {
        self.min_clause_size.is_none_or(|min| min == k && self.rank == k)
    }

    /// Every variable occurs in exactly `k` clauses (vacuous for no variables).
    pub fn is_k_regular(&self, k: usize) -> bool {
        self.degrees.iter().all(|&d| d == k)
    }
}

/// Counts, for every variable, the clause occurrences mentioning it. A clause
/// holding both `x` and `¬x` contributes one to `d(x)`.
pub fn degree_profile(matrix: &CnfMatrix) -> DegreeProfile {
    let mut degrees = vec![0; matrix.num_vars()];
    let mut rank = 0;
    let mut min_size: Option<usize> = None;
    for c in matrix.clauses() {
        for v in c.vars() {
            degrees[v.index()] += 1;
        }
        rank = rank.max(c.len());
        min_size = Some(min_size.map_or(c.len(), |m| m.min(c.len())));
    }
    DegreeProfile {
        max_degree: degrees.iter().copied().max().unwrap_or(0),
        degrees,
        rank,
        min_clause_size: min_size,
    }
}

/// Membership requirements for `r-QBF-d`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassBounds {
    pub max_rank: usize,
    pub max_degree: usize,
    /// Every clause has exactly `max_rank` literals.
    pub uniform: bool,
    /// Every variable has degree exactly `max_degree`.
    pub regular: bool,
}

impl ClassBounds {
    pub fn new(max_rank: usize, max_degree: usize) -> Self {
        ClassBounds { max_rank, max_degree, uniform: false, regular: false }
    }

    pub fn exact(rank: usize, degree: usize) -> Self {
        ClassBounds { max_rank: rank, max_degree: degree, uniform: true, regular: true }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ClassViolation {
    ClauseTooLarge { clause: usize, size: usize },
    DegreeTooHigh { var: Var, degree: usize },
    NotUniform { clause: usize, size: usize },
    NotRegular { var: Var, degree: usize },
}

impl fmt::Display for ClassViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClassViolation::ClauseTooLarge { clause, size } => {
                write!(f, "clause {clause} has size {size}")
            }
            ClassViolation::DegreeTooHigh { var, degree } => write!(f, "{var} has degree {degree}"),
            ClassViolation::NotUniform { clause, size } => {
                write!(f, "clause {clause} has size {size}, not uniform")
            }
            ClassViolation::NotRegular { var, degree } => {
                write!(f, "{var} has degree {degree}, not regular")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassReport {
    pub violations: Vec<ClassViolation>,
}

impl ClassReport {
    pub fn passes(&self) -> bool {
        self.violations.is_empty()
    }
}

pub fn check_class(formula: &QbfFormula, bounds: ClassBounds) -> ClassReport {
    check_matrix_class(formula.matrix(), bounds)
}

pub fn check_matrix_class(matrix: &CnfMatrix, bounds: ClassBounds) -> ClassReport {
    let mut violations = Vec::new();
    for (i, c) in matrix.clauses().iter().enumerate() {
        if c.len() > bounds.max_rank {
            violations.push(ClassViolation::ClauseTooLarge { clause: i, size: c.len() });
        } else if bounds.uniform && c.len() != bounds.max_rank {
            violations.push(ClassViolation::NotUniform { clause: i, size: c.len() });
        }
    }
    let profile = degree_profile(matrix);
    for (i, &d) in profile.degrees.iter().enumerate() {
        let var = Var::from_index(i);
        if d > bounds.max_degree {
            violations.push(ClassViolation::DegreeTooHigh { var, degree: d });
        } else if bounds.regular && d != bounds.max_degree {
            violations.push(ClassViolation::NotRegular { var, degree: d });
        }
    }
    ClassReport { violations }
}
