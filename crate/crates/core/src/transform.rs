//! Formula-to-formula reductions: 3-QBF normalization, the degree-three
//! variable-splitting construction, prefix alternation padding, and the
//! QBF to Paired-SAT encoding.
//!
//! Fresh variables are always numbered after the ones they are derived from,
//! in a fixed traversal order, so outputs are a pure function of the input.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::formula::{
    degree_profile, Clause, CnfMatrix, Lit, PairedSatInstance, QbfFormula, Quantifier, QuantifierPrefix, Var,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TransformError {
    #[error("clause {clause} has {size} literals, more than {max}")]
    RankTooLarge { clause: usize, size: usize, max: usize },
    #[error("clause {clause} repeats a variable")]
    RepeatedVariable { clause: usize },
    #[error("clause {clause} has {size} literals, expected exactly 3")]
    NotUniform { clause: usize, size: usize },
    #[error("{var} has degree {degree}, expected a positive multiple of 3")]
    DegreeNotMultipleOfThree { var: Var, degree: usize },
    #[error("{var} has degree {degree}, more than {max}")]
    DegreeTooHigh { var: Var, degree: usize, max: usize },
    #[error("prefix position {position} must be {expected:?}")]
    PrefixShape { position: usize, expected: Quantifier },
    #[error("prefix has odd length {len}")]
    OddPrefix { len: usize },
}

fn check_no_repeats(matrix: &CnfMatrix) -> Result<(), TransformError> {
    for (i, c) in matrix.clauses().iter().enumerate() {
        if c.num_vars() != c.len() {
            return Err(TransformError::RepeatedVariable { clause: i });
        }
    }
    Ok(())
}

/// Bookkeeping for [`normalize_3qbf`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormalizeProvenance {
    /// `kept[i]` is the source variable behind output variable `i + 1`.
    pub kept: Vec<Var>,
    /// Source variables occurring in no clause.
    pub dropped: Vec<Var>,
    /// Padding universals with the source clause each one extends.
    pub padding: Vec<(Var, usize)>,
    /// Output clause `3 * j + r` (r in 0..3) is an occurrence of source clause `j`.
    pub copies_per_clause: usize,
}

/// Brings a formula of rank at most 3 into the shape the splitting
/// construction expects: unused variables dropped, every clause padded to
/// three literals with fresh positive universals (one per missing slot,
/// quantified at the end of the prefix), every clause present three times.
pub fn normalize_3qbf(formula: &QbfFormula) -> Result<(QbfFormula, NormalizeProvenance), TransformError> {
    let matrix = formula.matrix();
    for (i, c) in matrix.clauses().iter().enumerate() {
        if c.len() > 3 {
            return Err(TransformError::RankTooLarge { clause: i, size: c.len(), max: 3 });
        }
    }
    check_no_repeats(matrix)?;

    let profile = degree_profile(matrix);
    let mut remap = vec![None; matrix.num_vars()];
    let mut kept = Vec::new();
    let mut dropped = Vec::new();
    for (i, &d) in profile.degrees.iter().enumerate() {
        if d == 0 {
            dropped.push(Var::from_index(i));
        } else {
            kept.push(Var::from_index(i));
            remap[i] = Some(Var::new(kept.len() as u32));
        }
    }

    let mut next = kept.len() as u32;
    let mut padding = Vec::new();
    let mut clauses = Vec::with_capacity(3 * matrix.num_clauses());
    for (j, c) in matrix.clauses().iter().enumerate() {
        let mut lits: Vec<Lit> =
            c.lits().iter().map(|l| Lit::new(remap[l.var().index()].unwrap(), l.is_positive())).collect();
        while lits.len() < 3 {
            next += 1;
            let z = Var::new(next);
            padding.push((z, j));
            lits.push(z.positive());
        }
        let padded = Clause::new(lits);
        clauses.extend([padded.clone(), padded.clone(), padded]);
    }

    let mut entries: Vec<(Var, Quantifier)> = formula
        .prefix()
        .entries()
        .iter()
        .filter_map(|&(v, q)| remap[v.index()].map(|nv| (nv, q)))
        .collect();
    entries.extend(padding.iter().map(|&(z, _)| (z, Quantifier::Forall)));

    let out = QbfFormula::new(
        QuantifierPrefix::new(entries),
        CnfMatrix::new(next as usize, clauses).expect("fresh ids are in range"),
    )
    .expect("prefix covers all variables");
    Ok((out, NormalizeProvenance { kept, dropped, padding, copies_per_clause: 3 }))
}

/// Split of one source variable of degree `3k`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitVariable {
    pub source: Var,
    pub quantifier: Quantifier,
    /// `x^i_1 .. x^i_{3k}`; the first inherits the source quantifier.
    pub chain: Vec<Var>,
    /// `y^i_1 .. y^i_k`, universal.
    pub universals: Vec<Var>,
    /// `(clause, position)` in the source matrix of occurrence `j`, which was
    /// rewritten to `chain[j]`.
    pub occurrences: Vec<(usize, usize)>,
    /// Output indices of the link clauses `x^i_j ∨ ¬x^i_{j+1} ∨ y^i_{⌈j/3⌉}`.
    pub link_clauses: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VariableSplitMap {
    /// In source prefix order.
    pub variables: Vec<SplitVariable>,
}

/// Rewrites a normalized formula (3-uniform, every degree a positive multiple
/// of 3, no repeated variable in a clause) into one where every clause has
/// exactly three literals and every variable occurs in exactly three clauses.
///
/// Each source variable becomes a cyclic chain of copies, one per occurrence,
/// forced equal by link clauses whose universal third literal Falsifier can
/// only spoil by setting it true.
pub fn to_3qbf3(formula: &QbfFormula) -> Result<(QbfFormula, VariableSplitMap), TransformError> {
    let matrix = formula.matrix();
    for (i, c) in matrix.clauses().iter().enumerate() {
        if c.len() != 3 {
            return Err(TransformError::NotUniform { clause: i, size: c.len() });
        }
    }
    check_no_repeats(matrix)?;
    let profile = degree_profile(matrix);
    for (i, &d) in profile.degrees.iter().enumerate() {
        if d == 0 || d % 3 != 0 {
            return Err(TransformError::DegreeNotMultipleOfThree { var: Var::from_index(i), degree: d });
        }
    }

    // ids allocated block by block in prefix order
    let mut next = 0u32;
    let mut fresh = || {
        next += 1;
        Var::new(next)
    };
    let mut slot_of = vec![usize::MAX; matrix.num_vars()];
    let mut variables = Vec::with_capacity(formula.num_vars());
    let mut entries = Vec::new();
    for &(v, q) in formula.prefix().entries() {
        let degree = profile.degree(v);
        let chain: Vec<Var> = (0..degree).map(|_| fresh()).collect();
        let universals: Vec<Var> = (0..degree / 3).map(|_| fresh()).collect();
        entries.push((chain[0], q));
        entries.extend(chain[1..].iter().map(|&x| (x, Quantifier::Exists)));
        entries.extend(universals.iter().map(|&y| (y, Quantifier::Forall)));
        slot_of[v.index()] = variables.len();
        variables.push(SplitVariable {
            source: v,
            quantifier: q,
            chain,
            universals,
            occurrences: Vec::with_capacity(degree),
            link_clauses: Vec::with_capacity(degree),
        });
    }

    let mut clauses = Vec::with_capacity(matrix.num_clauses() + 3 * formula.num_vars());
    for (ci, c) in matrix.clauses().iter().enumerate() {
        let rewritten = c.lits().iter().enumerate().map(|(pos, l)| {
            let split = &mut variables[slot_of[l.var().index()]];
            let copy = split.chain[split.occurrences.len()];
            split.occurrences.push((ci, pos));
            Lit::new(copy, l.is_positive())
        });
        clauses.push(Clause::new(rewritten.collect::<Vec<_>>()));
    }
    for split in &mut variables {
        let len = split.chain.len();
        for j in 0..len {
            split.link_clauses.push(clauses.len());
            clauses.push(Clause::new([
                split.chain[j].positive(),
                split.chain[(j + 1) % len].negative(),
                split.universals[j / 3].positive(),
            ]));
        }
    }

    let out = QbfFormula::new(
        QuantifierPrefix::new(entries),
        CnfMatrix::new(next as usize, clauses).expect("fresh ids are in range"),
    )
    .expect("prefix covers all variables");
    Ok((out, VariableSplitMap { variables }))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AlternationPattern {
    ExistsFirst,
    ForallFirst,
}

impl AlternationPattern {
    fn first(self) -> Quantifier {
        match self {
            AlternationPattern::ExistsFirst => Quantifier::Exists,
            AlternationPattern::ForallFirst => Quantifier::Forall,
        }
    }
}

fn flip(q: Quantifier) -> Quantifier {
    match q {
        Quantifier::Exists => Quantifier::Forall,
        Quantifier::Forall => Quantifier::Exists,
    }
}

/// Whether quantifiers strictly alternate starting as `pattern` says.
pub fn is_alternating(prefix: &QuantifierPrefix, pattern: AlternationPattern) -> bool {
    let mut expected = pattern.first();
    prefix.entries().iter().all(|&(_, q)| {
        let ok = q == expected;
        expected = flip(expected);
        ok
    })
}

/// Inserts fresh variables occurring in no clause so that the prefix
/// alternates strictly (and, with `require_even`, has even length).
/// Returns the padded formula and the inserted variables.
pub fn pad_alternation(
    formula: &QbfFormula,
    pattern: AlternationPattern,
    require_even: bool,
) -> (QbfFormula, Vec<Var>) {
    let mut next = formula.num_vars() as u32;
    let mut inserted = Vec::new();
    let mut entries = Vec::with_capacity(2 * formula.num_vars() + 1);
    let mut expected = pattern.first();
    let mut pad = |entries: &mut Vec<(Var, Quantifier)>, q: Quantifier| {
        next += 1;
        let v = Var::new(next);
        inserted.push(v);
        entries.push((v, q));
    };
    for &(v, q) in formula.prefix().entries() {
        if q != expected {
            pad(&mut entries, expected);
            expected = flip(expected);
        }
        entries.push((v, q));
        expected = flip(expected);
    }
    if require_even && entries.len() % 2 == 1 {
        pad(&mut entries, expected);
    }
    let total = formula.num_vars() + inserted.len();
    let matrix = CnfMatrix::new(total, formula.matrix().clauses().to_vec()).unwrap();
    let out = QbfFormula::new(QuantifierPrefix::new(entries), matrix).unwrap();
    (out, inserted)
}

/// Variable roles in a Paired-SAT instance built by [`qbf_to_paired_sat`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairedSatMap {
    /// Source existentials `x_1..x_n`, in prefix order.
    pub xs: Vec<Var>,
    /// Source universals `y_1..y_n`, in prefix order.
    pub ys: Vec<Var>,
    pub y0: Var,
    /// `z_0..z_n`.
    pub zs: Vec<Var>,
    /// `t_1..t_n`.
    pub ts: Vec<Var>,
    /// Output clause indices of the four clauses of each parity constraint
    /// `y_{i-1} ⊕ t_i ⊕ z_i`, for `i = 1..n`.
    pub xor_clauses: Vec<[usize; 4]>,
}

/// Encodes `∃x_1 ∀y_1 … ∃x_n ∀y_n φ` (matrix degree at most 3) as a
/// Paired-SAT game whose pairs are
/// `(z_0,y_0), (x_1,t_1), (z_1,y_1), …, (x_n,t_n), (z_n,y_n)` and whose
/// matrix adds, for every `i`, the odd-parity constraint
/// `(a∨b∨c)(¬a∨¬b∨c)(¬a∨b∨¬c)(a∨¬b∨¬c)` over `a = y_{i-1}, b = t_i, c = z_i`.
pub fn qbf_to_paired_sat(formula: &QbfFormula) -> Result<(PairedSatInstance, PairedSatMap), TransformError> {
    let entries = formula.prefix().entries();
    if entries.len() % 2 == 1 {
        return Err(TransformError::OddPrefix { len: entries.len() });
    }
    if !is_alternating(formula.prefix(), AlternationPattern::ExistsFirst) {
        let mut expected = Quantifier::Exists;
        for (position, &(_, q)) in entries.iter().enumerate() {
            if q != expected {
                return Err(TransformError::PrefixShape { position, expected });
            }
            expected = flip(expected);
        }
    }
    let profile = degree_profile(formula.matrix());
    if let Some(i) = profile.degrees.iter().position(|&d| d > 3) {
        return Err(TransformError::DegreeTooHigh { var: Var::from_index(i), degree: profile.degrees[i], max: 3 });
    }

    let n = entries.len() / 2;
    let xs: Vec<Var> = entries.iter().step_by(2).map(|e| e.0).collect();
    let ys: Vec<Var> = entries.iter().skip(1).step_by(2).map(|e| e.0).collect();
    let base = formula.num_vars() as u32;
    let y0 = Var::new(base + 1);
    let zs: Vec<Var> = (0..=n as u32).map(|i| Var::new(base + 2 + i)).collect();
    let ts: Vec<Var> = (0..n as u32).map(|i| Var::new(base + 3 + n as u32 + i)).collect();
    let total = formula.num_vars() + 2 * n + 2;

    let mut pairs = vec![(zs[0], y0)];
    for i in 0..n {
        pairs.push((xs[i], ts[i]));
        pairs.push((zs[i + 1], ys[i]));
    }

    let mut clauses = formula.matrix().clauses().to_vec();
    let mut xor_clauses = Vec::with_capacity(n);
    for i in 0..n {
        let a = if i == 0 { y0 } else { ys[i - 1] };
        let (b, c) = (ts[i], zs[i + 1]);
        let start = clauses.len();
        clauses.push(Clause::new([a.positive(), b.positive(), c.positive()]));
        clauses.push(Clause::new([a.negative(), b.negative(), c.positive()]));
        clauses.push(Clause::new([a.negative(), b.positive(), c.negative()]));
        clauses.push(Clause::new([a.positive(), b.negative(), c.negative()]));
        xor_clauses.push([start, start + 1, start + 2, start + 3]);
    }
    let matrix = CnfMatrix::new(total, clauses).expect("fresh ids are in range");
    let instance = PairedSatInstance::new(matrix, pairs).expect("pairs partition the variables");
    Ok((instance, PairedSatMap { xs, ys, y0, zs, ts, xor_clauses }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{check_class, ClassBounds, Quantifier::*};
    use crate::qbf::{solve_paired_sat, solve_qbf_oracle};

    fn truth(f: &QbfFormula) -> bool {
        solve_qbf_oracle(f, u64::MAX).winner.unwrap().is_true()
    }

    #[test]
    fn normalize_pads_with_fresh_universal() {
        let f = QbfFormula::from_dimacs(&[Exists, Exists], &[&[1, 2]]);
        let (g, prov) = normalize_3qbf(&f).unwrap();
        assert_eq!(g.num_vars(), 3);
        assert_eq!(prov.padding, vec![(Var::new(3), 0)]);
        assert_eq!(g.prefix().entries().last(), Some(&(Var::new(3), Forall)));
        assert_eq!(g.matrix().clauses(), vec![Clause::from_dimacs(&[1, 2, 3]); 3].as_slice());
    }

    #[test]
    fn normalize_triples_clauses_and_degrees() {
        let f = QbfFormula::from_dimacs(&[Exists, Forall, Exists], &[&[1, -2, 3], &[-1, 3], &[2]]);
        let (g, _) = normalize_3qbf(&f).unwrap();
        assert_eq!(g.num_clauses(), 9);
        let p = degree_profile(g.matrix());
        assert!(p.degrees.iter().all(|d| d % 3 == 0));
        assert_eq!(&p.degrees[..3], &[6, 6, 6]);
        assert!(p.is_k_uniform(3));
    }

    #[test]
    fn normalize_drops_unused_and_rejects_bad_input() {
        let f = QbfFormula::from_dimacs(&[Forall, Exists, Exists], &[&[3]]);
        let (g, prov) = normalize_3qbf(&f).unwrap();
        assert_eq!(prov.dropped, vec![Var::new(1), Var::new(2)]);
        assert_eq!(prov.kept, vec![Var::new(3)]);
        assert_eq!(g.num_vars(), 3);
        let taut = QbfFormula::from_dimacs(&[Exists], &[&[1, -1]]);
        assert_eq!(normalize_3qbf(&taut).unwrap_err(), TransformError::RepeatedVariable { clause: 0 });
        let wide = QbfFormula::from_dimacs(&[Exists; 4], &[&[1, 2, 3, 4]]);
        assert!(matches!(normalize_3qbf(&wide), Err(TransformError::RankTooLarge { .. })));
    }

    #[test]
    fn split_degree_three_variable() {
        // three copies of (x1 ∨ x2 ∨ x3)
        let f = QbfFormula::from_dimacs(&[Exists, Forall, Exists], &[&[1, 2, 3], &[1, 2, 3], &[1, 2, 3]]);
        let (g, map) = to_3qbf3(&f).unwrap();
        let s = &map.variables[0];
        assert_eq!(s.chain, vec![Var::new(1), Var::new(2), Var::new(3)]);
        assert_eq!(s.universals, vec![Var::new(4)]);
        let links: Vec<Vec<i32>> = s.link_clauses.iter().map(|&i| g.matrix().clauses()[i].to_dimacs()).collect();
        assert_eq!(links, vec![vec![1, -2, 4], vec![2, -3, 4], vec![-1, 3, 4]]);
        assert_eq!(g.prefix().entries()[..4], [(Var::new(1), Exists), (Var::new(2), Exists), (Var::new(3), Exists), (Var::new(4), Forall)]);
        assert_eq!(g.prefix().entries()[4], (Var::new(5), Forall));
        assert!(check_class(&g, ClassBounds::exact(3, 3)).passes());
        assert_eq!(truth(&f), truth(&g));
    }

    #[test]
    fn split_preserves_polarity() {
        let f = QbfFormula::from_dimacs(&[Exists, Forall, Exists], &[&[-1, 2, 3], &[1, -2, 3], &[1, 2, -3]]);
        let (g, map) = to_3qbf3(&f).unwrap();
        assert_eq!(g.matrix().clauses()[0].to_dimacs(), vec![-1, 5, 9]);
        assert_eq!(map.variables[0].occurrences, vec![(0, 0), (1, 0), (2, 0)]);
    }

    #[test]
    fn split_rejects_unnormalized() {
        let f = QbfFormula::from_dimacs(&[Exists, Exists, Exists], &[&[1, 2, 3]]);
        assert!(matches!(to_3qbf3(&f), Err(TransformError::DegreeNotMultipleOfThree { .. })));
        let f = QbfFormula::from_dimacs(&[Exists, Exists], &[&[1, 2]]);
        assert!(matches!(to_3qbf3(&f), Err(TransformError::NotUniform { .. })));
    }

    #[test]
    fn alternation_padding() {
        let f = QbfFormula::from_dimacs(&[Exists, Exists], &[&[1, 2]]);
        let (g, added) = pad_alternation(&f, AlternationPattern::ExistsFirst, true);
        assert_eq!(added, vec![Var::new(3), Var::new(4)]);
        assert_eq!(
            g.prefix().entries(),
            &[(Var::new(1), Exists), (Var::new(3), Forall), (Var::new(2), Exists), (Var::new(4), Forall)]
        );
        assert_eq!(g.matrix().clauses(), f.matrix().clauses());

        let (h, added) = pad_alternation(&g, AlternationPattern::ExistsFirst, true);
        assert!(added.is_empty());
        assert_eq!(h, g);

        let (k, _) = pad_alternation(&f, AlternationPattern::ForallFirst, false);
        assert_eq!(k.prefix().entries().iter().map(|e| e.1).collect::<Vec<_>>(), vec![Forall, Exists, Forall, Exists]);
    }

    #[test]
    fn paired_sat_single_block() {
        let f = QbfFormula::from_dimacs(&[Exists, Forall], &[&[1, 2]]);
        let (inst, map) = qbf_to_paired_sat(&f).unwrap();
        let ids = |ps: &[(Var, Var)]| ps.iter().map(|(a, b)| (a.id(), b.id())).collect::<Vec<_>>();
        // y0 = 3, z0 = 4, z1 = 5, t1 = 6
        assert_eq!(ids(inst.pairs()), vec![(4, 3), (1, 6), (5, 2)]);
        assert_eq!(map.xor_clauses, vec![[1, 2, 3, 4]]);
        let xor: Vec<Vec<i32>> = (1..5).map(|i| inst.matrix().clauses()[i].to_dimacs()).collect();
        assert_eq!(xor, vec![vec![3, 5, 6], vec![-3, 5, -6], vec![-3, -5, 6], vec![3, -5, -6]]);
        assert_eq!(
            solve_paired_sat(&inst, u64::MAX).winner.unwrap().is_true(),
            truth(&f)
        );
    }

    #[test]
    fn paired_sat_rejects_bad_prefix() {
        let f = QbfFormula::from_dimacs(&[Forall, Exists], &[&[1, 2]]);
        assert!(matches!(qbf_to_paired_sat(&f), Err(TransformError::PrefixShape { position: 0, .. })));
        let f = QbfFormula::from_dimacs(&[Exists], &[&[1]]);
        assert!(matches!(qbf_to_paired_sat(&f), Err(TransformError::OddPrefix { .. })));
    }
}
