use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::GadgetError;
use crate::formula::{degree_profile, QbfFormula, Var};
use crate::hypergraph::Hypergraph;
use crate::transform::{is_alternating, AlternationPattern};

/// Hyperedge ids for one ∃∀ block `i` (variables `2i-1`, `2i`).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AeBlock {
    pub a: usize,
    pub b: usize,
    /// `C^+_{6i}, C^+_{6i-2}, C^+_{6i-4}`.
    pub c_plus: [usize; 3],
    /// `C^-_{6i}, C^-_{6i-2}, C^-_{6i-4}`.
    pub c_minus: [usize; 3],
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AeTrace {
    /// Source variable at prefix position `p` (index `p - 1`).
    pub variables: Vec<Var>,
    /// `(x_p, x̄_p)` vertex ids, indexed `p - 1`.
    pub literals: Vec<(usize, usize)>,
    /// `u_j` vertex ids by index `j`; only referenced indices are present.
    pub u: BTreeMap<usize, usize>,
    pub blocks: Vec<AeBlock>,
    /// `D_j` hyperedge id per source clause.
    pub clauses: Vec<usize>,
}

/// The `u` index accompanying a literal on prefix position `p` in `D_j`.
fn companion(p: usize) -> usize {
    if p % 2 == 1 {
        3 * p + 2
    } else {
        3 * p + 1
    }
}

/// Builds the Avoider-Enforcer board for `∃x_1 ∀x_2 … ∃x_{2n-1} ∀x_{2n} φ`
/// where clauses have at most three distinct variables and every variable
/// occurs in at most three clauses.
///
/// Vertices are `x_1, x̄_1, …, x_{2n}, x̄_{2n}` followed by the referenced
/// `u_j` in increasing `j`. The companion of a literal on position `p` is
/// `u_{3p+2}` for odd `p` and `u_{3p+1}` for even `p`, which is the vertex
/// shared with `B_p` and `A_p` respectively.
pub fn qbf3_to_avoider_enforcer(formula: &QbfFormula) -> Result<(Hypergraph, AeTrace), GadgetError> {
    let matrix = formula.matrix();
    for (i, c) in matrix.clauses().iter().enumerate() {
        if c.len() > 3 {
            return Err(GadgetError::ClauseTooLarge { clause: i, size: c.len(), max: 3 });
        }
        if c.num_vars() != c.len() {
            return Err(GadgetError::RepeatedVariable { clause: i });
        }
    }
    let profile = degree_profile(matrix);
    if let Some(i) = profile.degrees.iter().position(|&d| d > 3) {
        return Err(GadgetError::DegreeTooHigh { var: Var::from_index(i), degree: profile.degrees[i], max: 3 });
    }
    let prefix = formula.prefix();
    if prefix.len() % 2 == 1 || !is_alternating(prefix, AlternationPattern::ExistsFirst) {
        return Err(GadgetError::NotAlternating);
    }

    let n = prefix.len() / 2;
    let variables: Vec<Var> = prefix.entries().iter().map(|e| e.0).collect();
    let mut position = vec![0; formula.num_vars()];
    for (i, v) in variables.iter().enumerate() {
        position[v.index()] = i + 1;
    }

    let block_edges = |i: usize| -> [Vec<Member>; 8] {
        use Member::{Neg, Pos, U};
        let (odd, even) = (2 * i - 1, 2 * i);
        [
            vec![Pos(even), Neg(even), U(6 * i + 1), U(6 * i + 3)],
            vec![Pos(odd), Neg(odd), U(6 * i - 1)],
            vec![U(6 * i), U(6 * i + 1), U(6 * i + 3), Pos(even)],
            vec![U(6 * i), U(6 * i + 1), U(6 * i + 3), Neg(even)],
            vec![U(6 * i - 2), U(6 * i - 1), U(6 * i + 1), Pos(even)],
            vec![U(6 * i - 2), U(6 * i - 1), U(6 * i + 1), Neg(even)],
            vec![U(6 * i - 4), U(6 * i - 3), U(6 * i - 1), Pos(odd)],
            vec![U(6 * i - 4), U(6 * i - 3), U(6 * i - 1), Neg(odd)],
        ]
    };
    let clause_edges: Vec<Vec<Member>> = matrix
        .clauses()
        .iter()
        .map(|c| {
            let mut members = Vec::new();
            for l in c.lits() {
                let p = position[l.var().index()];
                members.push(if l.is_positive() { Member::Pos(p) } else { Member::Neg(p) });
                members.push(Member::U(companion(p)));
            }
            members
        })
        .collect();

    let all_blocks: Vec<[Vec<Member>; 8]> = (1..=n).map(block_edges).collect();
    let mut u = BTreeMap::new();
    for m in all_blocks.iter().flatten().chain(&clause_edges).flatten() {
        if let Member::U(j) = *m {
            u.insert(j, 0);
        }
    }
    let literal_count = 2 * prefix.len();
    for (k, id) in u.values_mut().enumerate() {
        *id = literal_count + k;
    }

    let mut h = Hypergraph::new(literal_count + u.len(), Vec::new()).unwrap();
    let literals: Vec<(usize, usize)> = (0..prefix.len()).map(|i| (2 * i, 2 * i + 1)).collect();
    for p in 1..=prefix.len() {
        h.set_label(2 * p - 2, format!("x{p}"));
        h.set_label(2 * p - 1, format!("~x{p}"));
    }
    for (&j, &id) in &u {
        h.set_label(id, format!("u{j}"));
    }
    let resolve = |m: &Member| match *m {
        Member::Pos(p) => literals[p - 1].0,
        Member::Neg(p) => literals[p - 1].1,
        Member::U(j) => u[&j],
    };
    let add = |h: &mut Hypergraph, members: &[Member]| {
        h.add_edge(members.iter().map(resolve).collect()).expect("gadget vertices are distinct")
    };

    let mut blocks = Vec::with_capacity(n);
    for edges in &all_blocks {
        let ids: Vec<usize> = edges.iter().map(|e| add(&mut h, e)).collect();
        blocks.push(AeBlock {
            a: ids[0],
            b: ids[1],
            c_plus: [ids[2], ids[4], ids[6]],
            c_minus: [ids[3], ids[5], ids[7]],
        });
    }
    let clauses = clause_edges.iter().map(|e| add(&mut h, e)).collect();
    Ok((h, AeTrace { variables, literals, u, blocks, clauses }))
}

#[derive(Clone, Copy, Debug)]
enum Member {
    Pos(usize),
    Neg(usize),
    U(usize),
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::Quantifier::*;

    #[test]
    fn single_block_layout() {
        let f = QbfFormula::from_dimacs(&[Exists, Forall], &[&[1, -2]]);
        let (h, t) = qbf3_to_avoider_enforcer(&f).unwrap();
        assert_eq!(t.u.keys().copied().collect::<Vec<_>>(), vec![2, 3, 4, 5, 6, 7, 9]);
        assert_eq!(h.num_vertices(), 11);
        assert_eq!(h.num_edges(), 9);
        let label = |e: usize| -> Vec<&str> { h.edge(e).iter().map(|&v| h.label(v).unwrap()).collect() };
        let mut b = label(t.blocks[0].b);
        b.sort();
        assert_eq!(b, vec!["u5", "x1", "~x1"]);
        // x1 companion u5 (odd), ~x2 companion u7 (even)
        let mut d = label(t.clauses[0]);
        d.sort();
        assert_eq!(d, vec!["u5", "u7", "x1", "~x2"]);
        assert!(h.rank() <= 6 && h.max_degree() <= 8);
    }

    #[test]
    fn companions_match_block_edges() {
        for i in 1..5 {
            assert_eq!(companion(2 * i - 1), 6 * i - 1);
            assert_eq!(companion(2 * i), 6 * i + 1);
        }
    }

    #[test]
    fn rejects_bad_prefix() {
        let f = QbfFormula::from_dimacs(&[Forall, Exists], &[&[1, 2]]);
        assert_eq!(qbf3_to_avoider_enforcer(&f).unwrap_err(), GadgetError::NotAlternating);
        let f = QbfFormula::from_dimacs(&[Exists], &[&[1]]);
        assert_eq!(qbf3_to_avoider_enforcer(&f).unwrap_err(), GadgetError::NotAlternating);
        let f = QbfFormula::from_dimacs(&[Exists, Forall], &[&[1], &[1], &[1], &[-1, 2]]);
        assert!(matches!(qbf3_to_avoider_enforcer(&f), Err(GadgetError::DegreeTooHigh { .. })));
    }
}
