use serde::{Deserialize, Serialize};

use super::GadgetError;
use crate::formula::{degree_profile, PairedSatInstance, Var};
use crate::hypergraph::Hypergraph;

/// Vertex ids of one pair's gadget.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CwPair {
    /// `s^0, s^T, s^F, s^1`.
    pub s: [usize; 4],
    /// `f^0, f^T, f^T', f^F`.
    pub f: [usize; 4],
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CwTrace {
    pub pairs: Vec<CwPair>,
    pub block_edges: Vec<usize>,
    pub pair_edges: Vec<usize>,
    /// Hyperedge ids encoding each source clause.
    pub clause_edges: Vec<Vec<usize>>,
}

const S0: usize = 0;
const ST: usize = 1;
const SF: usize = 2;
const S1: usize = 3;
const F0: usize = 4;
const FT: usize = 5;
const FT2: usize = 6;
const FF: usize = 7;

/// First non-tautological clause whose variables are all Falsifier-assigned,
/// if any. Such an instance is won by Falsifier outright and has no
/// Client-Waiter encoding.
pub fn cw_falsifier_only_clause(instance: &PairedSatInstance) -> Option<usize> {
    let owned = instance.satisfier_owned();
    instance
        .matrix()
        .clauses()
        .iter()
        .position(|c| !c.is_tautology() && c.lits().iter().all(|l| !owned[l.var().index()]))
}

/// Builds the Client-Waiter board on `8n` vertices for a Paired-SAT instance
/// with `n` pairs, clauses of at most three literals, and no clause over
/// Falsifier variables only.
///
/// Pair `i` contributes `s_i^0, s_i^T, s_i^F, s_i^1, f_i^0, f_i^T, f_i^T', f_i^F`
/// (ids `8(i-1)..8i`), the eight 3-subsets of `S_i` and `F_i`, and four pair
/// hyperedges. A clause contributes one hyperedge per combination of its
/// literals' options; tautological clauses contribute none.
pub fn paired_sat_to_client_waiter(instance: &PairedSatInstance) -> Result<(Hypergraph, CwTrace), GadgetError> {
    let matrix = instance.matrix();
    for (i, c) in matrix.clauses().iter().enumerate() {
        if c.len() > 3 {
            return Err(GadgetError::ClauseTooLarge { clause: i, size: c.len(), max: 3 });
        }
    }
    let profile = degree_profile(matrix);
    if let Some(i) = profile.degrees.iter().position(|&d| d > 7) {
        return Err(GadgetError::DegreeTooHigh { var: Var::from_index(i), degree: profile.degrees[i], max: 7 });
    }
    if let Some(clause) = cw_falsifier_only_clause(instance) {
        return Err(GadgetError::FalsifierOnlyClause { clause });
    }

    let n = instance.pairs().len();
    // (pair index, is first) per variable
    let mut role = vec![(0, true); matrix.num_vars()];
    for (i, &(a, b)) in instance.pairs().iter().enumerate() {
        role[a.index()] = (i, true);
        role[b.index()] = (i, false);
    }

    let mut h = Hypergraph::new(8 * n, Vec::new()).unwrap();
    let names = ["s0", "sT", "sF", "s1", "f0", "fT", "fT'", "fF"];
    let mut pairs = Vec::with_capacity(n);
    for i in 0..n {
        for (k, name) in names.iter().enumerate() {
            h.set_label(8 * i + k, format!("{name}_{}", i + 1));
        }
        pairs.push(CwPair {
            s: [8 * i + S0, 8 * i + ST, 8 * i + SF, 8 * i + S1],
            f: [8 * i + F0, 8 * i + FT, 8 * i + FT2, 8 * i + FF],
        });
    }
    let v = |i: usize, k: usize| 8 * i + k;

    let mut block_edges = Vec::with_capacity(8 * n);
    let mut pair_edges = Vec::with_capacity(4 * n);
    for i in 0..n {
        for group in [[S0, ST, SF, S1], [F0, FT, FT2, FF]] {
            for skip in (0..4).rev() {
                let members = (0..4).filter(|&k| k != skip).map(|k| v(i, group[k])).collect();
                block_edges.push(h.add_edge(members).unwrap());
            }
        }
        for members in [[S0, ST, F0, FT], [S0, FF, FT, SF], [S0, FF, ST, FT2], [S0, SF, F0, FT2]] {
            pair_edges.push(h.add_edge(members.iter().map(|&k| v(i, k)).collect()).unwrap());
        }
    }

    let mut clause_edges = Vec::with_capacity(matrix.num_clauses());
    for c in matrix.clauses() {
        if c.is_tautology() {
            clause_edges.push(Vec::new());
            continue;
        }
        let mut combos: Vec<Vec<usize>> = vec![Vec::new()];
        for l in c.lits() {
            let (i, first) = role[l.var().index()];
            let options: Vec<Vec<usize>> = match (first, l.is_positive()) {
                (true, true) => vec![vec![v(i, S0), v(i, ST)]],
                (true, false) => vec![vec![v(i, S0), v(i, SF)]],
                (false, true) => vec![vec![v(i, F0), v(i, FT)], vec![v(i, F0), v(i, FT2)]],
                (false, false) => vec![vec![v(i, FF)]],
            };
            combos = combos
                .iter()
                .flat_map(|base| options.iter().map(move |o| [base.as_slice(), o.as_slice()].concat()))
                .collect();
        }
        let mut ids = Vec::with_capacity(combos.len());
        for mut members in combos {
            members.sort_unstable();
            members.dedup();
            ids.push(h.add_edge(members).unwrap());
        }
        clause_edges.push(ids);
    }
    Ok((h, CwTrace { pairs, block_edges, pair_edges, clause_edges }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::CnfMatrix;

    fn inst(num_vars: usize, pairs: &[(u32, u32)], clauses: &[&[i32]]) -> PairedSatInstance {
        PairedSatInstance::new(
            CnfMatrix::from_dimacs(num_vars, clauses),
            pairs.iter().map(|&(a, b)| (Var::new(a), Var::new(b))).collect(),
        )
        .unwrap()
    }

    #[test]
    fn clause_with_two_options() {
        // x1 ∨ y1 ∨ ¬y2 with pairs (x1,y1)=(1,2), (x2,y2)=(3,4)
        let i = inst(4, &[(1, 2), (3, 4)], &[&[1, 2, -4]]);
        let (h, t) = paired_sat_to_client_waiter(&i).unwrap();
        assert_eq!(h.num_vertices(), 16);
        assert_eq!(t.block_edges.len(), 16);
        assert_eq!(t.pair_edges.len(), 8);
        let labels = |e: usize| -> Vec<&str> { h.edge(e).iter().map(|&v| h.label(v).unwrap()).collect() };
        assert_eq!(t.clause_edges[0].len(), 2);
        assert_eq!(labels(t.clause_edges[0][0]), vec!["s0_1", "sT_1", "f0_1", "fT_1", "fF_2"]);
        assert_eq!(labels(t.clause_edges[0][1]), vec!["s0_1", "sT_1", "f0_1", "fT'_1", "fF_2"]);
    }

    #[test]
    fn tautologies_are_dropped() {
        let i = inst(2, &[(1, 2)], &[&[-2, 2], &[1]]);
        assert_eq!(cw_falsifier_only_clause(&i), None);
        let (_, t) = paired_sat_to_client_waiter(&i).unwrap();
        assert!(t.clause_edges[0].is_empty());
        assert_eq!(t.clause_edges[1].len(), 1);
    }

    #[test]
    fn block_and_pair_edges() {
        let i = inst(2, &[(1, 2)], &[&[1]]);
        let (h, t) = paired_sat_to_client_waiter(&i).unwrap();
        let labels = |e: usize| -> Vec<&str> { h.edge(e).iter().map(|&v| h.label(v).unwrap()).collect() };
        assert_eq!(labels(t.block_edges[0]), vec!["s0_1", "sT_1", "sF_1"]);
        assert_eq!(labels(t.pair_edges[1]), vec!["s0_1", "sF_1", "fT_1", "fF_1"]);
        assert_eq!(labels(t.clause_edges[0][0]), vec!["s0_1", "sT_1"]);
        assert!(h.rank() <= 6);
    }

    #[test]
    fn falsifier_only_clause_rejected() {
        let i = inst(4, &[(1, 2), (3, 4)], &[&[1, 3], &[2, -4]]);
        assert_eq!(cw_falsifier_only_clause(&i), Some(1));
        assert_eq!(
            paired_sat_to_client_waiter(&i).unwrap_err(),
            GadgetError::FalsifierOnlyClause { clause: 1 }
        );
        let i = inst(2, &[(1, 2)], &[&[]]);
        assert_eq!(cw_falsifier_only_clause(&i), Some(0));
    }
}
