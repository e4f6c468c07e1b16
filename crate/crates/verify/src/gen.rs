//! Seeded random instance generators. Every generator is a pure function of
//! its seed and parameters.

use bdqbf_core::formula::{Clause, CnfMatrix, Lit, PairedSatInstance, QbfFormula, Quantifier, QuantifierPrefix, Var};
use bdqbf_core::hypergraph::Hypergraph;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GenError {
    #[error("{num_clauses} clauses need a literal each, but {num_vars} variables of degree at most {max_degree} only offer {capacity}")]
    Infeasible { num_vars: usize, num_clauses: usize, max_degree: usize, capacity: usize },
    #[error("clause rank must be at least 1")]
    ZeroRank,
    #[error("hyperedge size range {min}..={max} is empty or exceeds {num_vertices} vertices")]
    EdgeSize { min: usize, max: usize, num_vertices: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum QuantifierPattern {
    AllExists,
    AllForall,
    /// `∃∀∃∀…`
    ExistsFirst,
    /// `∀∃∀∃…`
    ForallFirst,
    /// Each quantifier drawn independently.
    Random,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QbfParams {
    pub num_vars: usize,
    pub num_clauses: usize,
    pub rank: usize,
    pub max_degree: usize,
    pub pattern: QuantifierPattern,
    /// Probability that a clause of size ≥ 2 is made tautological.
    pub tautology_rate: f64,
}

impl QbfParams {
    pub fn new(num_vars: usize, num_clauses: usize, rank: usize, max_degree: usize) -> Self {
        QbfParams { num_vars, num_clauses, rank, max_degree, pattern: QuantifierPattern::Random, tautology_rate: 0.0 }
    }

    pub fn pattern(mut self, pattern: QuantifierPattern) -> Self {
        self.pattern = pattern;
        self
    }

    pub fn tautologies(mut self, rate: f64) -> Self {
        self.tautology_rate = rate;
        self
    }
}

fn random_matrix(
    rng: &mut ChaCha8Rng,
    num_vars: usize,
    num_clauses: usize,
    rank: usize,
    max_degree: usize,
    tautology_rate: f64,
) -> Result<CnfMatrix, GenError> {
    if rank == 0 && num_clauses > 0 {
        return Err(GenError::ZeroRank);
    }
    let capacity = num_vars * max_degree;
    if capacity < num_clauses {
        return Err(GenError::Infeasible { num_vars, num_clauses, max_degree, capacity });
    }
    let mut left = vec![max_degree; num_vars];
    let mut total = capacity;
    let mut clauses = Vec::with_capacity(num_clauses);
    for i in 0..num_clauses {
        let still_needed = num_clauses - i - 1;
        let mut open: Vec<usize> = (0..num_vars).filter(|&v| left[v] > 0).collect();
        let size = rng.gen_range(1..=rank).min(open.len()).min(total - still_needed);
        open.shuffle(rng);
        let chosen = &open[..size];
        let mut lits: Vec<Lit> = chosen.iter().map(|&v| Lit::new(Var::from_index(v), rng.gen_bool(0.5))).collect();
        if size >= 2 && tautology_rate > 0.0 && rng.gen_bool(tautology_rate) {
            lits[1] = lits[0].negate();
        }
        let clause = Clause::new(lits);
        for v in clause.vars() {
            left[v.index()] -= 1;
            total -= 1;
        }
        clauses.push(clause);
    }
    Ok(CnfMatrix::new(num_vars, clauses).expect("generated literals are in range"))
}

fn random_prefix(rng: &mut ChaCha8Rng, n: usize, pattern: QuantifierPattern) -> QuantifierPrefix {
    let qs: Vec<Quantifier> = (0..n)
        .map(|i| match pattern {
            QuantifierPattern::AllExists => Quantifier::Exists,
            QuantifierPattern::AllForall => Quantifier::Forall,
            QuantifierPattern::ExistsFirst if i % 2 == 0 => Quantifier::Exists,
            QuantifierPattern::ExistsFirst => Quantifier::Forall,
            QuantifierPattern::ForallFirst if i % 2 == 0 => Quantifier::Forall,
            QuantifierPattern::ForallFirst => Quantifier::Exists,
            QuantifierPattern::Random if rng.gen_bool(0.5) => Quantifier::Exists,
            QuantifierPattern::Random => Quantifier::Forall,
        })
        .collect();
    QuantifierPrefix::from_quantifiers(&qs)
}

/// Random formula whose clauses have at most `rank` literals and whose
/// variables occur in at most `max_degree` clauses. Every clause is nonempty.
pub fn gen_random_qbf(seed: u64, params: &QbfParams) -> Result<QbfFormula, GenError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let prefix = random_prefix(&mut rng, params.num_vars, params.pattern);
    let matrix = random_matrix(
        &mut rng,
        params.num_vars,
        params.num_clauses,
        params.rank,
        params.max_degree,
        params.tautology_rate,
    )?;
    Ok(QbfFormula::new(prefix, matrix).expect("prefix covers every variable"))
}

/// Random Paired-SAT instance with pairs `(1,2), (3,4), …`.
pub fn gen_random_paired_sat(
    seed: u64,
    num_pairs: usize,
    num_clauses: usize,
    rank: usize,
    max_degree: usize,
) -> Result<PairedSatInstance, GenError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let matrix = random_matrix(&mut rng, 2 * num_pairs, num_clauses, rank, max_degree, 0.0)?;
    let pairs = (0..num_pairs).map(|i| (Var::from_index(2 * i), Var::from_index(2 * i + 1))).collect();
    Ok(PairedSatInstance::new(matrix, pairs).expect("pairs partition the variables"))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HypergraphParams {
    pub num_vertices: usize,
    pub num_edges: usize,
    pub min_edge: usize,
    pub max_edge: usize,
}

/// Random hypergraph; each hyperedge size is uniform in `min_edge..=max_edge`.
pub fn gen_random_hypergraph(seed: u64, params: &HypergraphParams) -> Result<Hypergraph, GenError> {
    let HypergraphParams { num_vertices, num_edges, min_edge, max_edge } = *params;
    if min_edge > max_edge || (num_edges > 0 && max_edge > num_vertices) {
        return Err(GenError::EdgeSize { min: min_edge, max: max_edge, num_vertices });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let all: Vec<usize> = (0..num_vertices).collect();
    let edges = (0..num_edges)
        .map(|_| {
            let k = rng.gen_range(min_edge..=max_edge);
            all.choose_multiple(&mut rng, k).copied().collect()
        })
        .collect();
    Ok(Hypergraph::new(num_vertices, edges).expect("sampled members are distinct"))
}
