//! Exhaustive small instance families in canonical form (sorted clause and
//! hyperedge encodings), plus their checked-in fixture copies.
//!
//! Fixture files hold one instance per block in the native text format,
//! blocks separated by a line containing only `%`. `fixtures/MANIFEST`
//! records the count and SHA-256 of every file.

use std::collections::BTreeSet;

use bdqbf_core::dimacs::{emit_paired_sat, emit_qdimacs, parse_paired_sat, parse_qdimacs, ParseError};
use bdqbf_core::formula::{degree_profile, Clause, CnfMatrix, Lit, PairedSatInstance, QbfFormula, Quantifier, QuantifierPrefix, Var};
use bdqbf_core::hypergraph::{emit_hypergraph, parse_hypergraph, Hypergraph, HypergraphParseError};
use sha2::{Digest, Sha256};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FixtureError {
    #[error("unknown fixture `{0}`")]
    Unknown(String),
    #[error("fixture {name}, block {block}: {source}")]
    Formula { name: String, block: usize, source: ParseError },
    #[error("fixture {name}, block {block}: {source}")]
    Hypergraph { name: String, block: usize, source: HypergraphParseError },
}

/// Names of the versioned families, in manifest order.
pub const FAMILY_NAMES: [&str; 5] = ["qbf2_exhaustive", "ae_n1", "psat_sources", "cw_n1", "mm_sources"];

const QBF2_EXHAUSTIVE: &str = include_str!("../fixtures/qbf2_exhaustive.txt");
const AE_N1: &str = include_str!("../fixtures/ae_n1.txt");
const PSAT_SOURCES: &str = include_str!("../fixtures/psat_sources.txt");
const CW_N1: &str = include_str!("../fixtures/cw_n1.txt");
const MM_SOURCES: &str = include_str!("../fixtures/mm_sources.txt");

pub const MANIFEST: &str = include_str!("../fixtures/MANIFEST");

pub fn fixture_text(name: &str) -> Result<&'static str, FixtureError> {
    Ok(match name {
        "qbf2_exhaustive" => QBF2_EXHAUSTIVE,
        "ae_n1" => AE_N1,
        "psat_sources" => PSAT_SOURCES,
        "cw_n1" => CW_N1,
        "mm_sources" => MM_SOURCES,
        _ => return Err(FixtureError::Unknown(name.to_string())),
    })
}

fn blocks(text: &str) -> impl Iterator<Item = &str> {
    text.split("\n%\n").map(str::trim).filter(|b| !b.is_empty())
}

pub fn join_blocks<I: IntoIterator<Item = String>>(items: I) -> String {
    let mut out = String::new();
    for item in items {
        out.push_str(&item);
        if !item.ends_with('\n') {
            out.push('\n');
        }
        out.push_str("%\n");
    }
    out
}

pub fn load_qbf_fixture(name: &str) -> Result<Vec<QbfFormula>, FixtureError> {
    blocks(fixture_text(name)?)
        .enumerate()
        .map(|(block, b)| parse_qdimacs(b).map_err(|source| FixtureError::Formula { name: name.into(), block, source }))
        .collect()
}

pub fn load_paired_sat_fixture(name: &str) -> Result<Vec<PairedSatInstance>, FixtureError> {
    blocks(fixture_text(name)?)
        .enumerate()
        .map(|(block, b)| {
            parse_paired_sat(b).map_err(|source| FixtureError::Formula { name: name.into(), block, source })
        })
        .collect()
}

pub fn load_hypergraph_fixture(name: &str) -> Result<Vec<Hypergraph>, FixtureError> {
    blocks(fixture_text(name)?)
        .enumerate()
        .map(|(block, b)| {
            parse_hypergraph(b).map_err(|source| FixtureError::Hypergraph { name: name.into(), block, source })
        })
        .collect()
}

/// Regenerates the text of family `name` from its enumerator.
pub fn render_family(name: &str) -> Result<String, FixtureError> {
    Ok(match name {
        "qbf2_exhaustive" => join_blocks(qbf2_exhaustive().iter().map(emit_qdimacs)),
        "ae_n1" => join_blocks(ae_n1().iter().map(emit_qdimacs)),
        "psat_sources" => join_blocks(psat_sources().iter().map(emit_qdimacs)),
        "cw_n1" => join_blocks(cw_n1().iter().map(emit_paired_sat)),
        "mm_sources" => join_blocks(mm_sources().iter().map(emit_hypergraph)),
        _ => return Err(FixtureError::Unknown(name.to_string())),
    })
}

pub fn sha256_hex(text: &str) -> String {
    Sha256::digest(text.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
}

/// `name count sha256` per family.
pub fn render_manifest() -> Result<String, FixtureError> {
    let mut out = String::new();
    for name in FAMILY_NAMES {
        let text = render_family(name)?;
        out.push_str(&format!("{name} {} {}\n", blocks(&text).count(), sha256_hex(&text)));
    }
    Ok(out)
}

/// Every nonempty clause of at most `max_len` literals over variables
/// `1..=n`, sorted. With `distinct_vars`, clauses never hold both
/// polarities of a variable.
fn clause_types(n: usize, max_len: usize, distinct_vars: bool) -> Vec<Clause> {
    let lits: Vec<Lit> = (0..n).flat_map(|i| [Var::from_index(i).positive(), Var::from_index(i).negative()]).collect();
    let mut out = BTreeSet::new();
    for mask in 1u32..(1 << lits.len()) {
        if mask.count_ones() as usize > max_len {
            continue;
        }
        let chosen: Vec<Lit> = (0..lits.len()).filter(|&k| mask >> k & 1 == 1).map(|k| lits[k]).collect();
        let c = Clause::new(chosen);
        if distinct_vars && c.num_vars() != c.len() {
            continue;
        }
        out.insert(c);
    }
    out.into_iter().collect()
}

/// Nondecreasing index tuples of length `0..=max_len` over `0..k`.
fn multisets(k: usize, max_len: usize, mut keep: impl FnMut(&[usize]) -> bool) -> Vec<Vec<usize>> {
    fn rec(k: usize, max_len: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>, keep: &mut dyn FnMut(&[usize]) -> bool) {
        if !keep(cur) {
            return;
        }
        out.push(cur.clone());
        if cur.len() == max_len {
            return;
        }
        let start = cur.last().copied().unwrap_or(0);
        for i in start..k {
            cur.push(i);
            rec(k, max_len, cur, out, keep);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(k, max_len, &mut Vec::new(), &mut out, &mut keep);
    out
}

fn max_degree_of(n: usize, clauses: &[Clause]) -> usize {
    let m = CnfMatrix::new(n, clauses.to_vec()).expect("clause types are in range");
    degree_profile(&m).max_degree
}

fn formula(qs: &[Quantifier], clauses: Vec<Clause>) -> QbfFormula {
    let matrix = CnfMatrix::new(qs.len(), clauses).expect("clause types are in range");
    QbfFormula::new(QuantifierPrefix::from_quantifiers(qs), matrix).unwrap()
}

fn all_patterns(n: usize) -> Vec<Vec<Quantifier>> {
    (0..1u32 << n)
        .map(|bits| {
            (0..n).map(|i| if bits >> i & 1 == 1 { Quantifier::Forall } else { Quantifier::Exists }).collect()
        })
        .collect()
}

/// All formulas on 1 to 3 variables, every quantifier pattern, with at most
/// three clauses of one or two literals and maximum degree two.
pub fn qbf2_exhaustive() -> Vec<QbfFormula> {
    let mut out = Vec::new();
    for n in 1..=3 {
        let types = clause_types(n, 2, false);
        let matrices = multisets(types.len(), 3, |idx| {
            let cs: Vec<Clause> = idx.iter().map(|&i| types[i].clone()).collect();
            max_degree_of(n, &cs) <= 2
        });
        for qs in all_patterns(n) {
            for idx in &matrices {
                out.push(formula(&qs, idx.iter().map(|&i| types[i].clone()).collect()));
            }
        }
    }
    out
}

/// All `∃x1 ∀x2` formulas whose clauses have distinct variables and whose
/// variables occur in at most three clauses.
pub fn ae_n1() -> Vec<QbfFormula> {
    let types = clause_types(2, 2, true);
    let qs = [Quantifier::Exists, Quantifier::Forall];
    multisets(types.len(), 6, |idx| {
        let cs: Vec<Clause> = idx.iter().map(|&i| types[i].clone()).collect();
        max_degree_of(2, &cs) <= 3
    })
    .into_iter()
    .map(|idx| formula(&qs, idx.iter().map(|&i| types[i].clone()).collect()))
    .collect()
}

/// Alternating sources with one or two `∃∀` blocks: the whole
/// [`ae_n1`] family, then every `∃∀∃∀` formula with at most two distinct
/// clauses of up to three distinct variables.
pub fn psat_sources() -> Vec<QbfFormula> {
    let mut out = ae_n1();
    let types = clause_types(4, 3, true);
    let qs = [Quantifier::Exists, Quantifier::Forall, Quantifier::Exists, Quantifier::Forall];
    out.push(formula(&qs, Vec::new()));
    for i in 0..types.len() {
        out.push(formula(&qs, vec![types[i].clone()]));
        for j in i + 1..types.len() {
            out.push(formula(&qs, vec![types[i].clone(), types[j].clone()]));
        }
    }
    out
}

/// Every single-pair Paired-SAT instance `(x1, x2)` with a set of clauses
/// over distinct variables.
pub fn cw_n1() -> Vec<PairedSatInstance> {
    let types = clause_types(2, 2, true);
    (0..1u32 << types.len())
        .map(|mask| {
            let cs: Vec<Clause> = (0..types.len()).filter(|&k| mask >> k & 1 == 1).map(|k| types[k].clone()).collect();
            let matrix = CnfMatrix::new(2, cs).unwrap();
            PairedSatInstance::new(matrix, vec![(Var::new(1), Var::new(2))]).unwrap()
        })
        .collect()
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..n {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

/// Hypergraphs with one to three nonempty hyperedges on at most six
/// vertices, one per isomorphism class, isolated vertices dropped.
pub fn mm_sources() -> Vec<Hypergraph> {
    const N: usize = 6;
    let perms = permutations(N);
    let table: Vec<Vec<u8>> = perms
        .iter()
        .map(|p| (0..1u8 << N).map(|m| (0..N).filter(|&b| m >> b & 1 == 1).fold(0u8, |acc, b| acc | 1 << p[b])).collect())
        .collect();
    let masks: Vec<u8> = (1..1u8 << N).collect();
    let mut classes = BTreeSet::new();
    for idx in multisets(masks.len(), 3, |_| true) {
        if idx.is_empty() {
            continue;
        }
        let edges: Vec<u8> = idx.iter().map(|&i| masks[i]).collect();
        let canon = table
            .iter()
            .map(|t| {
                let mut e: Vec<u8> = edges.iter().map(|&m| t[m as usize]).collect();
                e.sort_unstable();
                e
            })
            .min()
            .unwrap();
        classes.insert(canon);
    }
    let mut out: Vec<Hypergraph> = classes
        .into_iter()
        .map(|edges| {
            let used: u8 = edges.iter().fold(0, |a, &m| a | m);
            let rank_of = |b: usize| (used & ((1u8 << b) - 1)).count_ones() as usize;
            let lists = edges
                .iter()
                .map(|&m| (0..N).filter(|&b| m >> b & 1 == 1).map(rank_of).collect())
                .collect();
            Hypergraph::new(used.count_ones() as usize, lists).unwrap()
        })
        .collect();
    out.sort_by(|a, b| {
        (a.num_vertices(), a.num_edges(), a.edges()).cmp(&(b.num_vertices(), b.num_edges(), b.edges()))
    });
    out
}
