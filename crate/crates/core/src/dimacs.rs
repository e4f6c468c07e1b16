//! QDIMACS and Paired-SAT text formats.
//!
//! QDIMACS: `p cnf <n> <m>`, quantifier lines `e ... 0` / `a ... 0`
//! (outermost first), then clauses terminated by `0`. Variables declared in
//! the header but absent from every quantifier line are bound as outermost
//! existentials in id order.
//!
//! Paired-SAT: `p psat <n> <m> <k>`, then `k` lines `d <first> <second> 0`,
//! then clauses as in QDIMACS.

use std::fmt::Write as _;

use thiserror::Error;

use crate::formula::{
    Clause, CnfMatrix, FormulaError, Lit, PairedSatInstance, QbfFormula, Quantifier,
    QuantifierPrefix, Var,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("line {line}: malformed header: {msg}")]
    Header { line: usize, msg: String },
    #[error("missing problem line")]
    MissingHeader,
    #[error("line {line}: invalid token `{token}`")]
    Token { line: usize, token: String },
    #[error("line {line}: literal {lit} out of range 1..={num_vars}")]
    LiteralOutOfRange { line: usize, lit: i64, num_vars: usize },
    #[error("line {line}: variable {var} quantified twice")]
    DuplicateQuantifier { line: usize, var: u32 },
    #[error("line {line}: quantifier line after clauses")]
    LateQuantifier { line: usize },
    #[error("line {line}: missing terminating 0")]
    MissingTerminator { line: usize },
    #[error("expected {expected} clauses, found {found}")]
    ClauseCount { expected: usize, found: usize },
    #[error("expected {expected} pairs, found {found}")]
    PairCount { expected: usize, found: usize },
    #[error("line {line}: malformed pair line")]
    Pair { line: usize },
    #[error(transparent)]
    Structure(#[from] FormulaError),
}

/// Per-variable tables are allocated from the header, so it is bounded.
pub const MAX_VARS: usize = 1 << 24;

struct Header {
    num_vars: usize,
    num_clauses: usize,
    num_pairs: Option<usize>,
}

fn parse_count(tok: Option<&str>, line: usize, what: &str) -> Result<usize, ParseError> {
    let tok = tok.ok_or_else(|| ParseError::Header { line, msg: format!("missing {what}") })?;
    // cap: ids must fit a positive i32
    match tok.parse::<usize>() {
        Ok(n) if n <= i32::MAX as usize => Ok(n),
        _ => Err(ParseError::Header { line, msg: format!("bad {what} `{tok}`") }),
    }
}

fn parse_header(line: &str, lineno: usize, kind: &str) -> Result<Header, ParseError> {
    let mut toks = line.split_whitespace();
    toks.next(); // "p"
    match toks.next() {
        Some(k) if k == kind => {}
        other => {
            return Err(ParseError::Header {
                line: lineno,
                msg: format!("expected format `{kind}`, found `{}`", other.unwrap_or("")),
            })
        }
    }
    let num_vars = parse_count(toks.next(), lineno, "variable count")?;
    if num_vars > MAX_VARS {
        return Err(ParseError::Header { line: lineno, msg: format!("more than {MAX_VARS} variables") });
    }
    let num_clauses = parse_count(toks.next(), lineno, "clause count")?;
    let num_pairs = if kind == "psat" {
        Some(parse_count(toks.next(), lineno, "pair count")?)
    } else {
        None
    };
    if let Some(extra) = toks.next() {
        return Err(ParseError::Header { line: lineno, msg: format!("trailing `{extra}`") });
    }
    Ok(Header { num_vars, num_clauses, num_pairs })
}

fn parse_var(tok: &str, line: usize, num_vars: usize) -> Result<u32, ParseError> {
    let v: i64 = tok
        .parse()
        .map_err(|_| ParseError::Token { line, token: tok.to_string() })?;
    if v < 1 || v as u64 > num_vars as u64 {
        return Err(ParseError::LiteralOutOfRange { line, lit: v, num_vars });
    }
    Ok(v as u32)
}

fn parse_lit(tok: &str, line: usize, num_vars: usize) -> Result<Option<Lit>, ParseError> {
    let v: i64 = tok
        .parse()
        .map_err(|_| ParseError::Token { line, token: tok.to_string() })?;
    if v == 0 {
        return Ok(None);
    }
    if v.unsigned_abs() > num_vars as u64 {
        return Err(ParseError::LiteralOutOfRange { line, lit: v, num_vars });
    }
    Ok(Lit::from_dimacs(v as i32))
}

/// Accumulates whitespace-separated clause tokens that may span lines.
struct ClauseReader {
    num_vars: usize,
    clauses: Vec<Clause>,
    pending: Vec<Lit>,
    pending_line: usize,
}

impl ClauseReader {
    fn new(num_vars: usize) -> Self {
        ClauseReader { num_vars, clauses: Vec::new(), pending: Vec::new(), pending_line: 0 }
    }

    fn feed(&mut self, line: &str, lineno: usize) -> Result<(), ParseError> {
        for tok in line.split_whitespace() {
            if self.pending.is_empty() {
                self.pending_line = lineno;
            }
            match parse_lit(tok, lineno, self.num_vars)? {
                Some(l) => self.pending.push(l),
                None => self.clauses.push(Clause::new(self.pending.drain(..))),
            }
        }
        Ok(())
    }

    fn finish(self, expected: usize) -> Result<CnfMatrix, ParseError> {
        if !self.pending.is_empty() {
            return Err(ParseError::MissingTerminator { line: self.pending_line });
        }
        if self.clauses.len() != expected {
            return Err(ParseError::ClauseCount { expected, found: self.clauses.len() });
        }
        Ok(CnfMatrix::new(self.num_vars, self.clauses)?)
    }
}

fn is_comment(line: &str) -> bool {
    line.is_empty() || line.starts_with('c') || line.starts_with('%')
}

pub fn parse_qdimacs(text: &str) -> Result<QbfFormula, ParseError> {
    let mut header: Option<Header> = None;
    let mut prefix: Vec<(Var, Quantifier)> = Vec::new();
    let mut quantified: Vec<bool> = Vec::new();
    let mut reader: Option<ClauseReader> = None;

    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.trim();
        if is_comment(line) {
            continue;
        }
        let Some(h) = &header else {
            if !line.starts_with('p') {
                return Err(ParseError::MissingHeader);
            }
            let h = parse_header(line, lineno, "cnf")?;
            quantified = vec![false; h.num_vars];
            reader = Some(ClauseReader::new(h.num_vars));
            header = Some(h);
            continue;
        };
        let reader = reader.as_mut().unwrap();
        let quant = match line.as_bytes()[0] {
            b'e' => Some(Quantifier::Exists),
            b'a' => Some(Quantifier::Forall),
            b'p' => {
                return Err(ParseError::Header { line: lineno, msg: "repeated problem line".into() })
            }
            _ => None,
        };
        match quant {
            Some(q) => {
                if !reader.clauses.is_empty() || !reader.pending.is_empty() {
                    return Err(ParseError::LateQuantifier { line: lineno });
                }
                let mut toks = line[1..].split_whitespace().peekable();
                let mut terminated = false;
                while let Some(tok) = toks.next() {
                    if tok == "0" {
                        if toks.peek().is_some() {
                            return Err(ParseError::Token { line: lineno, token: "0".into() });
                        }
                        terminated = true;
                        break;
                    }
                    let v = parse_var(tok, lineno, h.num_vars)?;
                    if std::mem::replace(&mut quantified[v as usize - 1], true) {
                        return Err(ParseError::DuplicateQuantifier { line: lineno, var: v });
                    }
                    prefix.push((Var::new(v), q));
                }
                if !terminated {
                    return Err(ParseError::MissingTerminator { line: lineno });
                }
            }
            None => reader.feed(line, lineno)?,
        }
    }

    let header = header.ok_or(ParseError::MissingHeader)?;
    let matrix = reader.unwrap().finish(header.num_clauses)?;
    let free = quantified
        .iter()
        .enumerate()
        .filter(|(_, q)| !**q)
        .map(|(i, _)| (Var::from_index(i), Quantifier::Exists));
    let entries: Vec<_> = free.chain(prefix).collect();
    Ok(QbfFormula::new(QuantifierPrefix::new(entries), matrix)?)
}

fn write_clauses(out: &mut String, matrix: &CnfMatrix) {
    for c in matrix.clauses() {
        for l in c.lits() {
            write!(out, "{} ", l.to_dimacs()).unwrap();
        }
        out.push_str("0\n");
    }
}

/// Canonical QDIMACS: consecutive same-quantifier entries share one line.
pub fn emit_qdimacs(formula: &QbfFormula) -> String {
    let mut out = String::new();
    writeln!(out, "p cnf {} {}", formula.num_vars(), formula.num_clauses()).unwrap();
    let entries = formula.prefix().entries();
    let mut i = 0;
    while i < entries.len() {
        let q = entries[i].1;
        out.push(q.symbol());
        while i < entries.len() && entries[i].1 == q {
            write!(out, " {}", entries[i].0.id()).unwrap();
            i += 1;
        }
        out.push_str(" 0\n");
    }
    write_clauses(&mut out, formula.matrix());
    out
}

pub fn parse_paired_sat(text: &str) -> Result<PairedSatInstance, ParseError> {
    let mut header: Option<Header> = None;
    let mut pairs: Vec<(Var, Var)> = Vec::new();
    let mut reader: Option<ClauseReader> = None;

    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.trim();
        if is_comment(line) {
            continue;
        }
        let Some(h) = &header else {
            if !line.starts_with('p') {
                return Err(ParseError::MissingHeader);
            }
            let h = parse_header(line, lineno, "psat")?;
            reader = Some(ClauseReader::new(h.num_vars));
            header = Some(h);
            continue;
        };
        let reader = reader.as_mut().unwrap();
        if let Some(rest) = line.strip_prefix('d') {
            if !reader.clauses.is_empty() || !reader.pending.is_empty() {
                return Err(ParseError::LateQuantifier { line: lineno });
            }
            let toks: Vec<&str> = rest.split_whitespace().collect();
            if toks.len() != 3 {
                return Err(if toks.len() == 2 {
                    ParseError::MissingTerminator { line: lineno }
                } else {
                    ParseError::Pair { line: lineno }
                });
            }
            if toks[2] != "0" {
                return Err(ParseError::MissingTerminator { line: lineno });
            }
            let a = parse_var(toks[0], lineno, h.num_vars)?;
            let b = parse_var(toks[1], lineno, h.num_vars)?;
            pairs.push((Var::new(a), Var::new(b)));
        } else if line.starts_with('p') {
            return Err(ParseError::Header { line: lineno, msg: "repeated problem line".into() });
        } else {
            reader.feed(line, lineno)?;
        }
    }

    let header = header.ok_or(ParseError::MissingHeader)?;
    let expected_pairs = header.num_pairs.unwrap_or(0);
    if pairs.len() != expected_pairs {
        return Err(ParseError::PairCount { expected: expected_pairs, found: pairs.len() });
    }
    let matrix = reader.unwrap().finish(header.num_clauses)?;
    Ok(PairedSatInstance::new(matrix, pairs)?)
}

pub fn emit_paired_sat(instance: &PairedSatInstance) -> String {
    let m = instance.matrix();
    let mut out = String::new();
    writeln!(out, "p psat {} {} {}", m.num_vars(), m.num_clauses(), instance.pairs().len()).unwrap();
    for (a, b) in instance.pairs() {
        writeln!(out, "d {} {} 0", a.id(), b.id()).unwrap();
    }
    write_clauses(&mut out, m);
    out
}
