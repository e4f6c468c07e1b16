//! Hypergraph boards and the `p pos` text format.
//!
//! Vertices are 0-based in the API and 1-based in text. Hyperedges are a
//! multiset: duplicates are distinct occurrences for degree counting.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HypergraphError {
    #[error("hyperedge {edge}: vertex {vertex} out of range (n = {num_vertices})")]
    VertexOutOfRange { edge: usize, vertex: usize, num_vertices: usize },
    #[error("hyperedge {edge}: vertex {vertex} repeated")]
    DuplicateVertex { edge: usize, vertex: usize },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HypergraphParseError {
    #[error("missing `p pos` problem line")]
    MissingHeader,
    #[error("line {line}: malformed header")]
    Header { line: usize },
    #[error("line {line}: invalid token `{token}`")]
    Token { line: usize, token: String },
    #[error("line {line}: vertex {vertex} out of range 1..={num_vertices}")]
    VertexOutOfRange { line: usize, vertex: i64, num_vertices: usize },
    #[error("line {line}: vertex {vertex} repeated in one hyperedge")]
    DuplicateVertex { line: usize, vertex: usize },
    #[error("line {line}: missing terminating 0")]
    MissingTerminator { line: usize },
    #[error("expected {expected} hyperedges, found {found}")]
    EdgeCount { expected: usize, found: usize },
    #[error("line {line}: malformed label line")]
    Label { line: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct Hypergraph {
    num_vertices: usize,
    labels: Vec<Option<String>>,
    /// Each hyperedge is sorted ascending.
    edges: Vec<Vec<usize>>,
}

impl Hypergraph {
    pub fn new(num_vertices: usize, edges: Vec<Vec<usize>>) -> Result<Self, HypergraphError> {
        let mut sorted = Vec::with_capacity(edges.len());
        for (i, mut e) in edges.into_iter().enumerate() {
            e.sort_unstable();
            if let Some(&v) = e.iter().find(|&&v| v >= num_vertices) {
                return Err(HypergraphError::VertexOutOfRange { edge: i, vertex: v, num_vertices });
            }
            if let Some(w) = e.windows(2).find(|w| w[0] == w[1]) {
                return Err(HypergraphError::DuplicateVertex { edge: i, vertex: w[0] });
            }
            sorted.push(e);
        }
        Ok(Hypergraph { num_vertices, labels: vec![None; num_vertices], edges: sorted })
    }

    /// Shorthand with 0-based slices; panics on invalid input.
    pub fn from_edges(num_vertices: usize, edges: &[&[usize]]) -> Self {
        Hypergraph::new(num_vertices, edges.iter().map(|e| e.to_vec()).collect()).unwrap()
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Vec<usize>] {
        &self.edges
    }

    pub fn edge(&self, i: usize) -> &[usize] {
        &self.edges[i]
    }

    pub fn label(&self, v: usize) -> Option<&str> {
        self.labels[v].as_deref()
    }

    pub fn set_label(&mut self, v: usize, label: impl Into<String>) {
        self.labels[v] = Some(label.into());
    }

    /// Appends a vertex and returns its id.
    pub fn add_vertex(&mut self, label: Option<String>) -> usize {
        self.labels.push(label);
        self.num_vertices += 1;
        self.num_vertices - 1
    }

    /// Appends a hyperedge and returns its index.
    pub fn add_edge(&mut self, mut members: Vec<usize>) -> Result<usize, HypergraphError> {
        let edge = self.edges.len();
        members.sort_unstable();
        if let Some(&v) = members.iter().find(|&&v| v >= self.num_vertices) {
            return Err(HypergraphError::VertexOutOfRange {
                edge,
                vertex: v,
                num_vertices: self.num_vertices,
            });
        }
        if let Some(w) = members.windows(2).find(|w| w[0] == w[1]) {
            return Err(HypergraphError::DuplicateVertex { edge, vertex: w[0] });
        }
        self.edges.push(members);
        Ok(edge)
    }

    /// Adds `v` to hyperedge `edge` (keeps it sorted).
    pub fn insert_into_edge(&mut self, edge: usize, v: usize) -> Result<(), HypergraphError> {
        if v >= self.num_vertices {
            return Err(HypergraphError::VertexOutOfRange {
                edge,
                vertex: v,
                num_vertices: self.num_vertices,
            });
        }
        match self.edges[edge].binary_search(&v) {
            Ok(_) => Err(HypergraphError::DuplicateVertex { edge, vertex: v }),
            Err(pos) => {
                self.edges[edge].insert(pos, v);
                Ok(())
            }
        }
    }

    pub fn rank(&self) -> usize {
        self.edges.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.num_vertices];
        for e in &self.edges {
            for &v in e {
                d[v] += 1;
            }
        }
        d
    }

    pub fn max_degree(&self) -> usize {
        self.degrees().into_iter().max().unwrap_or(0)
    }

    /// `incidence()[v]` lists the indices of hyperedges containing `v`.
    pub fn incidence(&self) -> Vec<Vec<usize>> {
        let mut inc = vec![Vec::new(); self.num_vertices];
        for (i, e) in self.edges.iter().enumerate() {
            for &v in e {
                inc[v].push(i);
            }
        }
        inc
    }

    pub fn is_k_uniform(&self, k: usize) -> bool {
        self.edges.iter().all(|e| e.len() == k)
    }

    /// Drops vertices in no hyperedge. Returns the board and, for each new
    /// vertex, its id in `self`.
    pub fn without_isolated(&self) -> (Hypergraph, Vec<usize>) {
        let degrees = self.degrees();
        let kept: Vec<usize> = (0..self.num_vertices).filter(|&v| degrees[v] > 0).collect();
        let mut remap = vec![usize::MAX; self.num_vertices];
        for (new, &old) in kept.iter().enumerate() {
            remap[old] = new;
        }
        let edges = self.edges.iter().map(|e| e.iter().map(|&v| remap[v]).collect()).collect();
        let mut h = Hypergraph::new(kept.len(), edges).expect("remap preserves validity");
        for (new, &old) in kept.iter().enumerate() {
            h.labels[new] = self.labels[old].clone();
        }
        (h, kept)
    }
}

fn parse_usize(tok: &str, line: usize) -> Result<i64, HypergraphParseError> {
    tok.parse::<i64>().map_err(|_| HypergraphParseError::Token { line, token: tok.to_string() })
}

/// Vertex tables are allocated from the header, so it is bounded.
pub const MAX_VERTICES: usize = 1 << 24;

pub fn parse_hypergraph(text: &str) -> Result<Hypergraph, HypergraphParseError> {
    let mut header: Option<(usize, usize)> = None;
    let mut labels: Vec<(usize, String)> = Vec::new();
    let mut edges: Vec<Vec<usize>> = Vec::new();
    let mut pending: Vec<usize> = Vec::new();
    let mut pending_line = 0;

    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('c') {
            let rest = rest.trim_start();
            if let Some(label) = rest.strip_prefix("label") {
                let Some((n, _)) = header else {
                    return Err(HypergraphParseError::MissingHeader);
                };
                let label = label.trim_start();
                let (id, text) = label.split_once(char::is_whitespace).unwrap_or((label, ""));
                let id = parse_usize(id, lineno).map_err(|_| HypergraphParseError::Label { line: lineno })?;
                if id < 1 || id as u64 > n as u64 {
                    return Err(HypergraphParseError::VertexOutOfRange {
                        line: lineno,
                        vertex: id,
                        num_vertices: n,
                    });
                }
                labels.push((id as usize - 1, text.trim().to_string()));
            }
            continue;
        }
        let Some((n, _)) = header else {
            let toks: Vec<&str> = line.split_whitespace().collect();
            if toks.len() != 4 || toks[0] != "p" || toks[1] != "pos" {
                return Err(if toks.first() == Some(&"p") {
                    HypergraphParseError::Header { line: lineno }
                } else {
                    HypergraphParseError::MissingHeader
                });
            }
            let n: usize = toks[2].parse().map_err(|_| HypergraphParseError::Header { line: lineno })?;
            let m: usize = toks[3].parse().map_err(|_| HypergraphParseError::Header { line: lineno })?;
            if n > MAX_VERTICES {
                return Err(HypergraphParseError::Header { line: lineno });
            }
            header = Some((n, m));
            continue;
        };
        if line.starts_with('p') {
            return Err(HypergraphParseError::Header { line: lineno });
        }
        for tok in line.split_whitespace() {
            if pending.is_empty() {
                pending_line = lineno;
            }
            let v = parse_usize(tok, lineno)?;
            if v == 0 {
                let mut e = std::mem::take(&mut pending);
                e.sort_unstable();
                if let Some(w) = e.windows(2).find(|w| w[0] == w[1]) {
                    return Err(HypergraphParseError::DuplicateVertex { line: lineno, vertex: w[0] + 1 });
                }
                edges.push(e);
            } else if v < 0 || v as u64 > n as u64 {
                return Err(HypergraphParseError::VertexOutOfRange { line: lineno, vertex: v, num_vertices: n });
            } else {
                pending.push(v as usize - 1);
            }
        }
    }
    let (n, m) = header.ok_or(HypergraphParseError::MissingHeader)?;
    if !pending.is_empty() {
        return Err(HypergraphParseError::MissingTerminator { line: pending_line });
    }
    if edges.len() != m {
        return Err(HypergraphParseError::EdgeCount { expected: m, found: edges.len() });
    }
    let mut h = Hypergraph::new(n, edges).expect("validated while parsing");
    for (v, text) in labels {
        h.labels[v] = Some(text);
    }
    Ok(h)
}

pub fn emit_hypergraph(h: &Hypergraph) -> String {
    let mut out = String::new();
    writeln!(out, "p pos {} {}", h.num_vertices, h.edges.len()).unwrap();
    for (v, label) in h.labels.iter().enumerate() {
        if let Some(label) = label {
            writeln!(out, "c label {} {}", v + 1, label).unwrap();
        }
    }
    for e in &h.edges {
        for &v in e {
            write!(out, "{} ", v + 1).unwrap();
        }
        out.push_str("0\n");
    }
    out
}
