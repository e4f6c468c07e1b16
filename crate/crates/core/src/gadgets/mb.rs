use serde::{Deserialize, Serialize};

use super::GadgetError;
use crate::hypergraph::Hypergraph;

pub const MAX_SOURCE_RANK: usize = 6;

/// One node `t` of a tree `T_i^ε`, with the pair `(v, w)` and the vertices
/// `a, b` on the edge to its parent (to `x_i` at the root).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MbNode {
    pub v: usize,
    pub w: usize,
    pub a: usize,
    pub b: usize,
    /// `{parent pair, v, a}` and `{parent pair, w, b}`; the parent pair is
    /// `x_i` alone at the root.
    pub parent_edges: [usize; 2],
    /// For leaves, the big hyperedge this pair is substituted into.
    pub big_edge: Option<usize>,
}

/// Heap-shaped complete binary tree: children of node `k` are `2k+1`, `2k+2`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MbTree {
    pub nodes: Vec<MbNode>,
}

impl MbTree {
    pub fn num_leaves(&self) -> usize {
        self.nodes.len().div_ceil(2)
    }

    pub fn parent(k: usize) -> Option<usize> {
        (k > 0).then(|| (k - 1) / 2)
    }

    pub fn is_leaf(&self, k: usize) -> bool {
        2 * k + 1 >= self.nodes.len()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MbGadget {
    /// Vertex id in the source hypergraph.
    pub source: usize,
    pub x: usize,
    pub trees: [MbTree; 2],
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BigEdge {
    pub source_edge: usize,
    /// Tree choice (0 or 1) per member of the source hyperedge, in order.
    pub choice: Vec<u8>,
    pub edge: usize,
}

/// Where an output vertex sits in the construction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum VertexRole {
    X { gadget: usize },
    Tree { gadget: usize, tree: usize, node: usize, kind: NodeVertex },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum NodeVertex {
    V,
    W,
    A,
    B,
}

impl VertexRole {
    pub fn gadget(self) -> usize {
        match self {
            VertexRole::X { gadget } | VertexRole::Tree { gadget, .. } => gadget,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MbGadgetTrace {
    /// Source vertices in no hyperedge, dropped before construction.
    pub stripped: Vec<usize>,
    /// The source with isolated vertices removed; gadget `i` encodes its vertex `i`.
    pub reduced_source: Hypergraph,
    pub gadgets: Vec<MbGadget>,
    pub big_edges: Vec<BigEdge>,
    pub roles: Vec<VertexRole>,
}

/// Replaces every vertex of a rank ≤ 6 hypergraph by a degree-bounded
/// gadget. Each source hyperedge `e` yields `2^|e|` big hyperedges, one per
/// tree choice of its members; each uses a dedicated leaf pair of the chosen
/// trees. A tree of vertex `u` therefore has `Σ_{e∋u} 2^{|e|-1}` leaves.
pub fn mb_to_bounded_degree(h: &Hypergraph) -> Result<(Hypergraph, MbGadgetTrace), GadgetError> {
    for (i, e) in h.edges().iter().enumerate() {
        if e.len() > MAX_SOURCE_RANK {
            return Err(GadgetError::EdgeTooLarge { edge: i, size: e.len(), max: MAX_SOURCE_RANK });
        }
    }
    let (src, kept) = h.without_isolated();
    let stripped: Vec<usize> = (0..h.num_vertices()).filter(|v| kept.binary_search(v).is_err()).collect();
    let n = src.num_vertices();

    let mut leaves = vec![0usize; n];
    for e in src.edges() {
        for &u in e {
            leaves[u] += 1 << (e.len() - 1);
        }
    }

    let mut out = Hypergraph::new(0, Vec::new()).unwrap();
    let mut roles = Vec::new();
    let mut vertex = |out: &mut Hypergraph, role: VertexRole, label: String| {
        roles.push(role);
        out.add_vertex(Some(label))
    };

    let mut gadgets = Vec::with_capacity(n);
    for u in 0..n {
        let tag = kept[u] + 1;
        let x = vertex(&mut out, VertexRole::X { gadget: u }, format!("x_{tag}"));
        let mut trees = Vec::with_capacity(2);
        for tree in 0..2 {
            let size = 2 * leaves[u] - 1;
            let mut nodes = Vec::with_capacity(size);
            for node in 0..size {
                let mut mk = |kind: NodeVertex, name: &str| {
                    let role = VertexRole::Tree { gadget: u, tree, node, kind };
                    vertex(&mut out, role, format!("{name}_{tag}^{}.{node}", tree + 1))
                };
                let (a, b) = (mk(NodeVertex::A, "a"), mk(NodeVertex::B, "b"));
                let (v, w) = (mk(NodeVertex::V, "v"), mk(NodeVertex::W, "w"));
                let parent: Vec<usize> = match MbTree::parent(node) {
                    None => vec![x],
                    Some(p) => {
                        let pn: &MbNode = &nodes[p];
                        vec![pn.v, pn.w]
                    }
                };
                let e1 = out.add_edge([parent.as_slice(), &[v, a]].concat()).unwrap();
                let e2 = out.add_edge([parent.as_slice(), &[w, b]].concat()).unwrap();
                nodes.push(MbNode { v, w, a, b, parent_edges: [e1, e2], big_edge: None });
            }
            trees.push(MbTree { nodes });
        }
        let [t1, t2]: [MbTree; 2] = trees.try_into().unwrap();
        gadgets.push(MbGadget { source: kept[u], x, trees: [t1, t2] });
    }

    // next unused leaf per (vertex, tree)
    let mut cursor = vec![[0usize; 2]; n];
    let mut big_edges = Vec::new();
    for (ei, e) in src.edges().iter().enumerate() {
        let r = e.len();
        for bitsv in 0..(1usize << r) {
            // most significant bit is the first member's choice
            let choice: Vec<u8> = (0..r).map(|k| ((bitsv >> (r - 1 - k)) & 1) as u8).collect();
            let mut members = Vec::with_capacity(2 * r);
            let mut used = Vec::with_capacity(r);
            for (k, &u) in e.iter().enumerate() {
                let t = choice[k] as usize;
                let tree = &gadgets[u].trees[t];
                let leaf = tree.num_leaves() - 1 + cursor[u][t];
                cursor[u][t] += 1;
                members.push(tree.nodes[leaf].v);
                members.push(tree.nodes[leaf].w);
                used.push((u, t, leaf));
            }
            let id = out.add_edge(members).unwrap();
            for (u, t, leaf) in used {
                gadgets[u].trees[t].nodes[leaf].big_edge = Some(id);
            }
            big_edges.push(BigEdge { source_edge: ei, choice, edge: id });
        }
    }
    debug_assert!(cursor.iter().zip(&leaves).all(|(c, &l)| c[0] == l && c[1] == l));

    Ok((out, MbGadgetTrace { stripped, reduced_source: src, gadgets, big_edges, roles }))
}

/// Disjoint vertex pairs plus vertices claimed outright.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Pairing {
    pub pairs: Vec<(usize, usize)>,
    pub singletons: Vec<usize>,
}

/// Breaker's pairing once the source game is over. For gadgets whose `x`
/// Breaker holds (`breaker_x`, gadget indices) he pairs `(v, w)` at every
/// node of both trees; elsewhere he pairs `(v, a)` and `(w, b)` at every
/// node, which covers the tree hyperedges but no big hyperedge.
pub fn breaker_pairing(trace: &MbGadgetTrace, breaker_x: &[usize]) -> Pairing {
    let mut p = Pairing::default();
    for (u, g) in trace.gadgets.iter().enumerate() {
        let own = breaker_x.contains(&u);
        if own {
            p.singletons.push(g.x);
        }
        for t in &g.trees {
            for node in &t.nodes {
                if own {
                    p.pairs.push((node.v, node.w));
                } else {
                    p.pairs.push((node.v, node.a));
                    p.pairs.push((node.w, node.b));
                }
            }
        }
    }
    p
}

/// Hyperedges of `h` that contain neither a whole pair nor a singleton.
pub fn pairing_coverage(h: &Hypergraph, pairing: &Pairing) -> Vec<usize> {
    let n = h.num_vertices();
    let mut partner = vec![usize::MAX; n];
    let mut single = vec![false; n];
    for &(a, b) in &pairing.pairs {
        partner[a] = b;
        partner[b] = a;
    }
    for &s in &pairing.singletons {
        single[s] = true;
    }
    h.edges()
        .iter()
        .enumerate()
        .filter(|(_, e)| {
            !e.iter().any(|&v| single[v] || (partner[v] != usize::MAX && e.binary_search(&partner[v]).is_ok()))
        })
        .map(|(i, _)| i)
        .collect()
}
