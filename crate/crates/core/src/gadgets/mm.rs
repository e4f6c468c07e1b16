use serde::{Deserialize, Serialize};

use crate::hypergraph::Hypergraph;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MmTrace {
    /// `x_i`, inserted into hyperedge `i`.
    pub x: Vec<usize>,
    pub y: Vec<usize>,
    /// Id of the hyperedge `{x_i, y_i}`.
    pub pair_edges: Vec<usize>,
}

/// Maker-Maker board whose first-player outcome matches the Maker-Breaker
/// outcome of `h` with Maker first: every hyperedge `e_i` gains a fresh
/// vertex `x_i`, and `{x_i, y_i}` is added. Hyperedge `i` of the output is
/// `e_i ∪ {x_i}`; the pair hyperedges follow in order.
pub fn mb_to_maker_maker(h: &Hypergraph) -> (Hypergraph, MmTrace) {
    let mut out = h.clone();
    let m = h.num_edges();
    let mut trace = MmTrace { x: Vec::with_capacity(m), y: Vec::with_capacity(m), pair_edges: Vec::with_capacity(m) };
    for i in 0..m {
        let x = out.add_vertex(Some(format!("x{}", i + 1)));
        let y = out.add_vertex(Some(format!("y{}", i + 1)));
        out.insert_into_edge(i, x).unwrap();
        trace.x.push(x);
        trace.y.push(y);
    }
    for i in 0..m {
        trace.pair_edges.push(out.add_edge(vec![trace.x[i], trace.y[i]]).unwrap());
    }
    (out, trace)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_edge() {
        let h = Hypergraph::from_edges(2, &[&[0, 1]]);
        let (g, t) = mb_to_maker_maker(&h);
        assert_eq!(g.num_vertices(), 4);
        assert_eq!(g.edges(), &[vec![0, 1, 2], vec![2, 3]]);
        assert_eq!((t.x, t.y, t.pair_edges), (vec![2], vec![3], vec![1]));
    }

    #[test]
    fn counts() {
        let h = Hypergraph::from_edges(4, &[&[0, 1, 2], &[1, 2, 3], &[0, 3]]);
        let (g, _) = mb_to_maker_maker(&h);
        assert_eq!(g.num_vertices(), 4 + 6);
        assert_eq!(g.num_edges(), 6);
        assert_eq!(g.rank(), h.rank() + 1);
        assert_eq!(g.max_degree(), h.max_degree().max(2));
    }
}
