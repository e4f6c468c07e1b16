//! Solvers and reduction gadgets for bounded-degree quantified Boolean
//! formulas and positional games on hypergraphs.

pub mod dimacs;
pub mod formula;
pub mod gadgets;
pub mod game;
pub mod hypergraph;
pub mod qbf;
pub mod transform;
