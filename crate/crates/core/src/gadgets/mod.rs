//! Game-hardness constructions: 3-QBF-3 to Avoider-Enforcer, Paired-SAT to
//! Client-Waiter, Maker-Breaker to bounded-degree Maker-Breaker, and
//! Maker-Breaker to Maker-Maker, together with the strategy checks for the
//! bounded-degree Maker-Breaker gadget.

mod ae;
mod cw;
mod mb;
mod mm;
mod playout;

use thiserror::Error;

use crate::formula::Var;

pub use ae::{qbf3_to_avoider_enforcer, AeBlock, AeTrace};
pub use cw::{cw_falsifier_only_clause, paired_sat_to_client_waiter, CwPair, CwTrace};
pub use mb::{
    breaker_pairing, mb_to_bounded_degree, pairing_coverage, MbGadget, MbGadgetTrace, MbNode, MbTree, Pairing,
    VertexRole,
};
pub use mm::{mb_to_maker_maker, MmTrace};
pub use playout::{maker_forcing_playout, BreakerPolicy, PlayoutRecord, PlayoutResult, SourceStrategy};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GadgetError {
    #[error("clause {clause} has {size} literals, at most {max} allowed")]
    ClauseTooLarge { clause: usize, size: usize, max: usize },
    #[error("clause {clause} repeats a variable")]
    RepeatedVariable { clause: usize },
    #[error("{var} has degree {degree}, at most {max} allowed")]
    DegreeTooHigh { var: Var, degree: usize, max: usize },
    #[error("prefix must alternate ∃∀ starting with ∃ over an even number of variables")]
    NotAlternating,
    #[error("clause {clause} only mentions Falsifier variables")]
    FalsifierOnlyClause { clause: usize },
    #[error("hyperedge {edge} has {size} vertices, at most {max} allowed")]
    EdgeTooLarge { edge: usize, size: usize, max: usize },
}
