//! Simplicial-contagion SIR dynamics on hypergraphs, cavity message passing,
//! weighted non-backtracking spectra and collective-influence seed selection.
//!
//! The crate is organised bottom-up:
//!
//! * [`hypergraph`]: hypergraph storage, adjacency/2-simplex views, directed links.
//! * [`generators`]: scale-free (Chung-Lu), Erdős-Rényi and d-uniform hypergraphs.
//! * [`dynamics`]: discrete-time Monte-Carlo SIR with 1- and 2-simplex channels.
//! * [`message_passing`]: cavity messages, the WNB operator and its leading eigenvalue.
//! * [`influence`]: collective influence, CIA and the baseline selectors.
//! * [`datasets`]: loaders for hyperedge-list and nverts/simplices files.
//! * [`experiment`]: the experiment, benchmark, spectrum and overlap pipelines.

pub mod datasets;
pub mod dynamics;
pub mod error;
pub mod experiment;
pub mod generators;
pub mod hypergraph;
pub mod influence;
pub mod message_passing;
pub mod output;
pub mod rng;

pub use error::{Error, Result};
pub use hypergraph::{
    AdjacencyView, Hypergraph, LinkIndex, NodeId, NodeRemap, SimplexOptions, TwoSimplexRule,
    TwoSimplexSet, Views,
};
