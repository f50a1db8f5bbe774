//! Local computation algorithms (LCAs) for sparse graph spanners.
//!
//! Every LCA answers "is this edge in the spanner?" by talking to a
//! [`graph::AdjacencyOracle`] through a [`graph::Probe`] that counts degree,
//! neighbor and adjacency probes. Answers are pure functions of the edge and
//! a seed, so scanning all edges reproduces one fixed spanner.
//!
//! Three constructions are provided:
//! - [`spanner3`]: stretch 3, about `n^{1/2}` probes per query;
//! - [`spanner5`]: stretch 5, about `n^{2/3}` probes per query, plus the
//!   global construction it is consistent with;
//! - [`k2`]: stretch `O(k^2)` for bounded-degree graphs, with a
//!   Baswana–Sen fallback for vertices with small neighborhoods.
//!
//! [`verify`] holds global reference builds and metric checkers, and
//! [`experiment`] turns full scans and sampled sweeps into CSV rows.

pub mod error;
pub mod experiment;
pub mod graph;
pub mod k2;
pub mod lca;
pub mod memo;
pub use memo::CacheMode;
pub mod par;
pub mod spanner3;
pub mod spanner5;
pub mod tape;
pub mod verify;

pub use error::{ExperimentError, GraphError, LcaError, ParseError};
pub use graph::{AdjacencyOracle, EdgeKey, GraphView, Probe, ProbeCounts, ProbeLedger, Vertex};
pub use lca::{Algo, EdgeLca, QueryOutcome};
pub use tape::{AlgParams, RandomTape};
