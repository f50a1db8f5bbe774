//! The common per-edge query interface.

use crate::error::LcaError;
use crate::graph::{AdjacencyOracle, ProbeCounts, Vertex};
use crate::k2::{BaswanaSenLca, K2};
use crate::spanner3::Spanner3;
use crate::spanner5::Spanner5;
use crate::tape::AlgParams;
use std::fmt;
use std::str::FromStr;

/// Answer to one edge query.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct QueryOutcome {
    /// Whether the edge belongs to the spanner.
    pub keep: bool,
    pub probes: ProbeCounts,
    /// The answer came from a clustering-failure fallback.
    pub failure: bool,
}

/// A local computation algorithm answering spanner membership per edge.
pub trait EdgeLca: Sync {
    fn query(&self, u: Vertex, v: Vertex) -> Result<QueryOutcome, LcaError>;
}

/// The constructions selectable from the command line.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Algo {
    Three,
    Five,
    K2,
    BaswanaSen,
}

impl Algo {
    pub const ALL: [Algo; 4] = [Algo::Three, Algo::Five, Algo::K2, Algo::BaswanaSen];

    /// The guaranteed stretch, where it does not depend on measured constants.
    pub fn stretch_bound(self, k: usize) -> Option<u32> {
        match self {
            Algo::Three => Some(3),
            Algo::Five => Some(5),
            Algo::BaswanaSen => Some(2 * k as u32 - 1),
            Algo::K2 => None,
        }
    }

    pub fn uses_k(self) -> bool {
        matches!(self, Algo::K2 | Algo::BaswanaSen)
    }

    /// Builds the LCA context over `graph` with shared caching.
    pub fn instantiate<'g, G: AdjacencyOracle + ?Sized>(
        self,
        graph: &'g G,
        params: &AlgParams,
        seed: u64,
    ) -> Result<Box<dyn EdgeLca + 'g>, LcaError> {
        Ok(match self {
            Algo::Three => Box::new(Spanner3::new(graph, params, seed)?),
            Algo::Five => Box::new(Spanner5::new(graph, params, seed)?),
            Algo::K2 => Box::new(K2::new(graph, params, seed)?),
            Algo::BaswanaSen => Box::new(BaswanaSenLca::new(graph, params, seed)?),
        })
    }
}

impl fmt::Display for Algo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Algo::Three => "3",
            Algo::Five => "5",
            Algo::K2 => "k2",
            Algo::BaswanaSen => "bs",
        })
    }
}

impl FromStr for Algo {
    type Err = LcaError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "3" => Ok(Algo::Three),
            "5" => Ok(Algo::Five),
            "k2" => Ok(Algo::K2),
            "bs" => Ok(Algo::BaswanaSen),
            other => Err(LcaError::InvalidParams(format!("unknown algorithm `{other}` (expected 3, 5, k2 or bs)"))),
        }
    }
}
