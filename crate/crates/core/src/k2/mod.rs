//! `O(k²)`-spanner LCA for bounded-degree graphs.
//!
//! Vertices whose `k`-hop neighborhood has fewer than `L` vertices are
//! remote and handled by a simulated Baswana–Sen run on their component of
//! `H` (edges with a remote endpoint). The rest of the graph is split into
//! Voronoi cells around random centers, cells into clusters of at most `L`
//! vertices, and edges between clusters are kept by three connection rules
//! built on random cell marks and cell ranks.

mod bs;
mod cluster;
mod edges;
mod voronoi;

pub use bs::{baswana_sen, BaswanaSenLca};
pub use cluster::{AuxNode, ClusterDescriptor, ClusterId, ClusterKind};
pub use edges::{EngagementRecord, VerdictK2};
pub use voronoi::VoronoiAssignment;

use crate::error::LcaError;
use crate::graph::{AdjacencyOracle, EdgeKey, Vertex};
use crate::lca::{EdgeLca, QueryOutcome};
use crate::memo::{CacheMode, MemoTable, Session, Store};
use crate::tape::{cell_rank, is_marked, log2n, scaled, AlgParams, CenterFamily, RandomTape};
use cluster::Subtree;
use edges::Boundary;
use std::sync::Arc;

#[derive(Default)]
struct Tables {
    remote: MemoTable<bool>,
    center: MemoTable<Option<(u32, u32)>>,
    parent: MemoTable<u32>,
    subtree: MemoTable<Arc<Subtree>>,
    cluster: MemoTable<Option<Arc<ClusterDescriptor>>>,
    boundary: MemoTable<Arc<Boundary>>,
    bs: MemoTable<Arc<[EdgeKey]>>,
}

type Sess<'a, G> = Session<'a, G, Tables>;

const TAG_REMOTE: u8 = 0;
const TAG_CENTER: u8 = 1;
const TAG_PARENT: u8 = 2;
const TAG_SUBTREE: u8 = 3;
const TAG_CLUSTER: u8 = 4;
const TAG_BOUNDARY: u8 = 5;
const TAG_BS: u8 = 6;

/// Context of the `O(k²)` construction: centers, marks, ranks and parameters.
pub struct K2<'g, G: ?Sized> {
    graph: &'g G,
    n: usize,
    k: usize,
    l: usize,
    centers: CenterFamily,
    marked: Option<Vec<u32>>,
    p_mark: f64,
    threshold: usize,
    bs_prob: f64,
    tape: RandomTape,
    strict: bool,
    mode: CacheMode,
    tables: Store<Tables>,
}

impl<'g, G: AdjacencyOracle + ?Sized> K2<'g, G> {
    /// `|S| = ⌈c_centers · n^{2/3} log₂ n⌉`, `L = ⌈c_L · n^{1/3} log₂ n⌉`.
    pub fn new(graph: &'g G, params: &AlgParams, seed: u64) -> Result<Self, LcaError> {
        let n = graph.vertex_count();
        let params = params.resolved(n)?;
        let tape = RandomTape::new(seed);
        let log = log2n(n);
        let cbrt = (n as f64).cbrt();
        let centers = CenterFamily::sample(n, scaled(params.c_centers, cbrt * cbrt * log, n), 1, &tape, "S");
        let k = params.k;
        Ok(Self {
            graph,
            n,
            k,
            l: ((params.c_l * cbrt * log).ceil() as usize).max(1),
            centers,
            marked: None,
            p_mark: params.p_mark_for(n),
            threshold: ((n as f64).powf(1.0 / k as f64) * log).ceil() as usize,
            bs_prob: (n.max(1) as f64).powf(-1.0 / k as f64),
            tape,
            strict: params.strict,
            mode: CacheMode::Shared,
            tables: Store::default(),
        })
    }

    /// Replaces the random center set, for hand-built fixtures.
    pub fn with_centers(mut self, centers: &[Vertex]) -> Self {
        self.centers = CenterFamily::explicit("S", centers);
        self.tables = Store::default();
        self
    }

    /// Marks exactly the given centers instead of flipping coins.
    pub fn with_marked(mut self, marked: &[Vertex]) -> Self {
        let mut set: Vec<u32> = marked.iter().map(|&v| v as u32).collect();
        set.sort_unstable();
        self.marked = Some(set);
        self.tables = Store::default();
        self
    }

    pub fn with_l(mut self, l: usize) -> Self {
        self.l = l.max(1);
        self.tables = Store::default();
        self
    }

    pub fn with_cache_mode(mut self, mode: CacheMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn graph(&self) -> &'g G {
        self.graph
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn tape(&self) -> &RandomTape {
        &self.tape
    }

    /// Connection threshold `⌈n^{1/k} log₂ n⌉`.
    pub fn threshold(&self) -> usize {
        self.threshold
    }

    /// Per-round cluster sampling probability `n^{-1/k}` of Baswana–Sen.
    pub fn bs_probability(&self) -> f64 {
        self.bs_prob
    }

    pub fn centers(&self) -> impl ExactSizeIterator<Item = Vertex> + '_ {
        self.centers.level(1)
    }

    pub fn is_center(&self, v: Vertex) -> bool {
        self.centers.contains(1, v)
    }

    pub fn is_marked(&self, center: Vertex) -> bool {
        match &self.marked {
            Some(set) => set.binary_search(&(center as u32)).is_ok(),
            None => is_marked(center, &self.tape, self.p_mark),
        }
    }

    pub fn cell_rank(&self, center: Vertex) -> (u64, Vertex) {
        cell_rank(center, &self.tape)
    }

    fn bs_keeps_in(&self, s: &mut Sess<'_, G>, e: EdgeKey) -> bool {
        let (u, v) = e.endpoints();
        self.bs_in(s, u).binary_search(&e).is_ok() || self.bs_in(s, v).binary_search(&e).is_ok()
    }

    fn session(&self) -> Sess<'_, G> {
        Session::new(self.graph, &self.tables, self.mode)
    }

    /// Decides `{u, v}`, routing edges with a remote endpoint to Baswana–Sen.
    pub fn query_main(&self, u: Vertex, v: Vertex) -> Result<(VerdictK2, QueryOutcome), LcaError> {
        let mut s = self.session();
        if self.strict && (u == v || s.probe.adjacency(u, v).is_none()) {
            return Err(LcaError::NotAnEdge(u, v));
        }
        let e = EdgeKey::try_new(u, v).ok_or(LcaError::NotAnEdge(u, v))?;
        let verdict = if self.remote_in(&mut s, u) || self.remote_in(&mut s, v) {
            if self.bs_keeps_in(&mut s, e) {
                VerdictK2::BaswanaSen
            } else {
                VerdictK2::Dropped
            }
        } else {
            self.query_k2_in(&mut s, u, v)
        };
        let outcome =
            QueryOutcome { keep: verdict.keep(), probes: s.probe.counts(), failure: verdict == VerdictK2::Fallback };
        Ok((verdict, outcome))
    }

    pub fn is_remote(&self, v: Vertex) -> bool {
        self.remote_in(&mut self.session(), v)
    }

    /// Nearest center of a non-remote `v`; `None` when its component has none.
    pub fn find_center(&self, v: Vertex) -> Option<VoronoiAssignment> {
        let mut s = self.session();
        let (center, dist) = self.center_in(&mut s, v)?;
        let parent = self.parent_in(&mut s, v)?;
        Some(VoronoiAssignment { vertex: v, center, dist, parent })
    }

    /// Whether `|T(v)| > L`.
    pub fn subtree_heavy(&self, v: Vertex) -> bool {
        self.subtree_in(&mut self.session(), v).is_heavy()
    }

    /// `T(v)` in BFS order when `|T(v)| ≤ L`.
    pub fn subtree_members(&self, v: Vertex) -> Option<Vec<Vertex>> {
        let t = self.subtree_in(&mut self.session(), v);
        t.members.as_ref().map(|m| m.iter().map(|&x| x as Vertex).collect())
    }

    /// The auxiliary node `z(u)` for a light child `u` of heavy `r`.
    pub fn aux_locate(&self, u: Vertex, r: Vertex) -> Option<AuxNode> {
        let mut s = self.session();
        self.aux_locate_in(&mut s, u, r).map(|(node, _)| node)
    }

    pub fn cluster_of(&self, v: Vertex) -> Option<Arc<ClusterDescriptor>> {
        self.cluster_in(&mut self.session(), v)
    }

    /// `Cen(∂A)`: centers of cells adjacent to `a`, excluding its own.
    pub fn adjacent_centers(&self, a: &ClusterDescriptor) -> Vec<Vertex> {
        self.boundary_in(&mut self.session(), a).centers.iter().map(|&c| c as Vertex).collect()
    }

    pub fn engaged_with(&self, b: &ClusterDescriptor) -> EngagementRecord {
        self.engaged_in(&mut self.session(), b)
    }

    /// Decides an edge between two non-remote vertices.
    pub fn query_k2(&self, u: Vertex, v: Vertex) -> VerdictK2 {
        self.query_k2_in(&mut self.session(), u, v)
    }

    /// Baswana–Sen answer for an edge of `H`.
    pub fn bs_query(&self, u: Vertex, v: Vertex) -> bool {
        self.bs_keeps_in(&mut self.session(), EdgeKey::new(u, v))
    }
}

impl<G: AdjacencyOracle + ?Sized> EdgeLca for K2<'_, G> {
    fn query(&self, u: Vertex, v: Vertex) -> Result<QueryOutcome, LcaError> {
        self.query_main(u, v).map(|(_, outcome)| outcome)
    }
}

#[cfg(test)]
mod tests;
