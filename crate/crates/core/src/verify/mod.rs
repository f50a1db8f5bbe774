//! Global reference builds and the checkers that turn guarantees into assertions.
//!
//! The references recompute each spanner over the whole graph from the same
//! random tape as the local algorithms, so a full scan of local answers can
//! be compared edge for edge.

mod clusters;
mod reference3;
mod reference_k2;

pub use crate::spanner5::{build_spanner5_global, Structure5};
pub use clusters::{check_cluster_invariants, cluster_report, ClusterReport};
pub use reference3::{replay_spanner3, Replay3};
pub use reference_k2::{baswana_sen_reference, build_k2_global, StructureK2};

use crate::error::LcaError;
use crate::graph::{EdgeKey, GraphView, ProbeLedger, Vertex};
use crate::k2::K2;
use crate::lca::{Algo, EdgeLca};
use crate::spanner3::Spanner3;
use crate::spanner5::Spanner5;
use crate::tape::{AlgParams, RandomTape};
use crate::par::{self, Execution};
use rustc_hash::FxHashMap;
use std::collections::{BTreeSet, VecDeque};

/// `κ′` in the k2 stretch guard `max stretch ≤ κ′·k²`, pinned on the test corpus.
/// Runs with few centers and a small `L` reach 10 at k = 3.
pub const K2_STRETCH_KAPPA: usize = 2;

/// Result of querying every edge once.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BuildOutcome {
    /// Kept edges in rank order.
    pub edges: Vec<EdgeKey>,
    pub ledger: ProbeLedger,
    /// Queries answered by a clustering-failure fallback.
    pub failures: usize,
}

/// Queries every edge of `graph` and collects the YES answers.
pub fn build_spanner<L: EdgeLca + ?Sized>(lca: &L, graph: &GraphView, exec: Execution) -> Result<BuildOutcome, LcaError> {
    let all = graph.sorted_edges();
    let answers = par::try_map(exec, &all, |e| lca.query(e.lo(), e.hi()))?;
    let mut out = BuildOutcome { edges: Vec::new(), ledger: ProbeLedger::default(), failures: 0 };
    for (e, a) in all.iter().zip(answers) {
        out.ledger.record(a.probes);
        out.failures += usize::from(a.failure);
        if a.keep {
            out.edges.push(*e);
        }
    }
    Ok(out)
}

/// Spanner of `algo` computed by its global reference, with the number of fallback edges.
pub fn reference_edges(algo: Algo, graph: &GraphView, params: &AlgParams, seed: u64) -> Result<(Vec<EdgeKey>, usize), LcaError> {
    Ok(match algo {
        Algo::Three => {
            let r = replay_spanner3(graph, &Spanner3::new(graph, params, seed)?);
            (r.edges, r.failures)
        }
        Algo::Five => {
            let ctx = Spanner5::new(graph, params, seed)?;
            let s = build_spanner5_global(graph, &ctx);
            let failed: std::collections::BTreeSet<Vertex> = s.failures.iter().copied().collect();
            let light = |v: Vertex| graph.degree(v) <= ctx.cut_lo();
            let fallback = graph
                .edges()
                .filter(|e| !light(e.lo()) && !light(e.hi()))
                .filter(|e| failed.contains(&e.lo()) || failed.contains(&e.hi()))
                .count();
            (s.edges, fallback)
        }
        Algo::K2 => {
            let s = build_k2_global(graph, &K2::new(graph, params, seed)?);
            (s.edges, s.failures)
        }
        Algo::BaswanaSen => {
            let k = params.resolved(graph.n())?.k;
            let prob = (graph.n().max(1) as f64).powf(-1.0 / k as f64);
            let labels = components(graph.n(), graph.edges());
            let mut pieces: std::collections::BTreeMap<Vertex, Vec<EdgeKey>> = Default::default();
            for e in graph.sorted_edges() {
                pieces.entry(labels[e.lo()]).or_default().push(e);
            }
            let tape = RandomTape::new(seed);
            let mut edges: Vec<EdgeKey> = pieces.values().flat_map(|p| baswana_sen_reference(p, k, prob, &tape)).collect();
            edges.sort_unstable();
            (edges, 0)
        }
    })
}

/// Stretch of the removed edges of a spanner.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StretchReport {
    pub removed: usize,
    /// Largest spanner distance between endpoints of a removed edge; `None`
    /// when some pair is farther apart than the search limit. 1 when nothing
    /// was removed.
    pub max_stretch: Option<usize>,
    /// Up to ten removed edges with the largest distances.
    pub worst: Vec<(EdgeKey, Option<usize>)>,
    pub bound: usize,
    pub pass: bool,
    pub clustering_failures: usize,
}

/// BFS distance from `from` to `to`, giving up past `limit`.
pub fn bounded_distance(g: &GraphView, from: Vertex, to: Vertex, limit: usize) -> Option<usize> {
    if from == to {
        return Some(0);
    }
    let mut dist: FxHashMap<Vertex, usize> = FxHashMap::default();
    dist.insert(from, 0);
    let mut queue = VecDeque::from([from]);
    while let Some(x) = queue.pop_front() {
        let d = dist[&x];
        if d == limit {
            break;
        }
        for y in g.neighbors(x) {
            if y == to {
                return Some(d + 1);
            }
            if let std::collections::hash_map::Entry::Vacant(slot) = dist.entry(y) {
                slot.insert(d + 1);
                queue.push_back(y);
            }
        }
    }
    None
}

/// Checks every removed edge against `bound`, searching up to `bound` hops.
pub fn check_stretch(graph: &GraphView, spanner: &[EdgeKey], bound: usize, exec: Execution) -> StretchReport {
    check_stretch_with_limit(graph, spanner, bound, bound, exec)
}

/// Like [`check_stretch`], searching up to `limit` hops so stretches beyond the bound are still measured.
pub fn check_stretch_with_limit(
    graph: &GraphView,
    spanner: &[EdgeKey],
    bound: usize,
    limit: usize,
    exec: Execution,
) -> StretchReport {
    let h = graph.with_edges(spanner);
    let kept: BTreeSet<EdgeKey> = spanner.iter().copied().collect();
    let removed: Vec<EdgeKey> = graph.edges().filter(|e| !kept.contains(e)).collect();
    let dists = par::map(exec, &removed, |e| bounded_distance(&h, e.lo(), e.hi(), limit.max(bound)));
    let mut worst: Vec<(EdgeKey, Option<usize>)> = removed.iter().copied().zip(dists.iter().copied()).collect();
    // `None` (unreachable within the limit) sorts as the worst.
    worst.sort_by_key(|&(e, d)| (std::cmp::Reverse(d.map_or(usize::MAX, |d| d)), e));
    worst.truncate(10);
    let max_stretch = if removed.is_empty() {
        Some(1)
    } else if dists.iter().any(Option::is_none) {
        None
    } else {
        dists.iter().flatten().copied().max()
    };
    StretchReport {
        removed: removed.len(),
        max_stretch,
        worst,
        bound,
        pass: max_stretch.is_some_and(|s| s <= bound),
        clustering_failures: 0,
    }
}

struct Dsu {
    parent: Vec<usize>,
}

impl Dsu {
    fn new(n: usize) -> Self {
        Self { parent: (0..n).collect() }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (a, b) = (self.find(a), self.find(b));
        if a != b {
            self.parent[a.max(b)] = a.min(b);
        }
    }
}

/// Component label (minimum vertex) of every vertex under `edges`.
pub fn components(n: usize, edges: impl IntoIterator<Item = EdgeKey>) -> Vec<Vertex> {
    let mut dsu = Dsu::new(n);
    for e in edges {
        dsu.union(e.lo(), e.hi());
    }
    (0..n).map(|v| dsu.find(v)).collect()
}

/// Whether `spanner ⊆ E` has the same connected components as `graph`.
pub fn check_connectivity(graph: &GraphView, spanner: &[EdgeKey]) -> bool {
    let labels = components(graph.n(), spanner.iter().copied());
    graph.edges().all(|e| labels[e.lo()] == labels[e.hi()])
}

/// `G` and a spanner with each Voronoi cell contracted to one vertex.
#[derive(Clone, Debug)]
pub struct ContractedViews {
    /// Cell centers; contracted vertex `i` is the cell of `cells[i]`.
    pub cells: Vec<Vertex>,
    pub full: GraphView,
    pub sparse: GraphView,
}

/// Contracts cells given by `center_of` (`None` for unassigned vertices, which are dropped).
pub fn contract_voronoi(graph: &GraphView, center_of: &[Option<Vertex>], spanner: &[EdgeKey]) -> ContractedViews {
    let cells: Vec<Vertex> = center_of.iter().flatten().copied().collect::<BTreeSet<_>>().into_iter().collect();
    let index: FxHashMap<Vertex, usize> = cells.iter().enumerate().map(|(i, &c)| (c, i)).collect();
    let contract = |edges: &mut dyn Iterator<Item = EdgeKey>| {
        let pairs: BTreeSet<(usize, usize)> = edges
            .filter_map(|e| {
                let a = index[&center_of[e.lo()]?];
                let b = index[&center_of[e.hi()]?];
                (a != b).then(|| (a.min(b), a.max(b)))
            })
            .collect();
        let pairs: Vec<(usize, usize)> = pairs.into_iter().collect();
        GraphView::from_edges(cells.len(), &pairs).expect("contracted pairs are simple")
    };
    let full = contract(&mut graph.edges());
    let sparse = contract(&mut spanner.iter().copied());
    ContractedViews { cells, full, sparse }
}

#[cfg(test)]
mod tests;
