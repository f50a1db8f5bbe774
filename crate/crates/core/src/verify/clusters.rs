//! Structural checks on the Voronoi cells and clusters of the `O(k²)` construction.

use super::reference_k2::{build_k2_global, StructureK2};
use crate::graph::{AdjacencyOracle, GraphView};
use crate::k2::{ClusterKind, K2};

#[derive(Clone, Debug, PartialEq)]
pub struct ClusterReport {
    pub cells: usize,
    pub clusters: usize,
    pub singletons: usize,
    /// Largest cluster that is not a singleton.
    pub max_group: usize,
    /// `|S| + 4nk·log₂Δ / L`.
    pub count_bound: f64,
    /// Assigned vertices are exactly the non-remote vertices that can reach a center.
    pub voronoi_partition: bool,
    /// Every assigned vertex lies in exactly one cluster, inside its own cell.
    pub cluster_partition: bool,
    /// Local `find_center` and `cluster_of` agree with the global build on every vertex.
    pub local_agrees: bool,
    pub l: usize,
}

impl ClusterReport {
    pub fn pass(&self) -> bool {
        self.voronoi_partition
            && self.cluster_partition
            && self.local_agrees
            && self.max_group <= self.l
            && self.clusters as f64 <= self.count_bound
    }
}

pub fn check_cluster_invariants<G: AdjacencyOracle + ?Sized>(graph: &GraphView, ctx: &K2<'_, G>) -> ClusterReport {
    cluster_report(graph, ctx, &build_k2_global(graph, ctx))
}

/// Same as [`check_cluster_invariants`] on an existing global build.
pub fn cluster_report<G: AdjacencyOracle + ?Sized>(graph: &GraphView, ctx: &K2<'_, G>, s: &StructureK2) -> ClusterReport {
    let n = graph.n();
    let mut reach = vec![false; n];
    let mut stack: Vec<usize> = ctx.centers().filter(|&c| !s.remote[c]).collect();
    for &c in &stack {
        reach[c] = true;
    }
    while let Some(x) = stack.pop() {
        for y in graph.neighbors(x) {
            if !s.remote[y] && !reach[y] {
                reach[y] = true;
                stack.push(y);
            }
        }
    }
    let voronoi_partition = (0..n).all(|v| {
        reach[v] == s.voronoi[v].is_some() && s.voronoi[v].is_none_or(|(c, _)| s.voronoi[c] == Some((c, 0)))
    });

    let mut hits = vec![0usize; n];
    let mut in_cell = true;
    for a in &s.clusters {
        for &v in &a.members {
            hits[v] += 1;
            in_cell &= s.voronoi[v].map(|x| x.0) == Some(a.center);
        }
    }
    let cluster_partition = in_cell && (0..n).all(|v| hits[v] == usize::from(s.voronoi[v].is_some()));

    let local_agrees = (0..n).all(|v| {
        if s.remote[v] {
            return ctx.is_remote(v);
        }
        let center = ctx.find_center(v).map(|a| (a.center, a.dist));
        let cluster = ctx.cluster_of(v);
        center == s.voronoi[v] && cluster.as_deref() == s.cluster_of[v].map(|i| &s.clusters[i])
    });

    let delta = graph.max_degree().max(2) as f64;
    let centers = ctx.centers().len() as f64;
    ClusterReport {
        cells: ctx.centers().filter(|&c| s.voronoi[c] == Some((c, 0))).count(),
        clusters: s.clusters.len(),
        singletons: s.clusters.iter().filter(|a| a.kind == ClusterKind::Singleton).count(),
        max_group: s.clusters.iter().filter(|a| a.kind != ClusterKind::Singleton).map(|a| a.members.len()).max().unwrap_or(0),
        count_bound: centers + 4.0 * n as f64 * ctx.k() as f64 * delta.log2() / ctx.l() as f64,
        voronoi_partition,
        cluster_partition,
        local_agrees,
        l: ctx.l(),
    }
}
