//! Whole-graph construction the local queries are consistent with.

use super::{Spanner5, VertexRole};
use crate::graph::{AdjacencyOracle, EdgeKey, GraphView, Vertex};
use crate::tape::{bucket_of, vertex_sample};
use rustc_hash::{FxHashMap, FxHashSet};
use std::collections::BTreeMap;

/// Global clustering and the resulting spanner.
#[derive(Clone, Debug)]
pub struct Structure5 {
    pub roles: Vec<VertexRole>,
    /// `S1_c ∩ N(v)` for heavy `v`, empty otherwise.
    pub heavy_centers: Vec<Vec<Vertex>>,
    /// `S2_c ∩ N(v)` for bad `v`, empty otherwise.
    pub light_centers: Vec<Vec<Vertex>>,
    /// Light clusters keyed by `(center, class)`, members in `N(center)` order.
    pub light_clusters: BTreeMap<(Vertex, usize), Vec<Vertex>>,
    /// Vertices whose clustering failed; all their edges are kept.
    pub failures: Vec<Vertex>,
    /// Spanner edges in rank order.
    pub edges: Vec<EdgeKey>,
}

impl Structure5 {
    /// Heavy clusters `(center, class)` containing `v`.
    pub fn heavy_clusters_of(&self, ctx: &Spanner5<'_, impl AdjacencyOracle + ?Sized>, graph: &GraphView, v: Vertex) -> Vec<(Vertex, usize)> {
        let owner = match self.roles[v] {
            VertexRole::Heavy => v,
            VertexRole::Medium { rep } => rep,
            VertexRole::Light | VertexRole::Bad => return Vec::new(),
        };
        let c = ctx.heavy_class(graph.degree(owner));
        self.heavy_centers[owner].iter().map(|&s| (s, c)).collect()
    }
}

/// Builds the spanner over the whole graph with the same tape as `ctx`.
pub fn build_spanner5_global<G: AdjacencyOracle + ?Sized>(graph: &GraphView, ctx: &Spanner5<'_, G>) -> Structure5 {
    let n = graph.n();
    let deg: Vec<usize> = (0..n).map(|v| graph.degree(v)).collect();

    let roles: Vec<VertexRole> = (0..n)
        .map(|v| {
            ctx.role_by_degree(deg[v]).unwrap_or_else(|| {
                let rep = vertex_sample(v, deg[v], ctx.rep_sample_size(), ctx.tape(), "R")
                    .into_iter()
                    .filter_map(|i| graph.neighbor(v, i))
                    .filter(|&w| deg[w] >= ctx.cut_hi())
                    .min();
                rep.map_or(VertexRole::Bad, |rep| VertexRole::Medium { rep })
            })
        })
        .collect();

    let centers_among = |v: Vertex, family: &crate::tape::CenterFamily, c: usize| {
        let mut set: Vec<Vertex> = graph.neighbors(v).filter(|&w| family.contains(c, w)).collect();
        set.sort_unstable();
        set
    };
    let heavy_centers: Vec<Vec<Vertex>> = (0..n)
        .map(|v| match roles[v] {
            VertexRole::Heavy => centers_among(v, ctx.heavy_family(), ctx.heavy_class(deg[v])),
            _ => Vec::new(),
        })
        .collect();
    let light_centers: Vec<Vec<Vertex>> = (0..n)
        .map(|v| match roles[v] {
            VertexRole::Bad => centers_among(v, ctx.light_family(), ctx.light_class(deg[v])),
            _ => Vec::new(),
        })
        .collect();

    let failures: Vec<Vertex> = (0..n)
        .filter(|&v| match roles[v] {
            VertexRole::Heavy => heavy_centers[v].is_empty(),
            VertexRole::Medium { rep } => heavy_centers[rep].is_empty(),
            VertexRole::Bad => light_centers[v].is_empty(),
            VertexRole::Light => false,
        })
        .collect();

    let mut kept: FxHashSet<EdgeKey> = FxHashSet::default();
    let keep_all = |v: Vertex, kept: &mut FxHashSet<EdgeKey>| {
        kept.extend(graph.neighbors(v).map(|w| EdgeKey::new(v, w)));
    };
    for v in 0..n {
        if roles[v] == VertexRole::Light {
            keep_all(v, &mut kept);
        }
    }
    for &v in &failures {
        keep_all(v, &mut kept);
    }
    for v in 0..n {
        match roles[v] {
            VertexRole::Heavy => kept.extend(heavy_centers[v].iter().map(|&s| EdgeKey::new(v, s))),
            VertexRole::Medium { rep } => {
                kept.insert(EdgeKey::new(v, rep));
            }
            VertexRole::Bad => kept.extend(light_centers[v].iter().map(|&s| EdgeKey::new(v, s))),
            VertexRole::Light => {}
        }
    }

    // First allowed member of each heavy cluster within each bucket of N(x).
    let clusters_of = |w: Vertex| -> (&[Vertex], usize) {
        match roles[w] {
            VertexRole::Heavy => (&heavy_centers[w], ctx.heavy_class(deg[w])),
            VertexRole::Medium { rep } => (&heavy_centers[rep], ctx.heavy_class(deg[rep])),
            _ => (&[], 0),
        }
    };
    for x in 0..n {
        let mut first: FxHashMap<(Vertex, usize, usize), usize> = FxHashMap::default();
        for (j0, w) in graph.neighbors(x).enumerate() {
            let j = j0 + 1;
            if !ctx.allowed(x, deg[x], w, deg[w]) {
                continue;
            }
            let (centers, c) = clusters_of(w);
            for &s in centers {
                first.entry((s, c, bucket_of(j, ctx.cut_hi()))).or_insert(j);
            }
        }
        for j in first.into_values() {
            let w = graph.neighbor(x, j).expect("recorded index is valid");
            kept.insert(EdgeKey::new(x, w));
        }
    }

    // Light clusters, their blocks, and the minimum edge between each pair of blocks.
    let mut light_clusters: BTreeMap<(Vertex, usize), Vec<Vertex>> = BTreeMap::new();
    for v in 0..n {
        if roles[v] != VertexRole::Bad {
            continue;
        }
        let c = ctx.light_class(deg[v]);
        for &s in &light_centers[v] {
            light_clusters.entry((s, c)).or_default();
        }
    }
    let mut blocks_of: Vec<Vec<(Vertex, usize, usize)>> = vec![Vec::new(); n];
    for (&(s, c), members) in light_clusters.iter_mut() {
        members.extend(
            graph.neighbors(s).filter(|&w| roles[w] == VertexRole::Bad && ctx.light_class(deg[w]) == c),
        );
        for (rank, &w) in members.iter().enumerate() {
            blocks_of[w].push((s, c, rank / ctx.block()));
        }
    }
    let mut best: FxHashMap<((Vertex, usize, usize), (Vertex, usize, usize)), EdgeKey> = FxHashMap::default();
    for e in graph.edges() {
        let (a, b) = e.endpoints();
        if roles[a] != VertexRole::Bad || roles[b] != VertexRole::Bad {
            continue;
        }
        for &ka in &blocks_of[a] {
            for &kb in &blocks_of[b] {
                if (ka.0, ka.1) == (kb.0, kb.1) {
                    continue;
                }
                let key = if ka <= kb { (ka, kb) } else { (kb, ka) };
                best.entry(key).and_modify(|m| *m = (*m).min(e)).or_insert(e);
            }
        }
    }
    kept.extend(best.into_values());

    let mut edges: Vec<EdgeKey> = kept.into_iter().collect();
    edges.sort_unstable();
    Structure5 { roles, heavy_centers, light_centers, light_clusters, failures, edges }
}
