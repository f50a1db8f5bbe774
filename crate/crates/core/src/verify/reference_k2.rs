//! Whole-graph simulation of the `O(k²)` construction.

use crate::graph::{AdjacencyOracle, EdgeKey, GraphView, Vertex};
use crate::k2::{AuxNode, ClusterDescriptor, ClusterKind, K2};
use crate::tape::{ceil_log2, RandomTape};
use rustc_hash::{FxHashMap, FxHashSet};
use std::collections::{BTreeMap, VecDeque};

/// Global clustering, boundaries and the resulting spanner.
#[derive(Clone, Debug)]
pub struct StructureK2 {
    pub remote: Vec<bool>,
    /// `(center, distance)` of non-remote vertices reachable from a center.
    pub voronoi: Vec<Option<(Vertex, usize)>>,
    pub parent: Vec<Option<Vertex>>,
    /// Exact `|T(v)|` for assigned vertices, 0 otherwise.
    pub subtree_size: Vec<usize>,
    pub clusters: Vec<ClusterDescriptor>,
    /// Index into `clusters` for every assigned vertex.
    pub cluster_of: Vec<Option<usize>>,
    /// Edges with a remote endpoint.
    pub h_edges: Vec<EdgeKey>,
    /// Edges kept by Baswana–Sen on the components of `H`.
    pub bs_edges: Vec<EdgeKey>,
    /// Edges kept because an endpoint has no center.
    pub failures: usize,
    /// Spanner edges in rank order.
    pub edges: Vec<EdgeKey>,
}

struct ClusterBoundary {
    cell_min: BTreeMap<Vertex, EdgeKey>,
    engage: Option<(EdgeKey, Vertex)>,
}

/// Simulates every step for all vertices at once, with the tape and parameters of `ctx`.
pub fn build_k2_global<G: AdjacencyOracle + ?Sized>(graph: &GraphView, ctx: &K2<'_, G>) -> StructureK2 {
    let n = graph.n();
    let (k, l) = (ctx.k(), ctx.l());

    let remote: Vec<bool> = (0..n).map(|v| ball_size(graph, v, k) < l).collect();

    // Multi-source BFS over non-remote vertices, layer by layer; the smaller center wins ties.
    let mut voronoi: Vec<Option<(Vertex, usize)>> = vec![None; n];
    let mut layer: Vec<Vertex> = ctx.centers().filter(|&c| !remote[c]).collect();
    for &c in &layer {
        voronoi[c] = Some((c, 0));
    }
    let mut d = 0;
    while !layer.is_empty() {
        let mut next: BTreeMap<Vertex, Vertex> = BTreeMap::new();
        for &x in &layer {
            let cx = voronoi[x].expect("layer vertices are assigned").0;
            for y in graph.neighbors(x) {
                if !remote[y] && voronoi[y].is_none() {
                    next.entry(y).and_modify(|c| *c = (*c).min(cx)).or_insert(cx);
                }
            }
        }
        d += 1;
        for (&y, &c) in &next {
            voronoi[y] = Some((c, d));
        }
        layer = next.into_keys().collect();
    }

    let parent: Vec<Option<Vertex>> = (0..n)
        .map(|v| {
            let (c, d) = voronoi[v]?;
            if d == 0 {
                return Some(v);
            }
            graph.neighbors(v).filter(|&y| voronoi[y] == Some((c, d - 1))).min()
        })
        .collect();
    let mut children: Vec<Vec<Vertex>> = vec![Vec::new(); n];
    for v in 0..n {
        if let Some(p) = parent[v].filter(|&p| p != v) {
            children[p].push(v);
        }
    }

    let mut by_depth: Vec<Vertex> = (0..n).filter(|&v| voronoi[v].is_some()).collect();
    by_depth.sort_by_key(|&v| std::cmp::Reverse(voronoi[v].expect("filtered").1));
    let mut subtree_size = vec![0usize; n];
    for &v in &by_depth {
        subtree_size[v] = 1 + children[v].iter().map(|&c| subtree_size[c]).sum::<usize>();
    }
    let heavy = |v: Vertex| subtree_size[v] > l;

    let subtree_members = |root: Vertex| {
        let mut out = vec![root];
        let mut i = 0;
        while i < out.len() {
            out.extend(children[out[i]].iter().copied());
            i += 1;
        }
        out
    };

    let mut clusters: Vec<ClusterDescriptor> = Vec::new();
    for c in ctx.centers().filter(|&c| voronoi[c] == Some((c, 0))) {
        if !heavy(c) {
            let mut members = subtree_members(c);
            members.sort_unstable();
            clusters.push(ClusterDescriptor { kind: ClusterKind::WholeCell, center: c, members, anchor: None });
            continue;
        }
        for r in subtree_members(c).into_iter().filter(|&r| heavy(r)) {
            clusters.push(ClusterDescriptor { kind: ClusterKind::Singleton, center: c, members: vec![r], anchor: None });
            let list: Vec<Vertex> = graph.neighbors(r).collect();
            let depth = ceil_log2(list.len().max(1));
            // Weight of each leaf: subtree size of a light child, infinite for a heavy one, 0 otherwise.
            let weight: Vec<Option<usize>> = list
                .iter()
                .map(|&y| {
                    if parent[y] != Some(r) || y == r || voronoi[y].map(|a| a.0) != Some(c) {
                        Some(0)
                    } else if heavy(y) {
                        None
                    } else {
                        Some(subtree_size[y])
                    }
                })
                .collect();
            let mut stack = vec![(0usize, 0usize)];
            while let Some((level, offset)) = stack.pop() {
                let node = AuxNode { root: r, depth, level, offset };
                let range = node.leaf_range(list.len());
                let total = weight[range.clone()].iter().try_fold(0usize, |acc, w| w.map(|w| acc + w));
                match total {
                    Some(w) if w <= l => {
                        let mut members: Vec<Vertex> = range
                            .filter(|&j| weight[j].is_some_and(|w| w > 0))
                            .flat_map(|j| subtree_members(list[j]))
                            .collect();
                        if !members.is_empty() {
                            members.sort_unstable();
                            clusters.push(ClusterDescriptor {
                                kind: ClusterKind::SubtreeGroup,
                                center: c,
                                members,
                                anchor: Some(node),
                            });
                        }
                    }
                    _ if level < depth => {
                        stack.push((level + 1, 2 * offset + 1));
                        stack.push((level + 1, 2 * offset));
                    }
                    _ => {}
                }
            }
        }
    }
    let mut cluster_of = vec![None; n];
    for (i, a) in clusters.iter().enumerate() {
        for &v in &a.members {
            cluster_of[v] = Some(i);
        }
    }

    let cell = |v: Vertex| voronoi[v].map(|a| a.0);
    let boundaries: Vec<ClusterBoundary> = clusters
        .iter()
        .map(|a| {
            let mut b = ClusterBoundary { cell_min: BTreeMap::new(), engage: None };
            for &x in &a.members {
                for y in graph.neighbors(x) {
                    let Some(cy) = cell(y).filter(|&cy| cy != a.center) else { continue };
                    let e = EdgeKey::new(x, y);
                    let slot = b.cell_min.entry(cy).or_insert(e);
                    *slot = (*slot).min(e);
                    if ctx.is_marked(cy) && b.engage.is_none_or(|(m, _)| e < m) {
                        b.engage = Some((e, y));
                    }
                }
            }
            b
        })
        .collect();

    // Minimum edge between every adjacent pair of clusters.
    let mut pair_min: FxHashMap<(usize, usize), EdgeKey> = FxHashMap::default();
    for e in graph.edges() {
        if let (Some(a), Some(b)) = (cluster_of[e.lo()], cluster_of[e.hi()]) {
            let slot = pair_min.entry((a.min(b), a.max(b))).or_insert(e);
            *slot = (*slot).min(e);
        }
    }

    let rank = |c: Vertex| ctx.cell_rank(c);
    let keep_between = |a: usize, b: usize, e: EdgeKey| {
        let (ca, cb) = (clusters[a].center, clusters[b].center);
        if ctx.is_marked(ca) && pair_min[&(a.min(b), a.max(b))] == e {
            return true;
        }
        if boundaries[a].cell_min.get(&cb) != Some(&e) {
            return false;
        }
        if boundaries[a].engage.is_none() {
            return true;
        }
        if ctx.is_marked(cb) {
            return false;
        }
        let Some((_, far)) = boundaries[b].engage else { return false };
        let engaged = cluster_of[far].expect("marked neighbors are clustered");
        let lower = boundaries[a]
            .cell_min
            .keys()
            .filter(|x| boundaries[engaged].cell_min.contains_key(x))
            .filter(|&&x| rank(x) < rank(cb))
            .count();
        lower < ctx.threshold()
    };

    let mut edges = Vec::new();
    let mut h_edges = Vec::new();
    let mut failures = 0;
    for e in graph.sorted_edges() {
        let (u, v) = e.endpoints();
        if remote[u] || remote[v] {
            h_edges.push(e);
            continue;
        }
        let keep = match (voronoi[u], voronoi[v]) {
            (Some((cu, _)), Some((cv, _))) if cu == cv => parent[u] == Some(v) || parent[v] == Some(u),
            (Some(_), Some(_)) => {
                let (a, b) = (cluster_of[u].expect("assigned"), cluster_of[v].expect("assigned"));
                keep_between(a, b, e) || keep_between(b, a, e)
            }
            _ => {
                failures += 1;
                true
            }
        };
        if keep {
            edges.push(e);
        }
    }

    let labels = super::components(n, h_edges.iter().copied());
    let mut pieces: BTreeMap<Vertex, Vec<EdgeKey>> = BTreeMap::new();
    for &e in &h_edges {
        pieces.entry(labels[e.lo()]).or_default().push(e);
    }
    let mut bs_edges: Vec<EdgeKey> = pieces
        .values()
        .flat_map(|piece| baswana_sen_reference(piece, k, ctx.bs_probability(), ctx.tape()))
        .collect();
    bs_edges.sort_unstable();
    edges.extend(&bs_edges);
    edges.sort_unstable();

    StructureK2 { remote, voronoi, parent, subtree_size, clusters, cluster_of, h_edges, bs_edges, failures, edges }
}

/// `|Γ_k(v)|` by a full BFS to depth `k`.
fn ball_size(graph: &GraphView, v: Vertex, k: usize) -> usize {
    let mut dist: FxHashMap<Vertex, usize> = FxHashMap::default();
    dist.insert(v, 0);
    let mut queue = VecDeque::from([v]);
    while let Some(x) = queue.pop_front() {
        if dist[&x] == k {
            continue;
        }
        let d = dist[&x] + 1;
        for y in graph.neighbors(x) {
            dist.entry(y).or_insert_with(|| {
                queue.push_back(y);
                d
            });
        }
    }
    dist.len()
}

/// Baswana–Sen on an edge list, written over dense local indices.
pub fn baswana_sen_reference(edges: &[EdgeKey], k: usize, prob: f64, tape: &RandomTape) -> Vec<EdgeKey> {
    let mut ids: Vec<Vertex> = edges.iter().flat_map(|e| [e.lo(), e.hi()]).collect();
    ids.sort_unstable();
    ids.dedup();
    if k <= 1 {
        let mut all = edges.to_vec();
        all.sort_unstable();
        return all;
    }
    let idx = |v: Vertex| ids.binary_search(&v).expect("endpoint is listed");
    let mut cluster: Vec<Option<Vertex>> = ids.iter().map(|&v| Some(v)).collect();
    let mut alive: Vec<(usize, usize)> = edges.iter().map(|e| (idx(e.lo()), idx(e.hi()))).collect();
    let mut kept: FxHashSet<EdgeKey> = FxHashSet::default();
    let key = |a: usize, b: usize| EdgeKey::new(ids[a], ids[b]);

    for round in 1..k {
        let is_sampled = |c: Vertex| tape.unit("bs", &[round as u64, c as u64]) < prob;
        let mut incident: Vec<Vec<usize>> = vec![Vec::new(); ids.len()];
        for &(a, b) in &alive {
            incident[a].push(b);
            incident[b].push(a);
        }
        let mut next = cluster.clone();
        let mut dead: FxHashSet<EdgeKey> = FxHashSet::default();
        for v in 0..ids.len() {
            let Some(cv) = cluster[v] else { continue };
            if is_sampled(cv) {
                continue;
            }
            let to_sampled = incident[v]
                .iter()
                .filter(|&&w| cluster[w].is_some_and(is_sampled))
                .map(|&w| key(v, w))
                .min();
            if let Some(e) = to_sampled {
                let target = cluster[idx(e.other(ids[v]))];
                kept.insert(e);
                next[v] = target;
                dead.extend(incident[v].iter().filter(|&&w| cluster[w] == target).map(|&w| key(v, w)));
            } else {
                let mut best: FxHashMap<Vertex, EdgeKey> = FxHashMap::default();
                for &w in &incident[v] {
                    let e = key(v, w);
                    let slot = best.entry(cluster[w].expect("alive edges join clustered vertices")).or_insert(e);
                    *slot = (*slot).min(e);
                }
                kept.extend(best.into_values());
                next[v] = None;
                dead.extend(incident[v].iter().map(|&w| key(v, w)));
            }
        }
        cluster = next;
        alive.retain(|&(a, b)| {
            !dead.contains(&key(a, b)) && cluster[a].is_some() && cluster[b].is_some() && cluster[a] != cluster[b]
        });
    }

    let mut best: FxHashMap<(usize, Vertex), EdgeKey> = FxHashMap::default();
    for &(a, b) in &alive {
        let e = key(a, b);
        for (x, y) in [(a, b), (b, a)] {
            let slot = best.entry((x, cluster[y].expect("alive"))).or_insert(e);
            *slot = (*slot).min(e);
        }
    }
    kept.extend(best.into_values());
    let mut out: Vec<EdgeKey> = kept.into_iter().collect();
    out.sort_unstable();
    out
}
