use super::*;
use crate::graph::{gen_graph, CountingOracle, GraphView, Model};
use proptest::prelude::*;
use std::collections::VecDeque;

fn params(k: usize) -> AlgParams {
    AlgParams { k, ..AlgParams::default() }
}

fn context<'g>(g: &'g GraphView, k: usize, l: usize, centers: &[Vertex]) -> K2<'g, GraphView> {
    let ctx = K2::new(g, &params(k), 1).unwrap().with_centers(centers).with_l(l);
    assert_eq!(ctx.k(), k);
    ctx
}

#[test]
fn remote_exactly_below_l() {
    // Root 0, children 1..=3, grandchildren 4..=8: 9 vertices within 2 hops; 20 sits at hop 3.
    let edges = [(0, 1), (0, 2), (0, 3), (1, 4), (1, 5), (2, 6), (2, 7), (3, 8), (8, 20)];
    let g = GraphView::from_edges(32, &edges).unwrap();
    assert!(context(&g, 2, 10, &[0]).is_remote(0));
    assert!(!context(&g, 2, 9, &[0]).is_remote(0));
    assert!(!context(&g, 3, 10, &[0]).is_remote(0));
    assert!(!context(&g, 2, 1, &[0]).is_remote(31));
    assert!(context(&g, 2, 2, &[0]).is_remote(31));
}

/// Handle 0-1-2 ending in a star with `leaves` leaves, centered at 0.
fn broom(leaves: usize) -> GraphView {
    let mut edges = vec![(0, 1), (1, 2)];
    edges.extend((3..3 + leaves).map(|v| (2, v)));
    GraphView::from_edges(16, &edges).unwrap()
}

#[test]
fn broom_subtrees_are_heavy_exactly_on_the_handle() {
    let g = broom(4);
    let ctx = context(&g, 3, 4, &[0]);
    for v in 0..7 {
        assert!(!ctx.is_remote(v), "{v}");
        assert_eq!(ctx.subtree_heavy(v), v < 3, "{v}");
    }
    assert_eq!(ctx.subtree_members(2), None);
    assert_eq!(ctx.subtree_members(5), Some(vec![5]));
    assert!(ctx.is_remote(12));
    assert_eq!(ctx.find_center(12), None);
}

#[test]
fn broom_partition_matches_hand_computation() {
    // N(2) = [1, 3, ..., 8]; leaves 0..4 of B_2 hold {1, 3, 4, 5}, leaves 4..8 hold {6, 7, 8}.
    let g = broom(6);
    let ctx = context(&g, 3, 4, &[0]);
    for v in 0..3 {
        let c = ctx.cluster_of(v).unwrap();
        assert_eq!((c.kind, c.members.clone()), (ClusterKind::Singleton, vec![v]));
    }
    let left = ctx.cluster_of(4).unwrap();
    assert_eq!(left.kind, ClusterKind::SubtreeGroup);
    assert_eq!(left.members, vec![3, 4, 5]);
    assert_eq!(left.anchor, Some(AuxNode { root: 2, depth: 3, level: 1, offset: 0 }));
    let right = ctx.cluster_of(8).unwrap();
    assert_eq!(right.members, vec![6, 7, 8]);
    assert_eq!(ctx.cluster_of(6).unwrap(), right);
    assert_eq!(ctx.aux_locate(7, 2), Some(AuxNode { root: 2, depth: 3, level: 1, offset: 1 }));

    // With exactly L leaves the whole star below the root fits in one cluster.
    let g = broom(4);
    let ctx = context(&g, 3, 4, &[0]);
    let c = ctx.cluster_of(3).unwrap();
    assert_eq!(c.members, vec![3, 4, 5, 6]);
    assert_eq!(c.anchor.map(|a| a.level), Some(0));
}

#[test]
fn aux_tree_splits_children_by_weight() {
    // Center 0 with N(0) = [1, 2, 3, 4, 5, 6, 7, 8]; children 1..=4 carry one leaf each (9..=12).
    let mut edges: Vec<(Vertex, Vertex)> = (1..=8).map(|v| (0, v)).collect();
    edges.extend((1..=4).map(|v| (v, v + 8)));
    let g = GraphView::from_edges(16, &edges).unwrap();
    let ctx = context(&g, 3, 4, &[0]);
    for v in 1..=4 {
        assert_eq!(ctx.subtree_members(v).map(|m| m.len()), Some(2));
    }
    let mut clusters: Vec<Vec<Vertex>> = (1..=12).map(|v| ctx.cluster_of(v).unwrap().members.clone()).collect();
    clusters.sort();
    clusters.dedup();
    assert_eq!(clusters, vec![vec![1, 2, 9, 10], vec![3, 4, 11, 12], vec![5, 6, 7, 8]]);
    assert_eq!(ctx.aux_locate(1, 0), Some(AuxNode { root: 0, depth: 3, level: 2, offset: 0 }));
    assert_eq!(ctx.aux_locate(7, 0), Some(AuxNode { root: 0, depth: 3, level: 1, offset: 1 }));
}

/// Path 10-11-2-0-1-21-20 with centers 0, 10, 20, each cell a whole-cell cluster.
fn three_cells() -> GraphView {
    GraphView::from_edges(24, &[(0, 1), (0, 2), (1, 21), (2, 11), (10, 11), (20, 21)]).unwrap()
}

#[test]
fn engagement_follows_the_minimum_marked_edge() {
    let g = three_cells();
    let ctx = context(&g, 3, 4, &[0, 10, 20]).with_marked(&[10, 20]);
    let b = ctx.cluster_of(0).unwrap();
    assert_eq!((b.kind, b.members.clone()), (ClusterKind::WholeCell, vec![0, 1, 2]));
    assert_eq!(ctx.adjacent_centers(&b), vec![10, 20]);
    let rec = ctx.engaged_with(&b);
    assert_eq!(rec.witness, Some(EdgeKey::new(1, 21)));
    assert_eq!(rec.engaged_with.unwrap().members, vec![20, 21]);

    // Marked clusters are never engaged; without marked neighbors neither.
    assert_eq!(ctx.engaged_with(&ctx.cluster_of(20).unwrap()).engaged_with, None);
    let unmarked = context(&g, 3, 4, &[0, 10, 20]).with_marked(&[]);
    assert_eq!(unmarked.engaged_with(&unmarked.cluster_of(0).unwrap()).engaged_with, None);
}

#[test]
fn three_cells_answers() {
    let g = three_cells();
    let ctx = context(&g, 3, 4, &[0, 10, 20]).with_marked(&[10, 20]);
    assert_eq!(ctx.query_k2(0, 1), VerdictK2::TreeEdge);
    assert_eq!(ctx.query_k2(10, 11), VerdictK2::TreeEdge);
    assert_eq!(ctx.query_k2(2, 11), VerdictK2::Marked);
    assert_eq!(ctx.query_k2(1, 21), VerdictK2::Marked);
    let none = context(&g, 3, 4, &[0, 10, 20]).with_marked(&[]);
    assert_eq!(none.query_k2(2, 11), VerdictK2::Unengaged);
}

#[test]
fn centerless_components_fall_back() {
    let g = GraphView::from_edges(16, &[(0, 1), (1, 2), (2, 3), (3, 0), (5, 6), (6, 7), (7, 8), (8, 5)]).unwrap();
    let ctx = context(&g, 3, 3, &[0]);
    assert!(ctx.find_center(6).is_none());
    let (verdict, outcome) = ctx.query_main(5, 6).unwrap();
    assert_eq!(verdict, VerdictK2::Fallback);
    assert!(outcome.keep && outcome.failure);
    assert_eq!(ctx.query_main(0, 1).unwrap().0, VerdictK2::TreeEdge);
}

/// Multi-source BFS over non-remote vertices; ties go to the smaller center id.
fn global_voronoi(g: &GraphView, ctx: &K2<'_, GraphView>) -> Vec<Option<(Vertex, usize)>> {
    let remote: Vec<bool> = (0..g.n()).map(|v| ctx.is_remote(v)).collect();
    let mut best: Vec<Option<(Vertex, usize)>> = vec![None; g.n()];
    let mut queue = VecDeque::new();
    for c in ctx.centers() {
        if !remote[c] {
            best[c] = Some((c, 0));
            queue.push_back(c);
        }
    }
    while let Some(x) = queue.pop_front() {
        let (cx, dx) = best[x].unwrap();
        for y in g.neighbors(x) {
            if remote[y] {
                continue;
            }
            match best[y] {
                None => {
                    best[y] = Some((cx, dx + 1));
                    queue.push_back(y);
                }
                Some((cy, dy)) if dy == dx + 1 && cx < cy => best[y] = Some((cx, dy)),
                _ => {}
            }
        }
    }
    best
}

#[test]
fn find_center_matches_multi_source_bfs() {
    let g = gen_graph(&Model::Gnp { n: 300, p: 0.02 }, 5).unwrap();
    let ctx = K2::new(&g, &AlgParams { c_centers: 0.05, ..params(3) }, 5).unwrap();
    let global = global_voronoi(&g, &ctx);
    let mut assigned = 0;
    for v in 0..g.n() {
        if ctx.is_remote(v) {
            continue;
        }
        let local = ctx.find_center(v).map(|a| (a.center, a.dist));
        assert_eq!(local, global[v], "vertex {v}");
        if let Some(a) = ctx.find_center(v) {
            assigned += 1;
            if a.dist > 0 {
                assert!(g.has_edge(v, a.parent));
                assert_eq!(global[a.parent], Some((a.center, a.dist - 1)));
            }
        }
    }
    assert!(assigned > 100);
}

#[test]
fn clusters_partition_cells_and_respect_l() {
    let g = gen_graph(&Model::Gnp { n: 400, p: 0.015 }, 8).unwrap();
    let ctx = K2::new(&g, &AlgParams { c_centers: 0.05, c_l: 0.5, ..params(3) }, 8).unwrap();
    let mut singletons = 0;
    let mut groups = 0;
    for v in 0..g.n() {
        let Some(c) = ctx.cluster_of(v) else { continue };
        assert!(c.contains(v));
        assert_eq!(ctx.find_center(v).unwrap().center, c.center);
        if c.kind != ClusterKind::Singleton {
            assert!(c.members.len() <= ctx.l(), "{c:?}");
        } else {
            singletons += 1;
        }
        if c.kind == ClusterKind::SubtreeGroup {
            groups += 1;
        }
        for &w in &c.members {
            assert_eq!(*ctx.cluster_of(w).unwrap(), *c, "member {w} of {v}");
        }
    }
    assert!(singletons > 0 && groups > 0, "fixture should exercise aux trees: {singletons} {groups}");
}

#[test]
fn baswana_sen_with_one_round_keeps_everything() {
    let g = gen_graph(&Model::Gnp { n: 50, p: 0.2 }, 2).unwrap();
    let edges = g.sorted_edges();
    let kept = baswana_sen(&edges, 1, 0.5, &RandomTape::new(1));
    assert_eq!(kept.len(), edges.len());
}

fn bfs_dist(adj: &[Vec<Vertex>], from: Vertex, to: Vertex, limit: usize) -> Option<usize> {
    let mut dist = vec![usize::MAX; adj.len()];
    dist[from] = 0;
    let mut queue = VecDeque::from([from]);
    while let Some(x) = queue.pop_front() {
        if x == to {
            return Some(dist[x]);
        }
        if dist[x] == limit {
            continue;
        }
        for &y in &adj[x] {
            if dist[y] == usize::MAX {
                dist[y] = dist[x] + 1;
                queue.push_back(y);
            }
        }
    }
    None
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn baswana_sen_stretch(n in 20usize..80, p in 0.05f64..0.4, k in 2usize..4, seed in 0u64..1000) {
        let g = gen_graph(&Model::Gnp { n, p }, seed).unwrap();
        let edges = g.sorted_edges();
        let prob = (n as f64).powf(-1.0 / k as f64);
        let kept = baswana_sen(&edges, k, prob, &RandomTape::new(seed));
        let mut adj = vec![Vec::new(); n];
        for e in &kept {
            prop_assert!(g.has_edge(e.lo(), e.hi()));
            adj[e.lo()].push(e.hi());
            adj[e.hi()].push(e.lo());
        }
        for e in &edges {
            let d = bfs_dist(&adj, e.lo(), e.hi(), 2 * k - 1);
            prop_assert!(d.is_some(), "edge {} stretched beyond {}", e, 2 * k - 1);
        }
    }

    #[test]
    fn local_bs_agrees_with_the_whole_graph_run(n in 20usize..90, deg in 1.5f64..5.0, k in 1usize..5, seed in 0u64..1000) {
        let g = gen_graph(&Model::Gnp { n, p: deg / n as f64 }, seed).unwrap();
        let lca = BaswanaSenLca::new(&g, &params(k), seed).unwrap();
        let prob = (n as f64).powf(-1.0 / k as f64);
        let kept = baswana_sen(&g.sorted_edges(), k, prob, &RandomTape::new(seed));
        for e in g.sorted_edges() {
            prop_assert_eq!(lca.query(e.lo(), e.hi()).unwrap().keep, kept.contains(&e), "{}", e);
        }
    }
}

#[test]
fn bs_lca_matches_direct_run() {
    let g = gen_graph(&Model::Gnp { n: 120, p: 0.04 }, 6).unwrap();
    let lca = BaswanaSenLca::new(&g, &params(3), 6).unwrap();
    let prob = 120f64.powf(-1.0 / 3.0);
    let tape = RandomTape::new(6);
    // Components are run separately, so compare per component.
    let mut label = vec![usize::MAX; g.n()];
    for s in 0..g.n() {
        if label[s] != usize::MAX {
            continue;
        }
        label[s] = s;
        let mut stack = vec![s];
        while let Some(x) = stack.pop() {
            for y in g.neighbors(x) {
                if label[y] == usize::MAX {
                    label[y] = s;
                    stack.push(y);
                }
            }
        }
    }
    let edges = g.sorted_edges();
    for root in 0..g.n() {
        let comp: Vec<EdgeKey> = edges.iter().copied().filter(|e| label[e.lo()] == root).collect();
        if comp.is_empty() {
            continue;
        }
        let kept = baswana_sen(&comp, 3, prob, &tape);
        for e in comp {
            assert_eq!(lca.query(e.lo(), e.hi()).unwrap().keep, kept.contains(&e), "{e}");
        }
    }
}

#[test]
fn cache_modes_report_identical_probes_and_raw_calls() {
    let g = gen_graph(&Model::Gnp { n: 150, p: 0.03 }, 4).unwrap();
    let audited = CountingOracle::new(&g);
    let p = AlgParams { c_centers: 0.1, ..params(3) };
    let shared = K2::new(&audited, &p, 4).unwrap();
    let fresh = K2::new(&audited, &p, 4).unwrap().with_cache_mode(CacheMode::PerQuery);
    let mut remote = 0;
    for e in g.sorted_edges().into_iter().step_by(5) {
        let a = shared.query_main(e.lo(), e.hi()).unwrap();
        audited.take();
        let b = fresh.query_main(e.lo(), e.hi()).unwrap();
        assert_eq!(audited.take(), b.1.probes, "raw calls for {e}");
        assert_eq!(a, b, "{e}");
        remote += usize::from(a.0 == VerdictK2::BaswanaSen || shared.is_remote(e.lo()) || shared.is_remote(e.hi()));
    }
    assert!(remote > 0);
}
