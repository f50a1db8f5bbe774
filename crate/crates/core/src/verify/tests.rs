use super::*;
use crate::graph::{gen_graph, Model};
use crate::k2::{baswana_sen, K2};
use crate::spanner3::Spanner3;
use crate::tape::{AlgParams, RandomTape};
use proptest::prelude::*;

fn keys(pairs: &[(Vertex, Vertex)]) -> Vec<EdgeKey> {
    pairs.iter().map(|&(a, b)| EdgeKey::new(a, b)).collect()
}

fn cycle4() -> GraphView {
    GraphView::from_edges(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap()
}

#[test]
fn full_spanner_has_stretch_one() {
    let g = cycle4();
    let r = check_stretch(&g, &g.sorted_edges(), 3, Execution::Sequential);
    assert_eq!((r.removed, r.max_stretch, r.pass), (0, Some(1), true));
}

#[test]
fn four_cycle_minus_an_edge() {
    let g = cycle4();
    let h = keys(&[(0, 1), (1, 2), (2, 3)]);
    let r = check_stretch(&g, &h, 3, Execution::Sequential);
    assert_eq!((r.removed, r.max_stretch, r.pass), (1, Some(3), true));
    assert_eq!(r.worst, vec![(EdgeKey::new(0, 3), Some(3))]);
    let r = check_stretch(&g, &h, 2, Execution::Parallel);
    assert_eq!((r.max_stretch, r.pass), (None, false));
    let r = check_stretch_with_limit(&g, &h, 2, 10, Execution::Parallel);
    assert_eq!((r.max_stretch, r.pass), (Some(3), false));
}

#[test]
fn connectivity_of_trees_and_cuts() {
    let g = GraphView::from_edges(6, &[(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (4, 5), (5, 3)]).unwrap();
    assert!(check_connectivity(&g, &keys(&[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5)])));
    assert!(!check_connectivity(&g, &keys(&[(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)])));
    let empty = GraphView::from_edges(3, &[]).unwrap();
    assert!(check_connectivity(&empty, &[]));
}

#[test]
fn contraction_of_one_and_two_cells() {
    let g = GraphView::from_edges(4, &[(0, 1), (1, 2), (2, 3)]).unwrap();
    let one = contract_voronoi(&g, &[Some(0); 4], &g.sorted_edges());
    assert_eq!((one.cells.len(), one.full.m(), one.sparse.m()), (1, 0, 0));
    let assign = [Some(0), Some(0), Some(3), Some(3)];
    let two = contract_voronoi(&g, &assign, &keys(&[(1, 2)]));
    assert_eq!(two.cells, vec![0, 3]);
    assert_eq!((two.full.m(), two.sparse.m()), (1, 1));
    let cut = contract_voronoi(&g, &assign, &keys(&[(0, 1)]));
    assert_eq!((cut.full.m(), cut.sparse.m()), (1, 0));
}

#[test]
fn edgeless_and_tree_builds() {
    let g = GraphView::from_edges(10, &[]).unwrap();
    for algo in crate::Algo::ALL {
        let lca = algo.instantiate(&g, &AlgParams::default(), 1).unwrap();
        assert!(build_spanner(lca.as_ref(), &g, Execution::Parallel).unwrap().edges.is_empty());
    }
    let tree: Vec<(Vertex, Vertex)> = (1..200).map(|v| ((v - 1) / 3, v)).collect();
    let g = GraphView::from_edges(200, &tree).unwrap();
    let lca = Spanner3::new(&g, &AlgParams::default(), 2).unwrap();
    let out = build_spanner(&lca, &g, Execution::Parallel).unwrap();
    assert_eq!(out.edges, g.sorted_edges());
    assert_eq!(out.ledger.queries, 199);
}

#[test]
fn replay3_matches_scan_on_complete_graph() {
    let g = gen_graph(&Model::Gnp { n: 25, p: 1.0 }, 0).unwrap();
    let lca = Spanner3::new(&g, &AlgParams::default(), 3).unwrap();
    let scan = build_spanner(&lca, &g, Execution::Sequential).unwrap();
    let replay = replay_spanner3(&g, &lca);
    assert_eq!(scan.edges, replay.edges);
    assert_eq!(scan.failures, replay.failures);
}

#[test]
fn k2_global_matches_scan() {
    for (n, p, seed, c_centers, c_l) in [(300, 0.02, 17, 0.05, 0.5), (200, 0.015, 3, 1.0, 1.0), (250, 0.03, 9, 0.02, 0.3)] {
        let g = gen_graph(&Model::Gnp { n, p }, seed).unwrap();
        let params = AlgParams { c_centers, c_l, k: 3, ..AlgParams::default() };
        let ctx = K2::new(&g, &params, seed).unwrap();
        let scan = build_spanner(&ctx, &g, Execution::Parallel).unwrap();
        let global = build_k2_global(&g, &ctx);
        assert_eq!(scan.edges, global.edges, "G({n}, {p}) seed {seed}");
        assert_eq!(scan.failures, global.failures);
        let report = cluster_report(&g, &ctx, &global);
        assert!(report.pass(), "{report:?}");
    }
}

fn all_pairs(g: &GraphView) -> Vec<Vec<Option<usize>>> {
    (0..g.n())
        .map(|s| {
            let mut d = vec![None; g.n()];
            d[s] = Some(0);
            let mut q = VecDeque::from([s]);
            while let Some(x) = q.pop_front() {
                for y in g.neighbors(x) {
                    if d[y].is_none() {
                        d[y] = Some(d[x].unwrap() + 1);
                        q.push_back(y);
                    }
                }
            }
            d
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn bounded_distance_matches_all_pairs(n in 2usize..40, p in 0.02f64..0.3, seed in 0u64..500, drop in 0usize..4) {
        let g = gen_graph(&Model::Gnp { n, p }, seed).unwrap();
        let h = g.with_edges(&g.sorted_edges().into_iter().enumerate().filter(|(i, _)| i % 4 != drop).map(|(_, e)| e).collect::<Vec<_>>());
        let d = all_pairs(&h);
        for u in 0..n {
            for v in 0..n {
                prop_assert_eq!(bounded_distance(&h, u, v, n), d[u][v]);
            }
        }
    }

    #[test]
    fn two_baswana_sen_implementations_agree(n in 5usize..70, p in 0.03f64..0.4, k in 1usize..5, seed in 0u64..500) {
        let g = gen_graph(&Model::Gnp { n, p }, seed).unwrap();
        let edges = g.sorted_edges();
        let prob = (n as f64).powf(-1.0 / k as f64);
        let tape = RandomTape::new(seed);
        let mut a: Vec<EdgeKey> = baswana_sen(&edges, k, prob, &tape).into_iter().collect();
        a.sort_unstable();
        prop_assert_eq!(a, baswana_sen_reference(&edges, k, prob, &tape));
    }

    #[test]
    fn replay3_matches_scan(n in 20usize..150, p in 0.05f64..0.9, seed in 0u64..1000) {
        let g = gen_graph(&Model::Gnp { n, p }, seed).unwrap();
        let lca = Spanner3::new(&g, &AlgParams::default(), seed).unwrap();
        let scan = build_spanner(&lca, &g, Execution::Sequential).unwrap();
        prop_assert_eq!(scan.edges, replay_spanner3(&g, &lca).edges);
    }
}
