//! Acceptance checks. Each test prints one `criterion N: PASS|FAIL ...` line.
//!
//! Run with `cargo test -p local-spanners --test acceptance -- --nocapture --test-threads 1`.

use local_spanners::experiment::{run_sweep, Family, RunOptions, SweepSpec};
use local_spanners::graph::{gen_graph, Model, Probe};
use local_spanners::k2::K2;
use local_spanners::par::Execution;
use local_spanners::spanner3::{Spanner3, Verdict3};
use local_spanners::tape::{bucket_of, class_of, edge_rank_less, CenterFamily, RandomTape};
use local_spanners::verify::{
    self, build_k2_global, build_spanner, check_connectivity, check_stretch, check_stretch_with_limit, cluster_report,
    components, K2_STRETCH_KAPPA,
};
use local_spanners::{AlgParams, Algo, EdgeKey, GraphView};
use std::collections::BTreeMap;
use std::sync::OnceLock;
use std::time::Instant;

const CORPUS_GRAPHS: usize = 30;
const CORPUS_SEEDS: [u64; 5] = [1, 2, 3, 4, 5];
const CORPUS_N: (f64, f64) = (100.0, 2000.0);
const CORPUS_NP: (f64, f64) = (2.0, 50.0);
/// The small-parameter k2 runs skip the densest corpus graphs to keep the time budget.
const K2_SMALL_MAX_EDGES: usize = 10_000;

/// Share of (graph, seed) trials that must meet the stretch bound with default constants.
const STRETCH_PASS_SHARE: f64 = 0.95;
const BOOSTED_C_CENTERS: f64 = 3.0;

/// Pinned multipliers of the sparsity bounds.
const C_SPARSE_3: f64 = 1.0;
const C_SPARSE_5: f64 = 1.0;
const C_SPARSE_K2: f64 = 1.0;
const K2_SPARSITY_SEEDS: u64 = 10;

/// Exponent targets of the probe sweep.
const SWEEP_LOG2_N: std::ops::RangeInclusive<u32> = 10..=16;
const SWEEP_QUERIES: usize = 200;
const EXP_3: (f64, f64) = (0.5, 0.1);
const EXP_5: (f64, f64) = (0.67, 0.1);
const EXP_K2_MAX: f64 = 0.8;
const SWEEP_K2_K: usize = 4;

const CONNECTED_SHARE: f64 = 0.95;

const BS_N: usize = 2000;
const BS_SEEDS: [u64; 5] = [1, 2, 3, 4, 5];
const BS_MIN_REMOTE_SHARE: f64 = 0.3;
const C_BS_EDGES: f64 = 1.0;

const MINUTE: f64 = 60.0;

fn report(criterion: u8, pass: bool, detail: String) {
    println!("criterion {criterion}: {} {detail}", if pass { "PASS" } else { "FAIL" });
}

struct Instance {
    n: usize,
    np: f64,
    graph: GraphView,
}

/// `n` and `np` log-uniform in their ranges, drawn from a fixed stream.
fn corpus() -> &'static [Instance] {
    static CORPUS: OnceLock<Vec<Instance>> = OnceLock::new();
    CORPUS.get_or_init(|| {
        let tape = RandomTape::new(2024);
        let log_uniform = |(lo, hi): (f64, f64), u: f64| (lo.ln() + u * (hi.ln() - lo.ln())).exp();
        (0..CORPUS_GRAPHS as u64)
            .map(|i| {
                let n = log_uniform(CORPUS_N, tape.unit("corpus-n", &[i])).round() as usize;
                let np = log_uniform(CORPUS_NP, tape.unit("corpus-np", &[i]));
                let graph = gen_graph(&Model::Gnp { n, p: np / n as f64 }, 100 + i).unwrap();
                Instance { n, np, graph }
            })
            .collect()
    })
}

/// One trial of an algorithm on one corpus graph.
struct Trial {
    graph: usize,
    seed: u64,
    k: usize,
    local: Vec<EdgeKey>,
    failures: usize,
    agrees: bool,
    clusters_ok: bool,
}

/// `k` cycles through 2, 3, 4 with the seed so every value is covered.
fn k_for(seed: u64) -> usize {
    2 + (seed as usize % 3)
}

fn run_trial(algo: Algo, index: usize, seed: u64, params: &AlgParams) -> Trial {
    let g = &corpus()[index].graph;
    match algo {
        Algo::K2 => {
            let ctx = K2::new(g, params, seed).unwrap();
            let local = build_spanner(&ctx, g, Execution::Parallel).unwrap();
            let global = build_k2_global(g, &ctx);
            Trial {
                graph: index,
                seed,
                k: ctx.k(),
                agrees: local.edges == global.edges,
                clusters_ok: cluster_report(g, &ctx, &global).pass(),
                local: local.edges,
                failures: local.failures,
            }
        }
        _ => {
            let lca = algo.instantiate(g, params, seed).unwrap();
            let local = build_spanner(lca.as_ref(), g, Execution::Parallel).unwrap();
            let (reference, _) = verify::reference_edges(algo, g, params, seed).unwrap();
            Trial {
                graph: index,
                seed,
                k: 0,
                agrees: local.edges == reference,
                clusters_ok: true,
                local: local.edges,
                failures: local.failures,
            }
        }
    }
}

struct CorpusRuns {
    three: Vec<Trial>,
    five: Vec<Trial>,
    k2: Vec<Trial>,
    /// k2 with few centers and a small `L`, so clusters, marks and the fallback all fire.
    k2_small: Vec<Trial>,
    seconds: f64,
}

fn corpus_runs() -> &'static CorpusRuns {
    static RUNS: OnceLock<CorpusRuns> = OnceLock::new();
    RUNS.get_or_init(|| {
        let start = Instant::now();
        let grid: Vec<(usize, u64)> =
            (0..CORPUS_GRAPHS).flat_map(|i| CORPUS_SEEDS.iter().map(move |&s| (i, s))).collect();
        let default = AlgParams::default();
        let three = grid.iter().map(|&(i, s)| run_trial(Algo::Three, i, s, &default)).collect();
        let five = grid.iter().map(|&(i, s)| run_trial(Algo::Five, i, s, &default)).collect();
        let k2 = grid.iter().map(|&(i, s)| run_trial(Algo::K2, i, s, &AlgParams { k: k_for(s), ..default.clone() })).collect();
        let small = AlgParams { c_centers: 0.05, c_l: 0.2, ..default.clone() };
        let k2_small = grid
            .iter()
            .filter(|&&(i, s)| s <= 2 && corpus()[i].graph.m() <= K2_SMALL_MAX_EDGES)
            .map(|&(i, s)| run_trial(Algo::K2, i, s, &AlgParams { k: k_for(s), ..small.clone() }))
            .collect();
        CorpusRuns { three, five, k2, k2_small, seconds: start.elapsed().as_secs_f64() }
    })
}

fn agreement(trials: &[Trial]) -> (usize, usize) {
    (trials.iter().filter(|t| t.agrees).count(), trials.len())
}

#[test]
fn criterion_1_oracle_equivalence() {
    let runs = corpus_runs();
    let parts = [("3", &runs.three), ("5", &runs.five), ("k2", &runs.k2), ("k2-small", &runs.k2_small)];
    let mut pass = runs.seconds < 10.0 * MINUTE;
    let mut detail = Vec::new();
    for (name, trials) in parts {
        let (ok, total) = agreement(trials);
        pass &= ok == total;
        detail.push(format!("{name} {ok}/{total}"));
    }
    let sizes: Vec<usize> = corpus().iter().map(|c| c.n).collect();
    let nps: Vec<f64> = corpus().iter().map(|c| c.np).collect();
    detail.push(format!(
        "n {}..{} np {:.1}..{:.1} {:.0}s",
        sizes.iter().min().unwrap(),
        sizes.iter().max().unwrap(),
        nps.iter().cloned().fold(f64::MAX, f64::min),
        nps.iter().cloned().fold(0.0, f64::max),
        runs.seconds
    ));
    report(1, pass, detail.join(", "));
    assert!(pass);
}

/// Pass count and whether every failing trial logged a clustering failure.
fn stretch_share(trials: &[Trial], bound: usize) -> (usize, bool) {
    let mut passed = 0;
    let mut explained = true;
    for t in trials {
        let g = &corpus()[t.graph].graph;
        if check_stretch(g, &t.local, bound, Execution::Parallel).pass {
            passed += 1;
        } else {
            explained &= t.failures > 0;
        }
    }
    (passed, explained)
}

#[test]
fn criterion_2_stretch() {
    let runs = corpus_runs();
    let mut pass = true;
    let mut detail = Vec::new();
    for (name, trials, algo, bound) in [("3", &runs.three, Algo::Three, 3), ("5", &runs.five, Algo::Five, 5)] {
        let (ok, explained) = stretch_share(trials, bound);
        let boosted: Vec<Trial> = trials
            .iter()
            .map(|t| run_trial(algo, t.graph, t.seed, &AlgParams { c_centers: BOOSTED_C_CENTERS, ..AlgParams::default() }))
            .collect();
        let (boosted_ok, _) = stretch_share(&boosted, bound);
        pass &= ok as f64 >= STRETCH_PASS_SHARE * trials.len() as f64 && explained && boosted_ok == boosted.len();
        detail.push(format!("{name}: {ok}/{} default, {boosted_ok}/{} boosted", trials.len(), boosted.len()));
    }
    let mut worst: BTreeMap<usize, usize> = BTreeMap::new();
    let mut k2_ok = true;
    for t in runs.k2.iter().chain(&runs.k2_small) {
        let g = &corpus()[t.graph].graph;
        let bound = K2_STRETCH_KAPPA * t.k * t.k;
        let r = check_stretch_with_limit(g, &t.local, bound, 4 * bound, Execution::Parallel);
        let s = r.max_stretch.unwrap_or(usize::MAX);
        let w = worst.entry(t.k).or_default();
        *w = (*w).max(s);
        k2_ok &= r.pass;
    }
    pass &= k2_ok;
    detail.push(format!("k2 max stretch by k {worst:?} vs {K2_STRETCH_KAPPA}*k^2"));
    report(2, pass, detail.join(", "));
    assert!(pass);
}

#[test]
fn criterion_3_sparsity() {
    let runs = corpus_runs();
    let ratio = |trials: &[Trial], f: &dyn Fn(f64) -> f64| {
        trials.iter().map(|t| t.local.len() as f64 / f(corpus()[t.graph].n as f64)).fold(0.0, f64::max)
    };
    let r3 = ratio(&runs.three, &|n| n.powf(1.5) * n.log2());
    let r5 = ratio(&runs.five, &|n| n.powf(4.0 / 3.0) * n.log2().powi(2));

    // Mean over seeds on the smaller corpus graphs, one k per graph.
    let mut rk = 0.0f64;
    let small: Vec<usize> = (0..CORPUS_GRAPHS).filter(|&i| corpus()[i].n <= 800).take(3).collect();
    for (j, &i) in small.iter().enumerate() {
        let g = &corpus()[i].graph;
        let k = 2 + j % 3;
        let total: usize = (1..=K2_SPARSITY_SEEDS)
            .map(|s| {
                let ctx = K2::new(g, &AlgParams { k, ..AlgParams::default() }, s).unwrap();
                build_spanner(&ctx, g, Execution::Parallel).unwrap().edges.len()
            })
            .sum();
        let mean = total as f64 / K2_SPARSITY_SEEDS as f64;
        let n = g.n() as f64;
        rk = rk.max(mean / (n.powf(1.0 + 1.0 / k as f64) * (k * k) as f64 * n.log2().powi(3)));
    }
    let pass = r3 <= C_SPARSE_3 && r5 <= C_SPARSE_5 && rk <= C_SPARSE_K2;
    report(3, pass, format!("max ratios 3 {r3:.4} (c {C_SPARSE_3}), 5 {r5:.4} (c {C_SPARSE_5}), k2 {rk:.6} (c {C_SPARSE_K2})"));
    assert!(pass);
}

fn sweep_slope(algo: Algo, family: &str, params: AlgParams) -> f64 {
    let spec = SweepSpec {
        algo,
        family: family.parse::<Family>().unwrap(),
        ns: SWEEP_LOG2_N.map(|e| 1usize << e).collect(),
        seeds: vec![1],
        params,
    };
    let opts = RunOptions { exec: Execution::Sequential, queries: Some(SWEEP_QUERIES), stretch_limit: 0, timing: false };
    let result = run_sweep(&spec, &opts).unwrap();
    for row in &result.rows {
        println!("  sweep {algo} {family} n {} max_probes {}", row.n, row.max_probes_per_query);
    }
    result.probe_fit.unwrap().slope
}

#[test]
fn criterion_4_probe_scaling() {
    let start = Instant::now();
    let s3 = sweep_slope(Algo::Three, "gnp-exp:0.3333333333", AlgParams::default());
    let s5 = sweep_slope(Algo::Five, "gnp-exp:0.3333333333", AlgParams::default());
    let sk = sweep_slope(Algo::K2, "gnp-deg:8", AlgParams { k: SWEEP_K2_K, ..AlgParams::default() });
    let seconds = start.elapsed().as_secs_f64();
    let ok3 = (s3 - EXP_3.0).abs() <= EXP_3.1;
    let ok5 = (s5 - EXP_5.0).abs() <= EXP_5.1;
    let okk = sk <= EXP_K2_MAX;
    let pass = ok3 && ok5 && okk && seconds < 30.0 * MINUTE;
    let mark = |ok: bool| if ok { "ok" } else { "out of range" };
    report(
        4,
        pass,
        format!(
            "slopes 3 {s3:.3} ({}), 5 {s5:.3} ({}), k2 {sk:.3} ({}), {seconds:.0}s",
            mark(ok3),
            mark(ok5),
            mark(okk)
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_5_structure() {
    let runs = corpus_runs();
    let trials: Vec<&Trial> = runs.k2.iter().chain(&runs.k2_small).collect();
    let clusters_ok = trials.iter().filter(|t| t.clusters_ok).count();
    let mut connected = 0;
    let mut connected_clean = true;
    for t in &trials {
        let g = &corpus()[t.graph].graph;
        if check_connectivity(g, &t.local) {
            connected += 1;
        } else {
            connected_clean &= t.failures > 0;
        }
    }
    let pass = clusters_ok == trials.len()
        && connected as f64 >= CONNECTED_SHARE * trials.len() as f64
        && connected_clean;
    report(
        5,
        pass,
        format!("cluster invariants {clusters_ok}/{n}, connected {connected}/{n}", n = trials.len()),
    );
    assert!(pass);
}

#[test]
fn criterion_6_baswana_sen_fallback() {
    let k = 2;
    let mut pass = true;
    let mut min_remote = 1.0f64;
    let mut worst_stretch = 0;
    let mut worst_ratio = 0.0f64;
    for seed in BS_SEEDS {
        let g = gen_graph(&Model::Gnp { n: BS_N, p: 3.0 / BS_N as f64 }, seed).unwrap();
        let ctx = K2::new(&g, &AlgParams { k, ..AlgParams::default() }, seed).unwrap();
        let s = build_k2_global(&g, &ctx);
        let local = build_spanner(&ctx, &g, Execution::Parallel).unwrap();
        let remote = s.remote.iter().filter(|&&r| r).count() as f64 / g.n() as f64;
        min_remote = min_remote.min(remote);

        let h = GraphView::from_edges(g.n(), &s.h_edges.iter().map(|e| e.endpoints()).collect::<Vec<_>>()).unwrap();
        let local_bs: Vec<EdgeKey> = local.edges.iter().copied().filter(|e| s.h_edges.binary_search(e).is_ok()).collect();
        pass &= local_bs == s.bs_edges;
        let r = check_stretch_with_limit(&h, &s.bs_edges, 2 * k - 1, 4 * k, Execution::Parallel);
        worst_stretch = worst_stretch.max(r.max_stretch.unwrap_or(usize::MAX));
        pass &= r.pass;

        let label = components(g.n(), s.h_edges.iter().copied());
        let mut size: BTreeMap<usize, usize> = BTreeMap::new();
        let mut kept: BTreeMap<usize, usize> = BTreeMap::new();
        for v in 0..g.n() {
            if h.degree(v) > 0 {
                *size.entry(label[v]).or_default() += 1;
            }
        }
        for e in &s.bs_edges {
            *kept.entry(label[e.lo()]).or_default() += 1;
        }
        for (c, &m) in &kept {
            let nc = size[c] as f64;
            worst_ratio = worst_ratio.max(m as f64 / (k as f64 * nc.powf(1.0 + 1.0 / k as f64)));
        }
    }
    pass &= min_remote >= BS_MIN_REMOTE_SHARE && worst_ratio <= C_BS_EDGES;
    report(
        6,
        pass,
        format!("min remote share {min_remote:.2}, max H stretch {worst_stretch}, max edge ratio {worst_ratio:.3} (c {C_BS_EDGES})"),
    );
    assert!(pass);
}

/// Smallest `i` with `deg ≤ 2^i · delta`.
fn class_oracle(deg: usize, delta: usize) -> Option<usize> {
    if deg <= delta {
        return None;
    }
    (1..).find(|&i| deg <= (1usize << i) * delta)
}

fn tie_breaks_hold() -> bool {
    // Center: v is one hop from both 3 and 5.
    let g = GraphView::from_edges(6, &[(3, 0), (0, 5), (3, 1), (5, 2), (1, 4), (2, 4)]).unwrap();
    let ctx = K2::new(&g, &AlgParams::default(), 1).unwrap().with_centers(&[3, 5]).with_l(1);
    let center_ok = ctx.find_center(0).is_some_and(|a| a.center == 3 && a.dist == 1);
    // Parent: with center 0, vertex 4 is three hops away through 1 or through 2.
    let ctx = K2::new(&g, &AlgParams::default(), 1).unwrap().with_centers(&[0]).with_l(1);
    let parent_ok = ctx.find_center(4).is_some_and(|a| a.center == 0 && a.dist == 3 && a.parent == 1)
        && ctx.find_center(1).is_some_and(|a| a.parent == 3);

    // Orientation: in K16 every degree is 15, so the higher id is the endpoint whose centers are used.
    let mut edges = Vec::new();
    for a in 0..16 {
        for b in a + 1..16 {
            edges.push((a, b));
        }
    }
    let k16 = GraphView::from_edges(16, &edges).unwrap();
    let lca = Spanner3::with_family(&k16, CenterFamily::explicit("S", &[15]), false);
    let mut orient_ok = true;
    for a in 0..15 {
        for (x, y) in [(a, 15), (15, a)] {
            let mut probe = Probe::new(&k16);
            orient_ok &= lca.query3(&mut probe, x, y) == Ok(Verdict3::NoCenters);
        }
    }
    center_ok && parent_ok && orient_ok
}

#[test]
fn criterion_7_unit_conformance() {
    let start = Instant::now();
    let mut checked = 0usize;
    let mut pass = true;
    for delta in 1..=40 {
        for deg in 1..=64 * delta + 1 {
            pass &= class_of(deg, delta).ok() == class_oracle(deg, delta);
            checked += 1;
        }
        for i in 1..=512 {
            pass &= bucket_of(i, delta) == (i - 1) / delta + 1;
            checked += 1;
        }
    }
    let mut ranked = Vec::new();
    for a in 0..20 {
        for b in a + 1..20 {
            ranked.push(EdgeKey::new(a, b));
        }
    }
    for &x in &ranked {
        for &y in &ranked {
            let (lt, gt) = (edge_rank_less(x, y), edge_rank_less(y, x));
            pass &= u8::from(lt) + u8::from(gt) + u8::from(x == y) == 1;
            pass &= lt == ((x.lo(), x.hi()) < (y.lo(), y.hi()));
            checked += 1;
            for &z in &ranked {
                pass &= !(lt && edge_rank_less(y, z)) || edge_rank_less(x, z);
            }
        }
    }
    pass &= tie_breaks_hold();
    let seconds = start.elapsed().as_secs_f64();
    pass &= seconds < MINUTE;
    report(7, pass, format!("{checked} table and order checks plus tie-break fixtures, {seconds:.1}s"));
    assert!(pass);
}
