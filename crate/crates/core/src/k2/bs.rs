//! Baswana–Sen `(2k-1)`-spanners, simulated locally around each endpoint.

use super::{Sess, K2, TAG_BS};
use crate::error::LcaError;
use crate::graph::{AdjacencyOracle, EdgeKey, Vertex};
use crate::lca::{EdgeLca, QueryOutcome};
use crate::memo::{CacheMode, MemoTable, Session, Store};
use crate::tape::{AlgParams, RandomTape};
use rustc_hash::{FxHashMap, FxHashSet};
use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

/// Edges kept by one Baswana–Sen run, grouped by the vertex that chose them.
#[derive(Debug, Default)]
pub struct BsChoices {
    chosen: FxHashMap<Vertex, Vec<EdgeKey>>,
}

impl BsChoices {
    fn choose(&mut self, v: Vertex, e: EdgeKey) {
        self.chosen.entry(v).or_default().push(e);
    }

    pub fn chosen_by(&self, v: Vertex) -> &[EdgeKey] {
        self.chosen.get(&v).map_or(&[], Vec::as_slice)
    }

    pub fn kept(&self) -> FxHashSet<EdgeKey> {
        self.chosen.values().flatten().copied().collect()
    }
}

/// Runs Baswana–Sen with `k` rounds on an edge set and returns the kept edges.
pub fn baswana_sen(edges: &[EdgeKey], k: usize, prob: f64, tape: &RandomTape) -> FxHashSet<EdgeKey> {
    baswana_sen_choices(edges, k, prob, tape).kept()
}

/// Baswana–Sen with the choosing vertex of every kept edge.
///
/// Rounds `1..k` sample each surviving cluster center `c` when
/// `unit("bs", [round, c]) < prob`; all vertices decide from the clustering
/// at the start of the round. A vertex of an unsampled cluster joins the
/// sampled neighbor cluster behind its minimum-rank edge, or, with no sampled
/// neighbor, keeps its minimum edge to every adjacent cluster and leaves.
/// The last round keeps the minimum edge from every vertex to each adjacent
/// cluster.
///
/// After `r` rounds the state of a vertex depends only on its radius-`r`
/// ball, so the choices of `v` are already exact on the edges within
/// distance `k` of `v`.
pub fn baswana_sen_choices(edges: &[EdgeKey], k: usize, prob: f64, tape: &RandomTape) -> BsChoices {
    let mut out = BsChoices::default();
    if k <= 1 {
        for &e in edges {
            let (a, b) = e.endpoints();
            out.choose(a, e);
            out.choose(b, e);
        }
        return out;
    }
    let mut adj: BTreeMap<Vertex, BTreeSet<Vertex>> = BTreeMap::new();
    for e in edges {
        let (a, b) = e.endpoints();
        adj.entry(a).or_default().insert(b);
        adj.entry(b).or_default().insert(a);
    }
    let mut cluster: FxHashMap<Vertex, Vertex> = adj.keys().map(|&v| (v, v)).collect();
    let sampled = |round: usize, c: Vertex| tape.unit("bs", &[round as u64, c as u64]) < prob;

    for round in 1..k {
        let mut next = FxHashMap::default();
        let mut removed: Vec<EdgeKey> = Vec::new();
        for (&v, nbrs) in &adj {
            let Some(&cv) = cluster.get(&v) else { continue };
            if sampled(round, cv) {
                next.insert(v, cv);
                continue;
            }
            let mut best: BTreeMap<Vertex, EdgeKey> = BTreeMap::new();
            for &w in nbrs {
                let cw = cluster[&w];
                let e = EdgeKey::new(v, w);
                best.entry(cw).and_modify(|m| *m = (*m).min(e)).or_insert(e);
            }
            let join = best.iter().filter(|(&c, _)| sampled(round, c)).min_by_key(|(_, &e)| e);
            match join {
                Some((&c, &e)) => {
                    out.choose(v, e);
                    next.insert(v, c);
                    removed.extend(nbrs.iter().filter(|w| cluster[w] == c).map(|&w| EdgeKey::new(v, w)));
                }
                None => {
                    for &e in best.values() {
                        out.choose(v, e);
                    }
                    removed.extend(nbrs.iter().map(|&w| EdgeKey::new(v, w)));
                }
            }
        }
        for e in removed {
            let (a, b) = e.endpoints();
            adj.get_mut(&a).map(|s| s.remove(&b));
            adj.get_mut(&b).map(|s| s.remove(&a));
        }
        for (&v, nbrs) in adj.iter_mut() {
            match next.get(&v) {
                Some(cv) => nbrs.retain(|w| next.get(w) != Some(cv)),
                None => nbrs.clear(),
            }
        }
        cluster = next;
    }

    for (&v, nbrs) in &adj {
        let mut best: BTreeMap<Vertex, EdgeKey> = BTreeMap::new();
        for &w in nbrs {
            let e = EdgeKey::new(v, w);
            best.entry(cluster[&w]).and_modify(|m| *m = (*m).min(e)).or_insert(e);
        }
        for e in best.into_values() {
            out.choose(v, e);
        }
    }
    out
}

/// The edges `x` chooses, simulated on its radius-`k` ball over edges passing `keep`.
fn local_choices<G: AdjacencyOracle + ?Sized, T: Default>(
    s: &mut Session<'_, G, T>,
    x: Vertex,
    mut keep: impl FnMut(&mut Session<'_, G, T>, Vertex, Vertex) -> bool,
    k: usize,
    prob: f64,
    tape: &RandomTape,
) -> Arc<[EdgeKey]> {
    let mut seen = FxHashSet::from_iter([x]);
    let mut frontier = vec![x];
    let mut edges = Vec::new();
    for _ in 0..k.max(1) {
        let mut next = Vec::new();
        for &a in &frontier {
            let deg = s.probe.degree(a);
            for i in 1..=deg {
                let b = s.probe.neighbor(a, i).expect("index within degree");
                if !keep(s, a, b) {
                    continue;
                }
                edges.push(EdgeKey::new(a, b));
                if seen.insert(b) {
                    next.push(b);
                }
            }
        }
        frontier = next;
    }
    edges.sort_unstable();
    edges.dedup();
    let mut mine = baswana_sen_choices(&edges, k, prob, tape).chosen_by(x).to_vec();
    mine.sort_unstable();
    mine.into()
}

impl<G: AdjacencyOracle + ?Sized> K2<'_, G> {
    /// Edges `v` keeps when Baswana–Sen runs on `H`, the edges with a remote endpoint.
    pub(super) fn bs_in(&self, s: &mut Sess<'_, G>, v: Vertex) -> Arc<[EdgeKey]> {
        s.memo(TAG_BS, v as u64, |t| &t.bs, |s| {
            local_choices(s, v, |s, x, y| self.remote_in(s, x) || self.remote_in(s, y), self.k, self.bs_prob, &self.tape)
        })
    }
}

#[derive(Default)]
struct BsTables {
    choices: MemoTable<Arc<[EdgeKey]>>,
}

/// Baswana–Sen on the whole graph, answered from the radius-`k` balls of the endpoints.
pub struct BaswanaSenLca<'g, G: ?Sized> {
    graph: &'g G,
    k: usize,
    prob: f64,
    tape: RandomTape,
    strict: bool,
    mode: CacheMode,
    tables: Store<BsTables>,
}

impl<'g, G: AdjacencyOracle + ?Sized> BaswanaSenLca<'g, G> {
    pub fn new(graph: &'g G, params: &AlgParams, seed: u64) -> Result<Self, LcaError> {
        let n = graph.vertex_count();
        let params = params.resolved(n)?;
        Ok(Self {
            graph,
            k: params.k,
            prob: (n.max(1) as f64).powf(-1.0 / params.k as f64),
            tape: RandomTape::new(seed),
            strict: params.strict,
            mode: CacheMode::Shared,
            tables: Store::default(),
        })
    }

    pub fn with_cache_mode(mut self, mode: CacheMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn k(&self) -> usize {
        self.k
    }
}

impl<G: AdjacencyOracle + ?Sized> EdgeLca for BaswanaSenLca<'_, G> {
    fn query(&self, u: Vertex, v: Vertex) -> Result<QueryOutcome, LcaError> {
        let mut s = Session::new(self.graph, &self.tables, self.mode);
        if self.strict && (u == v || s.probe.adjacency(u, v).is_none()) {
            return Err(LcaError::NotAnEdge(u, v));
        }
        let e = EdgeKey::try_new(u, v).ok_or(LcaError::NotAnEdge(u, v))?;
        let keeps = |s: &mut Session<'_, G, BsTables>, x: Vertex| {
            s.memo(0, x as u64, |t| &t.choices, |s| local_choices(s, x, |_, _, _| true, self.k, self.prob, &self.tape))
        };
        let keep = keeps(&mut s, u).binary_search(&e).is_ok() || keeps(&mut s, v).binary_search(&e).is_ok();
        Ok(QueryOutcome { keep, probes: s.probe.counts(), failure: false })
    }
}
