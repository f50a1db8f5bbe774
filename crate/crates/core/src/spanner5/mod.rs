//! 5-spanner: the global construction and its local, probe-counting twin.
//!
//! Vertices split by degree into light (`≤ ⌊n^{1/3}⌋`), heavy
//! (`≥ ⌈n^{2/3}⌉`) and medium. Heavy vertices cluster around centers of the
//! family `S1`; a medium vertex borrows the clusters of its representative (the
//! minimum-id heavy vertex in a random sample of its neighbors); medium
//! vertices without one are bad and cluster around centers of `S2`.
//!
//! Heavy-cluster connections are made from the first allowed member in a
//! bucket of `N(x)`, where `x` may connect into `w`'s clusters unless `x` is
//! heavy and `w` precedes `x` in degree order. Light clusters are split into
//! blocks of `⌊n^{1/3}⌋` members and each pair of blocks keeps its minimum-rank
//! edge.

mod global;

pub use global::{build_spanner5_global, Structure5};

use crate::error::LcaError;
use crate::graph::{AdjacencyOracle, EdgeKey, Vertex};
use crate::lca::{EdgeLca, QueryOutcome};
use crate::memo::{CacheMode, MemoTable, Session, Store};
use crate::tape::{
    bucket_of, cbrt_floor, class_of, log2n, scaled, two_thirds_ceil, vertex_sample, AlgParams, CenterFamily,
    RandomTape,
};
use std::sync::Arc;

/// Degree role of a vertex.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum VertexRole {
    Light,
    Heavy,
    Medium { rep: Vertex },
    Bad,
}

/// Which rule decided a query.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict5 {
    Light,
    /// An endpoint failed to cluster, so all its edges are kept.
    Fallback,
    HeavyCenter,
    Representative,
    LightCenter,
    FirstInBucket,
    SubsetMinimum,
    Dropped,
}

impl Verdict5 {
    pub fn keep(self) -> bool {
        self != Verdict5::Dropped
    }
}

#[derive(Default)]
struct Tables {
    rep: MemoTable<Option<u32>>,
    heavy_centers: MemoTable<Arc<[u32]>>,
    light_centers: MemoTable<Arc<[u32]>>,
    light_cluster: MemoTable<Arc<[u32]>>,
}

type Sess<'a, G> = Session<'a, G, Tables>;

const TAG_REP: u8 = 0;
const TAG_HEAVY: u8 = 1;
const TAG_LIGHT: u8 = 2;
const TAG_CLUSTER: u8 = 3;

pub struct Spanner5<'g, G: ?Sized> {
    graph: &'g G,
    cut_lo: usize,
    cut_hi: usize,
    rep_sample: usize,
    heavy_family: CenterFamily,
    light_family: CenterFamily,
    tape: RandomTape,
    strict: bool,
    mode: CacheMode,
    tables: Store<Tables>,
}

impl<'g, G: AdjacencyOracle + ?Sized> Spanner5<'g, G> {
    pub fn new(graph: &'g G, params: &AlgParams, seed: u64) -> Result<Self, LcaError> {
        let n = graph.vertex_count();
        let params = params.resolved(n)?;
        let tape = RandomTape::new(seed);
        let log = log2n(n);
        let cbrt = (n as f64).cbrt();
        let heavy_levels = (log / 3.0).ceil().max(1.0) as usize;
        let light_levels = (2.0 * log / 3.0).ceil().max(1.0) as usize;
        let heavy_family =
            CenterFamily::sample(n, scaled(params.c_centers, cbrt * log, n), heavy_levels, &tape, "S1");
        let light_family =
            CenterFamily::sample(n, scaled(params.c_centers, cbrt * cbrt * log, n), light_levels, &tape, "S2");
        Ok(Self {
            graph,
            cut_lo: cbrt_floor(n).max(1),
            cut_hi: two_thirds_ceil(n).max(1),
            rep_sample: ((params.c_rep * log).ceil() as usize).max(1),
            heavy_family,
            light_family,
            tape,
            strict: params.strict,
            mode: CacheMode::Shared,
            tables: Store::default(),
        })
    }

    /// Recompute every memoized value inside each query instead of sharing them.
    pub fn with_cache_mode(mut self, mode: CacheMode) -> Self {
        self.mode = mode;
        self
    }

    /// Replaces both center families, for hand-built fixtures.
    pub fn with_families(mut self, heavy: CenterFamily, light: CenterFamily) -> Self {
        self.heavy_family = heavy;
        self.light_family = light;
        self
    }

    pub fn graph(&self) -> &'g G {
        self.graph
    }

    pub fn cut_lo(&self) -> usize {
        self.cut_lo
    }

    pub fn cut_hi(&self) -> usize {
        self.cut_hi
    }

    pub fn rep_sample_size(&self) -> usize {
        self.rep_sample
    }

    pub fn heavy_family(&self) -> &CenterFamily {
        &self.heavy_family
    }

    pub fn light_family(&self) -> &CenterFamily {
        &self.light_family
    }

    pub fn tape(&self) -> &RandomTape {
        &self.tape
    }

    /// Light-cluster block size `⌊n^{1/3}⌋`.
    pub fn block(&self) -> usize {
        self.cut_lo
    }

    /// Class of a heavy degree w.r.t. `cut_hi`; degree exactly `cut_hi` joins class 1.
    pub fn heavy_class(&self, deg: usize) -> usize {
        debug_assert!(deg >= self.cut_hi);
        class_of(deg.max(self.cut_hi + 1), self.cut_hi).map_or(1, |c| c.min(self.heavy_family.levels()))
    }

    /// Class of a medium degree w.r.t. `cut_lo`.
    pub fn light_class(&self, deg: usize) -> usize {
        debug_assert!(deg > self.cut_lo);
        class_of(deg, self.cut_lo).map_or(1, |c| c.min(self.light_family.levels()))
    }

    pub fn role_by_degree(&self, deg: usize) -> Option<VertexRole> {
        if deg <= self.cut_lo {
            Some(VertexRole::Light)
        } else if deg >= self.cut_hi {
            Some(VertexRole::Heavy)
        } else {
            None
        }
    }

    /// `x` may connect into the heavy clusters of `w` unless `x` is heavy and `w` precedes it.
    pub fn allowed(&self, x: Vertex, dx: usize, w: Vertex, dw: usize) -> bool {
        dx < self.cut_hi || (dx, x) < (dw, w)
    }

    fn session(&self) -> Sess<'_, G> {
        Session::new(self.graph, &self.tables, self.mode)
    }

    fn rep_in(&self, s: &mut Sess<'_, G>, v: Vertex) -> Option<Vertex> {
        s.memo(TAG_REP, v as u64, |t| &t.rep, |s| {
            let deg = s.probe.degree(v);
            let mut best: Option<Vertex> = None;
            for idx in vertex_sample(v, deg, self.rep_sample, &self.tape, "R") {
                let w = s.probe.neighbor(v, idx).expect("sampled index within degree");
                if s.probe.degree(w) >= self.cut_hi && best.is_none_or(|b| w < b) {
                    best = Some(w);
                }
            }
            best.map(|w| w as u32)
        })
        .map(|w| w as Vertex)
    }

    fn role_in(&self, s: &mut Sess<'_, G>, v: Vertex, deg: usize) -> VertexRole {
        self.role_by_degree(deg).unwrap_or_else(|| match self.rep_in(s, v) {
            Some(rep) => VertexRole::Medium { rep },
            None => VertexRole::Bad,
        })
    }

    fn heavy_centers_in(&self, s: &mut Sess<'_, G>, v: Vertex) -> Arc<[u32]> {
        s.memo(TAG_HEAVY, v as u64, |t| &t.heavy_centers, |s| {
            let c = self.heavy_class(s.probe.degree(v));
            self.heavy_family.level(c).filter(|&x| s.probe.adjacency(v, x).is_some()).map(|x| x as u32).collect()
        })
    }

    fn light_centers_in(&self, s: &mut Sess<'_, G>, v: Vertex) -> Arc<[u32]> {
        s.memo(TAG_LIGHT, v as u64, |t| &t.light_centers, |s| {
            let deg = s.probe.degree(v);
            let c = self.light_class(deg);
            let mut centers: Vec<u32> = (1..=deg)
                .filter_map(|i| s.probe.neighbor(v, i))
                .filter(|&w| self.light_family.contains(c, w))
                .map(|w| w as u32)
                .collect();
            centers.sort_unstable();
            centers.into()
        })
    }

    /// Members of the class-`c` light cluster of center `center`, in `N(center)` order.
    fn light_cluster_in(&self, s: &mut Sess<'_, G>, center: Vertex, c: usize) -> Arc<[u32]> {
        s.memo(TAG_CLUSTER, ((center as u64) << 8) | c as u64, |t| &t.light_cluster, |s| {
            let deg = s.probe.degree(center);
            let mut members = Vec::new();
            for i in 1..=deg {
                let w = s.probe.neighbor(center, i).expect("index within degree");
                let dw = s.probe.degree(w);
                if self.role_by_degree(dw).is_none() && self.light_class(dw) == c && self.rep_in(s, w).is_none() {
                    members.push(w as u32);
                }
            }
            members.into()
        })
    }

    /// The heavy clusters `w` belongs to: its own centers, or its representative's.
    fn heavy_clusters_in(&self, s: &mut Sess<'_, G>, role: VertexRole, w: Vertex, dw: usize) -> (Arc<[u32]>, usize) {
        match role {
            VertexRole::Heavy => (self.heavy_centers_in(s, w), self.heavy_class(dw)),
            VertexRole::Medium { rep } => {
                let dr = s.probe.degree(rep);
                (self.heavy_centers_in(s, rep), self.heavy_class(dr))
            }
            VertexRole::Light | VertexRole::Bad => (Arc::from([]), 0),
        }
    }

    fn heavy_member(&self, s: &mut Sess<'_, G>, w: Vertex, dw: usize, center: Vertex, c: usize) -> bool {
        match self.role_by_degree(dw) {
            Some(VertexRole::Heavy) => self.heavy_class(dw) == c && s.probe.adjacency(w, center).is_some(),
            Some(_) => false,
            None => match self.rep_in(s, w) {
                Some(r) => {
                    let dr = s.probe.degree(r);
                    self.heavy_class(dr) == c && s.probe.adjacency(r, center).is_some()
                }
                None => false,
            },
        }
    }

    /// Block of `w` within the light cluster of `center`, with the block's members.
    fn subset_in(&self, s: &mut Sess<'_, G>, center: Vertex, c: usize, w: Vertex) -> Option<(usize, Vec<Vertex>)> {
        let members = self.light_cluster_in(s, center, c);
        let pos = members.iter().position(|&m| m as Vertex == w)?;
        let block = pos / self.block();
        let lo = block * self.block();
        let hi = (lo + self.block()).min(members.len());
        Some((block + 1, members[lo..hi].iter().map(|&m| m as Vertex).collect()))
    }

    /// Whether some edge between `xs` and `ys` ranks below `e`.
    fn beaten(&self, s: &mut Sess<'_, G>, xs: &[Vertex], ys: &[Vertex], e: EdgeKey) -> bool {
        for &x in xs {
            for &y in ys {
                let Some(key) = EdgeKey::try_new(x, y) else { continue };
                if key < e && s.probe.adjacency(x, y).is_some() {
                    return true;
                }
            }
        }
        false
    }

    fn query_in(&self, s: &mut Sess<'_, G>, a: Vertex, b: Vertex) -> Result<Verdict5, LcaError> {
        if self.strict && (a == b || s.probe.adjacency(a, b).is_none()) {
            return Err(LcaError::NotAnEdge(a, b));
        }
        let e = EdgeKey::try_new(a, b).ok_or(LcaError::NotAnEdge(a, b))?;
        let (da, db) = (s.probe.degree(a), s.probe.degree(b));
        if da <= self.cut_lo || db <= self.cut_lo {
            return Ok(Verdict5::Light);
        }
        let ra = self.role_in(s, a, da);
        let rb = self.role_in(s, b, db);

        // Centers of both endpoints; an endpoint without any keeps all its edges.
        let mut center_sets = Vec::with_capacity(2);
        for (x, role) in [(a, ra), (b, rb)] {
            let set = match role {
                VertexRole::Heavy => Some(self.heavy_centers_in(s, x)),
                VertexRole::Bad => Some(self.light_centers_in(s, x)),
                VertexRole::Medium { rep } => {
                    if self.heavy_centers_in(s, rep).is_empty() {
                        return Ok(Verdict5::Fallback);
                    }
                    None
                }
                VertexRole::Light => None,
            };
            if set.as_ref().is_some_and(|c| c.is_empty()) {
                return Ok(Verdict5::Fallback);
            }
            center_sets.push(set);
        }
        for ((role, set), other) in [(ra, &center_sets[0]), (rb, &center_sets[1])].into_iter().zip([b, a]) {
            match role {
                VertexRole::Medium { rep } if rep == other => return Ok(Verdict5::Representative),
                VertexRole::Heavy | VertexRole::Bad => {
                    let set = set.as_ref().expect("centers computed for heavy and bad roles");
                    if set.binary_search(&(other as u32)).is_ok() {
                        return Ok(if role == VertexRole::Heavy {
                            Verdict5::HeavyCenter
                        } else {
                            Verdict5::LightCenter
                        });
                    }
                }
                _ => {}
            }
        }

        for (x, dx, y, dy, ry) in [(a, da, b, db, rb), (b, db, a, da, ra)] {
            if !self.allowed(x, dx, y, dy) {
                continue;
            }
            let (centers, c) = self.heavy_clusters_in(s, ry, y, dy);
            if centers.is_empty() {
                continue;
            }
            let i = s.probe.adjacency(x, y).ok_or(LcaError::NotAnEdge(x, y))?;
            let start = (bucket_of(i, self.cut_hi) - 1) * self.cut_hi + 1;
            for &center in centers.iter() {
                let mut earlier = false;
                for j in start..i {
                    let w = s.probe.neighbor(x, j).expect("index below a valid index");
                    let dw = s.probe.degree(w);
                    if self.allowed(x, dx, w, dw) && self.heavy_member(s, w, dw, center as Vertex, c) {
                        earlier = true;
                        break;
                    }
                }
                if !earlier {
                    return Ok(Verdict5::FirstInBucket);
                }
            }
        }

        if ra == VertexRole::Bad && rb == VertexRole::Bad {
            let (ca, cb) = (self.light_class(da), self.light_class(db));
            let (la, lb) = (self.light_centers_in(s, a), self.light_centers_in(s, b));
            for &sa in la.iter() {
                let (_, xs) = self.subset_in(s, sa as Vertex, ca, a).expect("a is in the cluster of its center");
                for &sb in lb.iter() {
                    if (sa, ca) == (sb, cb) {
                        continue;
                    }
                    let (_, ys) = self.subset_in(s, sb as Vertex, cb, b).expect("b is in the cluster of its center");
                    if !self.beaten(s, &xs, &ys, e) {
                        return Ok(Verdict5::SubsetMinimum);
                    }
                }
            }
        }
        Ok(Verdict5::Dropped)
    }

    /// Decides `{u, v}` and reports the rule that fired, with its probe cost.
    pub fn query5(&self, u: Vertex, v: Vertex) -> Result<(Verdict5, QueryOutcome), LcaError> {
        let mut s = self.session();
        let verdict = self.query_in(&mut s, u, v)?;
        let outcome = QueryOutcome {
            keep: verdict.keep(),
            probes: s.probe.counts(),
            failure: verdict == Verdict5::Fallback,
        };
        Ok((verdict, outcome))
    }

    /// The representative of a medium vertex.
    pub fn representative(&self, v: Vertex) -> Result<Option<Vertex>, LcaError> {
        let mut s = self.session();
        let deg = s.probe.degree(v);
        if self.role_by_degree(deg).is_some() {
            return Err(LcaError::NotMedium(v));
        }
        Ok(self.rep_in(&mut s, v))
    }

    pub fn role_of(&self, v: Vertex) -> VertexRole {
        let mut s = self.session();
        let deg = s.probe.degree(v);
        self.role_in(&mut s, v, deg)
    }

    /// `S1_c ∩ N(v)` for heavy `v` of class `c`.
    pub fn heavy_centers(&self, v: Vertex) -> Vec<Vertex> {
        let mut s = self.session();
        self.heavy_centers_in(&mut s, v).iter().map(|&x| x as Vertex).collect()
    }

    /// `S2_c ∩ N(v)` for bad `v` of class `c`.
    pub fn light_centers(&self, v: Vertex) -> Vec<Vertex> {
        let mut s = self.session();
        self.light_centers_in(&mut s, v).iter().map(|&x| x as Vertex).collect()
    }

    /// 1-based block index of `w` within the light cluster of `center`.
    pub fn light_subset_index(&self, center: Vertex, w: Vertex) -> Result<usize, LcaError> {
        let mut s = self.session();
        let dw = s.probe.degree(w);
        if self.role_by_degree(dw).is_some() {
            return Err(LcaError::NotInCluster { s: center, w });
        }
        let c = self.light_class(dw);
        self.subset_in(&mut s, center, c, w).map(|(i, _)| i).ok_or(LcaError::NotInCluster { s: center, w })
    }
}

impl<G: AdjacencyOracle + ?Sized> EdgeLca for Spanner5<'_, G> {
    fn query(&self, u: Vertex, v: Vertex) -> Result<QueryOutcome, LcaError> {
        self.query5(u, v).map(|(_, outcome)| outcome)
    }
}
