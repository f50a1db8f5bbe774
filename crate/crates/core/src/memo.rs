//! Per-query sessions with memoized sub-computations that keep exact probe costs.
//!
//! Every memoized value records the probes its own computation made and the
//! memo keys it used directly. A session that touches a key pays for every
//! node reachable from it that it has not paid for yet, so a query is charged
//! exactly what a run with a fresh per-query cache would spend, no matter how
//! warm the shared cache is.

use crate::graph::{AdjacencyOracle, Probe, ProbeCounts};
use dashmap::DashMap;
use rustc_hash::{FxBuildHasher, FxHashSet};
use std::sync::Arc;

type NodeKey = (u8, u64);

struct CostNode {
    direct: ProbeCounts,
    deps: Box<[NodeKey]>,
}

pub(crate) struct MemoTable<V> {
    map: DashMap<u64, V, FxBuildHasher>,
}

impl<V> Default for MemoTable<V> {
    fn default() -> Self {
        Self { map: DashMap::with_hasher(FxBuildHasher) }
    }
}

impl<V: Clone> MemoTable<V> {
    fn get(&self, key: u64) -> Option<V> {
        self.map.get(&key).map(|e| e.value().clone())
    }
}

/// Typed memo tables plus the cost graph that links their entries.
pub(crate) struct Store<T> {
    pub tables: T,
    costs: DashMap<NodeKey, Arc<CostNode>, FxBuildHasher>,
}

impl<T: Default> Default for Store<T> {
    fn default() -> Self {
        Self { tables: T::default(), costs: DashMap::with_hasher(FxBuildHasher) }
    }
}

/// Whether memo tables live for the whole context or for one query.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum CacheMode {
    #[default]
    Shared,
    PerQuery,
}

enum Backing<'a, T> {
    Shared(&'a Store<T>),
    Local(Arc<Store<T>>),
}

pub(crate) struct Session<'a, G: ?Sized, T> {
    pub probe: Probe<'a, G>,
    store: Backing<'a, T>,
    charged: FxHashSet<NodeKey>,
    charged_total: ProbeCounts,
    deps: Vec<NodeKey>,
}

fn minus(a: ProbeCounts, b: ProbeCounts) -> ProbeCounts {
    ProbeCounts { degree: a.degree - b.degree, neighbor: a.neighbor - b.neighbor, adjacency: a.adjacency - b.adjacency }
}

impl<'a, G: AdjacencyOracle + ?Sized, T: Default> Session<'a, G, T> {
    pub fn new(oracle: &'a G, shared: &'a Store<T>, mode: CacheMode) -> Self {
        let store = match mode {
            CacheMode::Shared => Backing::Shared(shared),
            CacheMode::PerQuery => Backing::Local(Arc::default()),
        };
        Self::with_store(oracle, store)
    }

    fn with_store(oracle: &'a G, store: Backing<'a, T>) -> Self {
        Self {
            probe: Probe::new(oracle),
            store,
            charged: FxHashSet::default(),
            charged_total: ProbeCounts::default(),
            deps: Vec::new(),
        }
    }

    fn store(&self) -> &Store<T> {
        match &self.store {
            Backing::Shared(s) => s,
            Backing::Local(s) => s,
        }
    }

    fn child(&self) -> Self {
        let store = match &self.store {
            Backing::Shared(s) => Backing::Shared(*s),
            Backing::Local(s) => Backing::Local(Arc::clone(s)),
        };
        Self::with_store(self.probe.oracle(), store)
    }

    fn charge(&mut self, root: NodeKey) {
        let mut stack = vec![root];
        while let Some(key) = stack.pop() {
            if !self.charged.insert(key) {
                continue;
            }
            let node = self.store().costs.get(&key).map(|n| Arc::clone(n.value()));
            let node = node.expect("memo entry without a cost node");
            self.probe.charge(node.direct);
            self.charged_total += node.direct;
            stack.extend(node.deps.iter().copied());
        }
    }

    pub fn memo<V: Clone>(
        &mut self,
        tag: u8,
        key: u64,
        select: fn(&T) -> &MemoTable<V>,
        compute: impl FnOnce(&mut Self) -> V,
    ) -> V {
        let node = (tag, key);
        self.deps.push(node);
        if let Some(hit) = select(&self.store().tables).get(key) {
            self.charge(node);
            return hit;
        }
        let mut child = self.child();
        let value = compute(&mut child);
        let direct = minus(child.probe.counts(), child.charged_total);
        let mut deps = std::mem::take(&mut child.deps);
        deps.sort_unstable();
        deps.dedup();
        drop(child);
        let store = self.store();
        store.costs.insert(node, Arc::new(CostNode { direct, deps: deps.into() }));
        select(&store.tables).map.insert(key, value.clone());
        self.charge(node);
        value
    }
}
