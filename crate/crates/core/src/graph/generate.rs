//! Seeded random graph models.

use super::{EdgeKey, GraphView, Vertex};
use crate::error::GraphError;
use crate::tape::RandomTape;
use rand::seq::index::sample;
use rand::seq::SliceRandom;
use rand::Rng;
use std::fmt;
use std::str::FromStr;

/// A random graph model with its parameters.
#[derive(Clone, Debug, PartialEq)]
pub enum Model {
    /// Erdős–Rényi `G(n, p)`.
    Gnp { n: usize, p: f64 },
    /// Configuration-model pairing of `d` stubs per vertex with self-loops
    /// and duplicates dropped, so degrees are at most `d`.
    RegularIsh { n: usize, d: usize },
    /// `G(n, p)` background plus `hubs` vertices each joined to
    /// `hub_degree` uniformly chosen others.
    PlantedHubs { n: usize, p: f64, hubs: usize, hub_degree: usize },
}

impl Model {
    pub fn n(&self) -> usize {
        match *self {
            Model::Gnp { n, .. } | Model::RegularIsh { n, .. } | Model::PlantedHubs { n, .. } => n,
        }
    }

    fn validate(&self) -> Result<(), GraphError> {
        let bad = |msg: String| Err(GraphError::InvalidModel(msg));
        let n = self.n();
        if u32::try_from(n).is_err() {
            return bad(format!("n = {n} exceeds u32"));
        }
        match *self {
            Model::Gnp { p, .. } | Model::PlantedHubs { p, .. } if !(0.0..=1.0).contains(&p) => {
                bad(format!("p = {p} is not a probability"))
            }
            Model::RegularIsh { d, .. } if n > 0 && d > n - 1 => bad(format!("degree {d} exceeds n - 1")),
            Model::PlantedHubs { hubs, hub_degree, .. } if hubs > n || (hubs > 0 && hub_degree > n - 1) => {
                bad(format!("{hubs} hubs of degree {hub_degree} do not fit in n = {n}"))
            }
            _ => Ok(()),
        }
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Model::Gnp { n, p } => write!(f, "gnp:{n}:{p}"),
            Model::RegularIsh { n, d } => write!(f, "regular:{n}:{d}"),
            Model::PlantedHubs { n, p, hubs, hub_degree } => write!(f, "planted:{n}:{p}:{hubs}:{hub_degree}"),
        }
    }
}

impl FromStr for Model {
    type Err = GraphError;

    /// Accepts `gnp:<n>:<p>`, `regular:<n>:<d>` and `planted:<n>:<p>:<hubs>:<hub_degree>`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || GraphError::InvalidModel(format!("cannot parse model `{s}`"));
        let parts: Vec<&str> = s.split(':').collect();
        let int = |i: usize| parts.get(i).and_then(|t| t.parse::<usize>().ok()).ok_or_else(bad);
        let float = |i: usize| parts.get(i).and_then(|t| t.parse::<f64>().ok()).ok_or_else(bad);
        let model = match (parts[0], parts.len()) {
            ("gnp", 3) => Model::Gnp { n: int(1)?, p: float(2)? },
            ("regular", 3) => Model::RegularIsh { n: int(1)?, d: int(2)? },
            ("planted", 5) => Model::PlantedHubs { n: int(1)?, p: float(2)?, hubs: int(3)?, hub_degree: int(4)? },
            _ => return Err(bad()),
        };
        model.validate()?;
        Ok(model)
    }
}

/// Streams the `G(n, p)` pairs `(v, w)`, `w < v`, in lexicographic order of `(v, w)`
/// by geometric skipping.
fn gnp_stream(n: usize, p: f64, tape: &RandomTape, label: &str, emit: &mut dyn FnMut(Vertex, Vertex)) {
    if p <= 0.0 || n < 2 {
        return;
    }
    if p >= 1.0 {
        for v in 1..n {
            for w in 0..v {
                emit(v, w);
            }
        }
        return;
    }
    let mut rng = tape.rng(label, &[n as u64]);
    let log_q = (1.0 - p).ln();
    let (mut v, mut w) = (1usize, -1i64);
    while v < n {
        let r: f64 = rng.random();
        let skip = ((1.0 - r).ln() / log_q).floor();
        w += 1 + skip.min(1e15) as i64;
        while v < n && w >= v as i64 {
            w -= v as i64;
            v += 1;
        }
        if v < n {
            emit(v, w as usize);
        }
    }
}

/// Generates a simple graph from `model`, deterministically in `seed`.
///
/// `G(n, p)` lists come out sorted by id without materializing an edge list,
/// so large sparse-ish instances stay within memory.
pub fn gen_graph(model: &Model, seed: u64) -> Result<GraphView, GraphError> {
    model.validate()?;
    let tape = RandomTape::new(seed);
    Ok(match *model {
        Model::Gnp { n, p } => GraphView::from_edge_stream(n, |emit| {
            gnp_stream(n, p, &tape, "gen-gnp", &mut |v, w| emit(w, v));
        }),
        Model::RegularIsh { n, d } => {
            let mut rng = tape.rng("gen-regular", &[n as u64, d as u64]);
            let mut stubs: Vec<Vertex> = (0..n).flat_map(|v| std::iter::repeat_n(v, d)).collect();
            stubs.shuffle(&mut rng);
            let edges: Vec<EdgeKey> = stubs.chunks_exact(2).filter_map(|p| EdgeKey::try_new(p[0], p[1])).collect();
            from_unsorted(n, edges)
        }
        Model::PlantedHubs { n, p, hubs, hub_degree } => {
            let mut edges = Vec::new();
            gnp_stream(n, p, &tape, "gen-planted-bg", &mut |v, w| edges.push(EdgeKey::new(v, w)));
            let mut rng = tape.rng("gen-planted-hubs", &[n as u64]);
            let hub_ids = sample(&mut rng, n, hubs);
            for h in hub_ids.iter() {
                for j in sample(&mut rng, n - 1, hub_degree).iter() {
                    let w = if j >= h { j + 1 } else { j };
                    edges.push(EdgeKey::new(h, w));
                }
            }
            from_unsorted(n, edges)
        }
    })
}

fn from_unsorted(n: usize, mut edges: Vec<EdgeKey>) -> GraphView {
    edges.sort_unstable();
    edges.dedup();
    GraphView::from_sorted_edges(n, &edges)
}
