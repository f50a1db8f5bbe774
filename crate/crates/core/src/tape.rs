//! Shared randomness and the deterministic combinatorial helpers.
//!
//! Every random choice is a pure function of `(seed, label, args)`, so any
//! query can replay exactly the coin flips another query (or a global
//! reference build) saw.

use crate::error::LcaError;
use crate::graph::{EdgeKey, Vertex};
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn label_hash(label: &str) -> u64 {
    label.bytes().fold(0xCBF2_9CE4_8422_2325, |h, b| (h ^ u64::from(b)).wrapping_mul(0x0100_0000_01B3))
}

/// Keyed pseudorandom function over `(seed, label, args)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RandomTape {
    seed: u64,
}

impl RandomTape {
    pub fn new(seed: u64) -> Self {
        Self { seed }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn word(&self, label: &str, args: &[u64]) -> u64 {
        let mut x = mix64(self.seed.wrapping_add(GOLDEN) ^ mix64(label_hash(label)));
        for &a in args {
            x = mix64(x.wrapping_add(GOLDEN) ^ mix64(a.wrapping_add(GOLDEN)));
        }
        x
    }

    /// A uniform draw in `[0, 1)`.
    pub fn unit(&self, label: &str, args: &[u64]) -> f64 {
        (self.word(label, args) >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// A seeded stream for bulk draws.
    pub fn rng(&self, label: &str, args: &[u64]) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.word(label, args))
    }
}

/// Nested-size random center sets `S_1, ..., S_t` with `x_{i+1} = ⌈x_i / 2⌉`.
#[derive(Clone, Debug)]
pub struct CenterFamily {
    label: String,
    sizes: Vec<usize>,
    sets: Vec<Vec<u32>>,
}

impl CenterFamily {
    /// Draws each `S_i` as a uniform `x_i`-subset of `0..n` from the stream `(label, i)`.
    ///
    /// `base_size` is clamped to `n` and `levels` to at least 1.
    pub fn sample(n: usize, base_size: usize, levels: usize, tape: &RandomTape, label: &str) -> Self {
        let levels = levels.max(1);
        let mut sizes = Vec::with_capacity(levels);
        let mut x = base_size.min(n);
        for _ in 0..levels {
            sizes.push(x);
            x = x.div_ceil(2);
        }
        let sets = sizes
            .iter()
            .enumerate()
            .map(|(i, &size)| {
                let mut rng = tape.rng(label, &[i as u64 + 1]);
                let mut set: Vec<u32> = sample(&mut rng, n, size).iter().map(|v| v as u32).collect();
                set.sort_unstable();
                set
            })
            .collect();
        Self { label: label.to_string(), sizes, sets }
    }

    /// A single-level family with an explicit member list.
    pub fn explicit(label: &str, members: &[Vertex]) -> Self {
        let mut set: Vec<u32> = members.iter().map(|&v| v as u32).collect();
        set.sort_unstable();
        set.dedup();
        Self { label: label.to_string(), sizes: vec![set.len()], sets: vec![set] }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn levels(&self) -> usize {
        self.sets.len()
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    /// Members of `S_level` in ascending order; `level` is 1-based.
    pub fn level(&self, level: usize) -> impl ExactSizeIterator<Item = Vertex> + '_ {
        self.sets[level - 1].iter().map(|&v| v as Vertex)
    }

    pub fn contains(&self, level: usize, v: Vertex) -> bool {
        u32::try_from(v).is_ok_and(|v| self.sets[level - 1].binary_search(&v).is_ok())
    }
}

/// Strict rank order on canonical edges: lexicographic on `(lo, hi)`.
pub fn edge_rank_less(e1: EdgeKey, e2: EdgeKey) -> bool {
    (e1.lo(), e1.hi()) < (e2.lo(), e2.hi())
}

/// The dyadic class `i` with `deg ∈ [2^{i-1}·delta + 1, 2^i·delta]`.
pub fn class_of(deg: usize, delta: usize) -> Result<usize, LcaError> {
    if delta == 0 || deg <= delta {
        return Err(LcaError::BelowClassedRange { deg, delta });
    }
    let q = deg.div_ceil(delta);
    Ok((usize::BITS - (q - 1).leading_zeros()) as usize)
}

/// The block `j` with `i ∈ [(j-1)·delta + 1, j·delta]`, for 1-based `i`.
pub fn bucket_of(i: usize, delta: usize) -> usize {
    debug_assert!(i >= 1 && delta >= 1);
    i.div_ceil(delta)
}

/// `count` neighbor indices of `v` in `[1, deg]`, drawn with replacement.
pub fn vertex_sample(v: Vertex, deg: usize, count: usize, tape: &RandomTape, label: &str) -> Vec<usize> {
    if deg == 0 {
        return Vec::new();
    }
    (0..count as u64)
        .map(|j| {
            let w = tape.word(label, &[v as u64, j]);
            ((u128::from(w) * deg as u128) >> 64) as usize + 1
        })
        .collect()
}

/// Random cell order: compare `(rank word, center id)` lexicographically.
pub fn cell_rank(center: Vertex, tape: &RandomTape) -> (u64, Vertex) {
    (tape.word("cellrank", &[center as u64]), center)
}

pub fn is_marked(center: Vertex, tape: &RandomTape, p_mark: f64) -> bool {
    tape.unit("mark", &[center as u64]) < p_mark
}

/// `⌈log₂ x⌉` for `x ≥ 1`.
pub fn ceil_log2(x: usize) -> usize {
    debug_assert!(x >= 1);
    (usize::BITS - (x.max(1) - 1).leading_zeros()) as usize
}

pub fn log2n(n: usize) -> f64 {
    (n.max(1) as f64).log2()
}

/// `⌊n^{1/3}⌋`, exact.
pub fn cbrt_floor(n: usize) -> usize {
    let mut r = (n as f64).cbrt().round() as usize;
    while r.pow(3) > n {
        r -= 1;
    }
    while (r + 1).pow(3) <= n {
        r += 1;
    }
    r
}

/// `⌈n^{2/3}⌉`, exact: the least `h` with `h³ ≥ n²`.
pub fn two_thirds_ceil(n: usize) -> usize {
    let target = (n as u128).pow(2);
    let mut h = ((n as f64).powf(2.0 / 3.0).round() as u128).max(1);
    while h > 0 && (h - 1).pow(3) >= target {
        h -= 1;
    }
    while h.pow(3) < target {
        h += 1;
    }
    if n == 0 {
        0
    } else {
        h as usize
    }
}

/// Tunable constants. Every `Θ(·)` of the constructions scales with one of these.
#[derive(Clone, Debug, PartialEq)]
pub struct AlgParams {
    /// Multiplier of the first center-set size.
    pub c_centers: f64,
    /// Multiplier of the `log₂ n` representative sample.
    pub c_rep: f64,
    /// Multiplier in `L = c_L · n^{1/3} · log₂ n`.
    pub c_l: f64,
    /// Stretch parameter of the `O(k²)` construction.
    pub k: usize,
    /// Marking probability; `None` means `n^{-1/3}`.
    pub p_mark: Option<f64>,
    /// Validate that every queried pair is an edge (one extra adjacency probe).
    pub strict: bool,
}

impl Default for AlgParams {
    fn default() -> Self {
        Self { c_centers: 1.0, c_rep: 3.0, c_l: 1.0, k: 3, p_mark: None, strict: false }
    }
}

impl AlgParams {
    /// Checks the multipliers and caps `k` at `⌈log₂ n⌉` (at least 1).
    pub fn resolved(&self, n: usize) -> Result<Self, LcaError> {
        for (name, value) in [("c_centers", self.c_centers), ("c_rep", self.c_rep), ("c_L", self.c_l)] {
            if !(value > 0.0 && value.is_finite()) {
                return Err(LcaError::InvalidParams(format!("{name} must be positive, got {value}")));
            }
        }
        if self.k == 0 {
            return Err(LcaError::InvalidParams("k must be at least 1".into()));
        }
        if let Some(p) = self.p_mark {
            if !(0.0..=1.0).contains(&p) {
                return Err(LcaError::InvalidParams(format!("p_mark = {p} is not a probability")));
            }
        }
        let cap = ceil_log2(n.max(2));
        Ok(Self { k: self.k.min(cap), ..self.clone() })
    }

    pub fn p_mark_for(&self, n: usize) -> f64 {
        self.p_mark.unwrap_or_else(|| (n.max(1) as f64).powf(-1.0 / 3.0))
    }
}

/// `⌈c · x⌉` as a count, clamped to `n`.
pub(crate) fn scaled(c: f64, x: f64, n: usize) -> usize {
    ((c * x).ceil().max(0.0) as usize).min(n)
}
