//! Small oriented graphs as one `u64` out-neighbour row per vertex, and the
//! `G(n, p)` / `G(n, m)` orientation samplers.

use rand::seq::index;
use rand::Rng;
use rug::{Integer, Rational};

use crate::error::{Error, Result};
use crate::rational::check_probability;

pub const MAX_VERTICES: usize = 64;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrientedGraph {
    n: usize,
    out: Vec<u64>,
}

impl OrientedGraph {
    pub fn empty(n: usize) -> Result<Self> {
        if n == 0 || n > MAX_VERTICES {
            return Err(Error::param("n", format!("need 1 <= n <= {MAX_VERTICES}")));
        }
        Ok(OrientedGraph { n, out: vec![0; n] })
    }

    pub(crate) fn from_rows(out: Vec<u64>) -> Self {
        OrientedGraph { n: out.len(), out }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Adds `u -> v`. Rejects loops and a second edge on the same pair.
    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<()> {
        if u >= self.n || v >= self.n || u == v {
            return Err(Error::param(
                "edge",
                format!("({u}, {v}) is not a pair of distinct vertices"),
            ));
        }
        if self.has_edge(u, v) || self.has_edge(v, u) {
            return Err(Error::param(
                "edge",
                format!("pair ({u}, {v}) already carries an edge"),
            ));
        }
        self.out[u] |= 1 << v;
        Ok(())
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.out[u] >> v & 1 == 1
    }

    pub fn out_neighbors(&self, u: usize) -> u64 {
        self.out[u]
    }

    pub fn edge_count(&self) -> usize {
        self.out.iter().map(|r| r.count_ones() as usize).sum()
    }

    /// Out-cluster of `u` as a bitset (always contains `u`).
    pub fn reach_set(&self, u: usize) -> u64 {
        reach_set(&self.out, u)
    }

    /// Whether a directed path leads from `u` to `v`; `u` reaches itself.
    pub fn reaches(&self, u: usize, v: usize) -> bool {
        self.reach_set(u) >> v & 1 == 1
    }

    /// Builds the graph from one state per pair in [`edge_pairs`] order.
    pub fn from_states(n: usize, states: &[EdgeState]) -> Result<Self> {
        let pairs = edge_pairs(n);
        if states.len() != pairs.len() {
            return Err(Error::param(
                "states",
                format!("expected {} edge states", pairs.len()),
            ));
        }
        let mut g = Self::empty(n)?;
        for (&(i, j), s) in pairs.iter().zip(states) {
            match s {
                EdgeState::Absent => {}
                EdgeState::Forward => g.out[i] |= 1 << j,
                EdgeState::Backward => g.out[j] |= 1 << i,
            }
        }
        Ok(g)
    }
}

/// Frontier expansion: OR in the rows of newly reached vertices.
#[inline]
pub(crate) fn reach_set(out: &[u64], u: usize) -> u64 {
    let mut seen = 1u64 << u;
    let mut frontier = seen;
    while frontier != 0 {
        let mut next = 0u64;
        let mut f = frontier;
        while f != 0 {
            let v = f.trailing_zeros() as usize;
            f &= f - 1;
            next |= out[v];
        }
        frontier = next & !seen;
        seen |= next;
    }
    seen
}

/// Unordered pairs `(i, j)`, `i < j`, in lexicographic order.
pub fn edge_pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EdgeState {
    Absent,
    /// `i -> j` for the pair `(i, j)`, `i < j`
    Forward,
    Backward,
}

/// The `index`-th of the `3^N` state assignments: base-3 digits, first pair
/// least significant, digit `0/1/2 = absent/forward/backward`.
pub fn decode_states(n: usize, index: u64) -> Result<Vec<EdgeState>> {
    let big_n = n * n.saturating_sub(1) / 2;
    if big_n > 40 || index >= 3u64.pow(big_n as u32) {
        return Err(Error::param("index", format!("outside [0, 3^{big_n})")));
    }
    let mut rest = index;
    Ok((0..big_n)
        .map(|_| {
            let d = rest % 3;
            rest /= 3;
            match d {
                0 => EdgeState::Absent,
                1 => EdgeState::Forward,
                _ => EdgeState::Backward,
            }
        })
        .collect())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GraphModel {
    Gnp(Rational),
    Gnm(usize),
}

impl GraphModel {
    pub fn validate(&self, n: usize) -> Result<()> {
        if !(3..=MAX_VERTICES).contains(&n) {
            return Err(Error::param("n", format!("need 3 <= n <= {MAX_VERTICES}")));
        }
        match self {
            GraphModel::Gnp(p) => check_probability("p", p),
            GraphModel::Gnm(m) if *m > n * (n - 1) / 2 => Err(Error::param(
                "m",
                format!("{m} exceeds N = {}", n * (n - 1) / 2),
            )),
            GraphModel::Gnm(_) => Ok(()),
        }
    }
}

/// `floor(p 2^64)`: a uniform `u64` lies below it with probability `p` up to `2^-64`.
pub(crate) fn threshold(p: &Rational) -> u128 {
    let scaled = Rational::from(p << 64u32);
    Integer::from(scaled.floor_ref()).to_u128().expect("p <= 1")
}

/// Pre-validated sampler state for one model.
#[derive(Clone, Debug)]
pub struct Sampler {
    n: usize,
    pairs: Vec<(usize, usize)>,
    kind: SamplerKind,
}

#[derive(Clone, Debug)]
enum SamplerKind {
    Gnp(u128),
    Gnm(usize),
}

impl Sampler {
    pub fn new(n: usize, model: &GraphModel) -> Result<Self> {
        model.validate(n)?;
        let kind = match model {
            GraphModel::Gnp(p) => SamplerKind::Gnp(threshold(p)),
            GraphModel::Gnm(m) => SamplerKind::Gnm(*m),
        };
        Ok(Sampler {
            n,
            pairs: edge_pairs(n),
            kind,
        })
    }

    /// Out-neighbour rows of one sample: pairs present independently with
    /// probability `p` (or a uniform `m`-subset), each uniformly oriented.
    pub fn sample_rows<R: Rng>(&self, rng: &mut R, out: &mut [u64]) {
        out.iter_mut().for_each(|r| *r = 0);
        let mut orient = |rng: &mut R, (i, j): (usize, usize)| {
            if rng.gen::<bool>() {
                out[i] |= 1 << j;
            } else {
                out[j] |= 1 << i;
            }
        };
        match self.kind {
            SamplerKind::Gnp(t) => {
                for &e in &self.pairs {
                    if (rng.gen::<u64>() as u128) < t {
                        orient(rng, e);
                    }
                }
            }
            SamplerKind::Gnm(m) => {
                for idx in index::sample(rng, self.pairs.len(), m) {
                    orient(rng, self.pairs[idx]);
                }
            }
        }
    }

    pub fn sample<R: Rng>(&self, rng: &mut R) -> OrientedGraph {
        let mut rows = vec![0u64; self.n];
        self.sample_rows(rng, &mut rows);
        OrientedGraph::from_rows(rows)
    }
}

/// One randomly oriented sample of `G(n, p)` or `G(n, m)`.
pub fn sample_oriented<R: Rng>(n: usize, model: &GraphModel, rng: &mut R) -> Result<OrientedGraph> {
    Ok(Sampler::new(n, model)?.sample(rng))
}
