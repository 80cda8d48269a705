//! Similarity graphs over DFA states.
//!
//! The space reduction graph (SRG) is the complete graph weighted by
//! [`similarity`]. The sparse variant (SSRG) keeps a star around the start
//! state and adds the edges found by `r` rounds of bucketing states on the
//! targets of `k` randomly chosen symbols.

use rand::seq::index;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::automata::Dfa;
use crate::d2fa::SimRows;
use crate::{Error, Result, StateId};

/// Largest state count for which the dense graph is built by default.
///
/// The complete graph at this size holds 2·10⁸ edges, about 2.4 GB.
pub const DEFAULT_DENSE_CAP: usize = 20_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Edge {
    pub u: StateId,
    pub v: StateId,
    pub weight: u32,
}

impl Edge {
    pub fn new(u: StateId, v: StateId, weight: u32) -> Edge {
        Edge {
            u: u.min(v),
            v: u.max(v),
            weight,
        }
    }

    /// The endpoint that is not `x`.
    pub fn other(&self, x: StateId) -> StateId {
        if self.u == x {
            self.v
        } else {
            self.u
        }
    }
}

/// Undirected weighted graph with edges kept in Kruskal order: weight
/// descending, then smaller endpoint, then larger endpoint.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightedGraph {
    node_count: usize,
    edges: Vec<Edge>,
}

fn kruskal_order(a: &Edge, b: &Edge) -> std::cmp::Ordering {
    b.weight
        .cmp(&a.weight)
        .then(a.u.cmp(&b.u))
        .then(a.v.cmp(&b.v))
}

impl WeightedGraph {
    /// Validates and sorts the edge list; endpoints are normalised to `u < v`.
    pub fn new(node_count: usize, edges: impl IntoIterator<Item = Edge>) -> Result<WeightedGraph> {
        let mut edges: Vec<Edge> = edges
            .into_iter()
            .map(|e| Edge::new(e.u, e.v, e.weight))
            .collect();
        for e in &edges {
            if e.v as usize >= node_count {
                return Err(Error::StateOutOfRange {
                    id: e.v as u64,
                    n: node_count,
                });
            }
            if e.u == e.v {
                return Err(Error::InvalidParams(format!("self-edge at node {}", e.u)));
            }
        }
        edges.sort_unstable_by(|a, b| a.u.cmp(&b.u).then(a.v.cmp(&b.v)));
        if let Some(w) = edges
            .windows(2)
            .find(|w| (w[0].u, w[0].v) == (w[1].u, w[1].v))
        {
            return Err(Error::InvalidParams(format!(
                "duplicate edge ({}, {})",
                w[0].u, w[0].v
            )));
        }
        edges.sort_unstable_by(kruskal_order);
        Ok(WeightedGraph { node_count, edges })
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edges in Kruskal order.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn total_weight(&self) -> u64 {
        self.edges.iter().map(|e| e.weight as u64).sum()
    }

    pub fn adjacency(&self) -> Adjacency {
        Adjacency::new(self.node_count, &self.edges)
    }

    /// Writes the `SRG 1` debug dump: one `u v w` line per edge.
    pub fn write_dump<W: std::io::Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "SRG 1")?;
        for e in &self.edges {
            writeln!(out, "{} {} {}", e.u, e.v, e.weight)?;
        }
        Ok(())
    }
}

/// Compressed adjacency lists; each entry is `(neighbor, weight)`.
#[derive(Debug, Clone)]
pub struct Adjacency {
    offsets: Vec<usize>,
    entries: Vec<(StateId, u32)>,
}

impl Adjacency {
    pub fn new(node_count: usize, edges: &[Edge]) -> Adjacency {
        let mut offsets = vec![0usize; node_count + 1];
        for e in edges {
            offsets[e.u as usize + 1] += 1;
            offsets[e.v as usize + 1] += 1;
        }
        for i in 1..offsets.len() {
            offsets[i] += offsets[i - 1];
        }
        let mut fill = offsets.clone();
        let mut entries = vec![(0, 0); offsets[node_count]];
        for e in edges {
            entries[fill[e.u as usize]] = (e.v, e.weight);
            fill[e.u as usize] += 1;
            entries[fill[e.v as usize]] = (e.u, e.weight);
            fill[e.v as usize] += 1;
        }
        Adjacency { offsets, entries }
    }

    pub fn node_count(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn neighbors(&self, u: StateId) -> &[(StateId, u32)] {
        &self.entries[self.offsets[u as usize]..self.offsets[u as usize + 1]]
    }
}

/// Builds the complete similarity graph.
pub fn build_srg(dfa: &Dfa) -> Result<WeightedGraph> {
    build_srg_capped(dfa, DEFAULT_DENSE_CAP)
}

const TILE: usize = 64;

/// Like [`build_srg`] with an explicit limit on the state count.
///
/// Weights are computed tile by tile so each streamed row is compared
/// against a cache-resident block; edges are then placed by a counting sort
/// on weight, which yields Kruskal order directly.
pub fn build_srg_capped(dfa: &Dfa, cap: usize) -> Result<WeightedGraph> {
    let n = dfa.state_count();
    if n > cap {
        return Err(Error::DenseCapExceeded { n, cap });
    }
    let m = dfa.alphabet_size();
    let pairs = n * n.saturating_sub(1) / 2;
    let tri = |u: usize, v: usize| u * n - u * (u + 1) / 2 + (v - u - 1);

    let rows = SimRows::new(dfa);
    let mut weights = vec![0u16; pairs];
    let mut histogram = vec![0usize; m + 1];
    for lo in (0..n).step_by(TILE) {
        let hi = (lo + TILE).min(n);
        for v in lo + 1..n {
            for u in lo..hi.min(v) {
                let w = rows.similarity(u as StateId, v as StateId);
                weights[tri(u, v)] = w as u16;
                histogram[w] += 1;
            }
        }
    }

    let mut next_slot = vec![0usize; m + 1];
    let mut acc = 0;
    for w in (0..=m).rev() {
        next_slot[w] = acc;
        acc += histogram[w];
    }
    let mut edges = vec![
        Edge {
            u: 0,
            v: 0,
            weight: 0
        };
        pairs
    ];
    let mut idx = 0;
    for u in 0..n {
        for v in u + 1..n {
            let w = weights[idx] as usize;
            idx += 1;
            edges[next_slot[w]] = Edge {
                u: u as StateId,
                v: v as StateId,
                weight: w as u32,
            };
            next_slot[w] += 1;
        }
    }
    Ok(WeightedGraph {
        node_count: n,
        edges,
    })
}

/// Locality-sensitive hashing parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LshParams {
    /// Distinct symbols sampled per round.
    pub k: usize,
    /// Number of rounds.
    pub rounds: usize,
    pub seed: u64,
}

impl Default for LshParams {
    fn default() -> Self {
        LshParams {
            k: 8,
            rounds: 512,
            seed: 0,
        }
    }
}

impl LshParams {
    pub fn new(k: usize, rounds: usize, seed: u64) -> LshParams {
        LshParams { k, rounds, seed }
    }

    pub fn validate(&self, alphabet_size: usize) -> Result<()> {
        if self.k == 0 || self.k > alphabet_size {
            return Err(Error::InvalidParams(format!(
                "k = {} must be in 1..={alphabet_size}",
                self.k
            )));
        }
        Ok(())
    }
}

/// The random stream of one round, derived from `(seed, round)` alone.
pub fn round_rng(seed: u64, round: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(round as u64);
    rng
}

/// `k` distinct symbols drawn uniformly from `0..alphabet_size`, in draw order.
pub fn sample_symbols<R: Rng + ?Sized>(rng: &mut R, alphabet_size: usize, k: usize) -> Vec<usize> {
    index::sample(rng, alphabet_size, k).into_vec()
}

const SIGNATURE_SALT: u64 = 0x9E37_79B9_7F4A_7C15;

#[inline]
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Hash of the target sequence `δ(v, c1), …, δ(v, ck)`.
///
/// Each step feeds one target through a bijective 64-bit mixer, so equal
/// sequences always collide and distinct ones collide with probability
/// about 2⁻⁶⁴ per position over the choice of `round_seed`.
#[inline]
pub fn lsh_signature(dfa: &Dfa, v: StateId, symbols: &[usize], round_seed: u64) -> u64 {
    let row = dfa.row(v);
    let mut h = mix64(round_seed ^ SIGNATURE_SALT);
    for &c in symbols {
        h = mix64(h ^ row[c] as u64);
    }
    h
}

/// Runs the LSH rounds and reports, for every state in a bucket of size at
/// least two, one uniformly chosen partner from the same bucket.
pub(crate) fn for_each_lsh_pair(
    dfa: &Dfa,
    params: &LshParams,
    mut visit: impl FnMut(StateId, StateId),
) -> Result<()> {
    params.validate(dfa.alphabet_size())?;
    let n = dfa.state_count();
    if params.rounds == 0 {
        return Ok(());
    }
    // Column-major copy: each round reads k whole columns sequentially
    // instead of k scattered cells per row.
    let m = dfa.alphabet_size();
    let mut columns = vec![0 as StateId; n * m];
    for v in 0..n {
        for (c, &t) in dfa.row(v as StateId).iter().enumerate() {
            columns[c * n + v] = t;
        }
    }
    let mut signature = vec![0u64; n];
    let mut keyed: Vec<(u64, StateId)> = Vec::with_capacity(n);
    for round in 0..params.rounds {
        let mut rng = round_rng(params.seed, round);
        let symbols = sample_symbols(&mut rng, m, params.k);
        let round_seed = rng.next_u64();
        // Same chain as `lsh_signature`, one symbol at a time for all states.
        signature.fill(mix64(round_seed ^ SIGNATURE_SALT));
        for &c in &symbols {
            for (h, &t) in signature.iter_mut().zip(&columns[c * n..(c + 1) * n]) {
                *h = mix64(*h ^ t as u64);
            }
        }
        keyed.clear();
        keyed.extend(signature.iter().zip(0..).map(|(&h, v)| (h, v)));
        keyed.sort_unstable();
        let mut lo = 0;
        while lo < n {
            let mut hi = lo + 1;
            while hi < n && keyed[hi].0 == keyed[lo].0 {
                hi += 1;
            }
            let size = hi - lo;
            if size >= 2 {
                for pos in 0..size {
                    let mut pick = rng.gen_range(0..size - 1);
                    if pick >= pos {
                        pick += 1;
                    }
                    visit(keyed[lo + pos].1, keyed[lo + pick].1);
                }
            }
            lo = hi;
        }
    }
    Ok(())
}

#[inline]
fn pack(u: StateId, v: StateId) -> u64 {
    let (a, b) = if u < v { (u, v) } else { (v, u) };
    (a as u64) << 32 | b as u64
}

/// Builds the sparse space reduction graph.
///
/// The edge set is the start-state star plus every sampled bucket pair;
/// repeated pairs are kept once. Weights are computed after sampling, once
/// per distinct edge.
pub fn build_ssrg(dfa: &Dfa, params: &LshParams) -> Result<WeightedGraph> {
    let n = dfa.state_count();
    let q0 = dfa.start();
    let mut keys: Vec<u64> = (0..n as StateId)
        .filter(|&u| u != q0)
        .map(|u| pack(q0, u))
        .collect();
    let mut settled = keys.len();
    for_each_lsh_pair(dfa, params, |u, v| {
        keys.push(pack(u, v));
        // Bound the buffer without giving up the final sort-dedup.
        if keys.len() > 4 * settled.max(n) {
            keys.sort_unstable();
            keys.dedup();
            settled = keys.len();
        }
    })?;
    keys.sort_unstable();
    keys.dedup();
    let rows = SimRows::new(dfa);
    let mut edges: Vec<Edge> = keys
        .into_iter()
        .map(|key| {
            let (u, v) = ((key >> 32) as StateId, key as StateId);
            Edge {
                u,
                v,
                weight: rows.similarity(u, v) as u32,
            }
        })
        .collect();
    edges.sort_unstable_by(kruskal_order);
    Ok(WeightedGraph {
        node_count: n,
        edges,
    })
}
