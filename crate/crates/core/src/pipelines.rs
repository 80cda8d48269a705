//! The eight end-to-end compression algorithms.
//!
//! | id           | graph | forest                                   |
//! |--------------|-------|------------------------------------------|
//! | `orig`       | SRG   | maximum spanning tree                    |
//! | `refined`    | SRG   | bounded-diameter Kruskal, Δ = 2L         |
//! | `cut`        | SRG   | penalized Prim, then cut to Δ = 2L       |
//! | `adfa`       | none  | best lower-depth state per state         |
//!
//! Each `-sp` variant replaces the complete similarity graph (or the
//! all-pairs A-DFA scan) with LSH sampling.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use crate::automata::{bfs_depths, Dfa};
use crate::d2fa::{
    build_from_forest, CompressionReport, D2fa, PhaseTimings, ReportParams, SimRows,
};
use crate::forest::{
    central_node, cut_to_diameter, kruskal_bounded_diameter, kruskal_mst, prim_penalized,
    root_and_direct, Forest,
};
use crate::graphs::{
    build_srg_capped, build_ssrg, for_each_lsh_pair, LshParams, WeightedGraph, DEFAULT_DENSE_CAP,
};
use crate::{Error, Result, StateId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algorithm {
    Orig,
    OrigSparse,
    Refined,
    RefinedSparse,
    Cut,
    CutSparse,
    Adfa,
    AdfaSparse,
}

impl Algorithm {
    pub const ALL: [Algorithm; 8] = [
        Algorithm::Orig,
        Algorithm::OrigSparse,
        Algorithm::Refined,
        Algorithm::RefinedSparse,
        Algorithm::Cut,
        Algorithm::CutSparse,
        Algorithm::Adfa,
        Algorithm::AdfaSparse,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Algorithm::Orig => "orig",
            Algorithm::OrigSparse => "orig-sp",
            Algorithm::Refined => "refined",
            Algorithm::RefinedSparse => "refined-sp",
            Algorithm::Cut => "cut",
            Algorithm::CutSparse => "cut-sp",
            Algorithm::Adfa => "adfa",
            Algorithm::AdfaSparse => "adfa-sp",
        }
    }

    pub fn is_sparse(self) -> bool {
        matches!(
            self,
            Algorithm::OrigSparse
                | Algorithm::RefinedSparse
                | Algorithm::CutSparse
                | Algorithm::AdfaSparse
        )
    }

    /// Whether the algorithm takes the longest-delay bound `L`.
    pub fn bounds_delay(self) -> bool {
        matches!(
            self,
            Algorithm::Refined | Algorithm::RefinedSparse | Algorithm::Cut | Algorithm::CutSparse
        )
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.id() == s)
            .ok_or_else(|| Error::UnknownAlgorithm(s.to_string()))
    }
}

/// An algorithm together with its parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AlgoSpec {
    pub algorithm: Algorithm,
    /// Longest-delay bound `L`; used by `refined` and `cut`.
    pub delay_bound: usize,
    /// Used by the sparse variants.
    pub lsh: LshParams,
    /// Largest state count the dense graph may be built for.
    pub dense_cap: usize,
}

impl AlgoSpec {
    pub const DEFAULT_DELAY_BOUND: usize = 2;

    pub fn new(algorithm: Algorithm) -> AlgoSpec {
        AlgoSpec {
            algorithm,
            delay_bound: Self::DEFAULT_DELAY_BOUND,
            lsh: LshParams::default(),
            dense_cap: DEFAULT_DENSE_CAP,
        }
    }

    pub fn with_delay_bound(mut self, l: usize) -> AlgoSpec {
        self.delay_bound = l;
        self
    }

    pub fn with_lsh(mut self, lsh: LshParams) -> AlgoSpec {
        self.lsh = lsh;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> AlgoSpec {
        self.lsh.seed = seed;
        self
    }

    pub fn validate(&self, alphabet_size: usize) -> Result<()> {
        if self.algorithm.bounds_delay() && self.delay_bound == 0 {
            return Err(Error::InvalidParams("L must be at least 1".into()));
        }
        if self.algorithm.is_sparse() {
            self.lsh.validate(alphabet_size)?;
        }
        Ok(())
    }

    fn report_params(&self) -> ReportParams {
        let sparse = self.algorithm.is_sparse();
        ReportParams {
            delay_bound: self.algorithm.bounds_delay().then_some(self.delay_bound),
            k: sparse.then_some(self.lsh.k),
            r: sparse.then_some(self.lsh.rounds),
            seed: sparse.then_some(self.lsh.seed),
        }
    }
}

/// Runs the algorithm described by `spec`.
pub fn compress(dfa: &Dfa, spec: &AlgoSpec) -> Result<(D2fa, CompressionReport)> {
    spec.validate(dfa.alphabet_size())?;
    let mut clock = PhaseClock::start();
    let (forest, edge_count) = match spec.algorithm {
        Algorithm::Orig | Algorithm::OrigSparse => {
            let graph = similarity_graph(dfa, spec)?;
            clock.graph_done();
            (
                root_and_direct(&kruskal_mst(&graph)),
                Some(graph.edge_count()),
            )
        }
        Algorithm::Refined | Algorithm::RefinedSparse => {
            let graph = similarity_graph(dfa, spec)?;
            clock.graph_done();
            let tree = kruskal_bounded_diameter(&graph, 2 * spec.delay_bound);
            (root_and_direct(&tree), Some(graph.edge_count()))
        }
        Algorithm::Cut | Algorithm::CutSparse => {
            let graph = similarity_graph(dfa, spec)?;
            clock.graph_done();
            (
                cut_forest(dfa, &graph, spec.delay_bound)?,
                Some(graph.edge_count()),
            )
        }
        Algorithm::Adfa => {
            let depth = bfs_depths(dfa);
            clock.graph_done();
            (adfa_forest(dfa, depth.as_slice()), None)
        }
        Algorithm::AdfaSparse => {
            let depth = bfs_depths(dfa);
            clock.graph_done();
            (adfa_sparse_forest(dfa, depth.as_slice(), &spec.lsh)?, None)
        }
    };
    clock.forest_done();
    let d2fa = build_from_forest(dfa, &forest)?;
    let timings = clock.finish();
    let report = report_for(dfa, &d2fa, spec, timings, edge_count);
    Ok((d2fa, report))
}

/// `orig` or `orig-sp`.
pub fn compress_orig(dfa: &Dfa, sparse: bool, lsh: LshParams) -> Result<(D2fa, CompressionReport)> {
    let algorithm = if sparse {
        Algorithm::OrigSparse
    } else {
        Algorithm::Orig
    };
    compress(dfa, &AlgoSpec::new(algorithm).with_lsh(lsh))
}

/// `refined` or `refined-sp` with delay bound `l`.
pub fn compress_refined(
    dfa: &Dfa,
    l: usize,
    sparse: bool,
    lsh: LshParams,
) -> Result<(D2fa, CompressionReport)> {
    let algorithm = if sparse {
        Algorithm::RefinedSparse
    } else {
        Algorithm::Refined
    };
    compress(
        dfa,
        &AlgoSpec::new(algorithm).with_delay_bound(l).with_lsh(lsh),
    )
}

/// `cut` or `cut-sp` with delay bound `l`.
pub fn compress_cut(
    dfa: &Dfa,
    l: usize,
    sparse: bool,
    lsh: LshParams,
) -> Result<(D2fa, CompressionReport)> {
    let algorithm = if sparse {
        Algorithm::CutSparse
    } else {
        Algorithm::Cut
    };
    compress(
        dfa,
        &AlgoSpec::new(algorithm).with_delay_bound(l).with_lsh(lsh),
    )
}

pub fn compress_adfa(dfa: &Dfa) -> Result<(D2fa, CompressionReport)> {
    compress(dfa, &AlgoSpec::new(Algorithm::Adfa))
}

pub fn compress_adfa_sparse(dfa: &Dfa, lsh: LshParams) -> Result<(D2fa, CompressionReport)> {
    compress(dfa, &AlgoSpec::new(Algorithm::AdfaSparse).with_lsh(lsh))
}

fn similarity_graph(dfa: &Dfa, spec: &AlgoSpec) -> Result<WeightedGraph> {
    if spec.algorithm.is_sparse() {
        build_ssrg(dfa, &spec.lsh)
    } else {
        build_srg_capped(dfa, spec.dense_cap)
    }
}

fn cut_forest(dfa: &Dfa, graph: &WeightedGraph, l: usize) -> Result<Forest> {
    let mst = kruskal_mst(graph);
    let v0 = central_node(&mst, dfa.start());
    let grown = prim_penalized(graph, v0)?;
    Ok(cut_to_diameter(&grown.tree, 2 * l).forest)
}

/// Every state with positive depth defaults to its most similar state of
/// smaller depth (ties: smaller depth, then smaller id), provided the
/// default saves at least one transition.
fn adfa_forest(dfa: &Dfa, depth: &[u32]) -> Forest {
    let n = dfa.state_count();
    let mut by_depth: Vec<StateId> = (0..n as StateId).collect();
    by_depth.sort_by_key(|&v| (depth[v as usize], v));
    let rows = SimRows::new(dfa);
    let mut parent = vec![None; n];
    for (i, &u) in by_depth.iter().enumerate() {
        let du = depth[u as usize];
        if du == 0 {
            continue;
        }
        let mut best: Option<(usize, StateId)> = None;
        // Earlier candidates win ties, which yields (min depth, min id).
        for &v in by_depth[..i]
            .iter()
            .take_while(|&&v| depth[v as usize] < du)
        {
            let s = rows.similarity(u, v);
            if best.is_none_or(|(b, _)| s > b) {
                best = Some((s, v));
            }
        }
        if let Some((s, v)) = best {
            if s >= 2 {
                parent[u as usize] = Some(v);
            }
        }
    }
    Forest::from_parents(parent).expect("depth-decreasing defaults are acyclic")
}

/// Sparse A-DFA: each LSH partner `v` of `u` replaces `u`'s default when it
/// is strictly shallower and strictly more similar than the current one.
/// "No default" counts as similarity 1, so only saving defaults are installed.
fn adfa_sparse_forest(dfa: &Dfa, depth: &[u32], lsh: &LshParams) -> Result<Forest> {
    let n = dfa.state_count();
    let mut parent: Vec<Option<StateId>> = vec![None; n];
    let mut best = vec![1usize; n];
    let rows = SimRows::new(dfa);
    for_each_lsh_pair(dfa, lsh, |u, v| {
        if depth[v as usize] < depth[u as usize] {
            let s = rows.similarity(u, v);
            if s > best[u as usize] {
                best[u as usize] = s;
                parent[u as usize] = Some(v);
            }
        }
    })?;
    Ok(Forest::from_parents(parent).expect("depth-decreasing defaults are acyclic"))
}

struct PhaseClock {
    origin: Instant,
    mark: Instant,
    timings: PhaseTimings,
}

fn millis(from: Instant, to: Instant) -> f64 {
    to.duration_since(from).as_secs_f64() * 1e3
}

impl PhaseClock {
    fn start() -> PhaseClock {
        let now = Instant::now();
        PhaseClock {
            origin: now,
            mark: now,
            timings: PhaseTimings::default(),
        }
    }

    fn lap(&mut self) -> f64 {
        let now = Instant::now();
        let ms = millis(self.mark, now);
        self.mark = now;
        ms
    }

    fn graph_done(&mut self) {
        self.timings.graph = self.lap();
    }

    fn forest_done(&mut self) {
        self.timings.forest = self.lap();
    }

    fn finish(mut self) -> PhaseTimings {
        self.timings.build = self.lap();
        self.timings.total = millis(self.origin, self.mark);
        self.timings
    }
}

fn report_for(
    dfa: &Dfa,
    d2fa: &D2fa,
    spec: &AlgoSpec,
    elapsed_ms: PhaseTimings,
    srg_edge_count: Option<usize>,
) -> CompressionReport {
    let labeled_before = dfa.state_count() * dfa.alphabet_size();
    let total_after = d2fa.total_transitions();
    CompressionReport {
        algorithm: spec.algorithm.id().to_string(),
        params: spec.report_params(),
        n: dfa.state_count(),
        alphabet_size: dfa.alphabet_size(),
        labeled_before,
        labeled_after: d2fa.labeled_count(),
        default_count: d2fa.default_count(),
        total_after,
        compression_ratio: total_after as f64 / labeled_before as f64,
        longest_delay: d2fa.longest_delay(),
        elapsed_ms,
        srg_edge_count,
    }
}
