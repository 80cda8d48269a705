//! Corpus builders and brute-force oracles shared by the integration tests.
#![allow(dead_code)]

use d2fa_core::automata::{
    compile_regex_set_over, generate_clustered_dfa, generate_rule_set, toy_dfa, CompileOptions,
    Dfa, RuleShape,
};
use d2fa_core::d2fa::D2fa;
use d2fa_core::graphs::{Edge, WeightedGraph};
use d2fa_core::{Error, StateId};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub const EXAMPLE_PATTERN: &str = ".*((ab+c+)|(cd+)|(bd+e))";

/// Three alternatives in one rule, compiled over the five symbols `a..e`.
pub fn example_dfa(minimize: bool) -> Dfa {
    let opts = CompileOptions {
        alphabet: b"abcde".to_vec(),
        state_cap: 1000,
        minimize,
    };
    compile_regex_set_over(&[EXAMPLE_PATTERN], &opts).unwrap()
}

pub struct Named {
    pub name: String,
    pub dfa: Dfa,
    pub clustered: bool,
}

/// 50 clustered DFAs with log-uniform `n` in `[16, 4096]`.
pub fn clustered_corpus() -> Vec<Named> {
    let mut r = rng(0xC0FFEE);
    (0..50)
        .map(|i| {
            let n = (16f64 * 256f64.powf(r.gen::<f64>())).round() as usize;
            let m = [16, 64, 256][r.gen_range(0..3)];
            let clusters = r.gen_range(2..=32usize).min(n);
            let noise = [0.0, 0.02, 0.05, 0.2][r.gen_range(0..4)];
            let seed = r.gen();
            Named {
                name: format!("clustered#{i} n={n} m={m} c={clusters} p={noise}"),
                dfa: generate_clustered_dfa(n, m, clusters, noise, seed).unwrap(),
                clustered: true,
            }
        })
        .collect()
}

/// Synthetic rule sets compiled over 256 symbols, none larger than
/// `max_states`. Each set grows its rule count until the next size would
/// exceed the limit.
pub fn regex_corpus(count: usize, max_states: usize) -> Vec<Named> {
    let shape = RuleShape::default();
    let mut out = Vec::new();
    for seed in 0..count as u64 {
        let rules = generate_rule_set(64, &shape, 1000 + seed);
        let mut opts = CompileOptions::with_alphabet_size(256).unwrap();
        opts.state_cap = max_states;
        let target = 1 + seed as usize * 3;
        let mut best = None;
        for take in 1..=target.min(rules.len()) {
            match compile_regex_set_over(&rules[..take], &opts) {
                Ok(dfa) => best = Some((take, dfa)),
                Err(Error::StateBlowup { .. }) => break,
                Err(e) => panic!("synthetic rules failed to compile: {e}"),
            }
        }
        if let Some((take, dfa)) = best {
            out.push(Named {
                name: format!("rules#{seed} ({take} rules, n={})", dfa.state_count()),
                dfa,
                clustered: false,
            });
        }
    }
    out
}

pub fn small_corpus() -> Vec<Named> {
    vec![
        Named {
            name: "toy".into(),
            dfa: toy_dfa(),
            clustered: false,
        },
        Named {
            name: "example".into(),
            dfa: example_dfa(true),
            clustered: false,
        },
    ]
}

pub fn similarity(dfa: &Dfa, u: StateId, v: StateId) -> usize {
    (0..dfa.alphabet_size())
        .filter(|&c| dfa.next(u, c) == dfa.next(v, c))
        .count()
}

/// Checks both savings identities for a D²FA built from `dfa`.
pub fn check_savings(dfa: &Dfa, d: &D2fa) -> Result<(), String> {
    let n = dfa.state_count();
    let m = dfa.alphabet_size();
    let mut sim_sum = 0usize;
    let mut saved = 0isize;
    for u in 0..n as StateId {
        if let Some(f) = d.default_of(u) {
            let s = similarity(dfa, u, f);
            sim_sum += s;
            saved += s as isize - 1;
        }
    }
    let before = (n * m) as isize;
    let total_after = (d.labeled_count() + d.default_count()) as isize;
    if before - total_after != saved {
        return Err(format!(
            "saved {} but Σ(sim − 1) = {saved}",
            before - total_after
        ));
    }
    if d.labeled_count() != n * m - sim_sum {
        return Err(format!(
            "labeled_after {} but n·m − Σ sim = {}",
            d.labeled_count(),
            n * m - sim_sum
        ));
    }
    Ok(())
}

/// Random strings over the DFA's symbols with lengths in `0..=max_len`.
pub fn random_strings(
    r: &mut ChaCha8Rng,
    alphabet_size: usize,
    count: usize,
    max_len: usize,
) -> Vec<Vec<u8>> {
    (0..count)
        .map(|_| {
            let len = r.gen_range(0..=max_len);
            (0..len)
                .map(|_| r.gen_range(0..alphabet_size) as u8)
                .collect()
        })
        .collect()
}

/// Connected graph on `n` nodes: a random spanning tree plus random extra
/// edges, weights in `0..=max_weight` (small ranges force ties).
pub fn random_connected_graph(r: &mut ChaCha8Rng, n: usize, max_weight: u32) -> WeightedGraph {
    let mut present = vec![vec![false; n]; n];
    let mut edges = Vec::new();
    for (u, v) in random_tree(r, n) {
        present[u as usize][v as usize] = true;
        present[v as usize][u as usize] = true;
        edges.push(Edge::new(u, v, r.gen_range(0..=max_weight)));
    }
    let density: f64 = r.gen();
    for u in 0..n {
        for v in u + 1..n {
            if !present[u][v] && r.gen_bool(density) {
                edges.push(Edge::new(
                    u as StateId,
                    v as StateId,
                    r.gen_range(0..=max_weight),
                ));
            }
        }
    }
    WeightedGraph::new(n, edges).unwrap()
}

/// Uniform random labelled tree (random Prüfer sequence).
pub fn random_tree(r: &mut ChaCha8Rng, n: usize) -> Vec<(StateId, StateId)> {
    if n < 2 {
        return Vec::new();
    }
    let seq: Vec<usize> = (0..n - 2).map(|_| r.gen_range(0..n)).collect();
    prufer_decode(n, &seq)
}

fn prufer_decode(n: usize, seq: &[usize]) -> Vec<(StateId, StateId)> {
    let mut degree = vec![1usize; n];
    for &x in seq {
        degree[x] += 1;
    }
    let mut edges = Vec::with_capacity(n - 1);
    for &x in seq {
        let leaf = (0..n).find(|&l| degree[l] == 1).unwrap();
        edges.push((leaf as StateId, x as StateId));
        degree[leaf] -= 1;
        degree[x] -= 1;
    }
    let rest: Vec<usize> = (0..n).filter(|&l| degree[l] == 1).collect();
    edges.push((rest[0] as StateId, rest[1] as StateId));
    edges
}

/// Maximum spanning tree weight by enumerating every labelled tree on
/// `n` nodes through its Prüfer sequence. `None` if the graph has no
/// spanning tree.
pub fn exhaustive_max_spanning_tree(graph: &WeightedGraph) -> Option<u64> {
    let n = graph.node_count();
    if n <= 1 {
        return Some(0);
    }
    let mut weight = vec![vec![None; n]; n];
    for e in graph.edges() {
        weight[e.u as usize][e.v as usize] = Some(e.weight as u64);
        weight[e.v as usize][e.u as usize] = Some(e.weight as u64);
    }
    if n == 2 {
        return weight[0][1];
    }
    let mut seq = vec![0usize; n - 2];
    let mut best = None;
    loop {
        let total: Option<u64> = prufer_decode(n, &seq)
            .into_iter()
            .map(|(u, v)| weight[u as usize][v as usize])
            .sum();
        if let Some(t) = total {
            best = Some(best.map_or(t, |b: u64| b.max(t)));
        }
        // Odometer increment over n^(n-2) sequences.
        let mut i = 0;
        loop {
            if i == seq.len() {
                return best;
            }
            seq[i] += 1;
            if seq[i] < n {
                break;
            }
            seq[i] = 0;
            i += 1;
        }
    }
}

fn component_diameters_ok(n: usize, edges: &[(StateId, StateId)], keep: u64, delta: usize) -> bool {
    let mut adj = vec![Vec::new(); n];
    for (i, &(u, v)) in edges.iter().enumerate() {
        if keep >> i & 1 == 1 {
            adj[u as usize].push(v as usize);
            adj[v as usize].push(u as usize);
        }
    }
    // All-pairs BFS: fine at n ≤ 15.
    for s in 0..n {
        let mut dist = vec![usize::MAX; n];
        dist[s] = 0;
        let mut queue = std::collections::VecDeque::from([s]);
        while let Some(x) = queue.pop_front() {
            for &y in &adj[x] {
                if dist[y] == usize::MAX {
                    dist[y] = dist[x] + 1;
                    if dist[y] > delta {
                        return false;
                    }
                    queue.push_back(y);
                }
            }
        }
    }
    true
}

/// Fewest edges whose removal leaves every component with diameter at
/// most `delta`, by trying every subset of kept edges.
pub fn exhaustive_min_cuts(n: usize, edges: &[(StateId, StateId)], delta: usize) -> usize {
    let e = edges.len();
    let mut best = e;
    for keep in 0u64..1 << e {
        let cuts = e - keep.count_ones() as usize;
        if cuts < best && component_diameters_ok(n, edges, keep, delta) {
            best = cuts;
        }
    }
    best
}
