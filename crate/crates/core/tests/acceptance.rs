//! Acceptance suite. Runs every criterion in sequence (timings must not
//! compete with other tests), prints one PASS/FAIL line per criterion and
//! fails at the end if any criterion failed.

mod common;

use std::collections::HashMap;
use std::time::Instant;

use common::{check_savings, random_strings, rng, Named};
use d2fa_core::automata::{generate_clustered_dfa, Dfa};
use d2fa_core::bench::loglog_slope;
use d2fa_core::d2fa::{verify_equivalent, write_d2fa_to, CompressionReport, D2fa};
use d2fa_core::forest::{cut_to_diameter, kruskal_mst, UnrootedForest};
use d2fa_core::graphs::{lsh_signature, sample_symbols, Edge, LshParams};
use d2fa_core::pipelines::{compress, AlgoSpec, Algorithm};
use d2fa_core::StateId;
use rand::{Rng, RngCore};

const SEED: u64 = 7;
const L: usize = 2;

fn spec_for(algorithm: Algorithm, dfa: &Dfa, seed: u64) -> AlgoSpec {
    let k = 8.min(dfa.alphabet_size());
    AlgoSpec::new(algorithm)
        .with_delay_bound(L)
        .with_lsh(LshParams::new(k, 512, seed))
}

fn bytes_of(d: &D2fa) -> Vec<u8> {
    let mut out = Vec::new();
    write_d2fa_to(d, &mut out).unwrap();
    out
}

struct Ledger {
    failed: Vec<String>,
}

impl Ledger {
    fn record(&mut self, id: u32, title: &str, pass: bool, detail: String, started: Instant) {
        let verdict = if pass { "PASS" } else { "FAIL" };
        println!(
            "criterion {id} [{verdict}] {title}: {detail} ({:.1} s)",
            started.elapsed().as_secs_f64()
        );
        if !pass {
            self.failed.push(format!("{id} {title}"));
        }
    }
}

struct Run {
    d2fa: D2fa,
    report: CompressionReport,
}

#[test]
fn acceptance() {
    let mut ledger = Ledger { failed: Vec::new() };

    let started = Instant::now();
    let mut corpus: Vec<Named> = common::small_corpus();
    corpus.extend(common::clustered_corpus());
    corpus.extend(common::regex_corpus(10, 20_000));
    println!(
        "corpus: {} DFAs built in {:.1} s",
        corpus.len(),
        started.elapsed().as_secs_f64()
    );

    // 1. Equivalence over the corpus; the runs are kept for 3, 4, 6 and 8.
    let started = Instant::now();
    let mut runs: Vec<HashMap<Algorithm, Run>> = Vec::new();
    let mut failures = Vec::new();
    for entry in &corpus {
        let mut per_algo = HashMap::new();
        for algorithm in Algorithm::ALL {
            let (d2fa, report) = compress(&entry.dfa, &spec_for(algorithm, &entry.dfa, SEED))
                .unwrap_or_else(|e| panic!("{} {algorithm}: {e}", entry.name));
            if let Err(e) = verify_equivalent(&entry.dfa, &d2fa) {
                failures.push(format!("{} {algorithm}: {e}", entry.name));
            }
            per_algo.insert(algorithm, Run { d2fa, report });
        }
        runs.push(per_algo);
    }
    let elapsed = started.elapsed().as_secs_f64();
    ledger.record(
        1,
        "equivalence",
        failures.is_empty() && elapsed < 600.0,
        format!(
            "{} DFAs x 8 pipelines, {} failures{}, limit 600 s",
            corpus.len(),
            failures.len(),
            failures
                .first()
                .map_or(String::new(), |f| format!(" (first: {f})"))
        ),
        started,
    );

    // 2. Optimality against exhaustive search.
    let started = Instant::now();
    let mut r = rng(2);
    let mut mst_bad = 0;
    for _ in 0..200 {
        let n = r.gen_range(1..=9);
        let g = common::random_connected_graph(&mut r, n, 4);
        if Some(kruskal_mst(&g).total_weight()) != common::exhaustive_max_spanning_tree(&g) {
            mst_bad += 1;
        }
    }
    let mut cut_bad = 0;
    for _ in 0..1000 {
        let n = r.gen_range(1..=15);
        let delta = r.gen_range(0..=6);
        let tree = common::random_tree(&mut r, n);
        let forest =
            UnrootedForest::new(n, tree.iter().map(|&(u, v)| Edge::new(u, v, 1)).collect())
                .unwrap();
        let cut = cut_to_diameter(&forest, delta);
        let valid = cut.kept.max_diameter() <= delta;
        if !valid || cut.cut.len() != common::exhaustive_min_cuts(n, &tree, delta) {
            cut_bad += 1;
        }
    }
    ledger.record(
        2,
        "optimality oracle",
        mst_bad == 0 && cut_bad == 0,
        format!("MST mismatches {mst_bad}/200, cut mismatches {cut_bad}/1000"),
        started,
    );

    // 3. Savings identities on every run.
    let started = Instant::now();
    let mut bad = Vec::new();
    for (entry, per_algo) in corpus.iter().zip(&runs) {
        for (algorithm, run) in per_algo {
            if let Err(e) = check_savings(&entry.dfa, &run.d2fa) {
                bad.push(format!("{} {algorithm}: {e}", entry.name));
            }
            let rep = &run.report;
            if rep.labeled_after + rep.default_count != rep.total_after
                || rep.labeled_after != run.d2fa.labeled_count()
            {
                bad.push(format!(
                    "{} {algorithm}: report disagrees with D2FA",
                    entry.name
                ));
            }
        }
    }
    ledger.record(
        3,
        "savings identities",
        bad.is_empty(),
        format!("{} runs, {} violations", corpus.len() * 8, bad.len()),
        started,
    );

    // 4. Delay bounds.
    let started = Instant::now();
    let mut worst_longest = 0;
    let mut bad = Vec::new();
    let bounded = [
        Algorithm::Refined,
        Algorithm::RefinedSparse,
        Algorithm::Cut,
        Algorithm::CutSparse,
    ];
    for (entry, per_algo) in corpus.iter().zip(&runs) {
        for a in bounded {
            let measured = per_algo[&a].d2fa.longest_delay();
            worst_longest = worst_longest.max(measured);
            if measured > L {
                bad.push(format!("{} {a}: longest delay {measured}", entry.name));
            }
        }
        let strings = random_strings(&mut rng(4), entry.dfa.alphabet_size(), 10_000, 48);
        for a in [Algorithm::Adfa, Algorithm::AdfaSparse] {
            let d = &per_algo[&a].d2fa;
            for s in &strings {
                let outcome = d.match_string(s).unwrap();
                if outcome.matching_delay > s.len()
                    || outcome.end_state != entry.dfa.run(s).unwrap()
                {
                    bad.push(format!(
                        "{} {a}: delay {} on length {}",
                        entry.name,
                        outcome.matching_delay,
                        s.len()
                    ));
                    break;
                }
            }
        }
    }
    ledger.record(
        4,
        "delay bounds",
        bad.is_empty(),
        format!(
            "worst longest delay {worst_longest} (L = {L}), A-DFA strings 10^4 per DFA, {} violations",
            bad.len()
        ),
        started,
    );

    // 5. Compression magnitude on clustered DFAs with |Σ| = 256.
    let started = Instant::now();
    let configs = [(1024, 32), (1024, 4), (2048, 16), (4096, 32)];
    let mut worst = [0f64; 2];
    for (i, noise) in [0.0, 0.05].into_iter().enumerate() {
        for (j, &(n, clusters)) in configs.iter().enumerate() {
            let dfa = generate_clustered_dfa(n, 256, clusters, noise, 50 + j as u64).unwrap();
            let (_, report) = compress(&dfa, &AlgoSpec::new(Algorithm::Orig)).unwrap();
            worst[i] = worst[i].max(report.compression_ratio);
        }
    }
    ledger.record(
        5,
        "compression magnitude",
        worst[0] <= 0.10 && worst[1] <= 0.20,
        format!(
            "worst ratio {:.4} at noise 0 (limit 0.10), {:.4} at noise 0.05 (limit 0.20)",
            worst[0], worst[1]
        ),
        started,
    );

    // 6. Sparse fidelity on the clustered part of the corpus.
    let started = Instant::now();
    let mut worst = [(1f64, String::new()), (1f64, String::new())];
    for (entry, per_algo) in corpus.iter().zip(&runs) {
        if !entry.clustered || entry.dfa.state_count() > 8192 {
            continue;
        }
        for (i, (dense, sparse)) in [
            (Algorithm::Orig, Algorithm::OrigSparse),
            (Algorithm::Cut, Algorithm::CutSparse),
        ]
        .into_iter()
        .enumerate()
        {
            let rel = per_algo[&sparse].report.total_after as f64
                / per_algo[&dense].report.total_after as f64;
            if rel > worst[i].0 {
                worst[i] = (rel, entry.name.clone());
            }
        }
    }
    ledger.record(
        6,
        "sparse fidelity",
        worst[0].0 <= 1.10 && worst[1].0 <= 1.10,
        format!(
            "worst sparse/dense size orig {:.4} [{}], cut {:.4} [{}] (limit 1.10)",
            worst[0].0, worst[0].1, worst[1].0, worst[1].1
        ),
        started,
    );

    // 7. Scaling trend.
    let started = Instant::now();
    let ladder = [1024usize, 2048, 4096, 8192, 16384];
    let algos = [
        Algorithm::Orig,
        Algorithm::Adfa,
        Algorithm::OrigSparse,
        Algorithm::AdfaSparse,
        Algorithm::CutSparse,
    ];
    let mut mean_ms: HashMap<(Algorithm, usize), f64> = HashMap::new();
    for &n in &ladder {
        for seed in 1..=3u64 {
            let dfa = generate_clustered_dfa(n, 256, n / 32, 0.05, seed).unwrap();
            for a in algos {
                let (_, report) = compress(&dfa, &spec_for(a, &dfa, seed)).unwrap();
                *mean_ms.entry((a, n)).or_default() += report.elapsed_ms.total / 3.0;
            }
        }
    }
    let slope = |a: Algorithm| {
        let pts: Vec<_> = ladder
            .iter()
            .map(|&n| (n as f64, mean_ms[&(a, n)]))
            .collect();
        loglog_slope(&pts).unwrap()
    };
    let mut detail = Vec::new();
    let mut pass = true;
    for a in algos {
        let s = slope(a);
        let ok = if a.is_sparse() { s <= 1.3 } else { s >= 1.7 };
        pass &= ok;
        detail.push(format!("{a} {s:.2}"));
    }
    let top = *ladder.last().unwrap();
    for (dense, sparse) in [
        (Algorithm::Orig, Algorithm::OrigSparse),
        (Algorithm::Adfa, Algorithm::AdfaSparse),
    ] {
        let ratio = mean_ms[&(sparse, top)] / mean_ms[&(dense, top)];
        pass &= ratio <= 1.0 / 3.0;
        detail.push(format!("{sparse}/{dense} at {top} {ratio:.3}"));
    }
    for a in algos {
        let row: Vec<_> = ladder
            .iter()
            .map(|&n| format!("{:.0}", mean_ms[&(a, n)]))
            .collect();
        println!("    {a:>8} ms: {}", row.join(" "));
    }
    let elapsed = started.elapsed().as_secs_f64();
    pass &= elapsed < 1800.0;
    ledger.record(
        7,
        "scaling trend",
        pass,
        format!(
            "slopes {} (dense >= 1.7, sparse <= 1.3; ratio <= 0.333)",
            detail.join(", ")
        ),
        started,
    );

    // 8. Determinism: re-run everything and compare the serialized output.
    let started = Instant::now();
    let mut differing = Vec::new();
    for (entry, per_algo) in corpus.iter().zip(&runs) {
        for algorithm in Algorithm::ALL {
            let (again, _) = compress(&entry.dfa, &spec_for(algorithm, &entry.dfa, SEED)).unwrap();
            if bytes_of(&again) != bytes_of(&per_algo[&algorithm].d2fa) {
                differing.push(format!("{} {algorithm}", entry.name));
            }
        }
    }
    ledger.record(
        8,
        "determinism",
        differing.is_empty(),
        format!("{} re-runs, {} differ", corpus.len() * 8, differing.len()),
        started,
    );

    // 9. LSH collision statistics.
    let started = Instant::now();
    let dfa = generate_clustered_dfa(300, 256, 4, 0.1, 9).unwrap();
    let m = dfa.alphabet_size();
    let mut details = Vec::new();
    let mut pass = true;
    for k in [2usize, 8] {
        let mut r = rng(90 + k as u64);
        let trials = 20_000;
        let (mut observed, mut expected, mut variance) = (0f64, 0f64, 0f64);
        for _ in 0..trials {
            let u = r.gen_range(0..300) as StateId;
            let mut v = r.gen_range(0..299) as StateId;
            if v >= u {
                v += 1;
            }
            let p = collision_probability(common::similarity(&dfa, u, v), m, k);
            expected += p;
            variance += p * (1.0 - p);
            let symbols = sample_symbols(&mut r, m, k);
            let seed = r.next_u64();
            if lsh_signature(&dfa, u, &symbols, seed) == lsh_signature(&dfa, v, &symbols, seed) {
                observed += 1.0;
            }
        }
        let sigma = variance.sqrt();
        let ok = (observed - expected).abs() <= 3.0 * sigma;
        pass &= ok;
        details.push(format!(
            "k={k}: observed {observed:.0}, expected {expected:.1} ± {:.1}",
            3.0 * sigma
        ));
    }
    ledger.record(9, "LSH statistics", pass, details.join("; "), started);

    assert!(
        ledger.failed.is_empty(),
        "failed criteria: {:?}",
        ledger.failed
    );
}

/// C(s, k) / C(m, k): all `k` distinct sampled symbols fall among the `s`
/// shared ones.
fn collision_probability(s: usize, m: usize, k: usize) -> f64 {
    if s < k {
        return 0.0;
    }
    (0..k).map(|i| (s - i) as f64 / (m - i) as f64).product()
}
