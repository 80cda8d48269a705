//! Benchmark harness: ladders of DFAs, one CSV row per run, and a
//! sparse-versus-dense summary.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::automata::{compile_regex_set, generate_clustered_dfa, read_rules, Dfa};
use crate::d2fa::CompressionReport;
use crate::pipelines::{compress, AlgoSpec, Algorithm};
use crate::{Error, Result};

/// Column order of the CSV output.
pub const CSV_HEADER: [&str; 15] = [
    "dataset",
    "n",
    "algo",
    "L",
    "k",
    "r",
    "seed",
    "labeled_after",
    "default_count",
    "ratio",
    "longest_delay",
    "t_graph_ms",
    "t_forest_ms",
    "t_build_ms",
    "t_total_ms",
];

/// Ladder of clustered DFAs, written `key=value` pairs separated by commas:
/// `sizes=1k:2k:4k,alphabet=256,clusters=32,noise=0.05`.
/// Omitted keys keep their defaults.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticSpec {
    pub sizes: Vec<usize>,
    pub alphabet_size: usize,
    pub clusters: usize,
    pub noise: f64,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        SyntheticSpec {
            sizes: vec![1000, 2000, 4000, 8000],
            alphabet_size: 256,
            clusters: 32,
            noise: 0.05,
        }
    }
}

fn parse_count(s: &str) -> Option<usize> {
    match s.strip_suffix(['k', 'K']) {
        Some(head) => head.parse::<usize>().ok()?.checked_mul(1000),
        None => s.parse().ok(),
    }
}

impl FromStr for SyntheticSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut spec = SyntheticSpec::default();
        let bad = |msg: String| Error::InvalidParams(format!("synthetic spec: {msg}"));
        for item in s.split(',').map(str::trim).filter(|i| !i.is_empty()) {
            let (key, value) = item
                .split_once('=')
                .ok_or_else(|| bad(format!("'{item}' is not key=value")))?;
            let number =
                |v: &str| parse_count(v).ok_or_else(|| bad(format!("'{v}' is not a count")));
            match key.trim() {
                "sizes" => {
                    spec.sizes = value
                        .split(':')
                        .map(|v| number(v.trim()))
                        .collect::<Result<_>>()?;
                }
                "alphabet" => spec.alphabet_size = number(value)?,
                "clusters" => spec.clusters = number(value)?,
                "noise" => {
                    spec.noise = value
                        .parse()
                        .map_err(|_| bad(format!("'{value}' is not a probability")))?;
                }
                other => return Err(bad(format!("unknown key '{other}'"))),
            }
        }
        if spec.sizes.is_empty() || spec.sizes.contains(&0) {
            return Err(bad("sizes must be positive".into()));
        }
        Ok(spec)
    }
}

impl SyntheticSpec {
    pub fn dataset_name(&self, n: usize, seed: u64) -> String {
        format!(
            "clustered-n{n}-m{}-c{}-p{}-s{seed}",
            self.alphabet_size, self.clusters, self.noise
        )
    }

    pub fn generate(&self, n: usize, seed: u64) -> Result<Dfa> {
        generate_clustered_dfa(n, self.alphabet_size, self.clusters, self.noise, seed)
    }
}

/// Compiles every `*.rules` file in `dir` (one pattern per line), sorted by
/// the resulting state count.
pub fn load_rules_dir(dir: impl AsRef<Path>, alphabet_size: usize) -> Result<Vec<(String, Dfa)>> {
    let mut paths: Vec<_> = fs::read_dir(dir)?
        .map(|e| e.map(|e| e.path()))
        .collect::<std::io::Result<_>>()?;
    paths.retain(|p| p.extension().is_some_and(|x| x == "rules"));
    paths.sort();
    let mut out = Vec::with_capacity(paths.len());
    for path in paths {
        let rules = read_rules(&path)?;
        let dfa = compile_regex_set(&rules.patterns, alphabet_size)?;
        let name = path
            .file_stem()
            .unwrap_or_default()
            .to_string_lossy()
            .into_owned();
        out.push((name, dfa));
    }
    out.sort_by_key(|(name, dfa)| (dfa.state_count(), name.clone()));
    Ok(out)
}

/// One CSV row. Measurement columns are empty when the run failed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub dataset: String,
    pub n: usize,
    pub algo: String,
    #[serde(rename = "L")]
    pub delay_bound: Option<usize>,
    pub k: Option<usize>,
    pub r: Option<usize>,
    pub seed: u64,
    pub labeled_after: Option<usize>,
    pub default_count: Option<usize>,
    pub ratio: Option<f64>,
    pub longest_delay: Option<usize>,
    pub t_graph_ms: Option<f64>,
    pub t_forest_ms: Option<f64>,
    pub t_build_ms: Option<f64>,
    pub t_total_ms: Option<f64>,
}

impl BenchRow {
    pub fn from_report(dataset: &str, seed: u64, report: &CompressionReport) -> BenchRow {
        BenchRow {
            dataset: dataset.to_string(),
            n: report.n,
            algo: report.algorithm.clone(),
            delay_bound: report.params.delay_bound,
            k: report.params.k,
            r: report.params.r,
            seed,
            labeled_after: Some(report.labeled_after),
            default_count: Some(report.default_count),
            ratio: Some(report.compression_ratio),
            longest_delay: Some(report.longest_delay),
            t_graph_ms: Some(report.elapsed_ms.graph),
            t_forest_ms: Some(report.elapsed_ms.forest),
            t_build_ms: Some(report.elapsed_ms.build),
            t_total_ms: Some(report.elapsed_ms.total),
        }
    }

    fn failed(dataset: &str, n: usize, spec: &AlgoSpec, seed: u64) -> BenchRow {
        let sparse = spec.algorithm.is_sparse();
        BenchRow {
            dataset: dataset.to_string(),
            n,
            algo: spec.algorithm.id().to_string(),
            delay_bound: spec.algorithm.bounds_delay().then_some(spec.delay_bound),
            k: sparse.then_some(spec.lsh.k),
            r: sparse.then_some(spec.lsh.rounds),
            seed,
            labeled_after: None,
            default_count: None,
            ratio: None,
            longest_delay: None,
            t_graph_ms: None,
            t_forest_ms: None,
            t_build_ms: None,
            t_total_ms: None,
        }
    }

    pub fn succeeded(&self) -> bool {
        self.ratio.is_some()
    }

    pub fn total_after(&self) -> Option<usize> {
        Some(self.labeled_after? + self.default_count?)
    }
}

/// Runs `spec` on `dfa` with the LSH seed replaced by `seed`.
/// A failure still yields a row, with the error alongside.
pub fn run_one(dataset: &str, dfa: &Dfa, spec: &AlgoSpec, seed: u64) -> (BenchRow, Option<Error>) {
    let spec = spec.with_seed(seed);
    match compress(dfa, &spec) {
        Ok((_, report)) => (BenchRow::from_report(dataset, seed, &report), None),
        Err(e) => (
            BenchRow::failed(dataset, dfa.state_count(), &spec, seed),
            Some(e),
        ),
    }
}

/// Where the ladder of benchmark DFAs comes from.
#[derive(Debug, Clone)]
pub enum DatasetSource {
    Synthetic(SyntheticSpec),
    Compiled(Vec<(String, Dfa)>),
}

/// Runs every algorithm on every dataset for every seed, smallest datasets
/// first, calling `on_row` as each run finishes.
///
/// Synthetic DFAs are regenerated per seed; compiled DFAs are shared across
/// seeds, which then only vary the LSH streams.
pub fn run_bench(
    source: &DatasetSource,
    algos: &[AlgoSpec],
    seeds: &[u64],
    mut on_row: impl FnMut(&BenchRow, Option<&Error>) -> Result<()>,
) -> Result<Vec<BenchRow>> {
    let mut rows = Vec::new();
    let mut emit = |name: &str, dfa: &Dfa, seed: u64, rows: &mut Vec<BenchRow>| -> Result<()> {
        for spec in algos {
            let (row, err) = run_one(name, dfa, spec, seed);
            on_row(&row, err.as_ref())?;
            rows.push(row);
        }
        Ok(())
    };
    match source {
        DatasetSource::Synthetic(spec) => {
            for &n in &spec.sizes {
                for &seed in seeds {
                    let dfa = spec.generate(n, seed)?;
                    emit(&spec.dataset_name(n, seed), &dfa, seed, &mut rows)?;
                }
            }
        }
        DatasetSource::Compiled(sets) => {
            for (name, dfa) in sets {
                for &seed in seeds {
                    emit(name, dfa, seed, &mut rows)?;
                }
            }
        }
    }
    Ok(rows)
}

/// Streams rows to a CSV file with the fixed header.
pub struct CsvSink<W: Write> {
    inner: csv::Writer<W>,
}

impl<W: Write> CsvSink<W> {
    pub fn new(out: W) -> Result<CsvSink<W>> {
        let mut inner = csv::WriterBuilder::new()
            .has_headers(false)
            .from_writer(out);
        inner.write_record(CSV_HEADER)?;
        Ok(CsvSink { inner })
    }

    pub fn push(&mut self, row: &BenchRow) -> Result<()> {
        self.inner.serialize(row)?;
        self.inner.flush()?;
        Ok(())
    }
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(points: &[(f64, f64)]) -> Option<f64> {
    let logs: Vec<(f64, f64)> = points
        .iter()
        .filter(|(x, y)| *x > 0.0 && *y > 0.0)
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    if logs.len() < 2 {
        return None;
    }
    let k = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / k;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

const PAIRS: [(Algorithm, Algorithm); 4] = [
    (Algorithm::Orig, Algorithm::OrigSparse),
    (Algorithm::Refined, Algorithm::RefinedSparse),
    (Algorithm::Cut, Algorithm::CutSparse),
    (Algorithm::Adfa, Algorithm::AdfaSparse),
];

#[derive(Default)]
struct Tally {
    time: f64,
    size: f64,
    runs: usize,
}

/// Per state count and algorithm pair: mean dense and sparse total time,
/// their ratio, and the sparse size change relative to dense.
/// Failed runs and pairs with a missing side are left out.
pub fn summarize(rows: &[BenchRow]) -> String {
    let mut by_key: BTreeMap<(usize, &str), Tally> = BTreeMap::new();
    for row in rows {
        let (Some(t), Some(size)) = (row.t_total_ms, row.total_after()) else {
            continue;
        };
        let tally = by_key.entry((row.n, row.algo.as_str())).or_default();
        tally.time += t;
        tally.size += size as f64;
        tally.runs += 1;
    }
    let mean = |n: usize, a: Algorithm| {
        by_key
            .get(&(n, a.id()))
            .map(|t| (t.time / t.runs as f64, t.size / t.runs as f64))
    };
    let mut sizes: Vec<usize> = by_key.keys().map(|k| k.0).collect();
    sizes.dedup();

    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:>8}  {:<18}  {:>12}  {:>12}  {:>8}  {:>8}",
        "n", "pair", "dense ms", "sparse ms", "ratio", "size Δ%"
    );
    for n in sizes {
        for (dense, sparse) in PAIRS {
            let (Some((td, sd)), Some((ts, ss))) = (mean(n, dense), mean(n, sparse)) else {
                continue;
            };
            let pair = format!("{dense}/{sparse}");
            let _ = writeln!(
                out,
                "{n:>8}  {pair:<18}  {td:>12.1}  {ts:>12.1}  {:>8.3}  {:>+8.2}",
                ts / td,
                100.0 * (ss - sd) / sd
            );
        }
    }
    out
}
