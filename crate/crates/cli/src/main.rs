//! `d2fa`: compile rule sets, compress DFAs into D²FAs, verify, match and
//! benchmark.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, Context};
use clap::{ArgGroup, Args, Parser, Subcommand};
use d2fa_core::automata::{
    compile_regex_set_over, read_dfa, read_rules, write_dfa, CompileOptions,
};
use d2fa_core::bench::{load_rules_dir, run_bench, summarize, CsvSink, DatasetSource};
use d2fa_core::d2fa::{read_d2fa, verify_equivalent, write_d2fa, VerifyError};
use d2fa_core::graphs::LshParams;
use d2fa_core::pipelines::{compress, AlgoSpec, Algorithm};
use d2fa_core::Error;

#[derive(Parser)]
#[command(name = "d2fa", version, about = "Delayed DFA compression toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compile a file of regular expressions (one per line) into a DFA.
    Compile {
        #[arg(long)]
        rules: PathBuf,
        #[arg(long, default_value_t = 256)]
        alphabet: usize,
        #[arg(long)]
        out: PathBuf,
        /// Minimize the DFA after subset construction.
        #[arg(long)]
        minimize: bool,
        /// Give up once the DFA exceeds this many states.
        #[arg(long, default_value_t = d2fa_core::automata::DEFAULT_STATE_CAP)]
        state_cap: usize,
    },
    /// Compress a DFA into a D2FA.
    Compress {
        #[arg(long)]
        dfa: PathBuf,
        /// orig, orig-sp, refined, refined-sp, cut, cut-sp, adfa or adfa-sp.
        #[arg(long)]
        algo: String,
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        /// Where to write the JSON compression report.
        #[arg(long)]
        stats: Option<PathBuf>,
        /// Skip the equivalence check against the input DFA.
        #[arg(long)]
        no_verify: bool,
    },
    /// Run a D2FA over the bytes of a file.
    Match {
        #[arg(long)]
        d2fa: PathBuf,
        #[arg(long)]
        input: PathBuf,
        /// Print a JSON summary instead of text.
        #[arg(long)]
        report: bool,
    },
    /// Check that a D2FA resolves every transition exactly like a DFA.
    Verify {
        #[arg(long)]
        dfa: PathBuf,
        #[arg(long)]
        d2fa: PathBuf,
    },
    /// Time algorithms over a ladder of DFAs and write CSV rows.
    #[command(group(ArgGroup::new("source").required(true).args(["rules_dir", "synthetic"])))]
    Bench {
        /// Directory of `*.rules` files, compiled over 256 symbols.
        #[arg(long)]
        rules_dir: Option<PathBuf>,
        /// Clustered ladder, e.g. `sizes=1k:2k:4k,alphabet=256,clusters=32,noise=0.05`.
        #[arg(long)]
        synthetic: Option<String>,
        /// Comma-separated algorithm ids.
        #[arg(long, default_value = "orig,orig-sp")]
        algos: String,
        /// Comma-separated seeds.
        #[arg(long, default_value = "0")]
        seeds: String,
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long)]
        csv: PathBuf,
    },
}

#[derive(Args)]
struct ParamArgs {
    /// Longest-delay bound for refined and cut.
    #[arg(long = "L", default_value_t = AlgoSpec::DEFAULT_DELAY_BOUND)]
    delay_bound: usize,
    /// Symbols sampled per LSH round.
    #[arg(long, default_value_t = 8)]
    k: usize,
    /// LSH rounds.
    #[arg(long, default_value_t = 512)]
    r: usize,
    /// Refuse dense algorithms above this many states.
    #[arg(long, default_value_t = d2fa_core::graphs::DEFAULT_DENSE_CAP)]
    dense_cap: usize,
}

impl ParamArgs {
    fn spec(&self, algorithm: Algorithm, seed: u64) -> AlgoSpec {
        let mut spec = AlgoSpec::new(algorithm)
            .with_delay_bound(self.delay_bound)
            .with_lsh(LshParams::new(self.k, self.r, seed));
        spec.dense_cap = self.dense_cap;
        spec
    }
}

/// Exit status 1 for bad usage or input, 2 for integrity failures.
enum Failure {
    Input(anyhow::Error),
    Integrity(anyhow::Error),
}

impl<E: Into<anyhow::Error>> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Input(e.into())
    }
}

type CmdResult = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let outcome = match cli.command {
        Command::Compile {
            rules,
            alphabet,
            out,
            minimize,
            state_cap,
        } => cmd_compile(&rules, alphabet, &out, minimize, state_cap),
        Command::Compress {
            dfa,
            algo,
            params,
            seed,
            out,
            stats,
            no_verify,
        } => cmd_compress(
            &dfa,
            &algo,
            &params,
            seed,
            &out,
            stats.as_deref(),
            no_verify,
        ),
        Command::Match {
            d2fa,
            input,
            report,
        } => cmd_match(&d2fa, &input, report),
        Command::Verify { dfa, d2fa } => cmd_verify(&dfa, &d2fa),
        Command::Bench {
            rules_dir,
            synthetic,
            algos,
            seeds,
            params,
            csv,
        } => cmd_bench(
            rules_dir.as_deref(),
            synthetic.as_deref(),
            &algos,
            &seeds,
            &params,
            &csv,
        ),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Integrity(e)) => {
            eprintln!("integrity failure: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn cmd_compile(
    rules: &Path,
    alphabet: usize,
    out: &Path,
    minimize: bool,
    state_cap: usize,
) -> CmdResult {
    let file = read_rules(rules).with_context(|| format!("reading {}", rules.display()))?;
    let mut opts = CompileOptions::with_alphabet_size(alphabet)?;
    opts.minimize = minimize;
    opts.state_cap = state_cap;
    let started = Instant::now();
    let dfa = compile_regex_set_over(&file.patterns, &opts).map_err(|e| match e {
        Error::Syntax {
            rule,
            offset,
            message,
        } => anyhow!(
            "{}:{}: syntax error at byte {offset}: {message}",
            rules.display(),
            file.lines[rule]
        ),
        other => other.into(),
    })?;
    let elapsed = started.elapsed();
    write_dfa(&dfa, out).with_context(|| format!("writing {}", out.display()))?;
    println!(
        "compiled {} rules into {} states in {:.1} ms",
        file.patterns.len(),
        dfa.state_count(),
        elapsed.as_secs_f64() * 1e3
    );
    Ok(())
}

fn cmd_compress(
    dfa_path: &Path,
    algo: &str,
    params: &ParamArgs,
    seed: u64,
    out: &Path,
    stats: Option<&Path>,
    no_verify: bool,
) -> CmdResult {
    let algorithm: Algorithm = algo.parse()?;
    let dfa = read_dfa(dfa_path).with_context(|| format!("reading {}", dfa_path.display()))?;
    let (d2fa, report) = compress(&dfa, &params.spec(algorithm, seed))?;
    if !no_verify {
        verify_equivalent(&dfa, &d2fa).map_err(|e| Failure::Integrity(e.into()))?;
    }
    write_d2fa(&d2fa, out).with_context(|| format!("writing {}", out.display()))?;
    if let Some(path) = stats {
        let mut w = BufWriter::new(
            File::create(path).with_context(|| format!("writing {}", path.display()))?,
        );
        serde_json::to_writer_pretty(&mut w, &report)?;
        writeln!(w)?;
        w.flush()?;
    }
    println!(
        "{}: {} states, {} -> {} transitions ({} defaults), ratio {:.4}, longest delay {}, {:.1} ms",
        report.algorithm,
        report.n,
        report.labeled_before,
        report.total_after,
        report.default_count,
        report.compression_ratio,
        report.longest_delay,
        report.elapsed_ms.total
    );
    Ok(())
}

fn cmd_match(d2fa_path: &Path, input: &Path, json: bool) -> CmdResult {
    let d2fa = read_d2fa(d2fa_path).with_context(|| format!("reading {}", d2fa_path.display()))?;
    let bytes = fs::read(input).with_context(|| format!("reading {}", input.display()))?;
    let outcome = d2fa.match_string(&bytes).map_err(|e| match e {
        e @ Error::Unresolvable { .. } => Failure::Integrity(e.into()),
        e => Failure::Input(e.into()),
    })?;
    let per_byte = if bytes.is_empty() {
        0.0
    } else {
        outcome.matching_delay as f64 / bytes.len() as f64
    };
    let stdout = std::io::stdout();
    let mut w = BufWriter::new(stdout.lock());
    if json {
        let summary = serde_json::json!({
            "bytes": bytes.len(),
            "accepted": outcome.accepted,
            "accepting_positions": outcome.accepting_positions,
            "matching_delay": outcome.matching_delay,
            "delay_per_byte": per_byte,
        });
        writeln!(w, "{summary}")?;
    } else {
        for pos in &outcome.accepting_positions {
            writeln!(w, "accept {pos}")?;
        }
        writeln!(w, "matching delay {}", outcome.matching_delay)?;
        writeln!(w, "delay per byte {per_byte:.4}")?;
    }
    w.flush()?;
    Ok(())
}

fn cmd_verify(dfa_path: &Path, d2fa_path: &Path) -> CmdResult {
    let dfa = read_dfa(dfa_path).with_context(|| format!("reading {}", dfa_path.display()))?;
    let d2fa = read_d2fa(d2fa_path).with_context(|| format!("reading {}", d2fa_path.display()))?;
    match verify_equivalent(&dfa, &d2fa) {
        Ok(()) => {
            println!(
                "equivalent: {} states x {} symbols",
                dfa.state_count(),
                dfa.alphabet_size()
            );
            Ok(())
        }
        Err(e @ VerifyError::Shape(_)) => Err(Failure::Input(e.into())),
        Err(e) => Err(Failure::Integrity(e.into())),
    }
}

fn parse_list<T: std::str::FromStr>(list: &str, what: &str) -> anyhow::Result<Vec<T>>
where
    T::Err: std::fmt::Display,
{
    list.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<T>().map_err(|e| anyhow!("bad {what} '{s}': {e}")))
        .collect()
}

fn cmd_bench(
    rules_dir: Option<&Path>,
    synthetic: Option<&str>,
    algos: &str,
    seeds: &str,
    params: &ParamArgs,
    csv: &Path,
) -> CmdResult {
    let algos: Vec<AlgoSpec> = parse_list::<Algorithm>(algos, "algorithm")?
        .into_iter()
        .map(|a| params.spec(a, 0))
        .collect();
    let seeds: Vec<u64> = parse_list(seeds, "seed")?;
    if algos.is_empty() || seeds.is_empty() {
        return Err(anyhow!("need at least one algorithm and one seed").into());
    }
    let source = match (rules_dir, synthetic) {
        (Some(dir), _) => DatasetSource::Compiled(
            load_rules_dir(dir, 256).with_context(|| format!("loading {}", dir.display()))?,
        ),
        (None, Some(spec)) => DatasetSource::Synthetic(spec.parse()?),
        (None, None) => unreachable!("clap requires a source"),
    };
    let file = File::create(csv).with_context(|| format!("writing {}", csv.display()))?;
    let mut sink = CsvSink::new(BufWriter::new(file))?;
    let mut failures = 0;
    let rows = run_bench(&source, &algos, &seeds, |row, err| {
        if let Some(e) = err {
            failures += 1;
            eprintln!("{} {} seed {}: {e}", row.dataset, row.algo, row.seed);
        } else {
            eprintln!(
                "{} {} seed {}: ratio {:.4}, {:.1} ms",
                row.dataset,
                row.algo,
                row.seed,
                row.ratio.unwrap_or(f64::NAN),
                row.t_total_ms.unwrap_or(f64::NAN)
            );
        }
        sink.push(row)
    })?;
    print!("{}", summarize(&rows));
    println!(
        "{} runs, {failures} failed; rows in {}",
        rows.len(),
        csv.display()
    );
    Ok(())
}
