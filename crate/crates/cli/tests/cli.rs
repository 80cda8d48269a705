use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const TOY: &str = "DFA 1\nstates 4\nalphabet 2\nstart 0\naccept 1 3\n1 0\n1 2\n1 3\n1 0\n";

fn d2fa(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_d2fa"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

struct Scratch {
    dir: tempfile::TempDir,
}

impl Scratch {
    fn new() -> Scratch {
        Scratch {
            dir: tempfile::tempdir().unwrap(),
        }
    }

    fn file(&self, name: &str, contents: impl AsRef<[u8]>) -> PathBuf {
        let p = self.dir.path().join(name);
        fs::write(&p, contents).unwrap();
        p
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }
}

#[test]
fn compress_toy_and_report() {
    let w = Scratch::new();
    let dfa = w.file("toy.dfa", TOY);
    let (out, stats) = (w.path("toy.d2fa"), w.path("stats.json"));
    let o = d2fa(&[
        "compress",
        "--dfa",
        s(&dfa),
        "--algo",
        "orig",
        "--out",
        s(&out),
        "--stats",
        s(&stats),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&stats).unwrap()).unwrap();
    assert_eq!(report["total_after"], 7);
    assert_eq!(report["compression_ratio"], 0.875);
    assert_eq!(report["algorithm"], "orig");
    for key in [
        "labeled_before",
        "labeled_after",
        "default_count",
        "longest_delay",
        "elapsed_ms",
        "params",
        "n",
    ] {
        assert!(report.get(key).is_some(), "missing {key}");
    }

    let o = d2fa(&["verify", "--dfa", s(&dfa), "--d2fa", s(&out)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));

    // "abb" over symbols a = 0, b = 1.
    let input = w.file("abb.bin", [0u8, 1, 1]);
    let o = d2fa(&["match", "--d2fa", s(&out), "--input", s(&input)]);
    assert!(o.status.success());
    assert!(
        stdout(&o).lines().any(|l| l == "accept 3"),
        "{}",
        stdout(&o)
    );

    let empty = w.file("empty.bin", []);
    let o = d2fa(&["match", "--d2fa", s(&out), "--input", s(&empty), "--report"]);
    let summary: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(summary["matching_delay"], 0);
    assert_eq!(summary["accepted"], false);
}

#[test]
fn compress_is_deterministic_and_bounded() {
    let w = Scratch::new();
    let rules = w.file("r.rules", ".*ab+c\n.*cd+\n.*b[^x]{3}e\n.*(foo|bar)+baz\n");
    let dfa = w.path("r.dfa");
    assert!(d2fa(&["compile", "--rules", s(&rules), "--out", s(&dfa)])
        .status
        .success());
    for run in ["a", "b"] {
        let out = w.path(&format!("{run}.d2fa"));
        let stats = w.path(&format!("{run}.json"));
        let o = d2fa(&[
            "compress",
            "--dfa",
            s(&dfa),
            "--algo",
            "cut-sp",
            "--L",
            "2",
            "--seed",
            "11",
            "--r",
            "64",
            "--out",
            s(&out),
            "--stats",
            s(&stats),
        ]);
        assert!(o.status.success(), "{}", stderr(&o));
        let report: serde_json::Value =
            serde_json::from_str(&fs::read_to_string(&stats).unwrap()).unwrap();
        assert!(report["longest_delay"].as_u64().unwrap() <= 2);
        assert_eq!(report["params"]["L"], 2);
    }
    assert_eq!(
        fs::read(w.path("a.d2fa")).unwrap(),
        fs::read(w.path("b.d2fa")).unwrap()
    );

    // A-DFA keeps the matching delay at or below one per byte.
    let adfa = w.path("adfa.d2fa");
    let o = d2fa(&[
        "compress",
        "--dfa",
        s(&dfa),
        "--algo",
        "adfa",
        "--out",
        s(&adfa),
    ]);
    assert!(o.status.success());
    let input = w.file("text", "xxfoobarbazcdddabbbcqq".repeat(20));
    let o = d2fa(&[
        "match",
        "--d2fa",
        s(&adfa),
        "--input",
        s(&input),
        "--report",
    ]);
    let summary: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert!(summary["delay_per_byte"].as_f64().unwrap() <= 1.0);
    assert!(!summary["accepting_positions"]
        .as_array()
        .unwrap()
        .is_empty());
}

#[test]
fn compile_edge_cases() {
    let w = Scratch::new();
    let out = w.path("x.dfa");
    let empty = w.file("empty.rules", "");
    assert!(d2fa(&["compile", "--rules", s(&empty), "--out", s(&out)])
        .status
        .success());
    assert!(fs::read_to_string(&out).unwrap().contains("states 1\n"));

    let one = w.file("one.rules", "# comment\nab\n");
    let o = d2fa(&[
        "compile",
        "--rules",
        s(&one),
        "--out",
        s(&out),
        "--minimize",
    ]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("into 4 states"), "{}", stdout(&o));

    let bad = w.file("bad.rules", "abc\n\n# fine so far\nab(c\n");
    let o = d2fa(&["compile", "--rules", s(&bad), "--out", s(&out)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("bad.rules:4:"), "{}", stderr(&o));
}

#[test]
fn verify_failures() {
    let w = Scratch::new();
    let dfa = w.file("toy.dfa", TOY);
    let planted = w.file(
        "bad.d2fa",
        "D2FA 1\nstates 4\nalphabet 2\nstart 0\naccept 1 3\n\
         default - ; 0:1 1:0\ndefault 0 ; 1:2\ndefault 0 ; 1:1\ndefault 0 ;\n",
    );
    let o = d2fa(&["verify", "--dfa", s(&dfa), "--d2fa", s(&planted)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("state 2 on symbol 1"), "{}", stderr(&o));

    let small = w.file(
        "small.d2fa",
        "D2FA 1\nstates 1\nalphabet 2\nstart 0\naccept 0\ndefault - ; 0:0 1:0\n",
    );
    let o = d2fa(&["verify", "--dfa", s(&dfa), "--d2fa", s(&small)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("shape mismatch"));
}

#[test]
fn usage_errors_exit_one() {
    let w = Scratch::new();
    let dfa = w.file("toy.dfa", TOY);
    let out = w.path("o");
    assert_eq!(
        d2fa(&[
            "compress",
            "--dfa",
            s(&dfa),
            "--algo",
            "mst",
            "--out",
            s(&out)
        ])
        .status
        .code(),
        Some(1)
    );
    assert_eq!(d2fa(&["explode"]).status.code(), Some(1));
    assert_eq!(d2fa(&["compress", "--dfa", s(&dfa)]).status.code(), Some(1));
    let missing = w.path("missing.dfa");
    assert_eq!(
        d2fa(&[
            "compress",
            "--dfa",
            s(&missing),
            "--algo",
            "orig",
            "--out",
            s(&out)
        ])
        .status
        .code(),
        Some(1)
    );
    let o = d2fa(&[
        "compress",
        "--dfa",
        s(&dfa),
        "--algo",
        "orig",
        "--dense-cap",
        "2",
        "--out",
        s(&out),
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(d2fa(&["--help"]).status.success());
}

#[test]
fn bench_writes_rows() {
    let w = Scratch::new();
    let csv = w.path("bench.csv");
    let o = d2fa(&[
        "bench",
        "--synthetic",
        "sizes=64:128:256:512,alphabet=32,clusters=4",
        "--algos",
        "orig,orig-sp",
        "--seeds",
        "1,2",
        "--r",
        "16",
        "--csv",
        s(&csv),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "dataset,n,algo,L,k,r,seed,labeled_after,default_count,ratio,longest_delay,t_graph_ms,t_forest_ms,t_build_ms,t_total_ms"
    );
    assert_eq!(lines.count(), 16);
    assert!(stdout(&o).contains("orig/orig-sp"));

    let rules = w.path("rules");
    fs::create_dir(&rules).unwrap();
    fs::write(rules.join("a.rules"), ".*ab\n").unwrap();
    fs::write(rules.join("b.rules"), ".*ab\n.*x[^y]{4}z\n").unwrap();
    let o = d2fa(&[
        "bench",
        "--rules-dir",
        s(&rules),
        "--algos",
        "adfa,adfa-sp",
        "--seeds",
        "3",
        "--csv",
        s(&csv),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(fs::read_to_string(&csv).unwrap().lines().count(), 5);

    let o = d2fa(&["bench", "--algos", "orig", "--csv", s(&csv)]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn no_verify_output_still_verifies() {
    let w = Scratch::new();
    let rules = w.file("r.rules", ".*a[bc]+d\n.*(ab|ba){2,3}\n.*z.?z\n");
    let dfa = w.path("r.dfa");
    assert!(d2fa(&["compile", "--rules", s(&rules), "--out", s(&dfa)])
        .status
        .success());
    for algo in [
        "orig",
        "orig-sp",
        "refined",
        "refined-sp",
        "cut",
        "cut-sp",
        "adfa",
        "adfa-sp",
    ] {
        let out = w.path(&format!("{algo}.d2fa"));
        let o = d2fa(&[
            "compress",
            "--dfa",
            s(&dfa),
            "--algo",
            algo,
            "--r",
            "32",
            "--no-verify",
            "--out",
            s(&out),
        ]);
        assert!(o.status.success(), "{algo}: {}", stderr(&o));
        let o = d2fa(&["verify", "--dfa", s(&dfa), "--d2fa", s(&out)]);
        assert_eq!(o.status.code(), Some(0), "{algo}: {}", stderr(&o));
    }
}
