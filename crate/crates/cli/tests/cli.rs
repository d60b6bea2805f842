use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

const EXAMPLE_TEXT: &str = "ATACCCCGATAATACCCCAG";
const EXAMPLE_WEIGHTS: [f64; 20] =
    [0.9, 1.0, 3.0, 2.0, 0.7, 1.0, 1.0, 0.6, 0.5, 0.5, 0.5, 0.8, 1.0, 1.0, 1.0, 0.9, 1.0, 1.0, 0.8, 1.0];

fn usi(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_usi"))
        .args(args)
        .env_remove("USI_SEED")
        .env_remove("USI_THREADS")
        .output()
        .expect("spawn usi")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn ok(args: &[&str]) -> String {
    let o = usi(args);
    assert!(o.status.success(), "usi {args:?} failed: {}", String::from_utf8_lossy(&o.stderr));
    stdout(&o)
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn write_weighted(dir: &Path, name: &str, text: &[u8], weights: &[f64]) -> (PathBuf, PathBuf) {
    let t = dir.join(name);
    let w = dir.join(format!("{name}.w"));
    fs::write(&t, text).unwrap();
    fs::write(&w, weights.iter().map(|x| format!("{x}\n")).collect::<String>()).unwrap();
    (t, w)
}

fn example(dir: &Path) -> (PathBuf, PathBuf) {
    write_weighted(dir, "example", EXAMPLE_TEXT.as_bytes(), &EXAMPLE_WEIGHTS)
}

fn build(dir: &Path, text: &Path, weights: &Path, k: usize, extra: &[&str]) -> PathBuf {
    let out = dir.join(format!("idx-{k}-{}", extra.join("")));
    let k = k.to_string();
    let mut args = vec!["build", "--text", p(text), "--weights", p(weights), "--k", &k, "--out", p(&out)];
    args.extend_from_slice(extra);
    ok(&args);
    out
}

#[test]
fn example_query_on_hit_and_miss_paths() {
    let dir = TempDir::new().unwrap();
    let (t, w) = example(dir.path());
    for k in [0, 100] {
        let idx = build(dir.path(), &t, &w, k, &[]);
        for engine in ["usi", "bsl1", "bsl2", "bsl3", "bsl4"] {
            let out = ok(&["query", "--index", p(&idx), "--engine", engine, "--pattern", "TACCCC"]);
            assert_eq!(out, "14.6\n", "K = {k}, engine {engine}");
        }
    }
}

#[test]
fn build_reports_summary_and_writes_deterministic_file() {
    let dir = TempDir::new().unwrap();
    let (t, w) = example(dir.path());
    let a = build(dir.path(), &t, &w, 10, &[]);
    let summary: serde_json::Value = serde_json::from_str(&ok(&[
        "build",
        "--text",
        p(&t),
        "--weights",
        p(&w),
        "--k",
        "10",
        "--out",
        p(&dir.path().join("b")),
    ]))
    .unwrap();
    assert_eq!(summary["n"], 20);
    assert_eq!(summary["entries"], 10);
    assert_eq!(fs::read(&a).unwrap(), fs::read(dir.path().join("b")).unwrap());
    let approx = build(dir.path(), &t, &w, 10, &["--approx"]);
    assert_eq!(ok(&["query", "--index", p(&approx), "--pattern", "TACCCC"]), "14.6\n");
}

#[test]
fn min_and_max_aggregates_print_none_for_absent_patterns() {
    let dir = TempDir::new().unwrap();
    let (t, w) = example(dir.path());
    let idx = build(dir.path(), &t, &w, 5, &["--global", "max"]);
    assert_eq!(ok(&["query", "--index", p(&idx), "--pattern", "GGG"]), "none\n");
    let idx = build(dir.path(), &t, &w, 5, &["--global", "sum"]);
    assert_eq!(ok(&["query", "--index", p(&idx), "--pattern", "GGG"]), "0\n");
}

/// Frequencies of every distinct substring, by enumeration.
fn substring_counts(text: &[u8]) -> HashMap<&[u8], u64> {
    let mut counts = HashMap::new();
    for i in 0..text.len() {
        for j in i + 1..=text.len() {
            *counts.entry(&text[i..j]).or_default() += 1;
        }
    }
    counts
}

/// (τ_K, L_K) by sorting all distinct substrings by frequency.
fn brute_tune_k(text: &[u8], k: usize) -> (u64, usize) {
    let counts = substring_counts(text);
    let mut by_freq: Vec<(u64, usize)> = counts.iter().map(|(s, &f)| (f, s.len())).collect();
    by_freq.sort_unstable_by(|a, b| b.0.cmp(&a.0));
    let tau = by_freq[k - 1].0;
    // Ties at τ can be broken either way; L_K counts the lengths of whichever K were chosen, so
    // only the bounds are checked here.
    let mut above: Vec<usize> = by_freq.iter().filter(|e| e.0 > tau).map(|e| e.1).collect();
    above.sort_unstable();
    above.dedup();
    (tau, above.len())
}

#[test]
fn tune_on_banana() {
    let dir = TempDir::new().unwrap();
    let (t, w) = write_weighted(dir.path(), "banana", b"banana", &[1.0; 6]);
    let idx = build(dir.path(), &t, &w, 3, &[]);
    let v: serde_json::Value = serde_json::from_str(&ok(&["tune", "--index", p(&idx), "--k", "3"])).unwrap();
    assert_eq!(v["tau_k"], 2);
    assert_eq!(v["l_k"], 2);
    let (tau, lengths_above) = brute_tune_k(b"banana", 3);
    assert_eq!(v["tau_k"], tau);
    assert!(v["l_k"].as_u64().unwrap() as usize >= lengths_above);

    let v: serde_json::Value = serde_json::from_str(&ok(&["tune", "--text", p(&t), "--tau", "2"])).unwrap();
    let counts = substring_counts(b"banana");
    let frequent: Vec<&[u8]> = counts.iter().filter(|(_, &f)| f >= 2).map(|(s, _)| *s).collect();
    let mut lengths: Vec<usize> = frequent.iter().map(|s| s.len()).collect();
    lengths.sort_unstable();
    lengths.dedup();
    assert_eq!(v["k_tau"], frequent.len());
    assert_eq!(v["l_tau"], lengths.len());
    assert_eq!(v["predicted_construction_cost"], 6 * lengths.len());

    let csv = ok(&["tune", "--index", p(&idx), "--k", "3", "--format", "csv"]);
    assert!(csv.starts_with("tau_k,l_k,predicted_index_bytes\n2,2,"));
}

#[test]
fn tune_predicts_the_built_size() {
    let dir = TempDir::new().unwrap();
    let text: Vec<u8> = (0..3000u32).map(|i| b"acgt"[(i * i % 7 + i / 5) as usize % 4]).collect();
    let (t, w) = write_weighted(dir.path(), "t", &text, &vec![1.0; text.len()]);
    let idx = build(dir.path(), &t, &w, 300, &[]);
    let built: serde_json::Value = serde_json::from_str(&ok(&[
        "build",
        "--text",
        p(&t),
        "--weights",
        p(&w),
        "--k",
        "300",
        "--out",
        p(&dir.path().join("again")),
    ]))
    .unwrap();
    let tuned: serde_json::Value = serde_json::from_str(&ok(&["tune", "--index", p(&idx), "--k", "300"])).unwrap();
    assert_eq!(tuned["predicted_index_bytes"], built["index_bytes"]);
    assert_eq!(tuned["tau_k"], built["tau_k"]);
    assert_eq!(tuned["l_k"], built["l_k"]);
}

#[test]
fn usage_errors_exit_with_one() {
    let o = usi(&["--no-such-flag"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("Usage"));
    let o = usi(&["tune", "--text", "x", "--k", "3", "--tau", "2"]);
    assert_eq!(o.status.code(), Some(1));
    let o = usi(&["mine", "--text", "x", "--k", "3", "--engine", "exact", "--approx"]);
    assert_eq!(o.status.code(), Some(1));
    let o = usi(&["build", "--text", "x", "--weights", "y", "--k", "3", "--s", "4", "--out", "z"]);
    assert_eq!(o.status.code(), Some(1), "--s needs --approx");
    assert_eq!(usi(&["query", "--index", "i"]).status.code(), Some(1));
    assert_eq!(usi(&["--help"]).status.code(), Some(0));
}

#[test]
fn data_errors_exit_with_two() {
    let dir = TempDir::new().unwrap();
    let missing = dir.path().join("missing");
    let o = usi(&["query", "--index", p(&missing), "--pattern", "a"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("missing"));

    let (t, w) = example(dir.path());
    let idx = build(dir.path(), &t, &w, 10, &[]);
    let mut bytes = fs::read(&idx).unwrap();
    let mid = bytes.len() / 2;
    bytes[mid] ^= 0x40;
    fs::write(&idx, &bytes).unwrap();
    let o = usi(&["query", "--index", p(&idx), "--pattern", "A"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("checksum"));

    let short = dir.path().join("short.w");
    fs::write(&short, "1\n2\n").unwrap();
    let o = usi(&["build", "--text", p(&t), "--weights", p(&short), "--k", "1", "--out", p(&dir.path().join("x"))]);
    assert_eq!(o.status.code(), Some(2));

    let (b, _) = write_weighted(dir.path(), "banana", b"banana", &[1.0; 6]);
    assert_eq!(usi(&["tune", "--text", p(&b), "--k", "1000"]).status.code(), Some(2));
}

#[test]
fn mine_emits_csv_schema_and_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let mut text = b"abcabcabc,\n\"q\"".repeat(20);
    text.extend(std::iter::repeat_n(b'z', 200));
    let t = dir.path().join("t");
    fs::write(&t, &text).unwrap();
    for engine in ["exact", "approx", "shk", "tktrie"] {
        let a = ok(&["mine", "--text", p(&t), "--k", "50", "--engine", engine]);
        let b = ok(&["mine", "--text", p(&t), "--k", "50", "--engine", engine]);
        assert_eq!(a, b, "{engine}");
        let mut rows = csv::Reader::from_reader(a.as_bytes());
        assert_eq!(rows.headers().unwrap(), vec!["witness_pos", "length", "est_freq", "substring"]);
        let mut count = 0;
        for r in rows.records() {
            let r = r.unwrap();
            let (j, len): (usize, usize) = (r[0].parse().unwrap(), r[1].parse().unwrap());
            let shown = &r[3];
            let expected = usi_core::eval::workload::escape_pattern(&text[j..j + len.min(64)]);
            if len > 64 {
                assert_eq!(shown, format!("{expected}\u{2026}"));
            } else {
                assert_eq!(shown, expected);
            }
            count += 1;
        }
        assert!(count <= 50);
    }
    let bare = ok(&["mine", "--text", p(&t), "--k", "5", "--no-substring"]);
    assert!(bare.starts_with("witness_pos,length,est_freq\n"));
    let json: serde_json::Value =
        serde_json::from_str(&ok(&["mine", "--text", p(&t), "--k", "5", "--format", "json"])).unwrap();
    assert_eq!(json.as_array().unwrap().len(), 5);
}

#[test]
fn approx_with_one_round_matches_exact_frequencies() {
    let dir = TempDir::new().unwrap();
    let text: Vec<u8> = (0..2000u32).map(|i| b"ab"[(i.wrapping_mul(2654435761) >> 31) as usize]).collect();
    let t = dir.path().join("t");
    fs::write(&t, &text).unwrap();
    let freqs = |out: String| -> Vec<u64> {
        let mut v: Vec<u64> =
            csv::Reader::from_reader(out.as_bytes()).records().map(|r| r.unwrap()[2].parse().unwrap()).collect();
        v.sort_unstable();
        v
    };
    let exact = freqs(ok(&["mine", "--text", p(&t), "--k", "100", "--no-substring"]));
    let approx = freqs(ok(&["mine", "--text", p(&t), "--k", "100", "--approx", "--s", "1", "--no-substring"]));
    assert_eq!(exact, approx);
}

#[test]
fn workload_generation_honours_seed_and_escapes() {
    let dir = TempDir::new().unwrap();
    let text: Vec<u8> = (0..5000u32).map(|i| (i * 7 % 13) as u8 + if i % 3 == 0 { 0 } else { b'a' }).collect();
    let t = dir.path().join("t");
    fs::write(&t, &text).unwrap();
    let args = ["gen-workload", "--text", p(&t), "--queries", "200", "--max-len", "40"];
    let a = ok(&args);
    assert_eq!(a, ok(&args));
    let seeded = Command::new(env!("CARGO_BIN_EXE_usi")).args(args).env("USI_SEED", "99").output().unwrap();
    assert!(seeded.status.success());
    assert_ne!(stdout(&seeded), a);
    let flag = ok(&[&args[..], &["--seed", "99"]].concat());
    assert_eq!(stdout(&seeded), flag);
    let patterns = usi_core::eval::read_workload(a.as_bytes()).unwrap();
    assert_eq!(patterns.len(), 200);
    for pat in &patterns {
        assert!(text.windows(pat.len()).any(|w| w == &pat[..]));
    }
    assert!(a.contains("\\x"), "control bytes are escaped");
    assert_eq!(usi(&["gen-workload", "--text", p(&t), "--queries", "5", "--kind", "w2"]).status.code(), Some(1));
}

#[test]
fn patterns_file_matches_single_queries() {
    let dir = TempDir::new().unwrap();
    let (t, w) = example(dir.path());
    let idx = build(dir.path(), &t, &w, 8, &[]);
    let wl = dir.path().join("wl");
    ok(&[
        "gen-workload",
        "--index",
        p(&idx),
        "--queries",
        "30",
        "--pool-divisor",
        "4",
        "--max-len",
        "6",
        "--output",
        p(&wl),
    ]);
    let batch = ok(&["query", "--index", p(&idx), "--patterns-file", p(&wl)]);
    let patterns = usi_core::eval::read_workload(fs::read(&wl).unwrap().as_slice()).unwrap();
    let lines: Vec<&str> = batch.lines().collect();
    assert_eq!(lines.len(), patterns.len());
    for (pat, line) in patterns.iter().zip(&lines) {
        let single = ok(&["query", "--index", p(&idx), "--pattern", std::str::from_utf8(pat).unwrap()]);
        assert_eq!(single.trim_end(), *line);
    }
    for engine in ["bsl1", "bsl2", "bsl3", "bsl4"] {
        assert_eq!(ok(&["query", "--index", p(&idx), "--engine", engine, "--patterns-file", p(&wl)]), batch);
    }
    assert_eq!(ok(&["query", "--index", p(&idx), "--trust", "--patterns-file", p(&wl)]), batch);
}

#[test]
fn eval_scores_exact_list_perfectly() {
    let dir = TempDir::new().unwrap();
    let t = dir.path().join("d");
    ok(&["gen-corpus", "--kind", "dna", "--n", "30000", "--out", p(&t)]);
    let mined = dir.path().join("m.csv");
    ok(&["mine", "--text", p(&t), "--k", "60", "--output", p(&mined)]);
    let v: serde_json::Value =
        serde_json::from_str(&ok(&["eval", "--text", p(&t), "--k", "60", "--mined", p(&mined)])).unwrap();
    assert_eq!(v["accuracy_true_freq"], 100.0);
    assert_eq!(v["relative_error"], 0.0);
    assert_eq!(v["ndcg"], 1.0);
    let v: serde_json::Value =
        serde_json::from_str(&ok(&["eval", "--text", p(&t), "--k", "60", "--engine", "tktrie"])).unwrap();
    assert!(v["relative_error"].as_f64().unwrap() >= 0.0);
}

#[test]
fn sequential_and_parallel_runs_agree() {
    let dir = TempDir::new().unwrap();
    let t = dir.path().join("p");
    ok(&["gen-corpus", "--kind", "prose", "--n", "50000", "--out", p(&t)]);
    let args = ["mine", "--text", p(&t), "--k", "200", "--approx", "--s", "4"];
    assert_eq!(ok(&args), ok(&[&args[..], &["--sequential"]].concat()));
    let threaded = Command::new(env!("CARGO_BIN_EXE_usi")).args(args).env("USI_THREADS", "2").output().unwrap();
    assert_eq!(stdout(&threaded), ok(&args));
}

#[test]
fn bench_writes_report_rows() {
    let dir = TempDir::new().unwrap();
    let t = dir.path().join("d");
    let w = dir.path().join("dw");
    ok(&["gen-corpus", "--kind", "dna", "--n", "20000", "--out", p(&t), "--weights-out", p(&w)]);
    let wl = dir.path().join("w1");
    ok(&["gen-workload", "--text", p(&t), "--queries", "100", "--output", p(&wl)]);
    let out = ok(&[
        "bench",
        "--text",
        p(&t),
        "--weights",
        p(&w),
        "--k",
        "200",
        "--workload",
        p(&wl),
        "--engines",
        "usi,bsl2",
    ]);
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("engine,workload,K,s,n,metric,value"));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert!(rows.iter().all(|r| r.len() == 7 && r[1] == "w1" && r[2] == "200" && r[4] == "20000"));
    assert!(rows.iter().any(|r| r[0] == "usi" && r[5] == "mean_ns"));
    assert!(rows.iter().any(|r| r[0] == "bsl2" && r[5] == "index_size_bytes"));
    let queries: Vec<&Vec<&str>> = rows.iter().filter(|r| r[5] == "queries").collect();
    assert!(queries.iter().all(|r| r[6] == "200"), "two kept runs of 100 queries");
}

#[test]
fn report_rss_goes_to_stderr() {
    let dir = TempDir::new().unwrap();
    let t = dir.path().join("t");
    fs::write(&t, b"mississippi").unwrap();
    let o = usi(&["mine", "--text", p(&t), "--k", "3", "--report-rss"]);
    assert!(o.status.success());
    let err = String::from_utf8_lossy(&o.stderr);
    let line = err.lines().find(|l| l.starts_with("peak_rss_bytes=")).unwrap();
    assert!(line["peak_rss_bytes=".len()..].parse::<u64>().unwrap() > 0);
    assert!(!stdout(&o).contains("peak_rss"));
}
