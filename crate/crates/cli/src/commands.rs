use std::fs::{self, File};
use std::io::{BufReader, Write};
use std::path::Path;
use std::sync::Arc;
use std::time::Instant;

use serde::Serialize;
use usi_core::competitors::{substring_hk_mine, topk_trie_mine, EngineKind, QueryEngine, ShkParams};
use usi_core::eval::{
    evaluate, generate_corpus, generate_workload, peak_rss_bytes, read_workload, run_benchmark, uniform_step_weights,
    write_report_csv, write_workload, ConstructionMetrics, EngineUnderTest, Workload, WorkloadConfig,
};
use usi_core::par::{configure_threads, Execution};
use usi_core::suffix::SuffixArrayIndex;
use usi_core::text::{load_weighted_text, write_weights, WeightedText};
use usi_core::topk::{
    approximate_top_k, build_tuning_tables, select_top_k, tune_by_k, tune_by_tau, ApproxConfig, SampledEntry,
};
use usi_core::usi::{read_index_file, write_index_file, BuildOptions, FallbackIndex, Miner, UsiIndex, UtilityTable};
use usi_core::utility::UtilitySpec;

use crate::args::*;
use crate::output::{format_utility, read_mined, sink, write_mined, write_record};
use crate::{CliError, CliResult};

struct Ctx {
    seed: u64,
    exec: Execution,
    format: Option<OutputFormat>,
}

impl Ctx {
    fn format_or(&self, default: OutputFormat) -> OutputFormat {
        self.format.unwrap_or(default)
    }
}

pub fn run(cli: Cli) -> CliResult<()> {
    let g = &cli.global;
    if let Some(t) = g.threads {
        if t == 0 {
            return Err(CliError::Usage("--threads must be at least 1".into()));
        }
        configure_threads(t).map_err(CliError::Internal)?;
    }
    let ctx = Ctx {
        seed: g.seed,
        exec: if g.sequential { Execution::Sequential } else { Execution::Parallel },
        format: g.format,
    };
    match &cli.command {
        Command::Build(a) => build(&ctx, a)?,
        Command::Query(a) => query(&ctx, a)?,
        Command::Mine(a) => mine(&ctx, a)?,
        Command::Tune(a) => tune(&ctx, a)?,
        Command::GenWorkload(a) => gen_workload(&ctx, a)?,
        Command::Eval(a) => eval(&ctx, a)?,
        Command::Bench(a) => bench(&ctx, a)?,
        Command::GenCorpus(a) => gen_corpus(&ctx, a)?,
    }
    if g.report_rss {
        match peak_rss_bytes() {
            Some(b) => eprintln!("peak_rss_bytes={b}"),
            None => eprintln!("peak_rss_bytes=unavailable"),
        }
    }
    Ok(())
}

fn read_text(path: &Path) -> CliResult<Vec<u8>> {
    fs::read(path).map_err(|e| CliError::Data(format!("cannot read {}: {e}", path.display())))
}

fn open_file(path: &Path) -> CliResult<File> {
    File::open(path).map_err(|e| CliError::Data(format!("cannot open {}: {e}", path.display())))
}

fn open_index(path: &Path) -> CliResult<UsiIndex> {
    read_index_file(path).map_err(|e| match e {
        usi_core::UsiError::Io(io) => CliError::Data(format!("cannot read {}: {io}", path.display())),
        other => other.into(),
    })
}

fn load_weighted(input: &WeightedInput) -> CliResult<WeightedText> {
    Ok(load_weighted_text(open_file(&input.text)?, open_file(&input.weights)?, input.weight_format)?)
}

fn build_options(ctx: &Ctx, k: usize, approx: &ApproxArgs, trust: bool) -> BuildOptions {
    let miner = if approx.approx {
        Miner::Approx(ApproxConfig { s: approx.s.map(|s| s as usize), strategy: approx.lce, ..Default::default() })
    } else {
        Miner::Exact
    };
    BuildOptions { k, miner, seed: ctx.seed, verify: !trust, exec: ctx.exec }
}

#[derive(Serialize)]
struct BuildSummary {
    n: u64,
    k: u64,
    miner: &'static str,
    s: u64,
    tau_k: u64,
    l_k: u64,
    entries: usize,
    index_bytes: usize,
}

fn build(ctx: &Ctx, a: &BuildArgs) -> CliResult<()> {
    let wt = load_weighted(&a.input)?;
    let spec = UtilitySpec::new(a.utility.local, a.utility.global);
    let idx = UsiIndex::build(&wt, spec, &build_options(ctx, a.k, &a.approx, a.trust))?;
    write_index_file(&idx, &a.out)?;
    let m = idx.meta();
    let summary = BuildSummary {
        n: m.n,
        k: m.k,
        miner: if a.approx.approx { "approx" } else { "exact" },
        s: m.s,
        tau_k: m.tau_k,
        l_k: m.l_k,
        entries: idx.table().len(),
        index_bytes: idx.size_bytes(),
    };
    write_record(sink(None)?, &summary, ctx.format_or(OutputFormat::Json))
}

fn query(ctx: &Ctx, a: &QueryArgs) -> CliResult<()> {
    let mut idx = open_index(&a.index)?;
    if a.trust {
        idx.set_verify(false);
    }
    let patterns = match (&a.pattern, &a.patterns_file) {
        (Some(p), _) => vec![p.as_bytes().to_vec()],
        (None, Some(f)) => read_workload(BufReader::new(open_file(f)?))?,
        (None, None) => unreachable!("clap requires one pattern source"),
    };
    let mut engine: Box<dyn QueryEngine> = match a.engine {
        EngineKind::Usi => Box::new(idx),
        kind => kind
            .baseline(idx.base().clone(), idx.meta().k as usize, ctx.seed)
            .ok_or_else(|| CliError::Internal(format!("no baseline named {kind}")))?,
    };
    let mut out = sink(None)?;
    match ctx.format_or(OutputFormat::Text) {
        OutputFormat::Json => {
            let values = patterns.iter().map(|p| engine.query(p)).collect::<Result<Vec<_>, _>>()?;
            serde_json::to_writer(&mut out, &values)?;
            writeln!(out)?;
        }
        OutputFormat::Text | OutputFormat::Csv => {
            for p in &patterns {
                writeln!(out, "{}", format_utility(engine.query(p)?))?;
            }
        }
    }
    out.flush()?;
    Ok(())
}

fn mine_entries(ctx: &Ctx, text: &[u8], k: usize, m: &MinerArgs) -> CliResult<Vec<SampledEntry>> {
    let engine = m.engine();
    if engine != MinerEngine::Approx && m.s.is_some() {
        return Err(CliError::Usage("--s only applies to the approx miner".into()));
    }
    Ok(match engine {
        MinerEngine::Exact => {
            let idx = SuffixArrayIndex::build(text)?;
            select_top_k(idx.sa(), idx.lcp(), text.len(), k, ctx.exec)
                .triples
                .iter()
                .map(|t| SampledEntry { j: t.witness(idx.sa()), len: t.lcp as usize, f: t.frequency() as u64 })
                .collect()
        }
        MinerEngine::Approx => {
            let config = ApproxConfig {
                s: m.s.map(|s| s as usize),
                strategy: m.lce,
                oversample: m.oversample as usize,
                seed: ctx.seed,
                exec: ctx.exec,
            };
            approximate_top_k(text, k, &config)
        }
        MinerEngine::Shk => substring_hk_mine(text, k, &ShkParams { seed: ctx.seed, ..Default::default() }),
        MinerEngine::Tktrie => topk_trie_mine(text, k),
    })
}

fn mine(ctx: &Ctx, a: &MineArgs) -> CliResult<()> {
    let text = read_text(&a.text)?;
    let entries = mine_entries(ctx, &text, a.k, &a.miner)?;
    write_mined(sink(a.output.as_deref())?, &text, &entries, !a.no_substring, ctx.format_or(OutputFormat::Csv))
}

#[derive(Serialize)]
struct TuneByK {
    tau_k: u32,
    l_k: u32,
    predicted_index_bytes: u64,
}

#[derive(Serialize)]
struct TuneByTau {
    k_tau: u64,
    l_tau: u32,
    predicted_construction_cost: u64,
}

fn tune(ctx: &Ctx, a: &TuneArgs) -> CliResult<()> {
    let (n, tables) = match (&a.index, &a.text) {
        (Some(path), _) => {
            let idx = open_index(path)?;
            (idx.base().len(), build_tuning_tables(idx.base().suffix(), ctx.exec))
        }
        (None, Some(path)) => {
            let text = read_text(path)?;
            (text.len(), build_tuning_tables(&SuffixArrayIndex::build(&text)?, ctx.exec))
        }
        (None, None) => unreachable!("clap requires a source"),
    };
    let format = ctx.format_or(OutputFormat::Json);
    match (a.k, a.tau) {
        (Some(k), _) => {
            let (tau_k, l_k) = tune_by_k(&tables, k)?;
            let table = UtilityTable::predicted_size_bytes(usize::try_from(k).unwrap_or(usize::MAX));
            let predicted = FallbackIndex::predicted_size_bytes(n) as u64 + table as u64;
            write_record(sink(None)?, &TuneByK { tau_k, l_k, predicted_index_bytes: predicted }, format)
        }
        (None, Some(tau)) => {
            let (k_tau, l_tau) = tune_by_tau(&tables, tau);
            let cost = n as u64 * l_tau as u64;
            write_record(sink(None)?, &TuneByTau { k_tau, l_tau, predicted_construction_cost: cost }, format)
        }
        (None, None) => unreachable!("clap requires --k or --tau"),
    }
}

fn gen_workload(ctx: &Ctx, a: &GenWorkloadArgs) -> CliResult<()> {
    let mut cfg = match a.kind {
        WorkloadKind::W1 => {
            if a.p.is_some() {
                return Err(CliError::Usage("--p only applies to w2 workloads".into()));
            }
            WorkloadConfig::w1(a.queries, ctx.seed)
        }
        WorkloadKind::W2 => {
            let p = a.p.ok_or_else(|| CliError::Usage("w2 workloads need --p".into()))?;
            WorkloadConfig::w2(p, a.queries, ctx.seed)
        }
    };
    if let Some(d) = a.pool_divisor {
        cfg.pool_divisor = d;
    }
    if let Some(lo) = a.min_len {
        cfg.length_range.0 = lo;
    }
    if let Some(hi) = a.max_len {
        cfg.length_range.1 = hi;
    }
    let patterns = match (&a.index, &a.text) {
        (Some(path), _) => {
            let idx = open_index(path)?;
            generate_workload(idx.text(), idx.base().suffix(), &cfg, ctx.exec)?
        }
        (None, Some(path)) => {
            let text = read_text(path)?;
            generate_workload(&text, &SuffixArrayIndex::build(&text)?, &cfg, ctx.exec)?
        }
        (None, None) => unreachable!("clap requires a source"),
    };
    write_workload(sink(a.output.as_deref())?, &patterns)?;
    Ok(())
}

#[derive(Serialize)]
struct EvalSummary {
    k: usize,
    reported: usize,
    accuracy_true_freq: f64,
    accuracy_reported_freq: f64,
    relative_error: f64,
    ndcg: f64,
}

fn eval(ctx: &Ctx, a: &EvalArgs) -> CliResult<()> {
    let text = read_text(&a.text)?;
    let n = text.len();
    let estimated = match &a.mined {
        Some(path) => {
            let entries = read_mined(path)?;
            if let Some((i, e)) = entries.iter().enumerate().find(|(_, e)| e.len == 0 || e.j + e.len > n) {
                return Err(CliError::Data(format!(
                    "row {} ({}, {}) is outside a text of length {n}",
                    i + 1,
                    e.j,
                    e.len
                )));
            }
            entries
        }
        None => mine_entries(ctx, &text, a.k, &a.miner)?,
    };
    let idx = SuffixArrayIndex::build(&text)?;
    let exact = select_top_k(idx.sa(), idx.lcp(), n, a.k, ctx.exec).triples;
    let q = evaluate(&text, idx.sa(), &exact, &estimated);
    let summary = EvalSummary {
        k: a.k,
        reported: estimated.len(),
        accuracy_true_freq: q.accuracy_true_freq,
        accuracy_reported_freq: q.accuracy_reported_freq,
        relative_error: q.relative_error,
        ndcg: q.ndcg,
    };
    write_record(sink(None)?, &summary, ctx.format_or(OutputFormat::Json))
}

fn bench(ctx: &Ctx, a: &BenchArgs) -> CliResult<()> {
    let wt = load_weighted(&a.input)?;
    let spec = UtilitySpec::new(a.utility.local, a.utility.global);
    let start = Instant::now();
    let base = Arc::new(FallbackIndex::build(&wt, spec)?);
    drop(wt);
    let base_metrics = ConstructionMetrics { seconds: start.elapsed().as_secs_f64(), peak_bytes: peak_rss_bytes() };
    let opts = build_options(ctx, a.k, &a.approx, false);
    let mut s = 0;
    let mut engines = Vec::new();
    for &kind in &a.engines {
        let eut = match kind {
            EngineKind::Usi => {
                let start = Instant::now();
                let idx = UsiIndex::build_on(base.clone(), &opts)?;
                s = idx.meta().s;
                let construction = ConstructionMetrics {
                    seconds: base_metrics.seconds + start.elapsed().as_secs_f64(),
                    peak_bytes: peak_rss_bytes(),
                };
                EngineUnderTest { engine: Box::new(idx), construction }
            }
            kind => EngineUnderTest {
                engine: kind
                    .baseline(base.clone(), a.k, ctx.seed)
                    .ok_or_else(|| CliError::Internal(format!("no baseline named {kind}")))?,
                construction: base_metrics,
            },
        };
        engines.push(eut);
    }
    let mut workloads = Vec::new();
    for path in &a.workloads {
        let patterns = read_workload(BufReader::new(open_file(path)?))?;
        let name = path.file_stem().map_or_else(|| path.display().to_string(), |s| s.to_string_lossy().into_owned());
        workloads.push(Workload { name, text_hash: None, patterns });
    }
    let reports = run_benchmark(&mut engines, &workloads, a.reps, a.k as u64, s)?;
    write_report_csv(sink(a.output.as_deref())?, &reports)?;
    Ok(())
}

fn gen_corpus(ctx: &Ctx, a: &GenCorpusArgs) -> CliResult<()> {
    if a.n == 0 {
        return Err(CliError::Usage("--n must be positive".into()));
    }
    let text = generate_corpus(a.kind, a.n, ctx.seed);
    fs::write(&a.out, &text)?;
    if let Some(path) = &a.weights_out {
        write_weights(File::create(path)?, &uniform_step_weights(a.n, ctx.seed), a.weight_format)?;
    }
    Ok(())
}
