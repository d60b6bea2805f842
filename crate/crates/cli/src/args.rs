use std::path::PathBuf;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use usi_core::competitors::EngineKind;
use usi_core::eval::CorpusKind;
use usi_core::fingerprint::DEFAULT_SEED;
use usi_core::text::WeightFormat;
use usi_core::topk::LceStrategy;
use usi_core::utility::{GlobalOp, LocalOp};

#[derive(Debug, Parser)]
#[command(name = "usi", version, about = "Global-utility queries over weighted strings")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalOpts {
    /// Seed for fingerprints, sampling and workload generation.
    #[arg(long, global = true, env = "USI_SEED", default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Worker threads (defaults to one per core).
    #[arg(long, global = true, env = "USI_THREADS")]
    pub threads: Option<usize>,
    /// Run every stage on the calling thread.
    #[arg(long, global = true)]
    pub sequential: bool,
    /// Print the peak resident set size to stderr when done.
    #[arg(long, global = true)]
    pub report_rss: bool,
    /// Machine output format; lists default to CSV, scalars and records to JSON.
    #[arg(long, global = true, value_enum)]
    pub format: Option<OutputFormat>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Csv,
    Json,
    Text,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build an index file from a weighted text.
    Build(BuildArgs),
    /// Answer global-utility queries against an index file.
    Query(QueryArgs),
    /// Mine the top-K frequent substrings.
    Mine(MineArgs),
    /// Relate K to the miss-path bound and the number of distinct lengths.
    Tune(TuneArgs),
    /// Generate a query workload.
    GenWorkload(GenWorkloadArgs),
    /// Score a mined top-K list against the exact one.
    Eval(EvalArgs),
    /// Time USI and the baselines on query workloads.
    Bench(BenchArgs),
    /// Write a synthetic corpus and step weights.
    GenCorpus(GenCorpusArgs),
}

#[derive(Debug, Args)]
pub struct WeightedInput {
    #[arg(long)]
    pub text: PathBuf,
    #[arg(long)]
    pub weights: PathBuf,
    #[arg(long, value_parser = parse_weight_format, default_value = "text")]
    pub weight_format: WeightFormat,
}

#[derive(Debug, Args)]
pub struct UtilityArgs {
    /// Local aggregator over the weights of one occurrence.
    #[arg(long, value_parser = parse_local_op, default_value = "sum")]
    pub local: LocalOp,
    /// Global aggregator over all occurrences.
    #[arg(long, value_parser = parse_global_op, default_value = "sum")]
    pub global: GlobalOp,
}

#[derive(Debug, Args)]
pub struct ApproxArgs {
    /// Mine with the sampling miner instead of the exact one.
    #[arg(long)]
    pub approx: bool,
    /// Sampling rounds; defaults to ceil(log2 n).
    #[arg(long, requires = "approx", value_parser = clap::value_parser!(u64).range(1..))]
    pub s: Option<u64>,
    #[arg(long, requires = "approx", value_parser = parse_lce, default_value = "direct")]
    pub lce: LceStrategy,
}

#[derive(Debug, Args)]
pub struct BuildArgs {
    #[command(flatten)]
    pub input: WeightedInput,
    #[command(flatten)]
    pub utility: UtilityArgs,
    #[arg(long)]
    pub k: usize,
    #[command(flatten)]
    pub approx: ApproxArgs,
    /// Skip confirming table hits against the text.
    #[arg(long)]
    pub trust: bool,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("patterns").required(true).args(["pattern", "patterns_file"])))]
pub struct QueryArgs {
    #[arg(long)]
    pub index: PathBuf,
    #[arg(long, value_parser = parse_engine, default_value = "usi")]
    pub engine: EngineKind,
    /// A literal pattern.
    #[arg(long)]
    pub pattern: Option<String>,
    /// One escaped pattern per line, as written by gen-workload.
    #[arg(long)]
    pub patterns_file: Option<PathBuf>,
    /// Answer USI hits without comparing against the text.
    #[arg(long)]
    pub trust: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MinerEngine {
    Exact,
    Approx,
    Shk,
    Tktrie,
}

#[derive(Debug, Args)]
pub struct MinerArgs {
    #[arg(long, value_enum, default_value = "exact")]
    pub engine: MinerEngine,
    /// Same as --engine approx.
    #[arg(long, conflicts_with = "engine")]
    pub approx: bool,
    /// Sampling rounds of the approximate miner; defaults to ceil(log2 n).
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub s: Option<u64>,
    #[arg(long, value_parser = parse_lce, default_value = "direct")]
    pub lce: LceStrategy,
    /// Per-round list length as a multiple of K.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    pub oversample: u64,
}

impl MinerArgs {
    pub fn engine(&self) -> MinerEngine {
        if self.approx {
            MinerEngine::Approx
        } else {
            self.engine
        }
    }
}

#[derive(Debug, Args)]
pub struct MineArgs {
    #[arg(long)]
    pub text: PathBuf,
    #[arg(long)]
    pub k: usize,
    #[command(flatten)]
    pub miner: MinerArgs,
    /// Leave out the substring column.
    #[arg(long)]
    pub no_substring: bool,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("source").required(true).args(["index", "text"])))]
#[command(group(ArgGroup::new("target").required(true).args(["k", "tau"])))]
pub struct TuneArgs {
    #[arg(long)]
    pub index: Option<PathBuf>,
    #[arg(long)]
    pub text: Option<PathBuf>,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub k: Option<u64>,
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    pub tau: Option<u32>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum WorkloadKind {
    /// 90% from the top-n/50 substrings.
    W1,
    /// p% from the top-n/100 substrings.
    W2,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("source").required(true).args(["index", "text"])))]
pub struct GenWorkloadArgs {
    #[arg(long)]
    pub index: Option<PathBuf>,
    #[arg(long)]
    pub text: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "w1")]
    pub kind: WorkloadKind,
    /// Percentage of frequent patterns for w2.
    #[arg(long, value_parser = clap::value_parser!(u32).range(0..=100))]
    pub p: Option<u32>,
    #[arg(long)]
    pub queries: usize,
    /// Overrides the frequent pool size n / divisor.
    #[arg(long)]
    pub pool_divisor: Option<usize>,
    #[arg(long)]
    pub min_len: Option<usize>,
    #[arg(long)]
    pub max_len: Option<usize>,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub text: PathBuf,
    #[arg(long)]
    pub k: usize,
    /// CSV written by `mine`; when absent the list is mined here.
    #[arg(long)]
    pub mined: Option<PathBuf>,
    #[command(flatten)]
    pub miner: MinerArgs,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[command(flatten)]
    pub input: WeightedInput,
    #[command(flatten)]
    pub utility: UtilityArgs,
    #[arg(long)]
    pub k: usize,
    #[command(flatten)]
    pub approx: ApproxArgs,
    /// Workload files; each is run against every engine.
    #[arg(long = "workload", required = true)]
    pub workloads: Vec<PathBuf>,
    #[arg(long, value_delimiter = ',', value_parser = parse_engine, default_value = "usi,bsl1,bsl2,bsl3,bsl4")]
    pub engines: Vec<EngineKind>,
    /// Runs per workload; the first is discarded.
    #[arg(long, default_value_t = 3)]
    pub reps: usize,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GenCorpusArgs {
    #[arg(long, value_parser = parse_corpus_kind)]
    pub kind: CorpusKind,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub out: PathBuf,
    /// Also write weights drawn from {0.7, 0.75, ..., 1.0}.
    #[arg(long)]
    pub weights_out: Option<PathBuf>,
    #[arg(long, value_parser = parse_weight_format, default_value = "text")]
    pub weight_format: WeightFormat,
}

fn parse_weight_format(s: &str) -> Result<WeightFormat, String> {
    s.parse().map_err(|e: usi_core::UsiError| e.to_string())
}

fn parse_local_op(s: &str) -> Result<LocalOp, String> {
    s.parse().map_err(|e: usi_core::UsiError| e.to_string())
}

fn parse_global_op(s: &str) -> Result<GlobalOp, String> {
    s.parse().map_err(|e: usi_core::UsiError| e.to_string())
}

fn parse_lce(s: &str) -> Result<LceStrategy, String> {
    s.parse()
}

fn parse_engine(s: &str) -> Result<EngineKind, String> {
    s.parse()
}

fn parse_corpus_kind(s: &str) -> Result<CorpusKind, String> {
    s.parse()
}
