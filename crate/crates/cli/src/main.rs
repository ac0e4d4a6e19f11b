//! Command-line front end for the anxiety-lexicon engine.

mod commands;
mod output;

use std::path::PathBuf;

use anyhow::Result;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

const ETHICS_NOTE: &str = "Lexicon scores are aggregate crowd perceptions of word \
associations, not clinical measurements. Draw conclusions from large samples of text, \
prefer comparative over absolute readings, and never use these outputs as a standalone \
screening or diagnostic instrument.";

#[derive(Parser)]
#[command(name = output::TOOL, version, about = "Anxiety-lexicon toolkit: aggregate \
annotations, measure reliability, score emotion arcs, and compare lexicons", after_help = ETHICS_NOTE)]
struct Cli {
    /// Master seed for every stochastic step; recorded in all outputs.
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,

    /// Worker threads (0 = all cores). Results never depend on this.
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Aggregate raw annotator responses into a scored lexicon.
    Aggregate(AggregateArgs),
    /// Split-half reliability report over raw responses.
    Reliability(ReliabilityArgs),
    /// Score one text stream into an arc with a lexicon.
    Arc(ArcArgs),
    /// Sample synthetic labeled streams from a binary corpus.
    Sample(SampleArgs),
    /// Evaluate predicted vs. gold arcs over a stream suite.
    Evaluate(EvaluateArgs),
    /// Correlation matrix across lexicon resources.
    Correlate(CorrelateArgs),
    /// Age-of-acquisition breakdowns of a lexicon.
    Aoa(AoaArgs),
    /// Class distribution of a lexicon.
    Classdist(ClassdistArgs),
}

#[derive(Args, Serialize)]
struct AggregateArgs {
    /// Responses CSV: term,annotator_id,rating
    #[arg(long)]
    responses: PathBuf,
    /// Gold questions CSV: term,expected,popup
    #[arg(long)]
    golds: Option<PathBuf>,
    /// Output lexicon TSV
    #[arg(long)]
    lexicon_out: PathBuf,
    /// Output summary JSON
    #[arg(long)]
    summary_out: PathBuf,
    /// Optional per-annotator stats JSON
    #[arg(long)]
    stats_out: Option<PathBuf>,
    /// Gold accuracy below this discards the annotator
    #[arg(long, default_value_t = 0.80)]
    threshold: f64,
    /// Gold answers within this distance count as correct
    #[arg(long, default_value_t = 1)]
    tolerance: u8,
    /// Keep responses to gold terms in the aggregation input
    #[arg(long, default_value_t = false)]
    include_golds: bool,
    /// Name recorded in the output lexicon
    #[arg(long, default_value = "aggregated")]
    name: String,
}

#[derive(Args, Serialize)]
struct ReliabilityArgs {
    /// Responses CSV: term,annotator_id,rating
    #[arg(long)]
    responses: PathBuf,
    /// Optional golds CSV; when given, low-accuracy annotators are filtered
    /// out first with the same rules as `aggregate`
    #[arg(long)]
    golds: Option<PathBuf>,
    /// Output report JSON
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    /// Class-scheme sizes, one report row each
    #[arg(long, value_delimiter = ',', default_values_t = vec![10, 7, 5, 4, 3, 2])]
    schemes: Vec<usize>,
    /// Extra closeness thresholds besides each row's bin width
    #[arg(long, value_delimiter = ',')]
    thresholds: Vec<f64>,
}

#[derive(Args, Serialize)]
struct ArcArgs {
    /// Stream JSONL: {"text", "label"?, "ts"?} per line
    #[arg(long)]
    stream: PathBuf,
    /// Lexicon TSV
    #[arg(long)]
    lexicon: PathBuf,
    /// Predicted arc CSV (bin_start,score,coverage)
    #[arg(long)]
    out: PathBuf,
    /// Optional gold arc CSV from the stream labels
    #[arg(long)]
    gold_out: Option<PathBuf>,
    /// Optional predicted-vs-gold evaluation report JSON (needs labels)
    #[arg(long)]
    report_out: Option<PathBuf>,
    /// Bin size in posts
    #[arg(long, default_value_t = 50)]
    bin_size: usize,
    /// Step between bins in posts (1 = rolling)
    #[arg(long, default_value_t = 1)]
    step: usize,
    /// Time-mode period in seconds (overrides bin-size/step)
    #[arg(long)]
    period: Option<i64>,
}

#[derive(Args, Serialize)]
struct SampleArgs {
    /// Binary-labeled corpus JSONL
    #[arg(long)]
    corpus: PathBuf,
    /// Directory for stream files and the manifest
    #[arg(long)]
    out_dir: PathBuf,
    #[arg(long, default_value_t = 1000)]
    streams: usize,
    /// Posts per stream
    #[arg(long, default_value_t = 10_000)]
    length: usize,
    #[arg(long, default_value_t = 50)]
    burst_min: usize,
    #[arg(long, default_value_t = 500)]
    burst_max: usize,
    /// How each burst realizes its positive proportion
    #[arg(long, value_enum, default_value_t = MixingArg::Exact)]
    mixing: MixingArg,
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
enum MixingArg {
    Exact,
    Bernoulli,
}

#[derive(Args, Serialize)]
struct EvaluateArgs {
    /// A stream JSONL file or a directory of them
    #[arg(long)]
    streams: PathBuf,
    /// Lexicon TSV, repeatable as name=path for cross-lexicon comparisons
    #[arg(long, required = true)]
    lexicon: Vec<String>,
    /// Output CSV, one row per (lexicon, bin size)
    #[arg(long)]
    out: PathBuf,
    #[arg(long, value_delimiter = ',', default_values_t = vec![1, 10, 50, 100, 200, 500, 1000])]
    bin_sizes: Vec<usize>,
    /// Step between bins (1 = rolling)
    #[arg(long, default_value_t = 1)]
    step: usize,
}

#[derive(Args, Serialize)]
struct CorrelateArgs {
    /// Resources as name=path, at least two
    #[arg(long, required = true, num_args = 1..)]
    resource: Vec<String>,
    /// Output matrix CSV
    #[arg(long)]
    out: PathBuf,
    #[arg(long, value_enum, default_value_t = MethodArg::Spearman)]
    method: MethodArg,
    /// Optional affect-space scatter CSV; requires resources named
    /// anxiety, valence, arousal, and dominance
    #[arg(long)]
    affect_out: Option<PathBuf>,
    /// Anxiety band cutoff for the affect-space view (calm below its
    /// negation)
    #[arg(long, default_value_t = 0.5)]
    affect_cutoff: f64,
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
enum MethodArg {
    Spearman,
    Pearson,
}

#[derive(Args, Serialize)]
struct AoaArgs {
    /// Lexicon TSV
    #[arg(long)]
    lexicon: PathBuf,
    /// Age-of-acquisition CSV: term,aoa_years
    #[arg(long)]
    aoa: PathBuf,
    /// Per-age class percentages of all joined terms (CSV)
    #[arg(long)]
    dist_out: PathBuf,
    /// Per-age shares over the six non-neutral classes (CSV)
    #[arg(long)]
    shares_out: PathBuf,
}

#[derive(Args, Serialize)]
struct ClassdistArgs {
    /// Lexicon TSV
    #[arg(long)]
    lexicon: PathBuf,
    /// Output file
    #[arg(long)]
    out: PathBuf,
    #[arg(long, value_enum, default_value_t = FormatArg::Json)]
    format: FormatArg,
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
enum FormatArg {
    Json,
    Csv,
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    if cli.jobs > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cli.jobs)
            .build_global()?;
    }
    match &cli.command {
        Command::Aggregate(args) => commands::aggregate(args, cli.seed),
        Command::Reliability(args) => commands::reliability(args, cli.seed),
        Command::Arc(args) => commands::arc(args, cli.seed),
        Command::Sample(args) => commands::sample(args, cli.seed),
        Command::Evaluate(args) => commands::evaluate(args, cli.seed),
        Command::Correlate(args) => commands::correlate(args, cli.seed),
        Command::Aoa(args) => commands::aoa(args, cli.seed),
        Command::Classdist(args) => commands::classdist(args, cli.seed),
    }
}
