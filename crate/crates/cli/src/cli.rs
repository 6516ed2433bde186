use std::path::PathBuf;

use clap::builder::{PossibleValuesParser, TypedValueParser};
use clap::{Args, Parser, Subcommand, ValueEnum};
use emoprompt_core::corpus::DatasetFormat;
use emoprompt_core::selection::{strategy_tokens, SelectionMethod};
use emoprompt_core::textmetrics::MetricId;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Text,
    /// One JSON record per line.
    Machine,
}

#[derive(Debug, Parser)]
#[command(name = "emoprompt", version, about = "Post-ASR emotion prediction with LLM prompts")]
pub struct Cli {
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Text)]
    pub format: OutputFormat,

    /// More log output (repeat for debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Convert a dataset to the canonical record stream.
    Ingest(IngestArgs),
    /// Check a dataset and summarise coverage and labels.
    Validate(DatasetArgs),
    /// Rank one utterance's transcripts by consensus.
    Rank(RankArgs),
    /// Show the transcript a strategy picks.
    Select(SelectArgs),
    /// Render a prompt without sending it.
    Prompt(PromptArgs),
    /// Run one experiment.
    Run(RunArgs),
    /// Run a grid of experiments and tabulate them.
    Sweep(SweepArgs),
    /// Recompute a run's report from its predictions.
    Eval(EvalArgs),
    /// Print a run report or rebuild sweep tables.
    Report(ReportArgs),
}

fn strategy_parser() -> impl TypedValueParser<Value = SelectionMethod> {
    PossibleValuesParser::new(strategy_tokens()).map(|s| s.parse::<SelectionMethod>().expect("listed token parses"))
}

fn metric_parser() -> impl TypedValueParser<Value = MetricId> {
    PossibleValuesParser::new(MetricId::ALL.map(MetricId::token)).map(|s| s.parse::<MetricId>().expect("listed token parses"))
}

fn schema_parser(s: &str) -> Result<DatasetFormat, String> {
    s.parse()
}

#[derive(Debug, Args)]
pub struct DatasetArgs {
    pub dataset: PathBuf,
    /// Input layout: canonical or challenge.
    #[arg(long, value_parser = schema_parser, default_value = "canonical")]
    pub schema: DatasetFormat,
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    #[command(flatten)]
    pub input: DatasetArgs,
    /// Write the canonical stream here instead of standard output.
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct UtteranceArgs {
    #[arg(long)]
    pub utterance: String,
    /// Disambiguates utterance ids shared between sessions.
    #[arg(long)]
    pub session: Option<String>,
}

#[derive(Debug, Args)]
pub struct RankArgs {
    #[command(flatten)]
    pub input: DatasetArgs,
    #[command(flatten)]
    pub target: UtteranceArgs,
    #[arg(long, value_parser = metric_parser())]
    pub metric: MetricId,
}

#[derive(Debug, Args)]
pub struct SelectArgs {
    #[command(flatten)]
    pub input: DatasetArgs,
    #[arg(long, value_parser = strategy_parser())]
    pub strategy: SelectionMethod,
    /// Only this utterance; default is every prediction target.
    #[arg(long)]
    pub utterance: Option<String>,
    #[arg(long)]
    pub session: Option<String>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct PromptArgs {
    #[command(flatten)]
    pub input: DatasetArgs,
    #[command(flatten)]
    pub target: UtteranceArgs,
    #[arg(long, value_parser = strategy_parser(), default_value = "least_punc")]
    pub strategy: SelectionMethod,
    #[arg(long, default_value_t = 0)]
    pub cw: usize,
    /// Transcripts of the target shown at once (1 to 11).
    #[arg(long, default_value_t = 1)]
    pub n: usize,
    /// Seeds selection and fusion ordering.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Accepted for clarity; prompts are never sent.
    #[arg(long)]
    pub dry_run: bool,
}

/// Settings shared by `run` and `sweep`. Flags override the config file.
#[derive(Debug, Args)]
pub struct ExperimentFlags {
    /// Experiment config (TOML).
    #[arg(long, short)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub dataset: Option<PathBuf>,
    #[arg(long, value_parser = schema_parser)]
    pub schema: Option<DatasetFormat>,
    /// Output directory.
    #[arg(long, short)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub model: Option<String>,
    /// Seeds selection, fusion and bootstrap unless set individually.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub selection_seed: Option<u64>,
    #[arg(long)]
    pub fusion_seed: Option<u64>,
    #[arg(long)]
    pub bootstrap_seed: Option<u64>,
    #[arg(long)]
    pub resamples: Option<usize>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub workers: Option<usize>,
    /// Response cache journal.
    #[arg(long)]
    pub cache: Option<PathBuf>,
    /// Use the deterministic keyword transport.
    #[arg(long)]
    pub mock: bool,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub common: ExperimentFlags,
    #[arg(long, value_parser = strategy_parser())]
    pub strategy: Option<SelectionMethod>,
    #[arg(long)]
    pub cw: Option<usize>,
    #[arg(long)]
    pub n: Option<usize>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub common: ExperimentFlags,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Run directory.
    pub run_dir: PathBuf,
    #[arg(long)]
    pub resamples: Option<usize>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub bootstrap_seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// Run directory or sweep directory.
    pub dir: PathBuf,
}

pub fn strategies_help() -> String {
    format!("Strategy tokens: {}", strategy_tokens().join(", "))
}
