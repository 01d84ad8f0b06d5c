use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

#[derive(Parser, Debug)]
#[command(name = "claimcheck", version, about = "Claim verification pipeline over long evidence documents")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    #[command(flatten)]
    pub common: Common,
}

/// Options shared by every subcommand. Each may also come from the
/// `--config` JSON file; flags win.
#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Common {
    /// JSON file with default values for any option.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Claims JSONL (or the release directory for `ingest --format wice`).
    #[arg(long, global = true)]
    pub input: Option<PathBuf>,
    /// Evidence documents JSONL.
    #[arg(long, global = true)]
    pub evidence: Option<PathBuf>,
    /// Output file (output directory for `ingest`).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub backend: Option<BackendKind>,
    /// Base URL of the scoring service, or the completions URL for `decompose`.
    #[arg(long, global = true)]
    pub endpoint: Option<String>,
    /// Model id. For `--backend replay` this is the recorded backend id.
    #[arg(long, global = true)]
    pub model: Option<String>,
    /// Persistent score cache (JSONL). Required by `--backend replay`.
    #[arg(long, global = true)]
    pub cache: Option<PathBuf>,
    /// Recorded completions for `decompose --backend replay`.
    #[arg(long, global = true)]
    pub replay: Option<PathBuf>,
    /// Token budget per chunk and per oracle chunk (default 256).
    #[arg(long = "chunk-tokens", global = true)]
    pub chunk_tokens: Option<usize>,
    /// Sentences kept by top-k retrieval (default 7).
    #[arg(long, global = true)]
    pub k: Option<usize>,
    /// Decision threshold on scores (default 0.5); for `retrieve`, a fixed
    /// selection threshold that skips tuning.
    #[arg(long, global = true)]
    pub threshold: Option<f64>,
    /// Global seed for oracle padding and the bootstrap (default 0).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads; results do not depend on it.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BackendKind {
    Lexical,
    Remote,
    Replay,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Build a validated corpus, optionally aggregating raw worker annotations.
    Ingest(IngestArgs),
    /// Print dataset statistics.
    Stats,
    /// Split claims into subclaims with a completion model.
    Decompose(DecomposeArgs),
    /// Remove claims whose every subclaim is entailed by some chunk.
    Filter,
    /// Document-level entailment verdicts.
    Entail(EntailArgs),
    /// Supporting-sentence retrieval.
    Retrieve(RetrieveArgs),
    /// Retrieve the top-k sentences, then classify on their concatenation.
    Rtp(RetrieveArgs),
    /// Build (and optionally score) the oracle-retrieval chunks.
    Oracle(OracleArgs),
    /// Metrics and significance tests for verdict and retrieval files.
    Eval(EvalArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Ingest(_) => "ingest",
            Command::Stats => "stats",
            Command::Decompose(_) => "decompose",
            Command::Filter => "filter",
            Command::Entail(_) => "entail",
            Command::Retrieve(_) => "retrieve",
            Command::Rtp(_) => "rtp",
            Command::Oracle(_) => "oracle",
            Command::Eval(_) => "eval",
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InputFormat {
    Repo,
    Wice,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Unit {
    Claim,
    Subclaim,
}

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IngestArgs {
    #[arg(long, value_enum)]
    pub format: Option<InputFormat>,
    /// Raw worker annotations JSONL to aggregate into gold labels.
    #[arg(long)]
    pub annotations: Option<PathBuf>,
    /// Annotators per subclaim (3 or 5).
    #[arg(long)]
    pub workers: Option<usize>,
    /// Release split to import with `--format wice`.
    #[arg(long)]
    pub split: Option<String>,
}

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DecomposeArgs {
    /// Prompt template JSON; defaults to the bundled six-example template.
    #[arg(long)]
    pub template: Option<PathBuf>,
    /// Append every live completion to this replay file.
    #[arg(long)]
    pub record: Option<PathBuf>,
    /// Also write the claims file with accepted subclaims attached.
    #[arg(long = "claims-out")]
    pub claims_out: Option<PathBuf>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    Max,
    Claimsplit,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LevelArg {
    Sentence,
    Chunk,
    Document,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AggregateArg {
    Harmonic,
    Min,
    Mean,
}

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EntailArgs {
    #[arg(long, value_enum)]
    pub strategy: Option<Strategy>,
    #[arg(long, value_enum)]
    pub level: Option<LevelArg>,
    /// Subclaim aggregation for `--strategy claimsplit`.
    #[arg(long, value_enum)]
    pub aggregate: Option<AggregateArg>,
    #[arg(long, value_enum)]
    pub unit: Option<Unit>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Bm25,
    Nli,
}

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RetrieveArgs {
    #[arg(long, value_enum)]
    pub method: Option<Method>,
    /// Context budget for entailment-based retrieval; omit for no context.
    #[arg(long = "context-tokens")]
    pub context_tokens: Option<usize>,
    #[arg(long, value_enum)]
    pub unit: Option<Unit>,
    /// Development claims for threshold tuning.
    #[arg(long = "dev-input")]
    pub dev_input: Option<PathBuf>,
    #[arg(long = "dev-evidence")]
    pub dev_evidence: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OracleArgs {
    #[arg(long, value_enum)]
    pub unit: Option<Unit>,
    /// Score the chunks and write MAX verdicts here.
    #[arg(long = "score-out")]
    pub score_out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvalArgs {
    /// Verdict file of the system under evaluation.
    #[arg(long)]
    pub verdicts: Option<PathBuf>,
    /// Verdict files to test against with the paired bootstrap.
    #[arg(long)]
    pub compare: Vec<PathBuf>,
    /// Retrieval file to score against gold support sets.
    #[arg(long)]
    pub retrieval: Option<PathBuf>,
    #[arg(long = "n-resamples")]
    pub n_resamples: Option<usize>,
}
