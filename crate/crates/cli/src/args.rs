use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

#[derive(Debug, Parser)]
#[command(name = "kgreason", version, about = "Plan, retrieve and reason over a knowledge graph")]
pub struct Cli {
    /// Seed for every randomized generator [default: 0].
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads for per-question stages (default: available cores).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a seeded synthetic graph (and questions, where applicable).
    Synth(SynthArgs),
    /// Build the graph index, print its stats and optionally save a snapshot.
    Index(IndexArgs),
    /// Mine shortest relation paths for each question.
    Mine(MineArgs),
    /// Write planning and reasoning instruction datasets.
    BuildDataset(BuildDatasetArgs),
    /// Fit a count planner on mined plans.
    TrainPlanner(TrainPlannerArgs),
    /// Generate plans per question.
    Plan(PlanArgs),
    /// Ground plans on the graph.
    Retrieve(RetrieveArgs),
    /// Turn retrieved paths into answers.
    Answer(AnswerArgs),
    /// Score predictions against gold answers.
    Eval(EvalArgs),
    /// Retrieval cost and volume as the number of plans K grows.
    RetrievalStats(RetrievalStatsArgs),
    /// Run index, mine, train, plan, retrieve, answer and eval in one go.
    Pipeline(PipelineArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SynthKind {
    /// The two-edge Alice/Bob/Charlie family graph with one question.
    Toy,
    /// Uniform endpoints, Zipf-ranked relation frequencies.
    Zipf,
    /// Movie-style graph with template questions.
    Movies,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PlannerMode {
    Count,
    Llm,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReasonerMode {
    All,
    Vote,
    Llm,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long, value_enum)]
    pub kind: SynthKind,
    /// Receives graph.tsv and, for toy and movies, qa.jsonl.
    #[arg(long)]
    pub out_dir: PathBuf,
    #[arg(long, default_value_t = 1_000_000)]
    pub triples: usize,
    #[arg(long, default_value_t = 100_000)]
    pub entities: usize,
    #[arg(long, default_value_t = 200)]
    pub relations: usize,
    #[arg(long, default_value_t = 1.1)]
    pub exponent: f64,
    #[arg(long, default_value_t = 100)]
    pub questions: usize,
}

#[derive(Debug, Args)]
pub struct IndexArgs {
    /// Tab-separated triples (or an existing snapshot).
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Add an `<r>_inv` edge for every triple.
    #[arg(long)]
    pub inverse_edges: bool,
}

#[derive(Debug, Args)]
pub struct MineArgs {
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long)]
    pub qa: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = kgreason_core::mining::DEFAULT_MAX_HOPS)]
    pub max_hops: usize,
}

#[derive(Debug, Args)]
pub struct BuildDatasetArgs {
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long)]
    pub qa: PathBuf,
    /// Receives planning.jsonl, reasoning.jsonl and skipped.jsonl.
    #[arg(long)]
    pub out_dir: PathBuf,
    #[arg(long, default_value_t = kgreason_core::mining::DEFAULT_MAX_HOPS)]
    pub max_hops: usize,
    #[command(flatten)]
    pub cap: CapArgs,
}

#[derive(Debug, Clone, Copy, Args)]
pub struct CapArgs {
    /// Paths kept per plan.
    #[arg(long, default_value_t = 3000)]
    pub cap: usize,
    /// Keep every path.
    #[arg(long, conflicts_with = "cap")]
    pub no_cap: bool,
}

impl CapArgs {
    pub fn get(&self) -> Option<usize> {
        (!self.no_cap).then_some(self.cap)
    }
}

#[derive(Debug, Args)]
pub struct TrainPlannerArgs {
    #[arg(long)]
    pub graph: PathBuf,
    /// Output of `mine`.
    #[arg(long)]
    pub mined: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 0.1)]
    pub alpha: f64,
    #[arg(long, default_value_t = 4)]
    pub max_len: usize,
}

#[derive(Debug, Clone, Copy, Args)]
pub struct BeamArgs {
    /// Plans kept per question.
    #[arg(long, default_value_t = 3)]
    pub k: usize,
    #[arg(long, default_value_t = 3)]
    pub beam_width: usize,
    #[arg(long, default_value_t = 4)]
    pub max_len: usize,
}

#[derive(Debug, Args)]
pub struct PlanArgs {
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long)]
    pub qa: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value = "count")]
    pub mode: PlannerMode,
    /// Count planner file; required in count mode, used as fallback in llm mode.
    #[arg(long)]
    pub planner: Option<PathBuf>,
    #[command(flatten)]
    pub beam: BeamArgs,
    /// Keep count-planner plans that rely on smoothing mass.
    #[arg(long)]
    pub keep_unsupported: bool,
}

#[derive(Debug, Args)]
pub struct RetrieveArgs {
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long)]
    pub qa: PathBuf,
    /// Output of `plan`.
    #[arg(long)]
    pub plans: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub cap: CapArgs,
}

#[derive(Debug, Args)]
pub struct AnswerArgs {
    #[arg(long)]
    pub graph: PathBuf,
    /// Output of `retrieve`.
    #[arg(long)]
    pub retrieved: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value = "vote")]
    pub mode: ReasonerMode,
    /// Answers kept by the vote reasoner.
    #[arg(long, default_value_t = 5)]
    pub top_n: usize,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub qa: PathBuf,
    #[arg(long)]
    pub predictions: PathBuf,
    /// Report file (JSON).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Adds hop breakdowns using mined shortest-path lengths.
    #[arg(long)]
    pub graph: Option<PathBuf>,
    #[arg(long, default_value_t = kgreason_core::mining::DEFAULT_MAX_HOPS)]
    pub max_hops: usize,
}

#[derive(Debug, Args)]
pub struct RetrievalStatsArgs {
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long)]
    pub qa: PathBuf,
    #[arg(long)]
    pub planner: PathBuf,
    /// Sweep K = 1..=max_k.
    #[arg(long, default_value_t = 5)]
    pub max_k: usize,
    #[arg(long, default_value_t = 4)]
    pub max_len: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub cap: CapArgs,
}

#[derive(Debug, Args)]
pub struct PipelineArgs {
    /// TOML run configuration; flags given here override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub graph: Option<PathBuf>,
    #[arg(long)]
    pub qa: Option<PathBuf>,
    /// Questions used for mining and planner training (default: --qa).
    #[arg(long)]
    pub train_qa: Option<PathBuf>,
    #[arg(long)]
    pub output_dir: Option<PathBuf>,
    #[arg(long)]
    pub max_hops: Option<usize>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub beam_width: Option<usize>,
    #[arg(long)]
    pub max_len: Option<usize>,
    #[arg(long)]
    pub retrieval_cap: Option<usize>,
    #[arg(long, value_enum)]
    pub planner_mode: Option<PlannerMode>,
    #[arg(long, value_enum)]
    pub reasoner_mode: Option<ReasonerMode>,
    #[arg(long)]
    pub top_n: Option<usize>,
    #[arg(long)]
    pub alpha: Option<f64>,
}
