use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use motif_shap::{Depth, MaskKind, Weighting};
use serde::Serialize;

#[derive(Parser, Debug, Serialize)]
#[command(name = "motif-shap", version, about = "Shapley explanations of graph classifiers over motifs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Generate a synthetic labelled dataset with injected motifs.
    Synth(SynthArgs),
    /// Mine frequent connected motifs.
    Mine(MineArgs),
    /// Rank motifs by cross-support and select a diverse subset.
    Rank(RankArgs),
    /// Compute motif explanation scores for one or more graphs.
    Explain(ExplainArgs),
    /// Evaluation reports.
    #[command(subcommand)]
    Eval(EvalCommand),
    /// Run a sequence of subcommands from a JSON config.
    Pipeline(PipelineArgs),
    /// Serve a built-in black-box over the line-delimited JSON protocol on
    /// stdin/stdout.
    BlackboxServe(ServeArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Synth(_) => "synth",
            Command::Mine(_) => "mine",
            Command::Rank(_) => "rank",
            Command::Explain(_) => "explain",
            Command::Eval(EvalCommand::Separability(_)) => "eval separability",
            Command::Eval(EvalCommand::Expected(_)) => "eval expected",
            Command::Eval(EvalCommand::ApproxCorr(_)) => "eval approx-corr",
            Command::Eval(EvalCommand::Global(_)) => "eval global",
            Command::Pipeline(_) => "pipeline",
            Command::BlackboxServe(_) => "blackbox-serve",
        }
    }
}

#[derive(Args, Debug, Serialize)]
pub struct SynthArgs {
    #[arg(long)]
    pub nodes: usize,
    #[arg(long)]
    pub graphs: usize,
    #[arg(long, default_value_t = 0.2)]
    pub density: f64,
    /// Number of random motifs (ignored with --motif-file).
    #[arg(long, default_value_t = 6)]
    pub motifs: usize,
    #[arg(long, default_value_t = 10)]
    pub motif_edges: usize,
    /// Perturbation probability per motif; a single value applies to all.
    #[arg(long, value_delimiter = ',')]
    pub rho: Vec<f64>,
    /// Correlation matrix file (identity when omitted).
    #[arg(long)]
    pub correlation: Option<PathBuf>,
    /// Inject these motifs instead of sampling random ones.
    #[arg(long)]
    pub motif_file: Option<PathBuf>,
    /// Let random motifs share nodes.
    #[arg(long)]
    pub overlapping: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Directory receiving dataset.json, motifs.json and injections.json.
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
}

#[derive(Args, Debug, Serialize)]
pub struct MineArgs {
    #[arg(long)]
    pub dataset: PathBuf,
    /// Minimum number of graphs containing the motif.
    #[arg(long)]
    pub support: usize,
    #[arg(long, default_value_t = 4)]
    pub max_size: usize,
    /// Mine only graphs with this label.
    #[arg(long)]
    pub label: Option<u8>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug, Serialize)]
pub struct RankArgs {
    #[arg(long)]
    pub dataset: PathBuf,
    #[arg(long)]
    pub motifs: PathBuf,
    /// Minimum Jaccard distance between selected motifs.
    #[arg(long, default_value_t = 0.5)]
    pub dt: f64,
    /// Minimum motif size in edges.
    #[arg(long, default_value_t = 3)]
    pub st: usize,
    #[arg(long, default_value_t = 10)]
    pub k: usize,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BlackBoxKind {
    GroundTruth,
    Linear,
    External,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Importances {
    /// Proportional to each motif's `rho`, summing to 1.
    Rho,
    /// Equal, summing to 1.
    Uniform,
}

#[derive(Args, Debug, Serialize)]
pub struct BlackBoxArgs {
    #[arg(long, value_enum, default_value_t = BlackBoxKind::GroundTruth)]
    pub blackbox: BlackBoxKind,
    /// Motifs known to the ground-truth scorer (defaults to --motifs).
    #[arg(long)]
    pub truth: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Importances::Rho)]
    pub importances: Importances,
    #[arg(long, default_value_t = 2.0)]
    pub beta: f64,
    #[arg(long, default_value_t = 300)]
    pub epochs: usize,
    #[arg(long, default_value_t = 0.05)]
    pub learning_rate: f64,
    #[arg(long, default_value_t = 1e-3)]
    pub l2: f64,
    #[arg(long, default_value_t = 0.0)]
    pub validation_fraction: f64,
    #[arg(long, default_value_t = 0)]
    pub train_seed: u64,
    /// Command line of an external model speaking the wire protocol.
    #[arg(long)]
    pub external_cmd: Option<String>,
    #[arg(long, default_value_t = 30)]
    pub timeout_secs: u64,
}

#[derive(Args, Debug, Serialize)]
pub struct ExplainArgs {
    #[arg(long)]
    pub dataset: Option<PathBuf>,
    /// A dataset index, `all`, or a graph file.
    #[arg(long, default_value = "all")]
    pub graph: String,
    #[arg(long)]
    pub motifs: PathBuf,
    #[arg(long, default_value = "toggle")]
    pub mask: MaskKind,
    /// Background dataset for average masking (defaults to --dataset).
    #[arg(long)]
    pub background: Option<PathBuf>,
    #[arg(long, default_value = "classic")]
    pub weights: Weighting,
    /// `exact` or a lattice depth.
    #[arg(long, default_value = "exact")]
    pub depth: Depth,
    /// Refuse lattices with more than 2^limit nodes.
    #[arg(long, default_value_t = 20)]
    pub exact_limit: usize,
    /// Rescale approximate scores to sum to B(G) - B(G fully masked).
    #[arg(long)]
    pub rescale: bool,
    #[command(flatten)]
    pub model: BlackBoxArgs,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EvalCommand {
    /// KS test between intra- and inter-class Jaccard distances.
    Separability(SeparabilityArgs),
    /// Expected explanation scores, optionally correlated with computed ones.
    Expected(ExpectedArgs),
    /// Per-graph Pearson correlation of approximate against exact scores.
    ApproxCorr(ApproxCorrArgs),
    /// Mean absolute score per motif across graphs.
    Global(GlobalArgs),
}

#[derive(Args, Debug, Serialize)]
pub struct SeparabilityArgs {
    #[arg(long)]
    pub dataset: PathBuf,
    /// Subsample at most this many graph pairs.
    #[arg(long)]
    pub max_pairs: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct ExpectedArgs {
    /// Dataset carrying an injection record.
    #[arg(long)]
    pub dataset: PathBuf,
    /// Motifs with class and `rho`.
    #[arg(long)]
    pub motifs: PathBuf,
    /// Explanations of every dataset graph, for a Spearman comparison.
    #[arg(long)]
    pub explanations: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct ApproxCorrArgs {
    #[arg(long)]
    pub exact: PathBuf,
    /// One or more approximate explanation files (e.g. one per depth).
    #[arg(long, required = true, num_args = 1..)]
    pub approx: Vec<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct GlobalArgs {
    #[arg(long)]
    pub explanations: PathBuf,
    /// Motif file whose `rho` values are added to the CSV.
    #[arg(long)]
    pub motifs: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct PipelineArgs {
    /// JSON file of the form {"stages": [["synth", "--nodes", "100", ...], ...]}.
    #[arg(long)]
    pub config: PathBuf,
}

#[derive(Args, Debug, Serialize)]
pub struct ServeArgs {
    /// Motifs for the ground-truth scorer.
    #[arg(long)]
    pub motifs: Option<PathBuf>,
    /// Training data for the linear surrogate; also fixes the node count.
    #[arg(long)]
    pub dataset: Option<PathBuf>,
    #[command(flatten)]
    pub model: BlackBoxArgs,
}
