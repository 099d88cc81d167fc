//! Shapley-based motif explanations for black-box classifiers of graphs with
//! node identity.
//!
//! All graphs share one fixed node universe, so a motif (a connected edge
//! set) can be located in any graph by node ids alone. The crate provides:
//!
//! - [`graph`]: graphs, motifs, datasets and set-level primitives;
//! - [`masking`]: remove / average / toggle motif masking;
//! - [`blackbox`]: the black-box contract, built-in surrogates and an
//!   external-process client;
//! - [`shapley`]: exact lattice explanations and depth-limited
//!   approximations;
//! - [`synth`]: synthetic datasets with controlled motif injection;
//! - [`mining`]: frequent connected motif mining and cross-support ranking;
//! - [`stats`]: separability, correlation and ranking statistics.

pub mod bitset;
pub mod blackbox;
pub mod error;
pub mod graph;
pub mod io;
pub mod masking;
pub mod mining;
pub mod rng;
pub mod shapley;
pub mod stats;
pub mod synth;

pub use blackbox::{BlackBox, ExternalBlackBox, GroundTruthScorer, LinearSurrogate, TrainConfig};
pub use error::{Error, Result};
pub use graph::{ClassSign, Edge, Graph, InjectionRecord, LabeledDataset, Motif};
pub use masking::{mask, MaskKind, MaskingStrategy};
pub use mining::{cross_support, mine, rank_and_select, MinerConfig, RankedMotif, RankerConfig};
pub use shapley::{
    approx_explain, exact_explain, explain, query_budget, Depth, ExplainConfig, Explanation,
    Weighting,
};
pub use stats::{
    expected_scores, global_ranking, pearson, separability, spearman, ExpectedScoreTable,
    SeparabilityReport,
};
pub use synth::{generate, MotifSpec, SynthConfig, SynthOutput};

/// Version of the on-disk and wire formats.
pub const FORMAT_VERSION: &str = "1";
