use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("node universe mismatch: expected {expected} nodes, found {found}")]
    UniverseMismatch { expected: usize, found: usize },

    #[error("dataset is empty")]
    EmptyDataset,

    #[error("invalid edge ({u}, {v}) for a universe of {n} nodes")]
    InvalidEdge { u: usize, v: usize, n: usize },

    #[error("self-loop on node {0}")]
    SelfLoop(usize),

    #[error("invalid motif {id}: {reason}")]
    InvalidMotif { id: usize, reason: String },

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error(
        "lattice too large: {queries} coalition evaluations for {motifs} motifs exceed the limit \
         of 2^{limit}; use a depth-limited approximation"
    )]
    LatticeTooLarge { motifs: usize, limit: usize, queries: u128 },

    #[error("black-box transport error: {0}")]
    Transport(String),

    #[error("degenerate training data: {0}")]
    DegenerateTraining(String),

    #[error("undefined correlation: {0}")]
    UndefinedCorrelation(String),

    #[error("input format error: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl From<serde_json::Error> for Error {
    fn from(err: serde_json::Error) -> Self {
        Error::Format(err.to_string())
    }
}
