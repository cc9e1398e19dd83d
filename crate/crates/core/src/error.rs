use std::io;

use thiserror::Error;

/// Errors raised anywhere in the explanation pipeline.
#[derive(Debug, Error)]
pub enum Error {
    /// Invalid configuration or unusable input data.
    #[error("configuration error: {0}")]
    Config(String),

    /// A caller broke an operation's precondition (bad indices, mismatched dimensions).
    #[error("contract violation: {0}")]
    Contract(String),

    /// The landmark/prototype corpus holds no text with the opposite label.
    #[error("no counterfactual found in the corpus for query {query:?}")]
    NoCounterfactuals { query: String },

    /// The generator could not reproduce the query from its own encoding.
    #[error("generator failed to reconstruct the query: {query:?} decoded as {reconstructed:?}")]
    ReconstructionFailure { query: String, reconstructed: String },

    #[error("degenerate neighborhood: {0}")]
    DegenerateNeighborhood(String),

    /// Transport failure while talking to an external process. Retriable; carries the failed batch.
    #[error("transport failure on a batch of {} texts: {source}", batch.len())]
    Transport {
        batch: Vec<String>,
        #[source]
        source: io::Error,
    },

    /// The peer answered with a malformed or inconsistent message.
    #[error("protocol error: {0}")]
    Protocol(String),

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn is_retriable(&self) -> bool {
        matches!(self, Error::Transport { .. })
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
