use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("invalid dataset {path}: {reason}")]
    Dataset { path: PathBuf, reason: String },

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("node id {node} out of range for graph with {num_nodes} nodes")]
    NodeOutOfRange { node: u64, num_nodes: usize },

    #[error("dimension mismatch: {0}")]
    Shape(String),

    #[error("sampler error: {0}")]
    Sampler(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("destination {0} already exists (pass force to overwrite)")]
    AlreadyExists(PathBuf),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn shape(msg: impl Into<String>) -> Self {
        Error::Shape(msg.into())
    }
}
