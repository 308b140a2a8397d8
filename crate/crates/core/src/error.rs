use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("empty test: pattern counts sum to zero")]
    EmptyTest,

    #[error("record {item_id}: missing decision for classifier {classifier:?}")]
    MissingDecision { item_id: String, classifier: String },

    #[error("evaluation point outside the unit cube: {0}")]
    Domain(String),

    #[error("not integer ground truth: {0}")]
    NotGroundTruth(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("schema error: {0}")]
    Schema(String),

    #[error("{context}: {message}")]
    Parse { context: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
