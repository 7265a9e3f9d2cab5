use std::io;

use thiserror::Error;

use crate::seqdb::Item;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("sequence {sid} has a multi-item itemset at position {position}")]
    NotSingleItem { sid: u32, position: usize },

    #[error("the database is empty")]
    EmptyDatabase,

    #[error("invalid threshold {name}={value}: {reason}")]
    InvalidThreshold {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("invalid range: {0}")]
    InvalidRange(String),

    #[error("invalid size cap: {0}")]
    InvalidCap(String),

    #[error("invalid rule: {0}")]
    InvalidRule(String),

    #[error("duplicate rule in code set: {0}")]
    DuplicateRule(String),

    #[error("item {0} appears on both sides of a rule")]
    OverlappingRule(Item),

    #[error("usage counts disagree with the emitted tokens: {0}")]
    UsageMismatch(String),

    #[error("decode error: {0}")]
    Decode(String),

    #[error("runs are not comparable: {0}")]
    Incomparable(String),

    #[error("oracle bound exceeded: {0}")]
    OracleBounds(String),

    #[error("internal consistency check failed: {0}")]
    Internal(String),

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
