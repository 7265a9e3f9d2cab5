//! Compression of single-item sequence databases with sequential rules.
//!
//! Rules mined at given support and confidence thresholds are selected
//! greedily into a code set under the minimum description length principle.
//! The resulting encoding decodes back to the input exactly.

pub mod cli;
pub mod codec;
pub mod compress;
pub mod error;
pub mod oracle;
pub mod rulemine;
pub mod seqdb;

pub use codec::{compress_length, decode, CodeSet, CoverOptions, CoverPolicy, EncodedDatabase, LengthReport, PartialCost};
pub use compress::{comsr_ful, comsr_non, compare_runs, CompressConfig, CompressionRun, Mode};
pub use error::{Error, Result};
pub use rulemine::{mine_rules, MinedRule, SequentialRule, SizeCaps, Thresholds};
pub use seqdb::{parse_spmf, Item, Sequence, SequenceDatabase};
