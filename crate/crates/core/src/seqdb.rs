//! Sequence databases in SPMF text form.
//!
//! An SPMF file is a stream of integers: `-1` closes an itemset and `-2`
//! closes a sequence. Lines starting with `#` or `@` carry metadata and are
//! skipped. Positions inside a sequence are 1-based everywhere in this crate.

use std::collections::BTreeSet;
use std::fmt;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An item symbol. Raw ids from the input are kept as-is.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Item(pub u32);

impl fmt::Display for Item {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<u32> for Item {
    fn from(id: u32) -> Self {
        Item(id)
    }
}

/// A non-empty set of items, stored sorted.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Itemset(Vec<Item>);

impl Itemset {
    /// Builds an itemset, sorting and removing duplicates. Returns `None`
    /// for an empty input.
    pub fn new(items: impl IntoIterator<Item = Item>) -> Option<Self> {
        let mut items: Vec<Item> = items.into_iter().collect();
        items.sort_unstable();
        items.dedup();
        (!items.is_empty()).then_some(Itemset(items))
    }

    pub fn single(item: Item) -> Self {
        Itemset(vec![item])
    }

    pub fn items(&self) -> &[Item] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, item: Item) -> bool {
        self.0.binary_search(&item).is_ok()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Sequence {
    sid: u32,
    steps: Vec<Itemset>,
}

impl Sequence {
    /// Returns `None` when `steps` is empty.
    pub fn new(sid: u32, steps: Vec<Itemset>) -> Option<Self> {
        (!steps.is_empty()).then_some(Sequence { sid, steps })
    }

    /// Convenience constructor for single-item-per-step sequences.
    pub fn from_items(sid: u32, items: impl IntoIterator<Item = Item>) -> Option<Self> {
        Self::new(sid, items.into_iter().map(Itemset::single).collect())
    }

    pub fn sid(&self) -> u32 {
        self.sid
    }

    pub fn steps(&self) -> &[Itemset] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Itemset at 1-based `position`.
    pub fn at(&self, position: usize) -> Option<&Itemset> {
        position.checked_sub(1).and_then(|i| self.steps.get(i))
    }

    pub fn item_count(&self) -> usize {
        self.steps.iter().map(Itemset::len).sum()
    }

    pub fn contains_item(&self, item: Item) -> bool {
        self.steps.iter().any(|s| s.contains(item))
    }

    /// The items of a single-item sequence, in order.
    pub fn single_items(&self) -> Result<Vec<Item>> {
        self.steps
            .iter()
            .enumerate()
            .map(|(i, step)| match step.items() {
                [item] => Ok(*item),
                _ => Err(Error::NotSingleItem {
                    sid: self.sid,
                    position: i + 1,
                }),
            })
            .collect()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SequenceDatabase {
    sequences: Vec<Sequence>,
    alphabet: BTreeSet<Item>,
}

/// First offending step of a database that is not single-item.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct MultiItemStep {
    pub sid: u32,
    pub position: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DbStats {
    pub sequence_count: usize,
    pub alphabet_size: usize,
    pub total_items: usize,
    /// `None` for an empty database.
    pub mean_length: Option<f64>,
}

impl fmt::Display for DbStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "sequences={} items={} total_items={} mean_length=",
            self.sequence_count, self.alphabet_size, self.total_items
        )?;
        match self.mean_length {
            Some(mean) => write!(f, "{mean:.3}"),
            None => write!(f, "undefined"),
        }
    }
}

impl SequenceDatabase {
    /// Builds a database; sids must be unique.
    pub fn new(sequences: Vec<Sequence>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for seq in &sequences {
            if !seen.insert(seq.sid) {
                return Err(Error::InvalidRule(format!("duplicate sid {}", seq.sid)));
            }
        }
        let alphabet = sequences
            .iter()
            .flat_map(|s| s.steps.iter().flat_map(|step| step.items().iter().copied()))
            .collect();
        Ok(SequenceDatabase {
            sequences,
            alphabet,
        })
    }

    /// Builds a single-item database with sids 1..=n.
    pub fn from_rows<R, I>(rows: R) -> Result<Self>
    where
        R: IntoIterator<Item = I>,
        I: IntoIterator<Item = u32>,
    {
        let sequences = rows
            .into_iter()
            .enumerate()
            .map(|(i, row)| {
                Sequence::from_items(i as u32 + 1, row.into_iter().map(Item))
                    .ok_or_else(|| Error::InvalidRule(format!("sequence {} is empty", i + 1)))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(sequences)
    }

    pub fn sequences(&self) -> &[Sequence] {
        &self.sequences
    }

    pub fn alphabet(&self) -> &BTreeSet<Item> {
        &self.alphabet
    }

    pub fn len(&self) -> usize {
        self.sequences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sequences.is_empty()
    }

    pub fn total_items(&self) -> usize {
        self.sequences.iter().map(Sequence::item_count).sum()
    }

    /// Keeps only the first `limit` sequences.
    pub fn truncate(&mut self, limit: usize) {
        if limit < self.sequences.len() {
            self.sequences.truncate(limit);
            self.alphabet = self
                .sequences
                .iter()
                .flat_map(|s| s.steps.iter().flat_map(|step| step.items().iter().copied()))
                .collect();
        }
    }

    pub fn validate_single_item(&self) -> std::result::Result<(), MultiItemStep> {
        for seq in &self.sequences {
            if let Some(i) = seq.steps.iter().position(|step| step.len() != 1) {
                return Err(MultiItemStep {
                    sid: seq.sid,
                    position: i + 1,
                });
            }
        }
        Ok(())
    }

    /// Item rows of a single-item database, one per sequence.
    pub fn single_item_rows(&self) -> Result<Vec<Vec<Item>>> {
        self.sequences.iter().map(Sequence::single_items).collect()
    }

    pub fn stats(&self) -> DbStats {
        let total_items = self.total_items();
        let sequence_count = self.sequences.len();
        DbStats {
            sequence_count,
            alphabet_size: self.alphabet.len(),
            total_items,
            mean_length: (sequence_count > 0).then(|| total_items as f64 / sequence_count as f64),
        }
    }

    /// Serializes back to normalized SPMF text: one sequence per line,
    /// single spaces, items ascending within an itemset.
    pub fn to_spmf(&self) -> String {
        let mut out = String::new();
        for seq in &self.sequences {
            for step in &seq.steps {
                for item in step.items() {
                    out.push_str(&item.0.to_string());
                    out.push(' ');
                }
                out.push_str("-1 ");
            }
            out.push_str("-2\n");
        }
        out
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        parse_spmf(&text)
    }
}

/// Parses SPMF text. The i-th sequence gets sid `i` (1-based).
pub fn parse_spmf(text: &str) -> Result<SequenceDatabase> {
    let mut sequences = Vec::new();
    let mut steps: Vec<Itemset> = Vec::new();
    let mut pending: Vec<Item> = Vec::new();
    let mut last_line = 0;

    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') || trimmed.starts_with('@') {
            continue;
        }
        last_line = line_no;
        for token in trimmed.split_whitespace() {
            let value: i64 = token.parse().map_err(|_| Error::Parse {
                line: line_no,
                message: format!("malformed token {token:?}"),
            })?;
            match value {
                -1 => {
                    let itemset = Itemset::new(pending.drain(..)).ok_or_else(|| Error::Parse {
                        line: line_no,
                        message: "itemset with no items before -1".into(),
                    })?;
                    steps.push(itemset);
                }
                -2 => {
                    if !pending.is_empty() {
                        return Err(Error::Parse {
                            line: line_no,
                            message: "itemset not closed by -1 before -2".into(),
                        });
                    }
                    let sid = sequences.len() as u32 + 1;
                    let seq = Sequence::new(sid, std::mem::take(&mut steps)).ok_or_else(|| {
                        Error::Parse {
                            line: line_no,
                            message: "sequence with no itemsets before -2".into(),
                        }
                    })?;
                    sequences.push(seq);
                }
                v if v >= 0 && v <= u32::MAX as i64 => pending.push(Item(v as u32)),
                _ => {
                    return Err(Error::Parse {
                        line: line_no,
                        message: format!("malformed token {token:?}"),
                    })
                }
            }
        }
    }

    if !pending.is_empty() || !steps.is_empty() {
        return Err(Error::Parse {
            line: last_line,
            message: "missing -2 at end of input".into(),
        });
    }
    SequenceDatabase::new(sequences)
}
