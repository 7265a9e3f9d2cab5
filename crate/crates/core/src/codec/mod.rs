//! Rule-based coding of single-item sequence databases.
//!
//! A code set is an ordered list of rules. Covering walks the rules in order
//! and replaces every embedding it finds with a token that names the rule and
//! the 1-based positions of the items it stands for. Lengths are counted in
//! abstract units: a rule costs one unit plus one per item in the model, a
//! full token costs one unit plus one per position, and every uncovered item
//! costs one unit.

mod archive;
mod cover;
mod decode;

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rulemine::MinedRule;
use crate::seqdb::{Item, SequenceDatabase};

pub use archive::{ArchiveFile, CodeSetFile};
pub use cover::{cover_database, cover_sequence, find_embedding};
pub use decode::decode;

/// The coding dictionary, kept in canonical order.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct CodeSet {
    rules: Vec<MinedRule>,
}

impl CodeSet {
    pub fn rules(&self) -> &[MinedRule] {
        &self.rules
    }

    pub fn get(&self, index: usize) -> Option<&MinedRule> {
        self.rules.get(index)
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    pub fn into_rules(self) -> Vec<MinedRule> {
        self.rules
    }

    /// `L(H)`: one unit per rule plus one per item in every rule.
    pub fn model_length(&self) -> u64 {
        self.rules.iter().map(|m| 1 + m.rule.size() as u64).sum()
    }

    fn from_canonical(rules: Vec<MinedRule>) -> Result<Self> {
        let mut seen = HashSet::with_capacity(rules.len());
        for m in &rules {
            if !seen.insert(&m.rule) {
                return Err(Error::DuplicateRule(m.rule.text()));
            }
        }
        Ok(CodeSet { rules })
    }
}

/// Sorts rules into code-set order: size descending, support descending,
/// canonical text ascending. Duplicate rules are rejected.
pub fn canonical_sort(mut rules: Vec<MinedRule>) -> Result<CodeSet> {
    rules.sort_by_cached_key(|m| {
        (
            std::cmp::Reverse(m.rule.size()),
            std::cmp::Reverse(m.stats.support_ratio()),
            m.rule.text(),
        )
    });
    CodeSet::from_canonical(rules)
}

pub fn model_length(code: &CodeSet) -> u64 {
    code.model_length()
}

/// How many embeddings of one rule a sequence may receive per pass.
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum CoverPolicy {
    /// Keep taking leftmost embeddings until none remain.
    #[default]
    Repeat,
    /// At most one embedding per (rule, sequence).
    Single,
}

/// Cost of a token that encodes a lone leftover item with one side of a
/// 1x1 rule.
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum PartialCost {
    /// Rule reference plus one position.
    #[default]
    Two,
    /// Same as a full use of the rule: `|R| + 1`.
    Uniform,
}

#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverOptions {
    pub policy: CoverPolicy,
    pub partial_cost: PartialCost,
}

impl CoverOptions {
    pub(crate) fn partial_units(&self) -> u64 {
        match self.partial_cost {
            PartialCost::Two => 2,
            PartialCost::Uniform => 3,
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TokenKind {
    Full,
    Partial,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Antecedent,
    Consequent,
}

/// One emitted code: a rule reference plus the positions it covers.
///
/// Full tokens list antecedent positions (in ascending item order) followed
/// by consequent positions (ascending item order). Partial tokens carry a
/// single position and name the side of a 1x1 rule that supplies the item.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverToken {
    pub rule_index: usize,
    pub kind: TokenKind,
    pub positions: Vec<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub partial_side: Option<Side>,
}

impl CoverToken {
    pub fn full(rule_index: usize, positions: Vec<u32>) -> Self {
        CoverToken {
            rule_index,
            kind: TokenKind::Full,
            positions,
            partial_side: None,
        }
    }

    pub fn partial(rule_index: usize, position: u32, side: Side) -> Self {
        CoverToken {
            rule_index,
            kind: TokenKind::Partial,
            positions: vec![position],
            partial_side: Some(side),
        }
    }
}

impl fmt::Display for CoverToken {
    /// Renders like `(rule1|1,2)`, with 1-based rule numbers.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(rule{}|", self.rule_index + 1)?;
        for (i, p) in self.positions.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{p}")?;
        }
        if let Some(side) = self.partial_side {
            let tag = match side {
                Side::Antecedent => "ante",
                Side::Consequent => "cons",
            };
            write!(f, ";{tag}")?;
        }
        f.write_str(")")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EncodedSequence {
    pub sid: u32,
    pub tokens: Vec<CoverToken>,
    /// Uncovered `(position, item)` pairs, positions ascending.
    pub residual: Vec<(u32, Item)>,
}

impl EncodedSequence {
    pub fn covered_items(&self) -> usize {
        self.tokens.iter().map(|t| t.positions.len()).sum()
    }
}

/// Per-rule use counts.
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RuleUsage {
    pub full: u64,
    pub partial: u64,
}

impl RuleUsage {
    pub fn total(&self) -> u64 {
        self.full + self.partial
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EncodedDatabase {
    pub sequences: Vec<EncodedSequence>,
    /// Indexed like the code set the encoding was produced against.
    pub usage: Vec<RuleUsage>,
}

impl EncodedDatabase {
    pub fn covered_items(&self) -> usize {
        self.sequences.iter().map(EncodedSequence::covered_items).sum()
    }

    pub fn residual_items(&self) -> usize {
        self.sequences.iter().map(|s| s.residual.len()).sum()
    }

    /// Recounts usage from the tokens.
    pub fn tally(sequences: &[EncodedSequence], rule_count: usize) -> Result<Vec<RuleUsage>> {
        let mut usage = vec![RuleUsage::default(); rule_count];
        for token in sequences.iter().flat_map(|s| &s.tokens) {
            let slot = usage.get_mut(token.rule_index).ok_or_else(|| {
                Error::UsageMismatch(format!("token references unknown rule {}", token.rule_index))
            })?;
            match token.kind {
                TokenKind::Full => slot.full += 1,
                TokenKind::Partial => slot.partial += 1,
            }
        }
        Ok(usage)
    }

    /// Number of distinct rules used at least once.
    pub fn rules_used(&self) -> usize {
        self.usage.iter().filter(|u| u.total() > 0).count()
    }
}

/// Description length broken into its parts.
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LengthReport {
    /// `L(H)`.
    pub model_length: u64,
    /// `L(D|H)` over emitted tokens.
    pub data_length: u64,
    /// One unit per uncovered item.
    pub residual_length: u64,
    pub total: u64,
}

impl LengthReport {
    pub fn new(model_length: u64, data_length: u64, residual_length: u64) -> Self {
        LengthReport {
            model_length,
            data_length,
            residual_length,
            total: model_length + data_length + residual_length,
        }
    }

    pub fn of(enc: &EncodedDatabase, code: &CodeSet, partial_cost: PartialCost) -> Result<Self> {
        Ok(LengthReport::new(
            code.model_length(),
            data_length(enc, code, partial_cost)?,
            enc.residual_items() as u64,
        ))
    }
}

impl fmt::Display for LengthReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} = L(H) {} + L(D|H) {} + residual {}",
            self.total, self.model_length, self.data_length, self.residual_length
        )
    }
}

/// `L(D|H)`: full uses cost `|R| + 1` each, partial uses cost per
/// `partial_cost`. Fails if the stored usage disagrees with the tokens.
pub fn data_length(enc: &EncodedDatabase, code: &CodeSet, partial_cost: PartialCost) -> Result<u64> {
    if enc.usage.len() != code.len() {
        return Err(Error::UsageMismatch(format!(
            "{} usage entries for {} rules",
            enc.usage.len(),
            code.len()
        )));
    }
    let recount = EncodedDatabase::tally(&enc.sequences, code.len())?;
    if let Some(i) = (0..code.len()).find(|&i| recount[i] != enc.usage[i]) {
        return Err(Error::UsageMismatch(format!(
            "rule {i}: stored {:?}, tokens give {:?}",
            enc.usage[i], recount[i]
        )));
    }
    let opts = CoverOptions {
        partial_cost,
        ..Default::default()
    };
    Ok(code
        .rules()
        .iter()
        .zip(&enc.usage)
        .map(|(m, u)| u.full * (m.rule.size() as u64 + 1) + u.partial * opts.partial_units())
        .sum())
}

/// Covers `db` with `code` and returns the full description length.
pub fn compress_length(code: &CodeSet, db: &SequenceDatabase, opts: CoverOptions) -> Result<LengthReport> {
    let enc = cover_database(code, db, opts.policy)?;
    LengthReport::of(&enc, code, opts.partial_cost)
}

/// Fraction of items covered by some token.
pub fn compression_ratio(enc: &EncodedDatabase, db: &SequenceDatabase) -> Result<f64> {
    let total = db.total_items();
    if total == 0 {
        return Err(Error::EmptyDatabase);
    }
    Ok(enc.covered_items() as f64 / total as f64)
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::rulemine::SequentialRule;

    pub(crate) fn two_sequences() -> SequenceDatabase {
        SequenceDatabase::from_rows([vec![1, 2, 3, 4, 5, 6], vec![1, 2, 4, 5, 7, 6]]).unwrap()
    }

    pub(crate) fn code(db: &SequenceDatabase, rules: &[(&[u32], &[u32])]) -> CodeSet {
        let rules = rules
            .iter()
            .map(|(a, c)| MinedRule::measure(SequentialRule::from_ids(a, c).unwrap(), db).unwrap())
            .collect();
        canonical_sort(rules).unwrap()
    }

    // a=1 b=2 c=3 d=4 e=5 f=6 g=7
    pub(crate) fn pair_code(db: &SequenceDatabase) -> CodeSet {
        code(db, &[(&[1], &[2]), (&[4], &[5]), (&[3], &[6]), (&[7], &[6])])
    }

    pub(crate) fn merged_code(db: &SequenceDatabase) -> CodeSet {
        code(db, &[(&[1, 2], &[4, 5]), (&[3], &[6]), (&[7], &[6])])
    }

    fn texts(code: &CodeSet) -> Vec<String> {
        code.rules().iter().map(|m| m.rule.text()).collect()
    }

    #[test]
    fn canonical_order_examples() {
        let db = SequenceDatabase::from_rows([vec![1, 2, 3, 4], vec![1, 2, 5, 6]]).unwrap();
        let c = code(&db, &[(&[1], &[2]), (&[1, 2], &[3, 4]), (&[1], &[2, 3, 4])]);
        assert_eq!(texts(&c), ["1 -> 2,3,4", "1,2 -> 3,4", "1 -> 2"]);

        let db = two_sequences();
        assert_eq!(texts(&pair_code(&db)), ["1 -> 2", "4 -> 5", "3 -> 6", "7 -> 6"]);
        assert_eq!(texts(&merged_code(&db)), ["1,2 -> 4,5", "3 -> 6", "7 -> 6"]);
    }

    #[test]
    fn one_by_one_sorted_by_support() {
        let db = SequenceDatabase::from_rows([vec![1, 2, 3], vec![1, 2], vec![1, 3], vec![1, 2]]).unwrap();
        let c = code(&db, &[(&[2], &[3]), (&[1], &[3]), (&[1], &[2])]);
        let sups: Vec<_> = c.rules().iter().map(|m| m.stats.support_ratio()).collect();
        assert!(sups.windows(2).all(|w| w[0] > w[1]));
    }

    #[test]
    fn duplicates_rejected() {
        let db = two_sequences();
        let m = MinedRule::measure(SequentialRule::from_ids(&[1], &[2]).unwrap(), &db).unwrap();
        assert!(matches!(canonical_sort(vec![m.clone(), m]), Err(Error::DuplicateRule(_))));
    }

    #[test]
    fn model_lengths() {
        let db = two_sequences();
        assert_eq!(model_length(&pair_code(&db)), 12);
        assert_eq!(model_length(&merged_code(&db)), 11);
        assert_eq!(model_length(&CodeSet::default()), 0);
    }

    #[test]
    fn worked_example_lengths() {
        let db = two_sequences();
        let opts = CoverOptions::default();
        let r1 = compress_length(&pair_code(&db), &db, opts).unwrap();
        assert_eq!((r1.model_length, r1.data_length, r1.residual_length, r1.total), (12, 18, 0, 30));
        let r2 = compress_length(&merged_code(&db), &db, opts).unwrap();
        assert_eq!((r2.model_length, r2.data_length, r2.residual_length, r2.total), (11, 16, 0, 27));
        let r0 = compress_length(&CodeSet::default(), &db, opts).unwrap();
        assert_eq!((r0.model_length, r0.data_length, r0.residual_length, r0.total), (0, 0, 12, 12));
    }

    #[test]
    fn data_length_checks_usage() {
        let db = two_sequences();
        let c = pair_code(&db);
        let mut enc = cover_database(&c, &db, CoverPolicy::Repeat).unwrap();
        assert_eq!(data_length(&enc, &c, PartialCost::Two).unwrap(), 18);
        enc.usage[0].full += 1;
        assert!(matches!(
            data_length(&enc, &c, PartialCost::Two),
            Err(Error::UsageMismatch(_))
        ));
        let empty = EncodedDatabase {
            sequences: vec![],
            usage: vec![],
        };
        assert_eq!(data_length(&empty, &CodeSet::default(), PartialCost::Two).unwrap(), 0);
    }

    #[test]
    fn ratios() {
        let db = two_sequences();
        let enc = cover_database(&pair_code(&db), &db, CoverPolicy::Repeat).unwrap();
        assert_eq!(compression_ratio(&enc, &db).unwrap(), 1.0);

        let none = cover_database(&CodeSet::default(), &db, CoverPolicy::Repeat).unwrap();
        assert_eq!(compression_ratio(&none, &db).unwrap(), 0.0);

        let abc = SequenceDatabase::from_rows([vec![1, 2, 3]]).unwrap();
        let enc = cover_database(&code(&abc, &[(&[1], &[2])]), &abc, CoverPolicy::Repeat).unwrap();
        assert!((compression_ratio(&enc, &abc).unwrap() - 2.0 / 3.0).abs() < 1e-12);

        assert!(compression_ratio(&none, &SequenceDatabase::default()).is_err());
    }

    #[test]
    fn partial_cost_variants() {
        // <1,2,3>: rule 1->2 covers (1,2); item 3 is picked up by 1->3 as a partial use.
        let db = SequenceDatabase::from_rows([vec![1, 2, 3]]).unwrap();
        let c = code(&db, &[(&[1], &[2]), (&[1], &[3])]);
        let two = compress_length(&c, &db, CoverOptions::default()).unwrap();
        assert_eq!(two, LengthReport::new(6, 3 + 2, 0));
        let uniform = compress_length(
            &c,
            &db,
            CoverOptions {
                partial_cost: PartialCost::Uniform,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(uniform, LengthReport::new(6, 3 + 3, 0));
    }

    #[test]
    fn token_display() {
        assert_eq!(CoverToken::full(0, vec![1, 2, 4, 5]).to_string(), "(rule1|1,2,4,5)");
        assert_eq!(CoverToken::partial(2, 6, Side::Consequent).to_string(), "(rule3|6;cons)");
    }
}
