//! Sequential rules `X -> Y`, their occurrence semantics and interestingness
//! measures, plus the miners that produce candidate rule sets.
//!
//! A rule occurs in a sequence when some split point puts every antecedent
//! item at or before it and every consequent item strictly after it. Both
//! sides are unordered sets.

mod miner;

use std::cmp::Ordering;
use std::fmt;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seqdb::{Item, Sequence, SequenceDatabase};

pub use miner::{initial_code, mine_all_one_rules, mine_rules};

/// Exact fraction used for support and confidence.
pub type Fraction = Ratio<u64>;

/// Slack for comparing a count ratio against a user-supplied decimal
/// threshold (so that 3/10 meets `0.3`).
const THRESHOLD_EPSILON: f64 = 1e-9;

/// `count / total >= threshold`, tolerant of decimal rounding in `threshold`.
pub(crate) fn meets(count: usize, total: usize, threshold: f64) -> bool {
    count as f64 >= threshold * total as f64 - THRESHOLD_EPSILON
}

/// A rule with canonical (sorted, disjoint, non-empty) sides.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SequentialRule {
    antecedent: Vec<Item>,
    consequent: Vec<Item>,
}

impl SequentialRule {
    pub fn new(
        antecedent: impl IntoIterator<Item = Item>,
        consequent: impl IntoIterator<Item = Item>,
    ) -> Result<Self> {
        let mut antecedent: Vec<Item> = antecedent.into_iter().collect();
        let mut consequent: Vec<Item> = consequent.into_iter().collect();
        antecedent.sort_unstable();
        antecedent.dedup();
        consequent.sort_unstable();
        consequent.dedup();
        if antecedent.is_empty() || consequent.is_empty() {
            return Err(Error::InvalidRule("both sides must be non-empty".into()));
        }
        if let Some(item) = antecedent
            .iter()
            .find(|item| consequent.binary_search(item).is_ok())
        {
            return Err(Error::OverlappingRule(*item));
        }
        Ok(SequentialRule {
            antecedent,
            consequent,
        })
    }

    /// Shorthand for tests and examples: `SequentialRule::from_ids(&[1, 2], &[3])`.
    pub fn from_ids(antecedent: &[u32], consequent: &[u32]) -> Result<Self> {
        Self::new(
            antecedent.iter().copied().map(Item),
            consequent.iter().copied().map(Item),
        )
    }

    pub fn antecedent(&self) -> &[Item] {
        &self.antecedent
    }

    pub fn consequent(&self) -> &[Item] {
        &self.consequent
    }

    /// `|X| + |Y|`.
    pub fn size(&self) -> usize {
        self.antecedent.len() + self.consequent.len()
    }

    pub fn is_one_by_one(&self) -> bool {
        self.antecedent.len() == 1 && self.consequent.len() == 1
    }

    pub fn contains(&self, item: Item) -> bool {
        self.antecedent.binary_search(&item).is_ok() || self.consequent.binary_search(&item).is_ok()
    }

    /// Canonical text, e.g. `1,18 -> 253`. Used as the final tie-break key.
    pub fn text(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for SequentialRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn side(f: &mut fmt::Formatter<'_>, items: &[Item]) -> fmt::Result {
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{item}")?;
            }
            Ok(())
        }
        side(f, &self.antecedent)?;
        f.write_str(" -> ")?;
        side(f, &self.consequent)
    }
}

/// Raw counts behind support and confidence.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub struct RuleStats {
    /// Sequences in which the rule occurs.
    pub support_count: usize,
    /// Sequences containing every antecedent item, in any order.
    pub antecedent_count: usize,
    /// `|D|` of the database the counts were taken from.
    pub db_size: usize,
}

impl RuleStats {
    pub fn support_ratio(&self) -> Fraction {
        Ratio::new(self.support_count as u64, self.db_size.max(1) as u64)
    }

    /// Zero when no sequence contains the antecedent.
    pub fn confidence_ratio(&self) -> Fraction {
        if self.antecedent_count == 0 {
            Ratio::from_integer(0)
        } else {
            Ratio::new(self.support_count as u64, self.antecedent_count as u64)
        }
    }

    pub fn support(&self) -> f64 {
        to_f64(self.support_ratio())
    }

    pub fn confidence(&self) -> f64 {
        to_f64(self.confidence_ratio())
    }

    pub fn meets(&self, minsup: f64, minconf: f64) -> bool {
        meets(self.support_count, self.db_size, minsup)
            && meets(self.support_count, self.antecedent_count, minconf)
    }
}

pub fn to_f64(f: Fraction) -> f64 {
    *f.numer() as f64 / *f.denom() as f64
}

/// A rule together with its statistics on the database it was mined from.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "RuleRecord", try_from = "RuleRecord")]
pub struct MinedRule {
    pub rule: SequentialRule,
    pub stats: RuleStats,
}

impl MinedRule {
    pub fn new(rule: SequentialRule, stats: RuleStats) -> Self {
        MinedRule { rule, stats }
    }

    /// Computes exact stats of `rule` against `db`.
    pub fn measure(rule: SequentialRule, db: &SequenceDatabase) -> Result<Self> {
        let stats = rule_stats(&rule, db)?;
        Ok(MinedRule { rule, stats })
    }

    /// One-line form: `1,2 -> 3 sup=0.5000 conf=1.0000`.
    pub fn to_line(&self) -> String {
        format!(
            "{} sup={:.4} conf={:.4}",
            self.rule,
            self.stats.support(),
            self.stats.confidence()
        )
    }
}

impl fmt::Display for MinedRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_line())
    }
}

/// JSON shape of a rule.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RuleRecord {
    pub antecedent: Vec<u32>,
    pub consequent: Vec<u32>,
    pub support: f64,
    pub confidence: f64,
    pub support_count: usize,
    pub antecedent_count: usize,
    pub db_size: usize,
}

impl From<MinedRule> for RuleRecord {
    fn from(m: MinedRule) -> Self {
        RuleRecord {
            antecedent: m.rule.antecedent.iter().map(|i| i.0).collect(),
            consequent: m.rule.consequent.iter().map(|i| i.0).collect(),
            support: m.stats.support(),
            confidence: m.stats.confidence(),
            support_count: m.stats.support_count,
            antecedent_count: m.stats.antecedent_count,
            db_size: m.stats.db_size,
        }
    }
}

impl TryFrom<RuleRecord> for MinedRule {
    type Error = Error;

    fn try_from(r: RuleRecord) -> Result<Self> {
        Ok(MinedRule {
            rule: SequentialRule::from_ids(&r.antecedent, &r.consequent)?,
            stats: RuleStats {
                support_count: r.support_count,
                antecedent_count: r.antecedent_count,
                db_size: r.db_size,
            },
        })
    }
}

/// Minimum support / confidence pair.
#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    pub minsup: f64,
    pub minconf: f64,
}

impl Thresholds {
    pub fn new(minsup: f64, minconf: f64) -> Result<Self> {
        let t = Thresholds { minsup, minconf };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.minsup > 0.0 && self.minsup <= 1.0) {
            return Err(Error::InvalidThreshold {
                name: "minsup",
                value: self.minsup,
                reason: "must lie in (0, 1]",
            });
        }
        if !(0.0..=1.0).contains(&self.minconf) {
            return Err(Error::InvalidThreshold {
                name: "minconf",
                value: self.minconf,
                reason: "must lie in [0, 1]",
            });
        }
        Ok(())
    }
}

/// Upper bounds on `|X|` and `|Y|`.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SizeCaps {
    pub max_antecedent: usize,
    pub max_consequent: usize,
}

impl SizeCaps {
    pub const UNBOUNDED: SizeCaps = SizeCaps {
        max_antecedent: usize::MAX,
        max_consequent: usize::MAX,
    };

    pub fn new(max_antecedent: usize, max_consequent: usize) -> Result<Self> {
        let caps = SizeCaps {
            max_antecedent,
            max_consequent,
        };
        caps.validate()?;
        Ok(caps)
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_antecedent == 0 || self.max_consequent == 0 {
            return Err(Error::InvalidCap(format!(
                "caps must be at least 1 (got {}x{})",
                self.max_antecedent, self.max_consequent
            )));
        }
        Ok(())
    }

    pub fn admits(&self, rule: &SequentialRule) -> bool {
        rule.antecedent.len() <= self.max_antecedent && rule.consequent.len() <= self.max_consequent
    }
}

impl Default for SizeCaps {
    fn default() -> Self {
        SizeCaps {
            max_antecedent: 4,
            max_consequent: 1,
        }
    }
}

/// Whether `rule` occurs in `seq` under the split-point semantics.
pub fn occurs(rule: &SequentialRule, seq: &Sequence) -> bool {
    // Earliest step by which all of X has appeared.
    let mut ready = 0;
    for &x in &rule.antecedent {
        match seq.steps().iter().position(|s| s.contains(x)) {
            Some(p) => ready = ready.max(p),
            None => return false,
        }
    }
    // Latest step after which some Y item can no longer appear.
    rule.consequent.iter().all(|&y| {
        seq.steps()
            .iter()
            .rposition(|s| s.contains(y))
            .is_some_and(|p| p > ready)
    })
}

fn contains_antecedent(rule: &SequentialRule, seq: &Sequence) -> bool {
    rule.antecedent.iter().all(|&x| seq.contains_item(x))
}

pub fn rule_stats(rule: &SequentialRule, db: &SequenceDatabase) -> Result<RuleStats> {
    if db.is_empty() {
        return Err(Error::EmptyDatabase);
    }
    let mut support_count = 0;
    let mut antecedent_count = 0;
    for seq in db.sequences() {
        if contains_antecedent(rule, seq) {
            antecedent_count += 1;
            if occurs(rule, seq) {
                support_count += 1;
            }
        }
    }
    Ok(RuleStats {
        support_count,
        antecedent_count,
        db_size: db.len(),
    })
}

pub fn support(rule: &SequentialRule, db: &SequenceDatabase) -> Result<Fraction> {
    rule_stats(rule, db).map(|s| s.support_ratio())
}

pub fn confidence(rule: &SequentialRule, db: &SequenceDatabase) -> Result<Fraction> {
    rule_stats(rule, db).map(|s| s.confidence_ratio())
}

/// Code-set order: larger rules first, then higher support, then canonical
/// text ascending.
pub fn canonical_cmp(a: &MinedRule, b: &MinedRule) -> Ordering {
    b.rule
        .size()
        .cmp(&a.rule.size())
        .then_with(|| b.stats.support_ratio().cmp(&a.stats.support_ratio()))
        .then_with(|| a.rule.text().cmp(&b.rule.text()))
}

/// Candidate order: higher support first, then canonical text ascending.
pub fn candidate_cmp(a: &MinedRule, b: &MinedRule) -> Ordering {
    b.stats
        .support_ratio()
        .cmp(&a.stats.support_ratio())
        .then_with(|| a.rule.text().cmp(&b.rule.text()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seqdb::parse_spmf;

    // a=1 b=2 c=3 d=4 e=5 f=6 g=7 h=8
    pub(crate) const ITEMSET_DB: &str = "1 7 -1 3 -1 7 -1 5 2 -1 -2\n\
                                      1 4 -1 3 -1 2 -1 7 2 5 6 -1 -2\n\
                                      6 -1 1 -1 7 -1 2 -1 -2\n\
                                      1 7 -1 6 7 8 -1 -2\n";

    fn rule(a: &[u32], c: &[u32]) -> SequentialRule {
        SequentialRule::from_ids(a, c).unwrap()
    }

    #[test]
    fn rule_construction_invariants() {
        assert!(SequentialRule::from_ids(&[], &[1]).is_err());
        assert!(SequentialRule::from_ids(&[1], &[]).is_err());
        assert!(matches!(
            SequentialRule::from_ids(&[1, 2], &[2]),
            Err(Error::OverlappingRule(Item(2)))
        ));
        let r = rule(&[3, 1, 3], &[7, 2]);
        assert_eq!(r.text(), "1,3 -> 2,7");
        assert_eq!(r.size(), 4);
        assert!(!r.is_one_by_one());
    }

    #[test]
    fn occurrence_on_itemset_db() {
        let db = parse_spmf(ITEMSET_DB).unwrap();
        let seqs = db.sequences();
        assert!(!occurs(&rule(&[1, 6], &[7]), &seqs[3]));
        assert!(occurs(&rule(&[1, 3], &[7, 2]), &seqs[0]));
        assert!(!occurs(&rule(&[26], &[1]), &seqs[0]));
    }

    #[test]
    fn hand_computed_measures() {
        let db = parse_spmf(ITEMSET_DB).unwrap();
        let half = Ratio::new(1, 2);
        let cases = [
            (rule(&[1], &[3]), half, half),
            (rule(&[1, 3], &[7, 2]), half, Ratio::from_integer(1)),
            (rule(&[1], &[2]), Ratio::new(3, 4), Ratio::new(3, 4)),
            (rule(&[1, 7], &[2]), half, half),
            (rule(&[1, 6], &[7]), Ratio::new(1, 4), Ratio::new(1, 3)),
        ];
        for (r, sup, conf) in cases {
            assert_eq!(support(&r, &db).unwrap(), sup, "{r}");
            assert_eq!(confidence(&r, &db).unwrap(), conf, "{r}");
        }
    }

    #[test]
    fn absent_items_give_zero() {
        let db = parse_spmf(ITEMSET_DB).unwrap();
        let r = rule(&[99], &[1]);
        assert_eq!(support(&r, &db).unwrap(), Ratio::from_integer(0));
        assert_eq!(confidence(&r, &db).unwrap(), Ratio::from_integer(0));
    }

    #[test]
    fn empty_database_is_an_error() {
        let db = SequenceDatabase::default();
        assert!(matches!(support(&rule(&[1], &[2]), &db), Err(Error::EmptyDatabase)));
        assert!(matches!(confidence(&rule(&[1], &[2]), &db), Err(Error::EmptyDatabase)));
    }

    #[test]
    fn threshold_validation() {
        assert!(Thresholds::new(0.0, 0.5).is_err());
        assert!(Thresholds::new(1.01, 0.5).is_err());
        assert!(Thresholds::new(0.5, -0.1).is_err());
        assert!(Thresholds::new(0.5, f64::NAN).is_err());
        assert!(Thresholds::new(1.0, 0.0).is_ok());
        assert!(SizeCaps::new(0, 1).is_err());
    }

    #[test]
    fn decimal_thresholds_meet_exact_ratios() {
        assert!(meets(3, 10, 0.3));
        assert!(meets(7, 10, 0.7));
        assert!(!meets(2, 10, 0.3));
        assert!(meets(0, 0, 0.0));
    }

    #[test]
    fn json_record_round_trip() {
        let db = parse_spmf(ITEMSET_DB).unwrap();
        let m = MinedRule::measure(rule(&[1, 6], &[7]), &db).unwrap();
        let json = serde_json::to_string(&m).unwrap();
        assert!(json.contains("\"support_count\":1"));
        let back: MinedRule = serde_json::from_str(&json).unwrap();
        assert_eq!(back, m);
        assert_eq!(m.to_line(), "1,6 -> 7 sup=0.2500 conf=0.3333");
    }
}
