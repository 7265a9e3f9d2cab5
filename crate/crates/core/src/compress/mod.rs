//! Greedy MDL selection of a rule code set.
//!
//! Both variants mine rules at the given thresholds, start from a base of
//! 1x1 rules, and then try the larger mined rules one by one in support
//! order. A candidate is kept only if adding it strictly lowers the total
//! description length; rejected candidates are never revisited.
//!
//! * [`Mode::Non`] starts from the 1x1 rules that meet the thresholds.
//! * [`Mode::Ful`] starts from every 1x1 rule with non-zero support, which
//!   covers every sequence with at least two distinct items.

mod engine;

use std::collections::hash_map::DefaultHasher;
use std::collections::HashMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::codec::{self, canonical_sort, CodeSet, CoverOptions, EncodedDatabase, LengthReport, RuleUsage};
use crate::error::{Error, Result};
use crate::rulemine::{
    candidate_cmp, initial_code, mine_all_one_rules, mine_rules, MinedRule, RuleRecord, SizeCaps, Thresholds,
};
use crate::seqdb::SequenceDatabase;

use engine::Engine;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Base code set: thresholded 1x1 rules.
    Non,
    /// Base code set: all 1x1 rules with support > 0.
    Ful,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Non => "non",
            Mode::Ful => "ful",
        })
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompressConfig {
    pub mode: Mode,
    pub thresholds: Thresholds,
    pub caps: SizeCaps,
    pub cover: CoverOptions,
}

/// Outcome of one greedy run.
#[derive(Clone, Debug)]
pub struct CompressionRun {
    pub config: CompressConfig,
    /// Final code set, canonical order.
    pub code_set: CodeSet,
    /// The database covered by the final code set.
    pub encoded: EncodedDatabase,
    pub initial: LengthReport,
    pub initial_code_size: usize,
    /// Distinct base rules used when covering with the starting code set.
    pub initial_rules_used: usize,
    pub final_length: LengthReport,
    pub compression_ratio: f64,
    pub mined_rule_count: usize,
    pub candidate_count: usize,
    /// Accepted candidates, in acceptance order.
    pub accepted: Vec<MinedRule>,
    pub rejected: usize,
    /// Total description length after each acceptance.
    pub accepted_totals: Vec<u64>,
    pub mining_seconds: f64,
    /// Wall clock of the candidate loop only.
    pub loop_seconds: f64,
    pub db_fingerprint: u64,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct RuleReport {
    pub index: usize,
    #[serde(flatten)]
    pub rule: RuleRecord,
    pub usage: RuleUsage,
}

/// JSON shape of a run.
#[derive(Debug, Serialize, Deserialize)]
pub struct RunReport {
    pub mode: Mode,
    pub minsup: f64,
    pub minconf: f64,
    pub caps: SizeCaps,
    pub cover: CoverOptions,
    pub initial: LengthReport,
    pub initial_code_size: usize,
    pub initial_rules_used: usize,
    #[serde(rename = "final")]
    pub final_length: LengthReport,
    pub compression_ratio: f64,
    pub mined_rule_count: usize,
    pub candidate_count: usize,
    pub accepted_count: usize,
    pub rejected_count: usize,
    pub final_rule_count: usize,
    pub accepted_totals: Vec<u64>,
    pub mining_seconds: f64,
    pub loop_seconds: f64,
    pub rules: Vec<RuleReport>,
}

impl CompressionRun {
    pub fn report(&self) -> RunReport {
        RunReport {
            mode: self.config.mode,
            minsup: self.config.thresholds.minsup,
            minconf: self.config.thresholds.minconf,
            caps: self.config.caps,
            cover: self.config.cover,
            initial: self.initial,
            initial_code_size: self.initial_code_size,
            initial_rules_used: self.initial_rules_used,
            final_length: self.final_length,
            compression_ratio: self.compression_ratio,
            mined_rule_count: self.mined_rule_count,
            candidate_count: self.candidate_count,
            accepted_count: self.accepted.len(),
            rejected_count: self.rejected,
            final_rule_count: self.code_set.len(),
            accepted_totals: self.accepted_totals.clone(),
            mining_seconds: self.mining_seconds,
            loop_seconds: self.loop_seconds,
            rules: self
                .code_set
                .rules()
                .iter()
                .zip(&self.encoded.usage)
                .enumerate()
                .map(|(index, (m, &usage))| RuleReport {
                    index,
                    rule: m.clone().into(),
                    usage,
                })
                .collect(),
        }
    }

    /// Usage of the final rule equal to `rule`, if present.
    pub fn usage_of(&self, rule: &crate::rulemine::SequentialRule) -> Option<RuleUsage> {
        self.code_set
            .rules()
            .iter()
            .position(|m| &m.rule == rule)
            .map(|i| self.encoded.usage[i])
    }
}

pub fn comsr_non(
    db: &SequenceDatabase,
    thresholds: Thresholds,
    caps: SizeCaps,
    cover: CoverOptions,
) -> Result<CompressionRun> {
    run(
        db,
        &CompressConfig {
            mode: Mode::Non,
            thresholds,
            caps,
            cover,
        },
    )
}

pub fn comsr_ful(
    db: &SequenceDatabase,
    thresholds: Thresholds,
    caps: SizeCaps,
    cover: CoverOptions,
) -> Result<CompressionRun> {
    run(
        db,
        &CompressConfig {
            mode: Mode::Ful,
            thresholds,
            caps,
            cover,
        },
    )
}

pub(crate) fn fingerprint(db: &SequenceDatabase) -> u64 {
    let mut hasher = DefaultHasher::new();
    db.sequences().hash(&mut hasher);
    hasher.finish()
}

/// Runs the greedy selection described by `config`.
pub fn run(db: &SequenceDatabase, config: &CompressConfig) -> Result<CompressionRun> {
    config.thresholds.validate()?;
    config.caps.validate()?;
    if db.is_empty() {
        return Err(Error::EmptyDatabase);
    }
    let rows = db.single_item_rows()?;

    let mining_start = Instant::now();
    let mined = mine_rules(db, config.thresholds, config.caps)?;
    let base_rules = match config.mode {
        Mode::Non => initial_code(&mined),
        Mode::Ful => mine_all_one_rules(db),
    };
    let mut candidates: Vec<MinedRule> = mined.iter().filter(|m| !m.rule.is_one_by_one()).cloned().collect();
    candidates.sort_by(candidate_cmp);
    let mining_seconds = mining_start.elapsed().as_secs_f64();

    let base_code = canonical_sort(base_rules.clone())?;
    let initial_enc = codec::cover_database(&base_code, db, config.cover.policy)?;
    let initial = LengthReport::of(&initial_enc, &base_code, config.cover.partial_cost)?;

    // Rank every rule that could enter the code set.
    let pool = canonical_sort(base_rules.iter().chain(&candidates).cloned().collect())?.into_rules();
    let rank: HashMap<_, u32> = pool.iter().enumerate().map(|(i, m)| (m.rule.clone(), i as u32)).collect();
    let base_ranks: Vec<u32> = base_rules.iter().map(|m| rank[&m.rule]).collect();
    let candidate_ranks: Vec<u32> = candidates.iter().map(|m| rank[&m.rule]).collect();

    let mut engine = Engine::new(pool, &base_ranks, rows, config.cover);
    if engine.total() != initial.total {
        return Err(Error::Internal(format!(
            "incremental initial length {} differs from direct cover {}",
            engine.total(),
            initial.total
        )));
    }

    let loop_start = Instant::now();
    let mut accepted = Vec::new();
    let mut accepted_totals = Vec::new();
    let mut rejected = 0;
    for &r in &candidate_ranks {
        let eval = engine.evaluate(r);
        if eval.delta < 0 {
            engine.accept(r, eval);
            accepted.push(engine.rule(r).clone());
            accepted_totals.push(engine.total());
        } else {
            rejected += 1;
        }
    }
    let loop_seconds = loop_start.elapsed().as_secs_f64();

    let code_set = canonical_sort(engine.code_rules())?;
    let encoded = codec::cover_database(&code_set, db, config.cover.policy)?;
    let final_length = LengthReport::of(&encoded, &code_set, config.cover.partial_cost)?;
    if final_length.total != engine.total() {
        return Err(Error::Internal(format!(
            "incremental final length {} differs from direct cover {}",
            engine.total(),
            final_length.total
        )));
    }
    let compression_ratio = codec::compression_ratio(&encoded, db)?;

    Ok(CompressionRun {
        config: *config,
        code_set,
        encoded,
        initial,
        initial_code_size: base_code.len(),
        initial_rules_used: initial_enc.rules_used(),
        final_length,
        compression_ratio,
        mined_rule_count: mined.len(),
        candidate_count: candidates.len(),
        accepted,
        rejected,
        accepted_totals,
        mining_seconds,
        loop_seconds,
        db_fingerprint: fingerprint(db),
    })
}

/// Differences between two runs on the same database and thresholds
/// (second minus first).
#[derive(Debug, Serialize)]
pub struct RunComparison {
    pub ratio_delta: f64,
    pub rule_count_delta: i64,
    pub total_length_delta: i64,
    pub loop_seconds_delta: f64,
    /// Final rules of the second run that miss either threshold.
    pub below_threshold: Vec<MinedRule>,
}

pub fn compare_runs(first: &CompressionRun, second: &CompressionRun) -> Result<RunComparison> {
    if first.db_fingerprint != second.db_fingerprint {
        return Err(Error::Incomparable("runs used different databases".into()));
    }
    if first.config.thresholds != second.config.thresholds {
        return Err(Error::Incomparable("runs used different thresholds".into()));
    }
    if first.config.caps != second.config.caps {
        return Err(Error::Incomparable("runs used different size caps".into()));
    }
    let t = second.config.thresholds;
    Ok(RunComparison {
        ratio_delta: second.compression_ratio - first.compression_ratio,
        rule_count_delta: second.code_set.len() as i64 - first.code_set.len() as i64,
        total_length_delta: second.final_length.total as i64 - first.final_length.total as i64,
        loop_seconds_delta: second.loop_seconds - first.loop_seconds,
        below_threshold: second
            .code_set
            .rules()
            .iter()
            .filter(|m| !m.stats.meets(t.minsup, t.minconf))
            .cloned()
            .collect(),
    })
}
