//! Exhaustive reference implementations for small inputs.
//!
//! Nothing here shares search code with the miner or the greedy loop; only
//! the domain types and the codec's length function are reused.

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::codec::{canonical_sort, compress_length, CodeSet, CoverOptions, LengthReport};
use crate::error::{Error, Result};
use crate::rulemine::{MinedRule, RuleStats, SequentialRule, SizeCaps, Thresholds};
use crate::seqdb::{Item, Itemset, Sequence, SequenceDatabase};

/// Bounds of the databases the oracle accepts, and of the random databases
/// it generates.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct OracleConfig {
    pub max_sequences: usize,
    pub max_alphabet: usize,
    pub max_length: usize,
    /// Largest itemset per step; 1 gives single-item databases.
    pub max_itemset: usize,
    pub seed: u64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            max_sequences: 6,
            max_alphabet: 5,
            max_length: 5,
            max_itemset: 1,
            seed: 0,
        }
    }
}

impl OracleConfig {
    /// Hard limits for [`brute_force_rules`].
    pub const LIMITS: OracleConfig = OracleConfig {
        max_sequences: 12,
        max_alphabet: 10,
        max_length: 12,
        max_itemset: 10,
        seed: 0,
    };

    pub fn with_seed(self, seed: u64) -> Self {
        OracleConfig { seed, ..self }
    }

    /// Whether `db` fits within these bounds.
    pub fn admits(&self, db: &SequenceDatabase) -> bool {
        db.len() <= self.max_sequences
            && db.alphabet().len() <= self.max_alphabet
            && db.sequences().iter().all(|s| {
                s.len() <= self.max_length && s.steps().iter().all(|step| step.len() <= self.max_itemset)
            })
    }

    /// A random non-empty database within these bounds, items drawn from
    /// `1..=max_alphabet`.
    pub fn random_database(&self) -> SequenceDatabase {
        let mut rng = StdRng::seed_from_u64(self.seed);
        let n = rng.gen_range(1..=self.max_sequences.max(1));
        let alphabet = self.max_alphabet.max(1) as u32;
        let sequences = (1..=n as u32)
            .map(|sid| {
                let len = rng.gen_range(1..=self.max_length.max(1));
                let steps = (0..len)
                    .map(|_| {
                        let width = rng.gen_range(1..=self.max_itemset.max(1));
                        Itemset::new((0..width).map(|_| Item(rng.gen_range(1..=alphabet)))).expect("width >= 1")
                    })
                    .collect();
                Sequence::new(sid, steps).expect("len >= 1")
            })
            .collect();
        SequenceDatabase::new(sequences).expect("sids are distinct")
    }
}

/// Whether some split point puts all of `x` in a prefix and all of `y` in the
/// following suffix.
fn split_occurs(x: &[Item], y: &[Item], seq: &Sequence) -> bool {
    let steps = seq.steps();
    (1..steps.len()).any(|k| {
        let (head, tail) = steps.split_at(k);
        x.iter().all(|&i| head.iter().any(|s| s.contains(i))) && y.iter().all(|&i| tail.iter().any(|s| s.contains(i)))
    })
}

fn at_least(count: usize, total: usize, threshold: f64) -> bool {
    // Same decimal tolerance as the miner's threshold test.
    count as f64 >= threshold * total as f64 - 1e-9
}

/// Non-empty subsets of `items` with at most `cap` elements, as bitmasks.
fn subsets(n: usize, cap: usize) -> impl Iterator<Item = u32> {
    (1u32..(1 << n)).filter(move |m| m.count_ones() as usize <= cap)
}

fn pick(items: &[Item], mask: u32) -> Vec<Item> {
    items
        .iter()
        .enumerate()
        .filter(|(i, _)| mask & (1 << i) != 0)
        .map(|(_, &it)| it)
        .collect()
}

/// Every rule within `caps` that meets `thresholds`, by exhaustive
/// enumeration of disjoint item-subset pairs. Sorted by rule.
pub fn brute_force_rules(db: &SequenceDatabase, thresholds: Thresholds, caps: SizeCaps) -> Result<Vec<MinedRule>> {
    thresholds.validate()?;
    caps.validate()?;
    if db.is_empty() {
        return Err(Error::EmptyDatabase);
    }
    if !OracleConfig::LIMITS.admits(db) {
        return Err(Error::OracleBounds(format!(
            "database with {} sequences over {} items exceeds the oracle limits",
            db.len(),
            db.alphabet().len()
        )));
    }
    let items: Vec<Item> = db.alphabet().iter().copied().collect();
    let n = items.len();
    let mut out = Vec::new();
    for xm in subsets(n, caps.max_antecedent) {
        let x = pick(&items, xm);
        let holders: Vec<&Sequence> = db
            .sequences()
            .iter()
            .filter(|s| x.iter().all(|&i| s.contains_item(i)))
            .collect();
        for ym in subsets(n, caps.max_consequent).filter(|ym| ym & xm == 0) {
            let y = pick(&items, ym);
            let support_count = holders.iter().filter(|s| split_occurs(&x, &y, s)).count();
            if support_count == 0 {
                continue;
            }
            if at_least(support_count, db.len(), thresholds.minsup)
                && at_least(support_count, holders.len(), thresholds.minconf)
            {
                let rule = SequentialRule::new(x.clone(), y)?;
                let stats = RuleStats {
                    support_count,
                    antecedent_count: holders.len(),
                    db_size: db.len(),
                };
                out.push(MinedRule::new(rule, stats));
            }
        }
    }
    out.sort_by(|a, b| a.rule.cmp(&b.rule));
    Ok(out)
}

pub const MAX_SUBSET_POOL: usize = 12;

/// Best code set made of the 1x1 rules in `pool` plus at most `k` of its
/// larger rules, by trying every such subset. Ties keep the subset found
/// first (smallest bitmask).
pub fn best_code_subset(
    db: &SequenceDatabase,
    pool: &[MinedRule],
    k: usize,
    opts: CoverOptions,
) -> Result<(CodeSet, LengthReport)> {
    let (base, extra): (Vec<&MinedRule>, Vec<&MinedRule>) = pool.iter().partition(|m| m.rule.is_one_by_one());
    if extra.len() > MAX_SUBSET_POOL {
        return Err(Error::OracleBounds(format!(
            "{} candidate rules exceed the subset limit of {MAX_SUBSET_POOL}",
            extra.len()
        )));
    }
    let mut best: Option<(CodeSet, LengthReport)> = None;
    for mask in 0u32..(1 << extra.len()) {
        if mask.count_ones() as usize > k {
            continue;
        }
        let rules = base
            .iter()
            .copied()
            .chain(pick_rules(&extra, mask))
            .cloned()
            .collect();
        let code = canonical_sort(rules)?;
        let length = compress_length(&code, db, opts)?;
        if best.as_ref().is_none_or(|(_, b)| length.total < b.total) {
            best = Some((code, length));
        }
    }
    Ok(best.expect("the empty subset is always tried"))
}

fn pick_rules<'a>(rules: &[&'a MinedRule], mask: u32) -> Vec<&'a MinedRule> {
    rules
        .iter()
        .enumerate()
        .filter(|(i, _)| mask & (1 << i) != 0)
        .map(|(_, &m)| m)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compress::comsr_non;
    use crate::rulemine::mine_rules;
    use crate::seqdb::parse_spmf;

    const ITEMSET_DB: &str = "1 7 -1 3 -1 7 -1 5 2 -1 -2\n\
                           1 4 -1 3 -1 2 -1 7 2 5 6 -1 -2\n\
                           6 -1 1 -1 7 -1 2 -1 -2\n\
                           1 7 -1 6 7 8 -1 -2\n";

    #[test]
    fn itemset_db_rules_present() {
        let db = parse_spmf(ITEMSET_DB).unwrap();
        let rules = brute_force_rules(&db, Thresholds::new(0.5, 0.5).unwrap(), SizeCaps::new(2, 2).unwrap()).unwrap();
        let has = |a: &[u32], c: &[u32]| {
            let r = SequentialRule::from_ids(a, c).unwrap();
            rules.iter().any(|m| m.rule == r)
        };
        assert!(has(&[1], &[3]));
        assert!(has(&[1, 3], &[2, 7]));
        assert!(has(&[1], &[2]));
        assert!(has(&[1, 7], &[2]));
        assert!(!has(&[1, 6], &[7]));
    }

    #[test]
    fn single_item_alphabet_yields_nothing() {
        let db = SequenceDatabase::from_rows([vec![4, 4, 4], vec![4]]).unwrap();
        let rules = brute_force_rules(&db, Thresholds::new(0.5, 0.0).unwrap(), SizeCaps::UNBOUNDED).unwrap();
        assert!(rules.is_empty());
    }

    #[test]
    fn bounds_are_enforced() {
        let db = SequenceDatabase::from_rows([(1..=11).collect::<Vec<u32>>()]).unwrap();
        assert!(matches!(
            brute_force_rules(&db, Thresholds::new(1.0, 1.0).unwrap(), SizeCaps::default()),
            Err(Error::OracleBounds(_))
        ));
    }

    #[test]
    fn random_databases_respect_config() {
        let cfg = OracleConfig {
            max_itemset: 3,
            ..OracleConfig::default()
        };
        for seed in 0..50 {
            let c = cfg.with_seed(seed);
            let db = c.random_database();
            assert!(c.admits(&db));
            assert_eq!(db, c.random_database());
        }
    }

    #[test]
    fn agrees_with_miner_on_seeds() {
        let cfg = OracleConfig {
            max_itemset: 2,
            ..OracleConfig::default()
        };
        for seed in 0..200 {
            let db = cfg.with_seed(seed).random_database();
            let t = Thresholds::new(0.3, 0.4).unwrap();
            let caps = SizeCaps::new(2, 2).unwrap();
            let mut mined = mine_rules(&db, t, caps).unwrap();
            mined.sort_by(|a, b| a.rule.cmp(&b.rule));
            assert_eq!(mined, brute_force_rules(&db, t, caps).unwrap(), "seed {seed}");
        }
    }

    #[test]
    fn empty_pool_gives_base() {
        let db = SequenceDatabase::from_rows(vec![vec![1, 2, 3, 4]; 6]).unwrap();
        let (code, len) = best_code_subset(&db, &[], 3, CoverOptions::default()).unwrap();
        assert!(code.is_empty());
        assert_eq!(len.total, 24);
    }

    #[test]
    fn six_identical_sequences_optimum() {
        let db = SequenceDatabase::from_rows(vec![vec![1, 2, 3, 4]; 6]).unwrap();
        let t = Thresholds::new(1.0, 1.0).unwrap();
        let caps = SizeCaps::new(2, 2).unwrap();
        let pool = mine_rules(&db, t, caps).unwrap();
        let (_, best) = best_code_subset(&db, &pool, pool.len(), CoverOptions::default()).unwrap();
        assert_eq!(best.total, 53);
        let greedy = comsr_non(&db, t, caps, CoverOptions::default()).unwrap();
        assert_eq!(greedy.final_length.total, best.total);
    }

    #[test]
    fn pool_limit() {
        let db = SequenceDatabase::from_rows(vec![vec![1, 2, 3, 4, 5]; 2]).unwrap();
        let pool = mine_rules(&db, Thresholds::new(1.0, 1.0).unwrap(), SizeCaps::new(3, 2).unwrap()).unwrap();
        assert!(pool.iter().filter(|m| !m.rule.is_one_by_one()).count() > MAX_SUBSET_POOL);
        assert!(matches!(
            best_code_subset(&db, &pool, 2, CoverOptions::default()),
            Err(Error::OracleBounds(_))
        ));
    }
}
