#![allow(dead_code)]

use comsr::codec::{compress_length, cover_database, decode, CoverOptions, CoverPolicy, PartialCost};
use comsr::compress::{comsr_ful, comsr_non};
use comsr::oracle::brute_force_rules;
use comsr::rulemine::{mine_rules, rule_stats, SequentialRule, SizeCaps, Thresholds};
use comsr::seqdb::{Item, Itemset, Sequence, SequenceDatabase};
use proptest::prelude::*;
use proptest::test_runner::TestCaseError;

pub fn single_item_db(max_seqs: usize, alphabet: u32, max_len: usize) -> impl Strategy<Value = SequenceDatabase> {
    prop::collection::vec(prop::collection::vec(1..=alphabet, 1..=max_len), 1..=max_seqs)
        .prop_map(|rows| SequenceDatabase::from_rows(rows).unwrap())
}

pub fn multi_item_db(max_seqs: usize, alphabet: u32, max_len: usize, width: usize) -> impl Strategy<Value = SequenceDatabase> {
    let step = prop::collection::btree_set(1..=alphabet, 1..=width);
    prop::collection::vec(prop::collection::vec(step, 1..=max_len), 1..=max_seqs).prop_map(|rows| {
        let sequences = rows
            .into_iter()
            .enumerate()
            .map(|(i, steps)| {
                let steps = steps.into_iter().map(|s| Itemset::new(s.into_iter().map(Item)).unwrap()).collect();
                Sequence::new(i as u32 + 1, steps).unwrap()
            })
            .collect();
        SequenceDatabase::new(sequences).unwrap()
    })
}

/// Sequences of at least two pairwise distinct items.
pub fn distinct_item_db(max_seqs: usize, alphabet: u32) -> impl Strategy<Value = SequenceDatabase> {
    let row = Just((1..=alphabet).collect::<Vec<u32>>())
        .prop_shuffle()
        .prop_flat_map(move |items| (2..=items.len()).prop_map(move |n| items[..n].to_vec()));
    prop::collection::vec(row, 1..=max_seqs).prop_map(|rows| SequenceDatabase::from_rows(rows).unwrap())
}

pub fn thresholds() -> impl Strategy<Value = Thresholds> {
    (1u32..=10, 0u32..=10).prop_map(|(s, c)| Thresholds::new(s as f64 / 10.0, c as f64 / 10.0).unwrap())
}

pub fn caps() -> impl Strategy<Value = SizeCaps> {
    (1usize..=3, 1usize..=3).prop_map(|(a, c)| SizeCaps::new(a, c).unwrap())
}

pub fn cover_options() -> impl Strategy<Value = CoverOptions> {
    (any::<bool>(), any::<bool>()).prop_map(|(repeat, two)| CoverOptions {
        policy: if repeat { CoverPolicy::Repeat } else { CoverPolicy::Single },
        partial_cost: if two { PartialCost::Two } else { PartialCost::Uniform },
    })
}

pub fn rule_and_extra(alphabet: u32) -> impl Strategy<Value = (SequentialRule, Item, bool)> {
    (
        prop::collection::btree_set(1..=alphabet, 1..=2),
        prop::collection::btree_set(1..=alphabet, 1..=2),
        1..=alphabet,
        any::<bool>(),
    )
        .prop_filter_map("sides must be disjoint with room for one more item", |(x, y, extra, left)| {
            if !x.is_disjoint(&y) || x.contains(&extra) || y.contains(&extra) {
                return None;
            }
            let rule = SequentialRule::new(x.into_iter().map(Item), y.into_iter().map(Item)).ok()?;
            Some((rule, Item(extra), left))
        })
}

/// Cover, encode and decode give back the input, for any code set mined from
/// the database.
pub fn check_round_trip(db: &SequenceDatabase, t: Thresholds, opts: CoverOptions) -> Result<(), TestCaseError> {
    let mined = mine_rules(db, t, SizeCaps::new(3, 2).unwrap()).unwrap();
    let code = comsr::codec::canonical_sort(mined).unwrap();
    let enc = cover_database(&code, db, opts.policy).unwrap();
    let back = decode(&enc, &code).unwrap();
    prop_assert_eq!(&back, db);
    prop_assert_eq!(enc.covered_items() + enc.residual_items(), db.total_items());
    Ok(())
}

pub fn check_miner_matches_oracle(db: &SequenceDatabase, t: Thresholds, caps: SizeCaps) -> Result<(), TestCaseError> {
    let mut mined = mine_rules(db, t, caps).unwrap();
    mined.sort_by(|a, b| a.rule.cmp(&b.rule));
    let expected = brute_force_rules(db, t, caps).unwrap();
    prop_assert_eq!(mined, expected);
    Ok(())
}

pub fn check_greedy_monotone(db: &SequenceDatabase, t: Thresholds, opts: CoverOptions, ful: bool) -> Result<(), TestCaseError> {
    let caps = SizeCaps::new(3, 2).unwrap();
    let run = if ful { comsr_ful(db, t, caps, opts) } else { comsr_non(db, t, caps, opts) }.unwrap();
    let mut previous = run.initial.total;
    for &total in &run.accepted_totals {
        prop_assert!(total < previous, "{} is not below {}", total, previous);
        previous = total;
    }
    prop_assert!(run.final_length.total <= run.initial.total);
    prop_assert_eq!(run.final_length.total, previous);
    prop_assert_eq!(compress_length(&run.code_set, db, opts).unwrap(), run.final_length);
    Ok(())
}

pub fn check_anti_monotone(db: &SequenceDatabase, rule: &SequentialRule, extra: Item, left: bool) -> Result<(), TestCaseError> {
    let (mut x, mut y) = (rule.antecedent().to_vec(), rule.consequent().to_vec());
    if left {
        x.push(extra);
    } else {
        y.push(extra);
    }
    let grown = SequentialRule::new(x, y).unwrap();
    let before = rule_stats(rule, db).unwrap();
    let after = rule_stats(&grown, db).unwrap();
    prop_assert!(after.support_count <= before.support_count, "{} grew support over {}", grown, rule);
    Ok(())
}

pub fn check_ful_ratio(db: &SequenceDatabase, t: Thresholds, opts: CoverOptions) -> Result<(), TestCaseError> {
    let run = comsr_ful(db, t, SizeCaps::new(3, 1).unwrap(), opts).unwrap();
    prop_assert_eq!(run.compression_ratio, 1.0);
    prop_assert_eq!(run.encoded.residual_items(), 0);
    Ok(())
}
