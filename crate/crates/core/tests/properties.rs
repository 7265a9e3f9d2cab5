mod common;

use comsr::codec::{canonical_sort, cover_database, decode, ArchiveFile, CodeSetFile, CoverPolicy};
use comsr::compress::{compare_runs, comsr_ful, comsr_non};
use comsr::oracle::brute_force_rules;
use comsr::rulemine::{canonical_cmp, mine_all_one_rules, mine_rules, SizeCaps};
use comsr::seqdb::{parse_spmf, Sequence, SequenceDatabase};
use common::*;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn spmf_text_round_trips(db in multi_item_db(6, 9, 6, 3)) {
        prop_assert_eq!(parse_spmf(&db.to_spmf()).unwrap(), db);
    }

    #[test]
    fn archive_files_round_trip(db in single_item_db(6, 6, 8), t in thresholds(), opts in cover_options()) {
        let run = comsr_non(&db, t, SizeCaps::new(3, 2).unwrap(), opts).unwrap();
        let enc = ArchiveFile::from_json(&ArchiveFile::to_json(&run.encoded).unwrap()).unwrap();
        let code = CodeSetFile::from_json(&CodeSetFile::to_json(&run.code_set).unwrap()).unwrap();
        prop_assert_eq!(decode(&enc, &code).unwrap(), db);
    }

    #[test]
    fn final_code_sets_are_canonical(db in single_item_db(6, 6, 8), t in thresholds(), ful in any::<bool>()) {
        let caps = SizeCaps::new(3, 1).unwrap();
        let opts = Default::default();
        let run = if ful { comsr_ful(&db, t, caps, opts) } else { comsr_non(&db, t, caps, opts) }.unwrap();
        prop_assert!(run.code_set.rules().windows(2).all(|w| canonical_cmp(&w[0], &w[1]).is_lt()));
        prop_assert_eq!(run.accepted.len() + run.rejected, run.candidate_count);
    }

    #[test]
    fn ful_extras_are_below_threshold_one_rules(db in single_item_db(6, 6, 8), t in thresholds()) {
        let caps = SizeCaps::new(2, 1).unwrap();
        let non = comsr_non(&db, t, caps, Default::default()).unwrap();
        let ful = comsr_ful(&db, t, caps, Default::default()).unwrap();
        let cmp = compare_runs(&non, &ful).unwrap();
        prop_assert!(cmp.below_threshold.iter().all(|m| m.rule.is_one_by_one()));
        prop_assert!(ful.initial_code_size >= non.initial_code_size);
    }

    #[test]
    fn single_policy_uses_each_rule_once_per_sequence(db in single_item_db(6, 4, 10), t in thresholds()) {
        let code = canonical_sort(mine_rules(&db, t, SizeCaps::new(2, 2).unwrap()).unwrap()).unwrap();
        let enc = cover_database(&code, &db, CoverPolicy::Single).unwrap();
        for s in &enc.sequences {
            let mut seen = std::collections::BTreeSet::new();
            for tok in s.tokens.iter().filter(|t| t.kind == comsr::codec::TokenKind::Full) {
                prop_assert!(seen.insert(tok.rule_index));
            }
        }
    }

    #[test]
    fn oracle_ignores_sequence_order(db in multi_item_db(5, 5, 5, 2), t in thresholds(), caps in caps()) {
        let reversed = SequenceDatabase::new(
            db.sequences().iter().rev().map(|s| Sequence::new(s.sid(), s.steps().to_vec()).unwrap()).collect(),
        ).unwrap();
        prop_assert_eq!(brute_force_rules(&db, t, caps).unwrap(), brute_force_rules(&reversed, t, caps).unwrap());
    }

    #[test]
    fn every_one_rule_is_mined_at_lowest_support(db in single_item_db(6, 6, 8)) {
        let minsup = 1.0 / db.len() as f64;
        let mined = mine_rules(&db, comsr::Thresholds::new(minsup, 0.0).unwrap(), SizeCaps::new(1, 1).unwrap()).unwrap();
        prop_assert_eq!(mined, mine_all_one_rules(&db));
    }

    #[test]
    fn round_trip_small(db in single_item_db(10, 8, 10), t in thresholds(), opts in cover_options()) {
        check_round_trip(&db, t, opts)?;
    }

    #[test]
    fn greedy_monotone_small(db in single_item_db(8, 6, 8), t in thresholds(), opts in cover_options(), ful in any::<bool>()) {
        check_greedy_monotone(&db, t, opts, ful)?;
    }
}
