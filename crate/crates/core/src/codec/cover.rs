use rayon::prelude::*;

use super::{CodeSet, CoverPolicy, CoverToken, EncodedDatabase, EncodedSequence, Side};
use crate::error::Result;
use crate::rulemine::{occurs, SequentialRule};
use crate::seqdb::{Item, Sequence, SequenceDatabase};

/// Leftmost embedding of `rule` in the residual of one sequence.
///
/// The split is the earliest point by which every antecedent item has
/// appeared; each antecedent item binds to its first residual occurrence and
/// each consequent item to its first residual occurrence after the split.
/// Returned positions follow the rule's item order (antecedent, then
/// consequent).
pub fn find_embedding(rule: &SequentialRule, residual: &[(u32, Item)]) -> Option<Vec<u32>> {
    let mut positions = Vec::with_capacity(rule.size());
    let mut split = 0;
    for &x in rule.antecedent() {
        let &(pos, _) = residual.iter().find(|&&(_, item)| item == x)?;
        split = split.max(pos);
        positions.push(pos);
    }
    for &y in rule.consequent() {
        let &(pos, _) = residual.iter().find(|&&(p, item)| item == y && p > split)?;
        positions.push(pos);
    }
    Some(positions)
}

/// Covers one single-item sequence with the code set.
///
/// Phase 1 applies each rule in code-set order (repeatedly under
/// [`CoverPolicy::Repeat`]). Phase 2 handles a lone leftover item: the first
/// 1x1 rule that has the item on one side and occurs in the original
/// sequence encodes it as a partial use.
pub fn cover_sequence(code: &CodeSet, seq: &Sequence, items: &[Item], policy: CoverPolicy) -> EncodedSequence {
    let mut residual: Vec<(u32, Item)> = items
        .iter()
        .enumerate()
        .map(|(i, &item)| (i as u32 + 1, item))
        .collect();
    let mut tokens = Vec::new();

    for (index, m) in code.rules().iter().enumerate() {
        while residual.len() >= m.rule.size() {
            let Some(positions) = find_embedding(&m.rule, &residual) else {
                break;
            };
            residual.retain(|(p, _)| !positions.contains(p));
            tokens.push(CoverToken::full(index, positions));
            if policy == CoverPolicy::Single {
                break;
            }
        }
    }

    if let [(pos, item)] = residual[..] {
        let hit = code.rules().iter().enumerate().find_map(|(index, m)| {
            if !m.rule.is_one_by_one() {
                return None;
            }
            let side = if m.rule.antecedent()[0] == item {
                Side::Antecedent
            } else if m.rule.consequent()[0] == item {
                Side::Consequent
            } else {
                return None;
            };
            occurs(&m.rule, seq).then_some((index, side))
        });
        if let Some((index, side)) = hit {
            tokens.push(CoverToken::partial(index, pos, side));
            residual.clear();
        }
    }

    EncodedSequence {
        sid: seq.sid(),
        tokens,
        residual,
    }
}

/// Covers every sequence of a single-item database.
pub fn cover_database(code: &CodeSet, db: &SequenceDatabase, policy: CoverPolicy) -> Result<EncodedDatabase> {
    let rows = db.single_item_rows()?;
    let sequences: Vec<EncodedSequence> = db
        .sequences()
        .par_iter()
        .zip(rows.par_iter())
        .map(|(seq, items)| cover_sequence(code, seq, items, policy))
        .collect();
    let usage = EncodedDatabase::tally(&sequences, code.len())?;
    Ok(EncodedDatabase { sequences, usage })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codec::tests::{code, pair_code, merged_code, two_sequences};
    use crate::codec::TokenKind;
    use crate::error::Error;

    fn residual(items: &[(u32, u32)]) -> Vec<(u32, Item)> {
        items.iter().map(|&(p, i)| (p, Item(i))).collect()
    }

    fn rendered(enc: &EncodedDatabase) -> Vec<String> {
        enc.sequences
            .iter()
            .map(|s| s.tokens.iter().map(|t| t.to_string()).collect::<Vec<_>>().join(","))
            .collect()
    }

    #[test]
    fn embedding_skips_unrelated_items() {
        let seq1 = residual(&[(1, 1), (2, 2), (3, 3), (4, 4), (5, 5), (6, 6)]);
        let r = SequentialRule::from_ids(&[1, 2], &[4, 5]).unwrap();
        assert_eq!(find_embedding(&r, &seq1), Some(vec![1, 2, 4, 5]));

        let after = residual(&[(3, 3), (4, 4), (5, 5), (6, 6)]);
        let de = SequentialRule::from_ids(&[4], &[5]).unwrap();
        assert_eq!(find_embedding(&de, &after), Some(vec![4, 5]));

        let backwards = SequentialRule::from_ids(&[6], &[1]).unwrap();
        assert_eq!(find_embedding(&backwards, &seq1), None);
    }

    #[test]
    fn embedding_binds_consequent_after_split() {
        // <2,1,2>: 1 -> 2 must use the second 2.
        let r = SequentialRule::from_ids(&[1], &[2]).unwrap();
        assert_eq!(find_embedding(&r, &residual(&[(1, 2), (2, 1), (3, 2)])), Some(vec![2, 3]));
    }

    #[test]
    fn pair_code_tokens() {
        let db = two_sequences();
        let enc = cover_database(&pair_code(&db), &db, CoverPolicy::Repeat).unwrap();
        assert_eq!(
            rendered(&enc),
            [
                "(rule1|1,2),(rule2|4,5),(rule3|3,6)",
                "(rule1|1,2),(rule2|3,4),(rule4|5,6)"
            ]
        );
        assert!(enc.sequences.iter().all(|s| s.residual.is_empty()));
        assert_eq!(enc.usage.iter().map(|u| u.full).collect::<Vec<_>>(), [2, 2, 1, 1]);
    }

    #[test]
    fn merged_code_tokens() {
        let db = two_sequences();
        let enc = cover_database(&merged_code(&db), &db, CoverPolicy::Repeat).unwrap();
        assert_eq!(
            rendered(&enc),
            ["(rule1|1,2,4,5),(rule2|3,6)", "(rule1|1,2,3,4),(rule3|5,6)"]
        );
    }

    #[test]
    fn leftover_without_eligible_rule_stays_residual() {
        let db = SequenceDatabase::from_rows([vec![1, 2, 3]]).unwrap();
        let enc = cover_database(&code(&db, &[(&[1], &[2])]), &db, CoverPolicy::Repeat).unwrap();
        assert_eq!(enc.sequences[0].tokens, vec![CoverToken::full(0, vec![1, 2])]);
        assert_eq!(enc.sequences[0].residual, vec![(3, Item(3))]);
    }

    #[test]
    fn leftover_requires_occurrence_in_original() {
        // <1,2,3>: after 1->2 the residual is {3}. Rule 3->1 sorts first and
        // names 3 but does not occur in the sequence, so 1->3 is used.
        let db = SequenceDatabase::from_rows([vec![1, 2, 3], vec![3, 1], vec![3, 1]]).unwrap();
        let c = code(&db, &[(&[1], &[2]), (&[3], &[1]), (&[1], &[3])]);
        let enc = cover_database(&c, &db, CoverPolicy::Repeat).unwrap();
        assert_eq!(c.rules()[0].rule.text(), "3 -> 1");
        let last = enc.sequences[0].tokens.last().unwrap();
        assert_eq!(last.kind, TokenKind::Partial);
        assert_eq!(c.rules()[last.rule_index].rule.text(), "1 -> 3");
        assert_eq!(last.partial_side, Some(Side::Consequent));
    }

    #[test]
    fn repeat_and_single_policies() {
        let db = SequenceDatabase::from_rows([vec![1, 2, 1, 2, 1, 2]]).unwrap();
        let c = code(&db, &[(&[1], &[2])]);
        let repeat = cover_database(&c, &db, CoverPolicy::Repeat).unwrap();
        assert_eq!(repeat.usage[0].full, 3);
        assert!(repeat.sequences[0].residual.is_empty());
        let single = cover_database(&c, &db, CoverPolicy::Single).unwrap();
        assert_eq!(single.usage[0].full, 1);
        assert_eq!(single.sequences[0].residual.len(), 4);
    }

    #[test]
    fn multi_item_databases_are_rejected() {
        let db = crate::seqdb::parse_spmf("1 2 -1 3 -1 -2").unwrap();
        assert!(matches!(
            cover_database(&CodeSet::default(), &db, CoverPolicy::Repeat),
            Err(Error::NotSingleItem { sid: 1, position: 1 })
        ));
    }
}
