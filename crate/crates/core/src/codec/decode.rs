use std::collections::BTreeMap;

use super::{CodeSet, EncodedDatabase, EncodedSequence, Side, TokenKind};
use crate::error::{Error, Result};
use crate::seqdb::{Item, Sequence, SequenceDatabase};

/// Rebuilds the original database from an encoding and its code set.
pub fn decode(enc: &EncodedDatabase, code: &CodeSet) -> Result<SequenceDatabase> {
    let sequences = enc
        .sequences
        .iter()
        .map(|s| decode_sequence(s, code))
        .collect::<Result<Vec<_>>>()?;
    SequenceDatabase::new(sequences).map_err(|e| Error::Decode(e.to_string()))
}

fn decode_sequence(enc: &EncodedSequence, code: &CodeSet) -> Result<Sequence> {
    let sid = enc.sid;
    let mut slots: BTreeMap<u32, Item> = BTreeMap::new();
    let mut place = |pos: u32, item: Item| -> Result<()> {
        if slots.insert(pos, item).is_some() {
            return Err(Error::Decode(format!("sequence {sid}: position {pos} is encoded twice")));
        }
        Ok(())
    };

    for token in &enc.tokens {
        let m = code.get(token.rule_index).ok_or_else(|| {
            Error::Decode(format!("sequence {sid}: unknown rule index {}", token.rule_index))
        })?;
        let rule = &m.rule;
        match token.kind {
            TokenKind::Full => {
                if token.positions.len() != rule.size() {
                    return Err(Error::Decode(format!(
                        "sequence {sid}: token {token} has {} positions for rule {rule}",
                        token.positions.len()
                    )));
                }
                let (ante, cons) = token.positions.split_at(rule.antecedent().len());
                let last_ante = ante.iter().max();
                let first_cons = cons.iter().min();
                if last_ante >= first_cons {
                    return Err(Error::Decode(format!(
                        "sequence {sid}: token {token} puts a consequent item before an antecedent item"
                    )));
                }
                let items = rule.antecedent().iter().chain(rule.consequent());
                for (&pos, &item) in token.positions.iter().zip(items) {
                    place(pos, item)?;
                }
            }
            TokenKind::Partial => {
                let (side, &[pos]) = (token.partial_side, &token.positions[..]) else {
                    return Err(Error::Decode(format!(
                        "sequence {sid}: partial token {token} must carry exactly one position"
                    )));
                };
                if !rule.is_one_by_one() {
                    return Err(Error::Decode(format!(
                        "sequence {sid}: partial token references non-1x1 rule {rule}"
                    )));
                }
                let item = match side {
                    Some(Side::Antecedent) => rule.antecedent()[0],
                    Some(Side::Consequent) => rule.consequent()[0],
                    None => {
                        return Err(Error::Decode(format!(
                            "sequence {sid}: partial token {token} lacks a side"
                        )))
                    }
                };
                place(pos, item)?;
            }
        }
    }
    for &(pos, item) in &enc.residual {
        place(pos, item)?;
    }

    // Positions must be exactly 1..=n.
    for (expected, &pos) in (1u32..).zip(slots.keys()) {
        if pos != expected {
            return Err(Error::Decode(format!(
                "sequence {sid}: position {expected} is missing (next is {pos})"
            )));
        }
    }
    Sequence::from_items(sid, slots.into_values())
        .ok_or_else(|| Error::Decode(format!("sequence {sid} decodes to nothing")))
}
