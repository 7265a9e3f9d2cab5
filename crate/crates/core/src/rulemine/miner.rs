use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;

use super::{meets, MinedRule, RuleStats, SequentialRule, SizeCaps, Thresholds};
use crate::error::{Error, Result};
use crate::seqdb::{Item, SequenceDatabase};

/// Per-sequence first and last step of every item, keyed by dense item index.
struct SeqIndex {
    // (dense item, first step, last step), sorted by item
    spans: Vec<(u32, u32, u32)>,
}

impl SeqIndex {
    fn span(&self, item: u32) -> Option<(u32, u32)> {
        self.spans
            .binary_search_by_key(&item, |s| s.0)
            .ok()
            .map(|i| (self.spans[i].1, self.spans[i].2))
    }
}

/// A sequence where the rule under expansion occurs. Occurrence holds iff
/// `ready < deadline`.
#[derive(Copy, Clone)]
struct Hit {
    seq: u32,
    /// Latest first-occurrence step over antecedent items.
    ready: u32,
    /// Earliest last-occurrence step over consequent items.
    deadline: u32,
}

struct Miner<'a> {
    items: Vec<Item>,
    seqs: Vec<SeqIndex>,
    /// Sequences containing each item, as bitsets.
    containing: Vec<Vec<u64>>,
    frequent: Vec<bool>,
    min_count: usize,
    thresholds: Thresholds,
    caps: SizeCaps,
    db: &'a SequenceDatabase,
}

impl<'a> Miner<'a> {
    fn new(db: &'a SequenceDatabase, thresholds: Thresholds, caps: SizeCaps) -> Self {
        let items: Vec<Item> = db.alphabet().iter().copied().collect();
        let dense: HashMap<Item, u32> = items.iter().enumerate().map(|(i, &it)| (it, i as u32)).collect();
        let words = db.len().div_ceil(64);
        let mut containing = vec![vec![0u64; words]; items.len()];

        let seqs = db
            .sequences()
            .iter()
            .enumerate()
            .map(|(s, seq)| {
                let mut spans: BTreeMap<u32, (u32, u32)> = BTreeMap::new();
                for (pos, step) in seq.steps().iter().enumerate() {
                    for item in step.items() {
                        let d = dense[item];
                        spans
                            .entry(d)
                            .and_modify(|e| e.1 = pos as u32)
                            .or_insert((pos as u32, pos as u32));
                    }
                }
                for &d in spans.keys() {
                    containing[d as usize][s / 64] |= 1 << (s % 64);
                }
                SeqIndex {
                    spans: spans.into_iter().map(|(d, (f, l))| (d, f, l)).collect(),
                }
            })
            .collect();

        let n = db.len();
        let min_count = ((thresholds.minsup * n as f64 - 1e-9).ceil() as usize).max(1);
        let frequent = containing
            .iter()
            .map(|bits| popcount(bits) >= min_count)
            .collect();

        Miner {
            items,
            seqs,
            containing,
            frequent,
            min_count,
            thresholds,
            caps,
            db,
        }
    }

    fn antecedent_count(&self, antecedent: &[u32]) -> usize {
        let mut acc = self.containing[antecedent[0] as usize].clone();
        for &x in &antecedent[1..] {
            for (a, b) in acc.iter_mut().zip(&self.containing[x as usize]) {
                *a &= b;
            }
        }
        popcount(&acc)
    }

    fn seed(&self, x: u32, y: u32) -> Vec<Hit> {
        self.seqs
            .iter()
            .enumerate()
            .filter_map(|(s, idx)| {
                let (first_x, _) = idx.span(x)?;
                let (_, last_y) = idx.span(y)?;
                (first_x < last_y).then_some(Hit {
                    seq: s as u32,
                    ready: first_x,
                    deadline: last_y,
                })
            })
            .collect()
    }

    /// Depth-first growth. Right expansions (consequent) may be followed by
    /// either kind; left expansions (antecedent) only by more left
    /// expansions, so each rule is generated exactly once.
    fn grow(
        &self,
        antecedent: &mut Vec<u32>,
        consequent: &mut Vec<u32>,
        hits: &[Hit],
        left_only: bool,
        out: &mut Vec<MinedRule>,
    ) {
        let antecedent_count = self.antecedent_count(antecedent);
        if meets(hits.len(), antecedent_count, self.thresholds.minconf) {
            let rule = SequentialRule {
                antecedent: antecedent.iter().map(|&d| self.items[d as usize]).collect(),
                consequent: consequent.iter().map(|&d| self.items[d as usize]).collect(),
            };
            out.push(MinedRule::new(
                rule,
                RuleStats {
                    support_count: hits.len(),
                    antecedent_count,
                    db_size: self.db.len(),
                },
            ));
        }

        let m = self.items.len() as u32;
        if !left_only && consequent.len() < self.caps.max_consequent {
            let start = consequent.last().map_or(0, |&y| y + 1);
            for y in start..m {
                if !self.frequent[y as usize] || antecedent.contains(&y) {
                    continue;
                }
                let next: Vec<Hit> = hits
                    .iter()
                    .filter_map(|h| {
                        let (_, last) = self.seqs[h.seq as usize].span(y)?;
                        let deadline = h.deadline.min(last);
                        (h.ready < deadline).then_some(Hit { deadline, ..*h })
                    })
                    .collect();
                if next.len() >= self.min_count {
                    consequent.push(y);
                    self.grow(antecedent, consequent, &next, false, out);
                    consequent.pop();
                }
            }
        }

        if antecedent.len() < self.caps.max_antecedent {
            let start = antecedent.last().map_or(0, |&x| x + 1);
            for x in start..m {
                if !self.frequent[x as usize] || consequent.contains(&x) {
                    continue;
                }
                let next: Vec<Hit> = hits
                    .iter()
                    .filter_map(|h| {
                        let (first, _) = self.seqs[h.seq as usize].span(x)?;
                        let ready = h.ready.max(first);
                        (ready < h.deadline).then_some(Hit { ready, ..*h })
                    })
                    .collect();
                if next.len() >= self.min_count {
                    antecedent.push(x);
                    self.grow(antecedent, consequent, &next, true, out);
                    antecedent.pop();
                }
            }
        }
    }

    fn run(&self) -> Vec<MinedRule> {
        let m = self.items.len() as u32;
        let mut rules: Vec<MinedRule> = (0..m)
            .into_par_iter()
            .filter(|&x| self.frequent[x as usize])
            .flat_map_iter(|x| {
                let mut out = Vec::new();
                for y in (0..m).filter(|&y| y != x && self.frequent[y as usize]) {
                    let hits = self.seed(x, y);
                    if hits.len() >= self.min_count {
                        self.grow(&mut vec![x], &mut vec![y], &hits, false, &mut out);
                    }
                }
                out
            })
            .collect();
        rules.sort_unstable_by(|a, b| a.rule.cmp(&b.rule));
        rules
    }
}

fn popcount(bits: &[u64]) -> usize {
    bits.iter().map(|w| w.count_ones() as usize).sum()
}

/// Every rule meeting both thresholds within the size caps, with exact
/// stats, sorted by rule.
pub fn mine_rules(
    db: &SequenceDatabase,
    thresholds: Thresholds,
    caps: SizeCaps,
) -> Result<Vec<MinedRule>> {
    thresholds.validate()?;
    caps.validate()?;
    if db.is_empty() {
        return Err(Error::EmptyDatabase);
    }
    Ok(Miner::new(db, thresholds, caps).run())
}

/// Every `{x} -> {y}` rule with non-zero support, sorted by rule.
pub fn mine_all_one_rules(db: &SequenceDatabase) -> Vec<MinedRule> {
    let mut support: HashMap<(Item, Item), usize> = HashMap::new();
    let mut containing: HashMap<Item, usize> = HashMap::new();

    for seq in db.sequences() {
        let mut spans: BTreeMap<Item, (usize, usize)> = BTreeMap::new();
        for (pos, step) in seq.steps().iter().enumerate() {
            for &item in step.items() {
                spans
                    .entry(item)
                    .and_modify(|e| e.1 = pos)
                    .or_insert((pos, pos));
            }
        }
        for (&x, &(first_x, _)) in &spans {
            *containing.entry(x).or_default() += 1;
            for (&y, &(_, last_y)) in &spans {
                if x != y && first_x < last_y {
                    *support.entry((x, y)).or_default() += 1;
                }
            }
        }
    }

    let mut rules: Vec<MinedRule> = support
        .into_iter()
        .map(|((x, y), count)| {
            MinedRule::new(
                SequentialRule {
                    antecedent: vec![x],
                    consequent: vec![y],
                },
                RuleStats {
                    support_count: count,
                    antecedent_count: containing[&x],
                    db_size: db.len(),
                },
            )
        })
        .collect();
    rules.sort_unstable_by(|a, b| a.rule.cmp(&b.rule));
    rules
}

/// The 1x1 rules of a mined set.
pub fn initial_code(rules: &[MinedRule]) -> Vec<MinedRule> {
    rules
        .iter()
        .filter(|m| m.rule.is_one_by_one())
        .cloned()
        .collect()
}
