//! Incremental description-length evaluation for the greedy loop.
//!
//! Every rule that can ever enter the code set (the starting base and all
//! candidates) is ranked once in canonical order, so a code set is just a
//! set of ranks. The cost of a sequence depends only on the code-set rules
//! that occur in it, and a candidate that does not embed when its turn comes
//! leaves the sequence untouched. Evaluating a candidate therefore only
//! re-covers the sequences where it actually fires.

use std::collections::HashMap;

use rayon::prelude::*;

use crate::codec::CoverOptions;
use crate::codec::CoverPolicy;
use crate::rulemine::{MinedRule, SequentialRule};
use crate::seqdb::Item;

/// A sequence with its distinct items and per-item spans.
struct Row {
    items: Vec<Item>,
    /// Distinct items, sorted.
    local: Vec<Item>,
    /// Local index of the item at each 0-based step.
    local_at: Vec<u32>,
    /// (first, last) 1-based position of each local item.
    spans: Vec<(u32, u32)>,
}

impl Row {
    fn new(items: Vec<Item>) -> Self {
        let mut local = items.clone();
        local.sort_unstable();
        local.dedup();
        let mut spans = vec![(u32::MAX, 0); local.len()];
        let local_at = items
            .iter()
            .enumerate()
            .map(|(i, item)| {
                let l = local.binary_search(item).expect("item is local");
                let pos = i as u32 + 1;
                spans[l].0 = spans[l].0.min(pos);
                spans[l].1 = pos;
                l as u32
            })
            .collect();
        Row {
            items,
            local,
            local_at,
            spans,
        }
    }

    fn local_of(&self, item: Item) -> Option<usize> {
        self.local.binary_search(&item).ok()
    }

    fn occurs(&self, rule: &SequentialRule) -> bool {
        let mut ready = 0;
        for &x in rule.antecedent() {
            match self.local_of(x) {
                Some(l) => ready = ready.max(self.spans[l].0),
                None => return false,
            }
        }
        rule.consequent()
            .iter()
            .all(|&y| self.local_of(y).is_some_and(|l| self.spans[l].1 > ready))
    }
}

/// Residual of one sequence during covering: alive positions per local item.
struct Residual<'r> {
    row: &'r Row,
    alive: Vec<Vec<u32>>,
    remaining: usize,
    cost: u64,
    scratch: Vec<(usize, usize)>,
}

impl<'r> Residual<'r> {
    fn new(row: &'r Row) -> Self {
        let mut alive = vec![Vec::new(); row.local.len()];
        for (i, &l) in row.local_at.iter().enumerate() {
            alive[l as usize].push(i as u32 + 1);
        }
        Residual {
            row,
            alive,
            remaining: row.items.len(),
            cost: 0,
            scratch: Vec::new(),
        }
    }

    /// Finds the leftmost embedding; fills `scratch` with (local item, index
    /// into its alive list).
    fn embed(&mut self, rule: &SequentialRule) -> bool {
        if self.remaining < rule.size() {
            return false;
        }
        self.scratch.clear();
        let mut split = 0;
        for &x in rule.antecedent() {
            let Some(l) = self.row.local_of(x) else {
                return false;
            };
            let Some(&pos) = self.alive[l].first() else {
                return false;
            };
            split = split.max(pos);
            self.scratch.push((l, 0));
        }
        for &y in rule.consequent() {
            let Some(l) = self.row.local_of(y) else {
                return false;
            };
            let idx = self.alive[l].partition_point(|&p| p <= split);
            if idx == self.alive[l].len() {
                return false;
            }
            self.scratch.push((l, idx));
        }
        true
    }

    /// Applies a rule in phase 1. Returns whether it fired at least once.
    fn apply(&mut self, rule: &SequentialRule, policy: CoverPolicy) -> bool {
        let mut fired = false;
        while self.embed(rule) {
            fired = true;
            // Items are distinct within a rule, so each local list is hit once.
            for &(l, idx) in &self.scratch {
                self.alive[l].remove(idx);
            }
            self.remaining -= rule.size();
            self.cost += rule.size() as u64 + 1;
            if policy == CoverPolicy::Single {
                break;
            }
        }
        fired
    }

    /// Leftover pass and residual cost. `eligible` yields the code-set rules
    /// occurring in the original sequence, in order.
    fn finish<'a>(self, eligible: impl Iterator<Item = &'a SequentialRule>, partial_units: u64) -> u64 {
        if self.remaining == 1 {
            let l = self.alive.iter().position(|v| !v.is_empty()).expect("one item remains");
            let item = self.row.local[l];
            let hit = eligible
                .filter(|r| r.is_one_by_one())
                .any(|r| r.antecedent()[0] == item || r.consequent()[0] == item);
            if hit {
                return self.cost + partial_units;
            }
        }
        self.cost + self.remaining as u64
    }
}

pub(crate) struct Evaluation {
    pub delta: i64,
    changed: Vec<(usize, u64)>,
}

pub(crate) struct Engine {
    /// Every rule that can enter the code set, in canonical order.
    pool: Vec<MinedRule>,
    rows: Vec<Row>,
    opts: CoverOptions,
    in_code: Vec<bool>,
    /// Per sequence: ranks of code-set rules occurring in it, ascending.
    active: Vec<Vec<u32>>,
    seq_cost: Vec<u64>,
    model_length: u64,
}

impl Engine {
    /// `pool` must be in canonical order; `base` lists the ranks of the
    /// starting code set, all of which must be 1x1 rules.
    pub fn new(pool: Vec<MinedRule>, base: &[u32], rows: Vec<Vec<Item>>, opts: CoverOptions) -> Self {
        let rows: Vec<Row> = rows.into_iter().map(Row::new).collect();
        let mut in_code = vec![false; pool.len()];
        let mut pairs: HashMap<(Item, Item), u32> = HashMap::with_capacity(base.len());
        let mut model_length = 0;
        for &rank in base {
            let rule = &pool[rank as usize].rule;
            debug_assert!(rule.is_one_by_one());
            in_code[rank as usize] = true;
            model_length += 1 + rule.size() as u64;
            pairs.insert((rule.antecedent()[0], rule.consequent()[0]), rank);
        }

        let active: Vec<Vec<u32>> = rows
            .par_iter()
            .map(|row| {
                let mut ranks = Vec::new();
                for (i, &x) in row.local.iter().enumerate() {
                    for (j, &y) in row.local.iter().enumerate() {
                        if i != j && row.spans[i].0 < row.spans[j].1 {
                            if let Some(&rank) = pairs.get(&(x, y)) {
                                ranks.push(rank);
                            }
                        }
                    }
                }
                ranks.sort_unstable();
                ranks
            })
            .collect();

        let mut engine = Engine {
            pool,
            rows,
            opts,
            in_code,
            active,
            seq_cost: Vec::new(),
            model_length,
        };
        engine.seq_cost = (0..engine.rows.len())
            .into_par_iter()
            .map(|s| engine.cost_with(s, None))
            .collect();
        engine
    }

    pub fn total(&self) -> u64 {
        self.model_length + self.seq_cost.iter().sum::<u64>()
    }

    pub fn rule(&self, rank: u32) -> &MinedRule {
        &self.pool[rank as usize]
    }

    /// Current code set in canonical order.
    pub fn code_rules(&self) -> Vec<MinedRule> {
        self.pool
            .iter()
            .zip(&self.in_code)
            .filter(|(_, &inside)| inside)
            .map(|(m, _)| m.clone())
            .collect()
    }

    /// Full cost of sequence `s` under the current code set, optionally with
    /// one extra rank inserted.
    fn cost_with(&self, s: usize, extra: Option<u32>) -> u64 {
        let row = &self.rows[s];
        let ranks = merged(&self.active[s], extra);
        let mut residual = Residual::new(row);
        for &rank in &ranks {
            residual.apply(&self.pool[rank as usize].rule, self.opts.policy);
        }
        residual.finish(
            ranks.iter().map(|&r| &self.pool[r as usize].rule),
            self.opts.partial_units(),
        )
    }

    /// Cost of sequence `s` with `rank` added, or `None` if the rule never
    /// fires there (so the cost is unchanged).
    fn cost_if_fires(&self, s: usize, rank: u32) -> Option<u64> {
        let candidate = &self.pool[rank as usize].rule;
        if candidate.is_one_by_one() {
            return Some(self.cost_with(s, Some(rank)));
        }
        let row = &self.rows[s];
        let active = &self.active[s];
        let split = active.partition_point(|&r| r < rank);
        let mut residual = Residual::new(row);
        for &r in &active[..split] {
            residual.apply(&self.pool[r as usize].rule, self.opts.policy);
        }
        if !residual.apply(candidate, self.opts.policy) {
            return None;
        }
        for &r in &active[split..] {
            residual.apply(&self.pool[r as usize].rule, self.opts.policy);
        }
        // The candidate is larger than 1x1, so it never takes part in the
        // leftover pass.
        Some(residual.finish(
            active.iter().map(|&r| &self.pool[r as usize].rule),
            self.opts.partial_units(),
        ))
    }

    /// Change in total description length if `rank` joined the code set.
    pub fn evaluate(&self, rank: u32) -> Evaluation {
        debug_assert!(!self.in_code[rank as usize]);
        let rule = &self.pool[rank as usize].rule;
        let changed: Vec<(usize, u64)> = (0..self.rows.len())
            .into_par_iter()
            .filter(|&s| self.rows[s].occurs(rule))
            .filter_map(|s| self.cost_if_fires(s, rank).map(|c| (s, c)))
            .collect();
        let data_delta: i64 = changed
            .iter()
            .map(|&(s, c)| c as i64 - self.seq_cost[s] as i64)
            .sum();
        Evaluation {
            delta: 1 + rule.size() as i64 + data_delta,
            changed,
        }
    }

    pub fn accept(&mut self, rank: u32, eval: Evaluation) {
        let rule = &self.pool[rank as usize].rule;
        self.in_code[rank as usize] = true;
        self.model_length += 1 + rule.size() as u64;
        for s in 0..self.rows.len() {
            if self.rows[s].occurs(rule) {
                let at = self.active[s].partition_point(|&r| r < rank);
                self.active[s].insert(at, rank);
            }
        }
        for (s, cost) in eval.changed {
            self.seq_cost[s] = cost;
        }
    }
}

fn merged(active: &[u32], extra: Option<u32>) -> Vec<u32> {
    let mut ranks = active.to_vec();
    if let Some(rank) = extra {
        let at = ranks.partition_point(|&r| r < rank);
        ranks.insert(at, rank);
    }
    ranks
}
