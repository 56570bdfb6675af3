//! Aggregation of decision sequences into per-subclass occurrence
//! counts, and the best-choice-point query that drives guided literal
//! selection.
//!
//! The stored tables tally literals per exact decision position; the
//! scaling factor delta widens the queried window at lookup time, so a
//! single learned artifact serves any delta. All window arithmetic is
//! done in doubled integers (`2l - delta <= 2*idx < 2l + delta`) to
//! keep half-unit boundaries exact.

use std::collections::BTreeMap;

use crate::core::{DecisionSequence, ExtendedLiteral, SubclassLabel};

/// Statistics of one solver run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SolveStats {
    pub decision_count: u64,
    pub backtrack_count: u64,
    pub expand_calls: u64,
    /// Decisions served by the learned policy rather than the fallback
    /// heuristic. Zero for unguided runs.
    pub policy_hits: u64,
}

/// One solved training instance. `sequence` is `None` when the tracking
/// run found no model; such records contribute nothing to the counts.
#[derive(Debug, Clone)]
pub struct TrainingRecord {
    pub subclass: SubclassLabel,
    pub sequence: Option<DecisionSequence>,
    pub source: String,
    pub solve_stats: SolveStats,
}

type CountTable = BTreeMap<(ExtendedLiteral, u32), u64>;

/// Per-subclass occurrence counts of choice points at decision
/// positions, plus the scaling factor used when querying.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Policy {
    delta: u32,
    tables: BTreeMap<SubclassLabel, CountTable>,
}

impl Policy {
    /// An empty policy. `delta` must be at least 1.
    pub fn new(delta: u32) -> Policy {
        assert!(delta >= 1, "scaling factor must be positive");
        Policy {
            delta,
            tables: BTreeMap::new(),
        }
    }

    pub fn delta(&self) -> u32 {
        self.delta
    }

    /// Same counts, different query window.
    pub fn with_delta(&self, delta: u32) -> Policy {
        assert!(delta >= 1, "scaling factor must be positive");
        Policy {
            delta,
            tables: self.tables.clone(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.tables.values().all(|t| t.is_empty())
    }

    pub fn subclasses(&self) -> impl Iterator<Item = &SubclassLabel> {
        self.tables.keys()
    }

    /// Raw per-position entries for one subclass, in table order.
    pub fn entries(&self, subclass: &SubclassLabel) -> impl Iterator<Item = (&ExtendedLiteral, u32, u64)> {
        self.tables
            .get(subclass)
            .into_iter()
            .flat_map(|t| t.iter().map(|((e, pos), count)| (e, *pos, *count)))
    }

    pub(crate) fn record(&mut self, subclass: SubclassLabel, e: ExtendedLiteral, position: u32, count: u64) {
        if count == 0 {
            return;
        }
        *self
            .tables
            .entry(subclass)
            .or_default()
            .entry((e, position))
            .or_insert(0) += count;
    }

    /// Number of training sequences of `subclass` in which `e` occurs at
    /// a position `idx` with `l - delta/2 <= idx < l + delta/2`,
    /// evaluated exactly as `2l - delta <= 2*idx < 2l + delta`.
    pub fn occurrence_count(&self, e: &ExtendedLiteral, level: u32, subclass: &SubclassLabel) -> u64 {
        let Some(table) = self.tables.get(subclass) else {
            return 0;
        };
        let l = i64::from(level);
        let delta = i64::from(self.delta);
        // Positions idx satisfying 2l - delta <= 2*idx < 2l + delta.
        let lo = div_ceil(2 * l - delta, 2).max(0);
        let hi = div_ceil(2 * l + delta, 2) - 1; // last idx with 2*idx < 2l + delta
        let mut total = 0;
        for idx in lo..=hi {
            debug_assert!(2 * l - delta <= 2 * idx && 2 * idx < 2 * l + delta);
            if let Some(count) = table.get(&(e.clone(), idx as u32)) {
                total += count;
            }
        }
        total
    }

    /// The candidates attaining the maximal occurrence count at `level`,
    /// or the empty set when every candidate counts zero (the learned
    /// heuristics are silent and the caller falls back).
    pub fn best_choice_points(
        &self,
        level: u32,
        candidates: &[ExtendedLiteral],
        subclass: &SubclassLabel,
    ) -> Vec<ExtendedLiteral> {
        let mut best: Vec<ExtendedLiteral> = Vec::new();
        let mut best_count = 0u64;
        for e in candidates {
            let count = self.occurrence_count(e, level, subclass);
            if count == 0 {
                continue;
            }
            match count.cmp(&best_count) {
                std::cmp::Ordering::Greater => {
                    best_count = count;
                    best.clear();
                    best.push(e.clone());
                }
                std::cmp::Ordering::Equal => best.push(e.clone()),
                std::cmp::Ordering::Less => {}
            }
        }
        best
    }

    /// Entrywise count addition; associative and commutative. Both
    /// sides must share the same scaling factor.
    pub fn merge(mut self, other: Policy) -> Policy {
        assert_eq!(self.delta, other.delta, "cannot merge policies with different delta");
        for (subclass, table) in other.tables {
            let target = self.tables.entry(subclass).or_default();
            for (key, count) in table {
                *target.entry(key).or_insert(0) += count;
            }
        }
        self
    }

    /// Sum of all stored counts for one subclass.
    pub fn total_count(&self, subclass: &SubclassLabel) -> u64 {
        self.tables
            .get(subclass)
            .map(|t| t.values().sum())
            .unwrap_or(0)
    }
}

fn div_ceil(a: i64, b: i64) -> i64 {
    debug_assert!(b > 0);
    if a >= 0 {
        (a + b - 1) / b
    } else {
        -((-a) / b)
    }
}

/// Tallies every non-failed record's decision sequence into a policy.
pub fn learn_policy(records: &[TrainingRecord], delta: u32) -> Policy {
    let mut policy = Policy::new(delta);
    for record in records {
        let Some(sequence) = &record.sequence else {
            continue;
        };
        for (position, e) in sequence.entries().iter().enumerate() {
            policy.record(record.subclass.clone(), e.clone(), position as u32, 1);
        }
    }
    policy
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::core::{Atom, Literal};

    fn e(text: &str) -> ExtendedLiteral {
        let (neg, name) = match text.strip_prefix("not ") {
            Some(rest) => (true, rest),
            None => (false, text),
        };
        ExtendedLiteral {
            literal: Literal::positive(Atom::named(name)),
            default_negated: neg,
        }
    }

    fn label(s: &str) -> SubclassLabel {
        SubclassLabel::new(s).unwrap()
    }

    fn three_record_set() -> Vec<TrainingRecord> {
        // d(I1) = [p, not q, u], d(I2) = [p, u, not q], d(I3) = bottom
        let seq = |items: &[&str]| {
            Some(DecisionSequence::from_entries(
                items.iter().map(|t| e(t)).collect(),
            ))
        };
        vec![
            TrainingRecord {
                subclass: label("s"),
                sequence: seq(&["p", "not q", "u"]),
                source: "i1".into(),
                solve_stats: SolveStats::default(),
            },
            TrainingRecord {
                subclass: label("s"),
                sequence: seq(&["p", "u", "not q"]),
                source: "i2".into(),
                solve_stats: SolveStats::default(),
            },
            TrainingRecord {
                subclass: label("s"),
                sequence: None,
                source: "i3".into(),
                solve_stats: SolveStats::default(),
            },
        ]
    }

    #[test]
    fn occurrence_counts_delta_one() {
        let pol = learn_policy(&three_record_set(), 1);
        let s = label("s");
        assert_eq!(pol.occurrence_count(&e("p"), 0, &s), 2);
        assert_eq!(pol.occurrence_count(&e("not q"), 1, &s), 1);
        assert_eq!(pol.occurrence_count(&e("u"), 1, &s), 1);
        assert_eq!(pol.occurrence_count(&e("u"), 2, &s), 1);
        assert_eq!(pol.occurrence_count(&e("p"), 1, &s), 0);
    }

    #[test]
    fn occurrence_counts_delta_two_widen_window() {
        let pol = learn_policy(&three_record_set(), 2);
        let s = label("s");
        // window at l=1 covers positions 0 and 1: 2*1-2 = 0 <= 2*idx < 4
        assert_eq!(pol.occurrence_count(&e("p"), 1, &s), 2);
    }

    #[test]
    fn occurrence_count_empty_training_set() {
        let pol = learn_policy(&[], 1);
        assert_eq!(pol.occurrence_count(&e("p"), 0, &label("s")), 0);
        assert!(pol.is_empty());
    }

    #[test]
    fn best_choice_points_examples() {
        let pol = learn_policy(&three_record_set(), 1);
        let s = label("s");
        // counts at level 1: p -> 0, not q -> 1, u -> 1
        let best = pol.best_choice_points(1, &[e("p"), e("not q"), e("u")], &s);
        assert_eq!(best, vec![e("not q"), e("u")]);
        // all-zero candidates give the empty set, not all of E
        assert!(pol.best_choice_points(5, &[e("p"), e("u")], &s).is_empty());
        assert!(pol.best_choice_points(0, &[], &s).is_empty());
    }

    #[test]
    fn learned_tables_match_counts_and_skip_failed_runs() {
        let pol = learn_policy(&three_record_set(), 1);
        let s = label("s");
        // Exactly the nonzero entries from the worked example.
        let entries: Vec<_> = pol
            .entries(&s)
            .map(|(ext, pos, count)| (ext.to_string(), pos, count))
            .collect();
        assert_eq!(entries.len(), 5);
        assert_eq!(pol.total_count(&s), 6); // 3 + 3 sequence entries
        let failed_only = vec![TrainingRecord {
            subclass: s.clone(),
            sequence: None,
            source: "x".into(),
            solve_stats: SolveStats::default(),
        }];
        assert!(learn_policy(&failed_only, 1).is_empty());
    }

    #[test]
    fn merge_matches_joint_learning() {
        let records = three_record_set();
        let joint = learn_policy(&records, 1);
        let merged = learn_policy(&records[..1], 1).merge(learn_policy(&records[1..], 1));
        assert_eq!(joint, merged);
    }

    #[test]
    fn window_monotone_in_delta() {
        let records = three_record_set();
        let s = label("s");
        for level in 0..5u32 {
            for cand in ["p", "not q", "u"] {
                let mut last = 0;
                for delta in 1..=4u32 {
                    let count = learn_policy(&records, delta).occurrence_count(&e(cand), level, &s);
                    assert!(count >= last, "delta widening shrank a count");
                    last = count;
                }
            }
        }
    }
}
