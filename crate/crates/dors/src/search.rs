//! The solver variants and both literal-selection functions.
//!
//! A single iterative engine with an explicit stack of alternatives
//! backs every variant; they differ only in how the next choice point
//! is selected. The baseline heuristic does failed-literal lookahead:
//! it probes both polarities of each candidate, immediately asserts the
//! survivor when one polarity refutes, and treats a candidate with two
//! refuted polarities as a dead end for the whole node. The guided
//! variant consults the learned policy first and falls back to the
//! lookahead selection when the policy is silent.
//!
//! Using one engine keeps the guided solver with an empty policy
//! decision-for-decision identical to the baseline.

use std::collections::{BTreeSet, VecDeque};
use std::time::{Duration, Instant};

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::core::{
    DecisionSequence, ExtendedLiteral, GroundProgram, Literal, PartialAnswerSet, SubclassLabel,
};
use crate::policy::{Policy, SolveStats};
use crate::propagate::{
    assign_to_set, verify_stable_compiled, Assign, CElem, CHead, CompiledProgram, CRule, LitId,
    Propagator, Scratch, Val,
};

/// Seed for the uniform selection among equally good policy choices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RandomSeed(pub u64);

/// Extended literals already selected by the guided selector in this
/// run. Entries are never removed, mirroring the iterative algorithm's
/// monotone bookkeeping.
#[derive(Debug, Clone, Default)]
pub struct TriedSet {
    pub members: BTreeSet<ExtendedLiteral>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Model,
    NoModel,
}

/// What a solver run produced.
#[derive(Debug, Clone)]
pub struct SolveOutcome {
    pub status: SolveStatus,
    /// The stable model, when one was found.
    pub model: Option<BTreeSet<Literal>>,
    /// The surviving choice points, when a model was found.
    pub decisions: Option<DecisionSequence>,
    pub stats: SolveStats,
}

impl SolveOutcome {
    pub fn found_model(&self) -> bool {
        self.status == SolveStatus::Model
    }
}

#[derive(Debug, Error)]
pub enum SolveError {
    #[error("decision limit {limit} reached")]
    DecisionLimit { limit: u64, stats: SolveStats },
    #[error("timeout after {seconds}s")]
    Timeout { seconds: u64, stats: SolveStats },
    #[error("replayed choice {0} conflicts with the current assignment")]
    ReplayConflict(ExtendedLiteral),
    #[error("replayed choice {0} mentions a literal foreign to the program")]
    ReplayForeign(ExtendedLiteral),
}

/// Choice-point selection strategy.
#[derive(Clone)]
pub enum Heuristic<'a> {
    /// Failed-literal lookahead scored by the weaker polarity's
    /// consequence count.
    Lookahead,
    /// First undecided literal in program order, positive polarity.
    /// Debugging selector with no lookahead.
    Naive,
    /// Learned policy with lookahead fallback.
    Policy {
        policy: &'a Policy,
        subclass: &'a SubclassLabel,
        seed: RandomSeed,
    },
}

#[derive(Clone, Default)]
pub struct SolveConfig<'a> {
    pub heuristic: Option<Heuristic<'a>>,
    /// Force the first decisions to follow this sequence.
    pub replay: Option<&'a DecisionSequence>,
    pub max_decisions: Option<u64>,
    pub timeout: Option<Duration>,
    /// Forget tried policy prescriptions when their branch is abandoned.
    /// Off by default: the tried set is global for the whole run.
    pub per_branch_tried: bool,
}

/// Hook for instrumenting a run; every callback has a no-op default.
pub trait SearchObserver {
    fn on_decision(&mut self, _chosen: &ExtendedLiteral, _level: usize, _served_by_policy: bool) {}
    /// Fires once per guided selection with the candidate set passed to
    /// the policy and whether the policy prescribed anything.
    fn on_policy_query(
        &mut self,
        _level: usize,
        _candidates: &[ExtendedLiteral],
        _best_nonempty: bool,
    ) {
    }
}

/// Observer that records nothing.
pub struct NoObserver;
impl SearchObserver for NoObserver {}

// ---------------------------------------------------------------------------
// selection helpers shared by the engine and the public functions
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct ELit {
    id: LitId,
    neg: bool,
}

impl ELit {
    fn complement(self) -> ELit {
        ELit {
            id: self.id,
            neg: !self.neg,
        }
    }

    fn val(self) -> Val {
        if self.neg {
            Val::False
        } else {
            Val::True
        }
    }
}

enum Selection {
    Forced(ELit),
    Decision { e: ELit, from_policy: bool },
    DeadEnd,
}

fn ext_falsified(assign: &Assign, x: LitId, neg: bool) -> bool {
    let want = if neg { Val::False } else { Val::True };
    let v = assign.get(x);
    v != Val::Unset && v != want
}

/// A rule still constrains the search: its body can fire and, for a
/// normal rule, its head is not already satisfied.
fn rule_active(rule: &CRule, assign: &Assign) -> bool {
    let body_falsified = rule.body.iter().any(|elem| match elem {
        CElem::Ext(x, neg) => ext_falsified(assign, *x, *neg),
        CElem::Card { lower, elems } => {
            let fals = elems
                .iter()
                .filter(|(x, neg)| ext_falsified(assign, *x, *neg))
                .count() as u32;
            (elems.len() as u32) - fals < *lower
        }
    });
    if body_falsified {
        return false;
    }
    match &rule.head {
        CHead::Lit(h) => assign.get(*h) != Val::True,
        CHead::Constraint | CHead::Choice { .. } => true,
    }
}

fn mark_undecided_lits(rule: &CRule, assign: &Assign, marks: &mut [bool]) {
    let mut mark = |id: LitId| {
        if assign.get(id) == Val::Unset {
            marks[id as usize] = true;
        }
    };
    match &rule.head {
        CHead::Lit(h) => mark(*h),
        CHead::Constraint => {}
        CHead::Choice { elems, .. } => {
            for &e in elems {
                mark(e);
            }
        }
    }
    for elem in &rule.body {
        match elem {
            CElem::Ext(x, _) => mark(*x),
            CElem::Card { elems, .. } => {
                for (x, _) in elems {
                    mark(*x);
                }
            }
        }
    }
}

fn first_unset(cp: &CompiledProgram, assign: &Assign) -> LitId {
    (0..cp.lits.len() as LitId)
        .find(|&id| assign.get(id) == Val::Unset)
        .expect("selection requires an incomplete assignment")
}

/// Candidate literals in canonical order: undecided literals occurring
/// in some still-active rule.
fn lookahead_candidates(cp: &CompiledProgram, assign: &Assign, marks: &mut [bool]) {
    marks.iter_mut().for_each(|m| *m = false);
    for rule in &cp.rules {
        if rule_active(rule, assign) {
            mark_undecided_lits(rule, assign, marks);
        }
    }
}

// ---------------------------------------------------------------------------
// engine
// ---------------------------------------------------------------------------

struct Frame {
    assign: Assign,
    sibling: ELit,
    path_len: usize,
    tried_len: usize,
}

enum SelectorState<'a> {
    Lookahead,
    Naive,
    Policy {
        policy: &'a Policy,
        subclass: &'a SubclassLabel,
        rng: ChaCha8Rng,
    },
}

enum StepSeed {
    Full,
    Incremental(ELit),
}

struct Engine<'a, 'o> {
    cp: &'a CompiledProgram,
    prop: Propagator<'a>,
    scratch: Scratch,
    selector: SelectorState<'a>,
    replay: Option<VecDeque<ELit>>,
    options: &'a SolveConfig<'a>,
    observer: &'o mut dyn SearchObserver,
    stats: SolveStats,
    stack: Vec<Frame>,
    assign: Assign,
    path: Vec<ELit>,
    tried: Vec<ELit>,
    extras: Vec<ExtendedLiteral>,
    started: Instant,
    cand_mark: Vec<bool>,
}

impl<'a, 'o> Engine<'a, 'o> {
    fn check_limits(&self) -> Result<(), SolveError> {
        if let Some(timeout) = self.options.timeout {
            if self.started.elapsed() > timeout {
                return Err(SolveError::Timeout {
                    seconds: timeout.as_secs(),
                    stats: self.stats,
                });
            }
        }
        Ok(())
    }

    /// Pops the most recent alternative. Returns the literal to
    /// propagate next, or `None` when the stack is exhausted.
    fn backtrack(&mut self) -> Option<ELit> {
        let frame = self.stack.pop()?;
        self.stats.backtrack_count += 1;
        self.assign = frame.assign;
        self.path.truncate(frame.path_len);
        self.path.push(frame.sibling);
        if self.options.per_branch_tried {
            self.tried.truncate(frame.tried_len);
        }
        Some(frame.sibling)
    }

    fn probe(&mut self, e: ELit) -> Option<u32> {
        self.stats.expand_calls += 1;
        let before = self.assign.assigned_count();
        let mut trial = self.assign.clone();
        match self
            .prop
            .expand_after(&mut trial, &mut self.scratch, e.id, e.val())
        {
            Ok(()) => Some(trial.assigned_count() - before),
            Err(_) => None,
        }
    }

    fn lookahead_select(&mut self) -> Selection {
        let mut marks = std::mem::take(&mut self.cand_mark);
        lookahead_candidates(self.cp, &self.assign, &mut marks);
        let mut best: Option<(u32, ELit)> = None;
        let mut outcome: Option<Selection> = None;
        for id in 0..self.cp.lits.len() as LitId {
            if !marks[id as usize] {
                continue;
            }
            let pos = ELit { id, neg: false };
            let neg = ELit { id, neg: true };
            match (self.probe(pos), self.probe(neg)) {
                (None, None) => {
                    outcome = Some(Selection::DeadEnd);
                    break;
                }
                (None, Some(_)) => {
                    outcome = Some(Selection::Forced(neg));
                    break;
                }
                (Some(_), None) => {
                    outcome = Some(Selection::Forced(pos));
                    break;
                }
                (Some(gain_pos), Some(gain_neg)) => {
                    let score = gain_pos.min(gain_neg);
                    if best.map_or(true, |(s, _)| score > s) {
                        let e = if gain_pos >= gain_neg { pos } else { neg };
                        best = Some((score, e));
                    }
                }
            }
        }
        self.cand_mark = marks;
        match outcome {
            Some(sel) => sel,
            None => Selection::Decision {
                e: best.map(|(_, e)| e).unwrap_or(ELit {
                    id: first_unset(self.cp, &self.assign),
                    neg: false,
                }),
                from_policy: false,
            },
        }
    }

    fn naive_select(&self) -> Selection {
        let id = self
            .cp
            .first_occurrence
            .iter()
            .copied()
            .find(|&id| self.assign.get(id) == Val::Unset)
            .expect("selection requires an incomplete assignment");
        Selection::Decision {
            e: ELit { id, neg: false },
            from_policy: false,
        }
    }

    fn policy_select(&mut self) -> Selection {
        let (policy, subclass) = match &self.selector {
            SelectorState::Policy {
                policy, subclass, ..
            } => (*policy, *subclass),
            _ => unreachable!("policy_select requires the policy selector"),
        };
        if policy.is_empty() {
            return self.lookahead_select();
        }
        let level = self.stack.len() as u32;
        let mut candidates: Vec<ExtendedLiteral> = Vec::new();
        let mut elits: Vec<ELit> = Vec::new();
        for id in 0..self.cp.lits.len() as LitId {
            if self.assign.get(id) != Val::Unset {
                continue;
            }
            for neg in [false, true] {
                let e = ELit { id, neg };
                if self.tried.contains(&e) {
                    continue;
                }
                candidates.push(self.cp.ext(id, neg));
                elits.push(e);
            }
        }
        let best = policy.best_choice_points(level, &candidates, subclass);
        self.observer
            .on_policy_query(level as usize, &candidates, !best.is_empty());
        if best.is_empty() {
            return self.lookahead_select();
        }
        let pick = if best.len() == 1 {
            0
        } else {
            match &mut self.selector {
                SelectorState::Policy { rng, .. } => rng.gen_range(0..best.len()),
                _ => unreachable!(),
            }
        };
        let chosen = &best[pick];
        let idx = candidates
            .iter()
            .position(|c| c == chosen)
            .expect("best choice points come from the candidate set");
        Selection::Decision {
            e: elits[idx],
            from_policy: true,
        }
    }

    fn select(&mut self) -> Selection {
        match self.selector {
            SelectorState::Lookahead => self.lookahead_select(),
            SelectorState::Naive => self.naive_select(),
            SelectorState::Policy { .. } => self.policy_select(),
        }
    }

    /// Swaps the selector's proposal for the next queued replay entry,
    /// skipping entries propagation has already realized.
    fn apply_replay(&mut self, proposed: ELit) -> Result<ELit, SolveError> {
        let Some(queue) = &mut self.replay else {
            return Ok(proposed);
        };
        loop {
            let Some(&front) = queue.front() else {
                return Ok(proposed);
            };
            match self.assign.get(front.id) {
                Val::Unset => {
                    queue.pop_front();
                    return Ok(front);
                }
                v if v == front.val() => {
                    queue.pop_front();
                }
                _ => {
                    return Err(SolveError::ReplayConflict(self.cp.ext(front.id, front.neg)));
                }
            }
        }
    }

    fn finish_model(&mut self) -> SolveOutcome {
        let set = assign_to_set(self.cp, &self.assign, &[]);
        let mut model: BTreeSet<Literal> = set
            .iter()
            .filter(|e| !e.default_negated)
            .map(|e| e.literal.clone())
            .collect();
        for e in &self.extras {
            if !e.default_negated {
                model.insert(e.literal.clone());
            }
        }
        let mut decisions = DecisionSequence::new();
        for e in &self.path {
            decisions.push(self.cp.ext(e.id, e.neg));
        }
        SolveOutcome {
            status: SolveStatus::Model,
            model: Some(model),
            decisions: Some(decisions),
            stats: self.stats,
        }
    }

    fn no_model(&self) -> SolveOutcome {
        SolveOutcome {
            status: SolveStatus::NoModel,
            model: None,
            decisions: None,
            stats: self.stats,
        }
    }

    fn stable_leaf(&self) -> bool {
        let truth: Vec<bool> = (0..self.cp.lits.len() as LitId)
            .map(|id| self.assign.get(id) == Val::True)
            .collect();
        if !verify_stable_compiled(self.cp, &truth) {
            return false;
        }
        // carried-through positive input literals must stay consistent
        // with the model
        for e in &self.extras {
            if !e.default_negated {
                if let Some(pair) = self.cp.lit_id(&e.literal.strong_complement()) {
                    if truth[pair as usize] {
                        return false;
                    }
                }
            }
        }
        true
    }

    fn run(&mut self) -> Result<SolveOutcome, SolveError> {
        let mut seed = StepSeed::Full;
        loop {
            self.check_limits()?;
            self.stats.expand_calls += 1;
            let result = match seed {
                StepSeed::Full => self.prop.expand_full(&mut self.assign, &mut self.scratch),
                StepSeed::Incremental(e) => {
                    self.prop
                        .expand_after(&mut self.assign, &mut self.scratch, e.id, e.val())
                }
            };
            let dead_end = match result {
                Err(_) => true,
                Ok(()) => {
                    if self.assign.is_complete() {
                        if self.stable_leaf() {
                            return Ok(self.finish_model());
                        }
                        true
                    } else {
                        false
                    }
                }
            };
            if dead_end {
                match self.backtrack() {
                    Some(sibling) => {
                        seed = StepSeed::Incremental(sibling);
                        continue;
                    }
                    None => return Ok(self.no_model()),
                }
            }
            match self.select() {
                Selection::Forced(e) => {
                    seed = StepSeed::Incremental(e);
                }
                Selection::DeadEnd => match self.backtrack() {
                    Some(sibling) => {
                        seed = StepSeed::Incremental(sibling);
                    }
                    None => return Ok(self.no_model()),
                },
                Selection::Decision { e, from_policy } => {
                    let chosen = self.apply_replay(e)?;
                    if let Some(limit) = self.options.max_decisions {
                        if self.stats.decision_count >= limit {
                            return Err(SolveError::DecisionLimit {
                                limit,
                                stats: self.stats,
                            });
                        }
                    }
                    let level = self.stack.len();
                    self.stats.decision_count += 1;
                    let served = from_policy && chosen == e;
                    if served {
                        self.stats.policy_hits += 1;
                    }
                    if matches!(self.selector, SelectorState::Policy { .. }) {
                        self.tried.push(chosen);
                    }
                    self.stack.push(Frame {
                        assign: self.assign.clone(),
                        sibling: chosen.complement(),
                        path_len: self.path.len(),
                        tried_len: self.tried.len(),
                    });
                    self.path.push(chosen);
                    let shown = self.cp.ext(chosen.id, chosen.neg);
                    self.observer.on_decision(&shown, level, served);
                    seed = StepSeed::Incremental(chosen);
                }
            }
        }
    }
}

// ---------------------------------------------------------------------------
// public entry points
// ---------------------------------------------------------------------------

/// Full-control solver entry: heuristic, replay, limits, observer.
pub fn solve_observed(
    p: &GroundProgram,
    a: &PartialAnswerSet,
    config: &SolveConfig<'_>,
    observer: &mut dyn SearchObserver,
) -> Result<SolveOutcome, SolveError> {
    let cp = CompiledProgram::new(p);
    let mut scratch = Scratch::new(&cp);
    let mut assign = Assign::new(cp.lits.len());
    let prop = Propagator::new(&cp);
    let mut extras: Vec<ExtendedLiteral> = Vec::new();
    let mut stats = SolveStats::default();
    // seed with the caller's partial answer set; conflicts here mean the
    // input already contradicts itself through strong negation
    for e in a.iter() {
        match cp.lit_id(&e.literal) {
            Some(id) => {
                let val = if e.default_negated { Val::False } else { Val::True };
                if prop.set(&mut assign, &mut scratch, id, val).is_err() {
                    stats.expand_calls = 1;
                    return Ok(SolveOutcome {
                        status: SolveStatus::NoModel,
                        model: None,
                        decisions: None,
                        stats,
                    });
                }
            }
            None => extras.push(e.clone()),
        }
    }
    let selector = match config.heuristic.as_ref().unwrap_or(&Heuristic::Lookahead) {
        Heuristic::Lookahead => SelectorState::Lookahead,
        Heuristic::Naive => SelectorState::Naive,
        Heuristic::Policy {
            policy,
            subclass,
            seed,
        } => SelectorState::Policy {
            policy,
            subclass,
            rng: ChaCha8Rng::seed_from_u64(seed.0),
        },
    };
    let replay = match config.replay {
        None => None,
        Some(d) => {
            let mut queue = VecDeque::with_capacity(d.len());
            for e in d.entries() {
                let id = cp
                    .lit_id(&e.literal)
                    .ok_or_else(|| SolveError::ReplayForeign(e.clone()))?;
                queue.push_back(ELit {
                    id,
                    neg: e.default_negated,
                });
            }
            Some(queue)
        }
    };
    let lit_count = cp.lits.len();
    let mut engine = Engine {
        prop: Propagator::new(&cp),
        cp: &cp,
        scratch,
        selector,
        replay,
        options: config,
        observer,
        stats,
        stack: Vec::new(),
        assign,
        path: Vec::new(),
        tried: Vec::new(),
        extras,
        started: Instant::now(),
        cand_mark: vec![false; lit_count],
    };
    engine.run()
}

pub fn solve_with(
    p: &GroundProgram,
    a: &PartialAnswerSet,
    config: &SolveConfig<'_>,
) -> Result<SolveOutcome, SolveError> {
    solve_observed(p, a, config, &mut NoObserver)
}

/// The standard search: expand, stability-check complete sets, branch
/// on the lookahead selection, backtrack on dead ends.
pub fn solve_baseline(p: &GroundProgram, a: &PartialAnswerSet) -> SolveOutcome {
    solve_with(p, a, &SolveConfig::default()).expect("unlimited run cannot be interrupted")
}

/// Same search as `solve_baseline`; the decision sequence of surviving
/// choice points accompanies the model (the engine tracks it for free).
pub fn solve_tracking(p: &GroundProgram, a: &PartialAnswerSet) -> SolveOutcome {
    solve_baseline(p, a)
}

/// Runs the solver forcing decision i to be `d[i]`. A sequence produced
/// by `solve_tracking` on the same program replays to the same model
/// with zero backtracks.
pub fn replay(p: &GroundProgram, d: &DecisionSequence) -> Result<SolveOutcome, SolveError> {
    let config = SolveConfig {
        replay: Some(d),
        ..SolveConfig::default()
    };
    solve_with(p, &PartialAnswerSet::new(), &config)
}

/// The guided search: policy-prescribed choice points when the learned
/// counts speak, lookahead selection otherwise.
pub fn solve_dspec(
    p: &GroundProgram,
    subclass: &SubclassLabel,
    policy: &Policy,
    seed: RandomSeed,
) -> SolveOutcome {
    let config = SolveConfig {
        heuristic: Some(Heuristic::Policy {
            policy,
            subclass,
            seed,
        }),
        ..SolveConfig::default()
    };
    solve_with(p, &PartialAnswerSet::new(), &config).expect("unlimited run cannot be interrupted")
}

/// Selects an undecided extended literal by failed-literal lookahead.
///
/// Candidates are the undecided literals of not-yet-satisfied rules,
/// scored by the weaker polarity's consequence count. When one polarity
/// of a candidate refutes, the other polarity is returned immediately;
/// when both refute, either is returned and the caller's expand will
/// discover the dead end.
///
/// Panics when `b` decides every literal of the program.
pub fn choose_literal(p: &GroundProgram, b: &PartialAnswerSet) -> ExtendedLiteral {
    assert!(
        !crate::core::is_complete(p, b),
        "choose_literal called on a complete partial answer set"
    );
    let cp = CompiledProgram::new(p);
    let prop = Propagator::new(&cp);
    let mut scratch = Scratch::new(&cp);
    let mut assign = Assign::new(cp.lits.len());
    for e in b.iter() {
        if let Some(id) = cp.lit_id(&e.literal) {
            let val = if e.default_negated { Val::False } else { Val::True };
            prop.set(&mut assign, &mut scratch, id, val)
                .expect("b is consistent");
        }
    }
    let mut marks = vec![false; cp.lits.len()];
    lookahead_candidates(&cp, &assign, &mut marks);
    // probes run the full closure: `b` itself is not assumed closed
    let mut probe = |e: ELit| -> Option<u32> {
        let mut trial = assign.clone();
        if prop.set(&mut trial, &mut scratch, e.id, e.val()).is_err() {
            return None;
        }
        match prop.expand_full(&mut trial, &mut scratch) {
            Ok(()) => Some(trial.assigned_count() - assign.assigned_count()),
            Err(_) => None,
        }
    };
    let selection = {
        let mut best: Option<(u32, ELit)> = None;
        let mut outcome: Option<ELit> = None;
        for id in 0..cp.lits.len() as LitId {
            if !marks[id as usize] {
                continue;
            }
            let pos = ELit { id, neg: false };
            let neg = ELit { id, neg: true };
            match (probe(pos), probe(neg)) {
                (None, None) => {
                    outcome = Some(pos);
                    break;
                }
                (None, Some(_)) => {
                    outcome = Some(neg);
                    break;
                }
                (Some(_), None) => {
                    outcome = Some(pos);
                    break;
                }
                (Some(gain_pos), Some(gain_neg)) => {
                    let score = gain_pos.min(gain_neg);
                    if best.map_or(true, |(s, _)| score > s) {
                        let e = if gain_pos >= gain_neg { pos } else { neg };
                        best = Some((score, e));
                    }
                }
            }
        }
        outcome.or(best.map(|(_, e)| e)).unwrap_or(ELit {
            id: first_unset(&cp, &assign),
            neg: false,
        })
    };
    cp.ext(selection.id, selection.neg)
}

/// Guided literal selection: every untried undecided extended literal
/// is a candidate; the policy's best choice points win, with uniform
/// random tie-breaking; an empty best set falls back to
/// [`choose_literal`] (which ignores the tried set).
pub fn choose_literal_dspec(
    p: &GroundProgram,
    subclass: &SubclassLabel,
    b: &PartialAnswerSet,
    level: u32,
    tried: &TriedSet,
    policy: &Policy,
    rng: &mut ChaCha8Rng,
) -> ExtendedLiteral {
    let mut candidates = Vec::new();
    for lit in p.literals() {
        for neg in [false, true] {
            let e = ExtendedLiteral {
                literal: lit.clone(),
                default_negated: neg,
            };
            if b.contains(&e) || b.contains(&e.complement()) || tried.members.contains(&e) {
                continue;
            }
            candidates.push(e);
        }
    }
    let best = policy.best_choice_points(level, &candidates, subclass);
    if best.is_empty() {
        return choose_literal(p, b);
    }
    if best.len() == 1 {
        best.into_iter().next().unwrap()
    } else {
        let pick = rng.gen_range(0..best.len());
        best.into_iter().nth(pick).unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::textio::{parse_extended_literal_text, parse_program};

    fn ext(text: &str) -> ExtendedLiteral {
        parse_extended_literal_text(text).unwrap()
    }

    fn p1_n1() -> GroundProgram {
        parse_program(
            "p :- not q.\nq :- not p.\nr.\n:- p, r.\n:- q, not s.\nu(0) :- t(0), not v(0).\nv(0) :- t(0), not u(0).\nt(0).\n",
        )
        .unwrap()
    }

    fn even_cycle() -> GroundProgram {
        parse_program("p :- not q.\nq :- not p.\n").unwrap()
    }

    #[test]
    fn choose_literal_prefers_symmetric_atom_in_canonical_order() {
        let chosen = choose_literal(&even_cycle(), &PartialAnswerSet::new());
        assert_eq!(chosen, ext("p"));
    }

    #[test]
    fn choose_literal_detects_failed_literals_on_p1() {
        let chosen = choose_literal(&p1_n1(), &PartialAnswerSet::new());
        let name = chosen.literal.atom.predicate().to_string();
        assert!(name == "p" || name == "q", "chose {chosen}");
    }

    #[test]
    fn choose_literal_single_undecided_atom() {
        let p = parse_program("1 {a} 1.\n").unwrap();
        assert_eq!(choose_literal(&p, &PartialAnswerSet::new()), ext("a"));
    }

    #[test]
    fn baseline_finds_even_cycle_model_without_backtracking() {
        let outcome = solve_baseline(&even_cycle(), &PartialAnswerSet::new());
        assert!(outcome.found_model());
        let model = outcome.model.unwrap();
        assert_eq!(model.len(), 1);
        assert_eq!(model.iter().next().unwrap().to_string(), "p");
        assert_eq!(outcome.stats.decision_count, 1);
        assert_eq!(outcome.stats.backtrack_count, 0);
    }

    #[test]
    fn baseline_rejects_p1_without_branching() {
        let outcome = solve_baseline(&p1_n1(), &PartialAnswerSet::new());
        assert_eq!(outcome.status, SolveStatus::NoModel);
        // both polarities of p are failed literals: the lookahead
        // refutes the root outright
        assert_eq!(outcome.stats.decision_count, 0);
        assert_eq!(outcome.stats.backtrack_count, 0);
    }

    #[test]
    fn fact_only_program_needs_no_decisions() {
        let p = parse_program("r.\n").unwrap();
        let outcome = solve_baseline(&p, &PartialAnswerSet::new());
        assert!(outcome.found_model());
        assert_eq!(outcome.stats.decision_count, 0);
        assert!(outcome.decisions.unwrap().is_empty());
    }

    #[test]
    fn tracking_returns_surviving_choice_points() {
        let outcome = solve_tracking(&even_cycle(), &PartialAnswerSet::new());
        assert!(outcome.found_model());
        assert_eq!(outcome.decisions.unwrap().entries(), &[ext("p")]);
        let failed = solve_tracking(&p1_n1(), &PartialAnswerSet::new());
        assert!(failed.decisions.is_none());
    }

    #[test]
    fn replay_reproduces_and_redirects() {
        let p = even_cycle();
        let tracked = solve_tracking(&p, &PartialAnswerSet::new());
        let d = tracked.decisions.clone().unwrap();
        let replayed = replay(&p, &d).unwrap();
        assert_eq!(replayed.model, tracked.model);
        assert_eq!(replayed.stats.backtrack_count, 0);
        // forcing the opposite choice finds the other model
        let other = DecisionSequence::from_entries(vec![ext("q")]);
        let redirected = replay(&p, &other).unwrap();
        assert_eq!(
            redirected.model.unwrap().iter().next().unwrap().to_string(),
            "q"
        );
        // empty sequence on a fact-only program
        let facts = parse_program("r.\n").unwrap();
        let outcome = replay(&facts, &DecisionSequence::new()).unwrap();
        assert!(outcome.found_model());
    }

    #[test]
    fn replay_rejects_conflicting_sequences() {
        // after replaying p, propagation has already decided q; a
        // sequence then forcing not q signals corruption
        let p = parse_program("q :- p.\n{p}.\n{r}.\n").unwrap();
        let corrupt = DecisionSequence::from_entries(vec![ext("p"), ext("not q")]);
        match replay(&p, &corrupt) {
            Err(SolveError::ReplayConflict(e)) => assert_eq!(e, ext("not q")),
            other => panic!("expected replay conflict, got {other:?}"),
        }
        let foreign = DecisionSequence::from_entries(vec![ext("zzz")]);
        assert!(matches!(
            replay(&p, &foreign),
            Err(SolveError::ReplayForeign(_))
        ));
    }

    #[test]
    fn dspec_agrees_with_baseline_on_unsat() {
        let label = SubclassLabel::new("s").unwrap();
        let outcome = solve_dspec(&p1_n1(), &label, &Policy::new(1), RandomSeed(0));
        assert_eq!(outcome.status, SolveStatus::NoModel);
    }

    #[test]
    fn dspec_follows_policy_prescription() {
        use crate::policy::{learn_policy, TrainingRecord};
        let label = SubclassLabel::new("s").unwrap();
        let records = vec![TrainingRecord {
            subclass: label.clone(),
            sequence: Some(DecisionSequence::from_entries(vec![ext("not p")])),
            source: "t".into(),
            solve_stats: Default::default(),
        }];
        let policy = learn_policy(&records, 1);
        let outcome = solve_dspec(&even_cycle(), &label, &policy, RandomSeed(7));
        let model = outcome.model.unwrap();
        assert_eq!(model.iter().next().unwrap().to_string(), "q");
        assert_eq!(outcome.stats.policy_hits, 1);
    }

    #[test]
    fn choose_literal_dspec_examples() {
        use crate::policy::{learn_policy, TrainingRecord};
        let label = SubclassLabel::new("s").unwrap();
        let p = even_cycle();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let records = vec![
            TrainingRecord {
                subclass: label.clone(),
                sequence: Some(DecisionSequence::from_entries(vec![ext("not q")])),
                source: "a".into(),
                solve_stats: Default::default(),
            };
            3
        ];
        let policy = learn_policy(&records, 1);
        let empty_tried = TriedSet::default();
        let chosen = choose_literal_dspec(
            &p,
            &label,
            &PartialAnswerSet::new(),
            0,
            &empty_tried,
            &policy,
            &mut rng,
        );
        assert_eq!(chosen, ext("not q"));
        // empty policy falls back to the standard selection
        let fallback = choose_literal_dspec(
            &p,
            &label,
            &PartialAnswerSet::new(),
            0,
            &empty_tried,
            &Policy::new(1),
            &mut rng,
        );
        assert_eq!(fallback, choose_literal(&p, &PartialAnswerSet::new()));
        // prescribed literal already tried: fall back
        let mut tried = TriedSet::default();
        tried.members.insert(ext("not q"));
        let chosen = choose_literal_dspec(
            &p,
            &label,
            &PartialAnswerSet::new(),
            0,
            &tried,
            &policy,
            &mut rng,
        );
        assert_eq!(chosen, choose_literal(&p, &PartialAnswerSet::new()));
    }

    #[test]
    fn decision_limit_interrupts() {
        let p = parse_program("{a}.\n{b}.\n{c}.\n").unwrap();
        let config = SolveConfig {
            max_decisions: Some(1),
            ..SolveConfig::default()
        };
        match solve_with(&p, &PartialAnswerSet::new(), &config) {
            Err(SolveError::DecisionLimit { limit: 1, .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn models_pass_verification() {
        let programs = [
            "p :- not q.\nq :- not p.\n",
            "1 {a, b, c} 2.\n:- a, b.\n",
            "{x}.\ny :- x.\n:- not y.\n",
        ];
        for text in programs {
            let p = parse_program(text).unwrap();
            let outcome = solve_baseline(&p, &PartialAnswerSet::new());
            if let Some(model) = &outcome.model {
                assert!(crate::propagate::verify_stable(&p, model), "{text}");
            }
        }
    }
}
