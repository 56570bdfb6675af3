//! Deterministic consequence computation, stability checking, and a
//! brute-force stable-model oracle.
//!
//! `expand` computes the least fixpoint of a fixed set of inference
//! rules: forward firing, all-derivations-failed, backchaining on the
//! unique surviving derivation, backchaining on false heads, and
//! cardinality counting. Unfounded-set pruning is deliberately absent;
//! soundness is restored by the stability check at complete leaves.
//!
//! The fixpoint is computed with work queues keyed by rules and atoms;
//! the rule/atom indexes are built once per program and shared by every
//! probe the solver makes.

use std::collections::{BTreeSet, HashMap, VecDeque};

use thiserror::Error;

use crate::core::{
    BodyElement, ExtendedLiteral, GroundProgram, Literal, PartialAnswerSet, RuleHead,
};

pub(crate) type LitId = u32;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Val {
    Unset,
    True,
    False,
}

/// Truth state of every program literal; the solver-internal mirror of
/// a partial answer set.
#[derive(Debug, Clone)]
pub(crate) struct Assign {
    vals: Vec<Val>,
    assigned: u32,
}

impl Assign {
    pub(crate) fn new(n: usize) -> Assign {
        Assign {
            vals: vec![Val::Unset; n],
            assigned: 0,
        }
    }

    pub(crate) fn get(&self, id: LitId) -> Val {
        self.vals[id as usize]
    }

    pub(crate) fn assigned_count(&self) -> u32 {
        self.assigned
    }

    pub(crate) fn is_complete(&self) -> bool {
        self.assigned as usize == self.vals.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Conflict;

#[derive(Debug, Clone)]
pub(crate) enum CElem {
    Ext(LitId, bool), // bool: default negated
    Card { lower: u32, elems: Vec<(LitId, bool)> },
}

#[derive(Debug, Clone)]
pub(crate) enum CHead {
    Lit(LitId),
    Constraint,
    Choice {
        lower: u32,
        upper: Option<u32>,
        elems: Vec<LitId>,
    },
}

#[derive(Debug, Clone)]
pub(crate) struct CRule {
    pub(crate) head: CHead,
    pub(crate) body: Vec<CElem>,
}

/// Interned program: literals in canonical order plus rule/atom indexes.
pub(crate) struct CompiledProgram {
    pub(crate) lits: Vec<Literal>,
    ids: HashMap<Literal, LitId>,
    /// Literal ids in order of first occurrence in the rule list.
    pub(crate) first_occurrence: Vec<LitId>,
    pub(crate) rules: Vec<CRule>,
    /// Rules that can derive a literal: normal head or choice element.
    pub(crate) derivers: Vec<Vec<u32>>,
    /// Rules mentioning a literal anywhere.
    pub(crate) watchers: Vec<Vec<u32>>,
    /// Id of the strong complement, when it occurs in the program.
    pub(crate) strong_pair: Vec<Option<LitId>>,
}

impl CompiledProgram {
    pub(crate) fn new(p: &GroundProgram) -> CompiledProgram {
        let lits: Vec<Literal> = p.literals().iter().cloned().collect();
        let ids: HashMap<Literal, LitId> = lits
            .iter()
            .enumerate()
            .map(|(i, l)| (l.clone(), i as LitId))
            .collect();
        let id_of = |l: &Literal| ids[l];

        let mut first_occurrence = Vec::with_capacity(lits.len());
        let mut seen = vec![false; lits.len()];
        for rule in p.rules() {
            for lit in rule.literals() {
                let id = id_of(lit);
                if !seen[id as usize] {
                    seen[id as usize] = true;
                    first_occurrence.push(id);
                }
            }
        }

        let compile_elem = |b: &BodyElement| match b {
            BodyElement::Literal(e) => CElem::Ext(id_of(&e.literal), e.default_negated),
            BodyElement::Cardinality(c) => CElem::Card {
                lower: c.lower,
                elems: c
                    .elements
                    .iter()
                    .map(|e| (id_of(&e.literal), e.default_negated))
                    .collect(),
            },
        };
        let rules: Vec<CRule> = p
            .rules()
            .iter()
            .map(|r| CRule {
                head: match &r.head {
                    RuleHead::Literal(l) => CHead::Lit(id_of(l)),
                    RuleHead::Constraint => CHead::Constraint,
                    RuleHead::Choice(c) => CHead::Choice {
                        lower: c.lower,
                        upper: c.upper,
                        elems: c.elements.iter().map(id_of).collect(),
                    },
                },
                body: r.body.iter().map(compile_elem).collect(),
            })
            .collect();

        let mut derivers = vec![Vec::new(); lits.len()];
        let mut watchers = vec![Vec::new(); lits.len()];
        for (ri, rule) in rules.iter().enumerate() {
            let ri = ri as u32;
            let mut mention = |id: LitId| {
                let w: &mut Vec<u32> = &mut watchers[id as usize];
                if w.last() != Some(&ri) {
                    w.push(ri);
                }
            };
            match &rule.head {
                CHead::Lit(h) => {
                    derivers[*h as usize].push(ri);
                    mention(*h);
                }
                CHead::Constraint => {}
                CHead::Choice { elems, .. } => {
                    for e in elems {
                        derivers[*e as usize].push(ri);
                        mention(*e);
                    }
                }
            }
            for elem in &rule.body {
                match elem {
                    CElem::Ext(x, _) => mention(*x),
                    CElem::Card { elems, .. } => {
                        for (x, _) in elems {
                            mention(*x);
                        }
                    }
                }
            }
        }

        let strong_pair = lits
            .iter()
            .map(|l| ids.get(&l.strong_complement()).copied())
            .collect();

        CompiledProgram {
            lits,
            ids,
            first_occurrence,
            rules,
            derivers,
            watchers,
            strong_pair,
        }
    }

    pub(crate) fn lit_id(&self, l: &Literal) -> Option<LitId> {
        self.ids.get(l).copied()
    }

    pub(crate) fn ext(&self, id: LitId, default_negated: bool) -> ExtendedLiteral {
        ExtendedLiteral {
            literal: self.lits[id as usize].clone(),
            default_negated,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum ElemStatus {
    Sat,
    Fals,
    Pending,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct BodyStatus {
    all_sat: bool,
    any_fals: bool,
    pending: u32,
    last_pending: u32, // body index, valid when pending > 0
}

/// Reusable work queues; one per solver run, shared across probes.
pub(crate) struct Scratch {
    rule_dirty: Vec<bool>,
    rule_queue: VecDeque<u32>,
    lit_dirty: Vec<bool>,
    lit_queue: VecDeque<LitId>,
}

impl Scratch {
    pub(crate) fn new(cp: &CompiledProgram) -> Scratch {
        Scratch {
            rule_dirty: vec![false; cp.rules.len()],
            rule_queue: VecDeque::new(),
            lit_dirty: vec![false; cp.lits.len()],
            lit_queue: VecDeque::new(),
        }
    }

    fn clear(&mut self) {
        for r in self.rule_queue.drain(..) {
            self.rule_dirty[r as usize] = false;
        }
        for l in self.lit_queue.drain(..) {
            self.lit_dirty[l as usize] = false;
        }
    }

    fn touch_rule(&mut self, r: u32) {
        if !self.rule_dirty[r as usize] {
            self.rule_dirty[r as usize] = true;
            self.rule_queue.push_back(r);
        }
    }

    fn touch_lit(&mut self, l: LitId) {
        if !self.lit_dirty[l as usize] {
            self.lit_dirty[l as usize] = true;
            self.lit_queue.push_back(l);
        }
    }
}

pub(crate) struct Propagator<'a> {
    pub(crate) cp: &'a CompiledProgram,
}

impl<'a> Propagator<'a> {
    pub(crate) fn new(cp: &'a CompiledProgram) -> Propagator<'a> {
        Propagator { cp }
    }

    fn elem_status(&self, assign: &Assign, elem: &CElem) -> ElemStatus {
        match elem {
            CElem::Ext(x, neg) => {
                let want = if *neg { Val::False } else { Val::True };
                match assign.get(*x) {
                    Val::Unset => ElemStatus::Pending,
                    v if v == want => ElemStatus::Sat,
                    _ => ElemStatus::Fals,
                }
            }
            CElem::Card { lower, elems } => {
                let (mut sat, mut fals) = (0u32, 0u32);
                for (x, neg) in elems {
                    let want = if *neg { Val::False } else { Val::True };
                    match assign.get(*x) {
                        Val::Unset => {}
                        v if v == want => sat += 1,
                        _ => fals += 1,
                    }
                }
                if sat >= *lower {
                    ElemStatus::Sat
                } else if elems.len() as u32 - fals < *lower {
                    ElemStatus::Fals
                } else {
                    ElemStatus::Pending
                }
            }
        }
    }

    fn body_status(&self, assign: &Assign, body: &[CElem]) -> BodyStatus {
        let mut status = BodyStatus {
            all_sat: true,
            any_fals: false,
            pending: 0,
            last_pending: 0,
        };
        for (i, elem) in body.iter().enumerate() {
            match self.elem_status(assign, elem) {
                ElemStatus::Sat => {}
                ElemStatus::Fals => {
                    status.all_sat = false;
                    status.any_fals = true;
                }
                ElemStatus::Pending => {
                    status.all_sat = false;
                    status.pending += 1;
                    status.last_pending = i as u32;
                }
            }
        }
        status
    }

    pub(crate) fn set(
        &self,
        assign: &mut Assign,
        scratch: &mut Scratch,
        id: LitId,
        val: Val,
    ) -> Result<(), Conflict> {
        debug_assert!(val != Val::Unset);
        match assign.get(id) {
            v if v == val => return Ok(()),
            Val::Unset => {}
            _ => return Err(Conflict),
        }
        if val == Val::True {
            if let Some(pair) = self.cp.strong_pair[id as usize] {
                if assign.get(pair) == Val::True {
                    return Err(Conflict);
                }
            }
        }
        assign.vals[id as usize] = val;
        assign.assigned += 1;
        for &r in &self.cp.watchers[id as usize] {
            scratch.touch_rule(r);
        }
        scratch.touch_lit(id);
        Ok(())
    }

    /// Makes the element satisfiable no further: asserts its complement.
    fn falsify_elem(
        &self,
        assign: &mut Assign,
        scratch: &mut Scratch,
        elem: &CElem,
    ) -> Result<(), Conflict> {
        match elem {
            CElem::Ext(x, neg) => self.set(assign, scratch, *x, if *neg { Val::True } else { Val::False }),
            CElem::Card { lower, elems } => {
                // keep the satisfied count below the bound: once lower-1
                // are satisfied, every undecided element must fail
                let mut sat = 0u32;
                for (x, neg) in elems {
                    let want = if *neg { Val::False } else { Val::True };
                    if assign.get(*x) == want {
                        sat += 1;
                    }
                }
                if sat >= *lower {
                    return Err(Conflict);
                }
                if sat + 1 == *lower {
                    for (x, neg) in elems {
                        if assign.get(*x) == Val::Unset {
                            self.set(assign, scratch, *x, if *neg { Val::True } else { Val::False })?;
                        }
                    }
                }
                Ok(())
            }
        }
    }

    /// Requires the element to hold: asserts forced members.
    fn require_elem(
        &self,
        assign: &mut Assign,
        scratch: &mut Scratch,
        elem: &CElem,
    ) -> Result<(), Conflict> {
        match elem {
            CElem::Ext(x, neg) => self.set(assign, scratch, *x, if *neg { Val::False } else { Val::True }),
            CElem::Card { lower, elems } => {
                let (mut sat, mut pending) = (0u32, 0u32);
                for (x, neg) in elems {
                    let want = if *neg { Val::False } else { Val::True };
                    match assign.get(*x) {
                        Val::Unset => pending += 1,
                        v if v == want => sat += 1,
                        _ => {}
                    }
                }
                if sat >= *lower {
                    return Ok(());
                }
                if sat + pending < *lower {
                    return Err(Conflict);
                }
                if sat + pending == *lower {
                    for (x, neg) in elems {
                        if assign.get(*x) == Val::Unset {
                            self.set(assign, scratch, *x, if *neg { Val::False } else { Val::True })?;
                        }
                    }
                }
                Ok(())
            }
        }
    }

    fn process_rule(
        &self,
        assign: &mut Assign,
        scratch: &mut Scratch,
        ri: u32,
    ) -> Result<(), Conflict> {
        let rule = &self.cp.rules[ri as usize];
        let status = self.body_status(assign, &rule.body);
        match &rule.head {
            CHead::Constraint => {
                if status.all_sat {
                    return Err(Conflict);
                }
            }
            CHead::Lit(h) => {
                if status.all_sat {
                    self.set(assign, scratch, *h, Val::True)?;
                } else if assign.get(*h) == Val::False && !status.any_fals && status.pending == 1 {
                    // the body must not end up satisfied; one element left
                    let elem = &rule.body[status.last_pending as usize];
                    self.falsify_elem(assign, scratch, elem)?;
                }
                scratch.touch_lit(*h);
            }
            CHead::Choice {
                lower,
                upper,
                elems,
            } => {
                if status.all_sat {
                    let (mut t, mut u) = (0u32, 0u32);
                    for &e in elems {
                        match assign.get(e) {
                            Val::True => t += 1,
                            Val::Unset => u += 1,
                            Val::False => {}
                        }
                    }
                    if let Some(n) = upper {
                        if t > *n {
                            return Err(Conflict);
                        }
                        if t == *n && u > 0 {
                            for &e in elems {
                                if assign.get(e) == Val::Unset {
                                    self.set(assign, scratch, e, Val::False)?;
                                }
                            }
                        }
                    }
                    if t + u < *lower {
                        return Err(Conflict);
                    }
                    if t + u == *lower && u > 0 {
                        for &e in elems {
                            if assign.get(e) == Val::Unset {
                                self.set(assign, scratch, e, Val::True)?;
                            }
                        }
                    }
                }
                for &e in elems {
                    scratch.touch_lit(e);
                }
            }
        }
        Ok(())
    }

    fn process_lit(
        &self,
        assign: &mut Assign,
        scratch: &mut Scratch,
        id: LitId,
    ) -> Result<(), Conflict> {
        if assign.get(id) == Val::False {
            return Ok(());
        }
        let mut alive = 0u32;
        let mut last = 0u32;
        for &ri in &self.cp.derivers[id as usize] {
            let rule = &self.cp.rules[ri as usize];
            if !self.body_status(assign, &rule.body).any_fals {
                alive += 1;
                last = ri;
                if alive > 1 {
                    break;
                }
            }
        }
        match (alive, assign.get(id)) {
            (0, Val::True) => return Err(Conflict),
            (0, Val::Unset) => self.set(assign, scratch, id, Val::False)?,
            (1, Val::True) => {
                // the single surviving derivation must fire
                let body = &self.cp.rules[last as usize].body;
                for elem in body {
                    self.require_elem(assign, scratch, elem)?;
                }
            }
            _ => {}
        }
        Ok(())
    }

    /// Runs the closure to exhaustion starting from the queued work.
    fn run(&self, assign: &mut Assign, scratch: &mut Scratch) -> Result<(), Conflict> {
        loop {
            if let Some(ri) = scratch.rule_queue.pop_front() {
                scratch.rule_dirty[ri as usize] = false;
                self.process_rule(assign, scratch, ri)?;
                continue;
            }
            if let Some(id) = scratch.lit_queue.pop_front() {
                scratch.lit_dirty[id as usize] = false;
                self.process_lit(assign, scratch, id)?;
                continue;
            }
            return Ok(());
        }
    }

    /// Full fixpoint from whatever `assign` already holds.
    pub(crate) fn expand_full(
        &self,
        assign: &mut Assign,
        scratch: &mut Scratch,
    ) -> Result<(), Conflict> {
        scratch.clear();
        for r in 0..self.cp.rules.len() {
            scratch.touch_rule(r as u32);
        }
        for l in 0..self.cp.lits.len() {
            scratch.touch_lit(l as LitId);
        }
        let result = self.run(assign, scratch);
        if result.is_err() {
            scratch.clear();
        }
        result
    }

    /// Incremental fixpoint after asserting one extended literal on an
    /// already-closed assignment.
    pub(crate) fn expand_after(
        &self,
        assign: &mut Assign,
        scratch: &mut Scratch,
        id: LitId,
        val: Val,
    ) -> Result<(), Conflict> {
        scratch.clear();
        self.set(assign, scratch, id, val)?;
        let result = self.run(assign, scratch);
        if result.is_err() {
            scratch.clear();
        }
        result
    }
}

// ---------------------------------------------------------------------------
// public expand
// ---------------------------------------------------------------------------

/// Result of `expand`: either the closed consistent superset of the
/// input, or the inconsistency marker.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExpandResult {
    Consistent(PartialAnswerSet),
    Inconsistent,
}

impl ExpandResult {
    pub fn is_consistent(&self) -> bool {
        matches!(self, ExpandResult::Consistent(_))
    }

    pub fn set(&self) -> Option<&PartialAnswerSet> {
        match self {
            ExpandResult::Consistent(s) => Some(s),
            ExpandResult::Inconsistent => None,
        }
    }
}

pub(crate) fn assign_to_set(
    cp: &CompiledProgram,
    assign: &Assign,
    extras: &[ExtendedLiteral],
) -> PartialAnswerSet {
    let mut out = PartialAnswerSet::new();
    for (i, lit) in cp.lits.iter().enumerate() {
        let e = match assign.get(i as LitId) {
            Val::Unset => continue,
            Val::True => ExtendedLiteral::holds(lit.clone()),
            Val::False => ExtendedLiteral::not(lit.clone()),
        };
        out.insert(e).expect("closed assignment is consistent");
    }
    for e in extras {
        out.insert(e.clone()).expect("extras were checked consistent");
    }
    out
}

/// Adds to `a` every extended literal forced by `p`, or reports the
/// inconsistency. Input literals outside the program's signature are
/// carried through untouched.
pub fn expand(p: &GroundProgram, a: &PartialAnswerSet) -> ExpandResult {
    let cp = CompiledProgram::new(p);
    let mut assign = Assign::new(cp.lits.len());
    let mut scratch = Scratch::new(&cp);
    let prop = Propagator::new(&cp);
    let mut extras: Vec<ExtendedLiteral> = Vec::new();
    for e in a.iter() {
        match cp.lit_id(&e.literal) {
            Some(id) => {
                let val = if e.default_negated { Val::False } else { Val::True };
                if prop.set(&mut assign, &mut scratch, id, val).is_err() {
                    return ExpandResult::Inconsistent;
                }
            }
            None => extras.push(e.clone()),
        }
    }
    if prop.expand_full(&mut assign, &mut scratch).is_err() {
        return ExpandResult::Inconsistent;
    }
    // an out-of-signature strong literal can still clash with a derived one
    for e in &extras {
        if !e.default_negated {
            if let Some(pair) = cp.lit_id(&e.literal.strong_complement()) {
                if assign.get(pair) == Val::True {
                    return ExpandResult::Inconsistent;
                }
            }
        }
    }
    ExpandResult::Consistent(assign_to_set(&cp, &assign, &extras))
}

// ---------------------------------------------------------------------------
// stability
// ---------------------------------------------------------------------------

fn model_sat_ext(truth: &[bool], x: LitId, neg: bool) -> bool {
    truth[x as usize] != neg
}

fn model_sat_elem(truth: &[bool], elem: &CElem) -> bool {
    match elem {
        CElem::Ext(x, neg) => model_sat_ext(truth, *x, *neg),
        CElem::Card { lower, elems } => {
            elems
                .iter()
                .filter(|(x, neg)| model_sat_ext(truth, *x, *neg))
                .count() as u32
                >= *lower
        }
    }
}

fn model_sat_body(truth: &[bool], body: &[CElem]) -> bool {
    body.iter().all(|e| model_sat_elem(truth, e))
}

/// Stability of a complete candidate, on the compiled form.
pub(crate) fn verify_stable_compiled(cp: &CompiledProgram, truth: &[bool]) -> bool {
    debug_assert_eq!(truth.len(), cp.lits.len());
    // candidate consistency: a literal and its strong complement
    for (i, pair) in cp.strong_pair.iter().enumerate() {
        if truth[i] {
            if let Some(p) = pair {
                if truth[*p as usize] {
                    return false;
                }
            }
        }
    }
    // (i) constraints; (ii) choice bounds
    for rule in &cp.rules {
        match &rule.head {
            CHead::Constraint => {
                if model_sat_body(truth, &rule.body) {
                    return false;
                }
            }
            CHead::Choice {
                lower,
                upper,
                elems,
            } => {
                if model_sat_body(truth, &rule.body) {
                    let t = elems.iter().filter(|e| truth[**e as usize]).count() as u32;
                    if t < *lower || upper.is_some_and(|n| t > n) {
                        return false;
                    }
                }
            }
            CHead::Lit(_) => {}
        }
    }
    // (iii) least model of the reduct equals the candidate
    let mut lm = vec![false; truth.len()];
    for rule in &cp.rules {
        if let CHead::Choice { elems, .. } = &rule.head {
            if model_sat_body(truth, &rule.body) {
                for &e in elems {
                    if truth[e as usize] {
                        lm[e as usize] = true;
                    }
                }
            }
        }
    }
    loop {
        let mut changed = false;
        'rules: for rule in &cp.rules {
            let CHead::Lit(h) = &rule.head else { continue };
            if lm[*h as usize] {
                continue;
            }
            for elem in &rule.body {
                match elem {
                    CElem::Ext(x, true) => {
                        if truth[*x as usize] {
                            continue 'rules; // rule deleted by the reduct
                        }
                    }
                    CElem::Ext(x, false) => {
                        if !lm[*x as usize] {
                            continue 'rules;
                        }
                    }
                    CElem::Card { lower, elems } => {
                        // negated members are fixed by the candidate,
                        // positive ones must be derived
                        let credit = elems
                            .iter()
                            .filter(|(x, neg)| *neg && !truth[*x as usize])
                            .count() as u32;
                        let derived = elems
                            .iter()
                            .filter(|(x, neg)| !neg && lm[*x as usize])
                            .count() as u32;
                        if derived + credit < *lower {
                            continue 'rules;
                        }
                        // a cardinality element falsified by the candidate
                        // deletes the rule
                        if !model_sat_elem(truth, elem) {
                            continue 'rules;
                        }
                    }
                }
            }
            lm[*h as usize] = true;
            changed = true;
        }
        if !changed {
            break;
        }
    }
    lm == truth
}

/// True iff `candidate` is a stable model of `p`: constraints unfired,
/// choice bounds respected, and the candidate equals the least model of
/// its reduct with chosen atoms as facts.
pub fn verify_stable(p: &GroundProgram, candidate: &BTreeSet<Literal>) -> bool {
    let cp = CompiledProgram::new(p);
    let mut truth = vec![false; cp.lits.len()];
    for lit in candidate {
        match cp.lit_id(lit) {
            Some(id) => truth[id as usize] = true,
            // a candidate literal foreign to the program can never be
            // derived, so the candidate cannot be the reduct's least model
            None => return false,
        }
    }
    verify_stable_compiled(&cp, &truth)
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("program has {count} distinct literals, above the enumeration limit {limit}")]
pub struct EnumerationLimit {
    pub count: usize,
    pub limit: usize,
}

pub const DEFAULT_ATOM_LIMIT: usize = 16;

/// All stable models, by exhaustive subset enumeration over the
/// program's distinct literals filtered through `verify_stable`.
pub fn enumerate_stable_models(
    p: &GroundProgram,
    atom_limit: usize,
) -> Result<BTreeSet<BTreeSet<Literal>>, EnumerationLimit> {
    let cp = CompiledProgram::new(p);
    let n = cp.lits.len();
    if n > atom_limit {
        return Err(EnumerationLimit {
            count: n,
            limit: atom_limit,
        });
    }
    let mut models = BTreeSet::new();
    let mut truth = vec![false; n];
    for mask in 0u64..(1u64 << n) {
        for (i, t) in truth.iter_mut().enumerate() {
            *t = mask & (1 << i) != 0;
        }
        if verify_stable_compiled(&cp, &truth) {
            let model: BTreeSet<Literal> = truth
                .iter()
                .enumerate()
                .filter(|(_, t)| **t)
                .map(|(i, _)| cp.lits[i].clone())
                .collect();
            models.insert(model);
        }
    }
    Ok(models)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::textio::parse_program;

    fn set(items: &[&str]) -> PartialAnswerSet {
        PartialAnswerSet::from_literals(items.iter().map(|t| {
            crate::textio::parse_extended_literal_text(t).unwrap()
        }))
        .unwrap()
    }

    fn p1_n1() -> GroundProgram {
        parse_program(
            "p :- not q.\nq :- not p.\nr.\n:- p, r.\n:- q, not s.\nu(0) :- t(0), not v(0).\nv(0) :- t(0), not u(0).\nt(0).\n",
        )
        .unwrap()
    }

    #[test]
    fn expand_detects_inconsistency_from_not_p() {
        // not p forces q, and the constraint on q fires because s has no rule
        assert_eq!(expand(&p1_n1(), &set(&["not p"])), ExpandResult::Inconsistent);
    }

    #[test]
    fn expand_detects_inconsistency_from_p() {
        // r is a fact, so `:- p, r.` fires
        assert_eq!(expand(&p1_n1(), &set(&["p"])), ExpandResult::Inconsistent);
    }

    #[test]
    fn expand_closes_consistently_around_u0() {
        let result = expand(&p1_n1(), &set(&["u(0)"]));
        let ExpandResult::Consistent(b) = result else {
            panic!("expected consistent result");
        };
        for needed in ["u(0)", "not v(0)", "r", "t(0)"] {
            let e = crate::textio::parse_extended_literal_text(needed).unwrap();
            assert!(b.contains(&e), "missing {needed} in {b}");
        }
    }

    #[test]
    fn expand_empty_program() {
        let result = expand(&GroundProgram::empty(), &PartialAnswerSet::new());
        assert_eq!(result, ExpandResult::Consistent(PartialAnswerSet::new()));
    }

    #[test]
    fn expand_is_inflationary_and_idempotent() {
        let p = p1_n1();
        let a = set(&["u(0)"]);
        let ExpandResult::Consistent(b) = expand(&p, &a) else {
            panic!()
        };
        for e in a.iter() {
            assert!(b.contains(e));
        }
        let ExpandResult::Consistent(b2) = expand(&p, &b) else {
            panic!()
        };
        assert_eq!(b, b2);
    }

    #[test]
    fn verify_stable_even_cycle() {
        let p = parse_program("p :- not q.\nq :- not p.\n").unwrap();
        let lit = |s: &str| crate::core::Literal::positive(crate::core::Atom::named(s));
        let just_p: BTreeSet<_> = [lit("p")].into_iter().collect();
        let both: BTreeSet<_> = [lit("p"), lit("q")].into_iter().collect();
        assert!(verify_stable(&p, &just_p));
        assert!(!verify_stable(&p, &both));
    }

    #[test]
    fn p1_has_no_stable_model() {
        let models = enumerate_stable_models(&p1_n1(), DEFAULT_ATOM_LIMIT).unwrap();
        assert!(models.is_empty());
    }

    #[test]
    fn enumerate_even_cycle_and_empty() {
        let p = parse_program("p :- not q.\nq :- not p.\n").unwrap();
        let models = enumerate_stable_models(&p, DEFAULT_ATOM_LIMIT).unwrap();
        assert_eq!(models.len(), 2);
        let empty = enumerate_stable_models(&GroundProgram::empty(), DEFAULT_ATOM_LIMIT).unwrap();
        assert_eq!(empty.len(), 1);
        assert!(empty.iter().next().unwrap().is_empty());
    }

    #[test]
    fn enumeration_limit_enforced() {
        let p = parse_program("a(1).\na(2).\na(3).\n").unwrap();
        assert!(enumerate_stable_models(&p, 2).is_err());
    }

    #[test]
    fn choice_rule_bounds_propagate() {
        // 1 {a} 1. forces a without any choice point
        let p = parse_program("1 {a} 1.\n").unwrap();
        let ExpandResult::Consistent(b) = expand(&p, &PartialAnswerSet::new()) else {
            panic!()
        };
        assert!(b.contains(&crate::textio::parse_extended_literal_text("a").unwrap()));
        // upper bound saturation forces the rest false
        let p = parse_program("0 {a, b} 1.\n").unwrap();
        let ExpandResult::Consistent(b) = expand(&p, &set(&["a"])) else {
            panic!()
        };
        assert!(b.contains(&crate::textio::parse_extended_literal_text("not b").unwrap()));
    }

    #[test]
    fn strong_negation_conflict_detected() {
        let p = parse_program("a.\n-a :- b.\n").unwrap();
        assert_eq!(expand(&p, &set(&["b"])), ExpandResult::Inconsistent);
        let ExpandResult::Consistent(b) = expand(&p, &PartialAnswerSet::new()) else {
            panic!()
        };
        // b has no rule, so it is false and -a stays false
        assert!(b.contains(&crate::textio::parse_extended_literal_text("not b").unwrap()));
        assert!(b.contains(&crate::textio::parse_extended_literal_text("not -a").unwrap()));
    }
}
