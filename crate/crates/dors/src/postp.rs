//! The grounding pipeline that keeps learned policies stable across
//! grounder runs: rule-name augmentation, a mock grounder reproducing
//! the bounded-choice translation with run-varying auxiliary atoms, and
//! the three-pass post-processing that rebinds every auxiliary atom to
//! a deterministic indexed name.
//!
//! Auxiliary atoms are spelled `__aux_<n>` with ids drawn from a seeded
//! generator, deliberately reproducing a grounder's freedom to pick
//! different identifiers on every run. Name atoms are spelled
//! `__name(<rule>, args...)` before indexing and `__name(<i>, <rule>,
//! args...)` after. Both spellings are reserved: user source enters the
//! pipeline through [`augment`], which rejects them.

use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::core::{
    Atom, BodyElement, CardinalityTest, ChoiceHead, ExtendedLiteral, GroundProgram, Literal, Rule,
    RuleHead, Term, NAME_PREDICATE,
};
use crate::search::RandomSeed;

/// A rule name with the argument terms that distinguish instances of
/// one rule family.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NameSpec {
    pub rule_name: String,
    pub args: Vec<Term>,
}

impl NameSpec {
    pub fn new(rule_name: impl Into<String>) -> NameSpec {
        NameSpec {
            rule_name: rule_name.into(),
            args: Vec::new(),
        }
    }

    pub fn with_args(rule_name: impl Into<String>, args: Vec<Term>) -> NameSpec {
        NameSpec {
            rule_name: rule_name.into(),
            args,
        }
    }

    /// The unindexed `__name(rule, args...)` atom.
    pub fn atom(&self) -> Atom {
        let mut args = Vec::with_capacity(self.args.len() + 1);
        args.push(Term::Sym(self.rule_name.clone()));
        args.extend(self.args.iter().cloned());
        Atom::new(NAME_PREDICATE, args)
    }
}

/// Ordered association of auxiliary atoms to their indexed names.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct NameAssociation {
    pairs: Vec<(Atom, Atom)>,
}

impl NameAssociation {
    pub fn pairs(&self) -> &[(Atom, Atom)] {
        &self.pairs
    }

    /// The indexed name atoms in binding order. This projection drops
    /// the run-varying auxiliary ids, so it is identical across runs
    /// with different seeds.
    pub fn projected_names(&self) -> Vec<Atom> {
        self.pairs.iter().map(|(_, name)| name.clone()).collect()
    }

    pub fn lookup(&self, aux: &Atom) -> Option<&Atom> {
        self.pairs.iter().find(|(a, _)| a == aux).map(|(_, n)| n)
    }
}

#[derive(Debug, Clone)]
pub struct PostpOutcome {
    pub program: GroundProgram,
    pub assoc: NameAssociation,
    /// Unusual-but-legal situations worth surfacing, one line each.
    pub diagnostics: Vec<String>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PostpError {
    #[error("reserved atom {0} already occurs in the source program")]
    ReservedAtom(String),
    #[error("no rule at position {0}")]
    BadRulePosition(usize),
    #[error("rule at position {0} is not a bounded choice rule")]
    NotABoundedChoice(usize),
    #[error("rule name {0} is attached to more than one rule")]
    DuplicateRuleName(String),
    #[error("unnamed atoms with no co-occurring name atom: {}", .0.join(", "))]
    UnresolvedAux(Vec<String>),
    #[error("name atom {0} survives outside a definition rule head")]
    RemainingNameAtom(String),
}

/// True for an unindexed `__name(rule, args...)` atom: the first
/// argument is not yet an integer index.
fn is_unindexed_name(atom: &Atom) -> bool {
    atom.is_name_atom() && !matches!(atom.args().first(), Some(Term::Int(_)))
}

fn indexed_name(index: u32, unindexed: &Atom) -> Atom {
    let mut args = Vec::with_capacity(unindexed.args().len() + 1);
    args.push(Term::Int(i64::from(index)));
    args.extend(unindexed.args().iter().cloned());
    Atom::new(NAME_PREDICATE, args)
}

/// Attaches a `__name(rule, args...)` body atom to each named rule and
/// appends one bound-free choice rule defining each name.
///
/// Only bounded choice rules accept names: they are the rules whose
/// translation introduces unnamed atoms. The input must be user source,
/// free of reserved spellings.
pub fn augment(
    p: &GroundProgram,
    names: &BTreeMap<usize, NameSpec>,
) -> Result<GroundProgram, PostpError> {
    for atom in p.signature() {
        if atom.is_unnamed() || atom.is_name_atom() {
            return Err(PostpError::ReservedAtom(atom.to_string()));
        }
    }
    let mut seen: BTreeSet<Atom> = BTreeSet::new();
    let mut rules: Vec<Rule> = p.rules().to_vec();
    let mut definitions: Vec<Rule> = Vec::new();
    for (&pos, spec) in names {
        let rule = rules.get_mut(pos).ok_or(PostpError::BadRulePosition(pos))?;
        match &rule.head {
            RuleHead::Choice(c) if c.lower > 0 || c.upper.is_some() => {}
            _ => return Err(PostpError::NotABoundedChoice(pos)),
        }
        let name_atom = spec.atom();
        if !seen.insert(name_atom.clone()) {
            return Err(PostpError::DuplicateRuleName(name_atom.to_string()));
        }
        rule.body
            .push(BodyElement::pos(Literal::positive(name_atom.clone())));
        definitions.push(Rule::choice(
            0,
            None,
            vec![Literal::positive(name_atom)],
            Vec::new(),
        ));
    }
    rules.extend(definitions);
    Ok(GroundProgram::new(rules, p.subclass().cloned()))
}

/// Replaces every bounded choice rule by the grounder translation: an
/// unbounded choice plus auxiliary-guarded constraints enforcing the
/// bounds. Auxiliary ids are drawn from the seeded generator, so
/// different seeds yield different ids while the rule order and the
/// relative order of the auxiliaries stay fixed.
pub fn mock_ground(p: &GroundProgram, aux_seed: RandomSeed) -> GroundProgram {
    let mut used: BTreeSet<i64> = BTreeSet::new();
    for atom in p.signature() {
        if let Some(rest) = atom.predicate().strip_prefix(crate::core::AUX_PREFIX) {
            if let Ok(n) = rest.parse::<i64>() {
                used.insert(n);
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(aux_seed.0);
    let mut fresh = move || loop {
        let id = rng.gen_range(1..=999_983i64);
        if used.insert(id) {
            return Atom::named(format!("{}{}", crate::core::AUX_PREFIX, id));
        }
    };
    let mut rules: Vec<Rule> = Vec::new();
    for rule in p.rules() {
        let RuleHead::Choice(ChoiceHead {
            lower,
            upper,
            elements,
        }) = &rule.head
        else {
            rules.push(rule.clone());
            continue;
        };
        let k = elements.len() as u32;
        let lower_active = *lower > 0;
        let upper_active = upper.is_some_and(|n| n < k);
        if !lower_active && !upper_active {
            rules.push(rule.clone());
            continue;
        }
        rules.push(Rule::choice(0, None, elements.clone(), rule.body.clone()));
        if lower_active {
            if *lower > k {
                // the bound can never be met: the body itself is forbidden
                rules.push(Rule::constraint(rule.body.clone()));
            } else {
                let aux = fresh();
                let mut guard = vec![BodyElement::pos(Literal::positive(aux.clone()))];
                guard.extend(rule.body.iter().cloned());
                rules.push(Rule::constraint(guard));
                rules.push(Rule::normal(
                    Literal::positive(aux),
                    vec![BodyElement::Cardinality(CardinalityTest {
                        lower: k - *lower + 1,
                        elements: elements
                            .iter()
                            .map(|l| ExtendedLiteral::not(l.clone()))
                            .collect(),
                    })],
                ));
            }
        }
        if let Some(n) = upper {
            if upper_active {
                let aux = fresh();
                let mut guard = vec![BodyElement::pos(Literal::positive(aux.clone()))];
                guard.extend(rule.body.iter().cloned());
                rules.push(Rule::constraint(guard));
                rules.push(Rule::normal(
                    Literal::positive(aux),
                    vec![BodyElement::Cardinality(CardinalityTest {
                        lower: n + 1,
                        elements: elements
                            .iter()
                            .rev()
                            .map(|l| ExtendedLiteral::holds(l.clone()))
                            .collect(),
                    })],
                ));
            }
        }
    }
    GroundProgram::new(rules, p.subclass().cloned())
}

fn body_atoms_in_order(rule: &Rule) -> Vec<Atom> {
    let mut atoms = Vec::new();
    for elem in &rule.body {
        match elem {
            BodyElement::Literal(e) => atoms.push(e.literal.atom.clone()),
            BodyElement::Cardinality(c) => {
                atoms.extend(c.elements.iter().map(|e| e.literal.atom.clone()));
            }
        }
    }
    atoms
}

/// The three-pass renaming: bind auxiliary atoms to indexed names on a
/// first-come, first-serve basis, strip the name machinery, and rewrite
/// every auxiliary occurrence.
pub fn postprocess(g: &GroundProgram) -> Result<PostpOutcome, PostpError> {
    let mut assoc = NameAssociation::default();
    let mut bound: BTreeMap<Atom, Atom> = BTreeMap::new();
    let mut next_index: BTreeMap<Atom, u32> = BTreeMap::new();
    let mut diagnostics: Vec<String> = Vec::new();

    // pass 1: scan rules in order; within a rule, body atoms in
    // position order (cardinality members in place)
    for (pos, rule) in g.rules().iter().enumerate() {
        let atoms = body_atoms_in_order(rule);
        let Some(name_atom) = atoms.iter().find(|a| is_unindexed_name(a)) else {
            continue;
        };
        let name_atom = name_atom.clone();
        let mut bound_here = 0u32;
        for atom in atoms {
            if !atom.is_unnamed() || bound.contains_key(&atom) {
                continue;
            }
            let counter = next_index.entry(name_atom.clone()).or_insert(0);
            *counter += 1;
            let renamed = indexed_name(*counter, &name_atom);
            bound.insert(atom.clone(), renamed.clone());
            assoc.pairs.push((atom, renamed));
            bound_here += 1;
        }
        if bound_here > 1 {
            diagnostics.push(format!(
                "rule {} binds {} unnamed atoms under {}; indexed in body order",
                pos + 1,
                bound_here,
                name_atom
            ));
        }
    }

    // every auxiliary in the program must now have a name
    let unresolved: Vec<String> = g
        .signature()
        .iter()
        .filter(|a| a.is_unnamed() && !bound.contains_key(*a))
        .map(|a| a.to_string())
        .collect();
    if !unresolved.is_empty() {
        return Err(PostpError::UnresolvedAux(unresolved));
    }

    // pass 2: drop name definitions and every body occurrence of a name
    let mut rules: Vec<Rule> = Vec::new();
    for rule in g.rules() {
        if let RuleHead::Choice(c) = &rule.head {
            let definition = c.lower == 0
                && c.upper.is_none()
                && c.elements.len() == 1
                && is_unindexed_name(&c.elements[0].atom);
            if definition {
                continue;
            }
        }
        match &rule.head {
            RuleHead::Literal(l) if is_unindexed_name(&l.atom) => {
                return Err(PostpError::RemainingNameAtom(l.atom.to_string()));
            }
            RuleHead::Choice(c) if c.elements.iter().any(|l| is_unindexed_name(&l.atom)) => {
                return Err(PostpError::RemainingNameAtom(
                    c.elements
                        .iter()
                        .find(|l| is_unindexed_name(&l.atom))
                        .unwrap()
                        .atom
                        .to_string(),
                ));
            }
            _ => {}
        }
        let mut body: Vec<BodyElement> = Vec::new();
        for elem in &rule.body {
            match elem {
                BodyElement::Literal(e) if is_unindexed_name(&e.literal.atom) => {}
                BodyElement::Literal(e) => body.push(BodyElement::Literal(e.clone())),
                BodyElement::Cardinality(c) => {
                    let kept: Vec<ExtendedLiteral> = c
                        .elements
                        .iter()
                        .filter(|e| !is_unindexed_name(&e.literal.atom))
                        .cloned()
                        .collect();
                    let mut lower = c.lower;
                    if kept.len() < c.elements.len() {
                        diagnostics.push(
                            "name atom removed from a cardinality test".to_string(),
                        );
                        lower = lower.min(kept.len() as u32);
                    }
                    body.push(BodyElement::Cardinality(CardinalityTest {
                        lower,
                        elements: kept,
                    }));
                }
            }
        }
        rules.push(Rule {
            head: rule.head.clone(),
            body,
        });
    }

    // pass 3: rewrite every bound auxiliary occurrence
    let rename_lit = |l: &Literal| -> Literal {
        match bound.get(&l.atom) {
            Some(name) => Literal {
                atom: name.clone(),
                strong_negation: l.strong_negation,
            },
            None => l.clone(),
        }
    };
    let rename_ext = |e: &ExtendedLiteral| ExtendedLiteral {
        literal: rename_lit(&e.literal),
        default_negated: e.default_negated,
    };
    let rules: Vec<Rule> = rules
        .iter()
        .map(|rule| Rule {
            head: match &rule.head {
                RuleHead::Literal(l) => RuleHead::Literal(rename_lit(l)),
                RuleHead::Constraint => RuleHead::Constraint,
                RuleHead::Choice(c) => RuleHead::Choice(ChoiceHead {
                    lower: c.lower,
                    upper: c.upper,
                    elements: c.elements.iter().map(&rename_lit).collect(),
                }),
            },
            body: rule
                .body
                .iter()
                .map(|elem| match elem {
                    BodyElement::Literal(e) => BodyElement::Literal(rename_ext(e)),
                    BodyElement::Cardinality(c) => BodyElement::Cardinality(CardinalityTest {
                        lower: c.lower,
                        elements: c.elements.iter().map(&rename_ext).collect(),
                    }),
                })
                .collect(),
        })
        .collect();

    Ok(PostpOutcome {
        program: GroundProgram::new(rules, g.subclass().cloned()),
        assoc,
        diagnostics,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::textio::{parse_program, render_program};

    fn paper_choice_program() -> GroundProgram {
        parse_program("p(1).\np(2).\np(3).\n1 {a(1), a(2), a(3)} 2.\n").unwrap()
    }

    fn names_for_rule(pos: usize, name: &str) -> BTreeMap<usize, NameSpec> {
        let mut names = BTreeMap::new();
        names.insert(pos, NameSpec::new(name));
        names
    }

    #[test]
    fn augment_names_the_choice_rule() {
        let augmented = augment(&paper_choice_program(), &names_for_rule(3, "r1")).unwrap();
        assert_eq!(
            render_program(&augmented),
            "p(1).\np(2).\np(3).\n1 {a(1), a(2), a(3)} 2 :- __name(r1).\n{__name(r1)}.\n"
        );
    }

    #[test]
    fn augment_without_names_is_identity() {
        let p = paper_choice_program();
        let augmented = augment(&p, &BTreeMap::new()).unwrap();
        assert_eq!(render_program(&augmented), render_program(&p));
    }

    #[test]
    fn augment_two_rules_two_definitions() {
        let p = parse_program("1 {a, b} 1.\n1 {c, d} 1.\n").unwrap();
        let mut names = BTreeMap::new();
        names.insert(0, NameSpec::new("r1"));
        names.insert(1, NameSpec::new("r2"));
        let augmented = augment(&p, &names).unwrap();
        assert_eq!(
            render_program(&augmented),
            "1 {a, b} 1 :- __name(r1).\n1 {c, d} 1 :- __name(r2).\n{__name(r1)}.\n{__name(r2)}.\n"
        );
    }

    #[test]
    fn augment_rejects_duplicates_and_unnameable_rules() {
        let p = parse_program("1 {a, b} 1.\n1 {c, d} 1.\n").unwrap();
        let mut names = BTreeMap::new();
        names.insert(0, NameSpec::new("r1"));
        names.insert(1, NameSpec::new("r1"));
        assert_eq!(
            augment(&p, &names),
            Err(PostpError::DuplicateRuleName("__name(r1)".into()))
        );
        let facts = parse_program("p.\n").unwrap();
        assert_eq!(
            augment(&facts, &names_for_rule(0, "r1")),
            Err(PostpError::NotABoundedChoice(0))
        );
        let reserved = parse_program("__aux_3.\n").unwrap();
        assert!(matches!(
            augment(&reserved, &BTreeMap::new()),
            Err(PostpError::ReservedAtom(_))
        ));
    }

    #[test]
    fn mock_ground_reproduces_the_translation_shape() {
        let augmented = augment(&paper_choice_program(), &names_for_rule(3, "r1")).unwrap();
        let grounded = mock_ground(&augmented, RandomSeed(11));
        let text = render_program(&grounded);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 9); // 3 facts + 5-rule translation + definition
        assert_eq!(lines[3], "{a(1), a(2), a(3)} :- __name(r1).");
        assert!(lines[4].starts_with(":- __aux_"));
        assert!(lines[4].ends_with(", __name(r1)."));
        assert!(lines[5].contains(":- 3 {not a(1), not a(2), not a(3)}."));
        assert!(lines[6].starts_with(":- __aux_"));
        assert!(lines[7].contains(":- 3 {a(3), a(2), a(1)}."));
        assert_eq!(lines[8], "{__name(r1)}.");
    }

    #[test]
    fn mock_ground_without_choice_rules_is_identity() {
        let p = parse_program("p :- not q.\nq :- not p.\n").unwrap();
        let grounded = mock_ground(&p, RandomSeed(5));
        assert_eq!(render_program(&grounded), render_program(&p));
    }

    #[test]
    fn mock_ground_seeds_change_ids_not_structure() {
        let augmented = augment(&paper_choice_program(), &names_for_rule(3, "r1")).unwrap();
        let a = mock_ground(&augmented, RandomSeed(1));
        let b = mock_ground(&augmented, RandomSeed(2));
        let strip = |text: String| -> String {
            let mut out = String::new();
            let mut chars = text.chars().peekable();
            while let Some(c) = chars.next() {
                out.push(c);
                if out.ends_with("__aux_") {
                    while chars.peek().is_some_and(|c| c.is_ascii_digit()) {
                        chars.next();
                    }
                    out.push('N');
                }
            }
            out
        };
        let ta = render_program(&a);
        let tb = render_program(&b);
        assert_ne!(ta, tb, "different seeds should draw different aux ids");
        assert_eq!(strip(ta), strip(tb));
    }

    #[test]
    fn postprocess_reproduces_the_worked_bindings() {
        let augmented = augment(&paper_choice_program(), &names_for_rule(3, "r1")).unwrap();
        let grounded = mock_ground(&augmented, RandomSeed(42));
        let outcome = postprocess(&grounded).unwrap();
        let names = outcome.assoc.projected_names();
        assert_eq!(names.len(), 2);
        // the lower-bound auxiliary is scanned first: index 1
        assert_eq!(names[0].to_string(), "__name(1, r1)");
        assert_eq!(names[1].to_string(), "__name(2, r1)");
        let text = render_program(&outcome.program);
        assert!(!text.contains("__aux_"));
        assert!(!text.contains("__name(r1)"));
        assert_eq!(
            text,
            "p(1).\np(2).\np(3).\n{a(1), a(2), a(3)}.\n:- __name(1, r1).\n__name(1, r1) :- 3 {not a(1), not a(2), not a(3)}.\n:- __name(2, r1).\n__name(2, r1) :- 3 {a(3), a(2), a(1)}.\n"
        );
    }

    #[test]
    fn postprocess_is_identity_without_name_machinery() {
        let p = parse_program("p :- not q.\nq :- not p.\n").unwrap();
        let outcome = postprocess(&p).unwrap();
        assert_eq!(render_program(&outcome.program), render_program(&p));
        assert!(outcome.assoc.pairs().is_empty());
    }

    #[test]
    fn postprocess_rejects_unresolved_auxiliaries() {
        let p = parse_program(":- __aux_9.\n__aux_9 :- 1 {a}.\n{a}.\n").unwrap();
        match postprocess(&p) {
            Err(PostpError::UnresolvedAux(atoms)) => assert_eq!(atoms, vec!["__aux_9"]),
            other => panic!("expected unresolved aux error, got {other:?}"),
        }
    }

    #[test]
    fn postprocess_bindings_ignore_seed_and_instance_facts() {
        let base = paper_choice_program();
        let mut projected: Option<Vec<String>> = None;
        for (facts, seed) in [("x(1).\n", 3u64), ("x(1).\nx(2).\n", 17), ("", 99)] {
            let mut text = facts.to_string();
            text.push_str(&render_program(&base));
            let p = parse_program(&text).unwrap();
            let choice_pos = p
                .rules()
                .iter()
                .position(|r| matches!(r.head, RuleHead::Choice(_)))
                .unwrap();
            let augmented = augment(&p, &names_for_rule(choice_pos, "r1")).unwrap();
            let grounded = mock_ground(&augmented, RandomSeed(seed));
            let outcome = postprocess(&grounded).unwrap();
            let names: Vec<String> = outcome
                .assoc
                .projected_names()
                .iter()
                .map(|a| a.to_string())
                .collect();
            match &projected {
                None => projected = Some(names),
                Some(expected) => assert_eq!(&names, expected),
            }
        }
    }
}
