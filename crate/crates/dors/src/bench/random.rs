//! Seeded random ground programs for property tests and oracle
//! comparisons. Same seed, same program.

use std::collections::BTreeMap;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::core::{
    Atom, BodyElement, CardinalityTest, ExtendedLiteral, GroundProgram, Literal, Rule,
};
use crate::postp::NameSpec;

#[derive(Debug, Clone, Copy)]
pub struct RandomProgramSpec {
    pub seed: u64,
    /// Size of the atom pool.
    pub atoms: usize,
    pub rules: usize,
    pub allow_choice: bool,
    pub allow_cardinality: bool,
    pub allow_strong_negation: bool,
}

impl RandomProgramSpec {
    pub fn small(seed: u64) -> RandomProgramSpec {
        RandomProgramSpec {
            seed,
            atoms: 8,
            rules: 12,
            allow_choice: true,
            allow_cardinality: true,
            allow_strong_negation: true,
        }
    }
}

fn atom(i: usize) -> Atom {
    Atom::named(format!("x{i}"))
}

fn literal(rng: &mut ChaCha8Rng, spec: &RandomProgramSpec) -> Literal {
    let a = atom(rng.gen_range(0..spec.atoms));
    if spec.allow_strong_negation && rng.gen_bool(0.12) {
        Literal::strong(a)
    } else {
        Literal::positive(a)
    }
}

fn ext_literal(rng: &mut ChaCha8Rng, spec: &RandomProgramSpec) -> ExtendedLiteral {
    let l = literal(rng, spec);
    if rng.gen_bool(0.5) {
        ExtendedLiteral::not(l)
    } else {
        ExtendedLiteral::holds(l)
    }
}

fn body(rng: &mut ChaCha8Rng, spec: &RandomProgramSpec, min_len: usize) -> Vec<BodyElement> {
    let len = rng.gen_range(min_len..=3);
    let mut out = Vec::with_capacity(len);
    for _ in 0..len {
        if spec.allow_cardinality && rng.gen_bool(0.2) {
            let k = rng.gen_range(2..=3usize);
            let elements: Vec<ExtendedLiteral> =
                (0..k).map(|_| ext_literal(rng, spec)).collect();
            let lower = rng.gen_range(0..=k as u32);
            out.push(BodyElement::Cardinality(CardinalityTest { lower, elements }));
        } else {
            out.push(BodyElement::Literal(ext_literal(rng, spec)));
        }
    }
    out
}

fn choice_head(rng: &mut ChaCha8Rng, spec: &RandomProgramSpec) -> (u32, Option<u32>, Vec<Literal>) {
    let k = rng.gen_range(1..=3usize);
    let mut elements: Vec<Literal> = Vec::with_capacity(k);
    for _ in 0..k {
        let l = literal(rng, spec);
        if !elements.contains(&l) {
            elements.push(l);
        }
    }
    let k = elements.len() as u32;
    let lower = rng.gen_range(0..=k);
    let upper = if rng.gen_bool(0.7) {
        Some(rng.gen_range(lower..=k))
    } else {
        None
    };
    (lower, upper, elements)
}

/// A random ground program drawn deterministically from the seed.
pub fn random_program(spec: &RandomProgramSpec) -> GroundProgram {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let rule_count = rng.gen_range(1..=spec.rules.max(1));
    let mut rules = Vec::with_capacity(rule_count);
    for _ in 0..rule_count {
        let roll: f64 = rng.gen();
        if spec.allow_choice && roll < 0.25 {
            let (lower, upper, elements) = choice_head(&mut rng, spec);
            rules.push(Rule::choice(lower, upper, elements, body(&mut rng, spec, 0)));
        } else if roll < 0.45 {
            rules.push(Rule::constraint(body(&mut rng, spec, 1)));
        } else {
            rules.push(Rule::normal(literal(&mut rng, spec), body(&mut rng, spec, 0)));
        }
    }
    GroundProgram::new(rules, None)
}

/// A small random program guaranteed to contain at least one bounded
/// choice rule, plus the name map covering every bounded choice rule.
/// Sized so that even the mock-grounded form stays within the
/// brute-force oracle's enumeration limit.
pub fn random_named_choice_program(seed: u64) -> (GroundProgram, BTreeMap<usize, NameSpec>) {
    let spec = RandomProgramSpec {
        seed,
        atoms: 5,
        rules: 5,
        allow_choice: true,
        allow_cardinality: false,
        allow_strong_negation: false,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e3779b97f4a7c15);
    let mut program = random_program(&spec);
    let has_bounded = program.rules().iter().any(is_bounded_choice);
    if !has_bounded {
        let mut rules = program.rules().to_vec();
        let (mut lower, upper, elements) = choice_head(&mut rng, &spec);
        if lower == 0 && upper.is_none() {
            lower = 1;
        }
        let upper = upper.or(Some(elements.len() as u32));
        rules.push(Rule::choice(lower, upper, elements, Vec::new()));
        program = GroundProgram::new(rules, None);
    }
    let mut names = BTreeMap::new();
    for (pos, rule) in program.rules().iter().enumerate() {
        if is_bounded_choice(rule) {
            names.insert(pos, NameSpec::new(format!("r{pos}")));
        }
    }
    (program, names)
}

fn is_bounded_choice(rule: &Rule) -> bool {
    match &rule.head {
        crate::core::RuleHead::Choice(c) => c.lower > 0 || c.upper.is_some(),
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_per_seed() {
        let spec = RandomProgramSpec::small(42);
        let a = random_program(&spec);
        let b = random_program(&spec);
        assert_eq!(
            crate::textio::render_program(&a),
            crate::textio::render_program(&b)
        );
    }

    #[test]
    fn named_choice_programs_have_names() {
        for seed in 0..20 {
            let (program, names) = random_named_choice_program(seed);
            assert!(!names.is_empty(), "seed {seed} produced no names");
            for pos in names.keys() {
                assert!(is_bounded_choice(&program.rules()[*pos]));
            }
            // programs must round-trip through the text format
            let text = crate::textio::render_program(&program);
            crate::textio::parse_program(&text).unwrap();
        }
    }
}
