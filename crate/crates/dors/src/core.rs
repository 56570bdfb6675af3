//! Domain types shared by every other module: ground terms, atoms,
//! literals, rules, programs, partial answer sets and decision sequences.
//!
//! All values are immutable once constructed; solver runs mutate only
//! their own private copies. Atom identity is structural and the
//! canonical rendering of an atom doubles as its ordering key, so every
//! iteration order in the crate is reproducible.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

/// A ground term: an integer, a symbolic constant, or a compound term.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Int(i64),
    Sym(String),
    App(String, Vec<Term>),
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Int(n) => write!(f, "{n}"),
            Term::Sym(s) => write!(f, "{s}"),
            Term::App(name, args) => {
                write!(f, "{name}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{a}")?;
                }
                write!(f, ")")
            }
        }
    }
}

/// Spelling prefix reserved for grounder-introduced atoms.
pub const AUX_PREFIX: &str = "__aux_";
/// Predicate reserved for rule-name atoms.
pub const NAME_PREDICATE: &str = "__name";

/// A ground atom. The canonical text is computed at construction and is
/// the sole identity and ordering key.
#[derive(Debug, Clone)]
pub struct Atom {
    predicate: String,
    args: Vec<Term>,
    unnamed: bool,
    text: String,
}

impl Atom {
    pub fn new(predicate: impl Into<String>, args: Vec<Term>) -> Atom {
        let predicate = predicate.into();
        let unnamed = is_aux_spelling(&predicate);
        let text = render_atom(&predicate, &args);
        Atom {
            predicate,
            args,
            unnamed,
            text,
        }
    }

    /// 0-ary convenience constructor.
    pub fn named(predicate: impl Into<String>) -> Atom {
        Atom::new(predicate, Vec::new())
    }

    pub fn predicate(&self) -> &str {
        &self.predicate
    }

    pub fn args(&self) -> &[Term] {
        &self.args
    }

    /// True iff this atom was introduced by grounding (reserved
    /// `__aux_<n>` spelling) and has no source-level name.
    pub fn is_unnamed(&self) -> bool {
        self.unnamed
    }

    /// True for both indexed and unindexed `__name(...)` atoms.
    pub fn is_name_atom(&self) -> bool {
        self.predicate == NAME_PREDICATE
    }

    pub fn text(&self) -> &str {
        &self.text
    }
}

fn render_atom(predicate: &str, args: &[Term]) -> String {
    if args.is_empty() {
        return predicate.to_string();
    }
    let mut out = String::with_capacity(predicate.len() + 2 + args.len() * 4);
    out.push_str(predicate);
    out.push('(');
    for (i, a) in args.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        out.push_str(&a.to_string());
    }
    out.push(')');
    out
}

fn is_aux_spelling(predicate: &str) -> bool {
    predicate
        .strip_prefix(AUX_PREFIX)
        .is_some_and(|rest| !rest.is_empty() && rest.bytes().all(|b| b.is_ascii_digit()))
}

impl PartialEq for Atom {
    fn eq(&self, other: &Self) -> bool {
        self.text == other.text
    }
}
impl Eq for Atom {}
impl PartialOrd for Atom {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Atom {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.text.cmp(&other.text)
    }
}
impl std::hash::Hash for Atom {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.text.hash(state);
    }
}
impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}

/// A basic literal: an atom or its strong negation `-a`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal {
    pub atom: Atom,
    pub strong_negation: bool,
}

impl Literal {
    pub fn positive(atom: Atom) -> Literal {
        Literal {
            atom,
            strong_negation: false,
        }
    }

    pub fn strong(atom: Atom) -> Literal {
        Literal {
            atom,
            strong_negation: true,
        }
    }

    /// The literal with the same atom and flipped strong negation.
    pub fn strong_complement(&self) -> Literal {
        Literal {
            atom: self.atom.clone(),
            strong_negation: !self.strong_negation,
        }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.strong_negation {
            write!(f, "-{}", self.atom)
        } else {
            write!(f, "{}", self.atom)
        }
    }
}

/// A literal or its default negation `not l`: the unit of assignment
/// and of choice.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ExtendedLiteral {
    pub literal: Literal,
    pub default_negated: bool,
}

impl ExtendedLiteral {
    pub fn holds(literal: Literal) -> ExtendedLiteral {
        ExtendedLiteral {
            literal,
            default_negated: false,
        }
    }

    pub fn not(literal: Literal) -> ExtendedLiteral {
        ExtendedLiteral {
            literal,
            default_negated: true,
        }
    }

    /// `not e` — toggles default negation; an involution.
    pub fn complement(&self) -> ExtendedLiteral {
        ExtendedLiteral {
            literal: self.literal.clone(),
            default_negated: !self.default_negated,
        }
    }
}

impl fmt::Display for ExtendedLiteral {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.default_negated {
            write!(f, "not {}", self.literal)
        } else {
            write!(f, "{}", self.literal)
        }
    }
}

/// Lower-bounded cardinality test `m { e1, ..., ek }` usable as a body
/// element.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CardinalityTest {
    pub lower: u32,
    pub elements: Vec<ExtendedLiteral>,
}

impl fmt::Display for CardinalityTest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {{", self.lower)?;
        for (i, e) in self.elements.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, "}}")
    }
}

/// One element of a rule body.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BodyElement {
    Literal(ExtendedLiteral),
    Cardinality(CardinalityTest),
}

impl BodyElement {
    pub fn pos(literal: Literal) -> BodyElement {
        BodyElement::Literal(ExtendedLiteral::holds(literal))
    }

    pub fn neg(literal: Literal) -> BodyElement {
        BodyElement::Literal(ExtendedLiteral::not(literal))
    }
}

impl fmt::Display for BodyElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BodyElement::Literal(e) => write!(f, "{e}"),
            BodyElement::Cardinality(c) => write!(f, "{c}"),
        }
    }
}

/// Head of a choice rule: `m { l1, ..., lk } n` with `n = None` meaning
/// no upper bound.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ChoiceHead {
    pub lower: u32,
    pub upper: Option<u32>,
    pub elements: Vec<Literal>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum RuleHead {
    Literal(Literal),
    Constraint,
    Choice(ChoiceHead),
}

/// A ground rule: normal rule, constraint, or choice rule.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Rule {
    pub head: RuleHead,
    pub body: Vec<BodyElement>,
}

impl Rule {
    pub fn fact(literal: Literal) -> Rule {
        Rule {
            head: RuleHead::Literal(literal),
            body: Vec::new(),
        }
    }

    pub fn normal(head: Literal, body: Vec<BodyElement>) -> Rule {
        Rule {
            head: RuleHead::Literal(head),
            body,
        }
    }

    pub fn constraint(body: Vec<BodyElement>) -> Rule {
        Rule {
            head: RuleHead::Constraint,
            body,
        }
    }

    pub fn choice(lower: u32, upper: Option<u32>, elements: Vec<Literal>, body: Vec<BodyElement>) -> Rule {
        Rule {
            head: RuleHead::Choice(ChoiceHead {
                lower,
                upper,
                elements,
            }),
            body,
        }
    }

    /// All literals occurring anywhere in the rule, head first, then
    /// body elements left to right (cardinality elements in place).
    pub fn literals(&self) -> impl Iterator<Item = &Literal> {
        let head: Vec<&Literal> = match &self.head {
            RuleHead::Literal(l) => vec![l],
            RuleHead::Constraint => vec![],
            RuleHead::Choice(c) => c.elements.iter().collect(),
        };
        let body = self.body.iter().flat_map(|b| match b {
            BodyElement::Literal(e) => vec![&e.literal],
            BodyElement::Cardinality(c) => c.elements.iter().map(|e| &e.literal).collect(),
        });
        head.into_iter().chain(body)
    }
}

/// A label grouping problem instances so learned counts only aggregate
/// comparable searches.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SubclassLabel(String);

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LabelError {
    #[error("subclass label must be nonempty")]
    Empty,
    #[error("subclass label contains whitespace or control characters: {0:?}")]
    BadCharacter(String),
}

impl SubclassLabel {
    pub fn new(text: impl Into<String>) -> Result<SubclassLabel, LabelError> {
        let text = text.into();
        if text.is_empty() {
            return Err(LabelError::Empty);
        }
        if text.chars().any(|c| c.is_whitespace() || c.is_control()) {
            return Err(LabelError::BadCharacter(text));
        }
        Ok(SubclassLabel(text))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for SubclassLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// A set of ground rules over the signature they mention.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroundProgram {
    rules: Vec<Rule>,
    subclass: Option<SubclassLabel>,
    signature: BTreeSet<Atom>,
    literals: BTreeSet<Literal>,
}

impl GroundProgram {
    pub fn new(rules: Vec<Rule>, subclass: Option<SubclassLabel>) -> GroundProgram {
        let mut signature = BTreeSet::new();
        let mut literals = BTreeSet::new();
        for rule in &rules {
            for lit in rule.literals() {
                signature.insert(lit.atom.clone());
                literals.insert(lit.clone());
            }
        }
        GroundProgram {
            rules,
            subclass,
            signature,
            literals,
        }
    }

    pub fn empty() -> GroundProgram {
        GroundProgram::new(Vec::new(), None)
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn subclass(&self) -> Option<&SubclassLabel> {
        self.subclass.as_ref()
    }

    /// Every atom occurring anywhere in the rules.
    pub fn signature(&self) -> &BTreeSet<Atom> {
        &self.signature
    }

    /// Every distinct literal occurring in the rules (strong-negated
    /// literals count separately from their positive forms).
    pub fn literals(&self) -> &BTreeSet<Literal> {
        &self.literals
    }

    /// Same rules with a different subclass label.
    pub fn with_subclass(&self, subclass: Option<SubclassLabel>) -> GroundProgram {
        GroundProgram {
            rules: self.rules.clone(),
            subclass,
            signature: self.signature.clone(),
            literals: self.literals.clone(),
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ConsistencyError {
    #[error("set already contains the complement of {0}")]
    Complement(String),
    #[error("set already contains the strong complement of {0}")]
    StrongComplement(String),
}

/// A consistent set of extended literals grown by propagation and
/// choices. Insertion rejects anything that would make the set
/// inconsistent; the inconsistent propagation result is represented by
/// `ExpandResult::Inconsistent`, not by a value of this type.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PartialAnswerSet {
    members: BTreeSet<ExtendedLiteral>,
}

impl PartialAnswerSet {
    pub fn new() -> PartialAnswerSet {
        PartialAnswerSet::default()
    }

    pub fn from_literals<I: IntoIterator<Item = ExtendedLiteral>>(
        items: I,
    ) -> Result<PartialAnswerSet, ConsistencyError> {
        let mut set = PartialAnswerSet::new();
        for e in items {
            set.insert(e)?;
        }
        Ok(set)
    }

    /// Adds an extended literal. Returns `false` when it was already
    /// present, and an error when it conflicts with a member.
    pub fn insert(&mut self, e: ExtendedLiteral) -> Result<bool, ConsistencyError> {
        if self.members.contains(&e.complement()) {
            return Err(ConsistencyError::Complement(e.to_string()));
        }
        if !e.default_negated {
            let strong = ExtendedLiteral::holds(e.literal.strong_complement());
            if self.members.contains(&strong) {
                return Err(ConsistencyError::StrongComplement(e.to_string()));
            }
        }
        Ok(self.members.insert(e))
    }

    pub fn contains(&self, e: &ExtendedLiteral) -> bool {
        self.members.contains(e)
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &ExtendedLiteral> {
        self.members.iter()
    }

    /// Single-pass consistency check. Construction keeps the set
    /// consistent, so this only ever fails for hand-built test data.
    pub fn check_consistent(&self) -> Result<(), ConsistencyError> {
        for e in &self.members {
            if self.members.contains(&e.complement()) {
                return Err(ConsistencyError::Complement(e.to_string()));
            }
            if !e.default_negated && self.members.contains(&ExtendedLiteral::holds(e.literal.strong_complement()))
            {
                return Err(ConsistencyError::StrongComplement(e.to_string()));
            }
        }
        Ok(())
    }
}

impl fmt::Display for PartialAnswerSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, e) in self.members.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, "}}")
    }
}

/// The ordered choice points that led directly to a model; backtracked
/// choices are absent. An extended literal never occurs twice.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DecisionSequence {
    entries: Vec<ExtendedLiteral>,
}

impl DecisionSequence {
    pub fn new() -> DecisionSequence {
        DecisionSequence::default()
    }

    pub fn from_entries(entries: Vec<ExtendedLiteral>) -> DecisionSequence {
        let mut seq = DecisionSequence::new();
        for e in entries {
            seq.push(e);
        }
        seq
    }

    /// Appends a choice point. Panics on a duplicate entry, which would
    /// violate the construction invariant of decision sequences.
    pub fn push(&mut self, e: ExtendedLiteral) {
        assert!(
            !self.entries.contains(&e),
            "duplicate decision-sequence entry {e}"
        );
        self.entries.push(e);
    }

    pub fn entries(&self) -> &[ExtendedLiteral] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// 0-based position of `e`, if present.
    pub fn level_of(&self, e: &ExtendedLiteral) -> Option<usize> {
        self.entries.iter().position(|x| x == e)
    }
}

impl fmt::Display for DecisionSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, e) in self.entries.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, "]")
    }
}

/// True iff every literal occurring in the program is decided one way
/// or the other in `b`.
pub fn is_complete(p: &GroundProgram, b: &PartialAnswerSet) -> bool {
    p.literals().iter().all(|l| {
        b.contains(&ExtendedLiteral::holds(l.clone())) || b.contains(&ExtendedLiteral::not(l.clone()))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn atom(name: &str) -> Atom {
        Atom::named(name)
    }

    fn lit(name: &str) -> Literal {
        Literal::positive(atom(name))
    }

    fn pos(name: &str) -> ExtendedLiteral {
        ExtendedLiteral::holds(lit(name))
    }

    fn not(name: &str) -> ExtendedLiteral {
        ExtendedLiteral::not(lit(name))
    }

    #[test]
    fn complement_toggles_default_negation() {
        // p -> not p
        assert_eq!(pos("p").complement(), not("p"));
        // not p -> p
        assert_eq!(not("p").complement(), pos("p"));
        // not -a(1) -> -a(1): strong negation untouched
        let strong = ExtendedLiteral::not(Literal::strong(Atom::new("a", vec![Term::Int(1)])));
        let c = strong.complement();
        assert!(!c.default_negated);
        assert!(c.literal.strong_negation);
        assert_eq!(c.complement(), strong);
    }

    #[test]
    fn complement_is_involution_on_all_forms() {
        for strong in [false, true] {
            for neg in [false, true] {
                let e = ExtendedLiteral {
                    literal: Literal {
                        atom: Atom::new("a", vec![Term::Int(3), Term::Sym("x".into())]),
                        strong_negation: strong,
                    },
                    default_negated: neg,
                };
                assert_eq!(e.complement().complement(), e);
                assert_ne!(e.complement(), e);
            }
        }
    }

    #[test]
    fn completeness_over_program_literals() {
        // p :- not q.  q :- not p.
        let program = GroundProgram::new(
            vec![
                Rule::normal(lit("p"), vec![BodyElement::neg(lit("q"))]),
                Rule::normal(lit("q"), vec![BodyElement::neg(lit("p"))]),
            ],
            None,
        );
        let both = PartialAnswerSet::from_literals([pos("p"), not("q")]).unwrap();
        assert!(is_complete(&program, &both));
        let half = PartialAnswerSet::from_literals([pos("p")]).unwrap();
        assert!(!is_complete(&program, &half));
        assert!(is_complete(&GroundProgram::empty(), &PartialAnswerSet::new()));
    }

    #[test]
    fn partial_answer_set_rejects_conflicts() {
        let mut set = PartialAnswerSet::new();
        assert!(set.insert(pos("p")).unwrap());
        assert!(!set.insert(pos("p")).unwrap());
        assert!(set.insert(not("p")).is_err());
        // strong complement as positive member
        let a = ExtendedLiteral::holds(Literal::positive(atom("a")));
        let neg_a = ExtendedLiteral::holds(Literal::strong(atom("a")));
        set.insert(a).unwrap();
        assert!(set.insert(neg_a).is_err());
        set.check_consistent().unwrap();
    }

    #[test]
    fn atom_ordering_is_textual() {
        let u0 = Atom::new("u", vec![Term::Int(0)]);
        let u10 = Atom::new("u", vec![Term::Int(10)]);
        let u2 = Atom::new("u", vec![Term::Int(2)]);
        assert!(u0 < u10);
        // canonical rendering is the ordering key, so u(10) < u(2)
        assert!(u10 < u2);
        assert!(atom("p") < u0);
    }

    #[test]
    fn aux_spelling_sets_unnamed_flag() {
        assert!(atom("__aux_7").is_unnamed());
        assert!(!atom("__aux_").is_unnamed());
        assert!(!atom("__aux_x").is_unnamed());
        assert!(!atom("aux_7").is_unnamed());
        assert!(Atom::new(NAME_PREDICATE, vec![Term::Sym("r1".into())]).is_name_atom());
    }

    #[test]
    fn decision_sequence_rejects_duplicates() {
        let mut d = DecisionSequence::new();
        d.push(pos("p"));
        d.push(not("q"));
        assert_eq!(d.level_of(&not("q")), Some(1));
        let result = std::panic::catch_unwind(std::panic::AssertUnwindSafe(|| {
            let mut d2 = d.clone();
            d2.push(pos("p"));
        }));
        assert!(result.is_err());
    }

    #[test]
    fn subclass_label_validation() {
        assert!(SubclassLabel::new("k28").is_ok());
        assert_eq!(SubclassLabel::new(""), Err(LabelError::Empty));
        assert!(matches!(
            SubclassLabel::new("a b"),
            Err(LabelError::BadCharacter(_))
        ));
    }
}
