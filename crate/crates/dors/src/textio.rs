//! Reader and writer for the ground-program text format, the policy
//! file format, and instance files.
//!
//! The program grammar is line-oriented: one statement per line, `%`
//! comments, and an optional `%! subclass: <label>` header directive
//! (mandatory for instance files). Rendering is canonical — rules in
//! list order, single spaces after commas — and `parse` of a rendered
//! program reproduces it byte for byte, so golden files stay auditable.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::core::{
    Atom, BodyElement, CardinalityTest, ChoiceHead, ExtendedLiteral, GroundProgram, Literal, Rule,
    RuleHead, SubclassLabel, Term,
};
use crate::policy::Policy;

#[derive(Debug, Error, PartialEq, Eq)]
#[error("line {line}, column {col}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

impl ParseError {
    fn new(line: usize, col: usize, message: impl Into<String>) -> ParseError {
        ParseError {
            line,
            col,
            message: message.into(),
        }
    }
}

/// A parsed instance: program plus the mandatory subclass header.
#[derive(Debug, Clone)]
pub struct InstanceFile {
    pub path: PathBuf,
    pub program: GroundProgram,
    pub subclass: SubclassLabel,
}

#[derive(Debug, Error)]
pub enum InstanceError {
    #[error("{path}: {source}")]
    Parse {
        path: String,
        #[source]
        source: ParseError,
    },
    #[error("{path}: missing mandatory `%! subclass:` header")]
    MissingSubclass { path: String },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// Reads and parses one instance file, requiring the subclass header.
pub fn read_instance(path: &Path) -> Result<InstanceFile, InstanceError> {
    let display = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|source| InstanceError::Io {
        path: display.clone(),
        source,
    })?;
    let program = parse_program(&text).map_err(|source| InstanceError::Parse {
        path: display.clone(),
        source,
    })?;
    let subclass = program
        .subclass()
        .cloned()
        .ok_or(InstanceError::MissingSubclass { path: display })?;
    Ok(InstanceFile {
        path: path.to_path_buf(),
        program,
        subclass,
    })
}

// ---------------------------------------------------------------------------
// tokenizer
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(i64),
    Not,
    LBrace,
    RBrace,
    LParen,
    RParen,
    Comma,
    ColonDash,
    Minus,
    Dot,
}

impl std::fmt::Display for Tok {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Int(n) => write!(f, "`{n}`"),
            Tok::Not => write!(f, "`not`"),
            Tok::LBrace => write!(f, "`{{`"),
            Tok::RBrace => write!(f, "`}}`"),
            Tok::LParen => write!(f, "`(`"),
            Tok::RParen => write!(f, "`)`"),
            Tok::Comma => write!(f, "`,`"),
            Tok::ColonDash => write!(f, "`:-`"),
            Tok::Minus => write!(f, "`-`"),
            Tok::Dot => write!(f, "`.`"),
        }
    }
}

fn tokenize(line_no: usize, line: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let mut toks = Vec::new();
    let bytes = line.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        let col = i + 1;
        let b = bytes[i];
        match b {
            b' ' | b'\t' | b'\r' => i += 1,
            b'{' => {
                toks.push((Tok::LBrace, col));
                i += 1;
            }
            b'}' => {
                toks.push((Tok::RBrace, col));
                i += 1;
            }
            b'(' => {
                toks.push((Tok::LParen, col));
                i += 1;
            }
            b')' => {
                toks.push((Tok::RParen, col));
                i += 1;
            }
            b',' => {
                toks.push((Tok::Comma, col));
                i += 1;
            }
            b'.' => {
                toks.push((Tok::Dot, col));
                i += 1;
            }
            b':' => {
                if bytes.get(i + 1) == Some(&b'-') {
                    toks.push((Tok::ColonDash, col));
                    i += 2;
                } else {
                    return Err(ParseError::new(line_no, col, "expected `:-`"));
                }
            }
            b'-' => {
                toks.push((Tok::Minus, col));
                i += 1;
            }
            b'0'..=b'9' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let text = &line[start..i];
                let value: i64 = text.parse().map_err(|_| {
                    ParseError::new(line_no, col, format!("integer out of range: {text}"))
                })?;
                toks.push((Tok::Int(value), col));
            }
            b'a'..=b'z' | b'_' => {
                let start = i;
                while i < bytes.len()
                    && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_')
                {
                    i += 1;
                }
                let text = &line[start..i];
                if text == "not" {
                    toks.push((Tok::Not, col));
                } else {
                    toks.push((Tok::Ident(text.to_string()), col));
                }
            }
            b'A'..=b'Z' => {
                return Err(ParseError::new(
                    line_no,
                    col,
                    "variables are not allowed in ground programs",
                ));
            }
            _ => {
                return Err(ParseError::new(
                    line_no,
                    col,
                    format!("unexpected character {:?}", line[i..].chars().next().unwrap()),
                ));
            }
        }
    }
    Ok(toks)
}

// ---------------------------------------------------------------------------
// statement parser
// ---------------------------------------------------------------------------

struct Cursor {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    line: usize,
    end_col: usize,
}

impl Cursor {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn col(&self) -> usize {
        self.toks
            .get(self.pos)
            .map(|(_, c)| *c)
            .unwrap_or(self.end_col)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(t, _)| t.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, message: impl Into<String>) -> ParseError {
        ParseError::new(self.line, self.col(), message)
    }

    fn expect(&mut self, want: Tok) -> Result<(), ParseError> {
        match self.next() {
            Some(t) if t == want => Ok(()),
            Some(t) => Err(ParseError::new(
                self.line,
                self.toks[self.pos - 1].1,
                format!("expected {want}, found {t}"),
            )),
            None => Err(ParseError::new(
                self.line,
                self.end_col,
                format!("expected {want} at end of line"),
            )),
        }
    }

    fn parse_term(&mut self) -> Result<Term, ParseError> {
        match self.next() {
            Some(Tok::Int(n)) => Ok(Term::Int(n)),
            Some(Tok::Minus) => match self.next() {
                Some(Tok::Int(n)) => Ok(Term::Int(-n)),
                _ => Err(self.error("expected integer after `-` in term position")),
            },
            Some(Tok::Ident(name)) => {
                if self.peek() == Some(&Tok::LParen) {
                    self.next();
                    let args = self.parse_term_list()?;
                    self.expect(Tok::RParen)?;
                    Ok(Term::App(name, args))
                } else {
                    Ok(Term::Sym(name))
                }
            }
            _ => Err(self.error("expected term")),
        }
    }

    fn parse_term_list(&mut self) -> Result<Vec<Term>, ParseError> {
        let mut terms = vec![self.parse_term()?];
        while self.peek() == Some(&Tok::Comma) {
            self.next();
            terms.push(self.parse_term()?);
        }
        Ok(terms)
    }

    fn parse_atom(&mut self) -> Result<Atom, ParseError> {
        match self.next() {
            Some(Tok::Ident(name)) => {
                let args = if self.peek() == Some(&Tok::LParen) {
                    self.next();
                    let args = self.parse_term_list()?;
                    self.expect(Tok::RParen)?;
                    args
                } else {
                    Vec::new()
                };
                Ok(Atom::new(name, args))
            }
            _ => Err(self.error("expected atom")),
        }
    }

    fn parse_literal(&mut self) -> Result<Literal, ParseError> {
        if self.peek() == Some(&Tok::Minus) {
            self.next();
            Ok(Literal::strong(self.parse_atom()?))
        } else {
            Ok(Literal::positive(self.parse_atom()?))
        }
    }

    fn parse_extended_literal(&mut self) -> Result<ExtendedLiteral, ParseError> {
        if self.peek() == Some(&Tok::Not) {
            self.next();
            Ok(ExtendedLiteral::not(self.parse_literal()?))
        } else {
            Ok(ExtendedLiteral::holds(self.parse_literal()?))
        }
    }

    fn parse_cardinality(&mut self) -> Result<CardinalityTest, ParseError> {
        let bound_col = self.col();
        let lower = match self.next() {
            Some(Tok::Int(n)) if n >= 0 => n as u32,
            _ => return Err(self.error("expected nonnegative cardinality bound")),
        };
        self.expect(Tok::LBrace)?;
        let mut elements = Vec::new();
        if self.peek() != Some(&Tok::RBrace) {
            elements.push(self.parse_extended_literal()?);
            while self.peek() == Some(&Tok::Comma) {
                self.next();
                elements.push(self.parse_extended_literal()?);
            }
        }
        self.expect(Tok::RBrace)?;
        if lower as usize > elements.len() {
            return Err(ParseError::new(
                self.line,
                bound_col,
                format!(
                    "cardinality bound {lower} exceeds element count {}",
                    elements.len()
                ),
            ));
        }
        Ok(CardinalityTest { lower, elements })
    }

    fn parse_body_element(&mut self) -> Result<BodyElement, ParseError> {
        match self.peek() {
            Some(Tok::Int(_)) => Ok(BodyElement::Cardinality(self.parse_cardinality()?)),
            _ => Ok(BodyElement::Literal(self.parse_extended_literal()?)),
        }
    }

    fn parse_body(&mut self) -> Result<Vec<BodyElement>, ParseError> {
        let mut body = vec![self.parse_body_element()?];
        while self.peek() == Some(&Tok::Comma) {
            self.next();
            body.push(self.parse_body_element()?);
        }
        Ok(body)
    }

    fn parse_optional_body(&mut self) -> Result<Vec<BodyElement>, ParseError> {
        if self.peek() == Some(&Tok::ColonDash) {
            self.next();
            self.parse_body()
        } else {
            Ok(Vec::new())
        }
    }

    fn parse_choice_rule(&mut self) -> Result<Rule, ParseError> {
        let bound_col = self.col();
        let lower = match self.peek() {
            Some(Tok::Int(_)) => match self.next() {
                Some(Tok::Int(n)) if n >= 0 => n as u32,
                _ => return Err(self.error("expected nonnegative lower bound")),
            },
            _ => 0,
        };
        self.expect(Tok::LBrace)?;
        let mut elements = Vec::new();
        if self.peek() != Some(&Tok::RBrace) {
            elements.push(self.parse_literal()?);
            while self.peek() == Some(&Tok::Comma) {
                self.next();
                elements.push(self.parse_literal()?);
            }
        }
        self.expect(Tok::RBrace)?;
        let upper = match self.peek() {
            Some(Tok::Int(_)) => match self.next() {
                Some(Tok::Int(n)) if n >= 0 => Some(n as u32),
                _ => return Err(self.error("expected nonnegative upper bound")),
            },
            _ => None,
        };
        if let Some(n) = upper {
            if lower > n {
                return Err(ParseError::new(
                    self.line,
                    bound_col,
                    format!("malformed bounds: lower {lower} exceeds upper {n}"),
                ));
            }
            if n as usize > elements.len() {
                return Err(ParseError::new(
                    self.line,
                    bound_col,
                    format!("upper bound {n} exceeds element count {}", elements.len()),
                ));
            }
        }
        let body = self.parse_optional_body()?;
        Ok(Rule::choice(lower, upper, elements, body))
    }

    fn parse_statement(&mut self) -> Result<Rule, ParseError> {
        let rule = match self.peek() {
            Some(Tok::Int(_)) | Some(Tok::LBrace) => self.parse_choice_rule()?,
            Some(Tok::ColonDash) => {
                self.next();
                Rule::constraint(self.parse_body()?)
            }
            _ => {
                let head = self.parse_literal()?;
                let body = self.parse_optional_body()?;
                Rule {
                    head: RuleHead::Literal(head),
                    body,
                }
            }
        };
        self.expect(Tok::Dot)?;
        if let Some(t) = self.peek() {
            return Err(self.error(format!("unexpected {t} after `.`")));
        }
        Ok(rule)
    }
}

/// Parses a ground program. Rule order is preserved exactly as written;
/// nothing is normalized away.
pub fn parse_program(text: &str) -> Result<GroundProgram, ParseError> {
    let mut rules = Vec::new();
    let mut subclass: Option<SubclassLabel> = None;
    for (idx, raw_line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw_line.trim_end();
        let trimmed = line.trim_start();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(rest) = trimmed.strip_prefix("%!") {
            let rest = rest.trim_start();
            let Some(label_text) = rest.strip_prefix("subclass:") else {
                return Err(ParseError::new(line_no, 1, "unknown directive; expected `%! subclass: <label>`"));
            };
            if subclass.is_some() {
                return Err(ParseError::new(line_no, 1, "duplicate subclass directive"));
            }
            let label = SubclassLabel::new(label_text.trim())
                .map_err(|e| ParseError::new(line_no, 1, e.to_string()))?;
            subclass = Some(label);
            continue;
        }
        if trimmed.starts_with('%') {
            continue;
        }
        let toks = tokenize(line_no, line)?;
        let mut cursor = Cursor {
            toks,
            pos: 0,
            line: line_no,
            end_col: line.len() + 1,
        };
        rules.push(cursor.parse_statement()?);
    }
    Ok(GroundProgram::new(rules, subclass))
}

// ---------------------------------------------------------------------------
// renderer
// ---------------------------------------------------------------------------

fn render_body(out: &mut String, body: &[BodyElement]) {
    for (i, elem) in body.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        let _ = write!(out, "{elem}");
    }
}

/// Canonical text of one rule, without the trailing newline.
pub fn render_rule(rule: &Rule) -> String {
    let mut out = String::new();
    match &rule.head {
        RuleHead::Literal(l) => {
            let _ = write!(out, "{l}");
            if !rule.body.is_empty() {
                out.push_str(" :- ");
                render_body(&mut out, &rule.body);
            }
        }
        RuleHead::Constraint => {
            out.push_str(":- ");
            render_body(&mut out, &rule.body);
        }
        RuleHead::Choice(ChoiceHead {
            lower,
            upper,
            elements,
        }) => {
            if *lower > 0 {
                let _ = write!(out, "{lower} ");
            }
            out.push('{');
            for (i, l) in elements.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                let _ = write!(out, "{l}");
            }
            out.push('}');
            if let Some(n) = upper {
                let _ = write!(out, " {n}");
            }
            if !rule.body.is_empty() {
                out.push_str(" :- ");
                render_body(&mut out, &rule.body);
            }
        }
    }
    out.push('.');
    out
}

/// Canonical text of a whole program: header directive first when a
/// subclass is set, then one rule per line in list order.
pub fn render_program(p: &GroundProgram) -> String {
    let mut out = String::new();
    if let Some(label) = p.subclass() {
        let _ = writeln!(out, "%! subclass: {label}");
    }
    for rule in p.rules() {
        out.push_str(&render_rule(rule));
        out.push('\n');
    }
    out
}

// ---------------------------------------------------------------------------
// policy files
// ---------------------------------------------------------------------------

const POLICY_MAGIC: &str = "dors-policy v1";

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PolicyIoError {
    #[error("line {line}: version mismatch, expected `{POLICY_MAGIC}`")]
    VersionMismatch { line: usize },
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
}

/// Writes a policy in the versioned line format. Count lines are sorted
/// by (level, literal text) within subclass blocks; blocks are sorted by
/// label.
pub fn write_policy(policy: &Policy) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{POLICY_MAGIC}");
    let _ = writeln!(out, "delta {}", policy.delta());
    for subclass in policy.subclasses() {
        let mut lines: Vec<(u32, String, u64)> = policy
            .entries(subclass)
            .map(|(e, pos, count)| (pos, e.to_string(), count))
            .collect();
        if lines.is_empty() {
            continue;
        }
        lines.sort();
        let _ = writeln!(out, "subclass {subclass}");
        for (level, text, count) in lines {
            let _ = writeln!(out, "c {level} {count} {text}");
        }
    }
    out
}

/// Parses a policy file written by [`write_policy`].
pub fn read_policy(text: &str) -> Result<Policy, PolicyIoError> {
    let malformed = |line: usize, message: &str| PolicyIoError::Malformed {
        line,
        message: message.to_string(),
    };
    let mut lines = text.lines().enumerate();
    let Some((_, first)) = lines.next() else {
        return Err(PolicyIoError::VersionMismatch { line: 1 });
    };
    if first.trim() != POLICY_MAGIC {
        return Err(PolicyIoError::VersionMismatch { line: 1 });
    }
    let Some((_, second)) = lines.next() else {
        return Err(malformed(2, "missing `delta` line"));
    };
    let delta: u32 = second
        .trim()
        .strip_prefix("delta ")
        .and_then(|d| d.trim().parse().ok())
        .filter(|d| *d >= 1)
        .ok_or_else(|| malformed(2, "expected `delta <positive integer>`"))?;
    let mut policy = Policy::new(delta);
    let mut current: Option<SubclassLabel> = None;
    for (idx, raw) in lines {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(label) = line.strip_prefix("subclass ") {
            let label = SubclassLabel::new(label.trim())
                .map_err(|e| malformed(line_no, &e.to_string()))?;
            current = Some(label);
            continue;
        }
        if let Some(rest) = line.strip_prefix("c ") {
            let Some(subclass) = current.clone() else {
                return Err(malformed(line_no, "count line before any `subclass` line"));
            };
            let mut parts = rest.splitn(3, ' ');
            let level: u32 = parts
                .next()
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| malformed(line_no, "malformed count line: bad level"))?;
            let count: u64 = parts
                .next()
                .and_then(|s| s.parse().ok())
                .filter(|c| *c >= 1)
                .ok_or_else(|| malformed(line_no, "malformed count line: bad count"))?;
            let lit_text = parts
                .next()
                .ok_or_else(|| malformed(line_no, "malformed count line: missing literal"))?;
            let e = parse_extended_literal_text(lit_text)
                .map_err(|e| malformed(line_no, &format!("malformed count line: {}", e.message)))?;
            policy.record(subclass, e, level, count);
            continue;
        }
        return Err(malformed(line_no, "unrecognized line"));
    }
    Ok(policy)
}

/// Parses a single extended literal written in the program grammar.
pub fn parse_extended_literal_text(text: &str) -> Result<ExtendedLiteral, ParseError> {
    let toks = tokenize(1, text)?;
    let end_col = text.len() + 1;
    let mut cursor = Cursor {
        toks,
        pos: 0,
        line: 1,
        end_col,
    };
    let e = cursor.parse_extended_literal()?;
    if let Some(t) = cursor.peek() {
        return Err(cursor.error(format!("unexpected {t} after literal")));
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::core::SubclassLabel;

    const P1_N1: &str = "p :- not q.\nq :- not p.\nr.\n:- p, r.\n:- q, not s.\nu(0) :- t(0), not v(0).\nv(0) :- t(0), not u(0).\nt(0).\n";

    #[test]
    fn parses_the_small_inconsistent_family_member() {
        let program = parse_program(P1_N1).unwrap();
        assert_eq!(program.rules().len(), 8);
        assert_eq!(program.signature().len(), 7); // p q r s t(0) u(0) v(0)
        assert_eq!(render_program(&program), P1_N1);
        // constraint shape
        assert!(matches!(program.rules()[3].head, RuleHead::Constraint));
        // fact shape
        assert!(program.rules()[7].body.is_empty());
    }

    #[test]
    fn parses_choice_rule_with_bounds() {
        let program = parse_program("1 {a(1), a(2), a(3)} 2.\n").unwrap();
        let RuleHead::Choice(choice) = &program.rules()[0].head else {
            panic!("expected choice rule");
        };
        assert_eq!(choice.lower, 1);
        assert_eq!(choice.upper, Some(2));
        assert_eq!(choice.elements.len(), 3);
        assert_eq!(render_program(&program), "1 {a(1), a(2), a(3)} 2.\n");
    }

    #[test]
    fn parses_empty_program() {
        let program = parse_program("").unwrap();
        assert!(program.rules().is_empty());
        assert_eq!(render_program(&program), "");
    }

    #[test]
    fn renders_single_fact() {
        let program = parse_program("t(0).").unwrap();
        assert_eq!(render_program(&program), "t(0).\n");
    }

    #[test]
    fn parses_header_and_rejects_duplicates() {
        let program = parse_program("%! subclass: k8\n% a comment\np.\n").unwrap();
        assert_eq!(program.subclass(), Some(&SubclassLabel::new("k8").unwrap()));
        assert_eq!(render_program(&program), "%! subclass: k8\np.\n");
        let err = parse_program("%! subclass: a\n%! subclass: b\n").unwrap_err();
        assert!(err.message.contains("duplicate subclass"));
        assert_eq!(err.line, 2);
    }

    #[test]
    fn reports_syntax_errors_with_position() {
        let err = parse_program("p :- q r.\n").unwrap_err();
        assert_eq!(err.line, 1);
        assert_eq!(err.col, 8);
        let err = parse_program("p\n").unwrap_err();
        assert_eq!(err.line, 1);
        let err = parse_program("p :- X.\n").unwrap_err();
        assert!(err.message.contains("variables"));
    }

    #[test]
    fn rejects_malformed_bounds() {
        let err = parse_program("3 {a, b} 1.\n").unwrap_err();
        assert!(err.message.contains("malformed bounds"));
        let err = parse_program("1 {a} 2.\n").unwrap_err();
        assert!(err.message.contains("exceeds element count"));
        let err = parse_program("p :- 3 {a, b}.\n").unwrap_err();
        assert!(err.message.contains("exceeds element count"));
    }

    #[test]
    fn parses_body_cardinality_and_strong_negation() {
        let text = "__aux_4 :- 3 {not a(1), not a(2), not a(3)}.\n-p(2) :- b, not -c.\n";
        let program = parse_program(text).unwrap();
        assert_eq!(render_program(&program), text);
        let BodyElement::Cardinality(card) = &program.rules()[0].body[0] else {
            panic!("expected cardinality element");
        };
        assert_eq!(card.lower, 3);
        assert!(card.elements.iter().all(|e| e.default_negated));
    }

    #[test]
    fn parses_unbounded_and_bodied_choice_forms() {
        let text = "{__name(r1)}.\n1 {a(1), a(2), a(3)} 2 :- __name(r1).\n{c} :- d.\n";
        let program = parse_program(text).unwrap();
        assert_eq!(render_program(&program), text);
    }

    #[test]
    fn nested_terms_round_trip() {
        let text = "occurs(move(3), 0).\nat(t(1, 2), -4).\n";
        let program = parse_program(text).unwrap();
        assert_eq!(render_program(&program), text);
    }

    #[test]
    fn policy_round_trip_empty() {
        let policy = Policy::new(1);
        let text = write_policy(&policy);
        assert_eq!(text, "dors-policy v1\ndelta 1\n");
        assert_eq!(read_policy(&text).unwrap(), policy);
    }

    #[test]
    fn policy_golden_single_entry() {
        let mut policy = Policy::new(1);
        policy.record(
            SubclassLabel::new("k28").unwrap(),
            parse_extended_literal_text("p").unwrap(),
            0,
            2,
        );
        let text = write_policy(&policy);
        assert_eq!(text, "dors-policy v1\ndelta 1\nsubclass k28\nc 0 2 p\n");
        assert_eq!(read_policy(&text).unwrap(), policy);
    }

    #[test]
    fn policy_errors() {
        assert_eq!(
            read_policy("nope\n"),
            Err(PolicyIoError::VersionMismatch { line: 1 })
        );
        assert!(matches!(
            read_policy("dors-policy v1\ndelta 0\n"),
            Err(PolicyIoError::Malformed { line: 2, .. })
        ));
        assert!(matches!(
            read_policy("dors-policy v1\ndelta 1\nsubclass s\nc 0 0 p\n"),
            Err(PolicyIoError::Malformed { line: 4, .. })
        ));
        assert!(matches!(
            read_policy("dors-policy v1\ndelta 1\nc 0 1 p\n"),
            Err(PolicyIoError::Malformed { line: 3, .. })
        ));
    }
}
