//! Text syntax for concepts, fuzzy assertions and knowledge bases.
//!
//! ```text
//! # comment
//! Ferrari < SportCar and some Ownedby . CarFanatic      (specialisation)
//! Basket := SportKind and all HasSportTool . Basketball  (definition)
//! (v1 : Video) >= 1.0
//! (v1 : some About . Basket) >= 0.9
//! ((a, b) : R) <= 1/3
//! ```
//!
//! Concept precedence, loosest first: `or`, `and`, then the prefix forms
//! `not C`, `all R . C`, `some R . C` (the dot is optional). Binary
//! connectives associate to the left.

use std::collections::HashSet;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::degree::{Degree, DegreeError};
use crate::syntax::{Assertion, Axiom, Concept, FuzzyConstraint, KnowledgeBase, Name, Object, Relation};

/// 1-based position in the source text.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Default)]
pub struct SourceSpan {
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("unexpected character `{0}`")]
    UnknownToken(char),
    #[error("expected {expected}, found {found}")]
    Unexpected { expected: String, found: String },
    #[error("invalid degree: {0}")]
    Degree(#[from] DegreeError),
    #[error("degree {degree} not allowed with `{rel}`: lower bounds need (0, 1], upper bounds [0, 1)")]
    DegreeRange { rel: Relation, degree: Degree },
    #[error("strict relation `{0}` is not allowed here")]
    StrictRelation(Relation),
    #[error("variables are not allowed here")]
    Variable,
    #[error("`{0}` appears more than once on the left-hand side of an axiom")]
    DuplicateLhs(Name),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{span}: {kind}")]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub span: SourceSpan,
}

/// A relation and degree with the position of the relation.
type Bound = (Relation, Degree, SourceSpan);

const KEYWORDS: [&str; 7] = ["top", "bot", "not", "and", "or", "all", "some"];

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Var(u32),
    Number(String),
    LParen,
    RParen,
    Dot,
    Colon,
    Comma,
    Define,
    Rel(Relation),
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Var(v) => format!("`?x{v}`"),
            Tok::Number(n) => format!("`{n}`"),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Dot => "`.`".into(),
            Tok::Colon => "`:`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Define => "`:=`".into(),
            Tok::Rel(r) => format!("`{r}`"),
            Tok::End => "end of input".into(),
        }
    }
}

fn tokenize(text: &str, line: usize, first_column: usize) -> Result<Vec<(Tok, SourceSpan)>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    let span = |i: usize| SourceSpan { line, column: first_column + i };
    while i < chars.len() {
        let c = chars[i];
        let start = i;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let tok = match c {
            '#' => break,
            '(' => {
                i += 1;
                Tok::LParen
            }
            ')' => {
                i += 1;
                Tok::RParen
            }
            '.' => {
                i += 1;
                Tok::Dot
            }
            ',' => {
                i += 1;
                Tok::Comma
            }
            ':' if chars.get(i + 1) == Some(&'=') => {
                i += 2;
                Tok::Define
            }
            ':' => {
                i += 1;
                Tok::Colon
            }
            '>' | '<' => {
                let eq = chars.get(i + 1) == Some(&'=');
                i += if eq { 2 } else { 1 };
                Tok::Rel(match (c, eq) {
                    ('>', true) => Relation::AtLeast,
                    ('>', false) => Relation::Greater,
                    ('<', true) => Relation::AtMost,
                    _ => Relation::Less,
                })
            }
            '?' if chars.get(i + 1) == Some(&'x') => {
                i += 2;
                let digits_start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let digits: String = chars[digits_start..i].iter().collect();
                match digits.parse::<u32>() {
                    Ok(v) => Tok::Var(v),
                    Err(_) => return Err(ParseError { kind: ParseErrorKind::UnknownToken('?'), span: span(start) }),
                }
            }
            c if c.is_ascii_digit() => {
                while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '/') {
                    i += 1;
                }
                // A dot directly followed by a digit belongs to the literal.
                if i + 1 < chars.len() && chars[i] == '.' && chars[i + 1].is_ascii_digit() {
                    i += 1;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
                Tok::Number(chars[start..i].iter().collect())
            }
            c if c.is_ascii_alphabetic() => {
                while i < chars.len()
                    && (chars[i].is_ascii_alphanumeric() || chars[i] == '_' || chars[i] == '*')
                {
                    i += 1;
                }
                Tok::Ident(chars[start..i].iter().collect())
            }
            other => return Err(ParseError { kind: ParseErrorKind::UnknownToken(other), span: span(start) }),
        };
        out.push((tok, span(start)));
    }
    out.push((Tok::End, span(chars.len())));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, SourceSpan)>,
    pos: usize,
}

impl Parser {
    fn new(text: &str, line: usize) -> Result<Self, ParseError> {
        Ok(Parser { toks: tokenize(text, line, 1)?, pos: 0 })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn peek_at(&self, offset: usize) -> &Tok {
        let idx = (self.pos + offset).min(self.toks.len() - 1);
        &self.toks[idx].0
    }

    fn span(&self) -> SourceSpan {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let tok = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        tok
    }

    fn error(&self, expected: &str) -> ParseError {
        ParseError {
            kind: ParseErrorKind::Unexpected {
                expected: expected.to_string(),
                found: self.peek().describe(),
            },
            span: self.span(),
        }
    }

    fn expect(&mut self, tok: Tok, expected: &str) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.error(expected))
        }
    }

    fn is_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn name(&mut self, what: &str) -> Result<Name, ParseError> {
        match self.peek() {
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => {
                let name: Name = Arc::from(s.as_str());
                self.bump();
                Ok(name)
            }
            _ => Err(self.error(what)),
        }
    }

    fn end(&self) -> Result<(), ParseError> {
        if *self.peek() == Tok::End {
            Ok(())
        } else {
            Err(self.error("end of input"))
        }
    }

    fn concept(&mut self) -> Result<Concept, ParseError> {
        let mut left = self.conjunction()?;
        while self.is_keyword("or") {
            self.bump();
            let right = self.conjunction()?;
            left = left.or(right);
        }
        Ok(left)
    }

    fn conjunction(&mut self) -> Result<Concept, ParseError> {
        let mut left = self.unary()?;
        while self.is_keyword("and") {
            self.bump();
            let right = self.unary()?;
            left = left.and(right);
        }
        Ok(left)
    }

    fn unary(&mut self) -> Result<Concept, ParseError> {
        match self.peek().clone() {
            Tok::Ident(kw) if kw == "not" => {
                self.bump();
                Ok(self.unary()?.negate())
            }
            Tok::Ident(kw) if kw == "all" || kw == "some" => {
                self.bump();
                let role = self.name("a role name")?;
                if *self.peek() == Tok::Dot {
                    self.bump();
                }
                let body = Arc::new(self.unary()?);
                Ok(if kw == "all" { Concept::Forall(role, body) } else { Concept::Exists(role, body) })
            }
            Tok::Ident(kw) if kw == "top" => {
                self.bump();
                Ok(Concept::Top)
            }
            Tok::Ident(kw) if kw == "bot" => {
                self.bump();
                Ok(Concept::Bottom)
            }
            Tok::Ident(_) => Ok(Concept::Primitive(self.name("a concept")?)),
            Tok::LParen => {
                self.bump();
                let inner = self.concept()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(inner)
            }
            _ => Err(self.error("a concept")),
        }
    }

    fn object(&mut self) -> Result<Object, ParseError> {
        match self.peek().clone() {
            Tok::Var(v) => {
                self.bump();
                Ok(Object::Variable(v))
            }
            _ => Ok(Object::Individual(self.name("an individual name")?)),
        }
    }

    /// `(w : C)` or `((w, w') : R)`.
    fn assertion(&mut self) -> Result<Assertion, ParseError> {
        self.expect(Tok::LParen, "`(`")?;
        let assertion = if *self.peek() == Tok::LParen {
            self.bump();
            let subject = self.object()?;
            self.expect(Tok::Comma, "`,`")?;
            let filler = self.object()?;
            self.expect(Tok::RParen, "`)`")?;
            self.expect(Tok::Colon, "`:`")?;
            let role = self.name("a role name")?;
            Assertion::Role { subject, filler, role }
        } else {
            let object = self.object()?;
            self.expect(Tok::Colon, "`:`")?;
            let concept = self.concept()?;
            Assertion::Concept { object, concept }
        };
        self.expect(Tok::RParen, "`)`")?;
        Ok(assertion)
    }

    fn degree(&mut self) -> Result<Degree, ParseError> {
        let span = self.span();
        match self.bump() {
            Tok::Number(text) => {
                Degree::parse(&text).map_err(|e| ParseError { kind: e.into(), span })
            }
            _ => {
                self.pos -= 1;
                Err(self.error("a degree"))
            }
        }
    }

    /// An assertion optionally followed by a bound.
    fn assertion_with_bound(&mut self) -> Result<(Assertion, Option<Bound>), ParseError> {
        let assertion = self.assertion()?;
        if let Tok::Rel(rel) = *self.peek() {
            let span = self.span();
            self.bump();
            let degree = self.degree()?;
            return Ok((assertion, Some((rel, degree, span))));
        }
        Ok((assertion, None))
    }
}

fn check_user_level(constraint: &FuzzyConstraint, span: SourceSpan) -> Result<(), ParseError> {
    if constraint.rel.is_strict() {
        return Err(ParseError { kind: ParseErrorKind::StrictRelation(constraint.rel), span });
    }
    if !constraint.is_user_level() {
        return Err(ParseError {
            kind: ParseErrorKind::DegreeRange { rel: constraint.rel, degree: constraint.degree.clone() },
            span,
        });
    }
    Ok(())
}

fn reject_variables(assertion: &Assertion, span: SourceSpan) -> Result<(), ParseError> {
    if assertion.objects().iter().any(|o| o.is_variable()) {
        return Err(ParseError { kind: ParseErrorKind::Variable, span });
    }
    Ok(())
}

pub fn parse_concept(text: &str) -> Result<Concept, ParseError> {
    let mut p = Parser::new(text, 1)?;
    let concept = p.concept()?;
    p.end()?;
    Ok(concept)
}

/// Parses a constraint with any of the four relations; variables (`?x1`)
/// are accepted. This is the inverse of rendering a tableau constraint.
pub fn parse_constraint(text: &str) -> Result<FuzzyConstraint, ParseError> {
    let mut p = Parser::new(text, 1)?;
    let (assertion, bound) = p.assertion_with_bound()?;
    let Some((rel, degree, _)) = bound else {
        return Err(p.error("a relation (`>=`, `>`, `<=`, `<`)"));
    };
    p.end()?;
    Ok(FuzzyConstraint::new(assertion, rel, degree))
}

/// A query: a user-level fuzzy assertion, or a bare assertion (for glb/lub).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Query {
    Constraint(FuzzyConstraint),
    Assertion(Assertion),
}

pub fn parse_query(text: &str) -> Result<Query, ParseError> {
    let mut p = Parser::new(text, 1)?;
    let start = p.span();
    let (assertion, bound) = p.assertion_with_bound()?;
    p.end()?;
    reject_variables(&assertion, start)?;
    match bound {
        None => Ok(Query::Assertion(assertion)),
        Some((rel, degree, span)) => {
            let constraint = FuzzyConstraint::new(assertion, rel, degree);
            check_user_level(&constraint, span)?;
            Ok(Query::Constraint(constraint))
        }
    }
}

/// Parses the line-oriented knowledge-base format.
pub fn parse_kb(text: &str) -> Result<KnowledgeBase, ParseError> {
    let mut kb = KnowledgeBase::default();
    let mut defined = HashSet::new();
    for (idx, line) in text.lines().enumerate() {
        let mut p = Parser::new(line, idx + 1)?;
        let start = p.span();
        match (p.peek().clone(), p.peek_at(1).clone()) {
            (Tok::End, _) => continue,
            (Tok::LParen, _) => {
                let (assertion, bound) = p.assertion_with_bound()?;
                let Some((rel, degree, span)) = bound else {
                    return Err(p.error("`>=` or `<=`"));
                };
                p.end()?;
                reject_variables(&assertion, start)?;
                let constraint = FuzzyConstraint::new(assertion, rel, degree);
                check_user_level(&constraint, span)?;
                kb.abox.push(constraint);
            }
            (Tok::Ident(_), Tok::Rel(Relation::Less) | Tok::Define) => {
                let lhs = p.name("a concept name")?;
                let is_definition = p.bump() == Tok::Define;
                let rhs = p.concept()?;
                p.end()?;
                if !defined.insert(lhs.clone()) {
                    return Err(ParseError { kind: ParseErrorKind::DuplicateLhs(lhs), span: start });
                }
                kb.tbox.push(if is_definition {
                    Axiom::Definition { lhs, rhs }
                } else {
                    Axiom::Specialisation { lhs, rhs }
                });
            }
            _ => return Err(p.error("an axiom (`A < C`, `A := C`) or an assertion `(a : C) >= n`")),
        }
    }
    Ok(kb)
}

// ---------------------------------------------------------------------------
// Rendering

fn precedence(c: &Concept) -> u8 {
    match c {
        Concept::Or(..) => 1,
        Concept::And(..) => 2,
        Concept::Not(_) | Concept::Forall(..) | Concept::Exists(..) => 3,
        _ => 4,
    }
}

fn write_concept(f: &mut impl fmt::Write, c: &Concept, min_prec: u8) -> fmt::Result {
    let parens = precedence(c) < min_prec;
    if parens {
        f.write_char('(')?;
    }
    match c {
        Concept::Top => f.write_str("top")?,
        Concept::Bottom => f.write_str("bot")?,
        Concept::Primitive(name) => f.write_str(name)?,
        Concept::Not(inner) => {
            f.write_str("not ")?;
            write_concept(f, inner, 3)?;
        }
        Concept::And(l, r) => {
            write_concept(f, l, 2)?;
            f.write_str(" and ")?;
            write_concept(f, r, 3)?;
        }
        Concept::Or(l, r) => {
            write_concept(f, l, 1)?;
            f.write_str(" or ")?;
            write_concept(f, r, 2)?;
        }
        Concept::Forall(role, body) | Concept::Exists(role, body) => {
            let q = if matches!(c, Concept::Forall(..)) { "all" } else { "some" };
            write!(f, "{q} {role} . ")?;
            write_concept(f, body, 3)?;
        }
    }
    if parens {
        f.write_char(')')?;
    }
    Ok(())
}

impl fmt::Display for Concept {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_concept(f, self, 0)
    }
}

impl fmt::Display for Object {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Object::Individual(name) => f.write_str(name),
            Object::Variable(v) => write!(f, "?x{v}"),
        }
    }
}

impl fmt::Display for Assertion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Assertion::Concept { object, concept } => write!(f, "({object} : {concept})"),
            Assertion::Role { subject, filler, role } => write!(f, "(({subject}, {filler}) : {role})"),
        }
    }
}

impl fmt::Display for FuzzyConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.assertion, self.rel, self.degree)
    }
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Axiom::Specialisation { lhs, rhs } => write!(f, "{lhs} < {rhs}"),
            Axiom::Definition { lhs, rhs } => write!(f, "{lhs} := {rhs}"),
        }
    }
}

impl fmt::Display for KnowledgeBase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for axiom in &self.tbox {
            writeln!(f, "{axiom}")?;
        }
        for constraint in &self.abox {
            writeln!(f, "{constraint}")?;
        }
        Ok(())
    }
}

/// Anything that has a text form accepted back by the parser.
pub fn render(entity: &impl fmt::Display) -> String {
    entity.to_string()
}
