//! First-order formulas over membership and equality.
//!
//! The language has exactly two atoms (`in` and `=`), falsum, the positive
//! connectives, and both quantifiers. Negation is sugar: `~f` parses to
//! `f -> bot`, so evaluators need no separate negation clause.
//!
//! Concrete syntax (ASCII, whitespace-insensitive, `#` line comments):
//!
//! ```text
//! formula := impl ;
//! impl    := disj ("->" impl)? ;
//! disj    := conj ("\/" conj)* ;
//! conj    := neg ("/\" neg)* ;
//! neg     := "~" neg | atomf ;
//! atomf   := "bot" | "(" formula ")"
//!          | "forall" ID "." formula | "exists" ID "." formula
//!          | termx ("in" | "=") termx ;
//! termx   := ID ;
//! ```
//!
//! `~` binds tightest, then `/\`, then `\/`, then right-associative `->`;
//! a quantifier body extends to the end of its enclosing scope.
//!
//! An identifier in term position is resolved against a [`ParseContext`]:
//! identifiers bound by an enclosing quantifier or declared free become
//! variables, declared names become references into a term universe, and
//! anything else is an unbound-variable error.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum FormulaError {
    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unbound variable `{name}` at offset {offset}")]
    Unbound { name: String, offset: usize },
    #[error("substituting `{var}` would be captured by binder `{binder}`")]
    Capture { var: String, binder: String },
    #[error("invalid identifier `{0}`")]
    BadIdentifier(String),
}

/// A name over `[A-Za-z0-9_]+`. Comparison is exact.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Identifier(String);

impl Identifier {
    pub fn new(s: impl Into<String>) -> Result<Self, FormulaError> {
        let s = s.into();
        if s.is_empty() || !s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
            return Err(FormulaError::BadIdentifier(s));
        }
        Ok(Identifier(s))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Identifier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Identifier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl FromStr for Identifier {
    type Err = FormulaError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Identifier::new(s)
    }
}

/// Shorthand used pervasively in tests and builders.
pub fn ident(s: &str) -> Identifier {
    Identifier::new(s).expect("valid identifier")
}

/// A term position in an atom: either a quantified/free variable or a named
/// reference into a supplied term universe.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum TermExpr {
    Var(Identifier),
    Name(Identifier),
}

impl TermExpr {
    pub fn identifier(&self) -> &Identifier {
        match self {
            TermExpr::Var(id) | TermExpr::Name(id) => id,
        }
    }
}

impl fmt::Display for TermExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.identifier())
    }
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Formula {
    Falsum,
    Member(TermExpr, TermExpr),
    Equal(TermExpr, TermExpr),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Exists(Identifier, Box<Formula>),
    Forall(Identifier, Box<Formula>),
}

impl Formula {
    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    /// `~f`, i.e. `f -> bot`.
    pub fn negated(f: Formula) -> Formula {
        Formula::implies(f, Formula::Falsum)
    }

    pub fn exists(var: Identifier, body: Formula) -> Formula {
        Formula::Exists(var, Box::new(body))
    }

    pub fn forall(var: Identifier, body: Formula) -> Formula {
        Formula::Forall(var, Box::new(body))
    }

    pub fn member(lhs: TermExpr, rhs: TermExpr) -> Formula {
        Formula::Member(lhs, rhs)
    }

    pub fn equal(lhs: TermExpr, rhs: TermExpr) -> Formula {
        Formula::Equal(lhs, rhs)
    }

    /// Variables with a free occurrence.
    pub fn free_vars(&self) -> BTreeSet<Identifier> {
        fn walk(f: &Formula, bound: &mut Vec<Identifier>, out: &mut BTreeSet<Identifier>) {
            match f {
                Formula::Falsum => {}
                Formula::Member(a, b) | Formula::Equal(a, b) => {
                    for t in [a, b] {
                        if let TermExpr::Var(id) = t {
                            if !bound.contains(id) {
                                out.insert(id.clone());
                            }
                        }
                    }
                }
                Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                    walk(a, bound, out);
                    walk(b, bound, out);
                }
                Formula::Exists(v, body) | Formula::Forall(v, body) => {
                    bound.push(v.clone());
                    walk(body, bound, out);
                    bound.pop();
                }
            }
        }
        let mut out = BTreeSet::new();
        walk(self, &mut Vec::new(), &mut out);
        out
    }

    /// Replaces all free occurrences of `var` by `t`. Capture is an error,
    /// not a silent rename: if `t` is a variable bound by some binder in
    /// scope of a replaced occurrence, the binder is reported.
    pub fn substitute(&self, var: &Identifier, t: &TermExpr) -> Result<Formula, FormulaError> {
        fn subst_term(te: &TermExpr, var: &Identifier, t: &TermExpr) -> TermExpr {
            match te {
                TermExpr::Var(id) if id == var => t.clone(),
                other => other.clone(),
            }
        }
        fn walk(f: &Formula, var: &Identifier, t: &TermExpr) -> Result<Formula, FormulaError> {
            Ok(match f {
                Formula::Falsum => Formula::Falsum,
                Formula::Member(a, b) => {
                    Formula::Member(subst_term(a, var, t), subst_term(b, var, t))
                }
                Formula::Equal(a, b) => {
                    Formula::Equal(subst_term(a, var, t), subst_term(b, var, t))
                }
                Formula::And(a, b) => Formula::and(walk(a, var, t)?, walk(b, var, t)?),
                Formula::Or(a, b) => Formula::or(walk(a, var, t)?, walk(b, var, t)?),
                Formula::Implies(a, b) => Formula::implies(walk(a, var, t)?, walk(b, var, t)?),
                Formula::Exists(v, body) | Formula::Forall(v, body) => {
                    let rebuilt = if v == var {
                        // occurrences below are bound; leave untouched
                        body.as_ref().clone()
                    } else {
                        if let TermExpr::Var(ty) = t {
                            if ty == v && body.free_vars().contains(var) {
                                return Err(FormulaError::Capture {
                                    var: var.to_string(),
                                    binder: v.to_string(),
                                });
                            }
                        }
                        walk(body, var, t)?
                    };
                    match f {
                        Formula::Exists(..) => Formula::exists(v.clone(), rebuilt),
                        _ => Formula::forall(v.clone(), rebuilt),
                    }
                }
            })
        }
        walk(self, var, t)
    }
}

// Printing precedence levels; quantifier bodies extend maximally, so a
// quantifier prints at the loosest level and gets parenthesized inside any
// connective.
const PREC_QUANT: u8 = 0;
const PREC_IMPL: u8 = 1;
const PREC_OR: u8 = 2;
const PREC_AND: u8 = 3;
const PREC_NEG: u8 = 4;
const PREC_ATOM: u8 = 5;

fn precedence(f: &Formula) -> u8 {
    match f {
        Formula::Falsum | Formula::Member(..) | Formula::Equal(..) => PREC_ATOM,
        Formula::Implies(_, rhs) if **rhs == Formula::Falsum => PREC_NEG,
        Formula::Implies(..) => PREC_IMPL,
        Formula::Or(..) => PREC_OR,
        Formula::And(..) => PREC_AND,
        Formula::Exists(..) | Formula::Forall(..) => PREC_QUANT,
    }
}

fn print_into(f: &Formula, parent: u8, out: &mut String) {
    let me = precedence(f);
    let parens = me < parent;
    if parens {
        out.push('(');
    }
    match f {
        Formula::Falsum => out.push_str("bot"),
        Formula::Member(a, b) => {
            out.push_str(&format!("{a} in {b}"));
        }
        Formula::Equal(a, b) => {
            out.push_str(&format!("{a} = {b}"));
        }
        Formula::Implies(a, rhs) if **rhs == Formula::Falsum => {
            out.push('~');
            print_into(a, PREC_NEG, out);
        }
        Formula::Implies(a, b) => {
            print_into(a, PREC_OR, out);
            out.push_str(" -> ");
            print_into(b, PREC_IMPL, out);
        }
        Formula::Or(a, b) => {
            print_into(a, PREC_OR, out);
            out.push_str(" \\/ ");
            print_into(b, PREC_AND, out);
        }
        Formula::And(a, b) => {
            print_into(a, PREC_AND, out);
            out.push_str(" /\\ ");
            print_into(b, PREC_NEG, out);
        }
        Formula::Exists(v, body) => {
            out.push_str(&format!("exists {v}. "));
            print_into(body, PREC_QUANT, out);
        }
        Formula::Forall(v, body) => {
            out.push_str(&format!("forall {v}. "));
            print_into(body, PREC_QUANT, out);
        }
    }
    if parens {
        out.push(')');
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        print_into(self, PREC_QUANT, &mut s);
        f.write_str(&s)
    }
}

/// Declares how identifiers in term position resolve: `free_vars` become
/// free variables, `names` become term-universe references. Identifiers
/// bound by a quantifier always resolve as variables.
#[derive(Clone, Default, Debug)]
pub struct ParseContext {
    free_vars: BTreeSet<Identifier>,
    names: BTreeSet<Identifier>,
}

impl ParseContext {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_free_vars<I: IntoIterator<Item = Identifier>>(mut self, vars: I) -> Self {
        self.free_vars.extend(vars);
        self
    }

    pub fn with_names<I: IntoIterator<Item = Identifier>>(mut self, names: I) -> Self {
        self.names.extend(names);
        self
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Bot,
    Forall,
    Exists,
    In,
    Eq,
    Tilde,
    AndOp,
    OrOp,
    Arrow,
    LParen,
    RParen,
    Dot,
    Eof,
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer { src: src.as_bytes(), pos: 0 }
    }

    fn skip_trivia(&mut self) {
        loop {
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
                self.pos += 1;
            }
            if self.pos < self.src.len() && self.src[self.pos] == b'#' {
                while self.pos < self.src.len() && self.src[self.pos] != b'\n' {
                    self.pos += 1;
                }
            } else {
                break;
            }
        }
    }

    /// Next token plus the offset where it starts.
    fn next(&mut self) -> Result<(Tok, usize), FormulaError> {
        self.skip_trivia();
        let at = self.pos;
        if self.pos >= self.src.len() {
            return Ok((Tok::Eof, at));
        }
        let rest = &self.src[self.pos..];
        let two = |s: &[u8]| rest.len() >= 2 && &rest[..2] == s;
        match rest[0] {
            b'(' => {
                self.pos += 1;
                Ok((Tok::LParen, at))
            }
            b')' => {
                self.pos += 1;
                Ok((Tok::RParen, at))
            }
            b'.' => {
                self.pos += 1;
                Ok((Tok::Dot, at))
            }
            b'~' => {
                self.pos += 1;
                Ok((Tok::Tilde, at))
            }
            b'=' => {
                self.pos += 1;
                Ok((Tok::Eq, at))
            }
            _ if two(b"/\\") => {
                self.pos += 2;
                Ok((Tok::AndOp, at))
            }
            _ if two(b"\\/") => {
                self.pos += 2;
                Ok((Tok::OrOp, at))
            }
            _ if two(b"->") => {
                self.pos += 2;
                Ok((Tok::Arrow, at))
            }
            c if c.is_ascii_alphanumeric() || c == b'_' => {
                let start = self.pos;
                while self.pos < self.src.len()
                    && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                let word = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                let tok = match word {
                    "bot" => Tok::Bot,
                    "forall" => Tok::Forall,
                    "exists" => Tok::Exists,
                    "in" => Tok::In,
                    _ => Tok::Ident(word.to_string()),
                };
                Ok((tok, at))
            }
            c => Err(FormulaError::Syntax {
                offset: at,
                message: format!("unexpected character `{}`", c as char),
            }),
        }
    }
}

struct Parser<'a> {
    lexer: Lexer<'a>,
    ctx: &'a ParseContext,
    lookahead: (Tok, usize),
    bound: Vec<Identifier>,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str, ctx: &'a ParseContext) -> Result<Self, FormulaError> {
        let mut lexer = Lexer::new(src);
        let lookahead = lexer.next()?;
        Ok(Parser { lexer, ctx, lookahead, bound: Vec::new() })
    }

    fn advance(&mut self) -> Result<(Tok, usize), FormulaError> {
        let next = self.lexer.next()?;
        Ok(std::mem::replace(&mut self.lookahead, next))
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), FormulaError> {
        if self.lookahead.0 == tok {
            self.advance()?;
            Ok(())
        } else {
            Err(self.unexpected(what))
        }
    }

    fn unexpected(&self, what: &str) -> FormulaError {
        FormulaError::Syntax {
            offset: self.lookahead.1,
            message: format!("expected {what}"),
        }
    }

    fn formula(&mut self) -> Result<Formula, FormulaError> {
        self.implication()
    }

    fn implication(&mut self) -> Result<Formula, FormulaError> {
        let lhs = self.disjunction()?;
        if self.lookahead.0 == Tok::Arrow {
            self.advance()?;
            let rhs = self.implication()?;
            Ok(Formula::implies(lhs, rhs))
        } else {
            Ok(lhs)
        }
    }

    fn disjunction(&mut self) -> Result<Formula, FormulaError> {
        let mut f = self.conjunction()?;
        while self.lookahead.0 == Tok::OrOp {
            self.advance()?;
            let rhs = self.conjunction()?;
            f = Formula::or(f, rhs);
        }
        Ok(f)
    }

    fn conjunction(&mut self) -> Result<Formula, FormulaError> {
        let mut f = self.negation()?;
        while self.lookahead.0 == Tok::AndOp {
            self.advance()?;
            let rhs = self.negation()?;
            f = Formula::and(f, rhs);
        }
        Ok(f)
    }

    fn negation(&mut self) -> Result<Formula, FormulaError> {
        if self.lookahead.0 == Tok::Tilde {
            self.advance()?;
            let inner = self.negation()?;
            Ok(Formula::negated(inner))
        } else {
            self.atom()
        }
    }

    fn atom(&mut self) -> Result<Formula, FormulaError> {
        match self.lookahead.0.clone() {
            Tok::Bot => {
                self.advance()?;
                Ok(Formula::Falsum)
            }
            Tok::LParen => {
                self.advance()?;
                let f = self.formula()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(f)
            }
            Tok::Forall | Tok::Exists => {
                let (quant, _) = self.advance()?;
                let var = self.identifier("a quantified variable")?;
                self.expect(Tok::Dot, "`.` after the quantified variable")?;
                self.bound.push(var.clone());
                let body = self.formula();
                self.bound.pop();
                let body = body?;
                Ok(match quant {
                    Tok::Forall => Formula::forall(var, body),
                    _ => Formula::exists(var, body),
                })
            }
            Tok::Ident(_) => {
                let lhs = self.term_expr()?;
                let rel = self.advance()?;
                let builder = match rel.0 {
                    Tok::In => Formula::member,
                    Tok::Eq => Formula::equal,
                    _ => {
                        return Err(FormulaError::Syntax {
                            offset: rel.1,
                            message: "expected `in` or `=`".to_string(),
                        })
                    }
                };
                let rhs = self.term_expr()?;
                Ok(builder(lhs, rhs))
            }
            _ => Err(self.unexpected("a formula")),
        }
    }

    fn identifier(&mut self, what: &str) -> Result<Identifier, FormulaError> {
        match self.advance()? {
            (Tok::Ident(name), _) => Ok(Identifier::new(name).expect("lexer produced identifier")),
            (_, offset) => Err(FormulaError::Syntax { offset, message: format!("expected {what}") }),
        }
    }

    fn term_expr(&mut self) -> Result<TermExpr, FormulaError> {
        match self.advance()? {
            (Tok::Ident(name), offset) => {
                let id = Identifier::new(name).expect("lexer produced identifier");
                if self.bound.contains(&id) || self.ctx.free_vars.contains(&id) {
                    Ok(TermExpr::Var(id))
                } else if self.ctx.names.contains(&id) {
                    Ok(TermExpr::Name(id))
                } else {
                    Err(FormulaError::Unbound { name: id.to_string(), offset })
                }
            }
            (_, offset) => Err(FormulaError::Syntax {
                offset,
                message: "expected an identifier".to_string(),
            }),
        }
    }
}

/// Parses `text` under the declared resolution context. The result is the
/// unique tree under the declared precedence.
pub fn parse_formula(text: &str, ctx: &ParseContext) -> Result<Formula, FormulaError> {
    let mut parser = Parser::new(text, ctx)?;
    let f = parser.formula()?;
    match parser.lookahead {
        (Tok::Eof, _) => Ok(f),
        (_, offset) => Err(FormulaError::Syntax {
            offset,
            message: "trailing input after formula".to_string(),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ctx() -> ParseContext {
        ParseContext::new()
            .with_free_vars([ident("x"), ident("y"), ident("z")])
            .with_names([ident("B"), ident("C")])
    }

    fn var(s: &str) -> TermExpr {
        TermExpr::Var(ident(s))
    }

    fn name(s: &str) -> TermExpr {
        TermExpr::Name(ident(s))
    }

    #[test]
    fn parses_disjunction_with_negation() {
        let f = parse_formula("x in B \\/ ~(x in B)", &ctx()).unwrap();
        let atom = Formula::member(var("x"), name("B"));
        assert_eq!(f, Formula::or(atom.clone(), Formula::negated(atom)));
    }

    #[test]
    fn parses_forall_identity() {
        let f = parse_formula("forall x. x = x", &ctx()).unwrap();
        assert_eq!(f, Formula::forall(ident("x"), Formula::equal(var("x"), var("x"))));
    }

    #[test]
    fn reports_syntax_error_offset() {
        match parse_formula("(x in", &ctx()) {
            Err(FormulaError::Syntax { offset, .. }) => assert_eq!(offset, 5),
            other => panic!("expected syntax error, got {other:?}"),
        }
    }

    #[test]
    fn reports_unbound_variable() {
        match parse_formula("w in B", &ctx()) {
            Err(FormulaError::Unbound { name, offset }) => {
                assert_eq!(name, "w");
                assert_eq!(offset, 0);
            }
            other => panic!("expected unbound error, got {other:?}"),
        }
    }

    #[test]
    fn precedence_shape() {
        // `a /\ b \/ c -> d` is `((a /\ b) \/ c) -> d`
        let f = parse_formula("x in B /\\ y in B \\/ z in B -> x = y", &ctx()).unwrap();
        match f {
            Formula::Implies(lhs, _) => match *lhs {
                Formula::Or(inner, _) => assert!(matches!(*inner, Formula::And(..))),
                other => panic!("expected or on the left, got {other}"),
            },
            other => panic!("expected implication, got {other}"),
        }
        // `->` is right-associative
        let g = parse_formula("bot -> bot -> bot", &ctx()).unwrap();
        assert_eq!(
            g,
            Formula::implies(Formula::Falsum, Formula::negated(Formula::Falsum)),
        );
    }

    #[test]
    fn quantifier_body_extends_to_scope_end() {
        let f = parse_formula("forall x. x in B \\/ x = y", &ctx()).unwrap();
        match f {
            Formula::Forall(_, body) => assert!(matches!(*body, Formula::Or(..))),
            other => panic!("expected forall, got {other}"),
        }
    }

    #[test]
    fn free_vars_cases() {
        let f = parse_formula("forall x. x = x", &ctx()).unwrap();
        assert!(f.free_vars().is_empty());

        let g = parse_formula("x in B", &ctx()).unwrap();
        assert_eq!(g.free_vars(), BTreeSet::from([ident("x")]));

        // x free in both conjuncts, y free in the first and bound in the second
        let h = Formula::and(
            Formula::member(var("x"), var("y")),
            Formula::exists(ident("y"), Formula::member(var("x"), var("y"))),
        );
        assert_eq!(h.free_vars(), BTreeSet::from([ident("x"), ident("y")]));
    }

    #[test]
    fn substitute_cases() {
        let f = Formula::member(var("x"), name("B"));
        assert_eq!(
            f.substitute(&ident("x"), &name("C")).unwrap(),
            Formula::member(name("C"), name("B")),
        );

        let bound = Formula::forall(ident("x"), Formula::member(var("x"), name("B")));
        assert_eq!(bound.substitute(&ident("x"), &name("C")).unwrap(), bound);

        let capture = Formula::exists(ident("y"), Formula::member(var("x"), var("y")));
        match capture.substitute(&ident("x"), &var("y")) {
            Err(FormulaError::Capture { var, binder }) => {
                assert_eq!((var.as_str(), binder.as_str()), ("x", "y"));
            }
            other => panic!("expected capture error, got {other:?}"),
        }
    }

    #[test]
    fn substitute_identity() {
        let f = parse_formula("x in B -> exists y. x in y", &ctx()).unwrap();
        assert_eq!(f.substitute(&ident("x"), &var("x")).unwrap(), f);
    }

    fn depth2_formulas() -> Vec<Formula> {
        let atoms = vec![
            Formula::Falsum,
            Formula::member(var("x"), name("B")),
            Formula::equal(var("x"), var("y")),
            Formula::member(name("B"), name("C")),
        ];
        let mut depth1 = atoms.clone();
        for a in &atoms {
            for b in &atoms {
                depth1.push(Formula::and(a.clone(), b.clone()));
                depth1.push(Formula::or(a.clone(), b.clone()));
                depth1.push(Formula::implies(a.clone(), b.clone()));
            }
            depth1.push(Formula::forall(ident("x"), a.clone()));
            depth1.push(Formula::exists(ident("y"), a.clone()));
        }
        let mut depth2 = depth1.clone();
        for a in depth1.iter().take(20) {
            for b in depth1.iter().take(20) {
                depth2.push(Formula::implies(a.clone(), b.clone()));
            }
            depth2.push(Formula::forall(ident("y"), a.clone()));
        }
        depth2
    }

    #[test]
    fn print_parse_roundtrip_enumerated() {
        let c = ctx();
        for f in depth2_formulas() {
            let printed = f.to_string();
            let reparsed = parse_formula(&printed, &c)
                .unwrap_or_else(|e| panic!("failed to reparse `{printed}`: {e}"));
            assert_eq!(reparsed, f, "printed as `{printed}`");
        }
    }

    fn arb_formula(depth: u32) -> impl Strategy<Value = Formula> {
        let atom = prop_oneof![
            Just(Formula::Falsum),
            Just(Formula::member(var("x"), name("B"))),
            Just(Formula::member(var("y"), name("C"))),
            Just(Formula::equal(var("x"), var("y"))),
            Just(Formula::equal(name("B"), name("B"))),
        ];
        atom.prop_recursive(depth, 64, 2, |inner| {
            prop_oneof![
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::and(a, b)),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::or(a, b)),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::implies(a, b)),
                inner.clone().prop_map(|a| Formula::negated(a)),
                inner.clone().prop_map(|a| Formula::forall(ident("x"), a)),
                inner.prop_map(|a| Formula::exists(ident("y"), a)),
            ]
        })
    }

    proptest! {
        #[test]
        fn print_parse_roundtrip(f in arb_formula(4)) {
            let printed = f.to_string();
            let reparsed = parse_formula(&printed, &ctx()).unwrap();
            prop_assert_eq!(reparsed, f);
        }

        #[test]
        fn substitution_free_var_equation(f in arb_formula(3)) {
            let x = ident("x");
            if f.free_vars().contains(&x) {
                if let Ok(g) = f.substitute(&x, &var("z")) {
                    let mut expected = f.free_vars();
                    expected.remove(&x);
                    expected.insert(ident("z"));
                    prop_assert_eq!(g.free_vars(), expected);
                }
            }
        }
    }
}
