//! Surface syntax of `.hcif` model files.
//!
//! ```text
//! model := decl* comp
//! decl  := ("disc" | "cont") IDENT
//! comp  := unit ("||" "{" [IDENT ("," IDENT)*] "}" unit)*
//! unit  := aut | "(" comp ")"
//! aut   := "automaton" IDENT "{" loc+ "}"
//! loc   := "location" IDENT "{" ["init" pred] ["tcp" pred] ["term" pred]
//!          ["sub" comp] edge* "}"
//! edge  := "edge" pred ":" IDENT ":" pred "->" IDENT
//! ```
//!
//! Predicates use `and`, `or`, `not`, comparisons and arithmetic with `+`,
//! `-`, `*` and `exp(..)`. A dotted variable is spelled `x'` and a stepped
//! variable `x+`; the `+` attaches to the identifier when no operand
//! follows, so `n+ = n + 1` assigns while `n + 1` adds. Identifiers may
//! contain dots, which flattened location names like `On.Cold` use.

use std::fmt;

use thiserror::Error;

use crate::model::{
    AtomicAutomaton, Composition, Declarations, Edge, LocationId, VarDecl, VarKind,
};
use crate::predicate::{CmpOp, Expr, Predicate, VarRef};

/// Position of a token in the source text, 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}", self.line, self.col)
    }
}

/// A syntax error with its source position.
#[derive(Debug, Clone, Error, PartialEq)]
#[error("{pos}: {message}")]
pub struct ParseError {
    pub pos: Pos,
    pub message: String,
}

/// A parsed model file: variable declarations and the composition term.
/// Named automata appear inline in the term.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelFile {
    pub decls: Vec<VarDecl>,
    pub comp: Composition,
}

impl ModelFile {
    pub fn declarations(&self) -> Declarations {
        Declarations::new(self.decls.clone())
    }

    /// All automata defined in the file, outermost first.
    pub fn named_automata(&self) -> Vec<&AtomicAutomaton> {
        fn walk<'a>(c: &'a Composition, out: &mut Vec<&'a AtomicAutomaton>) {
            match c {
                Composition::Atomic(a) => {
                    out.push(a);
                    for sub in a.hierarchy.values() {
                        walk(sub, out);
                    }
                }
                Composition::Postfix { child, parent } => {
                    out.push(parent);
                    walk(child, out);
                }
                Composition::Parallel { left, right, .. } => {
                    walk(left, out);
                    walk(right, out);
                }
            }
        }
        let mut out = Vec::new();
        walk(&self.comp, &mut out);
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    DottedIdent(String),
    SteppedIdent { name: String, dotted: bool },
    Number(f64),
    KwDisc,
    KwCont,
    KwAutomaton,
    KwLocation,
    KwInit,
    KwTcp,
    KwTerm,
    KwSub,
    KwEdge,
    KwAnd,
    KwOr,
    KwNot,
    KwTrue,
    KwFalse,
    KwExp,
    LBrace,
    RBrace,
    LParen,
    RParen,
    Comma,
    Colon,
    Arrow,
    ParPar,
    Plus,
    Minus,
    Star,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{}`", s),
            Tok::DottedIdent(s) => write!(f, "`{}'`", s),
            Tok::SteppedIdent { name, dotted } => {
                write!(f, "`{}{}+`", name, if *dotted { "'" } else { "" })
            }
            Tok::Number(n) => write!(f, "`{}`", n),
            Tok::KwDisc => write!(f, "`disc`"),
            Tok::KwCont => write!(f, "`cont`"),
            Tok::KwAutomaton => write!(f, "`automaton`"),
            Tok::KwLocation => write!(f, "`location`"),
            Tok::KwInit => write!(f, "`init`"),
            Tok::KwTcp => write!(f, "`tcp`"),
            Tok::KwTerm => write!(f, "`term`"),
            Tok::KwSub => write!(f, "`sub`"),
            Tok::KwEdge => write!(f, "`edge`"),
            Tok::KwAnd => write!(f, "`and`"),
            Tok::KwOr => write!(f, "`or`"),
            Tok::KwNot => write!(f, "`not`"),
            Tok::KwTrue => write!(f, "`true`"),
            Tok::KwFalse => write!(f, "`false`"),
            Tok::KwExp => write!(f, "`exp`"),
            Tok::LBrace => write!(f, "`{{`"),
            Tok::RBrace => write!(f, "`}}`"),
            Tok::LParen => write!(f, "`(`"),
            Tok::RParen => write!(f, "`)`"),
            Tok::Comma => write!(f, "`,`"),
            Tok::Colon => write!(f, "`:`"),
            Tok::Arrow => write!(f, "`->`"),
            Tok::ParPar => write!(f, "`||`"),
            Tok::Plus => write!(f, "`+`"),
            Tok::Minus => write!(f, "`-`"),
            Tok::Star => write!(f, "`*`"),
            Tok::Eq => write!(f, "`=`"),
            Tok::Ne => write!(f, "`!=`"),
            Tok::Lt => write!(f, "`<`"),
            Tok::Le => write!(f, "`<=`"),
            Tok::Gt => write!(f, "`>`"),
            Tok::Ge => write!(f, "`>=`"),
        }
    }
}

fn lex(src: &str) -> Result<Vec<(Tok, Pos)>, ParseError> {
    let mut out = Vec::new();
    let chars: Vec<char> = src.chars().collect();
    let mut i = 0;
    let mut line = 1;
    let mut col = 1;

    let is_ident_start = |c: char| c.is_ascii_alphabetic() || c == '_';
    let is_ident_char = |c: char| c.is_ascii_alphanumeric() || c == '_';

    fn advance(chars: &[char], i: &mut usize, line: &mut usize, col: &mut usize, n: usize) {
        for _ in 0..n {
            if chars[*i] == '\n' {
                *line += 1;
                *col = 1;
            } else {
                *col += 1;
            }
            *i += 1;
        }
    }

    while i < chars.len() {
        let c = chars[i];
        let pos = Pos { line, col };

        if c.is_whitespace() {
            advance(&chars, &mut i, &mut line, &mut col, 1);
            continue;
        }
        if c == '/' && chars.get(i + 1) == Some(&'/') {
            while i < chars.len() && chars[i] != '\n' {
                advance(&chars, &mut i, &mut line, &mut col, 1);
            }
            continue;
        }
        if is_ident_start(c) {
            let mut j = i;
            while j < chars.len() && is_ident_char(chars[j]) {
                j += 1;
            }
            // Dotted segments inside identifiers carry flattened names.
            while chars.get(j) == Some(&'.')
                && chars.get(j + 1).map(|c| is_ident_start(*c)).unwrap_or(false)
            {
                j += 1;
                while j < chars.len() && is_ident_char(chars[j]) {
                    j += 1;
                }
            }
            let word: String = chars[i..j].iter().collect();
            let n = j - i;
            advance(&chars, &mut i, &mut line, &mut col, n);

            let keyword = match word.as_str() {
                "disc" => Some(Tok::KwDisc),
                "cont" => Some(Tok::KwCont),
                "automaton" => Some(Tok::KwAutomaton),
                "location" => Some(Tok::KwLocation),
                "init" => Some(Tok::KwInit),
                "tcp" => Some(Tok::KwTcp),
                "term" => Some(Tok::KwTerm),
                "sub" => Some(Tok::KwSub),
                "edge" => Some(Tok::KwEdge),
                "and" => Some(Tok::KwAnd),
                "or" => Some(Tok::KwOr),
                "not" => Some(Tok::KwNot),
                "true" => Some(Tok::KwTrue),
                "false" => Some(Tok::KwFalse),
                "exp" => Some(Tok::KwExp),
                _ => None,
            };
            if let Some(tok) = keyword {
                out.push((tok, pos));
                continue;
            }

            let mut dotted = false;
            if chars.get(i) == Some(&'\'') {
                dotted = true;
                advance(&chars, &mut i, &mut line, &mut col, 1);
            }
            // A `+` glued to the identifier is the stepped marker unless an
            // operand follows, in which case it is binary addition.
            let stepped = chars.get(i) == Some(&'+')
                && !chars
                    .get(i + 1)
                    .map(|n| is_ident_char(*n) || *n == '(' || *n == '-' || *n == '.')
                    .unwrap_or(false);
            if stepped {
                advance(&chars, &mut i, &mut line, &mut col, 1);
                out.push((Tok::SteppedIdent { name: word, dotted }, pos));
            } else if dotted {
                out.push((Tok::DottedIdent(word), pos));
            } else {
                out.push((Tok::Ident(word), pos));
            }
            continue;
        }
        if c.is_ascii_digit() {
            let mut j = i;
            while j < chars.len() && chars[j].is_ascii_digit() {
                j += 1;
            }
            if chars.get(j) == Some(&'.')
                && chars.get(j + 1).map(|c| c.is_ascii_digit()).unwrap_or(false)
            {
                j += 1;
                while j < chars.len() && chars[j].is_ascii_digit() {
                    j += 1;
                }
            }
            let text: String = chars[i..j].iter().collect();
            let value: f64 = text.parse().map_err(|_| ParseError {
                pos,
                message: format!("invalid number `{}`", text),
            })?;
            let n = j - i;
            advance(&chars, &mut i, &mut line, &mut col, n);
            out.push((Tok::Number(value), pos));
            continue;
        }

        let two: Option<Tok> = match (c, chars.get(i + 1)) {
            ('-', Some('>')) => Some(Tok::Arrow),
            ('|', Some('|')) => Some(Tok::ParPar),
            ('<', Some('=')) => Some(Tok::Le),
            ('>', Some('=')) => Some(Tok::Ge),
            ('!', Some('=')) => Some(Tok::Ne),
            _ => None,
        };
        if let Some(tok) = two {
            advance(&chars, &mut i, &mut line, &mut col, 2);
            out.push((tok, pos));
            continue;
        }
        let one = match c {
            '{' => Tok::LBrace,
            '}' => Tok::RBrace,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            ',' => Tok::Comma,
            ':' => Tok::Colon,
            '+' => Tok::Plus,
            '-' => Tok::Minus,
            '*' => Tok::Star,
            '=' => Tok::Eq,
            '<' => Tok::Lt,
            '>' => Tok::Gt,
            _ => {
                return Err(ParseError {
                    pos,
                    message: format!("unexpected character `{}`", c),
                })
            }
        };
        advance(&chars, &mut i, &mut line, &mut col, 1);
        out.push((one, pos));
    }
    Ok(out)
}

/// Unified expression tree built by the parser, split into predicates and
/// arithmetic afterwards.
#[derive(Debug, Clone)]
enum Ast {
    Num(f64, Pos),
    Bool(bool, Pos),
    Var(VarRef, Pos),
    Neg(Box<Ast>, Pos),
    Add(Box<Ast>, Box<Ast>, Pos),
    Sub(Box<Ast>, Box<Ast>, Pos),
    Mul(Box<Ast>, Box<Ast>, Pos),
    Exp(Box<Ast>, Pos),
    Cmp(CmpOp, Box<Ast>, Box<Ast>, Pos),
    Not(Box<Ast>, Pos),
    And(Box<Ast>, Box<Ast>, Pos),
    Or(Box<Ast>, Box<Ast>, Pos),
}

impl Ast {
    fn pos(&self) -> Pos {
        match self {
            Ast::Num(_, p)
            | Ast::Bool(_, p)
            | Ast::Var(_, p)
            | Ast::Neg(_, p)
            | Ast::Add(_, _, p)
            | Ast::Sub(_, _, p)
            | Ast::Mul(_, _, p)
            | Ast::Exp(_, p)
            | Ast::Cmp(_, _, _, p)
            | Ast::Not(_, p)
            | Ast::And(_, _, p)
            | Ast::Or(_, _, p) => *p,
        }
    }

    fn into_expr(self) -> Result<Expr, ParseError> {
        match self {
            Ast::Num(n, _) => Ok(Expr::Const(n)),
            Ast::Var(v, _) => Ok(Expr::Var(v)),
            Ast::Neg(a, _) => Ok(Expr::Neg(Box::new(a.into_expr()?))),
            Ast::Add(a, b, _) => Ok(Expr::Add(Box::new(a.into_expr()?), Box::new(b.into_expr()?))),
            Ast::Sub(a, b, _) => Ok(Expr::Sub(Box::new(a.into_expr()?), Box::new(b.into_expr()?))),
            Ast::Mul(a, b, _) => Ok(Expr::Mul(Box::new(a.into_expr()?), Box::new(b.into_expr()?))),
            Ast::Exp(a, _) => Ok(Expr::Exp(Box::new(a.into_expr()?))),
            other => Err(ParseError {
                pos: other.pos(),
                message: "expected an arithmetic expression, found a boolean one".into(),
            }),
        }
    }

    fn into_predicate(self) -> Result<Predicate, ParseError> {
        match self {
            Ast::Bool(b, _) => Ok(Predicate::Lit(b)),
            Ast::Cmp(op, a, b, _) => {
                Ok(Predicate::Cmp(op, a.into_expr()?, b.into_expr()?))
            }
            Ast::Not(a, _) => Ok(Predicate::Not(Box::new(a.into_predicate()?))),
            Ast::And(a, b, _) => Ok(Predicate::And(
                Box::new(a.into_predicate()?),
                Box::new(b.into_predicate()?),
            )),
            Ast::Or(a, b, _) => Ok(Predicate::Or(
                Box::new(a.into_predicate()?),
                Box::new(b.into_predicate()?),
            )),
            other => Err(ParseError {
                pos: other.pos(),
                message: "expected a boolean predicate, found an arithmetic expression".into(),
            }),
        }
    }
}

struct Parser {
    toks: Vec<(Tok, Pos)>,
    at: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|(t, _)| t)
    }

    fn pos(&self) -> Pos {
        self.toks
            .get(self.at)
            .or_else(|| self.toks.last())
            .map(|(_, p)| *p)
            .unwrap_or(Pos { line: 1, col: 1 })
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.at).map(|(t, _)| t.clone());
        if t.is_some() {
            self.at += 1;
        }
        t
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError { pos: self.pos(), message: message.into() })
    }

    fn expect(&mut self, tok: Tok) -> Result<(), ParseError> {
        match self.peek() {
            Some(t) if *t == tok => {
                self.at += 1;
                Ok(())
            }
            Some(t) => {
                let msg = format!("expected {}, found {}", tok, t);
                self.err(msg)
            }
            None => self.err(format!("expected {}, found end of input", tok)),
        }
    }

    fn ident(&mut self, what: &str) -> Result<String, ParseError> {
        match self.peek().cloned() {
            Some(Tok::Ident(s)) => {
                self.at += 1;
                Ok(s)
            }
            Some(t) => {
                let msg = format!("expected {}, found {}", what, t);
                self.err(msg)
            }
            None => self.err(format!("expected {}, found end of input", what)),
        }
    }

    fn model(&mut self) -> Result<ModelFile, ParseError> {
        let mut decls = Vec::new();
        loop {
            match self.peek() {
                Some(Tok::KwDisc) => {
                    self.at += 1;
                    decls.push(VarDecl { name: self.ident("a variable name")?, kind: VarKind::Discrete });
                }
                Some(Tok::KwCont) => {
                    self.at += 1;
                    decls.push(VarDecl { name: self.ident("a variable name")?, kind: VarKind::Continuous });
                }
                _ => break,
            }
        }
        let comp = self.comp()?;
        if self.peek().is_some() {
            return self.err("trailing input after the composition");
        }
        Ok(ModelFile { decls, comp })
    }

    fn comp(&mut self) -> Result<Composition, ParseError> {
        let mut left = self.comp_unit()?;
        while self.peek() == Some(&Tok::ParPar) {
            self.at += 1;
            self.expect(Tok::LBrace)?;
            let mut sync = std::collections::BTreeSet::new();
            if self.peek() != Some(&Tok::RBrace) {
                loop {
                    sync.insert(self.ident("an action name")?);
                    if self.peek() == Some(&Tok::Comma) {
                        self.at += 1;
                    } else {
                        break;
                    }
                }
            }
            self.expect(Tok::RBrace)?;
            let right = self.comp_unit()?;
            left = Composition::parallel(left, sync, right);
        }
        Ok(left)
    }

    fn comp_unit(&mut self) -> Result<Composition, ParseError> {
        match self.peek() {
            Some(Tok::KwAutomaton) => Ok(Composition::Atomic(self.automaton()?)),
            Some(Tok::LParen) => {
                self.at += 1;
                let c = self.comp()?;
                self.expect(Tok::RParen)?;
                Ok(c)
            }
            _ => self.err("expected `automaton` or `(`"),
        }
    }

    fn automaton(&mut self) -> Result<AtomicAutomaton, ParseError> {
        self.expect(Tok::KwAutomaton)?;
        let name = self.ident("an automaton name")?;
        self.expect(Tok::LBrace)?;
        let mut locations = Vec::new();
        let mut init = std::collections::BTreeMap::new();
        let mut tcp = std::collections::BTreeMap::new();
        let mut term = std::collections::BTreeMap::new();
        let mut hierarchy = std::collections::BTreeMap::new();
        let mut edges = Vec::new();
        while self.peek() == Some(&Tok::KwLocation) {
            self.at += 1;
            let loc = LocationId::new(self.ident("a location name")?);
            self.expect(Tok::LBrace)?;
            let mut loc_init = None;
            let mut loc_tcp = None;
            let mut loc_term = None;
            loop {
                match self.peek() {
                    Some(Tok::KwInit) => {
                        self.at += 1;
                        if loc_init.replace(self.predicate()?).is_some() {
                            return self.err("duplicate `init` in location");
                        }
                    }
                    Some(Tok::KwTcp) => {
                        self.at += 1;
                        if loc_tcp.replace(self.predicate()?).is_some() {
                            return self.err("duplicate `tcp` in location");
                        }
                    }
                    Some(Tok::KwTerm) => {
                        self.at += 1;
                        if loc_term.replace(self.predicate()?).is_some() {
                            return self.err("duplicate `term` in location");
                        }
                    }
                    Some(Tok::KwSub) => {
                        self.at += 1;
                        if hierarchy.contains_key(&loc) {
                            return self.err("duplicate `sub` in location");
                        }
                        hierarchy.insert(loc.clone(), self.comp()?);
                    }
                    Some(Tok::KwEdge) => {
                        self.at += 1;
                        let guard = self.predicate()?;
                        self.expect(Tok::Colon)?;
                        let action = self.ident("an action name")?;
                        self.expect(Tok::Colon)?;
                        let reset = self.predicate()?;
                        self.expect(Tok::Arrow)?;
                        let target = LocationId::new(self.ident("a location name")?);
                        edges.push(Edge { source: loc.clone(), guard, action, reset, target });
                    }
                    Some(Tok::RBrace) => {
                        self.at += 1;
                        break;
                    }
                    _ => return self.err("expected `init`, `tcp`, `term`, `sub`, `edge` or `}`"),
                }
            }
            init.insert(loc.clone(), loc_init.unwrap_or(Predicate::FALSE));
            tcp.insert(loc.clone(), loc_tcp.unwrap_or(Predicate::TRUE));
            term.insert(loc.clone(), loc_term.unwrap_or(Predicate::FALSE));
            locations.push(loc);
        }
        if locations.is_empty() {
            return self.err("automaton needs at least one location");
        }
        self.expect(Tok::RBrace)?;
        Ok(AtomicAutomaton { name, locations, init, tcp, edges, term, hierarchy, pinned: None })
    }

    fn predicate(&mut self) -> Result<Predicate, ParseError> {
        self.or_ast()?.into_predicate()
    }

    fn or_ast(&mut self) -> Result<Ast, ParseError> {
        let mut left = self.and_ast()?;
        while self.peek() == Some(&Tok::KwOr) {
            let pos = self.pos();
            self.at += 1;
            let right = self.and_ast()?;
            left = Ast::Or(Box::new(left), Box::new(right), pos);
        }
        Ok(left)
    }

    fn and_ast(&mut self) -> Result<Ast, ParseError> {
        let mut left = self.not_ast()?;
        while self.peek() == Some(&Tok::KwAnd) {
            let pos = self.pos();
            self.at += 1;
            let right = self.not_ast()?;
            left = Ast::And(Box::new(left), Box::new(right), pos);
        }
        Ok(left)
    }

    fn not_ast(&mut self) -> Result<Ast, ParseError> {
        if self.peek() == Some(&Tok::KwNot) {
            let pos = self.pos();
            self.at += 1;
            let inner = self.not_ast()?;
            return Ok(Ast::Not(Box::new(inner), pos));
        }
        self.cmp_ast()
    }

    fn cmp_ast(&mut self) -> Result<Ast, ParseError> {
        let left = self.sum_ast()?;
        let op = match self.peek() {
            Some(Tok::Eq) => Some(CmpOp::Eq),
            Some(Tok::Ne) => Some(CmpOp::Ne),
            Some(Tok::Lt) => Some(CmpOp::Lt),
            Some(Tok::Le) => Some(CmpOp::Le),
            Some(Tok::Gt) => Some(CmpOp::Gt),
            Some(Tok::Ge) => Some(CmpOp::Ge),
            _ => None,
        };
        match op {
            None => Ok(left),
            Some(op) => {
                let pos = self.pos();
                self.at += 1;
                let right = self.sum_ast()?;
                Ok(Ast::Cmp(op, Box::new(left), Box::new(right), pos))
            }
        }
    }

    fn sum_ast(&mut self) -> Result<Ast, ParseError> {
        let mut left = self.mul_ast()?;
        loop {
            let pos = self.pos();
            match self.peek() {
                Some(Tok::Plus) => {
                    self.at += 1;
                    let right = self.mul_ast()?;
                    left = Ast::Add(Box::new(left), Box::new(right), pos);
                }
                Some(Tok::Minus) => {
                    self.at += 1;
                    let right = self.mul_ast()?;
                    left = Ast::Sub(Box::new(left), Box::new(right), pos);
                }
                _ => break,
            }
        }
        Ok(left)
    }

    fn mul_ast(&mut self) -> Result<Ast, ParseError> {
        let mut left = self.unary_ast()?;
        while self.peek() == Some(&Tok::Star) {
            let pos = self.pos();
            self.at += 1;
            let right = self.unary_ast()?;
            left = Ast::Mul(Box::new(left), Box::new(right), pos);
        }
        Ok(left)
    }

    fn unary_ast(&mut self) -> Result<Ast, ParseError> {
        if self.peek() == Some(&Tok::Minus) {
            let pos = self.pos();
            self.at += 1;
            let inner = self.unary_ast()?;
            return Ok(Ast::Neg(Box::new(inner), pos));
        }
        self.atom_ast()
    }

    fn atom_ast(&mut self) -> Result<Ast, ParseError> {
        let pos = self.pos();
        match self.next() {
            Some(Tok::Number(n)) => Ok(Ast::Num(n, pos)),
            Some(Tok::KwTrue) => Ok(Ast::Bool(true, pos)),
            Some(Tok::KwFalse) => Ok(Ast::Bool(false, pos)),
            Some(Tok::Ident(name)) => Ok(Ast::Var(VarRef::plain(name), pos)),
            Some(Tok::DottedIdent(name)) => Ok(Ast::Var(VarRef::dotted(name), pos)),
            Some(Tok::SteppedIdent { name, dotted }) => {
                Ok(Ast::Var(VarRef { name, dotted, stepped: true }, pos))
            }
            Some(Tok::KwExp) => {
                self.expect(Tok::LParen)?;
                let inner = self.sum_ast()?;
                self.expect(Tok::RParen)?;
                Ok(Ast::Exp(Box::new(inner), pos))
            }
            Some(Tok::LParen) => {
                let inner = self.or_ast()?;
                self.expect(Tok::RParen)?;
                Ok(inner)
            }
            Some(t) => Err(ParseError { pos, message: format!("unexpected {} in expression", t) }),
            None => Err(ParseError { pos, message: "unexpected end of input in expression".into() }),
        }
    }
}

/// Parses a model file.
pub fn parse(src: &str) -> Result<ModelFile, ParseError> {
    let toks = lex(src)?;
    Parser { toks, at: 0 }.model()
}

/// Parses a single predicate, mainly for tests and tools.
pub fn parse_predicate(src: &str) -> Result<Predicate, ParseError> {
    let toks = lex(src)?;
    let mut p = Parser { toks, at: 0 };
    let pred = p.predicate()?;
    if p.peek().is_some() {
        return p.err("trailing input after the predicate");
    }
    Ok(pred)
}
