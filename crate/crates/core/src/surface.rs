//! ASCII concrete syntax: lexer, parser and printer.
//!
//! ```text
//! type ::= Top | X | type -> type | type /\ type
//!        | (forall_k | forall_t | forall) X [<: type] . type
//! term ::= top | x | fun (x : type) => term | tfun (X <: type) => term
//!        | term term | term [type] | (term)
//! unit ::= system ID ; ctx [entry {, entry}] ; (sub type <: type | term term [: type] | derivation JSON)
//! ```

use std::collections::BTreeSet;
use std::fmt;

use crate::deriv::{Derivation, Judgment};
use crate::syntax::{fresh_name, Context, Entry, Flavor, Name, Term, Type};
use crate::system::{SystemId, UnknownSystem};
use crate::wf::{check_constructs, check_term_constructs, WfError};

const RESERVED: [&str; 7] = ["Top", "top", "forall_k", "forall_t", "forall", "fun", "tfun"];

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{line}:{column}: expected {expected}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub expected: String,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SourceError {
    #[error("parse error at {0}")]
    Parse(#[from] ParseError),
    #[error("{construct} is not allowed in system {system}")]
    SystemMismatch { system: SystemId, construct: String },
    #[error("bad derivation: {0}")]
    Derivation(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Payload {
    Sub { lhs: Type, rhs: Type },
    Term { term: Term, ascription: Option<Type> },
    Derivation(Box<Derivation>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SourceUnit {
    pub system: SystemId,
    pub ctx: Context,
    pub payload: Payload,
}

// ---------------------------------------------------------------- lexer

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Arrow,
    Meet,
    SubOp,
    Dot,
    LParen,
    RParen,
    LBrack,
    RBrack,
    Colon,
    Comma,
    Semi,
    FatArrow,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Arrow => "`->`".into(),
            Tok::Meet => "`/\\`".into(),
            Tok::SubOp => "`<:`".into(),
            Tok::Dot => "`.`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::LBrack => "`[`".into(),
            Tok::RBrack => "`]`".into(),
            Tok::Colon => "`:`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Semi => "`;`".into(),
            Tok::FatArrow => "`=>`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
    peeked: Option<(Tok, usize, usize)>,
    tscope: Vec<Name>,
    mscope: Vec<Name>,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Parser<'a> {
        Parser {
            src,
            pos: 0,
            peeked: None,
            tscope: Vec::new(),
            mscope: Vec::new(),
        }
    }

    fn skip_trivia(&mut self) {
        let bytes = self.src.as_bytes();
        loop {
            while self.pos < bytes.len() && (bytes[self.pos] as char).is_whitespace() {
                self.pos += 1;
            }
            if self.src[self.pos..].starts_with("--") {
                while self.pos < bytes.len() && bytes[self.pos] != b'\n' {
                    self.pos += 1;
                }
            } else {
                break;
            }
        }
    }

    fn line_col(&self, at: usize) -> (usize, usize) {
        let before = &self.src[..at];
        let line = before.matches('\n').count() + 1;
        let column = before.rfind('\n').map(|i| at - i).unwrap_or(at + 1);
        (line, column)
    }

    /// Lexes one token; returns it with its start and end offsets.
    fn lex(&mut self) -> Result<(Tok, usize, usize), ParseError> {
        self.skip_trivia();
        let start = self.pos;
        let rest = &self.src[self.pos..];
        let two = |p: &str| rest.starts_with(p);
        let (tok, len) = if rest.is_empty() {
            (Tok::Eof, 0)
        } else if two("->") {
            (Tok::Arrow, 2)
        } else if two("/\\") {
            (Tok::Meet, 2)
        } else if two("<:") {
            (Tok::SubOp, 2)
        } else if two("=>") {
            (Tok::FatArrow, 2)
        } else {
            let c = rest.chars().next().unwrap();
            match c {
                '.' => (Tok::Dot, 1),
                '(' => (Tok::LParen, 1),
                ')' => (Tok::RParen, 1),
                '[' => (Tok::LBrack, 1),
                ']' => (Tok::RBrack, 1),
                ':' => (Tok::Colon, 1),
                ',' => (Tok::Comma, 1),
                ';' => (Tok::Semi, 1),
                c if c.is_ascii_alphabetic() || c == '_' => {
                    let len = rest
                        .find(|ch: char| !(ch.is_ascii_alphanumeric() || ch == '_' || ch == '\'' || ch == '-'))
                        .unwrap_or(rest.len());
                    // `-` is only part of a word when it is not the start of `->`
                    let mut len = len;
                    if let Some(i) = rest[..len].find("->") {
                        len = i;
                    }
                    let word = rest[..len].trim_end_matches('-');
                    (Tok::Ident(word.to_string()), word.len())
                }
                _ => {
                    let (line, column) = self.line_col(start);
                    return Err(ParseError {
                        line,
                        column,
                        expected: format!("a token, found `{c}`"),
                    });
                }
            }
        };
        self.pos += len;
        Ok((tok, start, self.pos))
    }

    fn peek(&mut self) -> Result<&Tok, ParseError> {
        if self.peeked.is_none() {
            let t = self.lex()?;
            self.peeked = Some(t);
        }
        Ok(&self.peeked.as_ref().unwrap().0)
    }

    fn next(&mut self) -> Result<(Tok, usize), ParseError> {
        if let Some((t, s, _)) = self.peeked.take() {
            return Ok((t, s));
        }
        let (t, s, _) = self.lex()?;
        Ok((t, s))
    }

    fn error_here(&mut self, expected: &str) -> ParseError {
        let (found, at) = match self.peeked.clone() {
            Some((t, s, _)) => (t.describe(), s),
            None => match self.lex() {
                Ok((t, s, e)) => {
                    self.peeked = Some((t.clone(), s, e));
                    (t.describe(), s)
                }
                Err(e) => return e,
            },
        };
        let (line, column) = self.line_col(at);
        ParseError {
            line,
            column,
            expected: format!("{expected}, found {found}"),
        }
    }

    fn expect(&mut self, tok: Tok) -> Result<(), ParseError> {
        if *self.peek()? == tok {
            self.next()?;
            Ok(())
        } else {
            Err(self.error_here(&tok.describe()))
        }
    }

    fn eat(&mut self, tok: &Tok) -> Result<bool, ParseError> {
        if self.peek()? == tok {
            self.next()?;
            Ok(true)
        } else {
            Ok(false)
        }
    }

    fn ident(&mut self, what: &str) -> Result<Name, ParseError> {
        match self.peek()?.clone() {
            Tok::Ident(s) if !RESERVED.contains(&s.as_str()) => {
                self.next()?;
                Ok(Name::from(s))
            }
            _ => Err(self.error_here(what)),
        }
    }

    fn keyword(&mut self, kw: &str) -> Result<(), ParseError> {
        match self.peek()? {
            Tok::Ident(s) if s == kw => {
                self.next()?;
                Ok(())
            }
            _ => Err(self.error_here(&format!("`{kw}`"))),
        }
    }

    fn at_keyword(&mut self, kw: &str) -> Result<bool, ParseError> {
        Ok(matches!(self.peek()?, Tok::Ident(s) if s == kw))
    }

    fn quantifier_flavor(&mut self) -> Result<Option<Flavor>, ParseError> {
        Ok(match self.peek()? {
            Tok::Ident(s) if s == "forall_k" => Some(Flavor::Kernel),
            Tok::Ident(s) if s == "forall_t" => Some(Flavor::TopStyle),
            Tok::Ident(s) if s == "forall" => Some(Flavor::Plain),
            _ => None,
        })
    }

    // ------------------------------------------------------------ types

    fn ty(&mut self) -> Result<Type, ParseError> {
        if let Some(flavor) = self.quantifier_flavor()? {
            return self.quantifier(flavor);
        }
        let lhs = self.meet()?;
        if self.eat(&Tok::Arrow)? {
            let rhs = self.ty()?;
            Ok(Type::arrow(lhs, rhs))
        } else {
            Ok(lhs)
        }
    }

    fn quantifier(&mut self, flavor: Flavor) -> Result<Type, ParseError> {
        self.next()?;
        let x = self.ident("a type variable")?;
        let bound = if self.eat(&Tok::SubOp)? { self.ty()? } else { Type::Top };
        self.expect(Tok::Dot)?;
        self.tscope.push(x.clone());
        let body = self.ty();
        self.tscope.pop();
        let body = body?;
        Ok(Type::Forall(Box::new(crate::syntax::Quant {
            flavor,
            hint: crate::syntax::Hint(x),
            bound,
            body,
        })))
    }

    fn meet(&mut self) -> Result<Type, ParseError> {
        let mut acc = self.type_atom()?;
        while self.eat(&Tok::Meet)? {
            let rhs = self.type_atom()?;
            acc = Type::meet(acc, rhs);
        }
        Ok(acc)
    }

    fn type_atom(&mut self) -> Result<Type, ParseError> {
        if let Some(flavor) = self.quantifier_flavor()? {
            return self.quantifier(flavor);
        }
        match self.peek()?.clone() {
            Tok::Ident(s) if s == "Top" => {
                self.next()?;
                Ok(Type::Top)
            }
            Tok::LParen => {
                self.next()?;
                let t = self.ty()?;
                self.expect(Tok::RParen)?;
                Ok(t)
            }
            Tok::Ident(_) => {
                let x = self.ident("a type")?;
                Ok(self.resolve_type(x))
            }
            _ => Err(self.error_here("a type")),
        }
    }

    fn resolve_type(&self, x: Name) -> Type {
        match self.tscope.iter().rposition(|n| *n == x) {
            Some(p) => Type::Bound((self.tscope.len() - 1 - p) as u32),
            None => Type::Var(x),
        }
    }

    // ------------------------------------------------------------ terms

    fn term(&mut self) -> Result<Term, ParseError> {
        if self.at_keyword("fun")? || self.at_keyword("tfun")? {
            return self.abstraction();
        }
        let mut acc = self.term_atom()?;
        loop {
            if self.eat(&Tok::LBrack)? {
                let ty = self.ty()?;
                self.expect(Tok::RBrack)?;
                acc = Term::tapp(acc, ty);
            } else if self.starts_term_atom()? {
                let arg = self.term_atom()?;
                acc = Term::app(acc, arg);
            } else {
                return Ok(acc);
            }
        }
    }

    fn starts_term_atom(&mut self) -> Result<bool, ParseError> {
        Ok(match self.peek()? {
            Tok::LParen => true,
            Tok::Ident(s) => !RESERVED.contains(&s.as_str()) || s == "top" || s == "fun" || s == "tfun",
            _ => false,
        })
    }

    fn abstraction(&mut self) -> Result<Term, ParseError> {
        let is_type = self.at_keyword("tfun")?;
        self.next()?;
        self.expect(Tok::LParen)?;
        if is_type {
            let x = self.ident("a type variable")?;
            self.expect(Tok::SubOp)?;
            let bound = self.ty()?;
            self.expect(Tok::RParen)?;
            self.expect(Tok::FatArrow)?;
            self.tscope.push(x.clone());
            let body = self.term();
            self.tscope.pop();
            Ok(Term::TLam(Box::new(crate::syntax::TLam {
                hint: crate::syntax::Hint(x),
                bound,
                body: body?,
            })))
        } else {
            let x = self.ident("a term variable")?;
            self.expect(Tok::Colon)?;
            let annot = self.ty()?;
            self.expect(Tok::RParen)?;
            self.expect(Tok::FatArrow)?;
            self.mscope.push(x.clone());
            let body = self.term();
            self.mscope.pop();
            Ok(Term::Lam(Box::new(crate::syntax::Lam {
                hint: crate::syntax::Hint(x),
                annot,
                body: body?,
            })))
        }
    }

    fn term_atom(&mut self) -> Result<Term, ParseError> {
        if self.at_keyword("fun")? || self.at_keyword("tfun")? {
            return self.abstraction();
        }
        match self.peek()?.clone() {
            Tok::Ident(s) if s == "top" => {
                self.next()?;
                Ok(Term::Top)
            }
            Tok::LParen => {
                self.next()?;
                let t = self.term()?;
                self.expect(Tok::RParen)?;
                Ok(t)
            }
            Tok::Ident(_) => {
                let x = self.ident("a term")?;
                Ok(match self.mscope.iter().rposition(|n| *n == x) {
                    Some(p) => Term::Bound((self.mscope.len() - 1 - p) as u32),
                    None => Term::Var(x),
                })
            }
            _ => Err(self.error_here("a term")),
        }
    }

    // ---------------------------------------------------------- contexts

    /// Entries up to (not including) a terminator token.
    fn entries(&mut self, terminator: &Tok) -> Result<Context, ParseError> {
        let mut ctx = Context::new();
        if self.peek()? == terminator {
            return Ok(ctx);
        }
        loop {
            let x = self.ident("a context entry")?;
            if self.eat(&Tok::SubOp)? {
                let b = self.ty()?;
                ctx.push_type_var(x, b);
            } else if self.eat(&Tok::Colon)? {
                let t = self.ty()?;
                ctx.push_term_var(x, t);
            } else {
                return Err(self.error_here("`<:` or `:`"));
            }
            if !self.eat(&Tok::Comma)? {
                return Ok(ctx);
            }
        }
    }

    fn end(&mut self) -> Result<(), ParseError> {
        if *self.peek()? == Tok::Eof {
            Ok(())
        } else {
            Err(self.error_here("end of input"))
        }
    }

    /// Byte offset just after the current (peeked or consumed) position.
    fn rest_after_peek(&mut self) -> &'a str {
        match self.peeked.take() {
            Some((_, s, _)) => &self.src[s..],
            None => &self.src[self.pos..],
        }
    }
}

pub fn parse_type(text: &str) -> Result<Type, ParseError> {
    let mut p = Parser::new(text);
    let t = p.ty()?;
    p.end()?;
    Ok(t)
}

pub fn parse_term(text: &str) -> Result<Term, ParseError> {
    let mut p = Parser::new(text);
    let t = p.term()?;
    p.end()?;
    Ok(t)
}

/// Context entries separated by commas, with no `ctx` keyword.
pub fn parse_context(text: &str) -> Result<Context, ParseError> {
    let mut p = Parser::new(text);
    let c = p.entries(&Tok::Eof)?;
    p.end()?;
    Ok(c)
}

pub fn parse_source(text: &str) -> Result<SourceUnit, SourceError> {
    let mut p = Parser::new(text);
    p.keyword("system")?;
    let sys_name = match p.peek()?.clone() {
        Tok::Ident(s) => {
            p.next()?;
            s
        }
        _ => return Err(p.error_here("a system name").into()),
    };
    let system: SystemId = sys_name.parse().map_err(|e: UnknownSystem| {
        let (line, column) = p.line_col(p.pos);
        SourceError::Parse(ParseError {
            line,
            column,
            expected: e.to_string(),
        })
    })?;
    p.expect(Tok::Semi)?;
    p.keyword("ctx")?;
    let ctx = p.entries(&Tok::Semi)?;
    p.expect(Tok::Semi)?;
    let payload = if p.at_keyword("sub")? {
        p.next()?;
        let lhs = p.ty()?;
        p.expect(Tok::SubOp)?;
        let rhs = p.ty()?;
        p.eat(&Tok::Semi)?;
        p.end()?;
        Payload::Sub { lhs, rhs }
    } else if p.at_keyword("term")? {
        p.next()?;
        let term = p.term()?;
        let ascription = if p.eat(&Tok::Colon)? { Some(p.ty()?) } else { None };
        p.eat(&Tok::Semi)?;
        p.end()?;
        Payload::Term { term, ascription }
    } else if p.at_keyword("derivation")? {
        p.next()?;
        let json = p.rest_after_peek();
        let d = crate::json::derivation_from_str(json).map_err(|e| SourceError::Derivation(e.to_string()))?;
        Payload::Derivation(Box::new(d))
    } else {
        return Err(p.error_here("`sub`, `term` or `derivation`").into());
    };
    let unit = SourceUnit { system, ctx, payload };
    check_unit_constructs(&unit)?;
    Ok(unit)
}

fn check_unit_constructs(unit: &SourceUnit) -> Result<(), SourceError> {
    let sys = unit.system.rules();
    let mismatch = |e: WfError| match e {
        WfError::ForbiddenConstruct { system, node } => SourceError::SystemMismatch {
            system,
            construct: node,
        },
        other => SourceError::SystemMismatch {
            system: unit.system,
            construct: other.to_string(),
        },
    };
    for e in unit.ctx.entries() {
        check_constructs(e.ty(), sys).map_err(mismatch)?;
    }
    match &unit.payload {
        Payload::Sub { lhs, rhs } => {
            check_constructs(lhs, sys).map_err(mismatch)?;
            check_constructs(rhs, sys).map_err(mismatch)?;
        }
        Payload::Term { term, ascription } => {
            check_term_constructs(term, sys).map_err(mismatch)?;
            if let Some(t) = ascription {
                check_constructs(t, sys).map_err(mismatch)?;
            }
        }
        Payload::Derivation(_) => {}
    }
    Ok(())
}

// -------------------------------------------------------------- printer

#[derive(Clone, Copy, PartialEq, PartialOrd)]
enum TPrec {
    Quant,
    Arrow,
    Meet,
    Atom,
}

#[derive(Clone, Copy, PartialEq, PartialOrd)]
enum MPrec {
    Abs,
    App,
    Atom,
}

/// Prints syntax while inventing binder names that never capture a free
/// variable or a name already in scope.
pub struct Printer {
    avoid: BTreeSet<Name>,
    tscope: Vec<Name>,
    mscope: Vec<Name>,
}

impl Printer {
    pub fn new() -> Printer {
        Printer {
            avoid: BTreeSet::new(),
            tscope: Vec::new(),
            mscope: Vec::new(),
        }
    }

    pub fn for_context(ctx: &Context) -> Printer {
        let mut p = Printer::new();
        for e in ctx.entries() {
            p.avoid.insert(e.name().clone());
            e.ty().collect_free(&mut p.avoid);
        }
        p
    }

    pub fn avoid_type(&mut self, ty: &Type) -> &mut Printer {
        ty.collect_free(&mut self.avoid);
        self
    }

    pub fn avoid_term(&mut self, t: &Term) -> &mut Printer {
        self.avoid.extend(t.free_term_vars());
        self.avoid.extend(t.free_type_vars());
        self
    }

    fn pick(&self, hint: &Name) -> Name {
        fresh_name(hint, |n| {
            self.avoid.contains(n) || self.tscope.contains(n) || self.mscope.contains(n)
        })
    }

    pub fn ty(&mut self, t: &Type) -> String {
        let mut out = String::new();
        self.ty_at(t, TPrec::Quant, &mut out);
        out
    }

    fn ty_at(&mut self, t: &Type, prec: TPrec, out: &mut String) {
        match t {
            Type::Top => out.push_str("Top"),
            Type::Var(n) => out.push_str(n.as_str()),
            Type::Bound(i) => match self.tscope.len().checked_sub(1 + *i as usize) {
                Some(p) => out.push_str(self.tscope[p].as_str()),
                None => out.push_str(&format!("#{i}")),
            },
            Type::Arrow(a, b) => {
                let paren = prec > TPrec::Arrow;
                if paren {
                    out.push('(');
                }
                self.ty_at(a, TPrec::Meet, out);
                out.push_str(" -> ");
                self.ty_at(b, TPrec::Quant, out);
                if paren {
                    out.push(')');
                }
            }
            Type::Meet(a, b) => {
                let paren = prec > TPrec::Meet;
                if paren {
                    out.push('(');
                }
                self.ty_at(a, TPrec::Meet, out);
                out.push_str(" /\\ ");
                self.ty_at(b, TPrec::Atom, out);
                if paren {
                    out.push(')');
                }
            }
            Type::Forall(q) => {
                let paren = prec > TPrec::Quant;
                if paren {
                    out.push('(');
                }
                let x = self.pick(q.hint.name());
                out.push_str(q.flavor.keyword());
                out.push(' ');
                out.push_str(x.as_str());
                if !(q.flavor == Flavor::Plain && q.bound.is_top()) {
                    out.push_str(" <: ");
                    self.ty_at(&q.bound, TPrec::Meet, out);
                }
                out.push_str(" . ");
                self.tscope.push(x);
                self.ty_at(&q.body, TPrec::Quant, out);
                self.tscope.pop();
                if paren {
                    out.push(')');
                }
            }
        }
    }

    pub fn term(&mut self, t: &Term) -> String {
        let mut out = String::new();
        self.term_at(t, MPrec::Abs, &mut out);
        out
    }

    fn term_at(&mut self, t: &Term, prec: MPrec, out: &mut String) {
        match t {
            Term::Top => out.push_str("top"),
            Term::Var(n) => out.push_str(n.as_str()),
            Term::Bound(i) => match self.mscope.len().checked_sub(1 + *i as usize) {
                Some(p) => out.push_str(self.mscope[p].as_str()),
                None => out.push_str(&format!("#{i}")),
            },
            Term::App(f, a) => {
                let paren = prec > MPrec::App;
                if paren {
                    out.push('(');
                }
                self.term_at(f, MPrec::App, out);
                out.push(' ');
                self.term_at(a, MPrec::Atom, out);
                if paren {
                    out.push(')');
                }
            }
            Term::TApp(f, ty) => {
                let paren = prec > MPrec::App;
                if paren {
                    out.push('(');
                }
                self.term_at(f, MPrec::App, out);
                out.push_str(" [");
                self.ty_at(ty, TPrec::Quant, out);
                out.push(']');
                if paren {
                    out.push(')');
                }
            }
            Term::Lam(l) => {
                let paren = prec > MPrec::Abs;
                if paren {
                    out.push('(');
                }
                let x = self.pick(l.hint.name());
                out.push_str("fun (");
                out.push_str(x.as_str());
                out.push_str(" : ");
                self.ty_at(&l.annot, TPrec::Quant, out);
                out.push_str(") => ");
                self.mscope.push(x);
                self.term_at(&l.body, MPrec::Abs, out);
                self.mscope.pop();
                if paren {
                    out.push(')');
                }
            }
            Term::TLam(l) => {
                let paren = prec > MPrec::Abs;
                if paren {
                    out.push('(');
                }
                let x = self.pick(l.hint.name());
                out.push_str("tfun (");
                out.push_str(x.as_str());
                out.push_str(" <: ");
                self.ty_at(&l.bound, TPrec::Quant, out);
                out.push_str(") => ");
                self.tscope.push(x);
                self.term_at(&l.body, MPrec::Abs, out);
                self.tscope.pop();
                if paren {
                    out.push(')');
                }
            }
        }
    }
}

impl Default for Printer {
    fn default() -> Printer {
        Printer::new()
    }
}

pub fn print_type(t: &Type) -> String {
    Printer::new().avoid_type(t).ty(t)
}

pub fn print_type_in(ctx: &Context, t: &Type) -> String {
    Printer::for_context(ctx).avoid_type(t).ty(t)
}

pub fn print_term(t: &Term) -> String {
    Printer::new().avoid_term(t).term(t)
}

pub fn print_term_in(ctx: &Context, t: &Term) -> String {
    Printer::for_context(ctx).avoid_term(t).term(t)
}

pub fn print_context(ctx: &Context) -> String {
    let mut parts = Vec::new();
    let mut p = Printer::for_context(ctx);
    for e in ctx.entries() {
        match e {
            Entry::TypeVar { name, bound } => parts.push(format!("{name} <: {}", p.ty(bound))),
            Entry::TermVar { name, ty } => parts.push(format!("{name} : {}", p.ty(ty))),
        }
    }
    parts.join(", ")
}

pub fn print_judgment(j: &Judgment) -> String {
    let ctx = j.ctx();
    let mut p = Printer::for_context(ctx);
    let head = print_context(ctx);
    let body = match j {
        Judgment::WfType { ty, .. } => p.avoid_type(ty).ty(ty),
        Judgment::Subtype { lhs, rhs, .. } => {
            p.avoid_type(lhs).avoid_type(rhs);
            format!("{} <: {}", p.ty(lhs), p.ty(rhs))
        }
        Judgment::Typing { term, ty, .. } => {
            p.avoid_term(term).avoid_type(ty);
            format!("{} : {}", p.term(term), p.ty(ty))
        }
        Judgment::Equality { lhs, rhs, ty, .. } => {
            p.avoid_term(lhs).avoid_term(rhs).avoid_type(ty);
            format!("{} = {} : {}", p.term(lhs), p.term(rhs), p.ty(ty))
        }
    };
    if head.is_empty() {
        format!("|- {body}")
    } else {
        format!("{head} |- {body}")
    }
}

pub fn render_unit(u: &SourceUnit) -> String {
    let mut out = format!("system {};\nctx {};\n", u.system, print_context(&u.ctx));
    let mut p = Printer::for_context(&u.ctx);
    match &u.payload {
        Payload::Sub { lhs, rhs } => {
            p.avoid_type(lhs).avoid_type(rhs);
            out.push_str(&format!("sub {} <: {}\n", p.ty(lhs), p.ty(rhs)));
        }
        Payload::Term { term, ascription } => {
            p.avoid_term(term);
            if let Some(a) = ascription {
                p.avoid_type(a);
            }
            out.push_str(&format!("term {}", p.term(term)));
            if let Some(a) = ascription {
                out.push_str(&format!(" : {}", p.ty(a)));
            }
            out.push('\n');
        }
        Payload::Derivation(d) => {
            out.push_str("derivation ");
            out.push_str(&serde_json::to_string_pretty(&crate::json::derivation_to_json(d)).unwrap());
            out.push('\n');
        }
    }
    out
}

impl fmt::Display for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_type(self))
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_term(self))
    }
}

impl fmt::Display for Context {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_context(self))
    }
}

impl fmt::Display for Judgment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_judgment(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_the_loc_query() {
        let u =
            parse_source("system kt; ctx X <: Top; sub forall_k Z <: X . Z -> Z <: forall_t Z <: X . Z -> X").unwrap();
        assert_eq!(u.system, SystemId::Kt);
        let x = Type::var("X");
        let z = Type::var("Z");
        let lhs = Type::forall(Flavor::Kernel, "Z", x.clone(), Type::arrow(z.clone(), z.clone()));
        let rhs = Type::forall(Flavor::TopStyle, "Z", x.clone(), Type::arrow(z, x.clone()));
        assert_eq!(u.payload, Payload::Sub { lhs, rhs });
        assert_eq!(u.ctx, Context::new().with_type_var("X", Type::Top));
    }

    #[test]
    fn meets_only_in_fwedge() {
        let ok = parse_source("system fwedge; ctx; sub Top /\\ Top <: Top").unwrap();
        assert_eq!(
            ok.payload,
            Payload::Sub {
                lhs: Type::meet(Type::Top, Type::Top),
                rhs: Type::Top
            }
        );
        let bad = parse_source("system kernel; ctx; sub Top /\\ Top <: Top");
        assert!(matches!(bad, Err(SourceError::SystemMismatch { .. })));
    }

    #[test]
    fn printing_examples() {
        let t = Type::forall(Flavor::Kernel, "X", Type::Top, Type::var("X"));
        assert_eq!(print_type(&t), "forall_k X <: Top . X");
        assert_eq!(print_type(&Type::meet(Type::var("X"), Type::var("S"))), "X /\\ S");
    }

    #[test]
    fn precedence() {
        let t = parse_type("A /\\ B -> C -> D").unwrap();
        let expect = Type::arrow(
            Type::meet(Type::var("A"), Type::var("B")),
            Type::arrow(Type::var("C"), Type::var("D")),
        );
        assert_eq!(t, expect);
        let q = parse_type("forall_t X . X -> X").unwrap();
        assert_eq!(
            q,
            Type::forall(
                Flavor::TopStyle,
                "X",
                Type::Top,
                Type::arrow(Type::var("X"), Type::var("X"))
            )
        );
        let t = parse_term("f x [Top] y").unwrap();
        let expect = Term::app(
            Term::tapp(Term::app(Term::var("f"), Term::var("x")), Type::Top),
            Term::var("y"),
        );
        assert_eq!(t, expect);
    }

    #[test]
    fn printer_avoids_capture() {
        // forall_k X . Y with free Y, then substitute X for Y
        let t = Type::forall(Flavor::Kernel, "X", Type::Top, Type::var("Y"));
        let t = t.subst(&"Y".into(), &Type::var("X"));
        let s = print_type(&t);
        assert_eq!(s, "forall_k X1 <: Top . X");
        assert_eq!(parse_type(&s).unwrap(), t);
    }

    #[test]
    fn round_trip_u() {
        let src = "system kt; ctx X <: Top; term (tfun (Y <: Top) => tfun (Z <: X) => fun (y : Y) => y) [X]";
        let u = parse_source(src).unwrap();
        let again = parse_source(&render_unit(&u)).unwrap();
        assert_eq!(u, again);
    }

    #[test]
    fn errors_have_positions() {
        let e = parse_type("Top ->").unwrap_err();
        assert_eq!(e.line, 1);
        assert_eq!(e.column, 7);
        let e = parse_source("system kt;\nctx X <: ;").unwrap_err();
        match e {
            SourceError::Parse(p) => assert_eq!((p.line, p.column), (2, 10)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn comments_are_skipped() {
        let u = parse_source("-- expect: Accept\nsystem kt; -- trailing\nctx; sub Top <: Top").unwrap();
        assert_eq!(
            u.payload,
            Payload::Sub {
                lhs: Type::Top,
                rhs: Type::Top
            }
        );
    }
}
