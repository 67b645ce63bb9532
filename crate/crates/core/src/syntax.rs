//! Types, terms and environments, with an ASCII surface syntax.
//!
//! ```text
//! type  ::= tens ('-o' type)?          tens ::= atomty ('(x)' atomty)*
//! atomty::= 'R' | 'I' | '(' type ')'
//! term  ::= '\' x ':' type '.' term
//!         | 'let' '*' '=' term 'in' term
//!         | 'let' x '(x)' y '=' term 'in' term
//!         | app ('*' app)*              -- tensor, left associative
//! app   ::= atom atom*
//! atom  ::= x | literal | '*' | '()' | f '(' term, ... ')' | '(' term ')' | '[-]'
//! ```
//!
//! A `*` at the start of an operand is the unit; anywhere else it is the
//! tensor. Symbol application needs the `(` glued to the symbol name.

use std::fmt;

use thiserror::Error;

use crate::registry::SymbolRegistry;

/// The hole of a context, written `[-]`.
pub const HOLE: &str = "[-]";

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Type {
    R,
    I,
    Tensor(Box<Type>, Box<Type>),
    Lolli(Box<Type>, Box<Type>),
}

impl Type {
    pub fn tensor(a: Type, b: Type) -> Type {
        Type::Tensor(Box::new(a), Box::new(b))
    }

    pub fn lolli(a: Type, b: Type) -> Type {
        Type::Lolli(Box::new(a), Box::new(b))
    }

    /// Left-associated n-fold tensor; the empty tensor is `I`.
    pub fn tensor_n(types: impl IntoIterator<Item = Type>) -> Type {
        types.into_iter().reduce(Type::tensor).unwrap_or(Type::I)
    }

    /// Built from `R`, `I` and `⊗` only.
    pub fn is_observable(&self) -> bool {
        match self {
            Type::R | Type::I => true,
            Type::Tensor(a, b) => a.is_observable() && b.is_observable(),
            Type::Lolli(..) => false,
        }
    }

    pub fn order(&self) -> usize {
        match self {
            Type::R | Type::I => 0,
            Type::Tensor(a, b) => a.order().max(b.order()),
            Type::Lolli(a, b) => (a.order() + 1).max(b.order()),
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Type::R | Type::I => 1,
            Type::Tensor(a, b) | Type::Lolli(a, b) => 1 + a.size() + b.size(),
        }
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, prec: u8) -> fmt::Result {
        match self {
            Type::R => f.write_str("R"),
            Type::I => f.write_str("I"),
            Type::Tensor(a, b) => {
                if prec > 1 {
                    f.write_str("(")?;
                }
                a.fmt_prec(f, 1)?;
                f.write_str(" (x) ")?;
                b.fmt_prec(f, 2)?;
                if prec > 1 {
                    f.write_str(")")?;
                }
                Ok(())
            }
            Type::Lolli(a, b) => {
                if prec > 0 {
                    f.write_str("(")?;
                }
                a.fmt_prec(f, 1)?;
                f.write_str(" -o ")?;
                b.fmt_prec(f, 0)?;
                if prec > 0 {
                    f.write_str(")")?;
                }
                Ok(())
            }
        }
    }
}

impl fmt::Display for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Term {
    Var(String),
    Const(f64),
    Star,
    FnApp(String, Vec<Term>),
    App(Box<Term>, Box<Term>),
    Lam(String, Type, Box<Term>),
    Pair(Box<Term>, Box<Term>),
    LetStar(Box<Term>, Box<Term>),
    LetPair(String, String, Box<Term>, Box<Term>),
}

impl Term {
    pub fn var(x: &str) -> Term {
        Term::Var(x.to_string())
    }

    pub fn hole() -> Term {
        Term::Var(HOLE.to_string())
    }

    pub fn app(m: Term, n: Term) -> Term {
        Term::App(Box::new(m), Box::new(n))
    }

    pub fn lam(x: &str, ty: Type, body: Term) -> Term {
        Term::Lam(x.to_string(), ty, Box::new(body))
    }

    pub fn pair(m: Term, n: Term) -> Term {
        Term::Pair(Box::new(m), Box::new(n))
    }

    pub fn let_star(m: Term, n: Term) -> Term {
        Term::LetStar(Box::new(m), Box::new(n))
    }

    pub fn let_pair(x: &str, y: &str, m: Term, n: Term) -> Term {
        Term::LetPair(x.to_string(), y.to_string(), Box::new(m), Box::new(n))
    }

    pub fn fn_app(f: &str, args: Vec<Term>) -> Term {
        Term::FnApp(f.to_string(), args)
    }

    /// Left-associated n-fold pair.
    pub fn pair_n(items: impl IntoIterator<Item = Term>) -> Term {
        items.into_iter().reduce(Term::pair).unwrap_or(Term::Star)
    }

    /// Number of AST nodes.
    pub fn size(&self) -> usize {
        match self {
            Term::Var(_) | Term::Const(_) | Term::Star => 1,
            Term::FnApp(_, args) => 1 + args.iter().map(Term::size).sum::<usize>(),
            Term::App(a, b) | Term::Pair(a, b) | Term::LetStar(a, b) | Term::LetPair(_, _, a, b) => {
                1 + a.size() + b.size()
            }
            Term::Lam(_, _, b) => 1 + b.size(),
        }
    }

    pub fn is_value(&self) -> bool {
        match self {
            Term::Const(_) | Term::Star | Term::Lam(..) => true,
            Term::Pair(a, b) => a.is_value() && b.is_value(),
            _ => false,
        }
    }

    /// Numeric literals in left-to-right order.
    pub fn literals(&self) -> Vec<f64> {
        let mut out = Vec::new();
        self.visit(&mut |t| {
            if let Term::Const(a) = t {
                out.push(*a);
            }
        });
        out
    }

    /// Pre-order traversal.
    pub fn visit(&self, f: &mut impl FnMut(&Term)) {
        f(self);
        match self {
            Term::Var(_) | Term::Const(_) | Term::Star => {}
            Term::FnApp(_, args) => args.iter().for_each(|a| a.visit(f)),
            Term::App(a, b) | Term::Pair(a, b) | Term::LetStar(a, b) | Term::LetPair(_, _, a, b) => {
                a.visit(f);
                b.visit(f);
            }
            Term::Lam(_, _, b) => b.visit(f),
        }
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, prec: u8) -> fmt::Result {
        // 0: binder bodies, 1: tensor operands, 2: application heads, 3: arguments
        let open = |f: &mut fmt::Formatter<'_>, needed: bool| if needed { f.write_str("(") } else { Ok(()) };
        let close = |f: &mut fmt::Formatter<'_>, needed: bool| if needed { f.write_str(")") } else { Ok(()) };
        match self {
            Term::Var(x) => f.write_str(x),
            Term::Const(a) => write!(f, "{a:?}"),
            Term::Star => f.write_str(if prec >= 3 { "(*)" } else { "*" }),
            Term::FnApp(s, args) => {
                write!(f, "{s}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    a.fmt_prec(f, 0)?;
                }
                f.write_str(")")
            }
            Term::App(m, n) => {
                open(f, prec > 2)?;
                m.fmt_prec(f, 2)?;
                f.write_str(" ")?;
                n.fmt_prec(f, 3)?;
                close(f, prec > 2)
            }
            Term::Pair(m, n) => {
                open(f, prec > 1)?;
                m.fmt_prec(f, 1)?;
                f.write_str(" * ")?;
                n.fmt_prec(f, 2)?;
                close(f, prec > 1)
            }
            Term::Lam(x, ty, body) => {
                open(f, prec > 0)?;
                write!(f, "\\{x}:{ty}. ")?;
                body.fmt_prec(f, 0)?;
                close(f, prec > 0)
            }
            Term::LetStar(m, n) => {
                open(f, prec > 0)?;
                f.write_str("let * = ")?;
                m.fmt_prec(f, 0)?;
                f.write_str(" in ")?;
                n.fmt_prec(f, 0)?;
                close(f, prec > 0)
            }
            Term::LetPair(x, y, m, n) => {
                open(f, prec > 0)?;
                write!(f, "let {x} (x) {y} = ")?;
                m.fmt_prec(f, 0)?;
                f.write_str(" in ")?;
                n.fmt_prec(f, 0)?;
                close(f, prec > 0)
            }
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}

/// Ordered typing environment; names are distinct.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Env(pub Vec<(String, Type)>);

impl Env {
    pub fn empty() -> Env {
        Env(Vec::new())
    }

    pub fn new(entries: Vec<(String, Type)>) -> Env {
        Env(entries)
    }

    pub fn single(x: &str, ty: Type) -> Env {
        Env(vec![(x.to_string(), ty)])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, x: &str) -> Option<&Type> {
        self.0.iter().rev().find(|(y, _)| y == x).map(|(_, t)| t)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.0.iter().map(|(x, _)| x.as_str())
    }

    pub fn types(&self) -> impl Iterator<Item = &Type> {
        self.0.iter().map(|(_, t)| t)
    }

    pub fn iter(&self) -> impl Iterator<Item = &(String, Type)> {
        self.0.iter()
    }

    pub fn push(&mut self, x: &str, ty: Type) {
        self.0.push((x.to_string(), ty));
    }

    pub fn extended(&self, extra: &[(String, Type)]) -> Env {
        let mut e = self.clone();
        e.0.extend(extra.iter().cloned());
        e
    }

    /// Entries whose names satisfy `keep`, in order.
    pub fn restrict(&self, keep: impl Fn(&str) -> bool) -> Env {
        Env(self.0.iter().filter(|(x, _)| keep(x)).cloned().collect())
    }

    pub fn has_duplicates(&self) -> bool {
        let mut seen = std::collections::HashSet::new();
        !self.0.iter().all(|(x, _)| seen.insert(x.as_str()))
    }
}

impl fmt::Display for Env {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (x, t)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{x}:{t}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("syntax error at {line}:{col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("unknown symbol `{name}` at {line}:{col}")]
    UnknownSymbol { name: String, line: usize, col: usize },
    #[error("symbol `{name}` at {line}:{col} expects {expected} arguments, got {found}")]
    Arity { name: String, line: usize, col: usize, expected: usize, found: usize },
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    /// An identifier immediately followed by `(`.
    Call(String),
    Num(f64),
    Backslash,
    Colon,
    Dot,
    Comma,
    Star,
    Eq,
    LParen,
    RParen,
    TensorTy,
    Lolli,
    Hole,
    Let,
    In,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(x) => write!(f, "`{x}`"),
            Tok::Call(x) => write!(f, "`{x}(`"),
            Tok::Num(a) => write!(f, "`{a}`"),
            Tok::Backslash => f.write_str("`\\`"),
            Tok::Colon => f.write_str("`:`"),
            Tok::Dot => f.write_str("`.`"),
            Tok::Comma => f.write_str("`,`"),
            Tok::Star => f.write_str("`*`"),
            Tok::Eq => f.write_str("`=`"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::TensorTy => f.write_str("`(x)`"),
            Tok::Lolli => f.write_str("`-o`"),
            Tok::Hole => f.write_str("`[-]`"),
            Tok::Let => f.write_str("`let`"),
            Tok::In => f.write_str("`in`"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(src: &str) -> Result<Vec<Spanned>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    let err = |line, col, msg: String| ParseError::Syntax { line, col, msg };
    while i < chars.len() {
        let c = chars[i];
        let (l0, c0) = (line, col);
        let mut advance = |n: usize, i: &mut usize| {
            *i += n;
            col += n;
        };
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            advance(1, &mut i);
            continue;
        }
        if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        let rest: String = chars[i..chars.len().min(i + 3)].iter().collect();
        let tok = if rest.starts_with("(x)") {
            advance(3, &mut i);
            Tok::TensorTy
        } else if rest.starts_with("[-]") {
            advance(3, &mut i);
            Tok::Hole
        } else if rest.starts_with("-o") {
            advance(2, &mut i);
            Tok::Lolli
        } else if c.is_ascii_digit()
            || (c == '-' && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit() || *d == '.'))
            || (c == '.' && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit()))
        {
            let start = i;
            let mut j = i + 1;
            while j < chars.len() && (chars[j].is_ascii_digit() || chars[j] == '.') {
                j += 1;
            }
            if j < chars.len() && (chars[j] == 'e' || chars[j] == 'E') {
                let mut k = j + 1;
                if k < chars.len() && (chars[k] == '-' || chars[k] == '+') {
                    k += 1;
                }
                if k < chars.len() && chars[k].is_ascii_digit() {
                    while k < chars.len() && chars[k].is_ascii_digit() {
                        k += 1;
                    }
                    j = k;
                }
            }
            let text: String = chars[start..j].iter().collect();
            let value: f64 = text.parse().map_err(|_| err(l0, c0, format!("malformed number `{text}`")))?;
            if !value.is_finite() {
                return Err(err(l0, c0, format!("literal `{text}` is not finite")));
            }
            advance(j - start, &mut i);
            Tok::Num(value)
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            let mut j = i + 1;
            while j < chars.len() && (chars[j].is_ascii_alphanumeric() || chars[j] == '_' || chars[j] == '\'') {
                j += 1;
            }
            let text: String = chars[start..j].iter().collect();
            advance(j - start, &mut i);
            match text.as_str() {
                "let" => Tok::Let,
                "in" => Tok::In,
                // `R(x)R` is a type, never a call
                _ if chars.get(i) == Some(&'(') && text != "R" && text != "I" => {
                    advance(1, &mut i);
                    Tok::Call(text)
                }
                _ => Tok::Ident(text),
            }
        } else {
            let t = match c {
                '\\' | 'λ' => Tok::Backslash,
                ':' => Tok::Colon,
                '.' => Tok::Dot,
                ',' => Tok::Comma,
                '*' => Tok::Star,
                '=' => Tok::Eq,
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                _ => return Err(err(l0, c0, format!("unexpected character `{c}`"))),
            };
            advance(1, &mut i);
            t
        };
        out.push(Spanned { tok, line: l0, col: c0 });
    }
    out.push(Spanned { tok: Tok::Eof, line, col });
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<Spanned>,
    pos: usize,
    reg: Option<&'a SymbolRegistry>,
    allow_hole: bool,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn bump(&mut self) -> Spanned {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        let s = &self.toks[self.pos];
        Err(ParseError::Syntax { line: s.line, col: s.col, msg: msg.into() })
    }

    fn expect(&mut self, tok: Tok) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            self.error(format!("expected {tok}, found {}", self.peek()))
        }
    }

    fn ident(&mut self) -> Result<String, ParseError> {
        match self.peek().clone() {
            Tok::Ident(x) => {
                self.bump();
                Ok(x)
            }
            other => self.error(format!("expected a variable, found {other}")),
        }
    }

    fn ty(&mut self) -> Result<Type, ParseError> {
        let lhs = self.ty_tensor()?;
        if *self.peek() == Tok::Lolli {
            self.bump();
            Ok(Type::lolli(lhs, self.ty()?))
        } else {
            Ok(lhs)
        }
    }

    fn ty_tensor(&mut self) -> Result<Type, ParseError> {
        let mut t = self.ty_atom()?;
        while *self.peek() == Tok::TensorTy {
            self.bump();
            t = Type::tensor(t, self.ty_atom()?);
        }
        Ok(t)
    }

    fn ty_atom(&mut self) -> Result<Type, ParseError> {
        match self.peek().clone() {
            Tok::Ident(x) if x == "R" => {
                self.bump();
                Ok(Type::R)
            }
            Tok::Ident(x) if x == "I" => {
                self.bump();
                Ok(Type::I)
            }
            Tok::LParen => {
                self.bump();
                let t = self.ty()?;
                self.expect(Tok::RParen)?;
                Ok(t)
            }
            other => self.error(format!("expected a type, found {other}")),
        }
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        match self.peek() {
            Tok::Backslash => {
                self.bump();
                let x = self.ident()?;
                self.expect(Tok::Colon)?;
                let ty = self.ty()?;
                self.expect(Tok::Dot)?;
                let body = self.term()?;
                Ok(Term::Lam(x, ty, Box::new(body)))
            }
            Tok::Let => {
                self.bump();
                if *self.peek() == Tok::Star {
                    self.bump();
                    self.expect(Tok::Eq)?;
                    let m = self.term()?;
                    self.expect(Tok::In)?;
                    let n = self.term()?;
                    Ok(Term::let_star(m, n))
                } else {
                    let x = match self.peek().clone() {
                        // `let a(x) b` lexes the glued `a(` as a call
                        Tok::Call(a) => {
                            self.bump();
                            if *self.peek() != Tok::Ident("x".into()) {
                                return self.error("expected `(x)` in the pattern");
                            }
                            self.bump();
                            self.expect(Tok::RParen)?;
                            a
                        }
                        _ => {
                            let a = self.ident()?;
                            self.expect(Tok::TensorTy)?;
                            a
                        }
                    };
                    let y = self.ident()?;
                    if x == y {
                        return self.error(format!("pattern binds `{x}` twice"));
                    }
                    self.expect(Tok::Eq)?;
                    let m = self.term()?;
                    self.expect(Tok::In)?;
                    let n = self.term()?;
                    Ok(Term::LetPair(x, y, Box::new(m), Box::new(n)))
                }
            }
            _ => {
                let mut t = self.app()?;
                while *self.peek() == Tok::Star {
                    self.bump();
                    t = Term::pair(t, self.app_or_binder()?);
                }
                Ok(t)
            }
        }
    }

    /// The right operand of `*` may be a binder, which then extends to the end.
    fn app_or_binder(&mut self) -> Result<Term, ParseError> {
        match self.peek() {
            Tok::Backslash | Tok::Let => self.term(),
            _ => self.app(),
        }
    }

    fn app(&mut self) -> Result<Term, ParseError> {
        let mut head = if *self.peek() == Tok::Star {
            self.bump();
            Term::Star
        } else {
            self.atom()?
        };
        while self.starts_atom() {
            let arg = self.atom()?;
            head = Term::app(head, arg);
        }
        if matches!(self.peek(), Tok::Backslash | Tok::Let) {
            let arg = self.term()?;
            head = Term::app(head, arg);
        }
        Ok(head)
    }

    fn starts_atom(&self) -> bool {
        matches!(self.peek(), Tok::Ident(_) | Tok::Call(_) | Tok::Num(_) | Tok::LParen | Tok::Hole)
    }

    fn atom(&mut self) -> Result<Term, ParseError> {
        let here = self.toks[self.pos].clone();
        match here.tok {
            Tok::Ident(x) => {
                self.bump();
                Ok(Term::Var(x))
            }
            Tok::Num(a) => {
                self.bump();
                Ok(Term::Const(a))
            }
            Tok::Hole if self.allow_hole => {
                self.bump();
                Ok(Term::hole())
            }
            Tok::Hole => self.error("a hole `[-]` is only allowed in contexts"),
            Tok::LParen => {
                self.bump();
                if *self.peek() == Tok::RParen {
                    self.bump();
                    return Ok(Term::Star);
                }
                let t = self.term()?;
                self.expect(Tok::RParen)?;
                Ok(t)
            }
            Tok::Call(name) => {
                self.bump();
                let mut args = Vec::new();
                if *self.peek() != Tok::RParen {
                    args.push(self.term()?);
                    while *self.peek() == Tok::Comma {
                        self.bump();
                        args.push(self.term()?);
                    }
                }
                self.expect(Tok::RParen)?;
                if let Some(reg) = self.reg {
                    match reg.arity(&name) {
                        None => return Err(ParseError::UnknownSymbol { name, line: here.line, col: here.col }),
                        Some(k) if k != args.len() => {
                            return Err(ParseError::Arity {
                                name,
                                line: here.line,
                                col: here.col,
                                expected: k,
                                found: args.len(),
                            })
                        }
                        Some(_) => {}
                    }
                }
                Ok(Term::FnApp(name, args))
            }
            other => self.error(format!("expected a term, found {other}")),
        }
    }

    fn finish<T>(&mut self, value: T) -> Result<T, ParseError> {
        if *self.peek() == Tok::Eof {
            Ok(value)
        } else {
            self.error(format!("unexpected {} after the end of the term", self.peek()))
        }
    }
}

fn parser<'a>(text: &str, reg: Option<&'a SymbolRegistry>, allow_hole: bool) -> Result<Parser<'a>, ParseError> {
    Ok(Parser { toks: lex(text)?, pos: 0, reg, allow_hole })
}

/// Parses a term, checking symbol names and arities against `reg`.
pub fn parse_term(text: &str, reg: &SymbolRegistry) -> Result<Term, ParseError> {
    let mut p = parser(text, Some(reg), false)?;
    let t = p.term()?;
    p.finish(t)
}

/// Parses a term that may contain the hole `[-]`.
pub fn parse_context_term(text: &str, reg: &SymbolRegistry) -> Result<Term, ParseError> {
    let mut p = parser(text, Some(reg), true)?;
    let t = p.term()?;
    p.finish(t)
}

pub fn parse_type(text: &str) -> Result<Type, ParseError> {
    let mut p = parser(text, None, false)?;
    let t = p.ty()?;
    p.finish(t)
}

/// Parses `x:T, y:U`; the empty string is the empty environment.
pub fn parse_env(text: &str) -> Result<Env, ParseError> {
    let mut p = parser(text, None, false)?;
    let mut env = Env::empty();
    if *p.peek() == Tok::Eof {
        return Ok(env);
    }
    loop {
        let x = p.ident()?;
        p.expect(Tok::Colon)?;
        let t = p.ty()?;
        if env.get(&x).is_some() {
            return p.error(format!("variable `{x}` declared twice"));
        }
        env.push(&x, t);
        if *p.peek() == Tok::Comma {
            p.bump();
        } else {
            break;
        }
    }
    p.finish(env)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reg() -> SymbolRegistry {
        SymbolRegistry::standard()
    }

    #[test]
    fn parses_lambda_with_annotation() {
        let t = parse_term("\\k:(R -o R). k 0.0", &reg()).unwrap();
        assert_eq!(t, Term::lam("k", Type::lolli(Type::R, Type::R), Term::app(Term::var("k"), Term::Const(0.0))));
    }

    #[test]
    fn tensor_type_operator_is_not_a_term() {
        assert!(matches!(parse_term("0.0 (x) 1.0", &reg()), Err(ParseError::Syntax { .. })));
    }

    #[test]
    fn symbol_application_checks_registry() {
        let r = reg();
        assert_eq!(
            parse_term("add(2.0, 3.0)", &r).unwrap(),
            Term::fn_app("add", vec![Term::Const(2.0), Term::Const(3.0)])
        );
        assert!(matches!(parse_term("nope(1.0)", &r), Err(ParseError::UnknownSymbol { .. })));
        assert!(matches!(parse_term("sin(1.0, 2.0)", &r), Err(ParseError::Arity { .. })));
    }

    #[test]
    fn tensor_is_left_associative_and_star_is_unit_at_operand_start() {
        let t = parse_term("1.0 * 2.0 * *", &reg()).unwrap();
        assert_eq!(t, Term::pair(Term::pair(Term::Const(1.0), Term::Const(2.0)), Term::Star));
        let t = parse_term("let * = * in k (*)", &reg()).unwrap();
        assert_eq!(t, Term::let_star(Term::Star, Term::app(Term::var("k"), Term::Star)));
    }

    #[test]
    fn negative_literals_and_lolli_lex_apart() {
        let t = parse_term("\\x:R -o R. x -1.5e-3", &reg()).unwrap();
        assert_eq!(t, Term::lam("x", Type::lolli(Type::R, Type::R), Term::app(Term::var("x"), Term::Const(-1.5e-3))));
    }

    #[test]
    fn types_print_with_minimal_parentheses() {
        let t = parse_type("R (x) R (x) ((R (x) R -o R) -o R)").unwrap();
        assert_eq!(t.to_string(), "R (x) R (x) ((R (x) R -o R) -o R)");
        assert_eq!(parse_type("R -o R -o R").unwrap(), Type::lolli(Type::R, Type::lolli(Type::R, Type::R)));
    }

    #[test]
    fn errors_carry_positions() {
        match parse_term("\\x:R.\n  x )", &reg()) {
            Err(ParseError::Syntax { line, col, .. }) => assert_eq!((line, col), (2, 5)),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn env_parsing() {
        let env = parse_env("x:R -o R, y:I").unwrap();
        assert_eq!(env.len(), 2);
        assert!(parse_env("x:R, x:R").is_err());
        assert!(parse_env("").unwrap().is_empty());
    }

    #[test]
    fn printer_round_trips_tricky_terms() {
        let r = reg();
        for src in [
            "\\k:R (x) R -o R. k (0.0 * 0.0)",
            "1.0 * (2.0 * 3.0)",
            "f (\\x:R. x) 2.0",
            "let a (x) b = p in b * a",
            "k (let * = u in 1.0)",
            "(\\x:R. x) 5.0",
            "* * *",
            "sin(let * = u in *)",
        ] {
            let t = parse_term(src, &r).unwrap();
            let printed = t.to_string();
            assert_eq!(parse_term(&printed, &r).unwrap(), t, "{src} printed as {printed}");
        }
    }
}
