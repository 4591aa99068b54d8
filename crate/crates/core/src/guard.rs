//! Guards of parametric grammars and pushdown automata: quantifier-free
//! linear arithmetic over named symbols, with character classes as unary
//! predicates.
//!
//! Textual syntax (used by the grammar file format):
//!
//! ```text
//! guard := disj
//! disj  := conj (("||" | "or") conj)*
//! conj  := neg (("&&" | "and") neg)*
//! neg   := ("!" | "not") neg | "true" | "false" | "(" guard ")" | atom
//! atom  := term ("=" | "!=" | "<" | "<=" | ">" | ">=") term
//!        | term "in" class
//! term  := summand (("+" | "-") summand)*
//! summand := [int "*"] primary | primary
//! primary := int | char | ident | "-" primary
//! class := "[" item ("," item)* "]"     item := point | point "-" point
//! point := int | char                    char := 'a' | '\u{61}'
//! ```

use std::fmt;

use thiserror::Error;

use crate::charset::{CharPred, MAX_CHAR};
use crate::formula::{CmpOp, Formula, Term};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("guard syntax error at offset {offset}: {msg}")]
pub struct GuardParseError {
    pub offset: usize,
    pub msg: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum GTerm<S> {
    Const(i64),
    Sym(S),
    Add(Vec<GTerm<S>>),
    Scale(i64, Box<GTerm<S>>),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Guard<S> {
    True,
    False,
    Cmp(CmpOp, GTerm<S>, GTerm<S>),
    In(CharPred, GTerm<S>),
    Not(Box<Guard<S>>),
    And(Vec<Guard<S>>),
    Or(Vec<Guard<S>>),
}

impl<S: Clone> GTerm<S> {
    pub fn eval<F: Fn(&S) -> Option<i64>>(&self, env: &F) -> Option<i64> {
        Some(match self {
            GTerm::Const(c) => *c,
            GTerm::Sym(s) => env(s)?,
            GTerm::Add(ts) => {
                let mut acc = 0;
                for t in ts {
                    acc += t.eval(env)?;
                }
                acc
            }
            GTerm::Scale(k, t) => k * t.eval(env)?,
        })
    }

    pub fn map<T, F: Fn(&S) -> GTerm<T>>(&self, f: &F) -> GTerm<T> {
        match self {
            GTerm::Const(c) => GTerm::Const(*c),
            GTerm::Sym(s) => f(s),
            GTerm::Add(ts) => GTerm::Add(ts.iter().map(|t| t.map(f)).collect()),
            GTerm::Scale(k, t) => GTerm::Scale(*k, Box::new(t.map(f))),
        }
    }

    pub fn to_term<F: Fn(&S) -> Term>(&self, f: &F) -> Term {
        match self {
            GTerm::Const(c) => Term::Const(*c),
            GTerm::Sym(s) => f(s),
            GTerm::Add(ts) => Term::sum(ts.iter().map(|t| t.to_term(f))),
            GTerm::Scale(k, t) => Term::scale(*k, t.to_term(f)),
        }
    }

    fn symbols_into(&self, out: &mut Vec<S>) {
        match self {
            GTerm::Const(_) => {}
            GTerm::Sym(s) => out.push(s.clone()),
            GTerm::Add(ts) => ts.iter().for_each(|t| t.symbols_into(out)),
            GTerm::Scale(_, t) => t.symbols_into(out),
        }
    }
}

impl<S: Clone> Guard<S> {
    pub fn and(parts: Vec<Guard<S>>) -> Guard<S> {
        let mut out = Vec::new();
        for g in parts {
            match g {
                Guard::True => {}
                Guard::False => return Guard::False,
                Guard::And(inner) => out.extend(inner),
                g => out.push(g),
            }
        }
        match out.len() {
            0 => Guard::True,
            1 => out.pop().unwrap(),
            _ => Guard::And(out),
        }
    }

    /// Truth value under `env`; `None` when a symbol is unbound.
    pub fn eval<F: Fn(&S) -> Option<i64>>(&self, env: &F) -> Option<bool> {
        Some(match self {
            Guard::True => true,
            Guard::False => false,
            Guard::Cmp(op, a, b) => op.holds(a.eval(env)?, b.eval(env)?),
            Guard::In(p, t) => {
                let v = t.eval(env)?;
                v >= 0 && v <= i64::from(MAX_CHAR) && p.contains(v as u32)
            }
            Guard::Not(g) => !g.eval(env)?,
            Guard::And(gs) => {
                for g in gs {
                    if !g.eval(env)? {
                        return Some(false);
                    }
                }
                true
            }
            Guard::Or(gs) => {
                for g in gs {
                    if g.eval(env)? {
                        return Some(true);
                    }
                }
                false
            }
        })
    }

    /// Replaces every symbol by a term over another symbol type.
    pub fn map<T: Clone, F: Fn(&S) -> GTerm<T>>(&self, f: &F) -> Guard<T> {
        match self {
            Guard::True => Guard::True,
            Guard::False => Guard::False,
            Guard::Cmp(op, a, b) => Guard::Cmp(*op, a.map(f), b.map(f)),
            Guard::In(p, t) => Guard::In(p.clone(), t.map(f)),
            Guard::Not(g) => Guard::Not(Box::new(g.map(f))),
            Guard::And(gs) => Guard::And(gs.iter().map(|g| g.map(f)).collect()),
            Guard::Or(gs) => Guard::Or(gs.iter().map(|g| g.map(f)).collect()),
        }
    }

    pub fn to_formula<F: Fn(&S) -> Term>(&self, f: &F) -> Formula {
        match self {
            Guard::True => Formula::True,
            Guard::False => Formula::False,
            Guard::Cmp(op, a, b) => Formula::cmp(*op, a.to_term(f), b.to_term(f)),
            Guard::In(p, t) => Formula::pred_holds(p, t.to_term(f)),
            Guard::Not(g) => Formula::not(g.to_formula(f)),
            Guard::And(gs) => Formula::and(gs.iter().map(|g| g.to_formula(f))),
            Guard::Or(gs) => Formula::or(gs.iter().map(|g| g.to_formula(f))),
        }
    }

    /// Every symbol occurrence, in syntactic order, with repetitions.
    pub fn symbols(&self) -> Vec<S> {
        let mut out = Vec::new();
        self.symbols_into(&mut out);
        out
    }

    fn symbols_into(&self, out: &mut Vec<S>) {
        match self {
            Guard::True | Guard::False => {}
            Guard::Cmp(_, a, b) => {
                a.symbols_into(out);
                b.symbols_into(out);
            }
            Guard::In(_, t) => t.symbols_into(out),
            Guard::Not(g) => g.symbols_into(out),
            Guard::And(gs) | Guard::Or(gs) => gs.iter().for_each(|g| g.symbols_into(out)),
        }
    }
}

impl<S: Clone> GTerm<S> {
    /// Flattens into `(coefficient, symbol)` summands and a constant.
    pub fn linear(&self) -> (Vec<(i64, S)>, i64) {
        fn go<S: Clone>(t: &GTerm<S>, k: i64, out: &mut Vec<(i64, S)>, c: &mut i64) {
            match t {
                GTerm::Const(v) => *c += k * v,
                GTerm::Sym(s) => out.push((k, s.clone())),
                GTerm::Add(ts) => ts.iter().for_each(|t| go(t, k, out, c)),
                GTerm::Scale(j, t) => go(t, k * j, out, c),
            }
        }
        let (mut out, mut c) = (Vec::new(), 0);
        go(self, 1, &mut out, &mut c);
        (out, c)
    }
}

impl<S: fmt::Display + Clone> fmt::Display for GTerm<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (parts, c) = self.linear();
        let mut first = true;
        for (k, s) in &parts {
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            if *k == 1 {
                write!(f, "{s}")?;
            } else if *k < 0 {
                write!(f, "-{} * {s}", k.unsigned_abs())?;
            } else {
                write!(f, "{k} * {s}")?;
            }
        }
        if c != 0 || first {
            if !first {
                f.write_str(" + ")?;
            }
            if c < 0 {
                write!(f, "-{}", c.unsigned_abs())?;
            } else {
                write!(f, "{c}")?;
            }
        }
        Ok(())
    }
}

fn write_class(f: &mut fmt::Formatter<'_>, p: &CharPred) -> fmt::Result {
    f.write_str("[")?;
    for (i, &(lo, hi)) in p.intervals().iter().enumerate() {
        if i > 0 {
            f.write_str(", ")?;
        }
        if lo == hi {
            write!(f, "{lo}")?;
        } else {
            write!(f, "{lo}-{hi}")?;
        }
    }
    f.write_str("]")
}

impl<S: fmt::Display + Clone> fmt::Display for Guard<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Guard::True => f.write_str("true"),
            Guard::False => f.write_str("false"),
            Guard::Cmp(op, a, b) => {
                let op = match op {
                    CmpOp::Eq => "=",
                    CmpOp::Le => "<=",
                    CmpOp::Lt => "<",
                    CmpOp::Ge => ">=",
                    CmpOp::Gt => ">",
                };
                write!(f, "{a} {op} {b}")
            }
            Guard::In(p, t) => {
                write!(f, "{t} in ")?;
                write_class(f, p)
            }
            Guard::Not(g) => write!(f, "!({g})"),
            Guard::And(gs) | Guard::Or(gs) => {
                let sep = if matches!(self, Guard::And(_)) { " && " } else { " || " };
                if gs.is_empty() {
                    return f.write_str(if matches!(self, Guard::And(_)) { "true" } else { "false" });
                }
                for (i, g) in gs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(sep)?;
                    }
                    write!(f, "({g})")?;
                }
                Ok(())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Int(i64),
    Char(u32),
    Op(&'static str),
}

fn tokenize(src: &str) -> Result<Vec<(usize, Tok)>, GuardParseError> {
    const OPS: &[&str] = &[
        "||", "&&", "!=", "<=", ">=", "=", "<", ">", "!", "(", ")", "+", "-", "*", "[", "]", ",",
    ];
    let bytes = src.as_bytes();
    let mut i = 0;
    let mut out = Vec::new();
    'outer: while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            let v = src[start..i].parse().map_err(|_| GuardParseError {
                offset: start,
                msg: "integer out of range".into(),
            })?;
            out.push((start, Tok::Int(v)));
            continue;
        }
        if c.is_ascii_alphabetic() || c == b'_' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((start, Tok::Ident(src[start..i].to_string())));
            continue;
        }
        if c == b'\'' {
            let (cp, len) = parse_char_literal(&src[i..]).ok_or_else(|| GuardParseError {
                offset: i,
                msg: "bad character literal".into(),
            })?;
            out.push((i, Tok::Char(cp)));
            i += len;
            continue;
        }
        for op in OPS {
            if src[i..].starts_with(op) {
                out.push((i, Tok::Op(op)));
                i += op.len();
                continue 'outer;
            }
        }
        return Err(GuardParseError { offset: i, msg: format!("unexpected character {:?}", c as char) });
    }
    Ok(out)
}

/// Parses `'a'` or `'\u{61}'` at the start of `s`, returning the codepoint
/// and the number of bytes consumed.
pub fn parse_char_literal(s: &str) -> Option<(u32, usize)> {
    let rest = s.strip_prefix('\'')?;
    if let Some(hex) = rest.strip_prefix("\\u{") {
        let close = hex.find('}')?;
        let cp = u32::from_str_radix(&hex[..close], 16).ok()?;
        if !hex[close + 1..].starts_with('\'') || cp > MAX_CHAR {
            return None;
        }
        return Some((cp, 1 + 3 + close + 1 + 1));
    }
    let c = rest.chars().next()?;
    if c == '\'' || c == '\\' {
        return None;
    }
    rest[c.len_utf8()..].starts_with('\'').then_some((c as u32, 1 + c.len_utf8() + 1))
}

struct Parser<'a, S> {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
    resolve: &'a dyn Fn(&str) -> Option<S>,
}

impl<S: Clone> Parser<'_, S> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(o, _)| *o)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, GuardParseError> {
        Err(GuardParseError { offset: self.offset(), msg: msg.into() })
    }

    fn eat_op(&mut self, op: &str) -> bool {
        if matches!(self.peek(), Some(Tok::Op(o)) if *o == op) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn eat_word(&mut self, w: &str) -> bool {
        if matches!(self.peek(), Some(Tok::Ident(s)) if s == w) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn disj(&mut self) -> Result<Guard<S>, GuardParseError> {
        let mut parts = vec![self.conj()?];
        while self.eat_op("||") || self.eat_word("or") {
            parts.push(self.conj()?);
        }
        Ok(if parts.len() == 1 { parts.pop().unwrap() } else { Guard::Or(parts) })
    }

    fn conj(&mut self) -> Result<Guard<S>, GuardParseError> {
        let mut parts = vec![self.neg()?];
        while self.eat_op("&&") || self.eat_word("and") {
            parts.push(self.neg()?);
        }
        Ok(if parts.len() == 1 { parts.pop().unwrap() } else { Guard::And(parts) })
    }

    fn neg(&mut self) -> Result<Guard<S>, GuardParseError> {
        if self.eat_op("!") || self.eat_word("not") {
            return Ok(Guard::Not(Box::new(self.neg()?)));
        }
        if self.eat_word("true") {
            return Ok(Guard::True);
        }
        if self.eat_word("false") {
            return Ok(Guard::False);
        }
        if self.eat_op("(") {
            let g = self.disj()?;
            if !self.eat_op(")") {
                return self.err("expected ')'");
            }
            return Ok(g);
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<Guard<S>, GuardParseError> {
        let lhs = self.term()?;
        if self.eat_word("in") {
            return Ok(Guard::In(self.class()?, lhs));
        }
        let op = match self.peek() {
            Some(Tok::Op("=")) => CmpOp::Eq,
            Some(Tok::Op("!=")) => {
                self.pos += 1;
                let rhs = self.term()?;
                return Ok(Guard::Not(Box::new(Guard::Cmp(CmpOp::Eq, lhs, rhs))));
            }
            Some(Tok::Op("<")) => CmpOp::Lt,
            Some(Tok::Op("<=")) => CmpOp::Le,
            Some(Tok::Op(">")) => CmpOp::Gt,
            Some(Tok::Op(">=")) => CmpOp::Ge,
            _ => return self.err("expected comparison or 'in'"),
        };
        self.pos += 1;
        let rhs = self.term()?;
        Ok(Guard::Cmp(op, lhs, rhs))
    }

    fn term(&mut self) -> Result<GTerm<S>, GuardParseError> {
        let mut parts = vec![self.summand()?];
        loop {
            if self.eat_op("+") {
                parts.push(self.summand()?);
            } else if self.eat_op("-") {
                parts.push(GTerm::Scale(-1, Box::new(self.summand()?)));
            } else {
                break;
            }
        }
        Ok(if parts.len() == 1 { parts.pop().unwrap() } else { GTerm::Add(parts) })
    }

    fn summand(&mut self) -> Result<GTerm<S>, GuardParseError> {
        let tok = |i: usize| self.toks.get(self.pos + i).map(|(_, t)| t.clone());
        if let (Some(Tok::Int(k)), Some(Tok::Op("*"))) = (tok(0), tok(1)) {
            self.pos += 2;
            return Ok(GTerm::Scale(k, Box::new(self.primary()?)));
        }
        if let (Some(Tok::Op("-")), Some(Tok::Int(k)), Some(Tok::Op("*"))) = (tok(0), tok(1), tok(2)) {
            self.pos += 3;
            return Ok(GTerm::Scale(-k, Box::new(self.primary()?)));
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<GTerm<S>, GuardParseError> {
        match self.peek().cloned() {
            Some(Tok::Int(v)) => {
                self.pos += 1;
                Ok(GTerm::Const(v))
            }
            Some(Tok::Char(c)) => {
                self.pos += 1;
                Ok(GTerm::Const(i64::from(c)))
            }
            Some(Tok::Ident(name)) => match (self.resolve)(&name) {
                Some(s) => {
                    self.pos += 1;
                    Ok(GTerm::Sym(s))
                }
                None => self.err(format!("unknown symbol '{name}'")),
            },
            Some(Tok::Op("-")) => {
                self.pos += 1;
                Ok(GTerm::Scale(-1, Box::new(self.primary()?)))
            }
            _ => self.err("expected a term"),
        }
    }

    fn point(&mut self) -> Result<u32, GuardParseError> {
        match self.peek().cloned() {
            Some(Tok::Int(v)) if (0..=i64::from(MAX_CHAR)).contains(&v) => {
                self.pos += 1;
                Ok(v as u32)
            }
            Some(Tok::Char(c)) => {
                self.pos += 1;
                Ok(c)
            }
            _ => self.err("expected a codepoint"),
        }
    }

    fn class(&mut self) -> Result<CharPred, GuardParseError> {
        if !self.eat_op("[") {
            return self.err("expected '['");
        }
        let mut pred = CharPred::empty();
        loop {
            let lo = self.point()?;
            let hi = if self.eat_op("-") { self.point()? } else { lo };
            if lo > hi {
                return self.err("empty range in class");
            }
            pred = pred.union(&CharPred::range(lo, hi));
            if self.eat_op("]") {
                return Ok(pred);
            }
            if !self.eat_op(",") {
                return self.err("expected ',' or ']'");
            }
        }
    }
}

/// Parses a guard, resolving identifiers through `resolve`.
pub fn parse_guard<S: Clone>(
    src: &str,
    resolve: &dyn Fn(&str) -> Option<S>,
) -> Result<Guard<S>, GuardParseError> {
    let toks = tokenize(src)?;
    let mut p = Parser { toks, pos: 0, end: src.len(), resolve };
    if p.toks.is_empty() {
        return Ok(Guard::True);
    }
    let g = p.disj()?;
    if p.pos != p.toks.len() {
        return p.err("trailing input");
    }
    Ok(g)
}
