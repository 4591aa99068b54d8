//! Reader for the supported QF_SLIA subset.
//!
//! Constructs outside the fragment are reported as [`FrontendError::Unsupported`]
//! rather than as syntax errors, so callers can answer "unknown" for them.

use thiserror::Error;

use crate::ast::{Atom, BoolExpr, IntExpr, Script, SortKind, StrExpr};
use crate::charset::MAX_CHAR;
use crate::formula::CmpOp;
use crate::regex::Regex;
use crate::sexp::{parse_all, Pos, Sexp};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FrontendError {
    #[error("{line}:{col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },
    #[error("{line}:{col}: unsupported feature `{feature}`")]
    Unsupported { feature: String, line: usize, col: usize },
}

impl FrontendError {
    fn parse(pos: Pos, msg: impl Into<String>) -> Self {
        FrontendError::Parse { line: pos.line, col: pos.col, msg: msg.into() }
    }

    fn unsupported(pos: Pos, feature: impl Into<String>) -> Self {
        FrontendError::Unsupported { feature: feature.into(), line: pos.line, col: pos.col }
    }
}

type Result<T> = std::result::Result<T, FrontendError>;

/// Decodes SMT-LIB 2.6 string-literal escapes (`\uXXXX`, `\u{X..X}`); `""`
/// is already collapsed by the reader.
pub fn unescape(raw: &str, pos: Pos) -> Result<Vec<u32>> {
    let chars: Vec<char> = raw.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        if chars[i] == '\\' && chars.get(i + 1) == Some(&'u') {
            if chars.get(i + 2) == Some(&'{') {
                if let Some(close) = (i + 3..chars.len().min(i + 9)).find(|&k| chars[k] == '}') {
                    let hex: String = chars[i + 3..close].iter().collect();
                    if (1..=5).contains(&hex.len()) {
                        if let Ok(c) = u32::from_str_radix(&hex, 16) {
                            if c > MAX_CHAR {
                                return Err(FrontendError::parse(pos, format!("escape \\u{{{hex}}} out of range")));
                            }
                            out.push(c);
                            i = close + 1;
                            continue;
                        }
                    }
                }
            } else if i + 6 <= chars.len() {
                let hex: String = chars[i + 2..i + 6].iter().collect();
                if hex.chars().all(|c| c.is_ascii_hexdigit()) {
                    out.push(u32::from_str_radix(&hex, 16).expect("hex digits"));
                    i += 6;
                    continue;
                }
            }
        }
        let c = chars[i] as u32;
        if c > MAX_CHAR {
            return Err(FrontendError::parse(pos, "character outside the string alphabet"));
        }
        out.push(c);
        i += 1;
    }
    Ok(out)
}

pub fn parse_script(text: &str) -> Result<Script> {
    let cmds = parse_all(text).map_err(|e| FrontendError::Parse { line: e.line, col: e.col, msg: e.msg })?;
    let mut p = Parser { script: Script::default() };
    for c in &cmds {
        p.command(c)?;
    }
    Ok(p.script)
}

struct Parser {
    script: Script,
}

fn list(s: &Sexp) -> Result<&[Sexp]> {
    s.as_list().ok_or_else(|| FrontendError::parse(s.pos(), "expected a list"))
}

fn atom(s: &Sexp) -> Result<&str> {
    s.as_atom().ok_or_else(|| FrontendError::parse(s.pos(), "expected a symbol"))
}

fn numeral(s: &Sexp) -> Result<u32> {
    atom(s)?.parse().map_err(|_| FrontendError::parse(s.pos(), "expected a numeral"))
}

fn arity(s: &Sexp, args: &[Sexp], n: usize) -> Result<()> {
    if args.len() != n {
        return Err(FrontendError::parse(s.pos(), format!("expected {n} arguments, found {}", args.len())));
    }
    Ok(())
}

fn at_least(s: &Sexp, args: &[Sexp], n: usize) -> Result<()> {
    if args.len() < n {
        return Err(FrontendError::parse(s.pos(), format!("expected at least {n} arguments")));
    }
    Ok(())
}

fn negate(e: IntExpr) -> IntExpr {
    match e {
        IntExpr::Const(c) => IntExpr::Const(-c),
        e => IntExpr::Neg(Box::new(e)),
    }
}

fn fold_right(parts: Vec<Regex>, f: fn(Regex, Regex) -> Regex) -> Regex {
    let mut it = parts.into_iter().rev();
    let last = it.next().expect("nonempty");
    it.fold(last, |acc, r| f(r, acc))
}

impl Parser {
    fn command(&mut self, c: &Sexp) -> Result<()> {
        let items = list(c)?;
        let Some(head) = items.first() else {
            return Err(FrontendError::parse(c.pos(), "empty command"));
        };
        let args = &items[1..];
        match atom(head)? {
            "set-logic" => {
                arity(c, args, 1)?;
                self.script.logic = Some(atom(&args[0])?.to_string());
            }
            "set-info" | "set-option" | "check-sat" | "get-model" | "exit" | "get-info" => {}
            "declare-fun" => {
                arity(c, args, 3)?;
                if !list(&args[1])?.is_empty() {
                    return Err(FrontendError::unsupported(args[1].pos(), "declare-fun with arguments"));
                }
                self.declare(&args[0], &args[2])?;
            }
            "declare-const" => {
                arity(c, args, 2)?;
                self.declare(&args[0], &args[1])?;
            }
            "assert" => {
                arity(c, args, 1)?;
                let e = self.boolean(&args[0])?;
                self.script.asserts.push(e);
            }
            other => return Err(FrontendError::unsupported(head.pos(), other)),
        }
        Ok(())
    }

    fn declare(&mut self, name: &Sexp, sort: &Sexp) -> Result<()> {
        let n = atom(name)?;
        if self.script.sort_of(n).is_some() {
            return Err(FrontendError::parse(name.pos(), format!("`{n}` declared twice")));
        }
        let s = match sort.as_atom() {
            Some("String") => SortKind::String,
            Some("Int") => SortKind::Int,
            Some(other) => return Err(FrontendError::unsupported(sort.pos(), format!("sort {other}"))),
            None => return Err(FrontendError::unsupported(sort.pos(), "parametric sort")),
        };
        self.script.decls.push((n.to_string(), s));
        Ok(())
    }

    /// Best-effort sort of a term, used to disambiguate `=`.
    fn sort_of(&self, s: &Sexp) -> Option<SortKind> {
        match s {
            Sexp::Str(..) => Some(SortKind::String),
            Sexp::Atom(a, _) => {
                if a.chars().all(|c| c.is_ascii_digit()) {
                    Some(SortKind::Int)
                } else {
                    self.script.sort_of(a)
                }
            }
            Sexp::List(items, _) => match s.head()? {
                "str.++" | "str.replace" | "str.substr" | "str.at" | "str.from_int" | "str.replace_all"
                | "str.from_code" | "str.replace_re" | "str.replace_re_all" => Some(SortKind::String),
                "+" | "-" | "*" | "str.len" | "str.to_int" | "str.indexof" | "div" | "mod" | "abs"
                | "str.to_code" => Some(SortKind::Int),
                "ite" => items.get(2).and_then(|t| self.sort_of(t)),
                _ => None,
            },
        }
    }

    fn boolean(&self, s: &Sexp) -> Result<BoolExpr> {
        match s {
            Sexp::Atom(a, _) if a == "true" => Ok(BoolExpr::True),
            Sexp::Atom(a, _) if a == "false" => Ok(BoolExpr::False),
            Sexp::Atom(a, p) => match self.script.sort_of(a) {
                Some(_) => Err(FrontendError::parse(*p, format!("`{a}` is not Boolean"))),
                None => Err(FrontendError::parse(*p, format!("undeclared symbol `{a}`"))),
            },
            Sexp::Str(_, p) => Err(FrontendError::parse(*p, "expected a Boolean term")),
            Sexp::List(items, _) => {
                let Some(head) = items.first() else {
                    return Err(FrontendError::parse(s.pos(), "empty term"));
                };
                let Some(h) = head.as_atom() else {
                    return Err(FrontendError::unsupported(head.pos(), "indexed Boolean operator"));
                };
                let args = &items[1..];
                let atom_ = |a| Ok(BoolExpr::Atom(a));
                match h {
                    "and" => Ok(BoolExpr::And(args.iter().map(|a| self.boolean(a)).collect::<Result<_>>()?)),
                    "or" => Ok(BoolExpr::Or(args.iter().map(|a| self.boolean(a)).collect::<Result<_>>()?)),
                    "not" => {
                        arity(s, args, 1)?;
                        Ok(BoolExpr::Not(Box::new(self.boolean(&args[0])?)))
                    }
                    "=>" => {
                        at_least(s, args, 2)?;
                        let mut parts: Vec<BoolExpr> =
                            args.iter().map(|a| self.boolean(a)).collect::<Result<_>>()?;
                        let mut acc = parts.pop().expect("two arguments");
                        while let Some(p) = parts.pop() {
                            acc = BoolExpr::Or(vec![BoolExpr::Not(Box::new(p)), acc]);
                        }
                        Ok(acc)
                    }
                    "=" | "distinct" => {
                        at_least(s, args, 2)?;
                        let sort = args.iter().find_map(|a| self.sort_of(a));
                        let eq = |a: &Sexp, b: &Sexp| -> Result<BoolExpr> {
                            match sort {
                                Some(SortKind::String) => {
                                    Ok(BoolExpr::Atom(Atom::StrEq(self.string(a)?, self.string(b)?)))
                                }
                                Some(SortKind::Int) => {
                                    Ok(BoolExpr::Atom(Atom::IntCmp(CmpOp::Eq, self.int(a)?, self.int(b)?)))
                                }
                                None => Err(FrontendError::unsupported(s.pos(), "= on Bool")),
                            }
                        };
                        if h == "=" {
                            if args.len() == 2 {
                                return eq(&args[0], &args[1]);
                            }
                            let parts = args.windows(2).map(|w| eq(&w[0], &w[1])).collect::<Result<_>>()?;
                            Ok(BoolExpr::And(parts))
                        } else {
                            let mut parts = Vec::new();
                            for i in 0..args.len() {
                                for j in i + 1..args.len() {
                                    parts.push(BoolExpr::Not(Box::new(eq(&args[i], &args[j])?)));
                                }
                            }
                            Ok(if parts.len() == 1 { parts.pop().expect("one") } else { BoolExpr::And(parts) })
                        }
                    }
                    "<=" | "<" | ">=" | ">" => {
                        at_least(s, args, 2)?;
                        let op = match h {
                            "<=" => CmpOp::Le,
                            "<" => CmpOp::Lt,
                            ">=" => CmpOp::Ge,
                            _ => CmpOp::Gt,
                        };
                        let ints: Vec<IntExpr> = args.iter().map(|a| self.int(a)).collect::<Result<_>>()?;
                        let mut parts: Vec<BoolExpr> = ints
                            .windows(2)
                            .map(|w| BoolExpr::Atom(Atom::IntCmp(op, w[0].clone(), w[1].clone())))
                            .collect();
                        Ok(if parts.len() == 1 { parts.pop().expect("one") } else { BoolExpr::And(parts) })
                    }
                    "str.in_re" | "str.in.re" => {
                        arity(s, args, 2)?;
                        atom_(Atom::InRe(self.string(&args[0])?, self.regex(&args[1])?))
                    }
                    "str.contains" => {
                        arity(s, args, 2)?;
                        atom_(Atom::Contains(self.string(&args[0])?, self.string(&args[1])?))
                    }
                    "str.prefixof" => {
                        arity(s, args, 2)?;
                        atom_(Atom::PrefixOf(self.string(&args[0])?, self.string(&args[1])?))
                    }
                    "str.suffixof" => {
                        arity(s, args, 2)?;
                        atom_(Atom::SuffixOf(self.string(&args[0])?, self.string(&args[1])?))
                    }
                    other => Err(FrontendError::unsupported(head.pos(), other)),
                }
            }
        }
    }

    fn string(&self, s: &Sexp) -> Result<StrExpr> {
        match s {
            Sexp::Str(raw, p) => Ok(StrExpr::Lit(unescape(raw, *p)?)),
            Sexp::Atom(a, p) => match self.script.sort_of(a) {
                Some(SortKind::String) => Ok(StrExpr::Var(a.clone())),
                Some(_) => Err(FrontendError::parse(*p, format!("`{a}` is not a String"))),
                None => Err(FrontendError::parse(*p, format!("undeclared symbol `{a}`"))),
            },
            Sexp::List(items, _) => {
                let Some(head) = items.first() else {
                    return Err(FrontendError::parse(s.pos(), "empty term"));
                };
                let h = head.as_atom().unwrap_or("indexed string operator");
                let args = &items[1..];
                match h {
                    "str.++" => match args.len() {
                        0 => Ok(StrExpr::Lit(vec![])),
                        _ => Ok(StrExpr::Concat(args.iter().map(|a| self.string(a)).collect::<Result<_>>()?)),
                    },
                    "str.replace" => {
                        arity(s, args, 3)?;
                        Ok(StrExpr::Replace(
                            Box::new(self.string(&args[0])?),
                            Box::new(self.string(&args[1])?),
                            Box::new(self.string(&args[2])?),
                        ))
                    }
                    "str.substr" => {
                        arity(s, args, 3)?;
                        Ok(StrExpr::Substr(
                            Box::new(self.string(&args[0])?),
                            Box::new(self.int(&args[1])?),
                            Box::new(self.int(&args[2])?),
                        ))
                    }
                    other => Err(FrontendError::unsupported(head.pos(), other)),
                }
            }
        }
    }

    fn int(&self, s: &Sexp) -> Result<IntExpr> {
        match s {
            Sexp::Atom(a, p) => {
                if a.chars().all(|c| c.is_ascii_digit()) {
                    return a
                        .parse()
                        .map(IntExpr::Const)
                        .map_err(|_| FrontendError::parse(*p, "numeral out of range"));
                }
                match self.script.sort_of(a) {
                    Some(SortKind::Int) => Ok(IntExpr::Var(a.clone())),
                    Some(_) => Err(FrontendError::parse(*p, format!("`{a}` is not an Int"))),
                    None => Err(FrontendError::parse(*p, format!("undeclared symbol `{a}`"))),
                }
            }
            Sexp::Str(_, p) => Err(FrontendError::parse(*p, "expected an integer term")),
            Sexp::List(items, _) => {
                let Some(head) = items.first() else {
                    return Err(FrontendError::parse(s.pos(), "empty term"));
                };
                let h = head.as_atom().unwrap_or("indexed integer operator");
                let args = &items[1..];
                match h {
                    "str.len" => {
                        arity(s, args, 1)?;
                        Ok(IntExpr::Len(Box::new(self.string(&args[0])?)))
                    }
                    "+" => {
                        at_least(s, args, 1)?;
                        Ok(IntExpr::Add(args.iter().map(|a| self.int(a)).collect::<Result<_>>()?))
                    }
                    "-" => {
                        at_least(s, args, 1)?;
                        let first = self.int(&args[0])?;
                        if args.len() == 1 {
                            return Ok(negate(first));
                        }
                        let mut parts = vec![first];
                        for a in &args[1..] {
                            parts.push(negate(self.int(a)?));
                        }
                        Ok(IntExpr::Add(parts))
                    }
                    "*" => {
                        arity(s, args, 2)?;
                        let (a, b) = (self.int(&args[0])?, self.int(&args[1])?);
                        match (a, b) {
                            (IntExpr::Const(k), e) | (e, IntExpr::Const(k)) => Ok(IntExpr::Mul(k, Box::new(e))),
                            _ => Err(FrontendError::unsupported(head.pos(), "nonlinear *")),
                        }
                    }
                    other => Err(FrontendError::unsupported(head.pos(), other)),
                }
            }
        }
    }

    fn single_char(&self, s: &Sexp) -> Result<Option<u32>> {
        match s {
            Sexp::Str(raw, p) => {
                let w = unescape(raw, *p)?;
                Ok((w.len() == 1).then(|| w[0]))
            }
            _ => Err(FrontendError::unsupported(s.pos(), "re.range with non-literal argument")),
        }
    }

    fn regex(&self, s: &Sexp) -> Result<Regex> {
        match s {
            Sexp::Atom(a, p) => match a.as_str() {
                "re.none" | "re.nostr" => Ok(Regex::Empty),
                "re.allchar" => Ok(Regex::AnyChar),
                "re.all" => Ok(Regex::all()),
                _ => Err(FrontendError::unsupported(*p, format!("regex `{a}`"))),
            },
            Sexp::Str(_, p) => Err(FrontendError::parse(*p, "expected a regex")),
            Sexp::List(items, _) => {
                let Some(head) = items.first() else {
                    return Err(FrontendError::parse(s.pos(), "empty term"));
                };
                let args = &items[1..];
                if let Some(idx) = head.as_list() {
                    // Indexed operators: (_ re.loop i j), (_ re.^ n).
                    let name = idx.get(1).and_then(Sexp::as_atom).unwrap_or("");
                    if idx.first().and_then(Sexp::as_atom) != Some("_") {
                        return Err(FrontendError::parse(head.pos(), "expected an indexed operator"));
                    }
                    arity(s, args, 1)?;
                    let r = self.regex(&args[0])?;
                    return match (name, &idx[2..]) {
                        ("re.loop", [lo, hi]) => Ok(Regex::repeat(r, numeral(lo)?, Some(numeral(hi)?))),
                        ("re.^", [n]) => {
                            let n = numeral(n)?;
                            Ok(Regex::repeat(r, n, Some(n)))
                        }
                        _ => Err(FrontendError::unsupported(head.pos(), format!("indexed {name}"))),
                    };
                }
                let h = atom(head)?;
                let many = |min: usize| -> Result<Vec<Regex>> {
                    at_least(s, args, min)?;
                    args.iter().map(|a| self.regex(a)).collect()
                };
                match h {
                    "str.to_re" | "str.to.re" => {
                        arity(s, args, 1)?;
                        match &args[0] {
                            Sexp::Str(raw, p) => Ok(Regex::literal(&unescape(raw, *p)?)),
                            other => Err(FrontendError::unsupported(other.pos(), "str.to_re with non-literal argument")),
                        }
                    }
                    "re.range" => {
                        arity(s, args, 2)?;
                        match (self.single_char(&args[0])?, self.single_char(&args[1])?) {
                            (Some(lo), Some(hi)) => Ok(Regex::Range(lo, hi)),
                            _ => Ok(Regex::Empty),
                        }
                    }
                    "re.++" => Ok(fold_right(many(1)?, Regex::concat)),
                    "re.union" => Ok(fold_right(many(1)?, Regex::or)),
                    "re.inter" => Ok(fold_right(many(1)?, Regex::and)),
                    "re.diff" => {
                        let mut parts = many(2)?.into_iter();
                        let first = parts.next().expect("two arguments");
                        Ok(parts.fold(first, |acc, r| Regex::and(acc, Regex::not(r))))
                    }
                    "re.comp" => {
                        arity(s, args, 1)?;
                        Ok(Regex::not(self.regex(&args[0])?))
                    }
                    "re.*" => {
                        arity(s, args, 1)?;
                        Ok(Regex::star(self.regex(&args[0])?))
                    }
                    "re.+" => {
                        arity(s, args, 1)?;
                        Ok(Regex::plus(self.regex(&args[0])?))
                    }
                    "re.opt" => {
                        arity(s, args, 1)?;
                        Ok(Regex::opt(self.regex(&args[0])?))
                    }
                    "re.loop" => {
                        if !(2..=3).contains(&args.len()) {
                            return Err(FrontendError::parse(s.pos(), "re.loop takes 2 or 3 arguments"));
                        }
                        let r = self.regex(&args[0])?;
                        let lo = numeral(&args[1])?;
                        let hi = args.get(2).map(numeral).transpose()?;
                        Ok(Regex::repeat(r, lo, hi))
                    }
                    other => Err(FrontendError::unsupported(head.pos(), other)),
                }
            }
        }
    }
}
