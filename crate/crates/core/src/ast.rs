//! String-constraint syntax trees for the supported QF_SLIA fragment, and
//! their SMT-LIB rendering.

use std::fmt;

use crate::formula::CmpOp;
use crate::regex::Regex;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum StrExpr {
    Lit(Vec<u32>),
    Var(String),
    Concat(Vec<StrExpr>),
    /// `str.replace e e1 e2`: first occurrence of `e1` in `e` replaced by `e2`.
    Replace(Box<StrExpr>, Box<StrExpr>, Box<StrExpr>),
    Substr(Box<StrExpr>, Box<IntExpr>, Box<IntExpr>),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum IntExpr {
    Const(i64),
    Var(String),
    Len(Box<StrExpr>),
    Add(Vec<IntExpr>),
    Neg(Box<IntExpr>),
    /// Multiplication by a constant.
    Mul(i64, Box<IntExpr>),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Atom {
    InRe(StrExpr, Regex),
    StrEq(StrExpr, StrExpr),
    /// First argument contains the second.
    Contains(StrExpr, StrExpr),
    /// First argument is a prefix of the second.
    PrefixOf(StrExpr, StrExpr),
    SuffixOf(StrExpr, StrExpr),
    IntCmp(CmpOp, IntExpr, IntExpr),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum BoolExpr {
    True,
    False,
    Atom(Atom),
    Not(Box<BoolExpr>),
    And(Vec<BoolExpr>),
    Or(Vec<BoolExpr>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SortKind {
    String,
    Int,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Script {
    pub logic: Option<String>,
    pub decls: Vec<(String, SortKind)>,
    pub asserts: Vec<BoolExpr>,
}

impl Script {
    pub fn string_vars(&self) -> impl Iterator<Item = &str> {
        self.decls.iter().filter(|(_, s)| *s == SortKind::String).map(|(n, _)| n.as_str())
    }

    pub fn int_vars(&self) -> impl Iterator<Item = &str> {
        self.decls.iter().filter(|(_, s)| *s == SortKind::Int).map(|(n, _)| n.as_str())
    }

    pub fn sort_of(&self, name: &str) -> Option<SortKind> {
        self.decls.iter().find(|(n, _)| n == name).map(|(_, s)| *s)
    }
}

/// Negation normal form: negation only directly above atoms, integer
/// comparisons never negated.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Nnf {
    True,
    False,
    Pos(Atom),
    Neg(Atom),
    And(Vec<Nnf>),
    Or(Vec<Nnf>),
}

pub fn to_nnf(e: &BoolExpr) -> Nnf {
    nnf(e, true)
}

fn nnf(e: &BoolExpr, positive: bool) -> Nnf {
    match (e, positive) {
        (BoolExpr::True, true) | (BoolExpr::False, false) => Nnf::True,
        (BoolExpr::True, false) | (BoolExpr::False, true) => Nnf::False,
        (BoolExpr::Not(inner), p) => nnf(inner, !p),
        (BoolExpr::And(es), true) | (BoolExpr::Or(es), false) => {
            Nnf::And(es.iter().map(|e| nnf(e, positive)).collect())
        }
        (BoolExpr::Or(es), true) | (BoolExpr::And(es), false) => {
            Nnf::Or(es.iter().map(|e| nnf(e, positive)).collect())
        }
        (BoolExpr::Atom(a), true) => Nnf::Pos(a.clone()),
        (BoolExpr::Atom(Atom::IntCmp(op, l, r)), false) => {
            let flip = |op| Nnf::Pos(Atom::IntCmp(op, l.clone(), r.clone()));
            match op {
                CmpOp::Eq => Nnf::Or(vec![flip(CmpOp::Lt), flip(CmpOp::Gt)]),
                CmpOp::Le => flip(CmpOp::Gt),
                CmpOp::Lt => flip(CmpOp::Ge),
                CmpOp::Ge => flip(CmpOp::Lt),
                CmpOp::Gt => flip(CmpOp::Le),
            }
        }
        (BoolExpr::Atom(a), false) => Nnf::Neg(a.clone()),
    }
}

/// Renders a string literal with SMT-LIB escapes; everything outside
/// printable ASCII, and the backslash, becomes `\u{..}`.
pub fn quote_literal(w: &[u32]) -> String {
    let mut s = String::from("\"");
    for &c in w {
        match c {
            0x22 => s.push_str("\"\""),
            0x5c => s.push_str("\\u{5c}"),
            0x20..=0x7e => s.push(char::from_u32(c).expect("ascii")),
            _ => s.push_str(&format!("\\u{{{c:x}}}")),
        }
    }
    s.push('"');
    s
}

/// Renders a symbol, quoting it with `|..|` unless it is a simple symbol.
pub fn quote_symbol(name: &str) -> String {
    let simple = !name.is_empty()
        && !name.starts_with(|c: char| c.is_ascii_digit())
        && name.chars().all(|c| c.is_ascii_alphanumeric() || "~!@$%^&*_-+=<>.?/".contains(c));
    if simple {
        name.to_string()
    } else {
        format!("|{name}|")
    }
}

impl fmt::Display for StrExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StrExpr::Lit(w) => f.write_str(&quote_literal(w)),
            StrExpr::Var(v) => f.write_str(&quote_symbol(v)),
            StrExpr::Concat(es) => {
                f.write_str("(str.++")?;
                for e in es {
                    write!(f, " {e}")?;
                }
                f.write_str(")")
            }
            StrExpr::Replace(a, b, c) => write!(f, "(str.replace {a} {b} {c})"),
            StrExpr::Substr(a, i, j) => write!(f, "(str.substr {a} {i} {j})"),
        }
    }
}

impl fmt::Display for IntExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IntExpr::Const(c) if *c < 0 => write!(f, "(- {})", c.unsigned_abs()),
            IntExpr::Const(c) => write!(f, "{c}"),
            IntExpr::Var(v) => f.write_str(&quote_symbol(v)),
            IntExpr::Len(e) => write!(f, "(str.len {e})"),
            IntExpr::Add(es) => {
                f.write_str("(+")?;
                for e in es {
                    write!(f, " {e}")?;
                }
                f.write_str(")")
            }
            IntExpr::Neg(e) => write!(f, "(- {e})"),
            IntExpr::Mul(k, e) => write!(f, "(* {} {e})", IntExpr::Const(*k)),
        }
    }
}

fn fmt_regex(r: &Regex, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    let bin = |f: &mut fmt::Formatter<'_>, op: &str, a: &Regex, b: &Regex| -> fmt::Result {
        write!(f, "({op} ")?;
        fmt_regex(a, f)?;
        f.write_str(" ")?;
        fmt_regex(b, f)?;
        f.write_str(")")
    };
    let un = |f: &mut fmt::Formatter<'_>, op: &str, a: &Regex| -> fmt::Result {
        write!(f, "({op} ")?;
        fmt_regex(a, f)?;
        f.write_str(")")
    };
    match r {
        Regex::Char(c) => write!(f, "(str.to_re {})", quote_literal(&[*c])),
        Regex::Range(lo, hi) => {
            write!(f, "(re.range {} {})", quote_literal(&[*lo]), quote_literal(&[*hi]))
        }
        Regex::Concat(a, b) => bin(f, "re.++", a, b),
        Regex::Or(a, b) => bin(f, "re.union", a, b),
        Regex::And(a, b) => bin(f, "re.inter", a, b),
        Regex::Not(a) => un(f, "re.comp", a),
        Regex::Star(a) => un(f, "re.*", a),
        Regex::Plus(a) => un(f, "re.+", a),
        Regex::Opt(a) => un(f, "re.opt", a),
        Regex::Loop(a, lo, Some(hi)) => un(f, &format!("(_ re.loop {lo} {hi})"), a),
        Regex::Loop(a, lo, None) => {
            // Legacy form; the indexed loop has no unbounded variant.
            f.write_str("(re.loop ")?;
            fmt_regex(a, f)?;
            write!(f, " {lo})")
        }
        Regex::Empty => f.write_str("re.none"),
        Regex::Epsilon => f.write_str("(str.to_re \"\")"),
        Regex::AnyChar => f.write_str("re.allchar"),
    }
}

/// SMT-LIB rendering of a regex.
pub struct SmtRegex<'a>(pub &'a Regex);

impl fmt::Display for SmtRegex<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_regex(self.0, f)
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::InRe(e, r) => write!(f, "(str.in_re {e} {})", SmtRegex(r)),
            Atom::StrEq(a, b) => write!(f, "(= {a} {b})"),
            Atom::Contains(a, b) => write!(f, "(str.contains {a} {b})"),
            Atom::PrefixOf(a, b) => write!(f, "(str.prefixof {a} {b})"),
            Atom::SuffixOf(a, b) => write!(f, "(str.suffixof {a} {b})"),
            Atom::IntCmp(op, a, b) => write!(f, "({} {a} {b})", op.smt_name()),
        }
    }
}

impl fmt::Display for BoolExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let nary = |f: &mut fmt::Formatter<'_>, op: &str, es: &[BoolExpr]| -> fmt::Result {
            write!(f, "({op}")?;
            for e in es {
                write!(f, " {e}")?;
            }
            f.write_str(")")
        };
        match self {
            BoolExpr::True => f.write_str("true"),
            BoolExpr::False => f.write_str("false"),
            BoolExpr::Atom(a) => write!(f, "{a}"),
            BoolExpr::Not(e) => write!(f, "(not {e})"),
            BoolExpr::And(es) => nary(f, "and", es),
            BoolExpr::Or(es) => nary(f, "or", es),
        }
    }
}

impl fmt::Display for Script {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(l) = &self.logic {
            writeln!(f, "(set-logic {l})")?;
        }
        for (name, sort) in &self.decls {
            let s = match sort {
                SortKind::String => "String",
                SortKind::Int => "Int",
            };
            writeln!(f, "(declare-const {} {s})", quote_symbol(name))?;
        }
        for a in &self.asserts {
            writeln!(f, "(assert {a})")?;
        }
        writeln!(f, "(check-sat)")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inre(v: &str) -> BoolExpr {
        BoolExpr::Atom(Atom::InRe(StrExpr::Var(v.into()), Regex::Star(Box::new(Regex::Char(97)))))
    }

    #[test]
    fn nnf_de_morgan() {
        let e = BoolExpr::Not(Box::new(BoolExpr::And(vec![inre("x"), inre("y")])));
        let Nnf::Or(parts) = to_nnf(&e) else { panic!() };
        assert!(parts.iter().all(|p| matches!(p, Nnf::Neg(Atom::InRe(..)))));
    }

    #[test]
    fn nnf_double_negation() {
        let e = BoolExpr::Not(Box::new(BoolExpr::Not(Box::new(inre("x")))));
        assert!(matches!(to_nnf(&e), Nnf::Pos(Atom::InRe(..))));
    }

    #[test]
    fn negated_comparisons_flip() {
        let x = IntExpr::Var("n".into());
        let e = BoolExpr::Not(Box::new(BoolExpr::Atom(Atom::IntCmp(CmpOp::Le, x.clone(), IntExpr::Const(3)))));
        assert_eq!(to_nnf(&e), Nnf::Pos(Atom::IntCmp(CmpOp::Gt, x, IntExpr::Const(3))));
    }

    #[test]
    fn literal_quoting() {
        assert_eq!(quote_literal(&[97, 0x22, 0x5c, 0x1F600]), "\"a\"\"\\u{5c}\\u{1f600}\"");
    }
}
