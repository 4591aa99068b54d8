//! Quantifier-free linear integer arithmetic with character-predicate atoms.
//!
//! Every encoding in this crate produces a [`Formula`] over variables drawn
//! from a shared [`VarTable`]. The table records a [`Sort`] per variable; the
//! sort carries the implicit range constraint that the SMT-LIB emitter turns
//! into explicit assertions.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

use crate::charset::{CharPred, MAX_CHAR};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormulaError {
    #[error("variable {0} has no value in the assignment")]
    UnboundVariable(String),
    #[error("cannot bind {var} of sort {sort:?} to {term}")]
    SortMismatch { var: String, sort: Sort, term: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var(u32);

impl Var {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sort {
    /// Occurrence counts, `≥ 0`.
    Count,
    /// Codepoints, `0 ≤ v ≤ 0x2FFFF`.
    Char,
    /// Distance labels of connectivity encodings, `≥ 0`.
    Distance,
    /// Unconstrained integers (user integer variables).
    Int,
}

impl Sort {
    pub fn lower(self) -> Option<i64> {
        match self {
            Sort::Count | Sort::Char | Sort::Distance => Some(0),
            Sort::Int => None,
        }
    }

    pub fn upper(self) -> Option<i64> {
        match self {
            Sort::Char => Some(i64::from(MAX_CHAR)),
            _ => None,
        }
    }

    pub fn admits(self, v: i64) -> bool {
        self.lower().is_none_or(|lo| v >= lo) && self.upper().is_none_or(|hi| v <= hi)
    }
}

#[derive(Debug, Clone)]
pub struct VarInfo {
    pub name: String,
    pub sort: Sort,
}

/// Allocation table for formula variables. Names are unique and valid
/// SMT-LIB simple symbols.
#[derive(Debug, Clone, Default)]
pub struct VarTable {
    entries: Vec<VarInfo>,
    by_name: HashMap<String, Var>,
}

impl VarTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// A fresh variable whose name starts with a sanitized `hint`.
    pub fn fresh(&mut self, hint: &str, sort: Sort) -> Var {
        let id = self.entries.len() as u32;
        let mut base: String = hint
            .chars()
            .map(|c| if c.is_ascii_alphanumeric() || c == '_' || c == '.' { c } else { '_' })
            .collect();
        if !base.starts_with(|c: char| c.is_ascii_alphabetic()) {
            base.insert(0, 'v');
        }
        let name = format!("{base}!{id}");
        let v = Var(id);
        self.by_name.insert(name.clone(), v);
        self.entries.push(VarInfo { name, sort });
        v
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn info(&self, v: Var) -> &VarInfo {
        &self.entries[v.index()]
    }

    pub fn name(&self, v: Var) -> &str {
        &self.entries[v.index()].name
    }

    pub fn sort(&self, v: Var) -> Sort {
        self.entries[v.index()].sort
    }

    pub fn lookup(&self, name: &str) -> Option<Var> {
        self.by_name.get(name).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Var, &VarInfo)> {
        self.entries
            .iter()
            .enumerate()
            .map(|(i, e)| (Var(i as u32), e))
    }

    /// Number of variables per sort.
    pub fn count_by_sort(&self, sort: Sort) -> usize {
        self.entries.iter().filter(|e| e.sort == sort).count()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Const(i64),
    Var(Var),
    Add(Vec<Term>),
    Mul(i64, Box<Term>),
    Ite(Box<Formula>, Box<Term>, Box<Term>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CmpOp {
    Eq,
    Le,
    Lt,
    Ge,
    Gt,
}

impl CmpOp {
    pub fn holds(self, a: i64, b: i64) -> bool {
        match self {
            CmpOp::Eq => a == b,
            CmpOp::Le => a <= b,
            CmpOp::Lt => a < b,
            CmpOp::Ge => a >= b,
            CmpOp::Gt => a > b,
        }
    }

    pub fn smt_name(self) -> &'static str {
        match self {
            CmpOp::Eq => "=",
            CmpOp::Le => "<=",
            CmpOp::Lt => "<",
            CmpOp::Ge => ">=",
            CmpOp::Gt => ">",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    True,
    False,
    Cmp(CmpOp, Term, Term),
    /// The term's value is a codepoint in the predicate.
    PredHolds(CharPred, Term),
    Not(Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
}

pub type Assignment = HashMap<Var, i64>;

impl From<Var> for Term {
    fn from(v: Var) -> Term {
        Term::Var(v)
    }
}

impl From<i64> for Term {
    fn from(c: i64) -> Term {
        Term::Const(c)
    }
}

impl Term {
    pub fn zero() -> Term {
        Term::Const(0)
    }

    /// Sum with constants folded and zero summands dropped.
    pub fn sum<I: IntoIterator<Item = Term>>(terms: I) -> Term {
        let mut constant = 0i64;
        let mut parts = Vec::new();
        for t in terms {
            match t {
                Term::Const(c) => constant += c,
                Term::Add(inner) => {
                    for u in inner {
                        match u {
                            Term::Const(c) => constant += c,
                            u => parts.push(u),
                        }
                    }
                }
                t => parts.push(t),
            }
        }
        if constant != 0 {
            parts.push(Term::Const(constant));
        }
        match parts.len() {
            0 => Term::Const(0),
            1 => parts.pop().unwrap(),
            _ => Term::Add(parts),
        }
    }

    pub fn scale(k: i64, t: Term) -> Term {
        match (k, t) {
            (0, _) => Term::Const(0),
            (1, t) => t,
            (k, Term::Const(c)) => Term::Const(k * c),
            (k, Term::Mul(j, inner)) => Term::scale(k * j, *inner),
            (k, t) => Term::Mul(k, Box::new(t)),
        }
    }

    pub fn sub(a: Term, b: Term) -> Term {
        Term::sum([a, Term::scale(-1, b)])
    }

    pub fn ite(cond: Formula, then: Term, els: Term) -> Term {
        match cond {
            Formula::True => then,
            Formula::False => els,
            cond if then == els => {
                let _ = cond;
                then
            }
            cond => Term::Ite(Box::new(cond), Box::new(then), Box::new(els)),
        }
    }

    pub fn eval(&self, env: &Assignment, table: &VarTable) -> Result<i64, FormulaError> {
        Ok(match self {
            Term::Const(c) => *c,
            Term::Var(v) => *env
                .get(v)
                .ok_or_else(|| FormulaError::UnboundVariable(table.name(*v).to_string()))?,
            Term::Add(ts) => {
                let mut s = 0i64;
                for t in ts {
                    s += t.eval(env, table)?;
                }
                s
            }
            Term::Mul(k, t) => k * t.eval(env, table)?,
            Term::Ite(c, a, b) => {
                if c.eval(env, table)? {
                    a.eval(env, table)?
                } else {
                    b.eval(env, table)?
                }
            }
        })
    }

    pub fn collect_vars(&self, out: &mut BTreeSet<Var>) {
        match self {
            Term::Const(_) => {}
            Term::Var(v) => {
                out.insert(*v);
            }
            Term::Add(ts) => ts.iter().for_each(|t| t.collect_vars(out)),
            Term::Mul(_, t) => t.collect_vars(out),
            Term::Ite(c, a, b) => {
                c.collect_vars(out);
                a.collect_vars(out);
                b.collect_vars(out);
            }
        }
    }

    fn subst(&self, map: &HashMap<Var, Term>) -> Term {
        match self {
            Term::Const(_) => self.clone(),
            Term::Var(v) => map.get(v).cloned().unwrap_or_else(|| self.clone()),
            Term::Add(ts) => Term::sum(ts.iter().map(|t| t.subst(map))),
            Term::Mul(k, t) => Term::scale(*k, t.subst(map)),
            Term::Ite(c, a, b) => Term::ite(c.subst_unchecked(map), a.subst(map), b.subst(map)),
        }
    }

    fn size(&self) -> usize {
        match self {
            Term::Const(_) | Term::Var(_) => 1,
            Term::Add(ts) => 1 + ts.iter().map(Term::size).sum::<usize>(),
            Term::Mul(_, t) => 1 + t.size(),
            Term::Ite(c, a, b) => 1 + c.size() + a.size() + b.size(),
        }
    }
}

impl Formula {
    pub fn and<I: IntoIterator<Item = Formula>>(parts: I) -> Formula {
        let mut out = Vec::new();
        for f in parts {
            match f {
                Formula::True => {}
                Formula::False => return Formula::False,
                Formula::And(inner) => out.extend(inner),
                f => out.push(f),
            }
        }
        match out.len() {
            0 => Formula::True,
            1 => out.pop().unwrap(),
            _ => Formula::And(out),
        }
    }

    pub fn or<I: IntoIterator<Item = Formula>>(parts: I) -> Formula {
        let mut out = Vec::new();
        for f in parts {
            match f {
                Formula::False => {}
                Formula::True => return Formula::True,
                Formula::Or(inner) => out.extend(inner),
                f => out.push(f),
            }
        }
        match out.len() {
            0 => Formula::False,
            1 => out.pop().unwrap(),
            _ => Formula::Or(out),
        }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        match f {
            Formula::True => Formula::False,
            Formula::False => Formula::True,
            Formula::Not(inner) => *inner,
            f => Formula::Not(Box::new(f)),
        }
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::or([Formula::not(a), b])
    }

    /// Exactly one of `a`, `b` holds.
    pub fn xor(a: Formula, b: Formula) -> Formula {
        Formula::or([
            Formula::and([a.clone(), Formula::not(b.clone())]),
            Formula::and([Formula::not(a), b]),
        ])
    }

    pub fn cmp(op: CmpOp, a: impl Into<Term>, b: impl Into<Term>) -> Formula {
        let (a, b) = (a.into(), b.into());
        if let (Term::Const(x), Term::Const(y)) = (&a, &b) {
            return if op.holds(*x, *y) { Formula::True } else { Formula::False };
        }
        Formula::Cmp(op, a, b)
    }

    pub fn eq(a: impl Into<Term>, b: impl Into<Term>) -> Formula {
        Formula::cmp(CmpOp::Eq, a, b)
    }

    pub fn le(a: impl Into<Term>, b: impl Into<Term>) -> Formula {
        Formula::cmp(CmpOp::Le, a, b)
    }

    pub fn lt(a: impl Into<Term>, b: impl Into<Term>) -> Formula {
        Formula::cmp(CmpOp::Lt, a, b)
    }

    pub fn ge(a: impl Into<Term>, b: impl Into<Term>) -> Formula {
        Formula::cmp(CmpOp::Ge, a, b)
    }

    pub fn gt(a: impl Into<Term>, b: impl Into<Term>) -> Formula {
        Formula::cmp(CmpOp::Gt, a, b)
    }

    pub fn ne(a: impl Into<Term>, b: impl Into<Term>) -> Formula {
        Formula::not(Formula::eq(a, b))
    }

    /// `pred_holds(p, t)`, folded when `t` is a constant or `p` is trivial.
    pub fn pred_holds(p: &CharPred, t: impl Into<Term>) -> Formula {
        let t = t.into();
        if p.is_empty() {
            return Formula::False;
        }
        match t {
            Term::Const(c) => {
                if c >= 0 && c <= i64::from(MAX_CHAR) && p.contains(c as u32) {
                    Formula::True
                } else {
                    Formula::False
                }
            }
            t => Formula::PredHolds(p.clone(), t),
        }
    }

    /// Pointwise equality of two equally long vectors.
    pub fn vec_eq(a: &[Term], b: &[Term]) -> Formula {
        debug_assert_eq!(a.len(), b.len());
        Formula::and(a.iter().zip(b).map(|(x, y)| Formula::eq(x.clone(), y.clone())))
    }

    pub fn vec_le(a: &[Term], b: &[Term]) -> Formula {
        debug_assert_eq!(a.len(), b.len());
        Formula::and(a.iter().zip(b).map(|(x, y)| Formula::le(x.clone(), y.clone())))
    }

    pub fn eval(&self, env: &Assignment, table: &VarTable) -> Result<bool, FormulaError> {
        Ok(match self {
            Formula::True => true,
            Formula::False => false,
            Formula::Cmp(op, a, b) => op.holds(a.eval(env, table)?, b.eval(env, table)?),
            Formula::PredHolds(p, t) => {
                let v = t.eval(env, table)?;
                v >= 0 && v <= i64::from(MAX_CHAR) && p.contains(v as u32)
            }
            Formula::Not(f) => !f.eval(env, table)?,
            Formula::And(fs) => {
                for f in fs {
                    if !f.eval(env, table)? {
                        return Ok(false);
                    }
                }
                true
            }
            Formula::Or(fs) => {
                for f in fs {
                    if f.eval(env, table)? {
                        return Ok(true);
                    }
                }
                false
            }
        })
    }

    pub fn collect_vars(&self, out: &mut BTreeSet<Var>) {
        match self {
            Formula::True | Formula::False => {}
            Formula::Cmp(_, a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            Formula::PredHolds(_, t) => t.collect_vars(out),
            Formula::Not(f) => f.collect_vars(out),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().for_each(|f| f.collect_vars(out)),
        }
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        let mut s = BTreeSet::new();
        self.collect_vars(&mut s);
        s
    }

    /// Number of AST nodes.
    pub fn size(&self) -> usize {
        match self {
            Formula::True | Formula::False => 1,
            Formula::Cmp(_, a, b) => 1 + a.size() + b.size(),
            Formula::PredHolds(_, t) => 1 + t.size(),
            Formula::Not(f) => 1 + f.size(),
            Formula::And(fs) | Formula::Or(fs) => 1 + fs.iter().map(Formula::size).sum::<usize>(),
        }
    }

    fn subst_unchecked(&self, map: &HashMap<Var, Term>) -> Formula {
        match self {
            Formula::True | Formula::False => self.clone(),
            Formula::Cmp(op, a, b) => Formula::cmp(*op, a.subst(map), b.subst(map)),
            Formula::PredHolds(p, t) => Formula::pred_holds(p, t.subst(map)),
            Formula::Not(f) => Formula::not(f.subst_unchecked(map)),
            Formula::And(fs) => Formula::and(fs.iter().map(|f| f.subst_unchecked(map))),
            Formula::Or(fs) => Formula::or(fs.iter().map(|f| f.subst_unchecked(map))),
        }
    }

    /// Replaces variables by terms. Constants must lie in the variable's
    /// sort range and variables must have the same sort (anything may replace
    /// an `Int` variable). Compound terms are accepted as is.
    pub fn subst(&self, map: &HashMap<Var, Term>, table: &VarTable) -> Result<Formula, FormulaError> {
        for (&v, t) in map {
            let sort = table.sort(v);
            let ok = match t {
                Term::Const(c) => sort.admits(*c),
                Term::Var(w) => sort == Sort::Int || table.sort(*w) == sort,
                _ => true,
            };
            if !ok {
                return Err(FormulaError::SortMismatch {
                    var: table.name(v).to_string(),
                    sort,
                    term: format!("{t:?}"),
                });
            }
        }
        Ok(self.subst_unchecked(map))
    }
}

/// A formula together with the table declaring its variables.
#[derive(Debug, Clone)]
pub struct LinFormula {
    pub vars: VarTable,
    pub body: Formula,
}

impl LinFormula {
    pub fn new(vars: VarTable, body: Formula) -> Self {
        LinFormula { vars, body }
    }

    /// Evaluates the body and checks the sort range of every assigned variable.
    pub fn eval(&self, env: &Assignment) -> Result<bool, FormulaError> {
        for (&v, &val) in env {
            if v.index() < self.vars.len() && !self.vars.sort(v).admits(val) {
                return Ok(false);
            }
        }
        self.body.eval(env, &self.vars)
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}", self.0)
    }
}
