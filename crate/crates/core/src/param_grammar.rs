//! Parametric context-free grammars: productions whose right-hand sides
//! mention local variables and parameters, restricted by guards.
//!
//! A derivation fixes one value per parameter for the whole derivation and
//! fresh values for the local variables at every rule application. The
//! grammar file format is documented in `docs/grammar-format.md`.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::cfg::{Cfg, Rule, Sym};
use crate::charset::{CharPred, MAX_CHAR};
use crate::formula::{Formula, LinFormula, Sort, Term, Var, VarTable};
use crate::parikh_core::cfg_count_constraints;
use crate::guard::{parse_char_literal, parse_guard, GTerm, Guard};

/// Default bound on concrete instantiations per production.
pub const DEFAULT_INSTANTIATION_CAP: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GrammarError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("invalid grammar: {0}")]
    Invalid(String),
    #[error("production {production} has {count} instantiations, more than the cap {cap}")]
    InstantiationBlowup { production: usize, count: u128, cap: usize },
}

/// Symbols that guards may mention.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GSym {
    Param(usize),
    Local(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RhsSym {
    Local(usize),
    Param(usize),
    Nt(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Production {
    pub lhs: usize,
    pub rhs: Vec<RhsSym>,
    /// Names of this production's local variables.
    pub locals: Vec<String>,
    pub guard: Guard<GSym>,
}

impl Production {
    pub fn count_nt(&self, b: usize) -> usize {
        self.rhs.iter().filter(|s| **s == RhsSym::Nt(b)).count()
    }

    pub fn nonterminals(&self) -> impl Iterator<Item = usize> + '_ {
        self.rhs.iter().filter_map(|s| match s {
            RhsSym::Nt(b) => Some(*b),
            _ => None,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParamGrammar {
    pub params: Vec<String>,
    pub nonterminals: Vec<String>,
    pub start: usize,
    pub productions: Vec<Production>,
}

impl ParamGrammar {
    pub fn new(
        params: Vec<String>,
        nonterminals: Vec<String>,
        start: usize,
        productions: Vec<Production>,
    ) -> Result<Self, GrammarError> {
        let g = ParamGrammar { params, nonterminals, start, productions };
        g.validate()?;
        Ok(g)
    }

    fn validate(&self) -> Result<(), GrammarError> {
        let bad = |m: String| Err(GrammarError::Invalid(m));
        if self.start >= self.nonterminals.len() {
            return bad("start symbol is not a nonterminal".into());
        }
        for (i, p) in self.productions.iter().enumerate() {
            if p.lhs >= self.nonterminals.len() {
                return bad(format!("production {i}: unknown left-hand side"));
            }
            for s in &p.rhs {
                let ok = match *s {
                    RhsSym::Local(l) => l < p.locals.len(),
                    RhsSym::Param(x) => x < self.params.len(),
                    RhsSym::Nt(b) => b < self.nonterminals.len(),
                };
                if !ok {
                    return bad(format!("production {i}: right-hand side symbol out of range"));
                }
            }
            for s in p.guard.symbols() {
                let ok = match s {
                    GSym::Local(l) => l < p.locals.len(),
                    GSym::Param(x) => x < self.params.len(),
                };
                if !ok {
                    return bad(format!("production {i}: guard symbol out of range"));
                }
            }
        }
        Ok(())
    }

    /// The maximum right-hand side length.
    pub fn max_rhs_len(&self) -> usize {
        self.productions.iter().map(|p| p.rhs.len()).max().unwrap_or(0)
    }

    pub fn max_locals(&self) -> usize {
        self.productions.iter().map(|p| p.locals.len()).max().unwrap_or(0)
    }

    /// Parses the text format.
    pub fn parse(text: &str) -> Result<Self, GrammarError> {
        parse_grammar(text)
    }
}

struct RawAlt {
    syms: Vec<String>,
    guard: String,
}

struct RawLine {
    line: usize,
    lhs: String,
    alts: Vec<RawAlt>,
}

fn split_alternatives(line: usize, body: &str) -> Result<Vec<RawAlt>, GrammarError> {
    let err = |msg: &str| GrammarError::Parse { line, msg: msg.to_string() };
    let mut alts = Vec::new();
    let mut cur = RawAlt { syms: Vec::new(), guard: String::new() };
    let mut have_guard = false;
    let mut rest = body.trim_start();
    while !rest.is_empty() {
        if let Some(r) = rest.strip_prefix('|') {
            alts.push(std::mem::replace(&mut cur, RawAlt { syms: Vec::new(), guard: String::new() }));
            have_guard = false;
            rest = r.trim_start();
            continue;
        }
        if have_guard {
            return Err(err("symbols after a guard"));
        }
        if rest.starts_with('[') {
            let mut depth = 0usize;
            let mut end = None;
            let mut it = rest.char_indices().peekable();
            while let Some((i, c)) = it.next() {
                match c {
                    '\'' => {
                        let (_, len) = parse_char_literal(&rest[i..]).ok_or_else(|| err("bad character literal"))?;
                        while it.peek().is_some_and(|&(j, _)| j < i + len) {
                            it.next();
                        }
                    }
                    '[' => depth += 1,
                    ']' => {
                        depth -= 1;
                        if depth == 0 {
                            end = Some(i);
                            break;
                        }
                    }
                    _ => {}
                }
            }
            let end = end.ok_or_else(|| err("unclosed guard bracket"))?;
            cur.guard = rest[1..end].to_string();
            have_guard = true;
            rest = rest[end + 1..].trim_start();
            continue;
        }
        if rest.starts_with('\'') {
            let (_, len) = parse_char_literal(rest).ok_or_else(|| err("bad character literal"))?;
            cur.syms.push(rest[..len].to_string());
            rest = rest[len..].trim_start();
            continue;
        }
        let end = rest
            .find(|c: char| c.is_whitespace() || c == '|' || c == '[')
            .unwrap_or(rest.len());
        cur.syms.push(rest[..end].to_string());
        rest = rest[end..].trim_start();
    }
    alts.push(cur);
    Ok(alts)
}

fn is_ident(s: &str) -> bool {
    s.starts_with(|c: char| c.is_ascii_alphabetic() || c == '_')
        && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn parse_grammar(text: &str) -> Result<ParamGrammar, GrammarError> {
    let mut params: Vec<String> = Vec::new();
    let mut start_name: Option<String> = None;
    let mut lines = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let err = |msg: String| GrammarError::Parse { line, msg };
        if let Some(rest) = content.strip_prefix("params:") {
            for p in rest.split(|c: char| c.is_whitespace() || c == ',').filter(|s| !s.is_empty()) {
                if !is_ident(p) {
                    return Err(err(format!("bad parameter name '{p}'")));
                }
                params.push(p.to_string());
            }
            continue;
        }
        if let Some(rest) = content.strip_prefix("start:") {
            start_name = Some(rest.trim().to_string());
            continue;
        }
        let (lhs, body) = content.split_once("->").ok_or_else(|| err("expected 'A -> ...'".into()))?;
        let lhs = lhs.trim();
        if !is_ident(lhs) {
            return Err(err(format!("bad nonterminal name '{lhs}'")));
        }
        lines.push(RawLine { line, lhs: lhs.to_string(), alts: split_alternatives(line, body)? });
    }

    let mut nonterminals: Vec<String> = Vec::new();
    for l in &lines {
        if !nonterminals.contains(&l.lhs) {
            nonterminals.push(l.lhs.clone());
        }
    }
    let start = match &start_name {
        Some(s) => nonterminals.iter().position(|n| n == s).ok_or(GrammarError::Parse {
            line: 0,
            msg: format!("start symbol '{s}' has no productions"),
        })?,
        None if nonterminals.is_empty() => {
            return Err(GrammarError::Parse { line: 0, msg: "no productions".into() })
        }
        None => 0,
    };
    if let Some(p) = params.iter().find(|p| nonterminals.contains(p)) {
        return Err(GrammarError::Parse { line: 0, msg: format!("'{p}' is both a parameter and a nonterminal") });
    }

    let mut productions = Vec::new();
    for l in &lines {
        let lhs = nonterminals.iter().position(|n| *n == l.lhs).unwrap();
        for alt in &l.alts {
            let err = |msg: String| GrammarError::Parse { line: l.line, msg };
            let mut locals: Vec<String> = Vec::new();
            let mut extra = Vec::new();
            let mut rhs = Vec::new();
            for s in &alt.syms {
                if s == "ε" || s == "eps" {
                    continue;
                }
                if s.starts_with('\'') {
                    let (cp, _) = parse_char_literal(s).ok_or_else(|| err("bad character literal".into()))?;
                    let idx = locals.len();
                    locals.push(format!("_c{idx}"));
                    extra.push(Guard::Cmp(
                        crate::formula::CmpOp::Eq,
                        GTerm::Sym(GSym::Local(idx)),
                        GTerm::Const(i64::from(cp)),
                    ));
                    rhs.push(RhsSym::Local(idx));
                } else if let Some(b) = nonterminals.iter().position(|n| n == s) {
                    rhs.push(RhsSym::Nt(b));
                } else if let Some(x) = params.iter().position(|n| n == s) {
                    rhs.push(RhsSym::Param(x));
                } else if is_ident(s) {
                    let idx = match locals.iter().position(|n| n == s) {
                        Some(i) => i,
                        None => {
                            locals.push(s.clone());
                            locals.len() - 1
                        }
                    };
                    rhs.push(RhsSym::Local(idx));
                } else {
                    return Err(err(format!("bad symbol '{s}'")));
                }
            }
            let locals_cell = std::cell::RefCell::new(locals);
            let resolve = |name: &str| -> Option<GSym> {
                if let Some(x) = params.iter().position(|n| n == name) {
                    return Some(GSym::Param(x));
                }
                if nonterminals.iter().any(|n| n == name) {
                    return None;
                }
                let mut ls = locals_cell.borrow_mut();
                Some(GSym::Local(match ls.iter().position(|n| n == name) {
                    Some(i) => i,
                    None => {
                        ls.push(name.to_string());
                        ls.len() - 1
                    }
                }))
            };
            let guard = parse_guard(&alt.guard, &resolve).map_err(|e| err(e.to_string()))?;
            extra.insert(0, guard);
            productions.push(Production {
                lhs,
                rhs,
                locals: locals_cell.into_inner(),
                guard: Guard::and(extra),
            });
        }
    }
    ParamGrammar::new(params, nonterminals, start, productions)
}

#[derive(Clone)]
struct NamedSym<'a> {
    g: &'a ParamGrammar,
    p: &'a Production,
    s: GSym,
}

impl fmt::Display for NamedSym<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.s {
            GSym::Param(x) => f.write_str(&self.g.params[x]),
            GSym::Local(l) => f.write_str(&self.p.locals[l]),
        }
    }
}

impl fmt::Display for ParamGrammar {
    /// Prints the text format; parsing the output yields an equal grammar up
    /// to the desugaring of character literals.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.params.is_empty() {
            writeln!(f, "params: {}", self.params.join(" "))?;
        }
        writeln!(f, "start: {}", self.nonterminals[self.start])?;
        for p in &self.productions {
            write!(f, "{} ->", self.nonterminals[p.lhs])?;
            if p.rhs.is_empty() {
                f.write_str(" eps")?;
            }
            for s in &p.rhs {
                let name = match *s {
                    RhsSym::Local(l) => &p.locals[l],
                    RhsSym::Param(x) => &self.params[x],
                    RhsSym::Nt(b) => &self.nonterminals[b],
                };
                write!(f, " {name}")?;
            }
            if p.guard != Guard::True {
                let named = p.guard.map(&|&s| GTerm::Sym(NamedSym { g: self, p, s }));
                write!(f, " [{named}]")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// A formula satisfiable iff the grammar generates at least one word.
///
/// Each nonterminal gets a use flag `u_A`, an order index `o_A` and one
/// fresh copy of the local variables per production; a used nonterminal picks
/// a production whose guard holds and whose right-hand side nonterminals are
/// used and strictly later in the order.
pub fn nonempty_formula(g: &ParamGrammar) -> LinFormula {
    let mut vars = VarTable::new();
    let params: Vec<Var> = g.params.iter().map(|p| vars.fresh(p, Sort::Char)).collect();
    let nn = g.nonterminals.len();
    let used: Vec<Var> = g.nonterminals.iter().map(|a| vars.fresh(&format!("u_{a}"), Sort::Count)).collect();
    let order: Vec<Var> = g.nonterminals.iter().map(|a| vars.fresh(&format!("o_{a}"), Sort::Distance)).collect();
    let mut parts = vec![Formula::eq(used[g.start], 1)];
    for a in 0..nn {
        parts.push(Formula::le(used[a], 1));
        parts.push(Formula::le(order[a], nn as i64));
        let choices: Vec<Formula> = g
            .productions
            .iter()
            .enumerate()
            .filter(|(_, p)| p.lhs == a)
            .map(|(pi, p)| {
                let locals: Vec<Var> =
                    p.locals.iter().map(|l| vars.fresh(&format!("p{pi}_{l}"), Sort::Char)).collect();
                let guard = p.guard.to_formula(&|s| match *s {
                    GSym::Param(x) => Term::Var(params[x]),
                    GSym::Local(l) => Term::Var(locals[l]),
                });
                Formula::and(std::iter::once(guard).chain(p.nonterminals().map(|b| {
                    Formula::and([Formula::eq(used[b], 1), Formula::gt(order[b], order[a])])
                })))
            })
            .collect();
        parts.push(Formula::implies(Formula::eq(used[a], 1), Formula::or(choices)));
    }
    LinFormula::new(vars, Formula::and(parts))
}

/// The plain grammar obtained by fixing the parameters and letting the local
/// variables range over `domain`.
pub fn instantiate_finite(
    g: &ParamGrammar,
    params: &[i64],
    domain: &[u32],
    cap: usize,
) -> Result<Cfg, GrammarError> {
    assert_eq!(params.len(), g.params.len(), "one value per parameter");
    let mut rules = BTreeSet::new();
    for (pi, p) in g.productions.iter().enumerate() {
        let nl = p.locals.len();
        let count = (domain.len() as u128).saturating_pow(nl as u32);
        if count > cap as u128 {
            return Err(GrammarError::InstantiationBlowup { production: pi, count, cap });
        }
        if domain.is_empty() && nl > 0 {
            continue;
        }
        let mut idx = vec![0usize; nl];
        loop {
            let vals: Vec<i64> = idx.iter().map(|&i| i64::from(domain[i])).collect();
            let env = |s: &GSym| match *s {
                GSym::Param(x) => Some(params[x]),
                GSym::Local(l) => Some(vals[l]),
            };
            if p.guard.eval(&env) == Some(true) {
                let rhs: Option<Vec<Sym>> = p
                    .rhs
                    .iter()
                    .map(|s| match *s {
                        RhsSym::Local(l) => Some(Sym::T(vals[l] as u32)),
                        RhsSym::Param(x) => (0..=i64::from(MAX_CHAR))
                            .contains(&params[x])
                            .then(|| Sym::T(params[x] as u32)),
                        RhsSym::Nt(b) => Some(Sym::N(b)),
                    })
                    .collect();
                if let Some(rhs) = rhs {
                    rules.insert(Rule { lhs: p.lhs, rhs });
                }
            }
            // Odometer increment.
            let mut k = 0;
            while k < nl {
                idx[k] += 1;
                if idx[k] < domain.len() {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
            if k == nl {
                break;
            }
        }
    }
    Ok(Cfg::new(g.nonterminals.clone(), g.start, rules.into_iter().collect()))
}

#[derive(Debug, Clone, Copy, Default)]
pub struct GrammarParikhOpts {
    /// Overrides the number of mapping slots.
    pub slots: Option<usize>,
}

/// Number of distinct rule instantiations sufficient for some derivation of
/// every Parikh vector: `|N| + max(1, ⌈2·d·log2(max(d·ℓ, 2))⌉)` with
/// `d = n + 2|N|` and `ℓ` the longest right-hand side.
pub fn default_slot_count(g: &ParamGrammar, n: usize) -> usize {
    let nn = g.nonterminals.len();
    let d = n + 2 * nn;
    let l = g.max_rhs_len();
    let inner = ((d * l).max(2)) as f64;
    let raw = (2.0 * d as f64 * inner.log2()).ceil() as usize;
    nn + raw.max(1)
}

/// Constrains `xs[i]` to the number of positions satisfying `psi[i]` in some
/// word of the grammar.
///
/// Every slot `j` guesses a production `r_j` (or the extra value
/// `|P|` for an unused slot), an instantiation of its local variables and a
/// multiplicity `m_j`. The slots' weighted source/target nonterminal counts
/// must satisfy the derivation balance equations and reach every used
/// nonterminal from the start symbol; each slot adds `m_j` to `xs[i]` per
/// right-hand side position whose value satisfies `psi[i]`.
pub fn encode_grammar_parikh(
    g: &ParamGrammar,
    psi: &[CharPred],
    xs: &[Term],
    vars: &mut VarTable,
    opts: GrammarParikhOpts,
) -> Formula {
    assert_eq!(psi.len(), xs.len());
    let np = g.productions.len();
    let k = opts.slots.unwrap_or_else(|| default_slot_count(g, psi.len()));
    let params: Vec<Var> = g.params.iter().map(|p| vars.fresh(p, Sort::Char)).collect();
    let max_locals = g.max_locals();

    let mut parts = Vec::new();
    let mut rule: Vec<Var> = Vec::with_capacity(k);
    let mut contributions: Vec<Vec<Term>> = vec![Vec::new(); psi.len()];
    let mut uses: Vec<Vec<Term>> = vec![Vec::new(); np];
    let mut prev_locals: Vec<Var> = Vec::new();

    for j in 0..k {
        let r = vars.fresh(&format!("r{j}"), Sort::Count);
        let m = vars.fresh(&format!("m{j}"), Sort::Count);
        let locals: Vec<Var> = (0..max_locals).map(|l| vars.fresh(&format!("s{j}_y{l}"), Sort::Char)).collect();
        parts.push(Formula::le(r, np as i64));
        // A slot is unused exactly when its multiplicity is zero.
        parts.push(Formula::implies(Formula::eq(r, np as i64), Formula::eq(m, 0)));
        parts.push(Formula::implies(Formula::eq(m, 0), Formula::eq(r, np as i64)));
        // Slots are interchangeable: sort them by rule, then by first local.
        if let Some(&prev) = rule.last() {
            parts.push(Formula::le(prev, r));
            if let (Some(&y_prev), Some(&y)) = (prev_locals.first(), locals.first()) {
                parts.push(Formula::implies(
                    Formula::and([Formula::eq(prev, r), Formula::lt(r, np as i64)]),
                    Formula::le(y_prev, y),
                ));
            }
        }
        let w: Vec<Var> = (0..psi.len()).map(|i| vars.fresh(&format!("w{j}_{i}"), Sort::Count)).collect();
        for &wi in &w {
            parts.push(Formula::implies(Formula::eq(m, 0), Formula::eq(wi, 0)));
        }
        for (pi, p) in g.productions.iter().enumerate() {
            let chosen = Formula::eq(r, pi as i64);
            let guard = p.guard.to_formula(&|s| match *s {
                GSym::Param(x) => Term::Var(params[x]),
                GSym::Local(l) => Term::Var(locals[l]),
            });
            // `u` is the slot's multiplicity if it applies `p`, else zero.
            let u = vars.fresh(&format!("u{j}_{pi}"), Sort::Count);
            parts.push(Formula::implies(chosen.clone(), Formula::and([guard, Formula::eq(u, m)])));
            parts.push(Formula::implies(Formula::not(chosen.clone()), Formula::eq(u, 0)));
            uses[pi].push(Term::Var(u));
            for (i, pred) in psi.iter().enumerate() {
                let per_rule = Term::sum(p.rhs.iter().filter_map(|s| {
                    let v = match *s {
                        RhsSym::Local(l) => locals[l],
                        RhsSym::Param(x) => params[x],
                        RhsSym::Nt(_) => return None,
                    };
                    Some(Term::ite(Formula::pred_holds(pred, v), Term::Var(m), Term::zero()))
                }));
                parts.push(Formula::implies(chosen.clone(), Formula::eq(w[i], per_rule)));
            }
        }
        for (i, &wi) in w.iter().enumerate() {
            contributions[i].push(Term::Var(wi));
        }
        rule.push(r);
        prev_locals = locals;
    }

    // Total applications per production obey the balance and reachability
    // conditions of plain rule counts; only the nonterminal skeleton matters.
    let skeleton = Cfg::new(
        g.nonterminals.clone(),
        g.start,
        g.productions
            .iter()
            .map(|p| Rule { lhs: p.lhs, rhs: p.nonterminals().map(Sym::N).collect() })
            .collect(),
    );
    let totals: Vec<Term> = uses
        .into_iter()
        .enumerate()
        .map(|(pi, us)| {
            let n = vars.fresh(&format!("n{pi}"), Sort::Count);
            parts.push(Formula::eq(n, Term::sum(us)));
            Term::Var(n)
        })
        .collect();
    parts.push(cfg_count_constraints(&skeleton, &totals, vars));

    for (x, contrib) in xs.iter().zip(contributions) {
        parts.push(Formula::eq(x.clone(), Term::sum(contrib)));
    }
    Formula::and(parts)
}

/// [`encode_grammar_parikh`] with fresh output variables `x_1..x_n`.
pub fn grammar_parikh_formula(
    g: &ParamGrammar,
    psi: &[CharPred],
    opts: GrammarParikhOpts,
) -> (LinFormula, Vec<Var>) {
    let mut vars = VarTable::new();
    let xs: Vec<Var> = (0..psi.len()).map(|i| vars.fresh(&format!("x{i}"), Sort::Count)).collect();
    let terms: Vec<Term> = xs.iter().map(|&v| Term::Var(v)).collect();
    let body = encode_grammar_parikh(g, psi, &terms, &mut vars, opts);
    (LinFormula::new(vars, body), xs)
}

/// Concrete instantiations of each parameter assignment drawn from
/// `param_domain`, used by oracles.
pub fn param_assignments(g: &ParamGrammar, param_domain: &[i64]) -> Vec<Vec<i64>> {
    let np = g.params.len();
    let mut out = vec![Vec::new()];
    for _ in 0..np {
        out = out
            .into_iter()
            .flat_map(|prefix: Vec<i64>| {
                param_domain.iter().map(move |&v| {
                    let mut p = prefix.clone();
                    p.push(v);
                    p
                })
            })
            .collect();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const PALINDROME: &str = "S -> y S y | y y\n";

    #[test]
    fn parses_palindrome_grammar() {
        let g = ParamGrammar::parse(PALINDROME).unwrap();
        assert_eq!(g.nonterminals, vec!["S"]);
        assert_eq!(g.productions.len(), 2);
        assert_eq!(g.productions[0].rhs, vec![RhsSym::Local(0), RhsSym::Nt(0), RhsSym::Local(0)]);
        assert_eq!(g.max_rhs_len(), 3);
    }

    #[test]
    fn parses_parameters_guards_and_literals() {
        let text = "params: x\n# comment\nS -> y x S x z [y > x && y + z = 0] | 'a' [true]\nS -> eps\n";
        let g = ParamGrammar::parse(text).unwrap();
        assert_eq!(g.params, vec!["x"]);
        assert_eq!(g.productions.len(), 3);
        let p = &g.productions[0];
        assert_eq!(p.locals, vec!["y", "z"]);
        assert_eq!(p.rhs[1], RhsSym::Param(0));
        let lit = &g.productions[1];
        assert_eq!(lit.locals, vec!["_c0"]);
        assert!(g.productions[2].rhs.is_empty());
        let again = ParamGrammar::parse(&g.to_string()).unwrap();
        assert_eq!(again, g);
    }

    #[test]
    fn guard_classes_inside_brackets() {
        let g = ParamGrammar::parse("S -> y [y in ['a'-'c', 'x']]").unwrap();
        let cfg = instantiate_finite(&g, &[], &[97, 100, 120], 100).unwrap();
        assert_eq!(cfg.rules.len(), 2);
    }

    #[test]
    fn parse_errors() {
        assert!(ParamGrammar::parse("").is_err());
        assert!(ParamGrammar::parse("S = y").is_err());
        assert!(ParamGrammar::parse("S -> y [y = ").is_err());
        assert!(ParamGrammar::parse("start: T\nS -> y").is_err());
        assert!(ParamGrammar::parse("S -> y [S = 1]").is_err());
    }

    #[test]
    fn instantiation_examples() {
        let g = ParamGrammar::parse(PALINDROME).unwrap();
        let cfg = instantiate_finite(&g, &[], &[97, 98], 100).unwrap();
        assert_eq!(cfg.rules.len(), 4);

        let h = ParamGrammar::parse("params: x\nS -> y [y = x]").unwrap();
        let cfg = instantiate_finite(&h, &[97], &[97, 98], 100).unwrap();
        assert_eq!(cfg.rules, vec![Rule { lhs: 0, rhs: vec![Sym::T(97)] }]);

        let big = ParamGrammar::parse("S -> a b c d").unwrap();
        assert!(matches!(
            instantiate_finite(&big, &[], &(0..20).collect::<Vec<_>>(), 1000),
            Err(GrammarError::InstantiationBlowup { .. })
        ));
    }

    #[test]
    fn l1_instantiates_to_expected_words() {
        let g = ParamGrammar::parse("S -> 'a' S 'a' | 'a' 'c' 'a'").unwrap();
        let cfg = instantiate_finite(&g, &[], &[97, 98, 99], 100).unwrap();
        let words = cfg.enumerate_words(6);
        let expected: BTreeSet<Vec<u32>> = [vec![97, 99, 97], vec![97, 97, 99, 97, 97]].into();
        assert_eq!(words, expected);
    }

    #[test]
    fn slot_count_formula() {
        let g = ParamGrammar::parse("S -> 'a' S 'a' | 'a' 'c' 'a'").unwrap();
        // d = 3 + 2, ℓ = 3: 1 + ⌈10·log2 15⌉ = 1 + 40.
        assert_eq!(default_slot_count(&g, 3), 41);
        let eps = ParamGrammar::parse("S -> eps").unwrap();
        // d = 3, ℓ = 0: 1 + ⌈6·log2 2⌉.
        assert_eq!(default_slot_count(&eps, 1), 7);
    }
}
