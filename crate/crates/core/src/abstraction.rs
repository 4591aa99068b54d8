//! Overapproximation of string constraints by linear arithmetic over
//! predicate counts.
//!
//! Every string-valued expression becomes a vector of terms, one per output
//! predicate, counting the characters that satisfy it. The first predicate
//! is always `⊤`, so the first component is the length. Boolean atoms become
//! constraints on these vectors. Any model of the original script induces a
//! model of the abstraction, so an unsatisfiable abstraction proves the
//! script unsatisfiable.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::ast::{to_nnf, Atom, IntExpr, Nnf, Script, StrExpr};
use crate::charset::CharPred;
use crate::formula::{Formula, LinFormula, Sort, Term, Var, VarTable};
use crate::regex::{compile_regex_with_cap, Regex};
use crate::sfa::{Sfa, SfaError, DEFAULT_STATE_CAP};
use crate::symbolic_parikh::{encode_any_parikh, encode_phi_regex, EncodeOpts};

/// How output predicates are chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PredicateMode {
    /// Single-interval guards of the compiled regexes.
    #[default]
    Regex,
    /// Additionally one singleton per character of string literals that
    /// occur in string equations.
    RegexLiterals,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AbstractionOpts {
    pub encode: EncodeOpts,
    /// State cap for complementing automata.
    pub complement_cap: usize,
}

impl Default for AbstractionOpts {
    fn default() -> Self {
        AbstractionOpts { encode: EncodeOpts::default(), complement_cap: DEFAULT_STATE_CAP }
    }
}

fn visit_atoms(n: &Nnf, f: &mut dyn FnMut(&Atom)) {
    match n {
        Nnf::True | Nnf::False => {}
        Nnf::Pos(a) | Nnf::Neg(a) => f(a),
        Nnf::And(ps) | Nnf::Or(ps) => ps.iter().for_each(|p| visit_atoms(p, f)),
    }
}

fn literals_in(e: &StrExpr, out: &mut BTreeSet<u32>) {
    match e {
        StrExpr::Lit(w) => out.extend(w.iter().copied()),
        StrExpr::Var(_) => {}
        StrExpr::Concat(es) => es.iter().for_each(|e| literals_in(e, out)),
        StrExpr::Replace(a, b, c) => {
            literals_in(a, out);
            literals_in(b, out);
            literals_in(c, out);
        }
        StrExpr::Substr(a, ..) => literals_in(a, out),
    }
}

/// `⊤` followed by the other predicates in interval order, deduplicated.
pub fn select_predicates(script: &Script, mode: PredicateMode) -> Vec<CharPred> {
    let mut found: BTreeSet<CharPred> = BTreeSet::new();
    let mut chars: BTreeSet<u32> = BTreeSet::new();
    for a in &script.asserts {
        visit_atoms(&to_nnf(a), &mut |atom| match atom {
            Atom::InRe(_, r) => {
                if let Ok(sfa) = compile_regex_with_cap(r, DEFAULT_STATE_CAP) {
                    for l in sfa.labels() {
                        if l.intervals().len() == 1 {
                            found.insert(l);
                        }
                    }
                }
            }
            Atom::StrEq(l, r) if mode == PredicateMode::RegexLiterals => {
                literals_in(l, &mut chars);
                literals_in(r, &mut chars);
            }
            _ => {}
        });
    }
    found.extend(chars.into_iter().map(CharPred::singleton));
    let top = CharPred::top();
    std::iter::once(top.clone()).chain(found.into_iter().filter(|p| *p != top)).collect()
}

/// Result of abstracting a script.
#[derive(Debug, Clone)]
pub struct Abstraction {
    pub formula: LinFormula,
    pub psi: Vec<CharPred>,
    /// Count vector of each string variable.
    pub string_vecs: BTreeMap<String, Vec<Var>>,
    pub int_vars: BTreeMap<String, Var>,
    /// Atoms that were weakened to `true`.
    pub warnings: Vec<String>,
}

/// Mutable state while abstracting one script.
pub struct AbstractionCtx {
    pub psi: Vec<CharPred>,
    pub vars: VarTable,
    string_vecs: BTreeMap<String, Vec<Var>>,
    int_vars: BTreeMap<String, Var>,
    side: Vec<Formula>,
    pub warnings: Vec<String>,
    opts: AbstractionOpts,
    compiled: HashMap<(Regex, bool), Result<Sfa, SfaError>>,
}

fn vec_terms(v: &[Var]) -> Vec<Term> {
    v.iter().map(|&x| Term::Var(x)).collect()
}

impl AbstractionCtx {
    /// Allocates count vectors for the declared string variables and asserts
    /// that each is the count vector of some word.
    pub fn new(script: &Script, psi: Vec<CharPred>, opts: AbstractionOpts) -> Self {
        assert!(psi.first().is_some_and(CharPred::is_top), "first predicate must be ⊤");
        let mut ctx = AbstractionCtx {
            psi,
            vars: VarTable::new(),
            string_vecs: BTreeMap::new(),
            int_vars: BTreeMap::new(),
            side: Vec::new(),
            warnings: Vec::new(),
            opts,
            compiled: HashMap::new(),
        };
        for name in script.string_vars() {
            let v = ctx.fresh_vector(name);
            let f = encode_any_parikh(&ctx.psi, &vec_terms(&v), &mut ctx.vars, &ctx.opts.encode);
            ctx.side.push(f);
            ctx.string_vecs.insert(name.to_string(), v);
        }
        for name in script.int_vars() {
            let v = ctx.vars.fresh(name, Sort::Int);
            ctx.int_vars.insert(name.to_string(), v);
        }
        ctx
    }

    fn fresh_vector(&mut self, hint: &str) -> Vec<Var> {
        (0..self.psi.len()).map(|i| self.vars.fresh(&format!("{hint}_{i}"), Sort::Count)).collect()
    }

    pub fn literal_counts(&self, w: &[u32]) -> Vec<Term> {
        self.psi
            .iter()
            .map(|p| Term::Const(w.iter().filter(|&&c| p.contains(c)).count() as i64))
            .collect()
    }

    pub fn abstract_sexp(&mut self, e: &StrExpr) -> Vec<Term> {
        match e {
            StrExpr::Lit(w) => self.literal_counts(w),
            StrExpr::Var(v) => vec_terms(&self.string_vecs[v]),
            StrExpr::Concat(es) => {
                let parts: Vec<Vec<Term>> = es.iter().map(|e| self.abstract_sexp(e)).collect();
                (0..self.psi.len()).map(|i| Term::sum(parts.iter().map(|p| p[i].clone()))).collect()
            }
            StrExpr::Replace(s, t, u) => {
                let c1 = self.abstract_sexp(s);
                let c2 = self.abstract_sexp(t);
                let c3 = self.abstract_sexp(u);
                let v = vec_terms(&self.fresh_vector("rep"));
                let replaced: Vec<Term> = (0..self.psi.len())
                    .map(|i| Term::sum([c1[i].clone(), Term::scale(-1, c2[i].clone()), c3[i].clone()]))
                    .collect();
                let prepended: Vec<Term> =
                    (0..self.psi.len()).map(|i| Term::sum([c1[i].clone(), c3[i].clone()])).collect();
                let zero = vec![Term::zero(); self.psi.len()];
                self.side.push(Formula::or([
                    Formula::vec_eq(&v, &c1),
                    Formula::vec_eq(&v, &replaced),
                    Formula::and([Formula::vec_eq(&c2, &zero), Formula::vec_eq(&v, &prepended)]),
                ]));
                v
            }
            StrExpr::Substr(s, ..) => {
                let c1 = self.abstract_sexp(s);
                let v = vec_terms(&self.fresh_vector("sub"));
                self.side.push(Formula::vec_le(&v, &c1));
                let any = encode_any_parikh(&self.psi, &v, &mut self.vars, &self.opts.encode);
                self.side.push(any);
                v
            }
        }
    }

    pub fn abstract_int(&mut self, e: &IntExpr) -> Term {
        match e {
            IntExpr::Const(c) => Term::Const(*c),
            IntExpr::Var(v) => Term::Var(self.int_vars[v]),
            IntExpr::Len(s) => self.abstract_sexp(s).swap_remove(0),
            IntExpr::Add(es) => Term::sum(es.iter().map(|e| self.abstract_int(e)).collect::<Vec<_>>()),
            IntExpr::Neg(e) => Term::scale(-1, self.abstract_int(e)),
            IntExpr::Mul(k, e) => Term::scale(*k, self.abstract_int(e)),
        }
    }

    fn automaton(&mut self, r: &Regex, complement: bool) -> Result<Sfa, SfaError> {
        let key = (r.clone(), complement);
        let cap = self.opts.complement_cap;
        self.compiled
            .entry(key)
            .or_insert_with(|| {
                let target = if complement { Regex::not(r.clone()) } else { r.clone() };
                compile_regex_with_cap(&target, cap)
            })
            .clone()
    }

    /// Abstraction of an atom occurring positively (`positive`) or under a
    /// negation.
    pub fn abstract_atom(&mut self, atom: &Atom, positive: bool) -> Formula {
        match (atom, positive) {
            (Atom::InRe(e, r), _) => {
                let c = self.abstract_sexp(e);
                match self.automaton(r, !positive) {
                    Ok(sfa) => encode_phi_regex(&sfa, &self.psi, &c, &mut self.vars, &self.opts.encode),
                    Err(err) => {
                        let neg = if positive { "" } else { "negated " };
                        self.warnings.push(format!("{neg}membership {atom} weakened to true: {err}"));
                        Formula::True
                    }
                }
            }
            (Atom::StrEq(a, b), true) => {
                let (a, b) = (self.abstract_sexp(a), self.abstract_sexp(b));
                Formula::vec_eq(&a, &b)
            }
            (Atom::Contains(a, b), true) => {
                let (a, b) = (self.abstract_sexp(a), self.abstract_sexp(b));
                Formula::vec_le(&b, &a)
            }
            (Atom::PrefixOf(a, b), true) | (Atom::SuffixOf(a, b), true) => {
                let (a, b) = (self.abstract_sexp(a), self.abstract_sexp(b));
                Formula::vec_le(&a, &b)
            }
            (Atom::IntCmp(op, a, b), true) => {
                let (a, b) = (self.abstract_int(a), self.abstract_int(b));
                Formula::cmp(*op, a, b)
            }
            (Atom::IntCmp(..), false) => unreachable!("negation normal form flips comparisons"),
            (Atom::StrEq(..) | Atom::Contains(..) | Atom::PrefixOf(..) | Atom::SuffixOf(..), false) => {
                self.warnings.push(format!("negated atom {atom} weakened to true"));
                Formula::True
            }
        }
    }

    pub fn abstract_nnf(&mut self, n: &Nnf) -> Formula {
        match n {
            Nnf::True => Formula::True,
            Nnf::False => Formula::False,
            Nnf::Pos(a) => self.abstract_atom(a, true),
            Nnf::Neg(a) => self.abstract_atom(a, false),
            Nnf::And(ps) => Formula::and(ps.iter().map(|p| self.abstract_nnf(p)).collect::<Vec<_>>()),
            Nnf::Or(ps) => Formula::or(ps.iter().map(|p| self.abstract_nnf(p)).collect::<Vec<_>>()),
        }
    }

    pub fn finish(self, body: Vec<Formula>) -> Abstraction {
        let f = Formula::and(self.side.into_iter().chain(body));
        Abstraction {
            formula: LinFormula::new(self.vars, f),
            psi: self.psi,
            string_vecs: self.string_vecs,
            int_vars: self.int_vars,
            warnings: self.warnings,
        }
    }
}

/// Abstracts every assertion of `script` over the predicates `psi`.
pub fn abstract_script(script: &Script, psi: Vec<CharPred>, opts: AbstractionOpts) -> Abstraction {
    let mut ctx = AbstractionCtx::new(script, psi, opts);
    let body: Vec<Formula> = script.asserts.iter().map(|a| ctx.abstract_nnf(&to_nnf(a))).collect();
    ctx.finish(body)
}
