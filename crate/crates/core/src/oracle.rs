//! Brute-force ground truth for the encodings, used by the test suites.
//!
//! Nothing here is clever: languages are enumerated up to a length bound,
//! derivations are searched exhaustively, scripts are evaluated on every
//! small assignment.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use rayon::prelude::*;

use crate::ast::{Atom, BoolExpr, IntExpr, Script, StrExpr};
use crate::cfg::{Cfg, Sym};
use crate::charset::CharPred;
use crate::param_grammar::{instantiate_finite, param_assignments, GrammarError, ParamGrammar};
use crate::regex::{compile_regex, Regex};
use crate::sfa::{Sfa, SfaError};

/// Number of positions of `w` satisfying each predicate.
pub fn parikh_vector(w: &[u32], psi: &[CharPred]) -> Vec<i64> {
    psi.iter().map(|p| w.iter().filter(|&&c| p.contains(c)).count() as i64).collect()
}

/// Predicate-count vectors of the words of `a` over `alphabet` up to
/// `max_len`.
pub fn parikh_set_bruteforce(a: &Sfa, psi: &[CharPred], alphabet: &[u32], max_len: usize) -> BTreeSet<Vec<i64>> {
    a.enumerate_words(alphabet, max_len).iter().map(|w| parikh_vector(w, psi)).collect()
}

/// Rule-count vectors of complete derivations from the start symbol with at
/// most `max_total` rule applications.
///
/// Derivations are explored leftmost-nonterminal-first over the multiset of
/// pending nonterminals; the order of expansion does not affect counts.
pub fn derivation_counts_bruteforce(g: &Cfg, max_total: usize) -> BTreeSet<Vec<usize>> {
    let nn = g.num_nonterminals();
    let mut out = BTreeSet::new();
    let mut seen: HashSet<(Vec<usize>, Vec<usize>)> = HashSet::new();
    let mut pending = vec![0usize; nn];
    pending[g.start] = 1;
    let mut stack = vec![(pending, vec![0usize; g.rules.len()])];
    while let Some((pending, counts)) = stack.pop() {
        if !seen.insert((pending.clone(), counts.clone())) {
            continue;
        }
        let Some(a) = pending.iter().position(|&k| k > 0) else {
            out.insert(counts);
            continue;
        };
        let total: usize = counts.iter().sum();
        // Each pending nonterminal needs at least one more application.
        let outstanding: usize = pending.iter().sum();
        if total + outstanding > max_total {
            continue;
        }
        for (r, rule) in g.rules.iter().enumerate().filter(|(_, r)| r.lhs == a) {
            let mut p = pending.clone();
            p[a] -= 1;
            for s in &rule.rhs {
                if let Sym::N(b) = s {
                    p[*b] += 1;
                }
            }
            let mut c = counts.clone();
            c[r] += 1;
            stack.push((p, c));
        }
    }
    out
}

/// Outcome of [`equal_sum_subsets`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SubsetSearch {
    /// Disjoint index sets with equal vector sums.
    Pair(Vec<usize>, Vec<usize>),
    NoPair,
    /// The search cap was reached before a pair was found.
    Overflow,
}

/// Subsets visited before [`SubsetSearch::Overflow`].
pub const SUBSET_SEARCH_CAP: u64 = 1 << 24;

/// Finds two disjoint subsets of `vectors` with the same sum.
///
/// Subsets of the first (up to 63) vectors are visited in Gray-code order,
/// maintaining the running sum; two subsets with equal sums yield a disjoint
/// pair after removing their intersection. Pairs with an empty side (a
/// nonempty zero-sum subset) are only returned when nothing better exists.
pub fn equal_sum_subsets(vectors: &[Vec<i64>]) -> SubsetSearch {
    let k = vectors.len().min(63);
    let dim = vectors.first().map_or(0, Vec::len);
    let mut sums: HashMap<Vec<i64>, u64> = HashMap::new();
    let mut cur = vec![0i64; dim];
    let mut mask: u64 = 0;
    let mut degenerate: Option<(u64, u64)> = None;
    sums.insert(cur.clone(), 0);
    let total: u64 = if k >= 63 { u64::MAX } else { (1u64 << k) - 1 };
    let mut i: u64 = 0;
    while i < total {
        if i + 1 >= SUBSET_SEARCH_CAP {
            return SubsetSearch::Overflow;
        }
        i += 1;
        let bit = i.trailing_zeros() as usize;
        mask ^= 1 << bit;
        let sign = if mask & (1 << bit) != 0 { 1 } else { -1 };
        for (c, v) in cur.iter_mut().zip(&vectors[bit]) {
            *c += sign * v;
        }
        match sums.get(&cur) {
            Some(&other) => {
                let (a, b) = (mask & !other, other & !mask);
                if a != 0 && b != 0 {
                    return SubsetSearch::Pair(bits(a), bits(b));
                }
                degenerate.get_or_insert((a, b));
            }
            None => {
                sums.insert(cur.clone(), mask);
            }
        }
    }
    match degenerate {
        Some((a, b)) => SubsetSearch::Pair(bits(a), bits(b)),
        None => SubsetSearch::NoPair,
    }
}

fn bits(m: u64) -> Vec<usize> {
    (0..64).filter(|i| m & (1 << i) != 0).collect()
}

/// Sum of the selected vectors.
pub fn subset_sum(vectors: &[Vec<i64>], idx: &[usize]) -> Vec<i64> {
    let dim = vectors.first().map_or(0, Vec::len);
    let mut s = vec![0i64; dim];
    for &i in idx {
        for (a, b) in s.iter_mut().zip(&vectors[i]) {
            *a += b;
        }
    }
    s
}

/// Predicate-count vectors of the words of `g` up to `max_len`, over all
/// parameter values from `param_domain` and local values from `domain`.
pub fn grammar_parikh_bruteforce(
    g: &ParamGrammar,
    psi: &[CharPred],
    domain: &[u32],
    param_domain: &[i64],
    max_len: usize,
) -> Result<BTreeSet<Vec<i64>>, GrammarError> {
    let mut out = BTreeSet::new();
    for params in param_assignments(g, param_domain) {
        let cfg = instantiate_finite(g, &params, domain, 1_000_000)?;
        out.extend(cfg.enumerate_words(max_len).iter().map(|w| parikh_vector(w, psi)));
    }
    Ok(out)
}

/// Every word over `alphabet` of length at most `max_len`, shortest first.
pub fn all_words(alphabet: &[u32], max_len: usize) -> Vec<Vec<u32>> {
    let mut out = vec![vec![]];
    let mut layer: Vec<Vec<u32>> = vec![vec![]];
    for _ in 0..max_len {
        layer = layer
            .iter()
            .flat_map(|w| {
                alphabet.iter().map(move |&c| {
                    let mut w2 = w.clone();
                    w2.push(c);
                    w2
                })
            })
            .collect();
        out.extend(layer.iter().cloned());
    }
    out
}

/// Assignment for [`eval_script`].
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Env {
    pub strings: BTreeMap<String, Vec<u32>>,
    pub ints: BTreeMap<String, i64>,
}

/// Compiled regexes of a script, shared across evaluations.
pub struct ScriptEvaluator<'a> {
    script: &'a Script,
    automata: HashMap<Regex, Sfa>,
}

impl<'a> ScriptEvaluator<'a> {
    pub fn new(script: &'a Script) -> Result<Self, SfaError> {
        let mut automata = HashMap::new();
        fn regexes(e: &BoolExpr, out: &mut Vec<Regex>) {
            match e {
                BoolExpr::Atom(Atom::InRe(_, r)) => out.push(r.clone()),
                BoolExpr::Not(e) => regexes(e, out),
                BoolExpr::And(es) | BoolExpr::Or(es) => es.iter().for_each(|e| regexes(e, out)),
                _ => {}
            }
        }
        let mut rs = Vec::new();
        script.asserts.iter().for_each(|a| regexes(a, &mut rs));
        for r in rs {
            if let std::collections::hash_map::Entry::Vacant(slot) = automata.entry(r) {
                let a = compile_regex(slot.key())?;
                slot.insert(a);
            }
        }
        Ok(ScriptEvaluator { script, automata })
    }

    pub fn holds(&self, env: &Env) -> bool {
        self.script.asserts.iter().all(|a| self.eval_bool(a, env))
    }

    fn eval_bool(&self, e: &BoolExpr, env: &Env) -> bool {
        match e {
            BoolExpr::True => true,
            BoolExpr::False => false,
            BoolExpr::Not(e) => !self.eval_bool(e, env),
            BoolExpr::And(es) => es.iter().all(|e| self.eval_bool(e, env)),
            BoolExpr::Or(es) => es.iter().any(|e| self.eval_bool(e, env)),
            BoolExpr::Atom(a) => match a {
                Atom::InRe(s, r) => self.automata[r].accepts(&eval_str(s, env)),
                Atom::StrEq(a, b) => eval_str(a, env) == eval_str(b, env),
                Atom::Contains(a, b) => contains(&eval_str(a, env), &eval_str(b, env)),
                Atom::PrefixOf(a, b) => eval_str(b, env).starts_with(&eval_str(a, env)),
                Atom::SuffixOf(a, b) => eval_str(b, env).ends_with(&eval_str(a, env)),
                Atom::IntCmp(op, a, b) => op.holds(eval_int(a, env), eval_int(b, env)),
            },
        }
    }
}

fn find(hay: &[u32], needle: &[u32]) -> Option<usize> {
    if needle.is_empty() {
        return Some(0);
    }
    hay.windows(needle.len()).position(|w| w == needle)
}

fn contains(hay: &[u32], needle: &[u32]) -> bool {
    find(hay, needle).is_some()
}

/// Concrete value of a string expression.
pub fn eval_str(e: &StrExpr, env: &Env) -> Vec<u32> {
    match e {
        StrExpr::Lit(w) => w.clone(),
        StrExpr::Var(v) => env.strings.get(v).cloned().unwrap_or_default(),
        StrExpr::Concat(es) => es.iter().flat_map(|e| eval_str(e, env)).collect(),
        StrExpr::Replace(s, t, u) => {
            let (s, t, u) = (eval_str(s, env), eval_str(t, env), eval_str(u, env));
            match find(&s, &t) {
                Some(i) => [&s[..i], &u[..], &s[i + t.len()..]].concat(),
                None => s,
            }
        }
        StrExpr::Substr(s, i, n) => {
            let s = eval_str(s, env);
            let (i, n) = (eval_int(i, env), eval_int(n, env));
            if i < 0 || n <= 0 || i >= s.len() as i64 {
                return vec![];
            }
            let start = i as usize;
            let end = (start as i64 + n).min(s.len() as i64) as usize;
            s[start..end].to_vec()
        }
    }
}

pub fn eval_int(e: &IntExpr, env: &Env) -> i64 {
    match e {
        IntExpr::Const(c) => *c,
        IntExpr::Var(v) => env.ints.get(v).copied().unwrap_or(0),
        IntExpr::Len(s) => eval_str(s, env).len() as i64,
        IntExpr::Add(es) => es.iter().map(|e| eval_int(e, env)).sum(),
        IntExpr::Neg(e) => -eval_int(e, env),
        IntExpr::Mul(k, e) => k * eval_int(e, env),
    }
}

/// A satisfying assignment with strings over `alphabet` of length at most
/// `max_len` and integers from `int_range`, if one exists.
pub fn script_sat_bruteforce(
    script: &Script,
    alphabet: &[u32],
    max_len: usize,
    int_range: std::ops::RangeInclusive<i64>,
) -> Result<Option<Env>, SfaError> {
    let ev = ScriptEvaluator::new(script)?;
    let words = all_words(alphabet, max_len);
    let svars: Vec<String> = script.string_vars().map(str::to_string).collect();
    let ivars: Vec<String> = script.int_vars().map(str::to_string).collect();
    let ints: Vec<i64> = int_range.collect();
    let int_assignments: Vec<Vec<i64>> = ivars.iter().fold(vec![vec![]], |acc, _| {
        acc.iter()
            .flat_map(|p| {
                ints.iter().map(move |&v| {
                    let mut p = p.clone();
                    p.push(v);
                    p
                })
            })
            .collect()
    });
    let n_str = svars.len();
    let total = (words.len() as u128).pow(n_str as u32);
    let total = usize::try_from(total).expect("string assignment space too large");
    let found = (0..total).into_par_iter().find_map_any(|mut code| {
        let mut env = Env::default();
        for v in &svars {
            env.strings.insert(v.clone(), words[code % words.len()].clone());
            code /= words.len();
        }
        for vals in &int_assignments {
            for (v, &x) in ivars.iter().zip(vals) {
                env.ints.insert(v.clone(), x);
            }
            if ev.holds(&env) {
                return Some(env.clone());
            }
        }
        None
    });
    Ok(found)
}
