//! Helpers shared by the integration tests: solver access, exhaustive
//! satisfiability over candidate vectors, and seeded random instances.
#![allow(dead_code)]

use std::collections::BTreeSet;
use std::time::Duration;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use symparikh::cfg::{Cfg, Rule, Sym};
use symparikh::formula::{Formula, LinFormula, Term};
use symparikh::sfa::Transition;
use symparikh::solver::{check, check_each, SolveResult, SolverConfig};
use symparikh::{CharPred, Sfa, Var};

pub fn solver() -> SolverConfig {
    SolverConfig::from_env(None).with_timeout(Duration::from_secs(120))
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Satisfiability of `f`; a sat answer must come with a model that the
/// formula evaluator accepts.
pub fn sat(f: &LinFormula) -> bool {
    match check(f, &solver(), true).expect("solver runs") {
        SolveResult::Sat(m) => {
            let env = m.to_assignment(&f.vars);
            assert!(f.eval(&env).expect("model binds every variable"), "solver model rejected by eval");
            true
        }
        SolveResult::Unsat => false,
        r => panic!("inconclusive solver answer {r:?}"),
    }
}

/// `f ∧ xs = v` with the output variables fixed.
pub fn with_values(f: &LinFormula, xs: &[Var], v: &[i64]) -> LinFormula {
    let pins = xs.iter().zip(v).map(|(&x, &k)| Formula::eq(x, k));
    LinFormula::new(f.vars.clone(), Formula::and(std::iter::once(f.body.clone()).chain(pins)))
}

/// The candidates in `cands` for which `f ∧ xs = v` is satisfiable, decided in
/// one solver process.
pub fn sat_among(f: &LinFormula, xs: &[Var], cands: &[Vec<i64>]) -> BTreeSet<Vec<i64>> {
    let queries: Vec<Formula> = cands
        .iter()
        .map(|v| Formula::and(xs.iter().zip(v).map(|(&x, &k)| Formula::eq(x, k))))
        .collect();
    let verdicts = check_each(f, &queries, &solver()).expect("solver runs");
    cands
        .iter()
        .zip(verdicts)
        .filter_map(|(v, r)| match r {
            SolveResult::Sat(_) => Some(v.clone()),
            SolveResult::Unsat => None,
            r => panic!("inconclusive solver answer {r:?} at {v:?}"),
        })
        .collect()
}

/// Every vector of `dim` naturals whose entries sum to at most `total`.
pub fn vectors_with_total(dim: usize, total: i64) -> Vec<Vec<i64>> {
    let mut out = vec![vec![]];
    for _ in 0..dim {
        out = out
            .into_iter()
            .flat_map(|p: Vec<i64>| {
                let used: i64 = p.iter().sum();
                (0..=total - used).map(move |k| {
                    let mut q = p.clone();
                    q.push(k);
                    q
                })
            })
            .collect();
    }
    out
}

/// Vectors `v` with `v[0] ≤ max_first` and every other entry at most `v[0]`:
/// the possible counts of `(⊤, ψ_1, …)` over words of length at most
/// `max_first`.
pub fn top_bounded_vectors(dim: usize, max_first: i64) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    for t in 0..=max_first {
        let mut vs = vec![vec![t]];
        for _ in 1..dim {
            vs = vs
                .into_iter()
                .flat_map(|p: Vec<i64>| {
                    (0..=t).map(move |k| {
                        let mut q = p.clone();
                        q.push(k);
                        q
                    })
                })
                .collect();
        }
        out.extend(vs);
    }
    out
}

fn interval(r: &mut ChaCha8Rng, max: u32) -> CharPred {
    let a = r.gen_range(0..=max);
    let b = r.gen_range(0..=max);
    CharPred::range(a.min(b), a.max(b))
}

/// An Sfa with at most 4 states and 6 transitions, guards inside `0..=9`.
pub fn random_sfa(r: &mut ChaCha8Rng) -> Sfa {
    let n = r.gen_range(1..=4);
    let m = r.gen_range(0..=6);
    let transitions: Vec<Transition> = (0..m)
        .map(|_| {
            let guard = if r.gen_bool(0.3) {
                CharPred::singleton(r.gen_range(0..=9))
            } else if r.gen_bool(0.2) {
                CharPred::from_chars([r.gen_range(0..=9), r.gen_range(0..=9)])
            } else {
                interval(r, 9)
            };
            Transition { src: r.gen_range(0..n), guard, dst: r.gen_range(0..n) }
        })
        .collect();
    let finals: Vec<usize> = (0..n).filter(|_| r.gen_bool(0.5)).collect();
    Sfa::new(n, 0, finals, transitions).expect("states in range")
}

/// `⊤` followed by up to two intervals inside `0..=9`.
pub fn random_psi(r: &mut ChaCha8Rng) -> Vec<CharPred> {
    let k = r.gen_range(0..=2);
    std::iter::once(CharPred::top()).chain((0..k).map(|_| interval(r, 9))).collect()
}

/// A CFG over terminals `a`, `b` with at most 3 nonterminals and 5 rules.
/// With `productive`, every rule emits at least one terminal.
pub fn random_cfg(r: &mut ChaCha8Rng, productive: bool) -> Cfg {
    let nn = r.gen_range(1..=3);
    let nr = r.gen_range(1..=5);
    let rules = (0..nr)
        .map(|i| {
            // The first rules cover every nonterminal that can.
            let lhs = if i < nn { i } else { r.gen_range(0..nn) };
            let len = r.gen_range(0..=3);
            let mut rhs: Vec<Sym> = (0..len)
                .map(|_| if r.gen_bool(0.4) { Sym::N(r.gen_range(0..nn)) } else { Sym::T(r.gen_range(97..=98)) })
                .collect();
            if productive && !rhs.iter().any(|s| matches!(s, Sym::T(_))) {
                let at = r.gen_range(0..=rhs.len());
                rhs.insert(at, Sym::T(97));
            }
            Rule { lhs, rhs }
        })
        .collect();
    Cfg::new((0..nn).map(|i| format!("N{i}")).collect(), 0, rules)
}

/// Text of a parametric grammar whose local variables are confined to
/// `'a'..'e'` so brute-force instantiation stays finite.
pub fn random_param_grammar(r: &mut ChaCha8Rng) -> String {
    let nts = ["S", "T"];
    let nn = r.gen_range(1..=2);
    let nr = r.gen_range(1..=4);
    let mut text = String::new();
    for i in 0..nr {
        let lhs = if i < nn { nts[i] } else { nts[r.gen_range(0..nn)] };
        let len = r.gen_range(0..=3);
        let mut syms = Vec::new();
        let mut locals = Vec::new();
        for _ in 0..len {
            match r.gen_range(0..5) {
                0 => syms.push(nts[r.gen_range(0..nn)].to_string()),
                1 => syms.push(format!("'{}'", ['a', 'b', 'c'][r.gen_range(0..3)])),
                _ => {
                    let y = ["y", "z"][r.gen_range(0..2)];
                    if !locals.contains(&y) {
                        locals.push(y);
                    }
                    syms.push(y.to_string());
                }
            }
        }
        let mut guard: Vec<String> = locals.iter().map(|y| format!("{y} in ['a'-'e']")).collect();
        if locals.len() == 2 && r.gen_bool(0.5) {
            guard.push(["y < z", "y = z", "y != z"].choose(r).unwrap().to_string());
        } else if let Some(y) = locals.first() {
            if r.gen_bool(0.4) {
                guard.push(format!("{y} {} 'c'", ["<=", ">", "!="].choose(r).unwrap()));
            }
        }
        let rhs = if syms.is_empty() { "eps".to_string() } else { syms.join(" ") };
        if guard.is_empty() {
            text.push_str(&format!("{lhs} -> {rhs}\n"));
        } else {
            text.push_str(&format!("{lhs} -> {rhs} [{}]\n", guard.join(" && ")));
        }
    }
    text
}

const ALPHA: [&str; 3] = ["a", "b", "c"];
const STR_VARS: [&str; 3] = ["x", "y", "z"];

fn random_literal(r: &mut ChaCha8Rng, max: usize) -> String {
    let n = r.gen_range(0..=max);
    format!("\"{}\"", (0..n).map(|_| *ALPHA.choose(r).unwrap()).collect::<String>())
}

fn random_regex(r: &mut ChaCha8Rng, depth: usize) -> String {
    let leaf = depth == 0 || r.gen_bool(0.3);
    if leaf {
        return match r.gen_range(0..4) {
            0 => "(re.range \"a\" \"b\")".to_string(),
            1 => "re.allchar".to_string(),
            _ => format!("(str.to_re {})", random_literal(r, 2)),
        };
    }
    let a = random_regex(r, depth - 1);
    match r.gen_range(0..8) {
        0 | 1 => format!("(re.++ {a} {})", random_regex(r, depth - 1)),
        2 => format!("(re.union {a} {})", random_regex(r, depth - 1)),
        3 => format!("(re.inter {a} {})", random_regex(r, depth - 1)),
        4 | 5 => format!("(re.* {a})"),
        6 => format!("(re.+ {a})"),
        _ => format!("(re.comp {a})"),
    }
}

fn random_str_term(r: &mut ChaCha8Rng, vars: &[&str], depth: usize) -> String {
    match r.gen_range(0..if depth == 0 { 3 } else { 6 }) {
        0 | 1 => vars.choose(r).unwrap().to_string(),
        2 => random_literal(r, 2),
        3 => format!(
            "(str.++ {} {})",
            random_str_term(r, vars, depth - 1),
            random_str_term(r, vars, depth - 1)
        ),
        4 => format!(
            "(str.replace {} {} {})",
            vars.choose(r).unwrap(),
            random_literal(r, 1),
            random_str_term(r, vars, depth - 1)
        ),
        _ => format!("(str.substr {} {} {})", vars.choose(r).unwrap(), r.gen_range(0..=2), r.gen_range(0..=3)),
    }
}

fn random_atom(r: &mut ChaCha8Rng, vars: &[&str]) -> String {
    let v = vars.choose(r).unwrap();
    let atom = match r.gen_range(0..7) {
        0 | 1 => format!("(str.in_re {v} {})", random_regex(r, 3)),
        2 => format!("(= {} {})", random_str_term(r, vars, 2), random_str_term(r, vars, 2)),
        3 => format!("(str.contains {} {})", random_str_term(r, vars, 1), random_str_term(r, vars, 1)),
        4 => format!("(str.prefixof {} {v})", random_str_term(r, vars, 1)),
        5 => format!("(str.suffixof {} {v})", random_str_term(r, vars, 1)),
        _ => {
            let w = vars.choose(r).unwrap();
            let op = ["<", "<=", "=", ">="].choose(r).unwrap();
            let k = r.gen_range(-2..=2i64);
            let k = if k < 0 { format!("(- {})", -k) } else { k.to_string() };
            format!("({op} (+ (str.len {v}) {k}) (str.len {w}))")
        }
    };
    if r.gen_bool(0.2) {
        format!("(not {atom})")
    } else {
        atom
    }
}

/// An SMT-LIB script over `{a,b,c}` with at most 3 string variables and 4
/// assertions, without integer variables.
pub fn random_script(r: &mut ChaCha8Rng) -> String {
    let nv = r.gen_range(1..=3);
    let vars = &STR_VARS[..nv];
    let mut s = String::from("(set-logic QF_SLIA)\n");
    for v in vars {
        s.push_str(&format!("(declare-fun {v} () String)\n"));
    }
    for _ in 0..r.gen_range(1..=4) {
        s.push_str(&format!("(assert {})\n", random_atom(r, vars)));
    }
    s.push_str("(check-sat)\n");
    s
}

/// Sum of `coef[i]·x[i]` as a term.
pub fn dot(coef: &[i64], xs: &[Var]) -> Term {
    Term::sum(coef.iter().zip(xs).map(|(&c, &x)| Term::scale(c, Term::Var(x))))
}
