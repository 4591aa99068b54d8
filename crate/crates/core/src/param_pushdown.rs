//! Parametric nondeterministic pushdown automata and their conversions to
//! and from parametric grammars.
//!
//! A transition may read an input symbol (bound to `curr` in its guard), and
//! either leaves the stack alone, pops a stack-alphabet symbol, or pops a
//! data symbol (bound to `top`). Pushed words mix stack-alphabet symbols with
//! data taken from `curr`, parameters or local variables. Transitions that
//! pop data push nothing, so data on the stack is never copied.

use std::collections::{BTreeSet, HashSet, VecDeque};

use thiserror::Error;

use crate::formula::CmpOp;
use crate::guard::{GTerm, Guard};
use crate::param_grammar::{GSym, ParamGrammar, Production, RhsSym};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PdaError {
    #[error("configuration search ran out of fuel")]
    FuelExhausted,
    #[error("transition {transition} pushes {len} symbols, more than {max}")]
    PushTooLong { transition: usize, len: usize, max: usize },
    #[error("invalid automaton: {0}")]
    Invalid(String),
}

/// Symbols available to transition guards.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PSym {
    Param(usize),
    Local(usize),
    Curr,
    Top,
}

/// Elements of a pushed word.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PushSym {
    Gamma(usize),
    Param(usize),
    Local(usize),
    Curr,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pop {
    None,
    Gamma(usize),
    Data,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PdaTransition {
    pub src: usize,
    pub dst: usize,
    /// Consumes one input symbol, bound to `curr`.
    pub reads: bool,
    pub pop: Pop,
    /// Pushed word; its first symbol ends up on top.
    pub push: Vec<PushSym>,
    pub locals: Vec<String>,
    pub guard: Guard<PSym>,
}

impl PdaTransition {
    fn mentions_curr(&self) -> bool {
        self.guard.symbols().contains(&PSym::Curr) || self.push.contains(&PushSym::Curr)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Npda {
    pub params: Vec<String>,
    pub num_states: usize,
    /// Names of the stack alphabet Γ.
    pub stack_symbols: Vec<String>,
    pub initial: usize,
    pub finals: BTreeSet<usize>,
    pub transitions: Vec<PdaTransition>,
}

impl Npda {
    pub fn new(
        params: Vec<String>,
        num_states: usize,
        stack_symbols: Vec<String>,
        initial: usize,
        finals: impl IntoIterator<Item = usize>,
        transitions: Vec<PdaTransition>,
    ) -> Result<Self, PdaError> {
        let p = Npda {
            params,
            num_states,
            stack_symbols,
            initial,
            finals: finals.into_iter().collect(),
            transitions,
        };
        p.validate()?;
        Ok(p)
    }

    fn validate(&self) -> Result<(), PdaError> {
        let bad = |m: String| Err(PdaError::Invalid(m));
        if self.initial >= self.num_states || self.finals.iter().any(|&q| q >= self.num_states) {
            return bad("state out of range".into());
        }
        for (i, t) in self.transitions.iter().enumerate() {
            if t.src >= self.num_states || t.dst >= self.num_states {
                return bad(format!("transition {i}: state out of range"));
            }
            if t.pop == Pop::Data && !t.push.is_empty() {
                return bad(format!("transition {i}: pops data and pushes"));
            }
            if !t.reads && t.mentions_curr() {
                return bad(format!("transition {i}: epsilon transition mentions curr"));
            }
            if t.pop != Pop::Data && t.guard.symbols().contains(&PSym::Top) {
                return bad(format!("transition {i}: top used without popping data"));
            }
            if let Pop::Gamma(g) = t.pop {
                if g >= self.stack_symbols.len() {
                    return bad(format!("transition {i}: stack symbol out of range"));
                }
            }
            for s in &t.push {
                let ok = match *s {
                    PushSym::Gamma(g) => g < self.stack_symbols.len(),
                    PushSym::Param(x) => x < self.params.len(),
                    PushSym::Local(l) => l < t.locals.len(),
                    PushSym::Curr => true,
                };
                if !ok {
                    return bad(format!("transition {i}: pushed symbol out of range"));
                }
            }
            for s in t.guard.symbols() {
                let ok = match s {
                    PSym::Param(x) => x < self.params.len(),
                    PSym::Local(l) => l < t.locals.len(),
                    PSym::Curr | PSym::Top => true,
                };
                if !ok {
                    return bad(format!("transition {i}: guard symbol out of range"));
                }
            }
        }
        Ok(())
    }

    pub fn max_push(&self) -> usize {
        self.transitions.iter().map(|t| t.push.len()).max().unwrap_or(0)
    }
}

/// Three-state automaton simulating leftmost derivations: push `S⊥`, expand
/// nonterminals by ε-moves, match data on top of the stack against the input,
/// and accept on `⊥`.
pub fn grammar_to_pda(g: &ParamGrammar) -> Npda {
    let (q0, q, qf) = (0, 1, 2);
    let nn = g.nonterminals.len();
    let bottom = nn;
    let mut stack_symbols = g.nonterminals.clone();
    stack_symbols.push("⊥".into());
    let mut ts = vec![
        PdaTransition {
            src: q0,
            dst: q,
            reads: false,
            pop: Pop::None,
            push: vec![PushSym::Gamma(g.start), PushSym::Gamma(bottom)],
            locals: vec![],
            guard: Guard::True,
        },
        PdaTransition {
            src: q,
            dst: qf,
            reads: false,
            pop: Pop::Gamma(bottom),
            push: vec![],
            locals: vec![],
            guard: Guard::True,
        },
    ];
    for p in &g.productions {
        ts.push(PdaTransition {
            src: q,
            dst: q,
            reads: false,
            pop: Pop::Gamma(p.lhs),
            push: p
                .rhs
                .iter()
                .map(|s| match *s {
                    RhsSym::Local(l) => PushSym::Local(l),
                    RhsSym::Param(x) => PushSym::Param(x),
                    RhsSym::Nt(b) => PushSym::Gamma(b),
                })
                .collect(),
            locals: p.locals.clone(),
            guard: p.guard.map(&|s| {
                GTerm::Sym(match *s {
                    GSym::Param(x) => PSym::Param(x),
                    GSym::Local(l) => PSym::Local(l),
                })
            }),
        });
    }
    ts.push(PdaTransition {
        src: q,
        dst: q,
        reads: true,
        pop: Pop::Data,
        push: vec![],
        locals: vec![],
        guard: Guard::Cmp(CmpOp::Eq, GTerm::Sym(PSym::Top), GTerm::Sym(PSym::Curr)),
    });
    Npda::new(g.params.clone(), 3, stack_symbols, q0, [qf], ts).expect("construction is well-formed")
}

/// Normal form for the grammar construction: one accepting state reached
/// with an empty stack, and every transition either pushes (possibly the
/// empty word) without looking at the stack, or pops without pushing.
fn normalize(p: &Npda) -> (Npda, usize, usize) {
    let mut ts: Vec<PdaTransition> = Vec::new();
    let mut n = p.num_states;
    let mut gamma = p.stack_symbols.clone();
    let bottom = gamma.len();
    gamma.push("⊥'".into());
    let start = n;
    let drain = n + 1;
    let accept = n + 2;
    n += 3;
    let eps = |src, dst, pop, push| PdaTransition {
        src,
        dst,
        reads: false,
        pop,
        push,
        locals: vec![],
        guard: Guard::True,
    };
    ts.push(eps(start, p.initial, Pop::None, vec![PushSym::Gamma(bottom)]));
    for &f in &p.finals {
        ts.push(eps(f, drain, Pop::None, vec![]));
    }
    for g in 0..p.stack_symbols.len() {
        ts.push(eps(drain, drain, Pop::Gamma(g), vec![]));
    }
    ts.push(eps(drain, drain, Pop::Data, vec![]));
    ts.push(eps(drain, accept, Pop::Gamma(bottom), vec![]));

    let mut split_states: Vec<((usize, usize), usize)> = Vec::new();
    for t in &p.transitions {
        match t.pop {
            Pop::Gamma(g) if !t.push.is_empty() => {
                let mid = match split_states.iter().find(|(k, _)| *k == (t.src, g)) {
                    Some(&(_, s)) => s,
                    None => {
                        split_states.push(((t.src, g), n));
                        ts.push(eps(t.src, n, Pop::Gamma(g), vec![]));
                        n += 1;
                        n - 1
                    }
                };
                ts.push(PdaTransition { src: mid, pop: Pop::None, ..t.clone() });
            }
            _ => ts.push(t.clone()),
        }
    }
    let norm = Npda {
        params: p.params.clone(),
        num_states: n,
        stack_symbols: gamma,
        initial: start,
        finals: BTreeSet::from([accept]),
        transitions: ts,
    };
    (norm, start, accept)
}

/// Grammar with nonterminals `A_{q,q'}` generating the words that take the
/// automaton from `q` to `q'`, starting and ending with an empty stack.
///
/// Besides `A_{q,q} → ε` and `A_{q,q''} → A_{q,q'} A_{q',q''}`, every pushing
/// transition `t_0` of `s_1…s_k` combined with popping transitions `t_1…t_k`
/// (where `t_i` pops `s_i`) yields
/// `A_{src(t_0),dst(t_k)} → y_0 A_{dst(t_0),src(t_1)} y_1 … A_{dst(t_{k-1}),src(t_k)} y_k`,
/// where `y_i` is the symbol read by `t_i` (absent for ε-moves), and the guard
/// conjoins the transitions' guards over separate copies of their locals,
/// with `top` of `t_i` bound to the value pushed as `s_i`.
pub fn pda_to_grammar(p: &Npda, max_push: usize) -> Result<ParamGrammar, PdaError> {
    if let Some((i, t)) = p.transitions.iter().enumerate().find(|(_, t)| t.push.len() > max_push) {
        return Err(PdaError::PushTooLong { transition: i, len: t.push.len(), max: max_push });
    }
    let (norm, start, accept) = normalize(p);
    let n = norm.num_states;
    let nt = |q: usize, r: usize| q * n + r;
    let nonterminals: Vec<String> =
        (0..n).flat_map(|q| (0..n).map(move |r| format!("A_{q}_{r}"))).collect();

    let mut prods = Vec::new();
    for q in 0..n {
        prods.push(Production { lhs: nt(q, q), rhs: vec![], locals: vec![], guard: Guard::True });
    }
    for q in 0..n {
        for m in 0..n {
            for r in 0..n {
                prods.push(Production {
                    lhs: nt(q, r),
                    rhs: vec![RhsSym::Nt(nt(q, m)), RhsSym::Nt(nt(m, r))],
                    locals: vec![],
                    guard: Guard::True,
                });
            }
        }
    }

    let pushes: Vec<&PdaTransition> = norm.transitions.iter().filter(|t| t.pop == Pop::None).collect();
    let popper = |s: PushSym| -> Vec<&PdaTransition> {
        norm.transitions
            .iter()
            .filter(|t| match (s, t.pop) {
                (PushSym::Gamma(g), Pop::Gamma(h)) => g == h && t.push.is_empty(),
                (PushSym::Gamma(_), _) => false,
                (_, Pop::Data) => true,
                _ => false,
            })
            .collect()
    };

    for t0 in pushes {
        let candidates: Vec<Vec<&PdaTransition>> = t0.push.iter().map(|&s| popper(s)).collect();
        let mut choice = vec![0usize; candidates.len()];
        if candidates.iter().any(Vec::is_empty) {
            continue;
        }
        loop {
            let chain: Vec<&PdaTransition> =
                std::iter::once(t0).chain(choice.iter().zip(&candidates).map(|(&c, v)| v[c])).collect();
            prods.push(compound_production(&chain, &t0.push, &nt));
            let mut k = 0;
            while k < choice.len() {
                choice[k] += 1;
                if choice[k] < candidates[k].len() {
                    break;
                }
                choice[k] = 0;
                k += 1;
            }
            if k == choice.len() {
                break;
            }
        }
    }
    let g = ParamGrammar::new(p.params.clone(), nonterminals, nt(start, accept), prods)
        .map_err(|e| PdaError::Invalid(e.to_string()))?;
    Ok(g)
}

fn compound_production(
    chain: &[&PdaTransition],
    pushed: &[PushSym],
    nt: &dyn Fn(usize, usize) -> usize,
) -> Production {
    let mut locals: Vec<String> = Vec::new();
    // Local indices of each transition's copy of its own locals.
    let mut copies: Vec<Vec<usize>> = Vec::new();
    let mut read_vars: Vec<Option<usize>> = Vec::new();
    for (i, t) in chain.iter().enumerate() {
        read_vars.push(t.reads.then(|| {
            locals.push(format!("y{i}"));
            locals.len() - 1
        }));
        copies.push(
            t.locals
                .iter()
                .map(|l| {
                    locals.push(format!("t{i}_{l}"));
                    locals.len() - 1
                })
                .collect(),
        );
    }
    let pushed_value = |s: PushSym| -> Option<GTerm<GSym>> {
        match s {
            PushSym::Gamma(_) => None,
            PushSym::Param(x) => Some(GTerm::Sym(GSym::Param(x))),
            PushSym::Local(l) => Some(GTerm::Sym(GSym::Local(copies[0][l]))),
            PushSym::Curr => Some(GTerm::Sym(GSym::Local(read_vars[0].expect("reading transition")))),
        }
    };
    let mut guards = Vec::new();
    for (i, t) in chain.iter().enumerate() {
        let top = if i == 0 { None } else { pushed_value(pushed[i - 1]) };
        guards.push(t.guard.map(&|s| match *s {
            PSym::Param(x) => GTerm::Sym(GSym::Param(x)),
            PSym::Local(l) => GTerm::Sym(GSym::Local(copies[i][l])),
            PSym::Curr => GTerm::Sym(GSym::Local(read_vars[i].expect("guard mentions curr"))),
            PSym::Top => top.clone().expect("top bound by a data pop"),
        }));
    }
    let k = chain.len() - 1;
    let mut rhs = Vec::new();
    if let Some(y) = read_vars[0] {
        rhs.push(RhsSym::Local(y));
    }
    for i in 1..=k {
        rhs.push(RhsSym::Nt(nt(chain[i - 1].dst, chain[i].src)));
        if let Some(y) = read_vars[i] {
            rhs.push(RhsSym::Local(y));
        }
    }
    Production {
        lhs: nt(chain[0].src, chain[k].dst),
        rhs,
        locals,
        guard: Guard::and(guards),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum Item {
    G(usize),
    D(i64),
}

/// Whether the automaton accepts `word` under `params`, with local variables
/// ranging over `domain`. Explores at most `fuel` configurations.
///
/// When no ε-transition pops data, only as many data symbols as there are
/// input symbols left can still be popped, so the stack below that point is
/// unobservable and is cut off; this keeps searches finite for automata that
/// push data on ε-moves.
pub fn pda_run(
    p: &Npda,
    params: &[i64],
    word: &[u32],
    domain: &[u32],
    fuel: usize,
) -> Result<bool, PdaError> {
    let truncate = !p.transitions.iter().any(|t| !t.reads && t.pop == Pop::Data);
    let mut seen: HashSet<(usize, usize, Vec<Item>)> = HashSet::new();
    let mut queue = VecDeque::new();
    let start = (p.initial, 0usize, Vec::new());
    seen.insert(start.clone());
    queue.push_back(start);
    while let Some((q, pos, stack)) = queue.pop_front() {
        if pos == word.len() && p.finals.contains(&q) {
            return Ok(true);
        }
        for t in p.transitions.iter().filter(|t| t.src == q) {
            if t.reads && pos >= word.len() {
                continue;
            }
            let curr = t.reads.then(|| i64::from(word[pos]));
            let mut base = stack.clone();
            let top = match t.pop {
                Pop::None => None,
                Pop::Gamma(g) => {
                    if base.last() != Some(&Item::G(g)) {
                        continue;
                    }
                    base.pop();
                    None
                }
                Pop::Data => match base.last() {
                    Some(&Item::D(v)) => {
                        base.pop();
                        Some(v)
                    }
                    _ => continue,
                },
            };
            let nl = t.locals.len();
            let mut idx = vec![0usize; nl];
            if nl > 0 && domain.is_empty() {
                continue;
            }
            loop {
                let vals: Vec<i64> = idx.iter().map(|&i| i64::from(domain[i])).collect();
                let env = |s: &PSym| match *s {
                    PSym::Param(x) => params.get(x).copied(),
                    PSym::Local(l) => Some(vals[l]),
                    PSym::Curr => curr,
                    PSym::Top => top,
                };
                if t.guard.eval(&env) == Some(true) {
                    let mut next = base.clone();
                    for s in t.push.iter().rev() {
                        next.push(match *s {
                            PushSym::Gamma(g) => Item::G(g),
                            PushSym::Param(x) => Item::D(params[x]),
                            PushSym::Local(l) => Item::D(vals[l]),
                            PushSym::Curr => Item::D(curr.expect("reading transition")),
                        });
                    }
                    let npos = pos + usize::from(t.reads);
                    if truncate {
                        cut_unobservable(&mut next, word.len() - npos);
                    }
                    let cfg = (t.dst, npos, next);
                    if !seen.contains(&cfg) {
                        if seen.len() >= fuel {
                            return Err(PdaError::FuelExhausted);
                        }
                        seen.insert(cfg.clone());
                        queue.push_back(cfg);
                    }
                }
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
    }
    Ok(false)
}

/// Drops everything strictly below the `(remaining + 1)`-th data symbol from
/// the top, which can never be popped.
fn cut_unobservable(stack: &mut Vec<Item>, remaining: usize) {
    let mut seen = 0;
    for i in (0..stack.len()).rev() {
        if matches!(stack[i], Item::D(_)) {
            seen += 1;
            if seen == remaining + 1 {
                stack.drain(..i);
                return;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn palindrome_grammar() -> ParamGrammar {
        ParamGrammar::parse("S -> y S y | y y").unwrap()
    }

    #[test]
    fn grammar_to_pda_accepts_palindromes() {
        let p = grammar_to_pda(&palindrome_grammar());
        assert_eq!(p.num_states, 3);
        let dom = [97, 98];
        assert!(pda_run(&p, &[], &[97, 98, 98, 97], &dom, 100_000).unwrap());
        assert!(!pda_run(&p, &[], &[97, 98, 97, 98], &dom, 100_000).unwrap());
        assert!(!pda_run(&p, &[], &[], &dom, 100_000).unwrap());
    }

    #[test]
    fn epsilon_grammar() {
        let g = ParamGrammar::parse("S -> eps").unwrap();
        let p = grammar_to_pda(&g);
        assert!(pda_run(&p, &[], &[], &[97], 1000).unwrap());
        assert!(!pda_run(&p, &[], &[97], &[97], 1000).unwrap());
    }

    #[test]
    fn push_limit() {
        let p = grammar_to_pda(&palindrome_grammar());
        assert!(matches!(pda_to_grammar(&p, 2), Err(PdaError::PushTooLong { .. })));
        assert!(pda_to_grammar(&p, 3).is_ok());
    }

    #[test]
    fn fuel_is_reported() {
        // S -> S S | eps grows the stack without bound on ε-moves.
        let g = ParamGrammar::parse("S -> S S | eps").unwrap();
        let p = grammar_to_pda(&g);
        assert_eq!(pda_run(&p, &[], &[97], &[97], 50), Err(PdaError::FuelExhausted));
    }

    fn all_words(alphabet: &[u32], max_len: usize) -> Vec<Vec<u32>> {
        let mut out = vec![vec![]];
        let mut layer = vec![vec![]];
        for _ in 0..max_len {
            layer = layer
                .iter()
                .flat_map(|w: &Vec<u32>| {
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

    /// Even palindromes avoiding the parameter `x`, built directly as an
    /// automaton with its own bottom marker.
    fn palindrome_pda() -> Npda {
        let eq_top = Guard::Cmp(CmpOp::Eq, GTerm::Sym(PSym::Top), GTerm::Sym(PSym::Curr));
        let not_x = Guard::Not(Box::new(Guard::Cmp(
            CmpOp::Eq,
            GTerm::Sym(PSym::Curr),
            GTerm::Sym(PSym::Param(0)),
        )));
        let t = |src, dst, reads, pop, push, guard| PdaTransition {
            src,
            dst,
            reads,
            pop,
            push,
            locals: vec![],
            guard,
        };
        Npda::new(
            vec!["x".into()],
            4,
            vec!["B".into()],
            0,
            [3],
            vec![
                t(0, 1, false, Pop::None, vec![PushSym::Gamma(0)], Guard::True),
                t(1, 1, true, Pop::None, vec![PushSym::Curr], not_x),
                t(1, 2, false, Pop::None, vec![], Guard::True),
                t(2, 2, true, Pop::Data, vec![], eq_top),
                t(2, 3, false, Pop::Gamma(0), vec![], Guard::True),
            ],
        )
        .unwrap()
    }

    fn check_round_trip(p: &Npda, params: &[i64], dom: &[u32], max_len: usize) {
        let g = pda_to_grammar(p, p.max_push()).unwrap();
        let cfg = crate::param_grammar::instantiate_finite(&g, params, dom, 100_000).unwrap();
        let generated = cfg.enumerate_words(max_len);
        for w in all_words(dom, max_len) {
            let accepted = pda_run(p, params, &w, dom, 1_000_000).unwrap();
            assert_eq!(accepted, generated.contains(&w), "{w:?}");
        }
    }

    #[test]
    fn pda_to_grammar_preserves_language() {
        let p = palindrome_pda();
        check_round_trip(&p, &[99], &[97, 98, 99], 4);
        check_round_trip(&p, &[97], &[97, 98], 6);
    }

    #[test]
    fn grammar_pda_grammar_round_trip() {
        let g = ParamGrammar::parse("params: x\nS -> y S y [y != x] | eps").unwrap();
        let p = grammar_to_pda(&g);
        for params in [[97], [98]] {
            let direct = crate::param_grammar::instantiate_finite(&g, &params, &[97, 98], 1000)
                .unwrap()
                .enumerate_words(4);
            for w in all_words(&[97, 98], 4) {
                let accepted = pda_run(&p, &params, &w, &[97, 98], 1_000_000).unwrap();
                assert_eq!(accepted, direct.contains(&w), "{w:?}");
            }
            check_round_trip(&p, &params, &[97, 98], 4);
        }
    }

    #[test]
    fn rejects_invalid_transitions() {
        let t = PdaTransition {
            src: 0,
            dst: 0,
            reads: false,
            pop: Pop::None,
            push: vec![PushSym::Curr],
            locals: vec![],
            guard: Guard::True,
        };
        assert!(Npda::new(vec![], 1, vec![], 0, [0], vec![t]).is_err());
    }
}
