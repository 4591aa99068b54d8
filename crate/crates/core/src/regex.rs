//! Regular expressions over codepoints and their compilation to [`Sfa`]s.
//!
//! Compilation is compositional and epsilon-free throughout: concatenation,
//! union and iteration are realised by copying the outgoing edges of an
//! initial state, so every intermediate automaton is already epsilon-free.
//! Intersection uses the automaton product and negation uses complementation.

use std::collections::BTreeSet;

use crate::charset::CharPred;
use crate::sfa::{Sfa, SfaError, Transition, DEFAULT_STATE_CAP};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Regex {
    Char(u32),
    Range(u32, u32),
    Concat(Box<Regex>, Box<Regex>),
    Or(Box<Regex>, Box<Regex>),
    And(Box<Regex>, Box<Regex>),
    Not(Box<Regex>),
    Star(Box<Regex>),
    Plus(Box<Regex>),
    Opt(Box<Regex>),
    /// Between `lo` and `hi` repetitions; `hi = None` is unbounded.
    Loop(Box<Regex>, u32, Option<u32>),
    /// Matches nothing.
    Empty,
    /// Matches only the empty word.
    Epsilon,
    AnyChar,
}

impl Regex {
    pub fn concat(a: Regex, b: Regex) -> Regex {
        Regex::Concat(Box::new(a), Box::new(b))
    }

    pub fn or(a: Regex, b: Regex) -> Regex {
        Regex::Or(Box::new(a), Box::new(b))
    }

    pub fn and(a: Regex, b: Regex) -> Regex {
        Regex::And(Box::new(a), Box::new(b))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(a: Regex) -> Regex {
        Regex::Not(Box::new(a))
    }

    pub fn star(a: Regex) -> Regex {
        Regex::Star(Box::new(a))
    }

    pub fn plus(a: Regex) -> Regex {
        Regex::Plus(Box::new(a))
    }

    pub fn opt(a: Regex) -> Regex {
        Regex::Opt(Box::new(a))
    }

    pub fn repeat(a: Regex, lo: u32, hi: Option<u32>) -> Regex {
        Regex::Loop(Box::new(a), lo, hi)
    }

    /// `Σ*`.
    pub fn all() -> Regex {
        Regex::star(Regex::AnyChar)
    }

    /// The literal word as a concatenation of characters.
    pub fn literal(word: &[u32]) -> Regex {
        let mut it = word.iter().rev();
        match it.next() {
            None => Regex::Epsilon,
            Some(&last) => it.fold(Regex::Char(last), |acc, &c| Regex::concat(Regex::Char(c), acc)),
        }
    }

    /// Fold a sequence with [`Regex::concat`]; empty means epsilon.
    pub fn concat_all(parts: impl IntoIterator<Item = Regex>) -> Regex {
        let mut v: Vec<Regex> = parts.into_iter().collect();
        match v.pop() {
            None => Regex::Epsilon,
            Some(last) => v.into_iter().rev().fold(last, |acc, r| Regex::concat(r, acc)),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Regex::Char(_) | Regex::Range(..) | Regex::Empty | Regex::Epsilon | Regex::AnyChar => 1,
            Regex::Concat(a, b) | Regex::Or(a, b) | Regex::And(a, b) => 1 + a.depth().max(b.depth()),
            Regex::Not(a) | Regex::Star(a) | Regex::Plus(a) | Regex::Opt(a) | Regex::Loop(a, ..) => {
                1 + a.depth()
            }
        }
    }
}

/// Compiles with the default complement state cap.
pub fn compile_regex(r: &Regex) -> Result<Sfa, SfaError> {
    compile_regex_with_cap(r, DEFAULT_STATE_CAP)
}

pub fn compile_regex_with_cap(r: &Regex, state_cap: usize) -> Result<Sfa, SfaError> {
    Ok(compile(r, state_cap)?.trim().merge_identical())
}

fn compile(r: &Regex, cap: usize) -> Result<Sfa, SfaError> {
    Ok(match r {
        Regex::Char(c) => Sfa::char_class(CharPred::singleton(*c)),
        Regex::Range(lo, hi) => {
            let p = CharPred::range(*lo, *hi);
            if p.is_empty() {
                Sfa::empty_language()
            } else {
                Sfa::char_class(p)
            }
        }
        Regex::AnyChar => Sfa::char_class(CharPred::top()),
        Regex::Empty => Sfa::empty_language(),
        Regex::Epsilon => Sfa::epsilon(),
        Regex::Concat(a, b) => concat(&compile(a, cap)?, &compile(b, cap)?),
        Regex::Or(a, b) => union(&compile(a, cap)?, &compile(b, cap)?),
        Regex::And(a, b) => compile(a, cap)?.product(&compile(b, cap)?).trim(),
        Regex::Not(a) => compile(a, cap)?.complement(cap)?.trim(),
        Regex::Star(a) => star(&compile(a, cap)?),
        Regex::Plus(a) => plus(&compile(a, cap)?),
        Regex::Opt(a) => union(&compile(a, cap)?, &Sfa::epsilon()),
        Regex::Loop(a, lo, hi) => {
            let body = compile(a, cap)?;
            let mut acc = Sfa::epsilon();
            for _ in 0..*lo {
                acc = concat(&acc, &body);
            }
            match hi {
                None => concat(&acc, &star(&body)),
                Some(hi) => {
                    let optional = union(&body, &Sfa::epsilon());
                    for _ in *lo..*hi {
                        acc = concat(&acc, &optional);
                    }
                    acc
                }
            }
        }
    }
    .trim()
    .merge_identical())
}

/// Transitions of `a` shifted by `offset`.
fn shifted(a: &Sfa, offset: usize) -> impl Iterator<Item = Transition> + '_ {
    a.transitions().iter().map(move |t| Transition {
        src: t.src + offset,
        guard: t.guard.clone(),
        dst: t.dst + offset,
    })
}

/// Copies of the initial state's outgoing edges of `a` (shifted), leaving `from`.
fn initial_edges(a: &Sfa, offset: usize, from: usize) -> Vec<Transition> {
    a.transitions()
        .iter()
        .filter(|t| t.src == a.initial())
        .map(|t| Transition {
            src: from,
            guard: t.guard.clone(),
            dst: t.dst + offset,
        })
        .collect()
}

fn concat(a: &Sfa, b: &Sfa) -> Sfa {
    let off = a.num_states();
    let mut ts: Vec<Transition> = a.transitions().to_vec();
    ts.extend(shifted(b, off));
    for &f in a.finals() {
        ts.extend(initial_edges(b, off, f));
    }
    let mut finals: BTreeSet<usize> = b.finals().iter().map(|q| q + off).collect();
    if b.is_final(b.initial()) {
        finals.extend(a.finals().iter().copied());
    }
    Sfa::from_parts(off + b.num_states(), a.initial(), finals, ts)
}

fn union(a: &Sfa, b: &Sfa) -> Sfa {
    // Fresh initial state 0; a at 1.., b after a.
    let oa = 1;
    let ob = 1 + a.num_states();
    let mut ts: Vec<Transition> = shifted(a, oa).chain(shifted(b, ob)).collect();
    ts.extend(initial_edges(a, oa, 0));
    ts.extend(initial_edges(b, ob, 0));
    let mut finals: BTreeSet<usize> = a
        .finals()
        .iter()
        .map(|q| q + oa)
        .chain(b.finals().iter().map(|q| q + ob))
        .collect();
    if a.is_final(a.initial()) || b.is_final(b.initial()) {
        finals.insert(0);
    }
    Sfa::from_parts(ob + b.num_states(), 0, finals, ts)
}

fn plus(a: &Sfa) -> Sfa {
    let mut ts: Vec<Transition> = a.transitions().to_vec();
    for &f in a.finals() {
        ts.extend(initial_edges(a, 0, f));
    }
    Sfa::from_parts(a.num_states(), a.initial(), a.finals().clone(), ts)
}

fn star(a: &Sfa) -> Sfa {
    let p = plus(a);
    // Fresh accepting initial state in front of a⁺.
    let mut ts: Vec<Transition> = shifted(&p, 1).collect();
    ts.extend(initial_edges(&p, 1, 0));
    let mut finals: BTreeSet<usize> = p.finals().iter().map(|q| q + 1).collect();
    finals.insert(0);
    Sfa::from_parts(p.num_states() + 1, 0, finals, ts)
}
