//! Plain context-free grammars over codepoints, as produced by instantiating
//! a parametric grammar over a finite domain.

use std::collections::{BTreeMap, BTreeSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sym {
    T(u32),
    N(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rule {
    pub lhs: usize,
    pub rhs: Vec<Sym>,
}

impl Rule {
    /// Occurrences of nonterminal `b` in the right-hand side.
    pub fn count_nt(&self, b: usize) -> usize {
        self.rhs.iter().filter(|s| **s == Sym::N(b)).count()
    }

    pub fn count_t(&self, a: u32) -> usize {
        self.rhs.iter().filter(|s| **s == Sym::T(a)).count()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cfg {
    pub nonterminals: Vec<String>,
    pub start: usize,
    pub rules: Vec<Rule>,
}

impl Cfg {
    pub fn new(nonterminals: Vec<String>, start: usize, rules: Vec<Rule>) -> Cfg {
        debug_assert!(start < nonterminals.len());
        debug_assert!(rules.iter().all(|r| r.lhs < nonterminals.len()
            && r.rhs.iter().all(|s| !matches!(s, Sym::N(b) if *b >= nonterminals.len()))));
        Cfg { nonterminals, start, rules }
    }

    pub fn num_nonterminals(&self) -> usize {
        self.nonterminals.len()
    }

    /// Every word of length at most `max_len` derivable from the start
    /// symbol, computed as a length-bounded least fixpoint.
    pub fn enumerate_words(&self, max_len: usize) -> BTreeSet<Vec<u32>> {
        let n = self.nonterminals.len();
        let mut lang: Vec<BTreeSet<Vec<u32>>> = vec![BTreeSet::new(); n];
        loop {
            let mut changed = false;
            for rule in &self.rules {
                let mut partial: BTreeSet<Vec<u32>> = BTreeSet::from([Vec::new()]);
                for sym in &rule.rhs {
                    let mut next = BTreeSet::new();
                    for w in &partial {
                        match sym {
                            Sym::T(c) => {
                                if w.len() < max_len {
                                    let mut w2 = w.clone();
                                    w2.push(*c);
                                    next.insert(w2);
                                }
                            }
                            Sym::N(b) => {
                                for u in &lang[*b] {
                                    if w.len() + u.len() <= max_len {
                                        let mut w2 = w.clone();
                                        w2.extend_from_slice(u);
                                        next.insert(w2);
                                    }
                                }
                            }
                        }
                    }
                    partial = next;
                    if partial.is_empty() {
                        break;
                    }
                }
                for w in partial {
                    changed |= lang[rule.lhs].insert(w);
                }
            }
            if !changed {
                break;
            }
        }
        std::mem::take(&mut lang[self.start])
    }

    /// Rules grouped by left-hand side.
    pub fn rules_by_lhs(&self) -> BTreeMap<usize, Vec<usize>> {
        let mut m: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (i, r) in self.rules.iter().enumerate() {
            m.entry(r.lhs).or_default().push(i);
        }
        m
    }
}
