//! Symbolic finite automata over [`CharPred`] guards.
//!
//! States are dense indices `0..num_states`. Every transition carries a
//! nonempty guard and consumes exactly one character; there are no epsilon
//! transitions in this representation.

use std::collections::{BTreeSet, HashMap, VecDeque};

use thiserror::Error;

use crate::charset::{minterms, CharPred};

/// Default bound on determinized states during complementation.
pub const DEFAULT_STATE_CAP: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SfaError {
    #[error("complementation exceeded the state cap of {cap}")]
    ComplementBlowup { cap: usize },
    #[error("state {0} out of range")]
    BadState(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Transition {
    pub src: usize,
    pub guard: CharPred,
    pub dst: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sfa {
    num_states: usize,
    transitions: Vec<Transition>,
    initial: usize,
    finals: BTreeSet<usize>,
}

impl Sfa {
    /// Validates endpoints, drops empty-guard transitions and exact duplicates.
    pub fn new(
        num_states: usize,
        initial: usize,
        finals: impl IntoIterator<Item = usize>,
        transitions: impl IntoIterator<Item = Transition>,
    ) -> Result<Self, SfaError> {
        if initial >= num_states {
            return Err(SfaError::BadState(initial));
        }
        let finals: BTreeSet<usize> = finals.into_iter().collect();
        if let Some(&q) = finals.iter().find(|&&q| q >= num_states) {
            return Err(SfaError::BadState(q));
        }
        let mut seen = BTreeSet::new();
        let mut ts = Vec::new();
        for t in transitions {
            if t.src >= num_states {
                return Err(SfaError::BadState(t.src));
            }
            if t.dst >= num_states {
                return Err(SfaError::BadState(t.dst));
            }
            if !t.guard.is_empty() && seen.insert(t.clone()) {
                ts.push(t);
            }
        }
        Ok(Sfa {
            num_states,
            transitions: ts,
            initial,
            finals,
        })
    }

    /// Internal constructor for builders that already uphold the invariants.
    pub(crate) fn from_parts(
        num_states: usize,
        initial: usize,
        finals: BTreeSet<usize>,
        transitions: Vec<Transition>,
    ) -> Self {
        Sfa::new(num_states, initial, finals, transitions).expect("builder produced invalid Sfa")
    }

    /// One state, no transitions, not accepting.
    pub fn empty_language() -> Self {
        Sfa::from_parts(1, 0, BTreeSet::new(), Vec::new())
    }

    /// Accepts only the empty word.
    pub fn epsilon() -> Self {
        Sfa::from_parts(1, 0, [0].into(), Vec::new())
    }

    /// One accepting state with a ⊤ self-loop (Σ*).
    pub fn universal() -> Self {
        Sfa::from_parts(
            1,
            0,
            [0].into(),
            vec![Transition {
                src: 0,
                guard: CharPred::top(),
                dst: 0,
            }],
        )
    }

    /// Accepts exactly the one-character words in `guard`.
    pub fn char_class(guard: CharPred) -> Self {
        Sfa::from_parts(2, 0, [1].into(), vec![Transition { src: 0, guard, dst: 1 }])
    }

    pub fn num_states(&self) -> usize {
        self.num_states
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn finals(&self) -> &BTreeSet<usize> {
        &self.finals
    }

    pub fn is_final(&self, q: usize) -> bool {
        self.finals.contains(&q)
    }

    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    /// Distinct guards, sorted by interval list.
    pub fn labels(&self) -> Vec<CharPred> {
        let set: BTreeSet<&CharPred> = self.transitions.iter().map(|t| &t.guard).collect();
        set.into_iter().cloned().collect()
    }

    fn step(&self, from: &BTreeSet<usize>, c: u32) -> BTreeSet<usize> {
        self.transitions
            .iter()
            .filter(|t| from.contains(&t.src) && t.guard.contains(c))
            .map(|t| t.dst)
            .collect()
    }

    pub fn accepts(&self, word: &[u32]) -> bool {
        let mut cur: BTreeSet<usize> = [self.initial].into();
        for &c in word {
            cur = self.step(&cur, c);
            if cur.is_empty() {
                return false;
            }
        }
        cur.iter().any(|q| self.finals.contains(q))
    }

    /// All accepted words of length at most `max_len` over `alphabet`.
    pub fn enumerate_words(&self, alphabet: &[u32], max_len: usize) -> BTreeSet<Vec<u32>> {
        let mut out = BTreeSet::new();
        let mut frontier: Vec<(Vec<u32>, BTreeSet<usize>)> = vec![(Vec::new(), [self.initial].into())];
        for len in 0..=max_len {
            let mut next = Vec::new();
            for (w, states) in frontier {
                if states.iter().any(|q| self.finals.contains(q)) {
                    out.insert(w.clone());
                }
                if len == max_len {
                    continue;
                }
                for &c in alphabet {
                    let s = self.step(&states, c);
                    if !s.is_empty() {
                        let mut w2 = w.clone();
                        w2.push(c);
                        next.push((w2, s));
                    }
                }
            }
            frontier = next;
        }
        out
    }

    /// States reachable from the initial state.
    fn reachable(&self) -> Vec<bool> {
        let mut seen = vec![false; self.num_states];
        let mut stack = vec![self.initial];
        seen[self.initial] = true;
        while let Some(q) = stack.pop() {
            for t in self.transitions.iter().filter(|t| t.src == q) {
                if !seen[t.dst] {
                    seen[t.dst] = true;
                    stack.push(t.dst);
                }
            }
        }
        seen
    }

    /// Removes states that are unreachable or cannot reach a final state.
    /// The initial state is always kept.
    pub fn trim(&self) -> Sfa {
        let reach = self.reachable();
        let mut coreach = vec![false; self.num_states];
        let mut stack: Vec<usize> = self.finals.iter().copied().collect();
        for &q in &stack {
            coreach[q] = true;
        }
        while let Some(q) = stack.pop() {
            for t in self.transitions.iter().filter(|t| t.dst == q) {
                if !coreach[t.src] {
                    coreach[t.src] = true;
                    stack.push(t.src);
                }
            }
        }
        let keep: Vec<bool> = (0..self.num_states)
            .map(|q| q == self.initial || (reach[q] && coreach[q]))
            .collect();
        let mut map = vec![usize::MAX; self.num_states];
        let mut n = 0;
        for q in 0..self.num_states {
            if keep[q] {
                map[q] = n;
                n += 1;
            }
        }
        let transitions = self
            .transitions
            .iter()
            .filter(|t| keep[t.src] && keep[t.dst] && coreach[t.dst])
            .map(|t| Transition {
                src: map[t.src],
                guard: t.guard.clone(),
                dst: map[t.dst],
            })
            .collect();
        let finals = self
            .finals
            .iter()
            .filter(|&&q| keep[q])
            .map(|&q| map[q])
            .collect();
        Sfa::from_parts(n, map[self.initial], finals, transitions)
    }

    /// Merges states with the same finality and the same outgoing edges,
    /// repeating until nothing changes. Preserves the language.
    pub fn merge_identical(&self) -> Sfa {
        let mut cur = self.clone();
        loop {
            let mut sigs: HashMap<(bool, Vec<(&CharPred, usize)>), usize> = HashMap::new();
            let mut map = vec![0usize; cur.num_states];
            let mut n = 0;
            for (q, slot) in map.iter_mut().enumerate() {
                let mut out: Vec<(&CharPred, usize)> = cur
                    .transitions
                    .iter()
                    .filter(|t| t.src == q)
                    .map(|t| (&t.guard, t.dst))
                    .collect();
                out.sort();
                out.dedup();
                *slot = *sigs.entry((cur.is_final(q), out)).or_insert_with(|| {
                    n += 1;
                    n - 1
                });
            }
            if n == cur.num_states {
                return cur;
            }
            let transitions = cur
                .transitions
                .iter()
                .map(|t| Transition {
                    src: map[t.src],
                    guard: t.guard.clone(),
                    dst: map[t.dst],
                })
                .collect();
            let finals = cur.finals.iter().map(|&q| map[q]).collect();
            cur = Sfa::from_parts(n, map[cur.initial], finals, transitions);
        }
    }

    /// Synchronous product; accepts `L(self) ∩ L(other)`.
    pub fn product(&self, other: &Sfa) -> Sfa {
        let mut index: HashMap<(usize, usize), usize> = HashMap::new();
        let mut queue = VecDeque::new();
        let start = (self.initial, other.initial);
        index.insert(start, 0);
        queue.push_back(start);
        let mut transitions = Vec::new();
        let mut finals = BTreeSet::new();
        while let Some((p, q)) = queue.pop_front() {
            let id = index[&(p, q)];
            if self.is_final(p) && other.is_final(q) {
                finals.insert(id);
            }
            for t in self.transitions.iter().filter(|t| t.src == p) {
                for u in other.transitions.iter().filter(|u| u.src == q) {
                    let guard = t.guard.inter(&u.guard);
                    if guard.is_empty() {
                        continue;
                    }
                    let key = (t.dst, u.dst);
                    let next = index.len();
                    let dst = *index.entry(key).or_insert_with(|| {
                        queue.push_back(key);
                        next
                    });
                    transitions.push(Transition { src: id, guard, dst });
                }
            }
        }
        Sfa::from_parts(index.len(), 0, finals, transitions)
    }

    /// Subset construction over the minterms of the guards.
    ///
    /// The result is deterministic and complete: from every state the outgoing
    /// guards partition the universe.
    pub fn determinize(&self, state_cap: usize) -> Result<Sfa, SfaError> {
        let cells = minterms(&self.labels());
        let mut index: HashMap<BTreeSet<usize>, usize> = HashMap::new();
        let mut queue = VecDeque::new();
        let start: BTreeSet<usize> = [self.initial].into();
        index.insert(start.clone(), 0);
        queue.push_back(start);
        let mut transitions = Vec::new();
        let mut finals = BTreeSet::new();
        while let Some(set) = queue.pop_front() {
            let id = index[&set];
            if set.iter().any(|q| self.finals.contains(q)) {
                finals.insert(id);
            }
            // Group cells by successor set so each state has one edge per target.
            let mut by_target: HashMap<BTreeSet<usize>, CharPred> = HashMap::new();
            for cell in &cells {
                let succ: BTreeSet<usize> = self
                    .transitions
                    .iter()
                    .filter(|t| set.contains(&t.src) && !t.guard.is_disjoint(cell))
                    .map(|t| t.dst)
                    .collect();
                let g = by_target.entry(succ).or_default();
                *g = g.union(cell);
            }
            let mut edges: Vec<_> = by_target.into_iter().collect();
            edges.sort();
            for (succ, guard) in edges {
                let dst = match index.get(&succ) {
                    Some(&d) => d,
                    None => {
                        if index.len() >= state_cap {
                            return Err(SfaError::ComplementBlowup { cap: state_cap });
                        }
                        let d = index.len();
                        index.insert(succ.clone(), d);
                        queue.push_back(succ);
                        d
                    }
                };
                transitions.push(Transition { src: id, guard, dst });
            }
        }
        Ok(Sfa::from_parts(index.len(), 0, finals, transitions))
    }

    /// Accepts `Σ* \ L(self)`.
    pub fn complement(&self, state_cap: usize) -> Result<Sfa, SfaError> {
        let det = self.determinize(state_cap)?;
        let finals = (0..det.num_states).filter(|q| !det.is_final(*q)).collect();
        Ok(Sfa::from_parts(det.num_states, det.initial, finals, det.transitions))
    }

    /// Whether the language is empty.
    pub fn is_empty_language(&self) -> bool {
        let reach = self.reachable();
        !self.finals.iter().any(|&q| reach[q])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ch(c: char) -> CharPred {
        CharPred::singleton(c as u32)
    }

    fn w(s: &str) -> Vec<u32> {
        s.chars().map(|c| c as u32).collect()
    }

    /// (ab)*: 0 -a-> 1 -b-> 0, 0 final.
    fn ab_star() -> Sfa {
        Sfa::new(
            2,
            0,
            [0],
            [
                Transition { src: 0, guard: ch('a'), dst: 1 },
                Transition { src: 1, guard: ch('b'), dst: 0 },
            ],
        )
        .unwrap()
    }

    fn a_star() -> Sfa {
        Sfa::new(1, 0, [0], [Transition { src: 0, guard: ch('a'), dst: 0 }]).unwrap()
    }

    fn words(set: &[&str]) -> BTreeSet<Vec<u32>> {
        set.iter().map(|s| w(s)).collect()
    }

    #[test]
    fn accepts_examples() {
        let a = ab_star();
        assert!(a.accepts(&w("abab")));
        assert!(a.accepts(&w("")));
        assert!(!a.accepts(&w("aba")));
    }

    #[test]
    fn enumerate_examples() {
        let ab = [b'a' as u32, b'b' as u32];
        assert_eq!(ab_star().enumerate_words(&ab, 4), words(&["", "ab", "abab"]));
        assert!(Sfa::empty_language().enumerate_words(&ab, 4).is_empty());
        assert_eq!(a_star().enumerate_words(&ab, 2), words(&["", "a", "aa"]));
    }

    #[test]
    fn labels_examples() {
        assert_eq!(ab_star().labels(), vec![ch('a'), ch('b')]);
        let dup = Sfa::new(
            3,
            0,
            [2],
            [
                Transition { src: 0, guard: ch('a'), dst: 1 },
                Transition { src: 1, guard: ch('a'), dst: 2 },
            ],
        )
        .unwrap();
        assert_eq!(dup.labels(), vec![ch('a')]);
        assert!(Sfa::epsilon().labels().is_empty());
    }

    #[test]
    fn construction_drops_empty_guards() {
        let a = Sfa::new(2, 0, [1], [Transition { src: 0, guard: CharPred::empty(), dst: 1 }]).unwrap();
        assert!(a.transitions().is_empty());
        assert!(Sfa::new(1, 1, [0], []).is_err());
    }

    #[test]
    fn product_examples() {
        let alpha = [b'a' as u32, b'b' as u32, b'c' as u32];
        let a = ab_star();
        assert_eq!(
            a.product(&Sfa::universal()).enumerate_words(&alpha, 5),
            a.enumerate_words(&alpha, 5)
        );
        assert_eq!(a.product(&a_star()).enumerate_words(&alpha, 4), words(&[""]));
        assert!(a.product(&Sfa::empty_language()).is_empty_language());
    }

    #[test]
    fn complement_examples() {
        let c = Sfa::empty_language().complement(DEFAULT_STATE_CAP).unwrap();
        assert!(c.accepts(&w("")) && c.accepts(&w("xyz")));
        let c = a_star().complement(DEFAULT_STATE_CAP).unwrap();
        assert!(!c.accepts(&w("aa")));
        assert!(c.accepts(&w("ab")));
    }

    #[test]
    fn complement_respects_cap() {
        // (a|b)*a(a|b)(a|b): the subset construction needs 8 states.
        let ab = CharPred::range(97, 98);
        let t = |s, g: &CharPred, d| Transition { src: s, guard: g.clone(), dst: d };
        let a = Sfa::new(
            4,
            0,
            [3],
            [t(0, &ab, 0), t(0, &ch('a'), 1), t(1, &ab, 2), t(2, &ab, 3)],
        )
        .unwrap();
        assert_eq!(a.complement(4), Err(SfaError::ComplementBlowup { cap: 4 }));
        assert!(a.complement(100).is_ok());
    }

    fn arb_sfa() -> impl Strategy<Value = Sfa> {
        (1usize..=4).prop_flat_map(|n| {
            let trans = prop::collection::vec((0..n, 0u32..6, 0u32..3, 0..n), 0..7);
            let finals = prop::collection::vec(0..n, 0..=n);
            (Just(n), trans, finals).prop_map(|(n, trans, finals)| {
                let ts = trans.into_iter().map(|(s, lo, w, d)| Transition {
                    src: s,
                    guard: CharPred::range(lo, lo + w),
                    dst: d,
                });
                Sfa::new(n, 0, finals, ts).unwrap()
            })
        })
    }

    const ALPHA: [u32; 10] = [0, 1, 2, 3, 4, 5, 6, 7, 8, 9];

    fn all_words(max_len: usize) -> BTreeSet<Vec<u32>> {
        Sfa::universal().enumerate_words(&ALPHA[..6], max_len)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn product_is_intersection(a in arb_sfa(), b in arb_sfa()) {
            let wa = a.enumerate_words(&ALPHA[..6], 4);
            let wb = b.enumerate_words(&ALPHA[..6], 4);
            let expect: BTreeSet<_> = wa.intersection(&wb).cloned().collect();
            prop_assert_eq!(a.product(&b).enumerate_words(&ALPHA[..6], 4), expect);
        }

        #[test]
        fn complement_is_set_difference(a in arb_sfa()) {
            let c = a.complement(DEFAULT_STATE_CAP).unwrap();
            let wa = a.enumerate_words(&ALPHA[..6], 4);
            let expect: BTreeSet<_> = all_words(4).difference(&wa).cloned().collect();
            prop_assert_eq!(c.enumerate_words(&ALPHA[..6], 4), expect);
            let cc = c.complement(DEFAULT_STATE_CAP).unwrap();
            prop_assert_eq!(cc.enumerate_words(&ALPHA[..6], 4), wa);
        }

        #[test]
        fn complement_is_total(a in arb_sfa()) {
            let c = a.complement(DEFAULT_STATE_CAP).unwrap();
            for q in 0..c.num_states() {
                let out = c.transitions().iter().filter(|t| t.src == q)
                    .fold(CharPred::empty(), |acc, t| acc.union(&t.guard));
                prop_assert!(out.is_top());
            }
        }

        #[test]
        fn trim_preserves_language(a in arb_sfa()) {
            prop_assert_eq!(a.trim().enumerate_words(&ALPHA[..6], 4), a.enumerate_words(&ALPHA[..6], 4));
        }
    }
}
