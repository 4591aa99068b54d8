//! Character predicates over Unicode codepoints.
//!
//! A [`CharPred`] is a set of codepoints in the SMT-LIB string universe
//! `[0, 0x2FFFF]`, stored as a sorted list of disjoint, non-adjacent inclusive
//! intervals. The representation is canonical: two predicates denote the same
//! set iff their interval lists are equal, so `Eq`, `Ord` and `Hash` are
//! semantic.
//!
//! All boolean operations are exact and need no solver, which makes this the
//! effective boolean algebra behind transition guards, minterms and buckets.

use std::fmt;

use thiserror::Error;

/// Largest codepoint of the SMT-LIB 2.6 string alphabet.
pub const MAX_CHAR: u32 = 0x2FFFF;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CharsetError {
    #[error("predicate is empty")]
    EmptyPredicate,
    #[error("invalid interval [{lo}, {hi}]")]
    InvalidInterval { lo: u32, hi: u32 },
}

/// A set of codepoints in canonical interval form.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct CharPred {
    intervals: Vec<(u32, u32)>,
}

impl CharPred {
    pub fn empty() -> Self {
        CharPred { intervals: Vec::new() }
    }

    pub fn top() -> Self {
        CharPred {
            intervals: vec![(0, MAX_CHAR)],
        }
    }

    pub fn singleton(c: u32) -> Self {
        Self::range(c, c)
    }

    /// The interval `[lo, hi]` clamped to the universe. Empty when `lo > hi`.
    pub fn range(lo: u32, hi: u32) -> Self {
        let hi = hi.min(MAX_CHAR);
        if lo > hi {
            return Self::empty();
        }
        CharPred {
            intervals: vec![(lo, hi)],
        }
    }

    /// Builds a predicate from arbitrary (possibly overlapping, unsorted)
    /// intervals. Fails on `lo > hi` or bounds outside the universe.
    pub fn from_intervals<I>(intervals: I) -> Result<Self, CharsetError>
    where
        I: IntoIterator<Item = (u32, u32)>,
    {
        let mut v: Vec<(u32, u32)> = Vec::new();
        for (lo, hi) in intervals {
            if lo > hi || hi > MAX_CHAR {
                return Err(CharsetError::InvalidInterval { lo, hi });
            }
            v.push((lo, hi));
        }
        Ok(Self::normalize(v))
    }

    /// Predicate containing exactly the given codepoints (out-of-universe
    /// codepoints are ignored).
    pub fn from_chars<I: IntoIterator<Item = u32>>(chars: I) -> Self {
        Self::normalize(
            chars
                .into_iter()
                .filter(|&c| c <= MAX_CHAR)
                .map(|c| (c, c))
                .collect(),
        )
    }

    fn normalize(mut v: Vec<(u32, u32)>) -> Self {
        v.sort_unstable();
        let mut out: Vec<(u32, u32)> = Vec::with_capacity(v.len());
        for (lo, hi) in v {
            match out.last_mut() {
                Some(last) if lo <= last.1.saturating_add(1) => {
                    last.1 = last.1.max(hi);
                }
                _ => out.push((lo, hi)),
            }
        }
        CharPred { intervals: out }
    }

    pub fn intervals(&self) -> &[(u32, u32)] {
        &self.intervals
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn is_top(&self) -> bool {
        self.intervals.len() == 1 && self.intervals[0] == (0, MAX_CHAR)
    }

    pub fn contains(&self, c: u32) -> bool {
        // Intervals are sorted, so binary search on the lower bounds.
        let idx = self.intervals.partition_point(|&(lo, _)| lo <= c);
        idx > 0 && c <= self.intervals[idx - 1].1
    }

    /// Number of codepoints in the set.
    pub fn len(&self) -> u64 {
        self.intervals
            .iter()
            .map(|&(lo, hi)| u64::from(hi - lo) + 1)
            .sum()
    }

    /// Least element of the set.
    pub fn sample(&self) -> Result<u32, CharsetError> {
        self.intervals
            .first()
            .map(|&(lo, _)| lo)
            .ok_or(CharsetError::EmptyPredicate)
    }

    pub fn union(&self, other: &CharPred) -> CharPred {
        let mut v = Vec::with_capacity(self.intervals.len() + other.intervals.len());
        v.extend_from_slice(&self.intervals);
        v.extend_from_slice(&other.intervals);
        Self::normalize(v)
    }

    pub fn inter(&self, other: &CharPred) -> CharPred {
        let (a, b) = (&self.intervals, &other.intervals);
        let (mut i, mut j) = (0, 0);
        let mut out = Vec::new();
        while i < a.len() && j < b.len() {
            let lo = a[i].0.max(b[j].0);
            let hi = a[i].1.min(b[j].1);
            if lo <= hi {
                out.push((lo, hi));
            }
            if a[i].1 < b[j].1 {
                i += 1;
            } else {
                j += 1;
            }
        }
        // Pieces of two canonical lists are already sorted, disjoint and
        // separated by gaps of at least one codepoint.
        CharPred { intervals: out }
    }

    pub fn complement(&self) -> CharPred {
        let mut out = Vec::with_capacity(self.intervals.len() + 1);
        let mut next = 0u32;
        for &(lo, hi) in &self.intervals {
            if lo > next {
                out.push((next, lo - 1));
            }
            next = hi + 1;
        }
        if next <= MAX_CHAR {
            out.push((next, MAX_CHAR));
        }
        CharPred { intervals: out }
    }

    pub fn minus(&self, other: &CharPred) -> CharPred {
        self.inter(&other.complement())
    }

    pub fn is_disjoint(&self, other: &CharPred) -> bool {
        self.inter(other).is_empty()
    }

    pub fn is_subset(&self, other: &CharPred) -> bool {
        self.minus(other).is_empty()
    }
}

/// Splits the universe into the nonempty cells `⋂ pᵢ^±` induced by `preds`.
///
/// Computed by a sweep over interval boundaries: the universe is cut at every
/// interval endpoint, each elementary segment gets its membership signature,
/// and segments with equal signatures are merged. Cells are returned sorted by
/// their interval lists.
pub fn minterms(preds: &[CharPred]) -> Vec<CharPred> {
    let mut cuts: Vec<u32> = vec![0];
    for p in preds {
        for &(lo, hi) in p.intervals() {
            cuts.push(lo);
            if hi < MAX_CHAR {
                cuts.push(hi + 1);
            }
        }
    }
    cuts.sort_unstable();
    cuts.dedup();

    let words = preds.len().div_ceil(64).max(1);
    let mut cells: std::collections::HashMap<Vec<u64>, Vec<(u32, u32)>> =
        std::collections::HashMap::new();
    // Per-predicate cursor into its interval list; segments are visited in order.
    let mut cursor = vec![0usize; preds.len()];
    for (k, &start) in cuts.iter().enumerate() {
        let end = cuts.get(k + 1).map_or(MAX_CHAR, |&c| c - 1);
        let mut sig = vec![0u64; words];
        for (i, p) in preds.iter().enumerate() {
            let iv = p.intervals();
            while cursor[i] < iv.len() && iv[cursor[i]].1 < start {
                cursor[i] += 1;
            }
            if cursor[i] < iv.len() && iv[cursor[i]].0 <= start {
                sig[i / 64] |= 1 << (i % 64);
            }
        }
        cells.entry(sig).or_default().push((start, end));
    }
    let mut out: Vec<CharPred> = cells.into_values().map(CharPred::normalize).collect();
    out.sort();
    out
}

fn fmt_char(f: &mut fmt::Formatter<'_>, c: u32) -> fmt::Result {
    match char::from_u32(c) {
        Some(ch) if ch.is_ascii_graphic() && !matches!(ch, '[' | ']' | '-' | '\\') => {
            write!(f, "{ch}")
        }
        _ => write!(f, "\\u{{{c:x}}}"),
    }
}

impl fmt::Display for CharPred {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_top() {
            return write!(f, "⊤");
        }
        write!(f, "[")?;
        for &(lo, hi) in &self.intervals {
            fmt_char(f, lo)?;
            if hi > lo {
                write!(f, "-")?;
                fmt_char(f, hi)?;
            }
        }
        write!(f, "]")
    }
}
