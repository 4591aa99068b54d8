//! Random word-equation benchmarks over overlapping regular languages.
//!
//! Each script has the shape
//!
//! ```text
//! x1 ∈ (r1…rn)*  ∧  x2 ∈ (r1…rn)+ (r'1…r'm)+  ∧  x3 ∈ (r'1…r'm)*  ∧  e1 = e2
//! ```
//!
//! where `1 ≤ n, m ≤ 3`, the `r` are drawn from a pool of SMT-LIB regexes,
//! and `e1`, `e2` each concatenate three variables such that every variable
//! occurs somewhere in the equation.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::smtlib::{parse_script, FrontendError};

#[derive(Debug, Error)]
pub enum WordEqError {
    #[error("regex pool is empty")]
    EmptyPool,
    #[error("regex pool line {line}: {source}")]
    BadRegex { line: usize, source: FrontendError },
}

/// One regex per line; blank lines and lines starting with `;` are skipped.
/// Every entry is checked to parse.
pub fn load_regex_pool(text: &str) -> Result<Vec<String>, WordEqError> {
    let mut pool = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let l = line.trim();
        if l.is_empty() || l.starts_with(';') {
            continue;
        }
        let probe = format!("(declare-fun x () String)(assert (str.in_re x {l}))");
        parse_script(&probe).map_err(|source| WordEqError::BadRegex { line: i + 1, source })?;
        pool.push(l.to_string());
    }
    if pool.is_empty() {
        return Err(WordEqError::EmptyPool);
    }
    Ok(pool)
}

fn seq(rs: &[&String]) -> String {
    match rs {
        [one] => one.to_string(),
        _ => format!("(re.++ {})", rs.iter().map(|s| s.as_str()).collect::<Vec<_>>().join(" ")),
    }
}

const VARS: [&str; 3] = ["x1", "x2", "x3"];

fn one_script(rng: &mut ChaCha8Rng, pool: &[String]) -> String {
    let n = rng.gen_range(1..=3);
    let m = rng.gen_range(1..=3);
    let rs: Vec<&String> = (0..n).map(|_| pool.choose(rng).expect("nonempty pool")).collect();
    let rs2: Vec<&String> = (0..m).map(|_| pool.choose(rng).expect("nonempty pool")).collect();
    let (lhs, rhs) = loop {
        let l: Vec<usize> = (0..3).map(|_| rng.gen_range(0..3)).collect();
        let r: Vec<usize> = (0..3).map(|_| rng.gen_range(0..3)).collect();
        if (0..3).all(|v| l.contains(&v) || r.contains(&v)) {
            break (l, r);
        }
    };
    let side = |s: &[usize]| s.iter().map(|&i| VARS[i]).collect::<Vec<_>>().join(" ");
    let (a, b) = (seq(&rs), seq(&rs2));
    let mut out = String::from("(set-logic QF_SLIA)\n");
    for v in VARS {
        out.push_str(&format!("(declare-fun {v} () String)\n"));
    }
    out.push_str(&format!("(assert (str.in_re x1 (re.* {a})))\n"));
    out.push_str(&format!("(assert (str.in_re x2 (re.++ (re.+ {a}) (re.+ {b}))))\n"));
    out.push_str(&format!("(assert (str.in_re x3 (re.* {b})))\n"));
    out.push_str(&format!("(assert (= (str.++ {}) (str.++ {})))\n", side(&lhs), side(&rhs)));
    out.push_str("(check-sat)\n");
    out
}

/// `count` scripts, deterministic in `seed`.
pub fn gen_wordeq(seed: u64, count: usize, pool: &[String]) -> Result<Vec<String>, WordEqError> {
    if pool.is_empty() {
        return Err(WordEqError::EmptyPool);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..count).map(|_| one_script(&mut rng, pool)).collect())
}
