//! Acceptance suite. Prints one `PASS`/`FAIL` line per criterion and exits
//! with a failure status if any criterion fails.

mod common;

use std::collections::BTreeSet;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;

use symparikh::formula::{Formula, LinFormula, Sort, Term, VarTable};
use symparikh::oracle::{
    derivation_counts_bruteforce, equal_sum_subsets, parikh_set_bruteforce, script_sat_bruteforce,
    subset_sum, SubsetSearch,
};
use symparikh::param_grammar::{encode_grammar_parikh, instantiate_finite, GrammarParikhOpts, ParamGrammar};
use symparikh::param_pushdown::{grammar_to_pda, pda_to_grammar};
use symparikh::parikh_core::cfg_count_formula;
use symparikh::pipeline::{check_script, CheckOpts, Verdict};
use symparikh::sfa::Transition;
use symparikh::smtlib::parse_script;
use symparikh::symbolic_parikh::{build_phi_regex, phi_regex_var_count, EncodeOpts};
use symparikh::{CharPred, Sfa};

use common::*;

type Outcome = Result<String, String>;

const A: u32 = 97;
const B: u32 = 98;
const C: u32 = 99;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn flag_combos() -> [EncodeOpts; 4] {
    [(true, true), (true, false), (false, true), (false, false)]
        .map(|(use_buckets, use_symmetry)| EncodeOpts { use_buckets, use_symmetry, char_vars: None })
}

fn word_equation() -> Outcome {
    let fixture = concat!(env!("CARGO_MANIFEST_DIR"), "/../../fixtures/ex_we.smt2");
    let start = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_symparikh"))
        .args(["check", fixture])
        .output()
        .map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let stdout = String::from_utf8_lossy(&out.stdout);
    ensure(out.status.success() && stdout.trim() == "unsat", || {
        format!("verdict {:?}, status {}, stderr {}", stdout.trim(), out.status, String::from_utf8_lossy(&out.stderr))
    })?;
    ensure(elapsed < Duration::from_secs(5), || format!("took {elapsed:?}"))?;
    Ok(format!("unsat in {elapsed:.2?}"))
}

fn ab_star() -> Sfa {
    let t = |src, c, dst| Transition { src, guard: CharPred::singleton(c), dst };
    Sfa::new(2, 0, [0], [t(0, A, 1), t(1, B, 0)]).unwrap()
}

fn balanced_counts() -> Outcome {
    let psi = [CharPred::singleton(A), CharPred::singleton(B)];
    let (f, xs) = build_phi_regex(&ab_star(), &psi, &EncodeOpts::default());
    let start = Instant::now();
    for j in 0..=5 {
        for k in 0..=5 {
            let got = sat(&with_values(&f, &xs, &[j, k]));
            ensure(got == (j == k), || format!("({j},{k}) satisfiable: {got}"))?;
        }
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(30), || format!("took {elapsed:?}"))?;
    Ok(format!("36 calls in {elapsed:.2?}"))
}

fn grammar_intersection() -> Outcome {
    let l1 = ParamGrammar::parse("S -> 'a' S 'a' | 'a' 'c' 'a'").unwrap();
    let l2 = ParamGrammar::parse("S -> 'a' S 'b' | 'a' 'c' 'b'").unwrap();
    let psi = [CharPred::singleton(A), CharPred::singleton(B), CharPred::singleton(C)];
    let mut vars = VarTable::new();
    let xs: Vec<Term> = (0..3).map(|i| Term::Var(vars.fresh(&format!("x{i}"), Sort::Count))).collect();
    let f1 = encode_grammar_parikh(&l1, &psi, &xs, &mut vars, GrammarParikhOpts::default());
    let f2 = encode_grammar_parikh(&l2, &psi, &xs, &mut vars, GrammarParikhOpts::default());
    let f = LinFormula::new(vars, Formula::and([f1, f2]));
    let start = Instant::now();
    let got = sat(&f);
    let elapsed = start.elapsed();
    ensure(!got, || "conjunction is satisfiable".into())?;
    ensure(elapsed < Duration::from_secs(10), || format!("took {elapsed:?}"))?;
    Ok(format!("unsat in {elapsed:.2?}"))
}

/// Per instance: the satisfiable candidate set under each flag combination.
type FlagSets = Result<Vec<BTreeSet<Vec<i64>>>, String>;

fn automaton_instances() -> Vec<(Sfa, Vec<CharPred>)> {
    (0..200u64)
        .map(|seed| {
            let mut r = rng(seed);
            (random_sfa(&mut r), random_psi(&mut r))
        })
        .collect()
}

fn automaton_sets(a: &Sfa, psi: &[CharPred]) -> FlagSets {
    let cands = top_bounded_vectors(psi.len(), 5);
    flag_combos()
        .iter()
        .map(|opts| {
            let (f, xs) = build_phi_regex(a, psi, opts);
            // Anything beyond the candidates would need x_i > x_⊤.
            let outside = Formula::and([
                Formula::le(xs[0], 5),
                Formula::or(xs[1..].iter().map(|&x| Formula::gt(x, xs[0]))),
            ]);
            let probe = LinFormula::new(f.vars.clone(), Formula::and([f.body.clone(), outside]));
            ensure(!sat(&probe), || format!("{opts:?}: a count exceeds the length"))?;
            Ok(sat_among(&f, &xs, &cands))
        })
        .collect()
}

fn automaton_oracle(results: &[FlagSets], instances: &[(Sfa, Vec<CharPred>)], elapsed: Duration) -> Outcome {
    let alphabet: Vec<u32> = (0..=9).collect();
    let mut vectors = 0;
    for (i, ((a, psi), sets)) in instances.iter().zip(results).enumerate() {
        let sets = sets.as_ref().map_err(|e| format!("instance {i}: {e}"))?;
        let expected = parikh_set_bruteforce(a, psi, &alphabet, 5);
        vectors += expected.len();
        for (opts, got) in flag_combos().iter().zip(sets.iter()) {
            ensure(*got == expected, || {
                let extra: Vec<_> = got.difference(&expected).collect();
                let missing: Vec<_> = expected.difference(got).collect();
                format!("instance {i} {opts:?}: extra {extra:?}, missing {missing:?}")
            })?;
        }
    }
    ensure(elapsed < Duration::from_secs(15 * 60), || format!("took {elapsed:?}"))?;
    Ok(format!("200 automata, 4 flag settings, {vectors} vectors, {elapsed:.1?}"))
}

fn cfg_counts() -> Outcome {
    let mut checked = 0;
    for seed in 0..100u64 {
        let g = random_cfg(&mut rng(1000 + seed), false);
        let mut vars = VarTable::new();
        let (body, counts) = cfg_count_formula(&g, &mut vars);
        let f = LinFormula::new(vars, body);
        let cands = vectors_with_total(g.rules.len(), 4);
        let got = sat_among(&f, &counts, &cands);
        let expected: BTreeSet<Vec<i64>> = derivation_counts_bruteforce(&g, 4)
            .into_iter()
            .map(|v| v.into_iter().map(|k| k as i64).collect())
            .collect();
        ensure(got == expected, || format!("grammar {seed} {g:?}: solver {got:?}, oracle {expected:?}"))?;
        checked += cands.len();
    }
    Ok(format!("100 grammars, {checked} count vectors"))
}

fn subset_witness() -> Outcome {
    for trial in 0..100u64 {
        let mut r = rng(2000 + trial);
        let d = r.gen_range(4..=6usize);
        let l = r.gen_range(1..=3i64);
        let k = (2.0 * d as f64 * ((d as i64 * l) as f64).log2()).ceil() as usize;
        let mut set: BTreeSet<Vec<i64>> = BTreeSet::new();
        while set.len() < k {
            set.insert((0..d).map(|_| r.gen_range(0..=l)).collect());
        }
        let mut vectors: Vec<Vec<i64>> = set.into_iter().collect();
        vectors.shuffle(&mut r);
        match equal_sum_subsets(&vectors) {
            SubsetSearch::Pair(p, q) => {
                let disjoint = p.iter().all(|i| !q.contains(i));
                ensure(!p.is_empty() && !q.is_empty() && disjoint, || format!("trial {trial}: bad pair {p:?} {q:?}"))?;
                ensure(subset_sum(&vectors, &p) == subset_sum(&vectors, &q), || {
                    format!("trial {trial}: sums differ")
                })?;
            }
            other => return Err(format!("trial {trial} (d={d}, l={l}, k={k}): {other:?}")),
        }
    }
    Ok("100 trials".into())
}

fn optimization_transparency(results: &[FlagSets]) -> Outcome {
    for (i, sets) in results.iter().enumerate() {
        let sets = sets.as_ref().map_err(|e| format!("instance {i}: {e}"))?;
        ensure(sets.iter().all(|s| *s == sets[0]), || format!("instance {i}: flag settings disagree"))?;
    }
    let a_star = Sfa::new(1, 0, [0], [Transition { src: 0, guard: CharPred::singleton(A), dst: 0 }]).unwrap();
    let psi = [CharPred::top(), CharPred::singleton(B)];
    let opts = EncodeOpts { use_buckets: false, use_symmetry: true, char_vars: None };
    let (f, xs) = build_phi_regex(&a_star, &psi, &opts);
    ensure(sat(&with_values(&f, &xs, &[2, 0])), || "single-character label unsatisfiable".into())?;
    Ok("identical on 200 instances, single-character label satisfiable".into())
}

fn pushdown_round_trip() -> Outcome {
    let g = ParamGrammar::parse("S -> y S y | y y").unwrap();
    let p = grammar_to_pda(&g);
    let back = pda_to_grammar(&p, p.max_push()).map_err(|e| e.to_string())?;
    let domain = [A, B];
    let words = |g: &ParamGrammar| {
        instantiate_finite(g, &[], &domain, 1_000_000).map(|c| c.enumerate_words(6)).map_err(|e| e.to_string())
    };
    let (before, after) = (words(&g)?, words(&back)?);
    ensure(before == after, || {
        format!("lost {:?}, gained {:?}", before.difference(&after).collect::<Vec<_>>(), after.difference(&before).collect::<Vec<_>>())
    })?;
    Ok(format!("{} words up to length 6", before.len()))
}

fn formula_size() -> Outcome {
    let t = |src, lo, hi, dst| Transition { src, guard: CharPred::range(lo, hi), dst };
    let a = Sfa::new(4, 0, [3], [t(0, 0, 99, 1), t(1, 50, 199, 2), t(2, 0, 199, 3), t(3, 100, 149, 0), t(1, 0, 9, 3)])
        .unwrap();
    let mut points = Vec::new();
    for n in [2usize, 4, 8, 16] {
        let psi: Vec<CharPred> = std::iter::once(CharPred::top())
            .chain((1..n).map(|i| {
                let lo = (i as u32 * 37) % 180;
                CharPred::range(lo, lo + 5 + (i as u32 * 11) % 40)
            }))
            .collect();
        let opts = EncodeOpts::default();
        let (f, _) = build_phi_regex(&a, &psi, &opts);
        let total = f.vars.len();
        ensure(total == phi_regex_var_count(&a, &psi, &opts), || format!("n={n}: {total} variables"))?;
        let labels = a.labels().len();
        let (mut chars, mut counts, mut splits) = (0, 0, 0);
        for (_, info) in f.vars.iter() {
            let name = info.name.as_str();
            if name.starts_with("chi") {
                chars += 1;
                ensure(info.sort == Sort::Char, || format!("{name} is not a character"))?;
            } else if name.starts_with("kappa") {
                counts += 1;
            } else if name.starts_with('s') && name[1..].starts_with(|c: char| c.is_ascii_digit()) {
                splits += 1;
            }
        }
        ensure(chars == counts, || format!("n={n}: {chars} characters, {counts} multiplicities"))?;
        ensure(splits == n * labels, || format!("n={n}: {splits} split variables"))?;
        let flow = a.transitions().len() + a.finals().len() + a.num_states() + labels;
        ensure(total == n + flow + 2 * chars + splits, || format!("n={n}: closed form mismatch"))?;
        points.push((n as f64 * (n as f64).log2(), total as f64));
    }
    // Least-squares slope of log(vars) against log(n log n).
    let m = points.len() as f64;
    let (lx, ly): (Vec<f64>, Vec<f64>) = points.iter().map(|&(x, y)| (x.ln(), y.ln())).unzip();
    let (mx, my) = (lx.iter().sum::<f64>() / m, ly.iter().sum::<f64>() / m);
    let cov: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let var: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    let slope = cov / var;
    ensure(slope < 2.0, || format!("log-log slope {slope:.3}"))?;
    let sizes: Vec<usize> = points.iter().map(|p| p.1 as usize).collect();
    Ok(format!("variables {sizes:?}, slope {slope:.2}"))
}

fn soundness_fuzz() -> Outcome {
    let opts = CheckOpts::default();
    let alphabet = [A, B, C];
    let mut unsat = 0;
    for seed in 0..300u64 {
        let text = random_script(&mut rng(3000 + seed));
        let report = check_script(&text, &opts).map_err(|e| format!("script {seed}: {e}\n{text}"))?;
        if report.verdict != Verdict::Unsat {
            continue;
        }
        unsat += 1;
        let script = parse_script(&text).unwrap();
        let witness = script_sat_bruteforce(&script, &alphabet, 4, 0..=0).map_err(|e| e.to_string())?;
        ensure(witness.is_none(), || format!("script {seed} is satisfiable by {witness:?}\n{text}"))?;
    }
    Ok(format!("300 scripts, {unsat} reported unsat, no violations"))
}

fn report(id: usize, name: &str, outcome: &Outcome) -> bool {
    match outcome {
        Ok(detail) => println!("criterion {id:>2} PASS  {name}: {detail}"),
        Err(detail) => println!("criterion {id:>2} FAIL  {name}: {detail}"),
    }
    outcome.is_ok()
}

fn main() -> ExitCode {
    let instances = automaton_instances();
    let start = Instant::now();
    let results: Vec<FlagSets> = instances.par_iter().map(|(a, psi)| automaton_sets(a, psi)).collect();
    let automaton_time = start.elapsed();

    let outcomes: Vec<(&str, Outcome)> = vec![
        ("word equation end to end", word_equation()),
        ("balanced counts of (ab)*", balanced_counts()),
        ("disjoint grammar images", grammar_intersection()),
        ("automaton oracle equivalence", automaton_oracle(&results, &instances, automaton_time)),
        ("grammar count oracle", cfg_counts()),
        ("equal-sum witness", subset_witness()),
        ("optimization transparency", optimization_transparency(&results)),
        ("pushdown round trip", pushdown_round_trip()),
        ("formula size", formula_size()),
        ("soundness fuzz", soundness_fuzz()),
    ];
    let mut ok = true;
    for (i, (name, outcome)) in outcomes.iter().enumerate() {
        ok &= report(i + 1, name, outcome);
    }
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
