mod common;

use std::fs;
use std::path::PathBuf;

use symparikh::abstraction::{AbstractionOpts, PredicateMode};
use symparikh::oracle::script_sat_bruteforce;
use symparikh::pipeline::{check_script, CheckOpts, Verdict};
use symparikh::smtlib::parse_script;
use symparikh::symbolic_parikh::EncodeOpts;

use common::*;

fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn opts(mode: PredicateMode, use_buckets: bool, use_symmetry: bool) -> CheckOpts {
    CheckOpts {
        mode,
        abstraction: AbstractionOpts {
            encode: EncodeOpts { use_buckets, use_symmetry, char_vars: None },
            ..AbstractionOpts::default()
        },
        solver: solver(),
    }
}

fn status(text: &str) -> &str {
    let line = text.lines().find(|l| l.contains(":status")).expect("status annotation");
    if line.contains("unsat") {
        "unsat"
    } else {
        "sat"
    }
}

#[test]
fn corpus_unsat_only_when_unsat() {
    let mut files: Vec<PathBuf> = fs::read_dir(fixtures().join("corpus"))
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "smt2"))
        .collect();
    files.sort();
    assert!(files.len() >= 10);
    let mut proved = 0;
    for f in &files {
        let text = fs::read_to_string(f).unwrap();
        for mode in [PredicateMode::Regex, PredicateMode::RegexLiterals] {
            let report = check_script(&text, &opts(mode, true, true)).unwrap();
            if report.verdict == Verdict::Unsat {
                assert_eq!(status(&text), "unsat", "{}", f.display());
                proved += 1;
            }
        }
    }
    assert!(proved > 0);
}

#[test]
fn word_equation_example_is_refuted() {
    let text = fs::read_to_string(fixtures().join("ex_we.smt2")).unwrap();
    let report = check_script(&text, &CheckOpts { solver: solver(), ..CheckOpts::default() }).unwrap();
    assert_eq!(report.verdict, Verdict::Unsat);
    assert!(report.warnings.is_empty());
}

#[test]
fn disequality_only_script_stays_unknown() {
    let text = "(declare-fun x () String)\n(assert (not (= x x)))\n";
    let report = check_script(text, &CheckOpts { solver: solver(), ..CheckOpts::default() }).unwrap();
    assert!(matches!(report.verdict, Verdict::Unknown(_)));
    assert_eq!(report.verdict.as_str(), "unknown");
    assert!(!report.warnings.is_empty());
}

#[test]
fn random_scripts_under_every_setting() {
    let settings = [
        opts(PredicateMode::Regex, false, false),
        opts(PredicateMode::RegexLiterals, true, true),
        opts(PredicateMode::RegexLiterals, false, true),
    ];
    let mut refuted = 0;
    for seed in 0..120u64 {
        let text = random_script(&mut rng(30_000 + seed));
        let script = parse_script(&text).unwrap();
        let mut verdicts = Vec::new();
        for o in &settings {
            verdicts.push(check_script(&text, o).unwrap().verdict == Verdict::Unsat);
        }
        if verdicts.iter().any(|&v| v) {
            refuted += 1;
            let witness = script_sat_bruteforce(&script, &[97, 98, 99], 4, 0..=0).unwrap();
            assert!(witness.is_none(), "seed {seed}: {witness:?}\n{text}");
        }
        // Buckets and symmetry breaking never change the verdict.
        assert_eq!(verdicts[1], verdicts[2], "seed {seed}\n{text}");
    }
    assert!(refuted > 0);
}
