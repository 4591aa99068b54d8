mod common;

use symparikh::formula::{Formula, LinFormula, Sort, Term, VarTable};
use symparikh::solver::{check, check_each, emit_smt2, SolveResult};
use symparikh::symbolic_parikh::{build_phi_regex, EncodeOpts};

use common::*;

/// Up to `limit` models of `f`, distinct on `xs`; each is checked against the
/// evaluator before being blocked.
fn enumerate_models(f: &LinFormula, xs: &[symparikh::Var], limit: usize) -> Vec<Vec<i64>> {
    let mut body = f.body.clone();
    let mut found = Vec::new();
    while found.len() < limit {
        let g = LinFormula::new(f.vars.clone(), body.clone());
        let SolveResult::Sat(m) = check(&g, &solver(), true).unwrap() else { break };
        let env = m.to_assignment(&f.vars);
        assert!(f.eval(&env).unwrap(), "model rejected");
        let v: Vec<i64> = xs.iter().map(|x| env[x]).collect();
        body = Formula::and([body, Formula::or(xs.iter().zip(&v).map(|(&x, &k)| Formula::ne(x, k)))]);
        found.push(v);
    }
    found
}

#[test]
fn models_of_automaton_encodings_evaluate_true() {
    for seed in 0..25u64 {
        let r = &mut rng(20_000 + seed);
        let (a, psi) = (random_sfa(r), random_psi(r));
        let (f, xs) = build_phi_regex(&a, &psi, &EncodeOpts::default());
        let f = LinFormula::new(f.vars.clone(), Formula::and([f.body, Formula::le(xs[0], 4)]));
        let models = enumerate_models(&f, &xs, 6);
        let mut sorted = models.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted.len(), models.len(), "blocking clause ignored");
    }
}

#[test]
fn negative_integers_round_trip() {
    let mut t = VarTable::new();
    let x = t.fresh("x", Sort::Int);
    let y = t.fresh("y", Sort::Int);
    let f = LinFormula::new(
        t,
        Formula::and([Formula::eq(Term::sum([Term::Var(x), Term::Var(y)]), -7), Formula::lt(x, -10)]),
    );
    let SolveResult::Sat(m) = check(&f, &solver(), true).unwrap() else { panic!("expected sat") };
    let env = m.to_assignment(&f.vars);
    assert!(env[&x] < -10);
    assert!(f.eval(&env).unwrap());
}

#[test]
fn emission_is_deterministic() {
    let r = &mut rng(21_000);
    let (a, psi) = (random_sfa(r), random_psi(r));
    let (f1, _) = build_phi_regex(&a, &psi, &EncodeOpts::default());
    let (f2, _) = build_phi_regex(&a, &psi, &EncodeOpts::default());
    assert_eq!(emit_smt2(&f1), emit_smt2(&f1));
    assert_eq!(emit_smt2(&f1), emit_smt2(&f2));
}

#[test]
fn batched_queries_agree_with_single_calls() {
    let r = &mut rng(22_000);
    let (a, psi) = (random_sfa(r), random_psi(r));
    let (f, xs) = build_phi_regex(&a, &psi, &EncodeOpts::default());
    let cands = top_bounded_vectors(psi.len(), 3);
    let queries: Vec<Formula> =
        cands.iter().map(|v| Formula::and(xs.iter().zip(v).map(|(&x, &k)| Formula::eq(x, k)))).collect();
    let batched = check_each(&f, &queries, &solver()).unwrap();
    for (v, b) in cands.iter().zip(batched) {
        assert_eq!(b.is_sat(), sat(&with_values(&f, &xs, v)), "{v:?}");
    }
}
