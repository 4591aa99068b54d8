//! Flow encodings of runs and derivations.
//!
//! An accepting run of an epsilon-free automaton is characterized by how
//! often it takes each transition: the counts form a flow from the initial
//! state to one chosen final state, and the transitions with positive count
//! must be reachable from the initial state. Reachability is witnessed by
//! distance labels `z` that increase by one along some used edge, which rules
//! out flow on cycles detached from the run.
//!
//! The same idea characterizes rule counts of derivations in a context-free
//! grammar: every nonterminal is expanded as often as it is introduced (one
//! extra time for the start symbol), and every expanded nonterminal is
//! reachable from the start symbol through used rules.

use crate::cfg::Cfg;
use crate::charset::CharPred;
use crate::formula::{Formula, Sort, Term, Var, VarTable};
use crate::sfa::Sfa;

/// Variables and constraints of the automaton flow encoding.
#[derive(Debug, Clone)]
pub struct FlowFormula {
    pub body: Formula,
    /// One count variable per distinct transition label, in [`Sfa::labels`]
    /// order.
    pub label_counts: Vec<(CharPred, Var)>,
    /// `y_t`, indexed like [`Sfa::transitions`].
    pub transition_counts: Vec<Var>,
    /// `e_q` for every final state, in ascending state order.
    pub final_choice: Vec<(usize, Var)>,
    /// `z_q`, indexed by state.
    pub distances: Vec<Var>,
}

impl FlowFormula {
    pub fn label_count(&self, label: &CharPred) -> Option<Var> {
        self.label_counts.iter().find(|(l, _)| l == label).map(|(_, v)| *v)
    }
}

/// Encodes the label-count vectors of accepting runs of `a`.
///
/// Satisfiable with label counts `c` iff some accepting run takes exactly
/// `c[λ]` transitions labeled `λ`.
pub fn automaton_flow_formula(a: &Sfa, vars: &mut VarTable) -> FlowFormula {
    let n = a.num_states();
    let ts = a.transitions();
    let y: Vec<Var> = (0..ts.len()).map(|i| vars.fresh(&format!("y{i}"), Sort::Count)).collect();
    let e: Vec<(usize, Var)> =
        a.finals().iter().map(|&q| (q, vars.fresh(&format!("e{q}"), Sort::Count))).collect();
    let z: Vec<Var> = (0..n).map(|q| vars.fresh(&format!("z{q}"), Sort::Distance)).collect();

    let mut parts = Vec::new();
    for &(_, v) in &e {
        parts.push(Formula::le(v, 1));
    }
    parts.push(Formula::eq(Term::sum(e.iter().map(|&(_, v)| Term::Var(v))), 1));

    let final_var = |q: usize| e.iter().find(|(p, _)| *p == q).map(|&(_, v)| v);
    for q in 0..n {
        let inflow = Term::sum(
            ts.iter()
                .enumerate()
                .filter(|(_, t)| t.dst == q)
                .map(|(i, _)| Term::Var(y[i]))
                .chain((q == a.initial()).then_some(Term::Const(1))),
        );
        let outflow_edges = Term::sum(
            ts.iter().enumerate().filter(|(_, t)| t.src == q).map(|(i, _)| Term::Var(y[i])),
        );
        let outflow = Term::sum(
            [outflow_edges.clone()].into_iter().chain(final_var(q).map(Term::Var)),
        );
        parts.push(Formula::eq(inflow, outflow.clone()));

        parts.push(Formula::le(z[q], n as i64));
        if q == a.initial() {
            parts.push(Formula::eq(z[q], 1));
            continue;
        }
        let witnesses = ts.iter().enumerate().filter(|(_, t)| t.dst == q).map(|(i, t)| {
            Formula::and([
                Formula::ge(y[i], 1),
                Formula::ge(z[t.src], 1),
                Formula::eq(z[q], Term::sum([Term::Var(z[t.src]), Term::Const(1)])),
            ])
        });
        parts.push(Formula::or(std::iter::once(Formula::eq(z[q], 0)).chain(witnesses)));
        parts.push(Formula::implies(Formula::ge(outflow, 1), Formula::ge(z[q], 1)));
    }

    let mut label_counts = Vec::new();
    for (li, label) in a.labels().into_iter().enumerate() {
        let c = vars.fresh(&format!("c{li}"), Sort::Count);
        let sum = Term::sum(
            ts.iter().enumerate().filter(|(_, t)| t.guard == label).map(|(i, _)| Term::Var(y[i])),
        );
        parts.push(Formula::eq(c, sum));
        label_counts.push((label, c));
    }

    FlowFormula {
        body: Formula::and(parts),
        label_counts,
        transition_counts: y,
        final_choice: e,
        distances: z,
    }
}

/// Encodes the rule-count vectors of complete derivations of `g`.
///
/// Returns the formula and one count variable per rule, indexed like
/// `g.rules`. Satisfiable with counts `n` iff some derivation from the start
/// symbol to a terminal word applies rule `r` exactly `n[r]` times.
pub fn cfg_count_formula(g: &Cfg, vars: &mut VarTable) -> (Formula, Vec<Var>) {
    let counts: Vec<Var> =
        (0..g.rules.len()).map(|r| vars.fresh(&format!("n{r}"), Sort::Count)).collect();
    let terms: Vec<Term> = counts.iter().map(|&v| Term::Var(v)).collect();
    (cfg_count_constraints(g, &terms, vars), counts)
}

/// [`cfg_count_formula`] over caller-supplied rule-count terms.
pub fn cfg_count_constraints(g: &Cfg, counts: &[Term], vars: &mut VarTable) -> Formula {
    assert_eq!(counts.len(), g.rules.len());
    let nn = g.num_nonterminals();
    let z: Vec<Var> = (0..nn).map(|b| vars.fresh(&format!("zn{b}"), Sort::Distance)).collect();
    let mut parts = Vec::new();
    for b in 0..nn {
        let expanded = Term::sum(
            g.rules.iter().zip(counts).filter(|(r, _)| r.lhs == b).map(|(_, n)| n.clone()),
        );
        let introduced = Term::sum(
            g.rules
                .iter()
                .zip(counts)
                .map(|(r, n)| Term::scale(r.count_nt(b) as i64, n.clone()))
                .chain((b == g.start).then_some(Term::Const(1))),
        );
        parts.push(Formula::eq(expanded.clone(), introduced));

        parts.push(Formula::le(z[b], nn as i64));
        if b == g.start {
            parts.push(Formula::eq(z[b], 1));
            continue;
        }
        let witnesses = g
            .rules
            .iter()
            .zip(counts)
            .filter(|(r, _)| r.count_nt(b) > 0)
            .map(|(r, n)| {
                Formula::and([
                    Formula::ge(n.clone(), 1),
                    Formula::ge(z[r.lhs], 1),
                    Formula::eq(z[b], Term::sum([Term::Var(z[r.lhs]), Term::Const(1)])),
                ])
            });
        parts.push(Formula::or(std::iter::once(Formula::eq(z[b], 0)).chain(witnesses)));
        parts.push(Formula::implies(Formula::ge(expanded, 1), Formula::ge(z[b], 1)));
    }
    Formula::and(parts)
}

#[cfg(test)]
mod tests {
    use std::collections::HashMap;

    use super::*;
    use crate::cfg::{Rule, Sym};
    use crate::sfa::Transition;

    fn ab_star() -> Sfa {
        Sfa::new(
            2,
            0,
            [0],
            vec![
                Transition { src: 0, guard: CharPred::singleton(97), dst: 1 },
                Transition { src: 1, guard: CharPred::singleton(98), dst: 0 },
            ],
        )
        .unwrap()
    }

    /// A satisfying assignment for the flow formula built from a concrete run.
    fn run_assignment(a: &Sfa, f: &FlowFormula, run: &[usize]) -> HashMap<Var, i64> {
        let mut env = HashMap::new();
        let ts = a.transitions();
        for (i, &v) in f.transition_counts.iter().enumerate() {
            env.insert(v, run.iter().filter(|&&t| t == i).count() as i64);
        }
        let last = run.last().map_or(a.initial(), |&t| ts[t].dst);
        for &(q, v) in &f.final_choice {
            env.insert(v, i64::from(q == last));
        }
        let mut dist = vec![0i64; a.num_states()];
        dist[a.initial()] = 1;
        // Breadth-first distances over the used edges.
        let mut frontier = vec![a.initial()];
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for &p in &frontier {
                for &t in run {
                    let tr = &ts[t];
                    if tr.src == p && dist[tr.dst] == 0 {
                        dist[tr.dst] = dist[p] + 1;
                        next.push(tr.dst);
                    }
                }
            }
            frontier = next;
        }
        for (q, &v) in f.distances.iter().enumerate() {
            env.insert(v, dist[q]);
        }
        for (label, v) in &f.label_counts {
            env.insert(*v, run.iter().filter(|&&t| &ts[t].guard == label).count() as i64);
        }
        env
    }

    #[test]
    fn concrete_runs_satisfy_the_flow() {
        let a = ab_star();
        let mut vars = VarTable::new();
        let f = automaton_flow_formula(&a, &mut vars);
        for k in 0..4 {
            let run: Vec<usize> = (0..k).flat_map(|_| [0, 1]).collect();
            let env = run_assignment(&a, &f, &run);
            assert!(f.body.eval(&env, &vars).unwrap());
        }
        // Half a loop ends in the non-final state.
        let env = run_assignment(&a, &f, &[0]);
        assert!(!f.body.eval(&env, &vars).unwrap());
    }

    #[test]
    fn empty_language_flow_is_false() {
        let mut vars = VarTable::new();
        let f = automaton_flow_formula(&Sfa::empty_language(), &mut vars);
        assert!(!f.body.eval(&HashMap::new(), &vars).unwrap_or(false));
    }

    #[test]
    fn cfg_counts_for_anbn() {
        let g = Cfg::new(
            vec!["S".into()],
            0,
            vec![
                Rule { lhs: 0, rhs: vec![Sym::T(97), Sym::N(0), Sym::T(98)] },
                Rule { lhs: 0, rhs: vec![] },
            ],
        );
        let mut vars = VarTable::new();
        let (f, n) = cfg_count_formula(&g, &mut vars);
        let z = vars.lookup("zn0!2").unwrap();
        for rec in 0..4 {
            for eps in 0..3 {
                let env: HashMap<Var, i64> = [(n[0], rec), (n[1], eps), (z, 1)].into();
                assert_eq!(f.eval(&env, &vars).unwrap(), eps == 1, "{rec} {eps}");
            }
        }
    }
}
