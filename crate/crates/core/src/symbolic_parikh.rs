//! Counting how often each output predicate is satisfied along the words of
//! a symbolic automaton.
//!
//! The flow encoding gives the number `c_λ` of transitions taken per label
//! `λ`. Each label's count is then split among a bounded number of
//! representative characters `χ^λ_j` (each satisfying `λ`) with multiplicities
//! `κ^λ_j`, and predicate `ψ_i` is satisfied once for every occurrence of a
//! representative satisfying it.

use crate::charset::CharPred;
use crate::formula::{Formula, LinFormula, Sort, Term, Var, VarTable};
use crate::parikh_core::automaton_flow_formula;
use crate::sfa::Sfa;

/// Output predicates that are pairwise disjoint within one label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bucket {
    pub members: Vec<CharPred>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EncodeOpts {
    /// Bound the representatives per label by the number of predicate
    /// profiles the label admits.
    pub use_buckets: bool,
    /// Break permutation symmetry among representatives.
    pub use_symmetry: bool,
    /// Fixed number of representatives per label, overriding the bound.
    pub char_vars: Option<usize>,
}

impl Default for EncodeOpts {
    fn default() -> Self {
        EncodeOpts { use_buckets: true, use_symmetry: true, char_vars: None }
    }
}

/// Greedy bucket allocation: each predicate joins the first bucket none of
/// whose members it overlaps within `label`, or opens a new bucket.
pub fn compute_buckets(label: &CharPred, psi: &[CharPred]) -> Vec<Bucket> {
    let mut buckets: Vec<Bucket> = Vec::new();
    for p in psi {
        let within = label.inter(p);
        match buckets.iter_mut().find(|b| b.members.iter().all(|q| within.is_disjoint(q))) {
            Some(b) => b.members.push(p.clone()),
            None => buckets.push(Bucket { members: vec![p.clone()] }),
        }
    }
    buckets
}

/// `max(1, ⌈2·d·log2(max(d, 2))⌉)`.
pub fn raw_char_bound(d: usize) -> usize {
    let d = d.max(1) as f64;
    let v = (2.0 * d * d.max(2.0).log2()).ceil() as usize;
    v.max(1)
}

/// Dimension used for the raw bound: the label count is an extra coordinate
/// unless some predicate already counts every character.
fn effective_dim(psi: &[CharPred]) -> usize {
    if psi.iter().any(CharPred::is_top) {
        psi.len()
    } else {
        psi.len() + 1
    }
}

/// Number of representatives needed for `label`: the product of per-bucket
/// profile counts, capped by the raw bound for `n` dimensions.
pub fn char_count_bound(label: &CharPred, buckets: &[Bucket], n: usize) -> usize {
    let mut product: usize = 1;
    for b in buckets {
        let uncovered = b.members.iter().fold(label.clone(), |acc, p| acc.minus(p));
        let cnt = b.members.len() + usize::from(!uncovered.is_empty());
        product = product.saturating_mul(cnt);
    }
    product.min(raw_char_bound(n))
}

fn representatives(label: &CharPred, psi: &[CharPred], opts: &EncodeOpts) -> usize {
    if let Some(c) = opts.char_vars {
        return c.max(1);
    }
    let d = effective_dim(psi);
    if opts.use_buckets {
        char_count_bound(label, &compute_buckets(label, psi), d)
    } else {
        raw_char_bound(d)
    }
}

/// Constrains `xs[i]` to the number of positions satisfying `psi[i]` in some
/// word accepted by `a`.
///
/// Allocates, besides the flow variables (one per transition, final state,
/// state and label), `2·C_λ + n` variables per label `λ`: `C_λ` characters,
/// `C_λ` multiplicities and one split count per predicate. See
/// [`phi_regex_var_count`].
pub fn encode_phi_regex(
    a: &Sfa,
    psi: &[CharPred],
    xs: &[Term],
    vars: &mut VarTable,
    opts: &EncodeOpts,
) -> Formula {
    assert_eq!(psi.len(), xs.len(), "one output term per predicate");
    let flow = automaton_flow_formula(a, vars);
    let mut parts = vec![flow.body];
    let mut per_pred: Vec<Vec<Term>> = vec![Vec::new(); psi.len()];
    for (li, (label, c)) in flow.label_counts.iter().enumerate() {
        let m = representatives(label, psi, opts);
        let chi: Vec<Var> = (0..m).map(|j| vars.fresh(&format!("chi{li}_{j}"), Sort::Char)).collect();
        let kappa: Vec<Var> =
            (0..m).map(|j| vars.fresh(&format!("kappa{li}_{j}"), Sort::Count)).collect();
        parts.push(Formula::eq(*c, Term::sum(kappa.iter().map(|&k| Term::Var(k)))));
        for &x in &chi {
            parts.push(Formula::pred_holds(label, x));
        }
        for (i, p) in psi.iter().enumerate() {
            let within = label.inter(p);
            let s = if within.is_empty() {
                Term::zero()
            } else if within == *label {
                Term::Var(*c)
            } else {
                Term::sum(chi.iter().zip(&kappa).map(|(&x, &k)| {
                    Term::ite(Formula::pred_holds(p, x), Term::Var(k), Term::zero())
                }))
            };
            let split = vars.fresh(&format!("s{li}_{i}"), Sort::Count);
            parts.push(Formula::eq(split, s));
            per_pred[i].push(Term::Var(split));
        }
        if opts.use_symmetry {
            for j in 0..m.saturating_sub(1) {
                let (x0, x1, k0, k1) = (chi[j], chi[j + 1], kappa[j], kappa[j + 1]);
                parts.push(Formula::or([
                    Formula::and([Formula::eq(k1, 0), Formula::eq(x0, x1)]),
                    Formula::lt(x0, x1),
                ]));
                parts.push(Formula::or(std::iter::once(Formula::eq(k1, 0)).chain(
                    psi.iter().map(|p| {
                        Formula::xor(Formula::pred_holds(p, x0), Formula::pred_holds(p, x1))
                    }),
                )));
                parts.push(Formula::implies(Formula::eq(k0, 0), Formula::eq(k1, 0)));
            }
        }
    }
    for (x, ss) in xs.iter().zip(per_pred) {
        parts.push(Formula::eq(x.clone(), Term::sum(ss)));
    }
    Formula::and(parts)
}

/// Variables allocated by [`build_phi_regex`], outputs included.
pub fn phi_regex_var_count(a: &Sfa, psi: &[CharPred], opts: &EncodeOpts) -> usize {
    let n = psi.len();
    let flow = a.transitions().len() + a.finals().len() + a.num_states();
    let labels = a.labels();
    let per_label: usize = labels.iter().map(|l| 2 * representatives(l, psi, opts) + n + 1).sum();
    n + flow + per_label
}

/// [`encode_phi_regex`] with fresh outputs `x_1..x_n`.
pub fn build_phi_regex(a: &Sfa, psi: &[CharPred], opts: &EncodeOpts) -> (LinFormula, Vec<Var>) {
    let mut vars = VarTable::new();
    let xs: Vec<Var> = (0..psi.len()).map(|i| vars.fresh(&format!("x{i}"), Sort::Count)).collect();
    let terms: Vec<Term> = xs.iter().map(|&v| Term::Var(v)).collect();
    let body = encode_phi_regex(a, psi, &terms, &mut vars, opts);
    (LinFormula::new(vars, body), xs)
}

/// Predicate counts of arbitrary words; not every vector is one, since a
/// character satisfying some predicate always counts towards all predicates
/// it satisfies.
pub fn any_parikh(psi: &[CharPred]) -> (LinFormula, Vec<Var>) {
    build_phi_regex(&Sfa::universal(), psi, &EncodeOpts::default())
}

/// [`any_parikh`] over caller-supplied outputs.
pub fn encode_any_parikh(
    psi: &[CharPred],
    xs: &[Term],
    vars: &mut VarTable,
    opts: &EncodeOpts,
) -> Formula {
    encode_phi_regex(&Sfa::universal(), psi, xs, vars, opts)
}

#[cfg(test)]
mod tests {
    use std::collections::HashMap;

    use super::*;
    use crate::sfa::Transition;

    fn a() -> CharPred {
        CharPred::singleton(97)
    }
    fn b() -> CharPred {
        CharPred::singleton(98)
    }

    #[test]
    fn buckets() {
        let c = CharPred::singleton(99);
        assert_eq!(compute_buckets(&CharPred::top(), &[a(), b(), c]).len(), 1);
        let r1 = CharPred::range(97, 98);
        let r2 = CharPred::range(98, 99);
        assert_eq!(compute_buckets(&CharPred::top(), &[r1, r2]).len(), 2);
        let bs = compute_buckets(&a(), &[CharPred::range(97, 120), CharPred::range(96, 99)]);
        assert_eq!(bs.len(), 2);
    }

    #[test]
    fn bounds() {
        assert_eq!(char_count_bound(&a(), &compute_buckets(&a(), &[a()]), 1), 1);
        let top = CharPred::top();
        assert_eq!(char_count_bound(&top, &compute_buckets(&top, std::slice::from_ref(&top)), 1), 1);
        let l = CharPred::range(97, 99);
        let bs = compute_buckets(&l, &[a(), b()]);
        assert_eq!(bs.len(), 1);
        assert_eq!(char_count_bound(&l, &bs, 2), 3);
        assert_eq!(raw_char_bound(1), 2);
        assert_eq!(raw_char_bound(2), 4);
        assert_eq!(raw_char_bound(3), 10);
    }

    #[test]
    fn var_count_matches_closed_form() {
        let psi = [CharPred::top(), a(), CharPred::range(97, 100)];
        for opts in [EncodeOpts::default(), EncodeOpts { use_buckets: false, ..Default::default() }] {
            let (f, _) = build_phi_regex(&ab_star(), &psi, &opts);
            assert_eq!(f.vars.len(), phi_regex_var_count(&ab_star(), &psi, &opts));
        }
    }

    fn ab_star() -> Sfa {
        Sfa::new(
            2,
            0,
            [0],
            vec![
                Transition { src: 0, guard: a(), dst: 1 },
                Transition { src: 1, guard: b(), dst: 0 },
            ],
        )
        .unwrap()
    }

    #[test]
    fn concrete_model_of_ab_star() {
        let (f, xs) = build_phi_regex(&ab_star(), &[a(), b()], &EncodeOpts::default());
        // Representatives are fixed by the singleton labels, so a model for
        // (2, 2) can be written down directly.
        let mut env: HashMap<Var, i64> = HashMap::new();
        for (v, info) in f.vars.iter() {
            let val = match info.name.split('!').next().unwrap() {
                "x0" | "x1" | "y0" | "y1" | "c0" | "c1" | "s0_0" | "s1_1" => 2,
                "e0" => 1,
                "z0" => 1,
                "z1" => 2,
                n if n.starts_with("chi0") => 97,
                n if n.starts_with("chi1") => 98,
                n if n.starts_with("kappa") && n.ends_with("_0") => 2,
                _ => 0,
            };
            env.insert(v, val);
        }
        assert!(f.eval(&env).unwrap());
        env.insert(xs[0], 3);
        assert!(!f.eval(&env).unwrap());
    }
}
