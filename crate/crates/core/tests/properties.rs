//! Randomized invariants. Each case draws a seed and builds its terms and
//! systems from it, so a failing seed reproduces exactly.

mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::time::Duration;

use common::{random_ground, random_system, random_term, rng};
use formadp::dp::{dependency_pairs, estimated_dependency_graph, initial_problem};
use formadp::filters::{combine_rules, fr_tcap, lhss};
use formadp::framework::{flags_respected, prove, replay, ProveConfig, Verdict};
use formadp::orders::{compare, eval_poly, ArgumentFiltering, Constraint, Interpretation};
use formadp::parser::{emit_proof, parse, print, Problem, ProofFormat};
use formadp::rewriting::{innermost_reducts, is_one_step, reachable, reducts, Mtrs, Rule, SearchLimits};
use formadp::terms::{match_term, sort_of, tcap, unify, FreshVars, Signature, Sort, Substitution, Term, Var};
use proptest::prelude::*;
use rand::seq::IndexedRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

fn vars_of(sig: &Signature) -> Vec<Var> {
    sig.sorts()
        .into_iter()
        .flat_map(|s| ["x", "y", "z"].map(|n| Var::new(&format!("{n}{}", s.name()), s.clone())))
        .collect()
}

fn random_sort(rng: &mut ChaCha8Rng, sig: &Signature) -> Sort {
    let sorts: Vec<Sort> = sig.sorts().into_iter().collect();
    sorts.choose(rng).unwrap().clone()
}

fn random_gamma(rng: &mut ChaCha8Rng, sig: &Signature, vars: impl IntoIterator<Item = Var>) -> Substitution {
    let mut g = Substitution::new();
    for x in vars {
        let t = random_ground(rng, sig, &x.sort, 2);
        g.insert(x, t);
    }
    g
}

/// Every ground term of `sort` up to `depth`.
fn ground_terms(sig: &Signature, sort: &Sort, depth: usize) -> Vec<Term> {
    let mut out = Vec::new();
    for (f, d) in sig.symbols() {
        if &d.result != sort || (d.arity() > 0 && depth == 0) {
            continue;
        }
        let mut tuples: Vec<Vec<Term>> = vec![vec![]];
        for s in &d.args {
            let choices = ground_terms(sig, s, depth - 1);
            tuples = tuples
                .into_iter()
                .flat_map(|t| {
                    choices.iter().map(move |c| {
                        let mut t = t.clone();
                        t.push(c.clone());
                        t
                    })
                })
                .collect();
        }
        out.extend(tuples.into_iter().map(|args| Term::App(f.clone(), args)));
    }
    out
}

/// A ground unifier of `s` and `t` from a small brute-force enumeration.
fn brute_unifier(sig: &Signature, s: &Term, t: &Term) -> Option<Substitution> {
    let vars: Vec<Var> = s.vars().union(&t.vars()).cloned().collect();
    let pools: Vec<Vec<Term>> = vars.iter().map(|x| ground_terms(sig, &x.sort, 1)).collect();
    let mut idx = vec![0; vars.len()];
    loop {
        let mut g = Substitution::new();
        for (k, x) in vars.iter().enumerate() {
            g.insert(x.clone(), pools[k][idx[k]].clone());
        }
        if g.apply(s) == g.apply(t) {
            return Some(g);
        }
        let mut k = 0;
        loop {
            if k == vars.len() {
                return None;
            }
            idx[k] += 1;
            if idx[k] < pools[k].len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

fn defined_rooted(t: &Term, defined: &BTreeSet<formadp::terms::Symbol>, out: &mut BTreeSet<Term>) {
    if let Term::App(f, args) = t {
        if defined.contains(f) {
            out.insert(t.clone());
        }
        for a in args {
            defined_rooted(a, defined, out);
        }
    }
}

fn quick_config() -> ProveConfig {
    ProveConfig {
        timeout: Duration::from_secs(2),
        node_budget: 5_000,
        ..ProveConfig::default()
    }
}

fn random_interpretation(rng: &mut ChaCha8Rng, sig: &Signature) -> Interpretation {
    let mut i = Interpretation::new();
    for (f, d) in sig.symbols() {
        let coeffs: Vec<u32> = (0..d.arity()).map(|_| rng.random_range(0..3)).collect();
        i.set(f.name(), &coeffs, rng.random_range(0..3));
    }
    i
}

proptest! {
    #![proptest_config(ProptestConfig { failure_persistence: None, ..ProptestConfig::with_cases(128) })]

    #[test]
    fn rewriting_preserves_sorts(seed in any::<u64>()) {
        let mut r = rng(seed);
        let m = random_system(&mut r, 2, 5);
        let sort = random_sort(&mut r, &m.signature);
        let s = random_ground(&mut r, &m.signature, &sort, 3);
        for (t, _) in reducts(&s, &m.rules) {
            prop_assert_eq!(sort_of(&m.signature, &t).unwrap(), sort.clone());
        }
    }

    #[test]
    fn matching_recovers_the_substitution(seed in any::<u64>()) {
        let mut r = rng(seed);
        let sig = common::random_signature(&mut r, 2);
        let vars = vars_of(&sig);
        let sort = random_sort(&mut r, &sig);
        let p = random_term(&mut r, &sig, &sort, 3, &vars);
        let gamma = random_gamma(&mut r, &sig, vars.clone());
        let found = match_term(&p, &gamma.apply(&p)).expect("an instance matches");
        for x in p.vars() {
            prop_assert_eq!(found.get(&x), gamma.get(&x));
        }
        prop_assert!(found.domain().all(|x| p.contains_var(x)));
    }

    #[test]
    fn unify_gives_an_idempotent_mgu(seed in any::<u64>()) {
        let mut r = rng(seed);
        let sig = common::random_signature(&mut r, 1);
        let vars: Vec<Var> = vars_of(&sig).into_iter().take(2).collect();
        let sort = random_sort(&mut r, &sig);
        let s = random_term(&mut r, &sig, &sort, 2, &vars);
        let t = random_term(&mut r, &sig, &sort, 2, &vars);
        let u = unify(&sig, &s, &t);
        prop_assert_eq!(u.is_some(), unify(&sig, &t, &s).is_some());
        let brute = brute_unifier(&sig, &s, &t);
        if let Some(sigma) = &u {
            prop_assert_eq!(sigma.apply(&s), sigma.apply(&t));
            for (x, v) in sigma.iter() {
                prop_assert_eq!(&sigma.apply(v), v, "not idempotent at {}", x);
            }
            if let Some(theta) = &brute {
                for x in s.vars().union(&t.vars()) {
                    let direct = theta.apply(&Term::Var(x.clone()));
                    let through = theta.apply(&sigma.apply(&Term::Var(x.clone())));
                    prop_assert_eq!(direct, through, "ground unifier does not factor through mgu");
                }
            }
        } else {
            prop_assert!(brute.is_none(), "missed unifier {:?}", brute);
        }
    }

    #[test]
    fn tcap_is_linear_general_and_stable(seed in any::<u64>()) {
        let mut r = rng(seed);
        let m = random_system(&mut r, 2, 5);
        let vars = vars_of(&m.signature);
        let sort = random_sort(&mut r, &m.signature);
        let t = random_term(&mut r, &m.signature, &sort, 3, &vars);
        let ls = lhss(&m.rules);
        let cap = tcap(&m.signature, &t, &ls, &mut FreshVars::new());
        prop_assert!(cap.is_linear());
        prop_assert!(match_term(&cap, &t).is_some());
        let again = tcap(&m.signature, &cap, &ls, &mut FreshVars::new());
        prop_assert!(again.is_variant_of(&cap));
    }

    #[test]
    fn steps_are_closed_under_substitution_and_context(seed in any::<u64>()) {
        let mut r = rng(seed);
        let m = random_system(&mut r, 2, 5);
        let sig = &m.signature;
        let vars = vars_of(sig);
        let sort = random_sort(&mut r, sig);
        let s = random_term(&mut r, sig, &sort, 3, &vars);
        let gamma = random_gamma(&mut r, sig, vars.clone());
        let holes: Vec<(formadp::terms::Symbol, usize)> = sig
            .symbols()
            .flat_map(|(f, d)| d.args.iter().enumerate().filter(|(_, a)| **a == sort).map(move |(i, _)| (f.clone(), i)))
            .collect();
        let wrap = |r: &mut ChaCha8Rng, t: Term| -> Term {
            let Some((f, i)) = holes.choose(r).cloned() else { return t };
            let d = sig.decl(&f).unwrap();
            let mut args: Vec<Term> = d.args.iter().map(|a| random_ground(r, sig, a, 1)).collect();
            args[i] = t;
            Term::App(f, args)
        };
        for (t, _) in reducts(&s, &m.rules) {
            let mut r2 = r.clone();
            let a = wrap(&mut r, gamma.apply(&s));
            let b = wrap(&mut r2, gamma.apply(&t));
            prop_assert!(is_one_step(&a, &b, &m.rules).is_some(), "{} -> {} lost in context", s, t);
        }
    }

    #[test]
    fn innermost_steps_are_steps(seed in any::<u64>()) {
        let mut r = rng(seed);
        let m = random_system(&mut r, 2, 5);
        let sort = random_sort(&mut r, &m.signature);
        let s = random_ground(&mut r, &m.signature, &sort, 3);
        let all: Vec<Term> = reducts(&s, &m.rules).into_iter().map(|(t, _)| t).collect();
        for (t, _) in innermost_reducts(&s, &m.rules) {
            prop_assert!(all.contains(&t));
        }
    }

    #[test]
    fn pair_count_and_sorts(seed in any::<u64>()) {
        let mut r = rng(seed);
        let m = random_system(&mut r, 2, 5);
        let (_, pairs) = dependency_pairs(&m);
        let defined = m.defined_symbols();
        let mut expected = 0;
        for rule in &m.rules {
            let mut subs = BTreeSet::new();
            defined_rooted(&rule.rhs, &defined, &mut subs);
            expected += subs.len();
        }
        prop_assert_eq!(pairs.len(), expected);
        let (sig, _) = dependency_pairs(&m);
        for p in &pairs {
            prop_assert!(sort_of(&sig, &p.lhs).unwrap().is_dpsort());
            prop_assert!(sort_of(&sig, &p.rhs).unwrap().is_dpsort());
        }
    }

    #[test]
    fn graph_covers_concrete_chains(seed in any::<u64>()) {
        let mut r = rng(seed);
        let m = random_system(&mut r, 2, 5);
        let p = initial_problem(&m, false, false).unwrap();
        let g = estimated_dependency_graph(&p);
        let node = |i: usize| petgraph::graph::NodeIndex::new(i);
        for (i, first) in p.pairs.iter().enumerate() {
            let gamma = random_gamma(&mut r, &m.signature, first.lhs.vars());
            let reach = reachable(&gamma.apply(&first.rhs), &p.rules, SearchLimits { max_steps: 4, max_terms: 300 });
            for (j, second) in p.pairs.iter().enumerate() {
                if reach.order.iter().any(|u| match_term(&second.lhs, u).is_some()) {
                    prop_assert!(g.contains_edge(node(i), node(j)), "missing edge {} -> {}", first, second);
                }
            }
        }
    }

    #[test]
    fn fr_tcap_is_monotone_in_the_rules(seed in any::<u64>()) {
        let mut r = rng(seed);
        let m = random_system(&mut r, 2, 5);
        let (sig, pairs) = dependency_pairs(&m);
        let sub: Vec<Rule> = m.rules.iter().filter(|_| r.random_bool(0.6)).cloned().collect();
        let pi = ArgumentFiltering::trivial();
        let small = fr_tcap(&sig, &lhss(&pairs), &sub, Some(&pi)).ids;
        let large = fr_tcap(&sig, &lhss(&pairs), &m.rules, Some(&pi)).ids;
        prop_assert!(small.is_subset(&large));
    }

    #[test]
    fn combined_rules_simulate_steps(seed in any::<u64>()) {
        let mut r = rng(seed);
        let m = random_system(&mut r, 1, 4);
        let a = combine_rules(&m.rules, 1000).rules();
        let s = random_ground(&mut r, &m.signature, &Sort::unsorted(), 3);
        let reach = reachable(&s, &a, SearchLimits { max_steps: 6, max_terms: 2000 });
        for (t, _) in reducts(&s, &m.rules) {
            prop_assert!(reach.contains(&t), "{} -> {} not simulated", s, t);
        }
    }

    #[test]
    fn strict_comparison_holds_pointwise(seed in any::<u64>()) {
        let mut r = rng(seed);
        let sig = common::random_signature(&mut r, 1);
        let vars = vars_of(&sig);
        let i = random_interpretation(&mut r, &sig);
        let sort = random_sort(&mut r, &sig);
        let c = Constraint { lhs: random_term(&mut r, &sig, &sort, 3, &vars), rhs: random_term(&mut r, &sig, &sort, 3, &vars), strict: r.random_bool(0.5) };
        if compare(&i, &c) {
            for _ in 0..32 {
                let env: BTreeMap<Var, u64> = vars.iter().map(|v| (v.clone(), r.random_range(0..50))).collect();
                let (l, rr) = (eval_poly(&i, &c.lhs, &env).unwrap(), eval_poly(&i, &c.rhs, &env).unwrap());
                prop_assert!(l > rr || (!c.strict && l == rr));
            }
        }
    }

    #[test]
    fn interpretations_are_weakly_monotone(seed in any::<u64>()) {
        let mut r = rng(seed);
        let sig = common::random_signature(&mut r, 1);
        let vars = vars_of(&sig);
        let i = random_interpretation(&mut r, &sig);
        let t = random_term(&mut r, &sig, &Sort::unsorted(), 3, &vars);
        let env: BTreeMap<Var, u64> = vars.iter().map(|v| (v.clone(), r.random_range(0..20))).collect();
        let mut bigger = env.clone();
        let x = vars.choose(&mut r).unwrap().clone();
        *bigger.get_mut(&x).unwrap() += r.random_range(1..10);
        prop_assert!(eval_poly(&i, &t, &bigger).unwrap() >= eval_poly(&i, &t, &env).unwrap());
    }

    #[test]
    fn filtering_preserves_steps(seed in any::<u64>()) {
        let mut r = rng(seed);
        let m = random_system(&mut r, 2, 5);
        let mut pi = ArgumentFiltering::trivial();
        for (f, d) in m.signature.symbols() {
            if d.arity() > 0 && r.random_bool(0.5) {
                pi.set(f.clone(), (1..=d.arity()).filter(|_| r.random_bool(0.5)).collect());
            }
        }
        let filtered = pi.apply_rules(&m.rules);
        let sort = random_sort(&mut r, &m.signature);
        let s = random_ground(&mut r, &m.signature, &sort, 3);
        for (t, _) in reducts(&s, &m.rules) {
            let (a, b) = (pi.apply(&s), pi.apply(&t));
            prop_assert!(a == b || is_one_step(&a, &b, &filtered).is_some());
        }
    }

    #[test]
    fn print_then_parse_is_identity(seed in any::<u64>()) {
        let mut r = rng(seed);
        let sorts = if seed.is_multiple_of(2) { 1 } else { 2 };
        let m = random_system(&mut r, sorts, 5);
        let problem = Problem { mtrs: m.clone(), innermost: r.random_bool(0.3), sorted: sorts > 1 };
        let text = print(&problem);
        let back = parse(&text).unwrap();
        prop_assert_eq!(back.innermost, problem.innermost);
        prop_assert_eq!(&back.mtrs.rules, &m.rules, "{}", text);
        prop_assert_eq!(print(&back), text);
    }
}

proptest! {
    #![proptest_config(ProptestConfig { failure_persistence: None, ..ProptestConfig::with_cases(48) })]

    #[test]
    fn proofs_respect_flags_and_replay(seed in any::<u64>()) {
        let mut r = rng(seed);
        let m = random_system(&mut r, 2, 4);
        let proof = prove(&m, &quick_config()).unwrap();
        prop_assert!(flags_respected(&proof.root));
        prop_assert!(replay(&proof.root));
        prop_assert_eq!(proof.verdict == Verdict::Yes, proof.root.is_closed());
    }

    #[test]
    fn proofs_are_deterministic(seed in any::<u64>()) {
        let mut r = rng(seed);
        let m = random_system(&mut r, 1, 4);
        let config = ProveConfig { node_budget: 5_000, ..ProveConfig::default() };
        let a = emit_proof(&prove(&m, &config).unwrap(), ProofFormat::Json);
        let b = emit_proof(&prove(&m, &config).unwrap(), ProofFormat::Json);
        prop_assert_eq!(a, b);
    }

    #[test]
    fn looping_systems_get_maybe(seed in any::<u64>()) {
        let mut r = rng(seed);
        let m = random_system(&mut r, 2, 4);
        if looping(&m, &mut r) {
            let proof = prove(&m, &quick_config()).unwrap();
            prop_assert_eq!(proof.verdict, Verdict::Maybe);
        }
    }
}

/// Some instance of a left-hand side reduces in at least one step to a
/// term containing itself.
fn looping(m: &Mtrs, r: &mut ChaCha8Rng) -> bool {
    m.rules.iter().any(|rule| {
        let s = random_gamma(r, &m.signature, rule.lhs.vars()).apply(&rule.lhs);
        reducts(&s, &m.rules).iter().any(|(t, _)| {
            reachable(
                t,
                &m.rules,
                SearchLimits {
                    max_steps: 4,
                    max_terms: 300,
                },
            )
            .order
            .iter()
            .any(|u| s.is_subterm_of(u))
        })
    })
}
