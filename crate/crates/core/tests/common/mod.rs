//! Random systems and reference implementations shared by the test targets.
#![allow(dead_code)]

use std::collections::BTreeSet;

use formadp::rewriting::{Mtrs, ReductionTrace, Rule, RuleId};
use formadp::terms::{has_shape, match_term, Signature, Sort, SortDecl, Symbol, Term, Var};
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A random signature over `sorts` sorts: every sort gets a constant, plus
/// a few symbols of arity 1–2.
pub fn random_signature(rng: &mut ChaCha8Rng, sorts: usize) -> Signature {
    let names: Vec<Sort> = if sorts == 1 {
        vec![Sort::unsorted()]
    } else {
        (0..sorts).map(|i| Sort::new(&format!("S{i}"))).collect()
    };
    let mut sig = Signature::new();
    for (i, s) in names.iter().enumerate() {
        let c = ["a", "b", "c"][i % 3];
        sig.declare(Symbol::new(c), SortDecl::new(vec![], s.clone())).unwrap();
    }
    if rng.random_bool(0.5) {
        sig.declare(Symbol::new("d"), SortDecl::new(vec![], names[0].clone()))
            .unwrap();
    }
    let n = rng.random_range(2..=4);
    for k in 0..n {
        let arity = rng.random_range(1..=2);
        let args = (0..arity).map(|_| names.choose(rng).unwrap().clone()).collect();
        let res = names.choose(rng).unwrap().clone();
        sig.declare(Symbol::new(["f", "g", "h", "k"][k]), SortDecl::new(args, res))
            .unwrap();
    }
    sig
}

fn symbols_of(sig: &Signature, sort: &Sort, arity_pos: bool) -> Vec<Symbol> {
    sig.symbols()
        .filter(|(_, d)| &d.result == sort && (d.arity() > 0) == arity_pos)
        .map(|(f, _)| f.clone())
        .collect()
}

/// A random linear term: every variable occurs once and gets a fresh name.
pub fn random_linear(rng: &mut ChaCha8Rng, sig: &Signature, sort: &Sort, depth: usize, next: &mut usize) -> Term {
    let funs = symbols_of(sig, sort, true);
    if depth == 0 || funs.is_empty() || rng.random_bool(0.35) {
        if rng.random_bool(0.6) {
            *next += 1;
            return Term::var(&format!("x{next}"), sort);
        }
        let cs = symbols_of(sig, sort, false);
        return Term::App(cs.choose(rng).unwrap().clone(), vec![]);
    }
    let f = funs.choose(rng).unwrap().clone();
    let d = sig.decl(&f).unwrap().clone();
    let args = d
        .args
        .iter()
        .map(|s| random_linear(rng, sig, s, depth - 1, next))
        .collect();
    Term::App(f, args)
}

/// A random term of `sort` whose variables come from `vars`.
pub fn random_term(rng: &mut ChaCha8Rng, sig: &Signature, sort: &Sort, depth: usize, vars: &[Var]) -> Term {
    let funs = symbols_of(sig, sort, true);
    let vs: Vec<&Var> = vars.iter().filter(|v| &v.sort == sort).collect();
    if depth == 0 || funs.is_empty() || rng.random_bool(0.4) {
        if !vs.is_empty() && rng.random_bool(0.5) {
            return Term::Var((*vs.choose(rng).unwrap()).clone());
        }
        let cs = symbols_of(sig, sort, false);
        return Term::App(cs.choose(rng).unwrap().clone(), vec![]);
    }
    let f = funs.choose(rng).unwrap().clone();
    let d = sig.decl(&f).unwrap().clone();
    let args = d
        .args
        .iter()
        .map(|s| random_term(rng, sig, s, depth - 1, vars))
        .collect();
    Term::App(f, args)
}

pub fn random_ground(rng: &mut ChaCha8Rng, sig: &Signature, sort: &Sort, depth: usize) -> Term {
    random_term(rng, sig, sort, depth, &[])
}

/// A random left-linear system with at most `max_rules` rules, terms of
/// depth at most 3.
pub fn random_system(rng: &mut ChaCha8Rng, sorts: usize, max_rules: usize) -> Mtrs {
    let sig = random_signature(rng, sorts);
    let roots: Vec<Symbol> = sig.symbols().map(|(f, _)| f.clone()).collect();
    let n = rng.random_range(1..=max_rules);
    let mut rules = Vec::new();
    for _ in 0..n {
        let f = roots.choose(rng).unwrap().clone();
        let d = sig.decl(&f).unwrap().clone();
        let mut next = 0;
        let lhs = Term::App(
            f,
            d.args
                .iter()
                .map(|s| random_linear(rng, &sig, s, 2, &mut next))
                .collect(),
        );
        let vars: Vec<Var> = lhs.vars().into_iter().collect();
        let same: Vec<&Var> = vars.iter().filter(|v| v.sort == d.result).collect();
        let rhs = if !same.is_empty() && rng.random_bool(0.25) {
            Term::Var((*same.choose(rng).unwrap()).clone())
        } else {
            random_term(rng, &sig, &d.result, 3, &vars)
        };
        if lhs != rhs {
            rules.push(Rule::new(rules.len() as u32 + 1, lhs, rhs));
        }
    }
    if rules.is_empty() {
        let a = Symbol::new("a");
        let s = sig.result_sort(&a).unwrap().clone();
        let f = roots.iter().find(|f| sig.arity(f).unwrap() > 0).cloned();
        if let Some(f) = f {
            let d = sig.decl(&f).unwrap().clone();
            let args = d.args.iter().map(|s| random_ground(rng, &sig, s, 0)).collect();
            let rhs = random_ground(rng, &sig, &d.result, 0);
            rules.push(Rule::new(1, Term::App(f, args), rhs));
        } else {
            rules.push(Rule::new(1, Term::App(a, vec![]), random_ground(rng, &sig, &s, 0)));
        }
    }
    Mtrs::new(sig, rules).expect("generated rules are well-formed")
}

// Reference implementations, written directly from the definitions with
// naive fixpoint iteration.

fn subterms(t: &Term) -> Vec<&Term> {
    let mut out = vec![t];
    if let Term::App(_, args) = t {
        for a in args {
            out.extend(subterms(a));
        }
    }
    out
}

/// Basic formative rules: iterate the defining clauses until nothing changes.
pub fn oracle_fr_base(sig: &Signature, seeds: &[&Term], rules: &[Rule]) -> BTreeSet<RuleId> {
    let mut terms: Vec<Term> = seeds.iter().map(|t| (*t).clone()).collect();
    let mut out = BTreeSet::new();
    loop {
        let before = out.len();
        for t in terms.clone() {
            if !t.is_linear() {
                out.extend(rules.iter().map(|r| r.id));
                continue;
            }
            for sub in subterms(&t) {
                if let Term::App(f, _) = sub {
                    for r in rules {
                        if has_shape(sig, &r.rhs, f) {
                            out.insert(r.id);
                        }
                    }
                }
            }
        }
        for r in rules {
            if out.contains(&r.id) && !terms.contains(&r.lhs) {
                terms.push(r.lhs.clone());
            }
        }
        if out.len() == before {
            let all_in = rules
                .iter()
                .filter(|r| out.contains(&r.id))
                .all(|r| terms.contains(&r.lhs));
            if all_in {
                return out;
            }
        }
    }
}

/// Usable rules with every argument regarded.
pub fn oracle_ur(seeds: &[&Term], rules: &[Rule]) -> BTreeSet<RuleId> {
    let mut symbols: BTreeSet<Symbol> = BTreeSet::new();
    for t in seeds {
        for s in subterms(t) {
            if let Term::App(f, _) = s {
                symbols.insert(f.clone());
            }
        }
    }
    loop {
        let before = symbols.len();
        for r in rules {
            if r.lhs.root().is_some_and(|f| symbols.contains(f)) {
                for s in subterms(&r.rhs) {
                    if let Term::App(f, _) = s {
                        symbols.insert(f.clone());
                    }
                }
            }
        }
        if symbols.len() == before {
            break;
        }
    }
    rules
        .iter()
        .filter(|r| r.lhs.root().is_some_and(|f| symbols.contains(f)))
        .map(|r| r.id)
        .collect()
}

fn replace(t: &Term, pos: &[usize], new: Term) -> Option<Term> {
    match pos.split_first() {
        None => Some(new),
        Some((&i, rest)) => match t {
            Term::App(f, args) if i < args.len() => {
                let mut args = args.clone();
                args[i] = replace(&args[i], rest, new)?;
                Some(Term::App(f.clone(), args))
            }
            _ => None,
        },
    }
}

fn at<'a>(t: &'a Term, pos: &[usize]) -> Option<&'a Term> {
    match pos.split_first() {
        None => Some(t),
        Some((&i, rest)) => match t {
            Term::App(_, args) => at(args.get(i)?, rest),
            _ => None,
        },
    }
}

/// The terms of a trace, checking every step by matching its rule afresh.
pub fn oracle_replay(trace: &ReductionTrace, rules: &[Rule]) -> Option<Vec<Term>> {
    let mut cur = trace.start.clone();
    let mut out = vec![cur.clone()];
    for step in &trace.steps {
        let rule = rules
            .iter()
            .find(|r| r.id == step.rule.id && r.lhs == step.rule.lhs && r.rhs == step.rule.rhs)?;
        let redex = at(&cur, &step.position.0)?;
        let sigma = match_term(&rule.lhs, redex)?;
        cur = replace(&cur, &step.position.0, sigma.apply(&rule.rhs))?;
        out.push(cur.clone());
    }
    Some(out)
}

/// A trace given by its terms and the (position, rule) of each step.
#[derive(Clone)]
pub struct Steps {
    pub terms: Vec<Term>,
    pub steps: Vec<(Vec<usize>, Rule)>,
}

impl Steps {
    pub fn of(trace: &ReductionTrace, rules: &[Rule]) -> Option<Steps> {
        Some(Steps {
            terms: oracle_replay(trace, rules)?,
            steps: trace
                .steps
                .iter()
                .map(|s| (s.position.0.clone(), s.rule.clone()))
                .collect(),
        })
    }
}

/// Is the reduction a formative `ℓ`-reduction? Follows the four cases of
/// the definition, trying every root step as the split point.
pub fn oracle_formative(r: &Steps, l: &Term) -> bool {
    let end = r.terms.last().unwrap();
    if match_term(l, end).is_none() {
        return false;
    }
    if !l.is_linear() {
        return true;
    }
    let (f, ls) = match l {
        Term::Var(_) => return r.steps.is_empty(),
        Term::App(f, ls) => (f, ls),
    };
    let arguments_only = |from: usize| -> bool {
        let start = &r.terms[from];
        let Term::App(g, ss) = start else { return false };
        if g != f || ss.len() != ls.len() || r.steps[from..].iter().any(|(p, _)| p.is_empty()) {
            return false;
        }
        (0..ls.len()).all(|i| {
            let mut terms = vec![ss[i].clone()];
            let mut steps = Vec::new();
            for (k, (p, rule)) in r.steps.iter().enumerate().skip(from) {
                if p[0] == i {
                    steps.push((p[1..].to_vec(), rule.clone()));
                    terms.push(r.terms[k + 1].args()[i].clone());
                }
            }
            oracle_formative(&Steps { terms, steps }, &ls[i])
        })
    };
    if arguments_only(0) {
        return true;
    }
    r.steps.iter().enumerate().any(|(k, (p, rule))| {
        if !p.is_empty() {
            return false;
        }
        let prefix = Steps {
            terms: r.terms[..=k].to_vec(),
            steps: r.steps[..k].to_vec(),
        };
        oracle_formative(&prefix, &rule.lhs) && arguments_only(k + 1)
    })
}

/// Reads an unsorted term such as `Big#(x,Cons(y,z))`. Identifiers that
/// start with `x`, `y` or `z` are variables.
pub fn t(src: &str) -> Term {
    fn go(s: &[u8], i: &mut usize) -> Term {
        let start = *i;
        while *i < s.len() && !b"(),".contains(&s[*i]) {
            *i += 1;
        }
        let name = std::str::from_utf8(&s[start..*i]).unwrap().trim().to_string();
        if *i < s.len() && s[*i] == b'(' {
            *i += 1;
            let mut args = Vec::new();
            loop {
                args.push(go(s, i));
                let c = s[*i];
                *i += 1;
                if c == b')' {
                    break;
                }
            }
            return Term::app(&name, args);
        }
        if name.starts_with(['x', 'y', 'z']) {
            Term::var(&name, &Sort::unsorted())
        } else {
            Term::constant(&name)
        }
    }
    let compact: String = src.chars().filter(|c| !c.is_whitespace()).collect();
    go(compact.as_bytes(), &mut 0)
}

/// An unsorted rule from `"l -> r"`.
pub fn rule(id: u32, src: &str) -> Rule {
    let (l, r) = src.split_once("->").unwrap();
    Rule::new(id, t(l), t(r))
}

/// Equal up to renaming, after forgetting sorts.
pub fn same_rule(a: &Rule, b: &Rule) -> bool {
    a.map_terms(Term::collapse_sorts)
        .is_variant_of(&b.map_terms(Term::collapse_sorts))
}

/// Same multiset of rules up to renaming, ignoring ids.
pub fn same_rules(found: &[Rule], expected: &[Rule]) -> bool {
    found.len() == expected.len()
        && expected.iter().all(|e| found.iter().any(|f| same_rule(f, e)))
        && found.iter().all(|f| expected.iter().any(|e| same_rule(f, e)))
}
