//! Rule subsets: usable rules, formative rules, split-formative rules, and
//! the combined system they are computed over.
//!
//! Every function here is a least fixpoint, computed by a worklist over
//! terms. The result lists the chosen rule ids and, for each, the clause and
//! term that pulled it in.

mod combine;

pub use combine::{ce_rules, combine_rules, CeRules, CombinedSystem};

use std::collections::{BTreeSet, HashSet, VecDeque};
use std::fmt;

use crate::orders::ArgumentFiltering;
use crate::rewriting::{Rule, RuleId};
use crate::terms::{rename_apart, tcap, unify, FreshVars, Signature, Symbol, Term};

/// Why a rule was included.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Clause {
    /// The term is not linear, so everything is included.
    NonLinear,
    /// The rule's left-hand side has the term's root symbol.
    Root,
    /// The rule's right-hand side has the shape of the term's root symbol.
    Shape,
    /// The right-hand side is rooted by the term's root symbol.
    RootForm,
    /// The capped subterm unifies with the rule (or vice versa).
    Unifies,
    /// Collapsing rules that are included unconditionally or by sort.
    Collapsing,
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Clause::NonLinear => "non-linear term",
            Clause::Root => "root symbol",
            Clause::Shape => "right-hand side has the shape",
            Clause::RootForm => "right-hand side has the root",
            Clause::Unifies => "unifies after capping",
            Clause::Collapsing => "collapsing rule",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Derivation {
    pub rule: RuleId,
    pub clause: Clause,
    pub term: Term,
}

/// Rule ids picked by one of the computations, with the saturation trace.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RuleSetResult {
    pub ids: BTreeSet<RuleId>,
    pub trace: Vec<Derivation>,
}

impl RuleSetResult {
    /// The chosen rules, in the order of `all`.
    pub fn rules(&self, all: &[Rule]) -> Vec<Rule> {
        all.iter().filter(|r| self.ids.contains(&r.id)).cloned().collect()
    }

    pub fn contains(&self, id: u32) -> bool {
        self.ids.contains(&RuleId(id))
    }

    pub fn id_list(&self) -> Vec<u32> {
        self.ids.iter().map(|r| r.0).collect()
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Follow {
    Lhs,
    Rhs,
    LhsUnlessCollapsing,
}

struct Worklist<'a> {
    rules: &'a [Rule],
    follow: Follow,
    result: RuleSetResult,
    queue: VecDeque<Term>,
    seen: HashSet<Term>,
}

impl<'a> Worklist<'a> {
    fn new(seeds: &[&Term], rules: &'a [Rule], follow: Follow) -> Self {
        let mut w = Worklist {
            rules,
            follow,
            result: RuleSetResult::default(),
            queue: VecDeque::new(),
            seen: HashSet::new(),
        };
        for t in seeds {
            w.visit(t);
        }
        w
    }

    fn visit(&mut self, t: &Term) {
        if self.seen.insert(t.canonical()) {
            self.queue.push_back(t.clone());
        }
    }

    fn include(&mut self, rule: &Rule, clause: Clause, term: &Term) {
        if !self.result.ids.insert(rule.id) {
            return;
        }
        self.result.trace.push(Derivation {
            rule: rule.id,
            clause,
            term: term.clone(),
        });
        match self.follow {
            Follow::Lhs => self.visit(&rule.lhs),
            Follow::Rhs => self.visit(&rule.rhs),
            Follow::LhsUnlessCollapsing => {
                if !rule.is_collapsing() {
                    self.visit(&rule.lhs)
                }
            }
        }
    }

    fn include_all(&mut self, term: &Term) {
        for r in self.rules {
            self.include(r, Clause::NonLinear, term);
        }
    }

    fn run(mut self, mut step: impl FnMut(&mut Self, &Term)) -> RuleSetResult {
        while let Some(t) = self.queue.pop_front() {
            step(&mut self, &t);
        }
        self.result
    }

    fn regarded_args(&mut self, f: &Symbol, args: &[Term], pi: Option<&ArgumentFiltering>) {
        for (i, a) in args.iter().enumerate() {
            if pi.is_none_or(|p| p.regards(f, i)) {
                self.visit(a);
            }
        }
    }
}

/// Does `f(TCap(s1),…,TCap(sn))` unify with `target`? The caps are taken
/// with respect to `rules`; `target` is renamed apart first.
fn capped_unifies(sig: &Signature, f: &Symbol, args: &[Term], target: &Term, rules: &[Rule]) -> bool {
    let lhss: Vec<&Term> = rules.iter().map(|r| &r.lhs).collect();
    let mut fresh = FreshVars::new();
    let capped: Vec<Term> = args.iter().map(|a| tcap(sig, a, &lhss, &mut fresh)).collect();
    let target = rename_apart(&[target], &mut fresh).remove(0);
    unify(sig, &Term::App(f.clone(), capped), &target).is_some()
}

/// `t` has shape `f`: it is rooted by `f`, or a variable of `f`'s result sort.
fn has_shape(sig: &Signature, t: &Term, f: &Symbol) -> bool {
    crate::terms::has_shape(sig, t, f)
}

/// Usable rules: symbols reachable through regarded argument positions of
/// the seeds, closed under right-hand sides.
pub fn ur(seeds: &[&Term], rules: &[Rule], pi: &ArgumentFiltering) -> RuleSetResult {
    Worklist::new(seeds, rules, Follow::Rhs).run(|w, t| {
        if let Term::App(f, args) = t {
            w.regarded_args(f, args, Some(pi));
            for r in w.rules {
                if r.lhs.root() == Some(f) {
                    w.include(r, Clause::Root, t);
                }
            }
        }
    })
}

/// Usable rules where a rule counts only if the capped subterm unifies with
/// its left-hand side.
pub fn ur_tcap(sig: &Signature, seeds: &[&Term], rules: &[Rule], pi: &ArgumentFiltering) -> RuleSetResult {
    Worklist::new(seeds, rules, Follow::Rhs).run(|w, t| {
        if let Term::App(f, args) = t {
            w.regarded_args(f, args, Some(pi));
            for r in w.rules {
                if r.lhs.root() == Some(f) && capped_unifies(sig, f, args, &r.lhs, w.rules) {
                    w.include(r, Clause::Unifies, t);
                }
            }
        }
    })
}

/// Basic formative rules: rules whose right-hand side has the shape of a
/// symbol in the seeds, closed under left-hand sides.
pub fn fr_base(sig: &Signature, seeds: &[&Term], rules: &[Rule]) -> RuleSetResult {
    fr_base_impl(sig, seeds, rules, None)
}

/// As [`fr_base`], recursing only into regarded arguments.
pub fn fr_base_filtered(sig: &Signature, seeds: &[&Term], rules: &[Rule], pi: &ArgumentFiltering) -> RuleSetResult {
    fr_base_impl(sig, seeds, rules, Some(pi))
}

fn fr_base_impl(sig: &Signature, seeds: &[&Term], rules: &[Rule], pi: Option<&ArgumentFiltering>) -> RuleSetResult {
    Worklist::new(seeds, rules, Follow::Lhs).run(|w, t| {
        if !t.is_linear() {
            return w.include_all(t);
        }
        if let Term::App(f, args) = t {
            w.regarded_args(f, args, pi);
            for r in w.rules {
                if has_shape(sig, &r.rhs, f) {
                    w.include(r, Clause::Shape, t);
                }
            }
        }
    })
}

/// Formative rules with capping: a non-collapsing rule `ℓ → f(r1..rn)` is
/// included only if `f(TCap(r1),…,TCap(rn))` unifies with the term;
/// collapsing rules are included by sort.
pub fn fr_tcap(sig: &Signature, seeds: &[&Term], rules: &[Rule], pi: Option<&ArgumentFiltering>) -> RuleSetResult {
    Worklist::new(seeds, rules, Follow::Lhs).run(|w, t| {
        if !t.is_linear() {
            return w.include_all(t);
        }
        if let Term::App(f, args) = t {
            w.regarded_args(f, args, pi);
            let sort = sig.result_sort(f);
            for r in w.rules {
                match &r.rhs {
                    Term::Var(x) => {
                        if Some(&x.sort) == sort {
                            w.include(r, Clause::Collapsing, t);
                        }
                    }
                    Term::App(g, rargs) => {
                        if g == f && capped_unifies(sig, g, rargs, t, w.rules) {
                            w.include(r, Clause::Unifies, t);
                        }
                    }
                }
            }
        }
    })
}

/// Split-formative rules over a combined system `a`: every collapsing rule
/// is included, and a rule `ℓ → f(…)` is included for each symbol `f` met;
/// only non-collapsing rules are closed under left-hand sides. With `tcap`
/// the root test becomes a unification test against the whole term.
pub fn sr(sig: &Signature, seeds: &[&Term], a: &[Rule], pi: Option<&ArgumentFiltering>, tcap: bool) -> RuleSetResult {
    let mut w = Worklist::new(seeds, a, Follow::LhsUnlessCollapsing);
    if let Some(first) = seeds.first() {
        for r in a.iter().filter(|r| r.is_collapsing()) {
            w.include(r, Clause::Collapsing, first);
        }
    }
    w.run(|w, t| {
        if !t.is_linear() {
            return w.include_all(t);
        }
        if let Term::App(f, args) = t {
            w.regarded_args(f, args, pi);
            for r in w.rules {
                if let Term::App(g, rargs) = &r.rhs {
                    if g != f {
                        continue;
                    }
                    if !tcap {
                        w.include(r, Clause::RootForm, t);
                    } else if capped_unifies(sig, g, rargs, t, w.rules) {
                        w.include(r, Clause::Unifies, t);
                    }
                }
            }
        }
    })
}

pub fn lhss(rules: &[Rule]) -> Vec<&Term> {
    rules.iter().map(|r| &r.lhs).collect()
}

pub fn rhss(rules: &[Rule]) -> Vec<&Term> {
    rules.iter().map(|r| &r.rhs).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rewriting::fixtures::*;
    use crate::terms::{Sort, SortDecl};

    fn big_pair_lhs() -> Term {
        app("Big#", vec![nat("x"), app("Cons", vec![nat("y"), list("z")])])
    }

    fn running_with_marks() -> (Signature, Vec<Rule>) {
        let m = running();
        let mut sig = m.signature.clone();
        for f in ["Big", "Ack", "Upd", "Rnd", "Run"] {
            sig.mark(&Symbol::new(f));
        }
        (sig, m.rules)
    }

    fn q(rules: &[Rule]) -> Vec<Rule> {
        rules.iter().filter(|r| ![4, 9].contains(&r.id.0)).cloned().collect()
    }

    #[test]
    fn fr_base_of_big_pair() {
        let (sig, rules) = running_with_marks();
        let t = big_pair_lhs();
        assert_eq!(fr_base(&sig, &[&t], &q(&rules)).id_list(), [8]);
        assert_eq!(fr_tcap(&sig, &[&t], &q(&rules), None).id_list(), [8]);
        assert!(fr_base(&sig, &[&nat("x")], &rules).ids.is_empty());
    }

    #[test]
    fn fr_base_filtered_skips_unregarded() {
        let (sig, rules) = running_with_marks();
        let pi = ArgumentFiltering::trivial().with("Big#", &[1]);
        assert!(fr_base_filtered(&sig, &[&big_pair_lhs()], &rules, &pi).ids.is_empty());
    }

    #[test]
    fn nonlinear_term_takes_everything() {
        let o = Sort::unsorted();
        let x = Term::var("x", &o);
        let rules = vec![Rule::new(1, c("a"), c("b"))];
        let mut sig = Signature::new();
        for (f, n) in [("a", 0), ("b", 0), ("f#", 2)] {
            sig.declare(Symbol::new(f), SortDecl::unsorted(n)).unwrap();
        }
        let t = app("f#", vec![x.clone(), x]);
        assert_eq!(fr_base(&sig, &[&t], &rules).id_list(), [1]);
    }

    #[test]
    fn usable_rules_examples() {
        let (_, rules) = running_with_marks();
        let o = Sort::unsorted();
        let x = Term::var("x", &o);
        assert!(ur(&[&x], &rules, &ArgumentFiltering::trivial()).ids.is_empty());
        let gx = vec![Rule::new(1, app("g", vec![x.clone()]), x.clone())];
        assert!(ur(&[&app("f", vec![c("a")])], &gx, &ArgumentFiltering::trivial())
            .ids
            .is_empty());
    }

    #[test]
    fn usable_rules_with_caps() {
        let o = Sort::unsorted();
        let x = Term::var("x", &o);
        let mut sig = Signature::new();
        for (f, n) in [("f", 1), ("O", 0), ("S", 1), ("a", 0), ("b", 0), ("c", 0)] {
            sig.declare(Symbol::new(f), SortDecl::unsorted(n)).unwrap();
        }
        let rules = vec![
            Rule::new(1, app("f", vec![c("O")]), c("a")),
            Rule::new(2, app("f", vec![app("S", vec![x])]), c("b")),
            Rule::new(3, c("a"), c("c")),
        ];
        let t = app("f", vec![c("O")]);
        let pi = ArgumentFiltering::trivial();
        assert_eq!(ur_tcap(&sig, &[&t], &rules, &pi).id_list(), [1, 3]);
        assert_eq!(ur(&[&t], &rules, &pi).id_list(), [1, 2, 3]);
    }

    #[test]
    fn fr_tcap_rejects_constructor_clash() {
        let o = Sort::unsorted();
        let x = Term::var("x", &o);
        let mut sig = Signature::new();
        for (f, n) in [("f", 1), ("O", 0), ("S", 1), ("g", 0)] {
            sig.declare(Symbol::new(f), SortDecl::unsorted(n)).unwrap();
        }
        let rules = vec![Rule::new(1, c("g"), app("f", vec![c("O")]))];
        let t = app("f", vec![app("S", vec![x])]);
        assert!(fr_tcap(&sig, &[&t], &rules, None).ids.is_empty());
        assert_eq!(fr_base(&sig, &[&t], &rules).id_list(), [1]);
    }

    #[test]
    fn sr_of_constant_a() {
        let o = Sort::unsorted();
        let x = Term::var("x", &o);
        let mut sig = Signature::new();
        for (f, n) in [("f", 1), ("g", 1), ("a", 0)] {
            sig.declare(Symbol::new(f), SortDecl::unsorted(n)).unwrap();
        }
        let rules = vec![
            Rule::new(1, app("f", vec![x.clone()]), app("g", vec![x.clone()])),
            Rule::new(2, app("g", vec![x.clone()]), x.clone()),
        ];
        assert_eq!(sr(&sig, &[&c("a")], &rules, None, false).id_list(), [2]);
        assert_eq!(sr(&sig, &[&c("a")], &rules, None, true).id_list(), [2]);
        assert_eq!(sr(&sig, &[&x], &rules, None, false).id_list(), [2]);
    }
}
