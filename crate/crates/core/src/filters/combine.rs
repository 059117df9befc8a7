use std::collections::BTreeSet;

use crate::rewriting::{DerivedKind, Provenance, Rule, RuleId};
use crate::terms::{Signature, Sort, SortDecl, Symbol, Term, Var};

/// The projection rules `cι(x,y) → x` and `cι(x,y) → y` for every sort `ι`
/// other than `dpsort`.
#[derive(Debug, Clone)]
pub struct CeRules {
    /// The input signature extended with the `cι` symbols (unfilterable).
    pub signature: Signature,
    pub rules: Vec<Rule>,
}

/// Builds the `cι` rules, numbering them from `first_id`.
pub fn ce_rules(sig: &Signature, first_id: u32) -> CeRules {
    let mut signature = sig.clone();
    let mut rules = Vec::new();
    let mut id = first_id;
    for sort in sig.sorts().into_iter().filter(|s| !s.is_dpsort()) {
        let c = signature.fresh_symbol(&format!("c_{sort}"));
        signature
            .declare(c.clone(), SortDecl::new(vec![sort.clone(), sort.clone()], sort.clone()))
            .expect("fresh symbol");
        signature.set_unfilterable(c.clone());
        let x = Term::var("x", &sort);
        let y = Term::var("y", &sort);
        let lhs = Term::App(c, vec![x.clone(), y.clone()]);
        for rhs in [x, y] {
            rules.push(Rule::new(id, lhs.clone(), rhs).with_provenance(Provenance::Derived {
                from: Vec::new(),
                kind: DerivedKind::Epsilon,
            }));
            id += 1;
        }
    }
    CeRules { signature, rules }
}

/// A rule system split into projections and non-collapsing rules, such that
/// a non-collapsing step never has to be followed by a collapsing one at the
/// same position.
#[derive(Debug, Clone)]
pub struct CombinedSystem {
    /// Projection rules `f(x1,…,xn) → xi`.
    pub cl: Vec<Rule>,
    /// Non-collapsing rules, including every non-collapsing input rule.
    pub nc: Vec<Rule>,
    /// Collapsing rules that were derived along the way but are neither
    /// projections nor part of the result.
    pub discarded: Vec<Rule>,
}

impl CombinedSystem {
    /// `Cl ∪ NC`.
    pub fn rules(&self) -> Vec<Rule> {
        self.cl.iter().chain(&self.nc).cloned().collect()
    }
}

fn projection(f: &Symbol, arity: usize, i: usize) -> (Term, Term) {
    let o = Sort::unsorted();
    let xs: Vec<Term> = (1..=arity).map(|k| Term::var(&format!("x{k}"), &o)).collect();
    (Term::App(f.clone(), xs.clone()), xs[i].clone())
}

/// `Some((f, i))` if the rule is the projection `f(x1..xn) → xi` up to renaming.
fn as_projection(r: &Rule) -> Option<(Symbol, usize)> {
    let (f, args) = match &r.lhs {
        Term::App(f, args) => (f, args),
        Term::Var(_) => return None,
    };
    let x = r.rhs.as_var()?;
    if !args.iter().all(Term::is_var) || !r.lhs.is_linear() {
        return None;
    }
    let i = args.iter().position(|a| a.as_var() == Some(x))?;
    Some((f.clone(), i))
}

struct Builder {
    x: Vec<Rule>,
    next_id: u32,
}

impl Builder {
    /// Adds `lhs → rhs` unless a variant is present; returns whether it was new.
    fn add(&mut self, lhs: Term, rhs: Term, from: Vec<RuleId>, kind: DerivedKind) -> bool {
        let candidate = Rule::new(self.next_id, lhs, rhs);
        if self.x.iter().any(|r| r.is_variant_of(&candidate)) {
            return false;
        }
        self.next_id += 1;
        self.x
            .push(candidate.with_provenance(Provenance::Derived { from, kind }));
        true
    }

    fn has_projection(&self, f: &Symbol, i: usize) -> bool {
        self.x
            .iter()
            .any(|r| as_projection(r).is_some_and(|(g, j)| &g == f && j == i))
    }
}

/// Saturates `rules` (read with all sorts collapsed to one) under:
/// (a) a collapsing rule whose variable sits below argument `i` of some
/// `f(…)` in its left-hand side yields the projection `f(x1..xn) → xi`;
/// (b) a rule `ℓ → f(r1..rn)` together with the projection on `i` yields
/// `ℓ → ri`. New rules are numbered from `first_id`; variants are merged.
pub fn combine_rules(rules: &[Rule], first_id: u32) -> CombinedSystem {
    let mut b = Builder {
        x: rules.iter().map(|r| r.map_terms(Term::collapse_sorts)).collect(),
        next_id: first_id,
    };
    loop {
        let mut changed = false;
        let mut k = 0;
        while k < b.x.len() {
            let r = b.x[k].clone();
            k += 1;
            match &r.rhs {
                Term::Var(x) => {
                    let x = Var::new(&x.name, Sort::unsorted());
                    for sub in r.lhs.subterms() {
                        if let Term::App(f, ls) = sub {
                            for (i, li) in ls.iter().enumerate() {
                                if li.contains_var(&x) && !b.has_projection(f, i) {
                                    let (pl, pr) = projection(f, ls.len(), i);
                                    changed |= b.add(pl, pr, vec![r.id], DerivedKind::Projection);
                                }
                            }
                        }
                    }
                }
                Term::App(f, rs) => {
                    for (i, ri) in rs.iter().enumerate() {
                        if b.has_projection(f, i) {
                            let proj =
                                b.x.iter()
                                    .find(|p| as_projection(p).is_some_and(|(g, j)| &g == f && j == i))
                                    .map(|p| p.id)
                                    .unwrap();
                            changed |= b.add(r.lhs.clone(), ri.clone(), vec![r.id, proj], DerivedKind::Composite);
                        }
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }
    let mut out = CombinedSystem {
        cl: Vec::new(),
        nc: Vec::new(),
        discarded: Vec::new(),
    };
    let mut seen = BTreeSet::new();
    for r in b.x {
        if !seen.insert(r.id) {
            continue;
        }
        if as_projection(&r).is_some() {
            out.cl.push(r);
        } else if r.is_collapsing() {
            out.discarded.push(r);
        } else {
            out.nc.push(r);
        }
    }
    out
}
