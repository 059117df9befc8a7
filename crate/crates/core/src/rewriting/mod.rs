//! Rules, rewrite systems and the rewrite relations over them.

mod formative;
mod search;
mod trace;

pub use formative::{
    find_formative, find_formative_reduction_to, formativize, is_formative_reduction, FormativeError, FormativeWitness,
    FoundFormative,
};
pub use search::{bounded_reductions, reachable, shortest_trace_to, BoundedReductions, Reachable, SearchLimits};
pub use trace::{ReductionTrace, Step, TraceError};

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::terms::{
    canonical_many, match_into, match_term, sort_of, Position, Signature, SortError, Substitution, Symbol, Term,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct RuleId(pub u32);

impl fmt::Display for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

/// How a derived rule came about.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DerivedKind {
    /// Projection `f(x1..xn) → xi` split off a collapsing rule.
    Projection,
    /// A rule `ℓ → ri` obtained by following `ℓ → f(r1..rn)` with a projection.
    Composite,
    /// `cι(x,y) → x` / `cι(x,y) → y`.
    Epsilon,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Provenance {
    User,
    Pair { from: RuleId },
    Derived { from: Vec<RuleId>, kind: DerivedKind },
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Rule {
    pub id: RuleId,
    pub lhs: Term,
    pub rhs: Term,
    pub provenance: Provenance,
}

impl Rule {
    pub fn new(id: u32, lhs: Term, rhs: Term) -> Self {
        Rule {
            id: RuleId(id),
            lhs,
            rhs,
            provenance: Provenance::User,
        }
    }

    pub fn with_provenance(mut self, provenance: Provenance) -> Self {
        self.provenance = provenance;
        self
    }

    pub fn is_collapsing(&self) -> bool {
        self.rhs.is_var()
    }

    pub fn is_left_linear(&self) -> bool {
        self.lhs.is_linear()
    }

    /// `Var(rhs) ⊆ Var(lhs)`.
    pub fn has_variable_condition(&self) -> bool {
        self.rhs.vars().is_subset(&self.lhs.vars())
    }

    /// Equal up to a consistent renaming of variables.
    pub fn is_variant_of(&self, other: &Rule) -> bool {
        canonical_many(&[&self.lhs, &self.rhs]) == canonical_many(&[&other.lhs, &other.rhs])
    }

    pub fn map_terms(&self, f: impl Fn(&Term) -> Term) -> Rule {
        Rule {
            id: self.id,
            lhs: f(&self.lhs),
            rhs: f(&self.rhs),
            provenance: self.provenance.clone(),
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -> {}", self.lhs, self.rhs)
    }
}

impl fmt::Debug for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {} -> {}", self.id, self.lhs, self.rhs)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RuleError {
    #[error("rule {0}: left-hand side is a variable")]
    VariableLhs(RuleId),
    #[error("rule {id}: variables {vars} of the right-hand side do not occur on the left")]
    VariableCondition { id: RuleId, vars: String },
    #[error("rule {id}: {source}")]
    IllSorted {
        id: RuleId,
        #[source]
        source: SortError,
    },
    #[error("rule {id}: sides have different sorts ({lhs} vs {rhs})")]
    SortMismatch { id: RuleId, lhs: String, rhs: String },
    #[error("duplicate rule id {0}")]
    DuplicateId(RuleId),
}

/// Checks the conditions every input rule must satisfy.
pub fn check_rule(sig: &Signature, rule: &Rule) -> Result<(), RuleError> {
    if rule.lhs.is_var() {
        return Err(RuleError::VariableLhs(rule.id));
    }
    let ls = sort_of(sig, &rule.lhs).map_err(|source| RuleError::IllSorted { id: rule.id, source })?;
    let rs = sort_of(sig, &rule.rhs).map_err(|source| RuleError::IllSorted { id: rule.id, source })?;
    if ls != rs {
        return Err(RuleError::SortMismatch {
            id: rule.id,
            lhs: ls.to_string(),
            rhs: rs.to_string(),
        });
    }
    if !rule.has_variable_condition() {
        let extra: Vec<String> = rule
            .rhs
            .vars()
            .difference(&rule.lhs.vars())
            .map(|v| v.to_string())
            .collect();
        return Err(RuleError::VariableCondition {
            id: rule.id,
            vars: extra.join(", "),
        });
    }
    Ok(())
}

/// A many-sorted term rewrite system.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mtrs {
    pub signature: Signature,
    pub rules: Vec<Rule>,
}

impl Mtrs {
    pub fn new(signature: Signature, rules: Vec<Rule>) -> Result<Self, RuleError> {
        let mut seen = BTreeSet::new();
        for r in &rules {
            if !seen.insert(r.id) {
                return Err(RuleError::DuplicateId(r.id));
            }
            check_rule(&signature, r)?;
        }
        Ok(Mtrs { signature, rules })
    }

    pub fn defined_symbols(&self) -> BTreeSet<Symbol> {
        defined_symbols(&self.rules)
    }

    pub fn rule(&self, id: RuleId) -> Option<&Rule> {
        self.rules.iter().find(|r| r.id == id)
    }

    pub fn is_left_linear(&self) -> bool {
        self.rules.iter().all(Rule::is_left_linear)
    }
}

pub fn defined_symbols(rules: &[Rule]) -> BTreeSet<Symbol> {
    rules.iter().filter_map(|r| r.lhs.root().cloned()).collect()
}

/// The rules of `rules` whose ids are in `ids`, in their original order.
pub fn select(rules: &[Rule], ids: &BTreeSet<RuleId>) -> Vec<Rule> {
    rules.iter().filter(|r| ids.contains(&r.id)).cloned().collect()
}

pub fn ids(rules: &[Rule]) -> BTreeSet<RuleId> {
    rules.iter().map(|r| r.id).collect()
}

/// The smallest id strictly above every id in `rules`.
pub fn next_rule_id<'a>(rules: impl IntoIterator<Item = &'a Rule>) -> u32 {
    rules.into_iter().map(|r| r.id.0 + 1).max().unwrap_or(1)
}

/// All one-step successors of `t`, in pre-order of positions and then rule order.
///
/// Right-hand-side variables that do not occur on the left (possible only
/// for filtered rules) are left uninstantiated.
pub fn reducts(t: &Term, rules: &[Rule]) -> Vec<(Term, Step)> {
    let mut out = Vec::new();
    for (pos, sub) in t.positions() {
        for rule in rules {
            if let Some(subst) = match_term(&rule.lhs, sub) {
                let result = t.replace_at(&pos.0, subst.apply(&rule.rhs));
                out.push((
                    result,
                    Step {
                        position: pos.clone(),
                        rule: rule.clone(),
                        subst,
                    },
                ));
            }
        }
    }
    out
}

pub fn is_normal_form(t: &Term, rules: &[Rule]) -> bool {
    t.subterms()
        .into_iter()
        .all(|sub| rules.iter().all(|r| match_term(&r.lhs, sub).is_none()))
}

/// One-step successors whose contracted redex has only normal-form arguments.
pub fn innermost_reducts(t: &Term, rules: &[Rule]) -> Vec<(Term, Step)> {
    reducts(t, rules)
        .into_iter()
        .filter(|(_, step)| {
            let redex = t.subterm_at(&step.position).expect("step position exists");
            redex.args().iter().all(|a| is_normal_form(a, rules))
        })
        .collect()
}

/// Decides `s →R t` for a single step, also for rules whose right-hand side
/// has extra variables (those may be instantiated arbitrarily).
pub fn is_one_step(s: &Term, t: &Term, rules: &[Rule]) -> Option<Step> {
    one_step_at(s, t, rules, Position::root())
}

fn one_step_at(s: &Term, t: &Term, rules: &[Rule], pos: Position) -> Option<Step> {
    for rule in rules {
        let mut subst = Substitution::new();
        if match_into(&rule.lhs, s, &mut subst) && match_into(&rule.rhs, t, &mut subst) {
            let subst = subst.restrict(rule.lhs.vars().iter());
            return Some(Step {
                position: pos,
                rule: rule.clone(),
                subst,
            });
        }
    }
    match (s, t) {
        (Term::App(f, ss), Term::App(g, ts)) if f == g && ss.len() == ts.len() => {
            let diff: Vec<usize> = (0..ss.len()).filter(|&i| ss[i] != ts[i]).collect();
            match diff.as_slice() {
                [] => (0..ss.len()).find_map(|i| one_step_at(&ss[i], &ts[i], rules, pos.child(i))),
                [i] => one_step_at(&ss[*i], &ts[*i], rules, pos.child(*i)),
                _ => None,
            }
        }
        _ => None,
    }
}


#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;
    use crate::terms::{Sort, SortDecl};

    fn rule_ids(v: &[(Term, Step)]) -> Vec<u32> {
        v.iter().map(|(_, s)| s.rule.id.0).collect()
    }

    #[test]
    fn running_system_is_valid() {
        let m = running();
        assert_eq!(m.rules.len(), 11);
        assert!(m.is_left_linear());
        let defined: Vec<String> = m.defined_symbols().iter().map(|s| s.to_string()).collect();
        assert_eq!(defined, ["Ack", "Big", "Rnd", "Run", "Upd"]);
    }

    #[test]
    fn reducts_of_rnd() {
        let m = running();
        let t = app("Rnd", vec![app("S", vec![c("O")])]);
        let r = reducts(&t, &m.rules);
        let results: Vec<String> = r.iter().map(|(t, _)| t.to_string()).collect();
        assert!(results.contains(&"S(O)".to_string()));
        assert!(results.contains(&"Rnd(O)".to_string()));
        assert_eq!(rule_ids(&r), [1, 2]);
        assert!(reducts(&c("O"), &m.rules).is_empty());
        let u = reducts(&app("Upd", vec![c("Nil")]), &m.rules);
        assert_eq!(u.len(), 1);
        assert_eq!(u[0].0, c("Nil"));
        assert_eq!(u[0].1.rule.id, RuleId(3));
    }

    #[test]
    fn innermost_examples() {
        let m = running();
        let t = app("Rnd", vec![app("Rnd", vec![c("O")])]);
        let inner = innermost_reducts(&t, &m.rules);
        assert_eq!(inner.len(), 1);
        assert_eq!(inner[0].0, app("Rnd", vec![c("O")]));
        assert_eq!(inner[0].1.position, Position(vec![0]));
        assert!(innermost_reducts(&c("O"), &m.rules).is_empty());
        let t = app("S", vec![app("Rnd", vec![c("O")])]);
        let inner = innermost_reducts(&t, &m.rules);
        assert_eq!(inner.len(), 1);
        assert_eq!(inner[0].0, app("S", vec![c("O")]));
    }

    #[test]
    fn check_rule_errors() {
        let o = Sort::unsorted();
        let mut sig = Signature::new();
        sig.declare(Symbol::new("a"), SortDecl::unsorted(0)).unwrap();
        sig.declare(Symbol::new("f"), SortDecl::unsorted(1)).unwrap();
        let x = Term::var("x", &o);
        let bad = Rule::new(1, Term::constant("a"), app("f", vec![x.clone()]));
        assert!(matches!(
            check_rule(&sig, &bad),
            Err(RuleError::VariableCondition { .. })
        ));
        let bad = Rule::new(2, x.clone(), c("a"));
        assert!(matches!(check_rule(&sig, &bad), Err(RuleError::VariableLhs(_))));
        let ok = Rule::new(3, app("f", vec![x.clone()]), x);
        assert!(check_rule(&sig, &ok).is_ok());
        assert!(ok.is_collapsing());
    }

    #[test]
    fn one_step_detection() {
        let m = running();
        let s = app("Upd", vec![app("Cons", vec![c("O"), c("Nil")])]);
        let t = app("Cons", vec![app("Rnd", vec![c("O")]), app("Upd", vec![c("Nil")])]);
        assert_eq!(is_one_step(&s, &t, &m.rules).unwrap().rule.id, RuleId(8));
        assert!(is_one_step(&s, &s, &m.rules).is_none());
        let s2 = app("S", vec![t.clone()]);
        assert!(is_one_step(&s2, &s2, &m.rules).is_none());
    }
}
