//! Formative reductions: checking them, and turning arbitrary reductions
//! into formative ones.
//!
//! A reduction `s →* ℓγ` is a formative ℓ-reduction when it only does the
//! work needed to produce the shape of `ℓ`: nothing happens below variable
//! positions of `ℓ`, and each root step produces the root symbol that `ℓ`
//! asks for. The parser below factors a trace at its *last* root step, which
//! makes the decomposition unique.

use std::collections::{BTreeMap, HashMap};

use thiserror::Error;

use super::search::{reachable, Reachable, SearchLimits};
use super::{ReductionTrace, Rule, Step, TraceError};
use crate::terms::{match_term, Position, Substitution, Term, Var};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormativeError {
    #[error(transparent)]
    Trace(#[from] TraceError),
    #[error("trace ends in {found}, not in {expected}")]
    Endpoint { expected: String, found: String },
    #[error("formative rearrangement did not terminate within its step budget")]
    Exhausted,
}

/// Is `trace` a formative `ℓ`-reduction ending in `ℓγ`?
pub fn is_formative_reduction(trace: &ReductionTrace, l: &Term, gamma: &Substitution) -> Result<bool, FormativeError> {
    let terms = trace.terms()?;
    let end = terms.last().unwrap();
    let expected = gamma.apply(l);
    if *end != expected {
        return Err(FormativeError::Endpoint {
            expected: expected.to_string(),
            found: end.to_string(),
        });
    }
    Ok(parse(&trace.start, &trace.steps, l))
}

fn replay(start: &Term, steps: &[Step]) -> Term {
    steps
        .iter()
        .fold(start.clone(), |t, s| s.apply(&t).expect("trace was validated"))
}

/// Steps below argument `i`, with positions relative to that argument.
fn project(steps: &[Step], i: usize) -> Vec<Step> {
    steps
        .iter()
        .filter_map(|s| match s.position.split_first() {
            Some((j, rest)) if j == i => Some(Step {
                position: rest,
                ..s.clone()
            }),
            _ => None,
        })
        .collect()
}

fn last_root_step(steps: &[Step]) -> Option<usize> {
    steps.iter().rposition(|s| s.position.is_root())
}

fn parse(start: &Term, steps: &[Step], l: &Term) -> bool {
    if !l.is_linear() {
        return true;
    }
    match l {
        Term::Var(_) => steps.is_empty(),
        Term::App(f, ls) => match last_root_step(steps) {
            None => match start {
                Term::App(g, ss) if g == f && ss.len() == ls.len() => {
                    (0..ls.len()).all(|i| parse(&ss[i], &project(steps, i), &ls[i]))
                }
                _ => false,
            },
            Some(j) => {
                let root = &steps[j];
                if !parse(start, &steps[..j], &root.rule.lhs) {
                    return false;
                }
                let after = replay(start, &steps[..=j]);
                let suffix = &steps[j + 1..];
                match &after {
                    Term::App(g, ts) if g == f && ts.len() == ls.len() => {
                        (0..ls.len()).all(|i| parse(&ts[i], &project(suffix, i), &ls[i]))
                    }
                    _ => false,
                }
            }
        },
    }
}

/// The result of rearranging `s →* ℓγ` into a formative reduction.
#[derive(Debug, Clone)]
pub struct FormativeWitness {
    /// `δ` with `s →* ℓδ` formative.
    pub delta: Substitution,
    /// The formative reduction `s →* ℓδ`.
    pub trace: ReductionTrace,
    /// For every variable `x` of `ℓ`, a reduction `δ(x) →* γ(x)`.
    pub residuals: BTreeMap<Var, ReductionTrace>,
}

struct Partial {
    delta: Substitution,
    steps: Vec<Step>,
    residuals: BTreeMap<Var, ReductionTrace>,
}

const FUEL: usize = 200_000;

/// Rearranges a reduction `s →* ℓγ` into a formative `ℓ`-reduction
/// `s →* ℓδ` followed by reductions `δ(x) →* γ(x)`; steps under variable
/// positions of `ℓ` are postponed. Uses no rule that the input did not use.
pub fn formativize(trace: &ReductionTrace, l: &Term, gamma: &Substitution) -> Result<FormativeWitness, FormativeError> {
    let end = trace.end()?;
    let expected = gamma.apply(l);
    if end != expected {
        return Err(FormativeError::Endpoint {
            expected: expected.to_string(),
            found: end.to_string(),
        });
    }
    let mut fuel = FUEL;
    let p = rearrange(&trace.start, &trace.steps, l, &mut fuel)?;
    Ok(FormativeWitness {
        delta: p.delta,
        trace: ReductionTrace::new(trace.start.clone(), p.steps),
        residuals: p.residuals,
    })
}

fn rearrange(start: &Term, steps: &[Step], l: &Term, fuel: &mut usize) -> Result<Partial, FormativeError> {
    if *fuel == 0 {
        return Err(FormativeError::Exhausted);
    }
    *fuel -= 1;
    if !l.is_linear() {
        let end = replay(start, steps);
        let delta = match_term(l, &end).ok_or_else(|| FormativeError::Endpoint {
            expected: l.to_string(),
            found: end.to_string(),
        })?;
        let residuals = delta
            .iter()
            .map(|(x, t)| (x.clone(), ReductionTrace::empty(t.clone())))
            .collect();
        return Ok(Partial {
            delta,
            steps: steps.to_vec(),
            residuals,
        });
    }
    match l {
        Term::Var(x) => Ok(Partial {
            delta: Substitution::singleton(x.clone(), start.clone()),
            steps: Vec::new(),
            residuals: BTreeMap::from([(x.clone(), ReductionTrace::new(start.clone(), steps.to_vec()))]),
        }),
        Term::App(f, ls) => match last_root_step(steps) {
            None => {
                let ss = match start {
                    Term::App(g, ss) if g == f && ss.len() == ls.len() => ss,
                    _ => {
                        return Err(FormativeError::Endpoint {
                            expected: l.to_string(),
                            found: start.to_string(),
                        })
                    }
                };
                let mut out = Partial {
                    delta: Substitution::new(),
                    steps: Vec::new(),
                    residuals: BTreeMap::new(),
                };
                for i in 0..ls.len() {
                    let p = rearrange(&ss[i], &project(steps, i), &ls[i], fuel)?;
                    out.delta = out.delta.union(p.delta);
                    out.steps.extend(p.steps.iter().map(|s| s.lift(i)));
                    out.residuals.extend(p.residuals);
                }
                Ok(out)
            }
            Some(j) => {
                let root = &steps[j];
                let rule = &root.rule;
                let before = rearrange(start, &steps[..j], &rule.lhs, fuel)?;
                let mid = before.delta.apply(&rule.rhs);
                let mut rest: Vec<Step> = Vec::new();
                for (pos, sub) in rule.rhs.positions() {
                    if let Term::Var(x) = sub {
                        if let Some(res) = before.residuals.get(x) {
                            rest.extend(res.steps.iter().map(|s| s.lift_to(&pos)));
                        }
                    }
                }
                rest.extend_from_slice(&steps[j + 1..]);
                let after = rearrange(&mid, &rest, l, fuel)?;
                let mut all = before.steps;
                all.push(Step {
                    position: Position::root(),
                    rule: rule.clone(),
                    subst: before.delta,
                });
                all.extend(after.steps);
                Ok(Partial {
                    delta: after.delta,
                    steps: all,
                    residuals: after.residuals,
                })
            }
        },
    }
}

/// A reduction `s →* ℓγ` found by search, together with its formative form.
#[derive(Debug, Clone)]
pub struct FoundFormative {
    pub gamma: Substitution,
    pub original: ReductionTrace,
    pub witness: FormativeWitness,
}

/// Searches for a shortest reduction from `s` to an instance of `ℓ` and
/// rearranges it into a formative `ℓ`-reduction.
pub fn find_formative(s: &Term, l: &Term, rules: &[Rule], limits: SearchLimits) -> Option<FoundFormative> {
    let r = reachable(s, rules, limits);
    let (hit, gamma) = r.order.iter().find_map(|t| match_term(l, t).map(|g| (t, g)))?;
    let original = r.trace_to(hit)?;
    let witness = formativize(&original, l, &gamma).ok()?;
    Some(FoundFormative {
        gamma,
        original,
        witness,
    })
}

/// Searches directly for a formative `ℓ`-reduction from `s` to exactly
/// `target` using only `rules`. Root steps are nested at most
/// `limits.max_steps` deep and every plain reachability query is bounded by
/// `limits`.
pub fn find_formative_reduction_to(
    s: &Term,
    l: &Term,
    target: &Term,
    rules: &[Rule],
    limits: SearchLimits,
) -> Option<ReductionTrace> {
    let mut search = Search {
        rules,
        limits,
        reach: HashMap::new(),
        memo: HashMap::new(),
    };
    search
        .find(s, l, target, limits.max_steps)
        .map(|steps| ReductionTrace::new(s.clone(), steps))
}

type Key = (Term, Term, Term, usize);

struct Search<'a> {
    rules: &'a [Rule],
    limits: SearchLimits,
    reach: HashMap<Term, Reachable>,
    memo: HashMap<Key, Option<Vec<Step>>>,
}

impl Search<'_> {
    fn reachable(&mut self, s: &Term) -> &Reachable {
        let (rules, limits) = (self.rules, self.limits);
        self.reach
            .entry(s.clone())
            .or_insert_with(|| reachable(s, rules, limits))
    }

    fn find(&mut self, s: &Term, l: &Term, target: &Term, depth: usize) -> Option<Vec<Step>> {
        let key = (s.clone(), l.clone(), target.clone(), depth);
        if let Some(hit) = self.memo.get(&key) {
            return hit.clone();
        }
        let result = self.compute(s, l, target, depth);
        self.memo.insert(key, result.clone());
        result
    }

    fn compute(&mut self, s: &Term, l: &Term, target: &Term, depth: usize) -> Option<Vec<Step>> {
        if !l.is_linear() {
            return self.reachable(s).trace_to(target).map(|t| t.steps);
        }
        let (f, ls) = match l {
            Term::Var(_) => return (s == target).then(Vec::new),
            Term::App(f, ls) => (f, ls),
        };
        let targs = match target {
            Term::App(g, ts) if g == f && ts.len() == ls.len() => ts,
            _ => return None,
        };
        if let Term::App(g, ss) = s {
            if g == f && ss.len() == ls.len() {
                if let Some(steps) = self.args(ss, ls, targs, depth) {
                    return Some(steps);
                }
            }
        }
        if depth == 0 {
            return None;
        }
        let candidates: Vec<Term> = self.reachable(s).order.clone();
        for u in candidates {
            for rule in self.rules {
                let Some(sigma) = match_term(&rule.lhs, &u) else {
                    continue;
                };
                let contracted = sigma.apply(&rule.rhs);
                let ts = match &contracted {
                    Term::App(g, ts) if g == f && ts.len() == ls.len() => ts,
                    _ => continue,
                };
                let Some(suffix) = self.args(ts, ls, targs, depth - 1) else {
                    continue;
                };
                let Some(mut prefix) = self.find(s, &rule.lhs, &u, depth - 1) else {
                    continue;
                };
                prefix.push(Step {
                    position: Position::root(),
                    rule: rule.clone(),
                    subst: sigma,
                });
                prefix.extend(suffix);
                return Some(prefix);
            }
        }
        None
    }

    fn args(&mut self, ss: &[Term], ls: &[Term], targs: &[Term], depth: usize) -> Option<Vec<Step>> {
        let mut steps = Vec::new();
        for i in 0..ls.len() {
            let sub = self.find(&ss[i], &ls[i], &targs[i], depth)?;
            steps.extend(sub.iter().map(|s| s.lift(i)));
        }
        Some(steps)
    }
}

#[cfg(test)]
mod tests {
    use super::super::fixtures::*;
    use super::super::{reducts, RuleId};
    use super::*;
    use crate::terms::Sort;

    fn o() -> Sort {
        Sort::unsorted()
    }

    fn fg_rules() -> Vec<Rule> {
        let x = Term::var("x", &o());
        vec![
            Rule::new(1, app("f", vec![x.clone()]), app("g", vec![x.clone()])),
            Rule::new(2, app("g", vec![x.clone()]), x),
        ]
    }

    fn path(start: Term, rules: &[Rule], choose: &[(u32, Vec<usize>)]) -> ReductionTrace {
        let mut t = start.clone();
        let mut steps = Vec::new();
        for (id, pos) in choose {
            let (next, step) = reducts(&t, rules)
                .into_iter()
                .find(|(_, s)| s.rule.id == RuleId(*id) && s.position.0 == *pos)
                .expect("step exists");
            t = next;
            steps.push(step);
        }
        ReductionTrace::new(start, steps)
    }

    #[test]
    fn collapsing_chain_is_formative_for_ground_target() {
        let tr = path(app("f", vec![c("a")]), &fg_rules(), &[(1, vec![]), (2, vec![])]);
        assert!(is_formative_reduction(&tr, &c("a"), &Substitution::new()).unwrap());
    }

    #[test]
    fn step_under_variable_is_not_formative() {
        let x = Term::var("x", &o());
        let rules = vec![Rule::new(1, c("a"), c("b"))];
        let tr = path(app("g", vec![c("a")]), &rules, &[(1, vec![0])]);
        let gamma = Substitution::singleton(x.as_var().unwrap().clone(), c("b"));
        let l = app("g", vec![x.clone()]);
        assert!(!is_formative_reduction(&tr, &l, &gamma).unwrap());

        let w = formativize(&tr, &l, &gamma).unwrap();
        assert!(w.trace.is_empty());
        assert_eq!(w.delta.apply(&x), c("a"));
        let res = &w.residuals[x.as_var().unwrap()];
        assert_eq!(res.end().unwrap(), c("b"));
    }

    #[test]
    fn empty_trace_is_formative() {
        let t = app("S", vec![c("O")]);
        let l = app("S", vec![nat("x")]);
        let g = match_term(&l, &t).unwrap();
        assert!(is_formative_reduction(&ReductionTrace::empty(t), &l, &g).unwrap());
    }

    #[test]
    fn wrong_endpoint_is_an_error() {
        let t = app("S", vec![c("O")]);
        let r = is_formative_reduction(&ReductionTrace::empty(t), &c("O"), &Substitution::new());
        assert!(matches!(r, Err(FormativeError::Endpoint { .. })));
    }

    #[test]
    fn nonlinear_pattern_always_accepted() {
        let x = Term::var("x", &o());
        let rules = vec![Rule::new(1, c("a"), c("b"))];
        let tr = path(app("h", vec![c("a"), c("b")]), &rules, &[(1, vec![0])]);
        let l = app("h", vec![x.clone(), x.clone()]);
        let g = Substitution::singleton(x.as_var().unwrap().clone(), c("b"));
        assert!(is_formative_reduction(&tr, &l, &g).unwrap());
    }

    #[test]
    fn find_formative_postpones() {
        let x = Term::var("x", &o());
        let rules = vec![Rule::new(1, c("a"), c("b"))];
        let found = find_formative(
            &app("g", vec![c("a")]),
            &app("g", vec![x.clone()]),
            &rules,
            SearchLimits::steps(3),
        )
        .unwrap();
        assert!(found.witness.trace.is_empty());
        assert_eq!(found.witness.delta.apply(&x), c("a"));
    }

    #[test]
    fn find_formative_upd_cons() {
        let m = running();
        let s = app("Upd", vec![app("Cons", vec![c("O"), c("Nil")])]);
        let l = app("Cons", vec![nat("y"), list("z")]);
        let found = find_formative(&s, &l, &m.rules, SearchLimits::steps(2)).unwrap();
        let w = &found.witness;
        assert_eq!(w.delta.apply(&nat("y")), app("Rnd", vec![c("O")]));
        assert_eq!(w.delta.apply(&list("z")), app("Upd", vec![c("Nil")]));
        assert_eq!(w.trace.len(), 1);
        assert_eq!(w.trace.steps[0].rule.id, RuleId(8));
        assert!(find_formative(&c("O"), &app("S", vec![nat("x")]), &m.rules, SearchLimits::steps(5)).is_none());
    }

    #[test]
    fn rearranging_moves_inner_steps_after_root_step() {
        // Rnd(S(Rnd(O))) → Rnd(S(O)) → Rnd(O) → O, against ℓ = O.
        let m = running();
        let s = app("Rnd", vec![app("S", vec![app("Rnd", vec![c("O")])])]);
        let tr = path(s, &m.rules, &[(1, vec![0, 0]), (2, vec![]), (1, vec![])]);
        let w = formativize(&tr, &c("O"), &Substitution::new()).unwrap();
        assert!(is_formative_reduction(&w.trace, &c("O"), &w.delta).unwrap());
        assert_eq!(w.trace.end().unwrap(), c("O"));
    }

    #[test]
    fn direct_search_matches_rearrangement() {
        let rules = fg_rules();
        let s = app("f", vec![c("a")]);
        let t = find_formative_reduction_to(&s, &c("a"), &c("a"), &rules, SearchLimits::steps(4)).unwrap();
        assert_eq!(t.len(), 2);
        assert!(is_formative_reduction(&t, &c("a"), &Substitution::new()).unwrap());
        assert!(find_formative_reduction_to(&s, &c("a"), &c("a"), &rules[1..], SearchLimits::steps(4)).is_none());
    }
}
