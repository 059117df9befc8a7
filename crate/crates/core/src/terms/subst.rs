use std::collections::BTreeMap;
use std::fmt;

use super::{root_sort, sort_of, Signature, SortError, Term, Var};

/// A finite, sort-preserving map from variables to terms.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Substitution(BTreeMap<Var, Term>);

impl Substitution {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn singleton(x: Var, t: Term) -> Self {
        let mut s = Self::new();
        s.insert(x, t);
        s
    }

    /// Unchecked insertion; see [`Substitution::check`].
    pub fn insert(&mut self, x: Var, t: Term) -> Option<Term> {
        self.0.insert(x, t)
    }

    pub fn get(&self, x: &Var) -> Option<&Term> {
        self.0.get(x)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn domain(&self) -> impl Iterator<Item = &Var> {
        self.0.keys()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Var, &Term)> {
        self.0.iter()
    }

    /// Simultaneous replacement of mapped variables.
    pub fn apply(&self, t: &Term) -> Term {
        match t {
            Term::Var(v) => self.0.get(v).cloned().unwrap_or_else(|| t.clone()),
            Term::App(f, args) => Term::App(f.clone(), args.iter().map(|a| self.apply(a)).collect()),
        }
    }

    /// Every binding `x ↦ t` has `t` well-sorted with the sort of `x`.
    pub fn check(&self, sig: &Signature) -> Result<(), SortError> {
        for (x, t) in &self.0 {
            let s = sort_of(sig, t)?;
            if s != x.sort {
                return Err(SortError::Mismatch {
                    position: super::Position::root(),
                    expected: x.sort.clone(),
                    found: s,
                });
            }
        }
        Ok(())
    }

    pub fn restrict<'a>(&self, vars: impl IntoIterator<Item = &'a Var>) -> Substitution {
        Substitution(
            vars.into_iter()
                .filter_map(|v| self.0.get(v).map(|t| (v.clone(), t.clone())))
                .collect(),
        )
    }

    /// Union of substitutions with disjoint domains (later entries win otherwise).
    pub fn union(mut self, other: Substitution) -> Substitution {
        self.0.extend(other.0);
        self
    }
}

impl FromIterator<(Var, Term)> for Substitution {
    fn from_iter<I: IntoIterator<Item = (Var, Term)>>(iter: I) -> Self {
        Substitution(iter.into_iter().collect())
    }
}

impl fmt::Display for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (x, t)) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{x} ↦ {t}")?;
        }
        write!(f, "}}")
    }
}

impl fmt::Debug for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// `tγ`, refusing substitutions that do not preserve sorts.
pub fn apply_subst(sig: &Signature, t: &Term, gamma: &Substitution) -> Result<Term, SortError> {
    gamma.check(sig)?;
    Ok(gamma.apply(t))
}

/// The minimal `γ` with `pattern·γ = subject`, if any.
pub fn match_term(pattern: &Term, subject: &Term) -> Option<Substitution> {
    let mut s = Substitution::new();
    match_into(pattern, subject, &mut s).then_some(s)
}

/// Extends `subst` so that `pattern·subst = subject`. On failure `subst` may
/// hold partial bindings.
pub fn match_into(pattern: &Term, subject: &Term, subst: &mut Substitution) -> bool {
    match (pattern, subject) {
        (Term::Var(x), _) => match subst.get(x) {
            Some(bound) => bound == subject,
            None => {
                subst.insert(x.clone(), subject.clone());
                true
            }
        },
        (Term::App(f, ps), Term::App(g, ss)) => {
            f == g && ps.len() == ss.len() && ps.iter().zip(ss).all(|(p, s)| match_into(p, s, subst))
        }
        (Term::App(..), Term::Var(_)) => false,
    }
}

/// Most general unifier by Robinson's algorithm with occurs check.
///
/// The result is idempotent. Variable bindings must agree in sort; for
/// applications the sort is taken from the root declaration in `sig`.
pub fn unify(sig: &Signature, s: &Term, t: &Term) -> Option<Substitution> {
    let mut subst = Substitution::new();
    let mut todo = vec![(s.clone(), t.clone())];
    while let Some((a, b)) = todo.pop() {
        let a = subst.apply(&a);
        let b = subst.apply(&b);
        match (a, b) {
            (Term::Var(x), Term::Var(y)) if x == y => {}
            (Term::Var(x), other) | (other, Term::Var(x)) => {
                if let Some(s) = root_sort(sig, &other) {
                    if s != x.sort {
                        return None;
                    }
                }
                if other.contains_var(&x) {
                    return None;
                }
                let single = Substitution::singleton(x.clone(), other.clone());
                for v in subst.0.values_mut() {
                    *v = single.apply(v);
                }
                subst.insert(x, other);
            }
            (Term::App(f, fa), Term::App(g, ga)) => {
                if f != g || fa.len() != ga.len() {
                    return None;
                }
                todo.extend(fa.into_iter().zip(ga));
            }
        }
    }
    Some(subst)
}
