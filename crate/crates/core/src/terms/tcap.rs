use std::collections::BTreeMap;

use super::{unify, Signature, Sort, Term, Var};

/// Monotone supply of fresh variables named `_n`.
///
/// One supply is created per operation invocation; results that contain
/// fresh variables are only meaningful up to renaming.
#[derive(Debug, Default, Clone)]
pub struct FreshVars {
    next: usize,
}

impl FreshVars {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn var(&mut self, sort: &Sort) -> Var {
        let v = Var::new(&format!("_{}", self.next), sort.clone());
        self.next += 1;
        v
    }

    pub fn term(&mut self, sort: &Sort) -> Term {
        Term::Var(self.var(sort))
    }
}

/// Consistently renames all variables of `terms` to fresh ones.
pub fn rename_apart(terms: &[&Term], fresh: &mut FreshVars) -> Vec<Term> {
    let mut map: BTreeMap<Var, Var> = BTreeMap::new();
    fn go(t: &Term, map: &mut BTreeMap<Var, Var>, fresh: &mut FreshVars) -> Term {
        match t {
            Term::Var(v) => Term::Var(map.entry(v.clone()).or_insert_with(|| fresh.var(&v.sort)).clone()),
            Term::App(f, args) => Term::App(f.clone(), args.iter().map(|a| go(a, map, fresh)).collect()),
        }
    }
    terms.iter().map(|t| go(t, &mut map, fresh)).collect()
}

/// `TCap(t, R)`: variables and every application that might become a redex
/// are replaced by distinct fresh variables.
///
/// `lhss` are the left-hand sides of `R`; they are renamed apart from the
/// result internally.
pub fn tcap(sig: &Signature, t: &Term, lhss: &[&Term], fresh: &mut FreshVars) -> Term {
    let renamed: Vec<Term> = lhss.iter().map(|l| rename_apart(&[l], fresh).remove(0)).collect();
    cap(sig, t, &renamed, fresh)
}

fn cap(sig: &Signature, t: &Term, lhss: &[Term], fresh: &mut FreshVars) -> Term {
    match t {
        Term::Var(v) => fresh.term(&v.sort),
        Term::App(f, args) => {
            let capped = Term::App(f.clone(), args.iter().map(|a| cap(sig, a, lhss, fresh)).collect());
            if lhss.iter().any(|l| unify(sig, &capped, l).is_some()) {
                let sort = sig.result_sort(f).cloned().unwrap_or_else(Sort::unsorted);
                fresh.term(&sort)
            } else {
                capped
            }
        }
    }
}
