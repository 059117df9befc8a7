use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::rewriting::Rule;
use crate::terms::{Signature, SortDecl, Substitution, Symbol, Term};

/// Maps symbols to the (1-based) argument positions that are kept.
/// Symbols without an entry keep all their arguments.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize)]
#[serde(transparent)]
pub struct ArgumentFiltering(BTreeMap<Symbol, Vec<usize>>);

impl ArgumentFiltering {
    /// The filtering that keeps every argument.
    pub fn trivial() -> Self {
        Self::default()
    }

    /// Sets `π(f)`. Indices are 1-based; they are sorted and deduplicated.
    pub fn set(&mut self, f: Symbol, mut indices: Vec<usize>) {
        indices.sort_unstable();
        indices.dedup();
        self.0.insert(f, indices);
    }

    pub fn with(mut self, f: &str, indices: &[usize]) -> Self {
        self.set(Symbol::new(f), indices.to_vec());
        self
    }

    /// `π(f)` as 1-based indices, given `f`'s arity.
    pub fn indices(&self, f: &Symbol, arity: usize) -> Vec<usize> {
        match self.0.get(f) {
            Some(v) => v.iter().copied().filter(|&i| i >= 1 && i <= arity).collect(),
            None => (1..=arity).collect(),
        }
    }

    /// Whether 0-based argument `i` of `f` is kept.
    pub fn regards(&self, f: &Symbol, i: usize) -> bool {
        self.0.get(f).is_none_or(|v| v.contains(&(i + 1)))
    }

    pub fn is_trivial(&self) -> bool {
        self.0.is_empty()
    }

    /// Entries that actually drop something, given the signature.
    pub fn nontrivial_entries<'a>(&'a self, sig: &'a Signature) -> impl Iterator<Item = (&'a Symbol, &'a Vec<usize>)> {
        self.0
            .iter()
            .filter(move |(f, v)| sig.arity(f).is_none_or(|n| v.len() != n))
    }

    /// `π̄(t)`: drops unregarded arguments, keeping symbol names.
    pub fn apply(&self, t: &Term) -> Term {
        match t {
            Term::Var(_) => t.clone(),
            Term::App(f, args) => Term::App(
                f.clone(),
                args.iter()
                    .enumerate()
                    .filter(|(i, _)| self.regards(f, *i))
                    .map(|(_, a)| self.apply(a))
                    .collect(),
            ),
        }
    }

    pub fn apply_rule(&self, r: &Rule) -> Rule {
        r.map_terms(|t| self.apply(t))
    }

    pub fn apply_rules(&self, rules: &[Rule]) -> Vec<Rule> {
        rules.iter().map(|r| self.apply_rule(r)).collect()
    }

    /// `γ^π̄ = {x ↦ π̄(γ(x))}`.
    pub fn apply_subst(&self, gamma: &Substitution) -> Substitution {
        gamma.iter().map(|(x, t)| (x.clone(), self.apply(t))).collect()
    }

    /// Declarations of the filtered symbols `fπ`.
    pub fn signature(&self, sig: &Signature) -> Signature {
        let mut out = Signature::new();
        for (f, d) in sig.symbols() {
            let args = self
                .indices(f, d.arity())
                .into_iter()
                .map(|i| d.args[i - 1].clone())
                .collect();
            out.declare(f.clone(), SortDecl::new(args, d.result.clone()))
                .expect("fresh signature");
        }
        out
    }
}

impl fmt::Display for ArgumentFiltering {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("trivial");
        }
        for (k, (sym, v)) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(", ")?;
            }
            let list: Vec<String> = v.iter().map(|i| i.to_string()).collect();
            write!(f, "π({sym}) = {{{}}}", list.join(","))?;
        }
        Ok(())
    }
}
