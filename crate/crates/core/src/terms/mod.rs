//! Sorted first-order terms.
//!
//! A [`Signature`] assigns every function symbol a [`SortDecl`]; a [`Term`]
//! is either a sorted variable or a symbol applied to arguments. Terms do not
//! carry their sort at application nodes, so the sort of an application is
//! always looked up in the ambient signature (see [`sort_of`]).

mod infer;
mod subst;
mod tcap;

pub use infer::infer_sorts;
pub use subst::{apply_subst, match_into, match_term, unify, Substitution};
pub use tcap::{rename_apart, tcap, FreshVars};

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use serde::{Serialize, Serializer};
use thiserror::Error;

/// Name of the reserved sort given to marked symbols.
pub const DPSORT: &str = "dpsort";
/// Name of the single sort used for unsorted systems.
pub const UNSORTED: &str = "o";

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Sort(Arc<str>);

impl Sort {
    pub fn new(name: &str) -> Self {
        Sort(Arc::from(name))
    }

    pub fn dpsort() -> Self {
        Sort::new(DPSORT)
    }

    pub fn unsorted() -> Self {
        Sort::new(UNSORTED)
    }

    pub fn name(&self) -> &str {
        &self.0
    }

    pub fn is_dpsort(&self) -> bool {
        &*self.0 == DPSORT
    }
}

impl fmt::Debug for Sort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Display for Sort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Symbol(Arc<str>);

impl Symbol {
    pub fn new(name: &str) -> Self {
        Symbol(Arc::from(name))
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl Serialize for Symbol {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.0)
    }
}

/// `[κ1 × … × κn] ⇒ ι`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SortDecl {
    pub args: Vec<Sort>,
    pub result: Sort,
}

impl SortDecl {
    pub fn new(args: Vec<Sort>, result: Sort) -> Self {
        SortDecl { args, result }
    }

    /// Declaration of an `arity`-ary symbol over the single unsorted sort.
    pub fn unsorted(arity: usize) -> Self {
        SortDecl {
            args: vec![Sort::unsorted(); arity],
            result: Sort::unsorted(),
        }
    }

    pub fn arity(&self) -> usize {
        self.args.len()
    }
}

impl fmt::Display for SortDecl {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.args.is_empty() {
            return write!(f, "{}", self.result);
        }
        write!(f, "[")?;
        for (i, s) in self.args.iter().enumerate() {
            if i > 0 {
                write!(f, " × ")?;
            }
            write!(f, "{s}")?;
        }
        write!(f, "] ⇒ {}", self.result)
    }
}

/// A path of argument indices from the root. Indices are 0-based; the
/// `Display` form is the conventional 1-based dotted notation (`ε` at the root).
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Position(pub Vec<usize>);

impl Position {
    pub fn root() -> Self {
        Position(Vec::new())
    }

    pub fn is_root(&self) -> bool {
        self.0.is_empty()
    }

    pub fn child(&self, i: usize) -> Position {
        let mut p = self.0.clone();
        p.push(i);
        Position(p)
    }

    /// `i.rest` → `(i, rest)`.
    pub fn split_first(&self) -> Option<(usize, Position)> {
        let (&head, rest) = self.0.split_first()?;
        Some((head, Position(rest.to_vec())))
    }

    pub fn prepend(&self, i: usize) -> Position {
        let mut p = Vec::with_capacity(self.0.len() + 1);
        p.push(i);
        p.extend_from_slice(&self.0);
        Position(p)
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("ε");
        }
        for (k, i) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(".")?;
            }
            write!(f, "{}", i + 1)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SortError {
    #[error("unknown function symbol `{0}`")]
    UnknownSymbol(Symbol),
    #[error("symbol `{symbol}` expects {expected} arguments but got {found} (at position {position})")]
    Arity {
        symbol: Symbol,
        position: Position,
        expected: usize,
        found: usize,
    },
    #[error("ill-sorted term at position {position}: expected sort {expected}, found {found}")]
    Mismatch {
        position: Position,
        expected: Sort,
        found: Sort,
    },
    #[error("symbol `{0}` is declared twice with different sorts")]
    Redeclared(Symbol),
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Signature {
    symbols: BTreeMap<Symbol, SortDecl>,
    marked: BTreeMap<Symbol, Symbol>,
    unfilterable: BTreeSet<Symbol>,
}

impl Signature {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds `f : decl`; redeclaring with an identical declaration is a no-op.
    pub fn declare(&mut self, f: Symbol, decl: SortDecl) -> Result<(), SortError> {
        match self.symbols.get(&f) {
            Some(old) if *old != decl => Err(SortError::Redeclared(f)),
            Some(_) => Ok(()),
            None => {
                self.symbols.insert(f, decl);
                Ok(())
            }
        }
    }

    pub fn decl(&self, f: &Symbol) -> Option<&SortDecl> {
        self.symbols.get(f)
    }

    pub fn contains(&self, f: &Symbol) -> bool {
        self.symbols.contains_key(f)
    }

    pub fn arity(&self, f: &Symbol) -> Option<usize> {
        self.symbols.get(f).map(SortDecl::arity)
    }

    pub fn result_sort(&self, f: &Symbol) -> Option<&Sort> {
        self.symbols.get(f).map(|d| &d.result)
    }

    pub fn symbols(&self) -> impl Iterator<Item = (&Symbol, &SortDecl)> {
        self.symbols.iter()
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    /// All sorts mentioned by some declaration.
    pub fn sorts(&self) -> BTreeSet<Sort> {
        let mut out = BTreeSet::new();
        for d in self.symbols.values() {
            out.extend(d.args.iter().cloned());
            out.insert(d.result.clone());
        }
        out
    }

    /// A symbol name based on `base` that is not yet declared.
    pub fn fresh_symbol(&self, base: &str) -> Symbol {
        let mut name = base.to_string();
        while self.symbols.contains_key(&Symbol::new(&name)) {
            name.push('\'');
        }
        Symbol::new(&name)
    }

    /// Returns the marked version `f♯ : [κ…] ⇒ dpsort` of `f`, declaring it
    /// on first use. Marked names are `f#` (more `#` on clashes).
    pub fn mark(&mut self, f: &Symbol) -> Symbol {
        if let Some(m) = self.marked.get(f) {
            return m.clone();
        }
        let decl = self
            .symbols
            .get(f)
            .cloned()
            .unwrap_or_else(|| panic!("marking undeclared symbol {f}"));
        let mut name = format!("{f}#");
        while self.symbols.contains_key(&Symbol::new(&name)) {
            name.push('#');
        }
        let m = Symbol::new(&name);
        self.symbols.insert(m.clone(), SortDecl::new(decl.args, Sort::dpsort()));
        self.marked.insert(f.clone(), m.clone());
        m
    }

    pub fn marked_of(&self, f: &Symbol) -> Option<&Symbol> {
        self.marked.get(f)
    }

    pub fn is_marked(&self, f: &Symbol) -> bool {
        self.marked.values().any(|m| m == f)
    }

    pub fn set_unfilterable(&mut self, f: Symbol) {
        self.unfilterable.insert(f);
    }

    /// Symbols that argument filterings must leave untouched.
    pub fn is_unfilterable(&self, f: &Symbol) -> bool {
        self.unfilterable.contains(f)
    }

    /// The same symbols with every sort replaced by `o`.
    pub fn collapse_sorts(&self) -> Signature {
        Signature {
            symbols: self
                .symbols
                .iter()
                .map(|(f, d)| (f.clone(), SortDecl::unsorted(d.arity())))
                .collect(),
            marked: self.marked.clone(),
            unfilterable: self.unfilterable.clone(),
        }
    }

    /// Union of two signatures; `other` wins on conflicting declarations.
    pub fn merged(&self, other: &Signature) -> Signature {
        let mut out = self.clone();
        for (f, d) in &other.symbols {
            out.symbols.insert(f.clone(), d.clone());
        }
        for (f, m) in &other.marked {
            out.marked.insert(f.clone(), m.clone());
        }
        out.unfilterable.extend(other.unfilterable.iter().cloned());
        out
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Var {
    pub name: Arc<str>,
    pub sort: Sort,
}

impl Var {
    pub fn new(name: &str, sort: Sort) -> Self {
        Var {
            name: Arc::from(name),
            sort,
        }
    }
}

impl fmt::Debug for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.name, self.sort)
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(Var),
    App(Symbol, Vec<Term>),
}

impl Term {
    pub fn var(name: &str, sort: &Sort) -> Term {
        Term::Var(Var::new(name, sort.clone()))
    }

    pub fn app(f: &str, args: Vec<Term>) -> Term {
        Term::App(Symbol::new(f), args)
    }

    pub fn constant(f: &str) -> Term {
        Term::App(Symbol::new(f), Vec::new())
    }

    pub fn is_var(&self) -> bool {
        matches!(self, Term::Var(_))
    }

    pub fn as_var(&self) -> Option<&Var> {
        match self {
            Term::Var(v) => Some(v),
            Term::App(..) => None,
        }
    }

    pub fn root(&self) -> Option<&Symbol> {
        match self {
            Term::Var(_) => None,
            Term::App(f, _) => Some(f),
        }
    }

    pub fn args(&self) -> &[Term] {
        match self {
            Term::Var(_) => &[],
            Term::App(_, args) => args,
        }
    }

    /// Variable occurrences in pre-order (with repetitions).
    pub fn var_occurrences(&self) -> Vec<&Var> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars<'a>(&'a self, out: &mut Vec<&'a Var>) {
        match self {
            Term::Var(v) => out.push(v),
            Term::App(_, args) => args.iter().for_each(|a| a.collect_vars(out)),
        }
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        self.var_occurrences().into_iter().cloned().collect()
    }

    pub fn contains_var(&self, x: &Var) -> bool {
        match self {
            Term::Var(v) => v == x,
            Term::App(_, args) => args.iter().any(|a| a.contains_var(x)),
        }
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Term::Var(_) => false,
            Term::App(_, args) => args.iter().all(Term::is_ground),
        }
    }

    /// No variable occurs twice.
    pub fn is_linear(&self) -> bool {
        let occ = self.var_occurrences();
        let set: BTreeSet<&Var> = occ.iter().copied().collect();
        set.len() == occ.len()
    }

    pub fn size(&self) -> usize {
        match self {
            Term::Var(_) => 1,
            Term::App(_, args) => 1 + args.iter().map(Term::size).sum::<usize>(),
        }
    }

    /// Depth of the term tree; variables and constants have depth 0.
    pub fn depth(&self) -> usize {
        match self {
            Term::Var(_) => 0,
            Term::App(_, args) => args.iter().map(|a| a.depth() + 1).max().unwrap_or(0),
        }
    }

    /// Function symbols occurring in the term.
    pub fn symbols(&self) -> BTreeSet<Symbol> {
        let mut out = BTreeSet::new();
        self.visit(&mut |t| {
            if let Term::App(f, _) = t {
                out.insert(f.clone());
            }
        });
        out
    }

    fn visit<'a>(&'a self, f: &mut impl FnMut(&'a Term)) {
        f(self);
        if let Term::App(_, args) = self {
            for a in args {
                a.visit(f);
            }
        }
    }

    /// All subterms in pre-order, including `self`.
    pub fn subterms(&self) -> Vec<&Term> {
        let mut out = Vec::new();
        self.visit(&mut |t| out.push(t));
        out
    }

    /// Positions in pre-order, paired with the subterm found there.
    pub fn positions(&self) -> Vec<(Position, &Term)> {
        let mut out = Vec::new();
        fn go<'a>(t: &'a Term, p: &mut Vec<usize>, out: &mut Vec<(Position, &'a Term)>) {
            out.push((Position(p.clone()), t));
            for (i, a) in t.args().iter().enumerate() {
                p.push(i);
                go(a, p, out);
                p.pop();
            }
        }
        go(self, &mut Vec::new(), &mut out);
        out
    }

    pub fn is_subterm_of(&self, other: &Term) -> bool {
        other.subterms().into_iter().any(|s| s == self)
    }

    pub fn subterm_at(&self, pos: &Position) -> Option<&Term> {
        let mut t = self;
        for &i in &pos.0 {
            t = t.args().get(i)?;
        }
        Some(t)
    }

    /// `self[replacement]_pos`. Panics if `pos` is not a position of `self`.
    pub fn replace_at(&self, pos: &[usize], replacement: Term) -> Term {
        match pos.split_first() {
            None => replacement,
            Some((&i, rest)) => match self {
                Term::App(f, args) => {
                    let mut args = args.clone();
                    args[i] = args[i].replace_at(rest, replacement);
                    Term::App(f.clone(), args)
                }
                Term::Var(_) => panic!("position {i} below a variable"),
            },
        }
    }

    /// Renames every variable to the sort-preserving name `v{k}` in order of
    /// first occurrence. Two terms are variants iff their canonical forms agree.
    pub fn canonical(&self) -> Term {
        canonical_many(&[self]).remove(0)
    }

    pub fn is_variant_of(&self, other: &Term) -> bool {
        self.canonical() == other.canonical()
    }

    /// Replaces every sort of every variable by `o`.
    pub fn collapse_sorts(&self) -> Term {
        match self {
            Term::Var(v) => Term::Var(Var::new(&v.name, Sort::unsorted())),
            Term::App(f, args) => Term::App(f.clone(), args.iter().map(Term::collapse_sorts).collect()),
        }
    }
}

/// Jointly canonicalises several terms sharing one variable namespace.
pub fn canonical_many(terms: &[&Term]) -> Vec<Term> {
    let mut names: BTreeMap<Var, Var> = BTreeMap::new();
    fn go(t: &Term, names: &mut BTreeMap<Var, Var>) -> Term {
        match t {
            Term::Var(v) => {
                let n = names.len();
                Term::Var(
                    names
                        .entry(v.clone())
                        .or_insert_with(|| Var::new(&format!("v{n}"), v.sort.clone()))
                        .clone(),
                )
            }
            Term::App(f, args) => Term::App(f.clone(), args.iter().map(|a| go(a, names)).collect()),
        }
    }
    terms.iter().map(|t| go(t, &mut names)).collect()
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => write!(f, "{v}"),
            Term::App(g, args) if args.is_empty() => write!(f, "{g}"),
            Term::App(g, args) => {
                write!(f, "{g}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{a}")?;
                }
                write!(f, ")")
            }
        }
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// The unique sort of a well-sorted term.
pub fn sort_of(sig: &Signature, t: &Term) -> Result<Sort, SortError> {
    fn go(sig: &Signature, t: &Term, pos: &mut Vec<usize>) -> Result<Sort, SortError> {
        match t {
            Term::Var(v) => Ok(v.sort.clone()),
            Term::App(f, args) => {
                let decl = sig.decl(f).ok_or_else(|| SortError::UnknownSymbol(f.clone()))?;
                if decl.arity() != args.len() {
                    return Err(SortError::Arity {
                        symbol: f.clone(),
                        position: Position(pos.clone()),
                        expected: decl.arity(),
                        found: args.len(),
                    });
                }
                for (i, (a, expected)) in args.iter().zip(&decl.args).enumerate() {
                    pos.push(i);
                    let found = go(sig, a, pos)?;
                    if &found != expected {
                        return Err(SortError::Mismatch {
                            position: Position(pos.clone()),
                            expected: expected.clone(),
                            found,
                        });
                    }
                    pos.pop();
                }
                Ok(decl.result.clone())
            }
        }
    }
    go(sig, t, &mut Vec::new())
}

/// Sort of `t` read off its root only; `None` for undeclared roots.
pub(crate) fn root_sort(sig: &Signature, t: &Term) -> Option<Sort> {
    match t {
        Term::Var(v) => Some(v.sort.clone()),
        Term::App(f, _) => sig.result_sort(f).cloned(),
    }
}

/// `t` has shape `f` if it is rooted by `f` or is a variable of `f`'s result sort.
pub fn has_shape(sig: &Signature, t: &Term, f: &Symbol) -> bool {
    match t {
        Term::App(g, _) => g == f,
        Term::Var(v) => sig.result_sort(f) == Some(&v.sort),
    }
}
