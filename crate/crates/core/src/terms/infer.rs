//! Strongest sort inference for unsorted systems.
//!
//! Every argument and result position of every symbol, and every variable of
//! every rule, gets a sort variable. Rules force both sides to share a sort
//! and each argument to have the sort its position expects; the equivalence
//! classes of the resulting union-find become the inferred sorts.

use std::collections::{BTreeMap, HashMap};

use super::{Signature, Sort, SortDecl, Symbol, Term, Var};

#[derive(Clone, PartialEq, Eq, Hash)]
enum Node {
    /// Position `i` of symbol `f`; 0 is the result, `i ≥ 1` the i-th argument.
    Slot(Symbol, usize),
    RuleVar(usize, Var),
}

#[derive(Default)]
struct UnionFind {
    parent: Vec<usize>,
    index: HashMap<Node, usize>,
}

impl UnionFind {
    fn id(&mut self, n: Node) -> usize {
        if let Some(&i) = self.index.get(&n) {
            return i;
        }
        let i = self.parent.len();
        self.parent.push(i);
        self.index.insert(n, i);
        i
    }

    fn find(&mut self, mut i: usize) -> usize {
        while self.parent[i] != i {
            self.parent[i] = self.parent[self.parent[i]];
            i = self.parent[i];
        }
        i
    }

    fn union(&mut self, a: usize, b: usize) {
        let (a, b) = (self.find(a), self.find(b));
        if a != b {
            self.parent[a.max(b)] = a.min(b);
        }
    }
}

fn term_node(uf: &mut UnionFind, rule: usize, t: &Term) -> usize {
    match t {
        Term::Var(v) => uf.id(Node::RuleVar(rule, v.clone())),
        Term::App(f, args) => {
            let me = uf.id(Node::Slot(f.clone(), 0));
            for (i, a) in args.iter().enumerate() {
                let slot = uf.id(Node::Slot(f.clone(), i + 1));
                let child = term_node(uf, rule, a);
                uf.union(slot, child);
            }
            me
        }
    }
}

fn sort_name(k: usize) -> String {
    if k < 26 {
        ((b'A' + k as u8) as char).to_string()
    } else {
        format!("S{k}")
    }
}

/// Infers the most general many-sorted typing of an unsorted rule set.
///
/// `sig` supplies arities (its sorts are ignored). Returns the inferred
/// signature and the rules with their variables re-sorted accordingly.
/// Sorts are named `A`, `B`, … in order of first appearance, visiting
/// symbols in order of first occurrence and, per symbol, its argument
/// positions before its result.
pub fn infer_sorts(sig: &Signature, rules: &[(Term, Term)]) -> (Signature, Vec<(Term, Term)>) {
    let mut uf = UnionFind::default();
    let mut order: Vec<Symbol> = Vec::new();
    let note = |t: &Term, order: &mut Vec<Symbol>| {
        for f in t.subterms().into_iter().filter_map(Term::root) {
            if !order.contains(f) {
                order.push(f.clone());
            }
        }
    };
    for (k, (l, r)) in rules.iter().enumerate() {
        note(l, &mut order);
        note(r, &mut order);
        let a = term_node(&mut uf, k, l);
        let b = term_node(&mut uf, k, r);
        uf.union(a, b);
    }
    for (f, _) in sig.symbols() {
        if !order.contains(f) {
            order.push(f.clone());
        }
    }

    let mut names: BTreeMap<usize, Sort> = BTreeMap::new();
    let mut class_sort = |uf: &mut UnionFind, n: Node| -> Sort {
        let i = uf.id(n);
        let root = uf.find(i);
        let k = names.len();
        names.entry(root).or_insert_with(|| Sort::new(&sort_name(k))).clone()
    };

    let mut out = Signature::new();
    for f in &order {
        let arity = sig
            .arity(f)
            .or_else(|| {
                rules
                    .iter()
                    .flat_map(|(l, r)| [l, r])
                    .flat_map(|t| t.subterms())
                    .find(|t| t.root() == Some(f))
                    .map(|t| t.args().len())
            })
            .unwrap_or(0);
        let args: Vec<Sort> = (1..=arity)
            .map(|i| class_sort(&mut uf, Node::Slot(f.clone(), i)))
            .collect();
        let result = class_sort(&mut uf, Node::Slot(f.clone(), 0));
        out.declare(f.clone(), SortDecl::new(args, result))
            .expect("each symbol declared once");
    }

    let resorted = rules
        .iter()
        .enumerate()
        .map(|(k, (l, r))| {
            let mut re = |t: &Term| resort(t, &mut |v: &Var| class_sort(&mut uf, Node::RuleVar(k, v.clone())));
            (re(l), re(r))
        })
        .collect();
    (out, resorted)
}

fn resort(t: &Term, sort_of_var: &mut impl FnMut(&Var) -> Sort) -> Term {
    match t {
        Term::Var(v) => Term::Var(Var::new(&v.name, sort_of_var(v))),
        Term::App(f, args) => Term::App(f.clone(), args.iter().map(|a| resort(a, sort_of_var)).collect()),
    }
}

#[cfg(test)]
mod tests {
    use super::super::sort_of;
    use super::*;

    fn unsorted_sig(decls: &[(&str, usize)]) -> Signature {
        let mut sig = Signature::new();
        for (f, n) in decls {
            sig.declare(Symbol::new(f), SortDecl::unsorted(*n)).unwrap();
        }
        sig
    }

    #[test]
    fn two_sorts_for_f_of_g() {
        let o = Sort::unsorted();
        let x = Term::var("x", &o);
        let sig = unsorted_sig(&[("f", 1), ("g", 1)]);
        let rules = vec![(Term::app("f", vec![Term::app("g", vec![x.clone()])]), x)];
        let (inf, resorted) = infer_sorts(&sig, &rules);
        let f = inf.decl(&Symbol::new("f")).unwrap();
        let g = inf.decl(&Symbol::new("g")).unwrap();
        assert_eq!(f.args, vec![Sort::new("A")]);
        assert_eq!(f.result, Sort::new("B"));
        assert_eq!(g.args, vec![Sort::new("B")]);
        assert_eq!(g.result, Sort::new("A"));
        let (l, r) = &resorted[0];
        assert_eq!(sort_of(&inf, l).unwrap(), sort_of(&inf, r).unwrap());
    }

    #[test]
    fn single_constant() {
        let sig = unsorted_sig(&[("a", 0)]);
        let rules = vec![(Term::constant("a"), Term::constant("a"))];
        let (inf, _) = infer_sorts(&sig, &rules);
        assert_eq!(inf.sorts().len(), 1);
    }
}
