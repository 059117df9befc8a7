//! Dependency pairs, DP problems and the estimated dependency graph.

use std::collections::BTreeSet;
use std::fmt;

use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;
use serde::Serialize;
use thiserror::Error;

use crate::filters::{fr_base, lhss};
use crate::rewriting::{next_rule_id, Mtrs, Provenance, Rule, RuleId};
use crate::terms::{rename_apart, tcap, unify, FreshVars, Signature, Term};

/// Minimality flag: chains may be assumed minimal (`m`) or not (`a`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Minimality {
    #[serde(rename = "m")]
    Minimal,
    #[serde(rename = "a")]
    Arbitrary,
}

impl fmt::Display for Minimality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Minimality::Minimal => "m",
            Minimality::Arbitrary => "a",
        })
    }
}

/// What kind of chains the problem is about.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ChainKind {
    Arbitrary,
    Formative,
    Innermost,
}

impl fmt::Display for ChainKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ChainKind::Arbitrary => "arbitrary",
            ChainKind::Formative => "formative",
            ChainKind::Innermost => "innermost",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DpError {
    #[error(
        "a formative start is not available for innermost termination: chains must start from (DP(R), R, m, innermost)"
    )]
    FormativeStartInnermost,
}

/// `(P, R, f1, f2)`. The signature covers both the rules and the marked
/// symbols of the pairs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DpProblem {
    pub pairs: Vec<Rule>,
    pub rules: Vec<Rule>,
    pub minimality: Minimality,
    pub chains: ChainKind,
    pub signature: Signature,
    /// Ids below this may be in use elsewhere in the proof.
    pub id_floor: u32,
}

impl DpProblem {
    pub fn pair_ids(&self) -> BTreeSet<RuleId> {
        crate::rewriting::ids(&self.pairs)
    }

    pub fn rule_ids(&self) -> BTreeSet<RuleId> {
        crate::rewriting::ids(&self.rules)
    }

    pub fn with_pairs(&self, pairs: Vec<Rule>) -> DpProblem {
        DpProblem { pairs, ..self.clone() }
    }

    /// Smallest id not used by any pair or rule of the proof.
    pub fn next_id(&self) -> u32 {
        next_rule_id(self.pairs.iter().chain(&self.rules)).max(self.id_floor)
    }
}

impl fmt::Display for DpProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p: Vec<String> = self.pairs.iter().map(|r| r.id.to_string()).collect();
        let r: Vec<String> = self.rules.iter().map(|r| r.id.to_string()).collect();
        write!(
            f,
            "({{{}}}, {{{}}}, {}, {})",
            p.join(","),
            r.join(","),
            self.minimality,
            self.chains
        )
    }
}

/// `DP(R)` with marked symbols declared in the returned signature. Pair ids
/// continue after the largest rule id; identical pairs from one rule are
/// emitted once.
pub fn dependency_pairs(mtrs: &Mtrs) -> (Signature, Vec<Rule>) {
    let mut sig = mtrs.signature.clone();
    let defined = mtrs.defined_symbols();
    let mut next = next_rule_id(&mtrs.rules);
    let mut pairs = Vec::new();
    for rule in &mtrs.rules {
        let Term::App(f, ls) = &rule.lhs else { continue };
        let lhs = Term::App(sig.mark(f), ls.clone());
        let mut emitted: Vec<Term> = Vec::new();
        for sub in rule.rhs.subterms() {
            let Term::App(g, rs) = sub else { continue };
            if !defined.contains(g) {
                continue;
            }
            let rhs = Term::App(sig.mark(g), rs.clone());
            if emitted.contains(&rhs) {
                continue;
            }
            emitted.push(rhs.clone());
            pairs.push(Rule::new(next, lhs.clone(), rhs).with_provenance(Provenance::Pair { from: rule.id }));
            next += 1;
        }
    }
    (sig, pairs)
}

/// The problem the framework starts from. With `formative_start` the rules
/// are cut down to the formative rules of the pairs and the chains are
/// formative; this is refused for innermost termination.
pub fn initial_problem(mtrs: &Mtrs, formative_start: bool, innermost: bool) -> Result<DpProblem, DpError> {
    if formative_start && innermost {
        return Err(DpError::FormativeStartInnermost);
    }
    let (signature, pairs) = dependency_pairs(mtrs);
    let (rules, chains) = if formative_start {
        let fr = fr_base(&signature, &lhss(&pairs), &mtrs.rules);
        (fr.rules(&mtrs.rules), ChainKind::Formative)
    } else if innermost {
        (mtrs.rules.clone(), ChainKind::Innermost)
    } else {
        (mtrs.rules.clone(), ChainKind::Arbitrary)
    };
    let id_floor = next_rule_id(pairs.iter().chain(&mtrs.rules));
    Ok(DpProblem {
        id_floor,
        pairs,
        rules,
        minimality: Minimality::Minimal,
        chains,
        signature,
    })
}

/// Edge `p → q` iff `TCap(rhs(p))` unifies with `lhs(q)` renamed apart.
pub fn estimated_dependency_graph(problem: &DpProblem) -> DiGraph<RuleId, ()> {
    let mut g = DiGraph::new();
    let nodes: Vec<_> = problem.pairs.iter().map(|p| g.add_node(p.id)).collect();
    let ls = lhss(&problem.rules);
    for (i, p) in problem.pairs.iter().enumerate() {
        let mut fresh = FreshVars::new();
        let capped = tcap(&problem.signature, &p.rhs, &ls, &mut fresh);
        for (j, q) in problem.pairs.iter().enumerate() {
            let target = rename_apart(&[&q.lhs], &mut fresh).remove(0);
            if unify(&problem.signature, &capped, &target).is_some() {
                g.add_edge(nodes[i], nodes[j], ());
            }
        }
    }
    g
}

/// Pair sets of the SCCs that contain a cycle, ordered by their smallest
/// position in `problem.pairs`; pairs keep their order inside a component.
pub fn graph_components(problem: &DpProblem) -> Vec<Vec<Rule>> {
    let g = estimated_dependency_graph(problem);
    let mut comps: Vec<Vec<usize>> = tarjan_scc(&g)
        .into_iter()
        .filter(|c| c.len() > 1 || g.contains_edge(c[0], c[0]))
        .map(|c| {
            let mut idx: Vec<usize> = c.into_iter().map(|n| n.index()).collect();
            idx.sort_unstable();
            idx
        })
        .collect();
    comps.sort();
    comps
        .into_iter()
        .map(|c| c.into_iter().map(|i| problem.pairs[i].clone()).collect())
        .collect()
}
