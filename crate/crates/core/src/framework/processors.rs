use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use crate::dp::{graph_components, ChainKind, DpProblem, Minimality};
use crate::filters::{ce_rules, combine_rules, fr_base, fr_tcap, lhss, rhss, sr, ur, ur_tcap};
use crate::orders::{search_reduction_pair, ArgumentFiltering, Candidate, Model, SearchConfig, SearchStats};
use crate::rewriting::{select, Rule, RuleId};
use crate::terms::{Signature, Symbol, Term};

/// Flags before and after a processor step.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct FlagChange {
    pub from: (Minimality, ChainKind),
    pub to: (Minimality, ChainKind),
}

impl FlagChange {
    pub fn of(before: &DpProblem, after: &DpProblem) -> Self {
        FlagChange {
            from: (before.minimality, before.chains),
            to: (after.minimality, after.chains),
        }
    }

    pub fn is_unchanged(&self) -> bool {
        self.from == self.to
    }
}

/// Splits the problem into one problem per cyclic component of the
/// estimated dependency graph. Flags are passed on unchanged.
pub fn dependency_graph(problem: &DpProblem) -> Vec<DpProblem> {
    graph_components(problem)
        .into_iter()
        .map(|pairs| problem.with_pairs(pairs))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrimResult {
    pub problem: DpProblem,
    pub removed: BTreeSet<RuleId>,
    pub flags: FlagChange,
}

/// Replaces the rules by the formative rules of the pairs. For formative
/// chains the flags are kept; otherwise minimality is given up and an
/// innermost flag dropped.
pub fn formative_trim(problem: &DpProblem) -> TrimResult {
    let fr = fr_base(&problem.signature, &lhss(&problem.pairs), &problem.rules);
    let mut out = problem.clone();
    out.rules = fr.rules(&problem.rules);
    if problem.chains != ChainKind::Formative {
        out.minimality = Minimality::Arbitrary;
        out.chains = ChainKind::Arbitrary;
    }
    TrimResult {
        removed: problem.rule_ids().difference(&out.rule_ids()).copied().collect(),
        flags: FlagChange::of(problem, &out),
        problem: out,
    }
}

/// Which rules a reduction pair has to orient.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RuleSelection {
    /// Every rule of the problem.
    AllRules,
    /// Usable rules (plus the `cι` projections for minimal chains).
    Usable,
    /// Formative rules of the filtered pairs within the filtered usable rules.
    Formative,
    /// Split-formative rules over the combined system of the filtered
    /// usable rules, single-sorted.
    SplitFormative,
    /// Formative rules with the filtering and the cap-unification test.
    FilteredFormative,
    /// Split-formative rules with the filtering and the cap-unification test.
    SplitFormativeTcap,
    /// Formative rules intersected with usable rules, both with the cap test.
    UsableFormativeIntersection,
}

impl RuleSelection {
    pub fn name(self) -> &'static str {
        match self {
            RuleSelection::AllRules => "all-rules",
            RuleSelection::Usable => "usable",
            RuleSelection::Formative => "formative",
            RuleSelection::SplitFormative => "split-formative",
            RuleSelection::FilteredFormative => "filtered-formative",
            RuleSelection::SplitFormativeTcap => "split-formative-tcap",
            RuleSelection::UsableFormativeIntersection => "usable-formative-intersection",
        }
    }

    /// Descriptive tag for the proof output.
    pub fn tag(self, chains: ChainKind) -> String {
        match (self, chains) {
            (RuleSelection::AllRules, _) => "reduction-pair".to_string(),
            (_, ChainKind::Innermost) => format!("reduction-pair/innermost-{}", self.name()),
            _ => format!("reduction-pair/{}", self.name()),
        }
    }
}

impl fmt::Display for RuleSelection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A successful reduction pair step.
#[derive(Clone, Debug)]
pub struct PairStep {
    pub selection: RuleSelection,
    pub tag: String,
    pub model: Model,
    /// Rules that are not in the problem but had to be oriented (`cι`
    /// projections and combined rules).
    pub extra_rules: Vec<Rule>,
    pub problem: DpProblem,
    pub stats: SearchStats,
}

#[derive(Clone, Debug)]
pub enum PairOutcome {
    Removed(Box<PairStep>),
    /// No reduction pair was found; the problem stays as it is.
    Failed(SearchStats),
    /// The selection cannot be used on this problem.
    Refused(String),
}

/// Filterable symbols of the problem that occur in its pairs or rules,
/// marked ones first.
fn filter_symbols(problem: &DpProblem) -> Vec<(Symbol, usize)> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    let mut add = |t: &Term, out: &mut Vec<(Symbol, usize)>| {
        for s in t.subterms() {
            if let Term::App(f, args) = s {
                if !problem.signature.is_unfilterable(f) && seen.insert(f.clone()) {
                    out.push((f.clone(), args.len()));
                }
            }
        }
    };
    for p in &problem.pairs {
        add(&p.lhs, &mut out);
        add(&p.rhs, &mut out);
    }
    for r in &problem.rules {
        add(&r.lhs, &mut out);
        add(&r.rhs, &mut out);
    }
    out
}

struct Setup<'a> {
    problem: &'a DpProblem,
    selection: RuleSelection,
    /// Signature with the `cι` symbols added (sorted or collapsed as the
    /// selection needs).
    sig: Signature,
    ce: Vec<Rule>,
    /// Ids above every problem id, for combined rules.
    fresh_id: u32,
    /// Usable rules with the cap test and no filtering, for the intersection.
    ur_unfiltered: Vec<Rule>,
}

impl Setup<'_> {
    fn new(problem: &DpProblem, selection: RuleSelection) -> Setup<'_> {
        let split = matches!(
            selection,
            RuleSelection::SplitFormative | RuleSelection::SplitFormativeTcap
        );
        let base = if split {
            problem.signature.collapse_sorts()
        } else {
            problem.signature.clone()
        };
        let wants_ce = problem.minimality == Minimality::Minimal
            && problem.chains != ChainKind::Innermost
            && selection != RuleSelection::AllRules;
        let (sig, ce) = if wants_ce {
            let c = ce_rules(&base, problem.next_id());
            (c.signature, c.rules)
        } else {
            (base, Vec::new())
        };
        let fresh_id = problem.next_id().max(crate::rewriting::next_rule_id(&ce));
        let ur_unfiltered = if selection == RuleSelection::UsableFormativeIntersection {
            ur_tcap(
                &problem.signature,
                &rhss(&problem.pairs),
                &problem.rules,
                &ArgumentFiltering::trivial(),
            )
            .rules(&problem.rules)
        } else {
            Vec::new()
        };
        Setup {
            problem,
            selection,
            sig,
            ce,
            fresh_id,
            ur_unfiltered,
        }
    }

    /// `U`: all rules for arbitrary chains, usable rules otherwise
    /// (with the `cι` rules unless innermost).
    fn usable(&self, pi: &ArgumentFiltering) -> Vec<Rule> {
        let p = self.problem;
        if p.minimality == Minimality::Arbitrary && p.chains != ChainKind::Innermost {
            return p.rules.clone();
        }
        let mut u = ur(&rhss(&p.pairs), &p.rules, pi).rules(&p.rules);
        u.extend(self.ce.iter().cloned());
        u
    }

    fn build(&self, pi: &ArgumentFiltering) -> Result<Candidate, String> {
        let p = self.problem;
        let pairs = p.pairs.clone();
        let cand = |rules, prefiltered| Candidate {
            pairs: pairs.clone(),
            rules,
            prefiltered,
        };
        match self.selection {
            RuleSelection::AllRules => Ok(cand(p.rules.clone(), Vec::new())),
            RuleSelection::Usable => Ok(cand(self.usable(pi), Vec::new())),
            RuleSelection::Formative => {
                let u = self.usable(pi);
                let fsig = pi.signature(&self.sig);
                let seeds: Vec<Term> = p.pairs.iter().map(|r| pi.apply(&r.lhs)).collect();
                let fr = fr_base(&fsig, &seeds.iter().collect::<Vec<_>>(), &pi.apply_rules(&u));
                Ok(cand(fr.rules(&u), Vec::new()))
            }
            RuleSelection::FilteredFormative => {
                let u = self.usable(pi);
                let fr = fr_tcap(&self.sig, &lhss(&p.pairs), &u, Some(pi));
                Ok(cand(fr.rules(&u), Vec::new()))
            }
            RuleSelection::UsableFormativeIntersection => {
                let rules = if p.minimality == Minimality::Arbitrary && p.chains != ChainKind::Innermost {
                    fr_tcap(&self.sig, &lhss(&p.pairs), &p.rules, Some(pi)).rules(&p.rules)
                } else {
                    let usable = ur_tcap(&self.sig, &rhss(&p.pairs), &p.rules, pi).ids;
                    let mut u = if p.chains == ChainKind::Innermost {
                        select(&p.rules, &usable)
                    } else {
                        self.ur_unfiltered.clone()
                    };
                    u.extend(self.ce.iter().cloned());
                    let fr = fr_tcap(&self.sig, &lhss(&p.pairs), &u, Some(pi)).ids;
                    let keep: BTreeSet<RuleId> = fr
                        .intersection(&usable)
                        .copied()
                        .chain(self.ce.iter().map(|r| r.id))
                        .collect();
                    select(&u, &keep)
                };
                Ok(cand(rules, Vec::new()))
            }
            RuleSelection::SplitFormative => {
                let u: Vec<Rule> = self
                    .usable(pi)
                    .iter()
                    .map(|r| pi.apply_rule(r).map_terms(Term::collapse_sorts))
                    .collect();
                if let Some(bad) = u.iter().find(|r| !r.has_variable_condition()) {
                    return Err(format!(
                        "filtered rule {} ({bad}) violates the variable condition under {pi}",
                        bad.id
                    ));
                }
                let a = combine_rules(&u, self.fresh_id);
                let fsig = pi.signature(&self.sig);
                let seeds: Vec<Term> = p.pairs.iter().map(|r| pi.apply(&r.lhs).collapse_sorts()).collect();
                let chosen = sr(&fsig, &seeds.iter().collect::<Vec<_>>(), &a.rules(), None, false);
                Ok(cand(Vec::new(), chosen.rules(&a.rules())))
            }
            RuleSelection::SplitFormativeTcap => {
                let u: Vec<Rule> = self
                    .usable(pi)
                    .iter()
                    .map(|r| r.map_terms(Term::collapse_sorts))
                    .collect();
                let a = combine_rules(&u, self.fresh_id);
                let seeds: Vec<Term> = p.pairs.iter().map(|r| r.lhs.collapse_sorts()).collect();
                let chosen = sr(&self.sig, &seeds.iter().collect::<Vec<_>>(), &a.rules(), Some(pi), true);
                Ok(cand(chosen.rules(&a.rules()), Vec::new()))
            }
        }
    }
}

/// Searches a reduction pair orienting the rules chosen by `selection` and
/// removes the strictly oriented pairs. Flags are kept.
pub fn reduction_pair(problem: &DpProblem, selection: RuleSelection, config: &SearchConfig) -> PairOutcome {
    let setup = Setup::new(problem, selection);
    let symbols = filter_symbols(problem);
    let outcome = search_reduction_pair(&symbols, |pi| setup.build(pi), config);
    let Some(model) = outcome.model else {
        if let (Some(reason), 0) = (outcome.stats.refusals.first(), outcome.stats.filterings_tried) {
            return PairOutcome::Refused(reason.clone());
        }
        return PairOutcome::Failed(outcome.stats);
    };
    if !model.verify() {
        return PairOutcome::Failed(outcome.stats);
    }
    let own = problem.rule_ids();
    let extra_rules = model.rules.iter().filter(|r| !own.contains(&r.id)).cloned().collect();
    let remaining = problem
        .pairs
        .iter()
        .filter(|p| !model.strict.contains(&p.id))
        .cloned()
        .collect();
    PairOutcome::Removed(Box::new(PairStep {
        selection,
        tag: selection.tag(problem.chains),
        model,
        extra_rules,
        problem: problem.with_pairs(remaining),
        stats: outcome.stats,
    }))
}
