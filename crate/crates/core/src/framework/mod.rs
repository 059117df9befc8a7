//! The dependency pair framework: processors, strategies and proof trees.

mod processors;

pub use processors::{
    dependency_graph, formative_trim, reduction_pair, FlagChange, PairOutcome, PairStep, RuleSelection, TrimResult,
};

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::dp::{initial_problem, ChainKind, DpError, DpProblem, Minimality};
use crate::orders::{compare, FilterSpace, SearchConfig};
use crate::rewriting::{Mtrs, RuleId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FrameworkError {
    #[error("unknown strategy {0:?} (expected default, usable-only, formative, split-formative or aprove)")]
    UnknownStrategy(String),
    #[error(transparent)]
    Dp(#[from] DpError),
}

/// Which reduction pair variants the prover tries, in order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Strategy {
    /// Formative rules, falling back to split-formative rules.
    #[default]
    Default,
    UsableOnly,
    Formative,
    SplitFormative,
    /// Cap-refined usable rules intersected with cap-refined formative rules.
    Aprove,
}

impl Strategy {
    pub fn name(self) -> &'static str {
        match self {
            Strategy::Default => "default",
            Strategy::UsableOnly => "usable-only",
            Strategy::Formative => "formative",
            Strategy::SplitFormative => "split-formative",
            Strategy::Aprove => "aprove",
        }
    }

    pub fn selections(self) -> &'static [RuleSelection] {
        match self {
            Strategy::Default => &[RuleSelection::Formative, RuleSelection::SplitFormative],
            Strategy::UsableOnly => &[RuleSelection::Usable],
            Strategy::Formative => &[RuleSelection::Formative],
            Strategy::SplitFormative => &[RuleSelection::SplitFormative],
            Strategy::Aprove => &[RuleSelection::UsableFormativeIntersection],
        }
    }

    /// Whether formative chains get their rules trimmed between steps.
    fn trims(self) -> bool {
        self != Strategy::UsableOnly
    }
}

impl FromStr for Strategy {
    type Err = FrameworkError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "default" => Strategy::Default,
            "usable-only" => Strategy::UsableOnly,
            "formative" => Strategy::Formative,
            "split-formative" => Strategy::SplitFormative,
            "aprove" => Strategy::Aprove,
            _ => return Err(FrameworkError::UnknownStrategy(s.to_string())),
        })
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug)]
pub struct ProveConfig {
    pub strategy: Strategy,
    pub coef_bound: u32,
    /// Prove innermost termination (also set by the input's strategy).
    pub innermost: bool,
    /// `None`: on for full termination, off for innermost.
    pub formative_start: Option<bool>,
    pub timeout: Duration,
    /// Interpretation-search nodes per filtering.
    pub node_budget: u64,
    pub filter_space: FilterSpace,
}

impl Default for ProveConfig {
    fn default() -> Self {
        ProveConfig {
            strategy: Strategy::Default,
            coef_bound: 3,
            innermost: false,
            formative_start: None,
            timeout: Duration::from_secs(60),
            node_budget: 200_000,
            filter_space: FilterSpace::Restricted,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Yes,
    Maybe,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Yes => "YES",
            Verdict::Maybe => "MAYBE",
        })
    }
}

/// How the initial problem was obtained from the rewrite system.
#[derive(Clone, Debug)]
pub struct Start {
    pub formative: bool,
    /// User rules dropped by the formative start.
    pub removed: BTreeSet<RuleId>,
}

impl Start {
    pub fn tag(&self) -> &'static str {
        if self.formative {
            "formative-start"
        } else {
            "dependency-pairs"
        }
    }
}

#[derive(Clone, Debug)]
pub struct Proof {
    pub verdict: Verdict,
    pub start: Start,
    pub root: ProofNode,
}

impl Proof {
    /// Problems left open.
    pub fn open_problems(&self) -> Vec<&DpProblem> {
        let mut out = Vec::new();
        self.root.walk(&mut |n| {
            if let Outcome::Open { .. } = n.outcome {
                out.push(&n.problem);
            }
        });
        out
    }
}

#[derive(Clone, Debug)]
pub struct ProofNode {
    pub problem: DpProblem,
    pub outcome: Outcome,
}

#[derive(Clone, Debug)]
pub enum Outcome {
    /// No pairs left.
    Qed,
    Open {
        reason: String,
    },
    Graph {
        children: Vec<ProofNode>,
    },
    Trim {
        removed: BTreeSet<RuleId>,
        flags: FlagChange,
        child: Box<ProofNode>,
    },
    ReductionPair {
        step: Box<PairStep>,
        child: Box<ProofNode>,
    },
}

impl Outcome {
    pub fn kind(&self) -> &'static str {
        match self {
            Outcome::Qed => "qed",
            Outcome::Open { .. } => "open",
            Outcome::Graph { .. } => "dependency-graph",
            Outcome::Trim { .. } => "formative-trim",
            Outcome::ReductionPair { .. } => "reduction-pair",
        }
    }

    /// Descriptive tag of the step taken.
    pub fn tag(&self) -> String {
        match self {
            Outcome::Qed | Outcome::Open { .. } => self.kind().to_string(),
            Outcome::Graph { .. } => "dependency-graph".to_string(),
            Outcome::Trim { flags, .. } => {
                if flags.is_unchanged() {
                    "formative-trim/flag-preserving".to_string()
                } else {
                    "formative-trim".to_string()
                }
            }
            Outcome::ReductionPair { step, .. } => step.tag.clone(),
        }
    }

    pub fn children(&self) -> Vec<&ProofNode> {
        match self {
            Outcome::Qed | Outcome::Open { .. } => Vec::new(),
            Outcome::Graph { children } => children.iter().collect(),
            Outcome::Trim { child, .. } | Outcome::ReductionPair { child, .. } => vec![child],
        }
    }
}

impl ProofNode {
    pub fn walk<'a>(&'a self, f: &mut impl FnMut(&'a ProofNode)) {
        f(self);
        for c in self.outcome.children() {
            c.walk(f);
        }
    }

    pub fn is_closed(&self) -> bool {
        match &self.outcome {
            Outcome::Qed => true,
            Outcome::Open { .. } => false,
            o => o.children().iter().all(|c| c.is_closed()),
        }
    }
}

/// Re-checks every reduction pair certificate in the tree with [`compare`]
/// alone.
pub fn replay(node: &ProofNode) -> bool {
    let mut ok = true;
    node.walk(&mut |n| {
        if let Outcome::ReductionPair { step, .. } = &n.outcome {
            let m = &step.model;
            ok &= !m.strict.is_empty()
                && m.constraints.iter().all(|(_, c)| compare(&m.interpretation, c))
                && m.strict
                    .iter()
                    .all(|id| m.constraints.iter().any(|(i, c)| i == id && c.strict));
        }
    });
    ok
}

/// No step upgrades minimality from `a` to `m`, or turns arbitrary chains
/// into formative or innermost ones.
pub fn flags_respected(node: &ProofNode) -> bool {
    let mut ok = true;
    node.walk(&mut |n| {
        for c in n.outcome.children() {
            let (a, b) = (&n.problem, &c.problem);
            ok &= !(a.minimality == Minimality::Arbitrary && b.minimality == Minimality::Minimal);
            ok &= !(a.chains == ChainKind::Arbitrary && b.chains != ChainKind::Arbitrary);
        }
    });
    ok
}

struct Prover<'a> {
    config: &'a ProveConfig,
    deadline: Instant,
}

impl Prover<'_> {
    fn search_config(&self) -> SearchConfig {
        SearchConfig {
            coef_bound: self.config.coef_bound,
            filter_space: self.config.filter_space,
            max_filtered_symbols: 2,
            node_budget: self.config.node_budget,
            deadline: Some(self.deadline),
        }
    }

    fn solve(&self, problem: DpProblem, after_graph: bool) -> ProofNode {
        if problem.pairs.is_empty() {
            return ProofNode {
                problem,
                outcome: Outcome::Qed,
            };
        }
        if Instant::now() >= self.deadline {
            return open(problem, "time budget exhausted");
        }
        if !after_graph {
            let comps = dependency_graph(&problem);
            if comps.len() != 1 || comps[0].pairs.len() != problem.pairs.len() {
                let children = comps.into_iter().map(|p| self.solve(p, true)).collect();
                return ProofNode {
                    problem,
                    outcome: Outcome::Graph { children },
                };
            }
        }
        if self.config.strategy.trims() && problem.chains == ChainKind::Formative {
            let t = formative_trim(&problem);
            if !t.removed.is_empty() {
                let child = self.solve(t.problem, true);
                return ProofNode {
                    problem,
                    outcome: Outcome::Trim {
                        removed: t.removed,
                        flags: t.flags,
                        child: Box::new(child),
                    },
                };
            }
        }
        let mut notes = Vec::new();
        let mut exhausted = false;
        for &sel in self.config.strategy.selections() {
            match reduction_pair(&problem, sel, &self.search_config()) {
                PairOutcome::Removed(step) => {
                    let child = self.solve(step.problem.clone(), false);
                    return ProofNode {
                        problem,
                        outcome: Outcome::ReductionPair {
                            step,
                            child: Box::new(child),
                        },
                    };
                }
                PairOutcome::Failed(stats) => {
                    exhausted |= stats.budget_exhausted;
                    notes.push(format!("{sel}: no reduction pair found"));
                }
                PairOutcome::Refused(reason) => notes.push(format!("{sel}: refused ({reason})")),
            }
        }
        if exhausted {
            notes.push("search budget exhausted".to_string());
        }
        open(problem, &notes.join("; "))
    }
}

fn open(problem: DpProblem, reason: &str) -> ProofNode {
    ProofNode {
        problem,
        outcome: Outcome::Open {
            reason: reason.to_string(),
        },
    }
}

/// Tries to prove `mtrs` terminating (innermost terminating when
/// `innermost` is set). Answers `YES` iff every problem is discharged.
pub fn prove(mtrs: &Mtrs, config: &ProveConfig) -> Result<Proof, FrameworkError> {
    let start = Instant::now();
    let formative = config.formative_start.unwrap_or(!config.innermost);
    let problem = initial_problem(mtrs, formative, config.innermost)?;
    let kept: BTreeSet<RuleId> = problem.rule_ids();
    let removed = mtrs
        .rules
        .iter()
        .map(|r| r.id)
        .filter(|id| !kept.contains(id))
        .collect();
    let prover = Prover {
        config,
        deadline: start + config.timeout,
    };
    let root = prover.solve(problem, false);
    let verdict = if root.is_closed() { Verdict::Yes } else { Verdict::Maybe };
    Ok(Proof {
        verdict,
        start: Start { formative, removed },
        root,
    })
}
