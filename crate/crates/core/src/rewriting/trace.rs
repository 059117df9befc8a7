use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use super::{Rule, RuleId};
use crate::terms::{Position, Substitution, Term};

/// One rewrite step: `rule` applied at `position` with matcher `subst`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Step {
    pub position: Position,
    pub rule: Rule,
    pub subst: Substitution,
}

impl Step {
    /// Rewrites `t`, checking that the redex really is `lhs·subst`.
    pub fn apply(&self, t: &Term) -> Option<Term> {
        let redex = t.subterm_at(&self.position)?;
        if *redex != self.subst.apply(&self.rule.lhs) {
            return None;
        }
        Some(t.replace_at(&self.position.0, self.subst.apply(&self.rule.rhs)))
    }

    /// The same step performed inside argument `i`.
    pub fn lift(&self, i: usize) -> Step {
        Step {
            position: self.position.prepend(i),
            ..self.clone()
        }
    }

    /// The same step performed at `prefix.position`.
    pub fn lift_to(&self, prefix: &Position) -> Step {
        let mut p = prefix.0.clone();
        p.extend_from_slice(&self.position.0);
        Step {
            position: Position(p),
            ..self.clone()
        }
    }
}

impl fmt::Debug for Step {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{} @ {} with {}]", self.rule.id, self.position, self.subst)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TraceError {
    #[error("step {index} ({rule} at {position}) does not apply")]
    StepMismatch {
        index: usize,
        rule: RuleId,
        position: Position,
    },
}

/// A reduction `start → … → end`, recorded step by step.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ReductionTrace {
    pub start: Term,
    pub steps: Vec<Step>,
}

impl ReductionTrace {
    pub fn empty(start: Term) -> Self {
        ReductionTrace {
            start,
            steps: Vec::new(),
        }
    }

    pub fn new(start: Term, steps: Vec<Step>) -> Self {
        ReductionTrace { start, steps }
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// All intermediate terms, starting with `start`; fails on the first step
    /// that does not fit.
    pub fn terms(&self) -> Result<Vec<Term>, TraceError> {
        let mut out = vec![self.start.clone()];
        for (index, step) in self.steps.iter().enumerate() {
            let next = step
                .apply(out.last().unwrap())
                .ok_or_else(|| TraceError::StepMismatch {
                    index,
                    rule: step.rule.id,
                    position: step.position.clone(),
                })?;
            out.push(next);
        }
        Ok(out)
    }

    pub fn end(&self) -> Result<Term, TraceError> {
        Ok(self.terms()?.pop().unwrap())
    }

    pub fn rules_used(&self) -> BTreeSet<RuleId> {
        self.steps.iter().map(|s| s.rule.id).collect()
    }

    /// Every step uses a rule from `rules` (compared by id and shape).
    pub fn uses_only(&self, rules: &[Rule]) -> bool {
        self.steps.iter().all(|s| {
            rules
                .iter()
                .any(|r| r.id == s.rule.id && r.lhs == s.rule.lhs && r.rhs == s.rule.rhs)
        })
    }
}

impl fmt::Debug for ReductionTrace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.start)?;
        match self.terms() {
            Ok(ts) => {
                for (t, s) in ts.iter().skip(1).zip(&self.steps) {
                    write!(f, " →[{}@{}] {}", s.rule.id, s.position, t)?;
                }
                Ok(())
            }
            Err(e) => write!(f, " <invalid: {e}>"),
        }
    }
}
