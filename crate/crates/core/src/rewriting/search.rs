use std::collections::{HashMap, HashSet, VecDeque};

use super::{reducts, ReductionTrace, Rule, Step};
use crate::terms::Term;

/// Bounds for the exhaustive searches below.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchLimits {
    pub max_steps: usize,
    /// Cap on distinct terms visited, and on traces produced.
    pub max_terms: usize,
}

impl SearchLimits {
    pub const DEFAULT_MAX_TERMS: usize = 10_000;

    pub fn steps(max_steps: usize) -> Self {
        SearchLimits {
            max_steps,
            max_terms: Self::DEFAULT_MAX_TERMS,
        }
    }
}

#[derive(Debug, Clone)]
pub struct BoundedReductions {
    pub traces: Vec<ReductionTrace>,
    /// Set when a cap cut the enumeration short.
    pub truncated: bool,
}

/// Every reduction of length at most `limits.max_steps` from `s`, including
/// the empty one, in depth-first order.
pub fn bounded_reductions(s: &Term, rules: &[Rule], limits: SearchLimits) -> BoundedReductions {
    struct Dfs<'a> {
        rules: &'a [Rule],
        limits: SearchLimits,
        start: Term,
        seen: HashSet<Term>,
        out: Vec<ReductionTrace>,
        truncated: bool,
    }
    impl Dfs<'_> {
        fn go(&mut self, t: &Term, steps: &mut Vec<Step>) {
            if self.out.len() >= self.limits.max_terms {
                self.truncated = true;
                return;
            }
            self.out.push(ReductionTrace::new(self.start.clone(), steps.clone()));
            if steps.len() == self.limits.max_steps {
                return;
            }
            for (next, step) in reducts(t, self.rules) {
                if !self.seen.contains(&next) {
                    if self.seen.len() >= self.limits.max_terms {
                        self.truncated = true;
                        continue;
                    }
                    self.seen.insert(next.clone());
                }
                steps.push(step);
                self.go(&next, steps);
                steps.pop();
            }
        }
    }
    let mut dfs = Dfs {
        rules,
        limits,
        start: s.clone(),
        seen: HashSet::from([s.clone()]),
        out: Vec::new(),
        truncated: false,
    };
    dfs.go(s, &mut Vec::new());
    BoundedReductions {
        traces: dfs.out,
        truncated: dfs.truncated,
    }
}

/// Breadth-first reachability with shortest witnessing traces.
#[derive(Debug, Clone)]
pub struct Reachable {
    pub start: Term,
    /// Reached terms in order of discovery (so by distance).
    pub order: Vec<Term>,
    parent: HashMap<Term, Option<(Term, Step)>>,
    pub truncated: bool,
}

impl Reachable {
    pub fn contains(&self, t: &Term) -> bool {
        self.parent.contains_key(t)
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// A shortest trace from the start to `t`.
    pub fn trace_to(&self, t: &Term) -> Option<ReductionTrace> {
        let mut steps = Vec::new();
        let mut cur = t.clone();
        loop {
            match self.parent.get(&cur)? {
                None => break,
                Some((prev, step)) => {
                    steps.push(step.clone());
                    cur = prev.clone();
                }
            }
        }
        steps.reverse();
        Some(ReductionTrace::new(self.start.clone(), steps))
    }
}

pub fn reachable(s: &Term, rules: &[Rule], limits: SearchLimits) -> Reachable {
    let mut parent = HashMap::from([(s.clone(), None)]);
    let mut order = vec![s.clone()];
    let mut queue = VecDeque::from([(s.clone(), 0usize)]);
    let mut truncated = false;
    while let Some((t, d)) = queue.pop_front() {
        if d == limits.max_steps {
            continue;
        }
        for (next, step) in reducts(&t, rules) {
            if parent.contains_key(&next) {
                continue;
            }
            if order.len() >= limits.max_terms {
                truncated = true;
                break;
            }
            parent.insert(next.clone(), Some((t.clone(), step)));
            order.push(next.clone());
            queue.push_back((next, d + 1));
        }
    }
    Reachable {
        start: s.clone(),
        order,
        parent,
        truncated,
    }
}

/// A shortest reduction from `s` to a term satisfying `goal`.
pub fn shortest_trace_to(
    s: &Term,
    rules: &[Rule],
    limits: SearchLimits,
    goal: impl Fn(&Term) -> bool,
) -> Option<ReductionTrace> {
    let r = reachable(s, rules, limits);
    let hit = r.order.iter().find(|t| goal(t))?;
    r.trace_to(hit)
}
