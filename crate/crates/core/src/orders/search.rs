use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::time::Instant;

use super::poly::{form_with, LinearForm};
use super::{compare, ArgumentFiltering, Constraint, Interpretation, LinearPoly};
use crate::rewriting::{Rule, RuleId};
use crate::terms::{Symbol, Term};

type TermPair = (Term, Term);

/// Which filterings the search may try for a symbol.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum FilterSpace {
    /// Keep everything, a single argument, or nothing.
    #[default]
    Restricted,
    /// Every subset of the arguments, for symbols of arity at most 3
    /// (larger symbols fall back to the restricted choices).
    Powerset,
}

#[derive(Clone, Debug)]
pub struct SearchConfig {
    /// Largest coefficient or constant tried.
    pub coef_bound: u32,
    pub filter_space: FilterSpace,
    /// How many symbols may be filtered non-trivially at once.
    pub max_filtered_symbols: usize,
    /// Interpretation-search nodes allowed per filtering.
    pub node_budget: u64,
    pub deadline: Option<Instant>,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            coef_bound: 3,
            filter_space: FilterSpace::Restricted,
            max_filtered_symbols: 2,
            node_budget: 200_000,
            deadline: None,
        }
    }
}

impl SearchConfig {
    fn out_of_time(&self) -> bool {
        self.deadline.is_some_and(|d| Instant::now() >= d)
    }
}

/// The pairs and rules a reduction pair has to orient under some filtering.
/// `pairs` and `rules` are given unfiltered; `prefiltered` rules are used
/// as they are.
#[derive(Clone, Debug, Default)]
pub struct Candidate {
    pub pairs: Vec<Rule>,
    pub rules: Vec<Rule>,
    pub prefiltered: Vec<Rule>,
}

/// A reduction pair found by the search.
#[derive(Clone, Debug)]
pub struct Model {
    pub filtering: ArgumentFiltering,
    pub interpretation: Interpretation,
    /// Pairs oriented strictly.
    pub strict: BTreeSet<RuleId>,
    /// Filtered constraints that were checked, labelled by rule id; pairs in
    /// `strict` appear as strict constraints.
    pub constraints: Vec<(RuleId, Constraint)>,
    /// The rules that had to be oriented weakly, as given in the candidate.
    pub rules: Vec<Rule>,
}

impl Model {
    /// Re-checks every recorded constraint with [`compare`].
    pub fn verify(&self) -> bool {
        !self.strict.is_empty() && self.constraints.iter().all(|(_, c)| compare(&self.interpretation, c))
    }
}

#[derive(Clone, Debug, Default)]
pub struct SearchStats {
    pub filterings_tried: usize,
    pub nodes: u64,
    /// A node budget or the deadline cut some search short.
    pub budget_exhausted: bool,
    /// Reasons given for filterings whose constraints could not be built.
    pub refusals: Vec<String>,
}

#[derive(Clone, Debug)]
pub struct SearchOutcome {
    pub model: Option<Model>,
    pub stats: SearchStats,
}

/// Searches filterings (trivial first, then one changed symbol, then two, …)
/// and, for each, linear interpretations with coefficients in
/// `0..=coef_bound`. `build` gives the pairs and rules to orient under a
/// filtering, or a reason why that filtering cannot be used. The first
/// model that orients all pairs weakly, at least one strictly, and all rules
/// weakly is returned.
pub fn search_reduction_pair(
    symbols: &[(Symbol, usize)],
    mut build: impl FnMut(&ArgumentFiltering) -> Result<Candidate, String>,
    config: &SearchConfig,
) -> SearchOutcome {
    let mut stats = SearchStats::default();
    let mut tried: HashSet<(Vec<TermPair>, Vec<TermPair>)> = HashSet::new();
    for pi in filterings(symbols, config) {
        if config.out_of_time() {
            stats.budget_exhausted = true;
            break;
        }
        let cand = match build(&pi) {
            Ok(c) => c,
            Err(reason) => {
                stats.refusals.push(reason);
                continue;
            }
        };
        let pairs: Vec<(Term, Term)> = cand
            .pairs
            .iter()
            .map(|p| (pi.apply(&p.lhs), pi.apply(&p.rhs)))
            .collect();
        let rules: Vec<(Term, Term)> = cand
            .rules
            .iter()
            .map(|r| (pi.apply(&r.lhs), pi.apply(&r.rhs)))
            .chain(cand.prefiltered.iter().map(|r| (r.lhs.clone(), r.rhs.clone())))
            .collect();
        if !tried.insert((pairs.clone(), rules.clone())) {
            continue;
        }
        stats.filterings_tried += 1;
        let weak: Vec<Constraint> = rules
            .iter()
            .map(|(l, r)| Constraint::weak(l.clone(), r.clone()))
            .collect();
        let found = find_interpretation(&weak, &pairs, config.coef_bound, config.node_budget, config.deadline);
        stats.nodes += found.nodes;
        stats.budget_exhausted |= found.exhausted;
        if let Some((interpretation, strict_flags)) = found.model {
            let mut constraints = Vec::new();
            let mut strict = BTreeSet::new();
            for ((p, (l, r)), s) in cand.pairs.iter().zip(&pairs).zip(&strict_flags) {
                if *s {
                    strict.insert(p.id);
                }
                constraints.push((
                    p.id,
                    Constraint {
                        lhs: l.clone(),
                        rhs: r.clone(),
                        strict: *s,
                    },
                ));
            }
            let all_rules: Vec<Rule> = cand.rules.into_iter().chain(cand.prefiltered).collect();
            for (rule, c) in all_rules.iter().zip(weak) {
                constraints.push((rule.id, c));
            }
            return SearchOutcome {
                model: Some(Model {
                    filtering: pi,
                    interpretation,
                    strict,
                    constraints,
                    rules: all_rules,
                }),
                stats,
            };
        }
    }
    SearchOutcome { model: None, stats }
}

fn choices(arity: usize, space: FilterSpace) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if space == FilterSpace::Powerset && arity <= 3 {
        for size in (0..arity).rev() {
            for mask in 0u32..(1 << arity) {
                if mask.count_ones() as usize == size {
                    out.push((0..arity).filter(|i| mask & (1 << i) != 0).map(|i| i + 1).collect());
                }
            }
        }
        return out;
    }
    if arity > 1 {
        out.extend((1..=arity).map(|i| vec![i]));
    }
    out.push(Vec::new());
    out
}

/// The filterings to try, in order.
pub fn filterings(symbols: &[(Symbol, usize)], config: &SearchConfig) -> Vec<ArgumentFiltering> {
    let per_symbol: Vec<(Symbol, Vec<Vec<usize>>)> = symbols
        .iter()
        .filter(|(_, n)| *n > 0)
        .map(|(f, n)| (f.clone(), choices(*n, config.filter_space)))
        .collect();
    let mut out = vec![ArgumentFiltering::trivial()];
    fn extend(
        per_symbol: &[(Symbol, Vec<Vec<usize>>)],
        from: usize,
        left: usize,
        current: &ArgumentFiltering,
        out: &mut Vec<ArgumentFiltering>,
    ) {
        if left == 0 {
            out.push(current.clone());
            return;
        }
        for k in from..per_symbol.len() {
            let (f, cs) = &per_symbol[k];
            for c in cs {
                let mut next = current.clone();
                next.set(f.clone(), c.clone());
                extend(per_symbol, k + 1, left - 1, &next, out);
            }
        }
    }
    for k in 1..=config.max_filtered_symbols {
        extend(&per_symbol, 0, k, &ArgumentFiltering::trivial(), &mut out);
    }
    out
}

pub struct Found {
    /// The interpretation and, per pair, whether it is oriented strictly.
    pub model: Option<(Interpretation, Vec<bool>)>,
    pub nodes: u64,
    pub exhausted: bool,
}

/// Backtracking search for an interpretation satisfying `constraints` as
/// stated and orienting every pair weakly and at least one strictly (when
/// there are pairs).
pub fn find_interpretation(
    constraints: &[Constraint],
    pairs: &[(Term, Term)],
    bound: u32,
    node_budget: u64,
    deadline: Option<Instant>,
) -> Found {
    let mut all: Vec<Constraint> = constraints.to_vec();
    let first_pair = all.len();
    all.extend(pairs.iter().map(|(l, r)| Constraint::weak(l.clone(), r.clone())));

    let mut arities: BTreeMap<Symbol, usize> = BTreeMap::new();
    let mut uses: Vec<BTreeSet<Symbol>> = Vec::new();
    for c in &all {
        let mut s = BTreeSet::new();
        for t in [&c.lhs, &c.rhs] {
            for sub in t.subterms() {
                if let Term::App(f, args) = sub {
                    arities.insert(f.clone(), args.len());
                    s.insert(f.clone());
                }
            }
        }
        uses.push(s);
    }

    // Outermost symbols first, then the most frequent.
    let mut depth: BTreeMap<Symbol, (usize, usize)> = BTreeMap::new();
    for c in &all {
        for t in [&c.lhs, &c.rhs] {
            for (pos, sub) in t.positions() {
                if let Term::App(f, _) = sub {
                    let e = depth.entry(f.clone()).or_insert((usize::MAX, 0));
                    e.0 = e.0.min(pos.0.len());
                    e.1 += 1;
                }
            }
        }
    }
    let mut order: Vec<Symbol> = arities.keys().cloned().collect();
    order.sort_by_key(|f| {
        let (d, n) = depth[f];
        (d, std::cmp::Reverse(n))
    });

    let mut s = Search {
        all,
        first_pair,
        uses,
        order,
        arities,
        bound,
        assigned: BTreeMap::new(),
        nodes: 0,
        budget: node_budget,
        deadline,
        exhausted: false,
    };
    for c in 0..s.all.len() {
        if s.uses[c].is_empty() && !s.holds(c) {
            return Found {
                model: None,
                nodes: 0,
                exhausted: false,
            };
        }
    }
    let ok = s.go(0);
    let model = ok.then(|| {
        let interp = Interpretation(s.assigned.clone());
        let flags = (s.first_pair..s.all.len())
            .map(|c| {
                let mut strict = s.all[c].clone();
                strict.strict = true;
                compare(&interp, &strict)
            })
            .collect();
        (interp, flags)
    });
    Found {
        model,
        nodes: s.nodes,
        exhausted: s.exhausted,
    }
}

struct Search {
    all: Vec<Constraint>,
    first_pair: usize,
    uses: Vec<BTreeSet<Symbol>>,
    order: Vec<Symbol>,
    arities: BTreeMap<Symbol, usize>,
    bound: u32,
    assigned: BTreeMap<Symbol, LinearPoly>,
    nodes: u64,
    budget: u64,
    deadline: Option<Instant>,
    exhausted: bool,
}

impl Search {
    fn form(&self, t: &Term, fill: u32) -> LinearForm {
        let fills: BTreeMap<Symbol, LinearPoly> = self
            .arities
            .iter()
            .filter(|(f, _)| !self.assigned.contains_key(*f))
            .map(|(f, &n)| (f.clone(), LinearPoly::new(vec![fill; n], fill)))
            .collect();
        form_with(t, &|f| self.assigned.get(f).or_else(|| fills.get(f))).expect("all symbols have arities")
    }

    /// Upper bound of `[lhs] − [rhs]` over all completions.
    fn best_case(&self, c: usize) -> LinearForm {
        self.form(&self.all[c].lhs, self.bound)
            .minus(&self.form(&self.all[c].rhs, 0))
    }

    fn complete(&self, c: usize) -> bool {
        self.uses[c].iter().all(|f| self.assigned.contains_key(f))
    }

    fn holds(&self, c: usize) -> bool {
        let d = self.best_case(c);
        d.is_nonnegative() && (!self.all[c].strict || d.constant > 0)
    }

    fn can_be_strict(&self, c: usize) -> bool {
        let d = self.best_case(c);
        d.is_nonnegative() && d.constant > 0
    }

    fn consistent(&self, f: &Symbol) -> bool {
        for c in 0..self.all.len() {
            if self.uses[c].contains(f) && !self.holds(c) {
                return false;
            }
        }
        self.first_pair == self.all.len() || (self.first_pair..self.all.len()).any(|c| self.can_be_strict(c))
    }

    fn go(&mut self, k: usize) -> bool {
        if k == self.order.len() {
            return (0..self.all.len()).all(|c| self.complete(c) && self.holds(c))
                && (self.first_pair == self.all.len()
                    || (self.first_pair..self.all.len()).any(|c| self.can_be_strict(c)));
        }
        let f = self.order[k].clone();
        let n = self.arities[&f];
        let mut values = vec![0u32; n + 1];
        loop {
            self.nodes += 1;
            if self.nodes > self.budget
                || (self.nodes.is_multiple_of(1024) && self.deadline.is_some_and(|d| Instant::now() >= d))
            {
                self.exhausted = true;
                self.assigned.remove(&f);
                return false;
            }
            self.assigned
                .insert(f.clone(), LinearPoly::new(values[..n].to_vec(), values[n]));
            if self.consistent(&f) && self.go(k + 1) {
                return true;
            }
            if self.exhausted {
                self.assigned.remove(&f);
                return false;
            }
            // Next vector in lexicographic order.
            let mut i = n + 1;
            loop {
                if i == 0 {
                    self.assigned.remove(&f);
                    return false;
                }
                i -= 1;
                if values[i] < self.bound {
                    values[i] += 1;
                    for v in &mut values[i + 1..] {
                        *v = 0;
                    }
                    break;
                }
            }
        }
    }
}
