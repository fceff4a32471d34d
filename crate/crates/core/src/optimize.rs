//! Constrained optimisation: finding feasible outcomes that no other
//! feasible outcome dominates.
//!
//! The search assigns variables in dependency order, trying each root value
//! best first, propagating the hard constraints after every choice and
//! splitting the remaining net into independent components. Candidates are
//! produced best first, so each one is only compared with the solutions
//! already kept and the first needs no comparison at all.
//!
//! Reduction forgets importance that runs through assigned variables, and
//! improving sequences may change those variables on the way, so the order
//! is not always exact. With `certify` on, every outcome is checked for a
//! feasible dominator before it is emitted; emitted outcomes are then
//! always optimal and never withdrawn.

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;
use core::num::NonZeroUsize;

use thiserror::Error;

use crate::consistency::{dependency_graph, is_conditionally_acyclic};
use crate::model::{
    CiArc, ConstraintSet, Cpt, MixedRadix, ModelError, Outcome, PartialAssignment, TcpNet, VarId, Variable,
};
use crate::semantics::{dominates_with, find_dominating, DominanceLimits, SemanticsError, DEFAULT_OUTCOME_CAP};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OptimizeError {
    #[error("the net is not conditionally acyclic")]
    NotConditionallyAcyclic,
    #[error("no outcome satisfies the constraints")]
    Infeasible,
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Raised when propagation empties a domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("constraints are inconsistent with the current assignment")]
pub struct Inconsistent;

/// Best completion of `given`: unassigned variables take their most
/// preferred value given their parents, in topological order.
pub fn complete_outcome(net: &TcpNet, given: &PartialAssignment) -> Result<Outcome, OptimizeError> {
    given.check(net)?;
    let order = dependency_graph(net)
        .topological_order()
        .ok_or(OptimizeError::NotConditionallyAcyclic)?;
    let mut values = vec![0; net.len()];
    for v in order {
        values[v.0] = match given.get(v) {
            Some(x) => x,
            None => {
                let cpt = net.cpt(v);
                cpt.best(cpt.row_index(|p| values[p.0]))
            }
        };
    }
    Ok(Outcome::new(values))
}

// ---------------------------------------------------------------------------
// Constraint propagation
// ---------------------------------------------------------------------------

/// Current domains of every variable, kept generalised arc consistent with
/// respect to a constraint set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstraintStore<'c> {
    constraints: &'c ConstraintSet,
    domains: Vec<Vec<bool>>,
}

impl<'c> ConstraintStore<'c> {
    pub fn new(net: &TcpNet, constraints: &'c ConstraintSet) -> Result<Self, Inconsistent> {
        let mut store = ConstraintStore {
            constraints,
            domains: net.var_ids().map(|v| vec![true; net.domain_size(v)]).collect(),
        };
        store.fixpoint()?;
        Ok(store)
    }

    pub fn contains(&self, v: VarId, value: usize) -> bool {
        self.domains[v.0].get(value).copied().unwrap_or(false)
    }

    pub fn domain(&self, v: VarId) -> Vec<usize> {
        (0..self.domains[v.0].len()).filter(|&x| self.domains[v.0][x]).collect()
    }

    pub fn size(&self, v: VarId) -> usize {
        self.domains[v.0].iter().filter(|&&b| b).count()
    }

    pub fn singleton(&self, v: VarId) -> Option<usize> {
        let d = self.domain(v);
        (d.len() == 1).then(|| d[0])
    }

    /// Every variable whose domain is down to one value.
    pub fn induced(&self) -> PartialAssignment {
        (0..self.domains.len())
            .filter_map(|v| self.singleton(VarId(v)).map(|x| (VarId(v), x)))
            .collect()
    }

    /// Fixes `v = value` and propagates.
    pub fn assign(&self, v: VarId, value: usize) -> Result<Self, Inconsistent> {
        if !self.contains(v, value) {
            return Err(Inconsistent);
        }
        let mut next = self.clone();
        for (x, slot) in next.domains[v.0].iter_mut().enumerate() {
            *slot = x == value;
        }
        next.fixpoint()?;
        Ok(next)
    }

    /// Every domain other than `except`'s is a subset of the corresponding
    /// domain in `other`.
    pub fn subsumed_by(&self, other: &ConstraintStore<'_>, except: VarId) -> bool {
        self.domains.iter().zip(&other.domains).enumerate().all(|(v, (mine, theirs))| {
            v == except.0 || mine.iter().zip(theirs).all(|(&m, &t)| !m || t)
        })
    }

    fn fixpoint(&mut self) -> Result<(), Inconsistent> {
        if self.domains.iter().any(|d| !d.contains(&true)) {
            return Err(Inconsistent);
        }
        let mut changed = true;
        while changed {
            changed = false;
            for c in self.constraints.constraints() {
                let scope = c.scope();
                let mut supported: Vec<Vec<bool>> = scope.iter().map(|v| vec![false; self.domains[v.0].len()]).collect();
                for tuple in c.allowed() {
                    if tuple.iter().zip(scope).all(|(&x, v)| self.domains[v.0][x]) {
                        for (i, &x) in tuple.iter().enumerate() {
                            supported[i][x] = true;
                        }
                    }
                }
                for (i, v) in scope.iter().enumerate() {
                    for (slot, &ok) in self.domains[v.0].iter_mut().zip(&supported[i]) {
                        if *slot && !ok {
                            *slot = false;
                            changed = true;
                        }
                    }
                    if !self.domains[v.0].contains(&true) {
                        return Err(Inconsistent);
                    }
                }
            }
        }
        Ok(())
    }
}

/// Propagates `assignment` through `constraints` from full domains.
pub fn propagate<'c>(
    net: &TcpNet,
    constraints: &'c ConstraintSet,
    assignment: &PartialAssignment,
) -> Result<ConstraintStore<'c>, Inconsistent> {
    let mut store = ConstraintStore::new(net, constraints)?;
    for (v, x) in assignment.iter() {
        store = store.assign(v, x)?;
    }
    Ok(store)
}

// ---------------------------------------------------------------------------
// Reduction
// ---------------------------------------------------------------------------

/// Conditions `net` on `assignment` and removes the assigned variables.
///
/// CPTs keep the rows matching the assignment. A ci-arc whose selector lost
/// variables keeps only the matching CIT rows: with none left it disappears;
/// with an empty remaining selector, or a total table that always picks the
/// same endpoint, it becomes an i-arc.
pub fn reduce(net: &TcpNet, assignment: &PartialAssignment) -> Result<TcpNet, ModelError> {
    assignment.check(net)?;
    let keep: Vec<VarId> = net.var_ids().filter(|&v| !assignment.contains(v)).collect();
    Ok(project(net, &keep, assignment))
}

/// The sub-net over `keep`, which must be closed under parents and
/// selectors.
pub(crate) fn induced_subnet(net: &TcpNet, keep: &[VarId]) -> TcpNet {
    project(net, keep, &PartialAssignment::new())
}

fn project(net: &TcpNet, keep: &[VarId], fixed: &PartialAssignment) -> TcpNet {
    let mut new_id = vec![None; net.len()];
    for (i, &v) in keep.iter().enumerate() {
        new_id[v.0] = Some(VarId(i));
    }
    let value_of = |v: VarId| fixed.get(v).expect("dropped variable must be assigned");

    let variables: Vec<Variable> = keep.iter().map(|&v| net.variable(v).clone()).collect();
    let cpts = keep
        .iter()
        .map(|&v| {
            let cpt = net.cpt(v);
            let parents: Vec<VarId> = cpt.parents().iter().copied().filter(|p| new_id[p.0].is_some()).collect();
            let radices: Vec<usize> = parents.iter().map(|&p| net.domain_size(p)).collect();
            let rows = MixedRadix::new(&radices)
                .map(|digits| {
                    let row = cpt.row_index(|p| match parents.iter().position(|&q| q == p) {
                        Some(i) => digits[i],
                        None => value_of(p),
                    });
                    cpt.order(row).to_vec()
                })
                .collect();
            let parents = parents.iter().map(|p| new_id[p.0].unwrap()).collect();
            Cpt::new(parents, radices, rows)
        })
        .collect();

    let mut i_arcs: BTreeSet<(VarId, VarId)> = net
        .i_arcs()
        .iter()
        .filter_map(|&(a, b)| Some((new_id[a.0]?, new_id[b.0]?)))
        .collect();
    let mut ci_arcs = Vec::new();
    for arc in net.ci_arcs() {
        let (a, b) = arc.endpoints();
        let (Some(na), Some(nb)) = (new_id[a.0], new_id[b.0]) else {
            continue;
        };
        let kept: Vec<usize> = (0..arc.selector().len())
            .filter(|&i| new_id[arc.selector()[i].0].is_some())
            .collect();
        if kept.len() == arc.selector().len() {
            let selector = arc.selector().iter().map(|z| new_id[z.0].unwrap()).collect();
            let rows = arc.rows().iter().map(|(k, m)| (k.clone(), new_id[m.0].unwrap())).collect();
            ci_arcs.push(CiArc::new((na, nb), selector, rows));
            continue;
        }
        let rows: Vec<(Vec<usize>, VarId)> = arc
            .rows()
            .iter()
            .filter(|(key, _)| {
                key.iter()
                    .zip(arc.selector())
                    .enumerate()
                    .all(|(i, (&x, &z))| kept.contains(&i) || value_of(z) == x)
            })
            .map(|(key, &m)| (kept.iter().map(|&i| key[i]).collect(), new_id[m.0].unwrap()))
            .collect();
        let Some(&(_, first)) = rows.first() else {
            continue;
        };
        let space: usize = kept.iter().map(|&i| net.domain_size(arc.selector()[i])).product();
        let constant = rows.iter().all(|&(_, m)| m == first);
        if kept.is_empty() || (constant && rows.len() == space) {
            let less = if first == na { nb } else { na };
            i_arcs.insert((first, less));
        } else {
            let selector = kept.iter().map(|&i| new_id[arc.selector()[i].0].unwrap()).collect();
            ci_arcs.push(CiArc::new((na, nb), selector, rows.into_iter().collect()));
        }
    }
    TcpNet::from_parts(variables, cpts, i_arcs, ci_arcs)
}

/// Groups the variables of `net` into independent components. Variables are
/// linked by cp-arcs, i-arcs, ci-arcs (endpoints and selectors), and by
/// sharing the scope of a constraint of `root`.
pub(crate) fn components(net: &TcpNet, root: &TcpNet, constraints: &ConstraintSet) -> Vec<Vec<VarId>> {
    let mut parent: Vec<usize> = (0..net.len()).collect();
    fn find(parent: &mut [usize], mut v: usize) -> usize {
        while parent[v] != v {
            parent[v] = parent[parent[v]];
            v = parent[v];
        }
        v
    }
    let mut union = |a: VarId, b: VarId| {
        let (ra, rb) = (find(&mut parent, a.0), find(&mut parent, b.0));
        if ra != rb {
            parent[ra.max(rb)] = ra.min(rb);
        }
    };
    for (p, c) in net.cp_arcs() {
        union(p, c);
    }
    for &(a, b) in net.i_arcs() {
        union(a, b);
    }
    for arc in net.ci_arcs() {
        let (a, b) = arc.endpoints();
        union(a, b);
        for &z in arc.selector() {
            union(z, a);
        }
    }
    for c in constraints.constraints() {
        let local: Vec<VarId> = c.scope().iter().filter_map(|&v| net.var_by_name(root.name(v))).collect();
        for w in local.windows(2) {
            union(w[0], w[1]);
        }
    }
    let mut groups: Vec<Vec<VarId>> = Vec::new();
    let mut slot = vec![usize::MAX; net.len()];
    for v in 0..net.len() {
        let r = find(&mut parent, v);
        if slot[r] == usize::MAX {
            slot[r] = groups.len();
            groups.push(Vec::new());
        }
        groups[slot[r]].push(VarId(v));
    }
    groups
}

// ---------------------------------------------------------------------------
// Search
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchMode {
    /// Stop after the first optimal outcome.
    First,
    /// Every optimal outcome.
    All,
    /// At most this many optimal outcomes.
    Max(NonZeroUsize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchConfig {
    pub mode: SearchMode,
    /// Skip a root value whose propagated domains are contained in those of
    /// an earlier value.
    pub subsumption_pruning: bool,
    /// Expansion budget for each dominance search; when it runs out the
    /// candidate is kept.
    pub dominance_budget: Option<usize>,
    /// Outcome cap for each dominance search.
    pub outcome_cap: usize,
    /// Largest number of completions tried when comparing partial outcomes.
    pub max_completions: usize,
    /// Search upward from each outcome for a feasible dominator before
    /// emitting it.
    pub certify: bool,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            mode: SearchMode::All,
            subsumption_pruning: false,
            dominance_budget: None,
            outcome_cap: DEFAULT_OUTCOME_CAP,
            max_completions: 4096,
            certify: true,
        }
    }
}

impl SearchConfig {
    pub fn with_mode(mode: SearchMode) -> Self {
        SearchConfig {
            mode,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PruneReason {
    Inconsistent,
    Subsumed,
}

/// Why a dominance comparison was left undecided.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UndecidedCause {
    Budget,
    OutcomeCap,
    Completions,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SearchEvent {
    SolutionEmitted(Outcome),
    BranchPruned { var: VarId, value: usize, reason: PruneReason },
    ComponentSplit { count: usize },
    /// A candidate was kept because a dominance comparison could not finish.
    DominanceUndecided { cause: UndecidedCause },
    /// A candidate failed certification: a feasible outcome dominates it.
    CandidateRejected(Outcome),
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SearchReport {
    /// In emission order.
    pub solutions: Vec<Outcome>,
    /// Pairwise comparisons between candidates.
    pub dominance_queries: usize,
    /// Upward searches made to certify candidates before emission.
    pub certifications: usize,
    pub rejected: usize,
    pub undecided: usize,
    pub pruned_inconsistent: usize,
    pub pruned_subsumed: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Local {
    First,
    All,
    /// Every candidate, best first, with no comparisons.
    Every,
}

enum Verdict {
    Dominated,
    NotDominated,
    Undecided(UndecidedCause),
}

struct Searcher<'a, F> {
    root: &'a TcpNet,
    constraints: &'a ConstraintSet,
    context: &'a PartialAssignment,
    config: SearchConfig,
    on_event: F,
    report: SearchReport,
    done: bool,
    /// Set when the first-choice candidates were all rejected.
    exhaustive: bool,
}

/// Searches for optimal outcomes of `net` under `constraints` that extend
/// `context`. Events are reported through `on_event` as they happen.
pub fn search<F: FnMut(&SearchEvent)>(
    net: &TcpNet,
    constraints: &ConstraintSet,
    context: &PartialAssignment,
    config: &SearchConfig,
    on_event: F,
) -> Result<SearchReport, OptimizeError> {
    context.check(net)?;
    if !is_conditionally_acyclic(net).is_acyclic() {
        return Err(OptimizeError::NotConditionallyAcyclic);
    }
    let store = propagate(net, constraints, context).map_err(|_| OptimizeError::Infeasible)?;
    let mut searcher = Searcher {
        root: net,
        constraints,
        context,
        config: *config,
        on_event,
        report: SearchReport::default(),
        done: false,
        exhaustive: false,
    };
    searcher.top(&store);
    if searcher.report.solutions.is_empty() && searcher.report.rejected > 0 && config.mode == SearchMode::First {
        // Every first-choice candidate was dominated; look further.
        searcher.exhaustive = true;
        searcher.top(&store);
    }
    if searcher.report.solutions.is_empty() {
        return Err(OptimizeError::Infeasible);
    }
    Ok(searcher.report)
}

/// Every optimal outcome.
pub fn optimal(net: &TcpNet, constraints: &ConstraintSet) -> Result<Vec<Outcome>, OptimizeError> {
    search(net, constraints, &PartialAssignment::new(), &SearchConfig::default(), |_| {}).map(|r| r.solutions)
}

/// One optimal outcome, found without any dominance query.
pub fn first_optimal(net: &TcpNet, constraints: &ConstraintSet) -> Result<Outcome, OptimizeError> {
    let config = SearchConfig::with_mode(SearchMode::First);
    let mut report = search(net, constraints, &PartialAssignment::new(), &config, |_| {})?;
    Ok(report.solutions.remove(0))
}

impl<F: FnMut(&SearchEvent)> Searcher<'_, F> {
    fn event(&mut self, e: SearchEvent) {
        (self.on_event)(&e);
    }

    fn local_mode(&self) -> Local {
        match self.config.mode {
            SearchMode::First if self.exhaustive => Local::Every,
            SearchMode::First => Local::First,
            _ => Local::All,
        }
    }

    /// Emits `solution` unless certification finds a feasible outcome that
    /// dominates it. Returns whether it was emitted.
    fn offer(&mut self, solution: &PartialAssignment) -> bool {
        let o = solution.complete(self.root).expect("solutions cover every variable");
        if self.config.certify {
            self.report.certifications += 1;
            let limits = DominanceLimits {
                outcome_cap: self.config.outcome_cap,
                budget: self.config.dominance_budget,
            };
            let (constraints, context) = (self.constraints, self.context);
            match find_dominating(self.root, &o, &limits, |x| x.agrees_with(context) && constraints.satisfied_by(x)) {
                Ok(None) => {}
                Ok(Some(_)) => {
                    self.report.rejected += 1;
                    self.event(SearchEvent::CandidateRejected(o));
                    return false;
                }
                Err(e) => {
                    let cause = match e {
                        SemanticsError::BudgetExhausted(_) => UndecidedCause::Budget,
                        _ => UndecidedCause::OutcomeCap,
                    };
                    self.report.undecided += 1;
                    self.event(SearchEvent::DominanceUndecided { cause });
                }
            }
        }
        self.report.solutions.push(o.clone());
        self.event(SearchEvent::SolutionEmitted(o));
        let limit = match self.config.mode {
            SearchMode::First => 1,
            SearchMode::All => usize::MAX,
            SearchMode::Max(k) => k.get(),
        };
        if self.report.solutions.len() >= limit {
            self.done = true;
        }
        true
    }

    /// The initial context is handled like a branch: propagate, reduce,
    /// split, then solve each part.
    fn top(&mut self, store: &ConstraintStore<'_>) {
        let fixed = store.induced();
        let reduced = reduce(self.root, &fixed).expect("store values are in range");
        let groups = components(&reduced, self.root, self.constraints);
        if groups.len() > 1 {
            self.event(SearchEvent::ComponentSplit { count: groups.len() });
        }
        let mode = self.local_mode();
        if groups.len() <= 1 {
            self.solve(&reduced, store, &fixed, mode, true);
            return;
        }
        let child = mode;
        let mut parts = Vec::new();
        for group in groups {
            let part = induced_subnet(&reduced, &group);
            let r = self.solve(&part, store, &fixed, child, false);
            if r.is_empty() {
                return;
            }
            parts.push(r);
        }
        let candidates = cross(&fixed, &parts);
        let kept = if mode == Local::All {
            self.filter_all(&PartialAssignment::new(), candidates)
        } else {
            candidates
        };
        for c in kept {
            if self.done {
                break;
            }
            self.offer(&c);
        }
    }

    /// Optimal assignments to the variables of `sub` (given in root ids)
    /// under context `ctx`. At the top level solutions are emitted as they
    /// are found.
    fn solve(
        &mut self,
        sub: &TcpNet,
        store: &ConstraintStore<'_>,
        ctx: &PartialAssignment,
        mode: Local,
        top: bool,
    ) -> Vec<PartialAssignment> {
        if sub.is_empty() {
            if top && !self.offer(ctx) {
                return Vec::new();
            }
            return vec![PartialAssignment::new()];
        }
        let to_root: Vec<VarId> = sub
            .var_ids()
            .map(|v| self.root.var_by_name(sub.name(v)).expect("sub-net variables exist in the root"))
            .collect();
        // First mode never compares: it trusts the value order even where
        // the root choice cannot vouch for it, and certification catches
        // the rare candidate that is dominated.
        let (x, ordered) = pick_root(sub);
        let ordered = ordered || mode != Local::All;
        let xr = to_root[x.0];
        let local = if ordered { mode } else { Local::All };
        let child = local;
        let mut results: Vec<PartialAssignment> = Vec::new();
        let mut earlier: Vec<ConstraintStore<'_>> = Vec::new();
        for &value in sub.cpt(x).order(0) {
            if self.done || (ordered && local == Local::First && !results.is_empty()) {
                break;
            }
            let branch = match store.assign(xr, value) {
                Ok(s) => s,
                Err(Inconsistent) => {
                    self.report.pruned_inconsistent += 1;
                    self.event(SearchEvent::BranchPruned {
                        var: xr,
                        value,
                        reason: PruneReason::Inconsistent,
                    });
                    continue;
                }
            };
            if self.config.subsumption_pruning {
                if earlier.iter().any(|e| branch.subsumed_by(e, xr)) {
                    self.report.pruned_subsumed += 1;
                    self.event(SearchEvent::BranchPruned {
                        var: xr,
                        value,
                        reason: PruneReason::Subsumed,
                    });
                    continue;
                }
                earlier.push(branch.clone());
            }

            let mut fixed_sub = PartialAssignment::new();
            let mut fixed_root = PartialAssignment::new();
            for v in sub.var_ids() {
                if let Some(val) = branch.singleton(to_root[v.0]) {
                    fixed_sub.insert(v, val);
                    fixed_root.insert(to_root[v.0], val);
                }
            }
            let reduced = reduce(sub, &fixed_sub).expect("store values are in range");
            let groups = components(&reduced, self.root, self.constraints);
            if groups.len() > 1 {
                self.event(SearchEvent::ComponentSplit { count: groups.len() });
            }
            let inner = ctx.merged(&fixed_root);
            let mut parts = Vec::new();
            for group in groups {
                let part = induced_subnet(&reduced, &group);
                let r = self.solve(&part, &branch, &inner, child, false);
                if r.is_empty() {
                    parts.clear();
                    parts.push(r);
                    break;
                }
                parts.push(r);
            }
            for candidate in cross(&fixed_root, &parts) {
                if self.done {
                    break;
                }
                if !ordered {
                    results.push(candidate);
                    continue;
                }
                if local == Local::First && !results.is_empty() {
                    break;
                }
                let keep = local == Local::Every || self.undominated(ctx, &candidate, &results);
                if keep && (!top || self.offer(&ctx.merged(&candidate))) {
                    results.push(candidate);
                }
            }
        }
        if !ordered {
            results = self.filter_all(ctx, results);
            if top {
                let mut emitted = Vec::new();
                for r in results {
                    if self.done {
                        break;
                    }
                    if self.offer(&ctx.merged(&r)) {
                        emitted.push(r);
                    }
                }
                results = emitted;
            }
        }
        results
    }

    /// `candidate` is not dominated by any of `kept` (under `ctx`).
    fn undominated(&mut self, ctx: &PartialAssignment, candidate: &PartialAssignment, kept: &[PartialAssignment]) -> bool {
        let worse = ctx.merged(candidate);
        for k in kept {
            match self.compare(&ctx.merged(k), &worse) {
                Verdict::Dominated => return false,
                Verdict::NotDominated => {}
                Verdict::Undecided(cause) => {
                    self.report.undecided += 1;
                    self.event(SearchEvent::DominanceUndecided { cause });
                }
            }
        }
        true
    }

    /// Keeps the candidates that no other candidate dominates, in order.
    fn filter_all(&mut self, ctx: &PartialAssignment, candidates: Vec<PartialAssignment>) -> Vec<PartialAssignment> {
        let mut kept = Vec::new();
        for (i, c) in candidates.iter().enumerate() {
            let others: Vec<PartialAssignment> = candidates
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, o)| o.clone())
                .collect();
            if self.undominated(ctx, c, &others) {
                kept.push(c.clone());
            }
        }
        kept
    }

    /// Does `better` dominate `worse` for every completion of the variables
    /// neither assigns? Both assign the same variables.
    fn compare(&mut self, better: &PartialAssignment, worse: &PartialAssignment) -> Verdict {
        self.report.dominance_queries += 1;
        let root = self.root;
        let missing: Vec<VarId> = root.var_ids().filter(|&v| !better.contains(v)).collect();
        let radices: Vec<usize> = missing.iter().map(|&v| root.domain_size(v)).collect();
        let count = radices.iter().try_fold(1usize, |acc, &r| acc.checked_mul(r));
        if count.is_none_or(|c| c > self.config.max_completions) {
            return Verdict::Undecided(UndecidedCause::Completions);
        }
        let limits = DominanceLimits {
            outcome_cap: self.config.outcome_cap,
            budget: self.config.dominance_budget,
        };
        for digits in MixedRadix::new(&radices) {
            let rest: PartialAssignment = missing.iter().copied().zip(digits).collect();
            let a = better.merged(&rest).complete(root).expect("completion covers the net");
            let b = worse.merged(&rest).complete(root).expect("completion covers the net");
            match dominates_with(root, &a, &b, &limits) {
                Ok(Some(_)) => {}
                Ok(None) => return Verdict::NotDominated,
                Err(SemanticsError::BudgetExhausted(_)) => return Verdict::Undecided(UndecidedCause::Budget),
                Err(_) => return Verdict::Undecided(UndecidedCause::OutcomeCap),
            }
        }
        Verdict::Dominated
    }
}

/// Picks the branching variable: the first source of the dependency graph.
/// When reduction has made the dependency graph cyclic there may be none.
/// A variable that has no parents and is never the less important side of
/// an i-arc or of any CIT row is then just as good, since no improving
/// sequence can worsen it. Failing that, the first variable without
/// incoming cp- or i-arcs is used and the flag is false, meaning candidates
/// must be compared pairwise.
fn pick_root(sub: &TcpNet) -> (VarId, bool) {
    let dep = dependency_graph(sub);
    let mut has_in = vec![false; sub.len()];
    for &(_, to) in dep.edges() {
        has_in[to.0] = true;
    }
    if let Some(v) = sub.var_ids().find(|v| !has_in[v.0]) {
        return (v, true);
    }
    let mut blocked = vec![false; sub.len()];
    for (_, c) in sub.cp_arcs() {
        blocked[c.0] = true;
    }
    for &(_, b) in sub.i_arcs() {
        blocked[b.0] = true;
    }
    let mut outranked = blocked.clone();
    for arc in sub.ci_arcs() {
        for more in arc.rows().values() {
            outranked[arc.other(*more).0] = true;
        }
    }
    if let Some(v) = sub.var_ids().find(|v| !outranked[v.0]) {
        return (v, true);
    }
    let v = sub
        .var_ids()
        .find(|v| !blocked[v.0])
        .or_else(|| sub.var_ids().find(|&v| sub.parents(v).is_empty()))
        .expect("cp-arcs of a conditionally acyclic net form a DAG");
    (v, false)
}

/// `base` joined with every combination of one entry per part, sorted.
fn cross(base: &PartialAssignment, parts: &[Vec<PartialAssignment>]) -> Vec<PartialAssignment> {
    let mut acc = vec![base.clone()];
    for part in parts {
        let mut next = Vec::with_capacity(acc.len() * part.len());
        for a in &acc {
            for p in part {
                next.push(a.merged(p));
            }
        }
        acc = next;
    }
    acc.sort();
    acc
}
