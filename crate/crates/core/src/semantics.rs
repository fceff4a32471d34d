//! Ground-truth preference semantics over the full outcome space.
//!
//! An improving flip changes one variable to a value its CPT row prefers
//! (a CP-flip), or improves one variable while worsening a less important
//! one with all their parents held fixed (an I-flip). `a` dominates `b`
//! exactly when a chain of improving flips leads from `b` to `a`.
//!
//! Everything here is exponential in the number of variables and is meant
//! as a reference for small nets; operations that materialise the outcome
//! space refuse to run past an outcome cap.

use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use thiserror::Error;

use crate::model::{ConstraintSet, Importance, Outcome, TcpNet, VarId};

pub const DEFAULT_OUTCOME_CAP: usize = 65_536;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SemanticsError {
    #[error("outcome space exceeds the cap of {cap} outcomes")]
    CapExceeded { cap: usize },
    #[error("dominance search budget of {0} expansions exhausted")]
    BudgetExhausted(usize),
    #[error("outcome has {found} values, net has {expected} variables")]
    OutcomeShape { expected: usize, found: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FlipKind {
    Cp,
    I,
}

/// What sanctions an I-flip.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum ImportanceSource {
    IArc,
    /// A row of the CIT of `net.ci_arcs()[arc]`, keyed by selector values.
    CitRow { arc: usize, key: Vec<usize> },
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum FlipChange {
    Cp {
        var: VarId,
        row: usize,
    },
    I {
        improved: VarId,
        worsened: VarId,
        improved_row: usize,
        worsened_row: usize,
        via: ImportanceSource,
    },
}

/// One improving step from `from` to `to` with its justification.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Flip {
    pub from: Outcome,
    pub to: Outcome,
    pub change: FlipChange,
}

impl Flip {
    pub fn kind(&self) -> FlipKind {
        match self.change {
            FlipChange::Cp { .. } => FlipKind::Cp,
            FlipChange::I { .. } => FlipKind::I,
        }
    }

    pub fn display<'a>(&'a self, net: &'a TcpNet) -> FlipDisplay<'a> {
        FlipDisplay { net, flip: self }
    }
}

pub struct FlipDisplay<'a> {
    net: &'a TcpNet,
    flip: &'a Flip,
}

impl fmt::Display for FlipDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let net = self.net;
        let (from, to) = (&self.flip.from, &self.flip.to);
        let change = |v: VarId| {
            (
                net.name(v),
                net.value_name(v, from.value(v)),
                net.value_name(v, to.value(v)),
            )
        };
        match &self.flip.change {
            FlipChange::Cp { var, .. } => {
                let (n, a, b) = change(*var);
                write!(f, "CP-flip {n}: {a} -> {b}")
            }
            FlipChange::I {
                improved,
                worsened,
                via,
                ..
            } => {
                let (n1, a1, b1) = change(*improved);
                let (n2, a2, b2) = change(*worsened);
                write!(f, "I-flip {n1}: {a1} -> {b1} (improves), {n2}: {a2} -> {b2} (worsens)")?;
                match via {
                    ImportanceSource::IArc => write!(f, " [i-arc {n1} > {n2}]"),
                    ImportanceSource::CitRow { arc, key } => {
                        let sel = net.ci_arcs()[*arc].selector();
                        f.write_str(" [cit")?;
                        for (&z, &x) in sel.iter().zip(key) {
                            write!(f, " {}={}", net.name(z), net.value_name(z, x))?;
                        }
                        write!(f, ": {n1} > {n2}]")
                    }
                }
            }
        }
    }
}

/// The importance source making `more` ▷ `less` in outcome `o`, if any.
fn importance_in(net: &TcpNet, more: VarId, less: VarId, o: &Outcome) -> Option<ImportanceSource> {
    match net.importance(more, less)? {
        Importance::Unconditional { more: m, .. } => (m == more).then_some(ImportanceSource::IArc),
        Importance::Conditional(i) => {
            let arc = &net.ci_arcs()[i];
            let key: Vec<usize> = arc.selector().iter().map(|&z| o.value(z)).collect();
            (arc.rows().get(&key) == Some(&more)).then_some(ImportanceSource::CitRow { arc: i, key })
        }
    }
}

fn check_shape(net: &TcpNet, o: &Outcome) -> Result<(), SemanticsError> {
    if o.len() != net.len() {
        return Err(SemanticsError::OutcomeShape {
            expected: net.len(),
            found: o.len(),
        });
    }
    Ok(())
}

/// Every outcome reachable from `o` by one improving flip: CP-flips first
/// (by variable, then value), then I-flips (by variable pair, then values).
pub fn improving_neighbors(net: &TcpNet, o: &Outcome) -> Vec<Flip> {
    let mut flips = Vec::new();
    for x in net.var_ids() {
        let cpt = net.cpt(x);
        let row = cpt.row_for_outcome(o);
        let current = o.value(x);
        for v in 0..net.domain_size(x) {
            if cpt.prefers(row, v, current) {
                flips.push(Flip {
                    from: o.clone(),
                    to: o.with(x, v),
                    change: FlipChange::Cp { var: x, row },
                });
            }
        }
    }
    for more in net.var_ids() {
        for less in net.var_ids() {
            if more == less || net.parents(more).contains(&less) || net.parents(less).contains(&more) {
                continue;
            }
            let Some(via) = importance_in(net, more, less, o) else {
                continue;
            };
            let (cm, cl) = (net.cpt(more), net.cpt(less));
            let (rm, rl) = (cm.row_for_outcome(o), cl.row_for_outcome(o));
            let (xm, xl) = (o.value(more), o.value(less));
            for vm in (0..net.domain_size(more)).filter(|&v| cm.prefers(rm, v, xm)) {
                for vl in (0..net.domain_size(less)).filter(|&v| cl.prefers(rl, xl, v)) {
                    let mut to = o.with(more, vm);
                    to.set(less, vl);
                    flips.push(Flip {
                        from: o.clone(),
                        to,
                        change: FlipChange::I {
                            improved: more,
                            worsened: less,
                            improved_row: rm,
                            worsened_row: rl,
                            via: via.clone(),
                        },
                    });
                }
            }
        }
    }
    flips
}

/// Re-checks a flip against the net from scratch.
pub fn check_flip(net: &TcpNet, flip: &Flip) -> bool {
    let (from, to) = (&flip.from, &flip.to);
    if from.len() != net.len() || to.len() != net.len() {
        return false;
    }
    let in_domain = |o: &Outcome| net.var_ids().all(|v| o.value(v) < net.domain_size(v));
    if !in_domain(from) || !in_domain(to) {
        return false;
    }
    let diff = from.diff(to);
    match &flip.change {
        FlipChange::Cp { var, row } => {
            let cpt = net.cpt(*var);
            diff == [*var]
                && cpt.row_for_outcome(from) == *row
                && cpt.row_for_outcome(to) == *row
                && cpt.prefers(*row, to.value(*var), from.value(*var))
        }
        FlipChange::I {
            improved,
            worsened,
            improved_row,
            worsened_row,
            via,
        } => {
            let mut expected = [*improved, *worsened];
            expected.sort();
            if diff != expected {
                return false;
            }
            let (ci, cw) = (net.cpt(*improved), net.cpt(*worsened));
            let rows_hold = [from, to].iter().all(|o| {
                ci.row_for_outcome(o) == *improved_row && cw.row_for_outcome(o) == *worsened_row
            });
            let sanctioned = [from, to]
                .iter()
                .all(|o| importance_in(net, *improved, *worsened, o).as_ref() == Some(via));
            rows_hold
                && sanctioned
                && ci.prefers(*improved_row, to.value(*improved), from.value(*improved))
                && cw.prefers(*worsened_row, from.value(*worsened), to.value(*worsened))
        }
    }
}

/// Chain of improving flips from `start` (worse) to `end` (better).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlippingSequence {
    pub steps: Vec<Flip>,
}

impl FlippingSequence {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn start(&self) -> Option<&Outcome> {
        self.steps.first().map(|s| &s.from)
    }

    pub fn end(&self) -> Option<&Outcome> {
        self.steps.last().map(|s| &s.to)
    }

    /// Every step re-validates and consecutive steps chain.
    pub fn verify(&self, net: &TcpNet) -> bool {
        self.steps.iter().all(|s| check_flip(net, s)) && self.steps.windows(2).all(|w| w[0].to == w[1].from)
    }
}

/// Bounds for the goal-directed dominance search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DominanceLimits {
    /// Maximum number of distinct outcomes visited.
    pub outcome_cap: usize,
    /// Optional cap on the number of expanded outcomes.
    pub budget: Option<usize>,
}

impl Default for DominanceLimits {
    fn default() -> Self {
        DominanceLimits {
            outcome_cap: DEFAULT_OUTCOME_CAP,
            budget: None,
        }
    }
}

pub fn dominates(net: &TcpNet, a: &Outcome, b: &Outcome) -> Result<Option<FlippingSequence>, SemanticsError> {
    dominates_with(net, a, b, &DominanceLimits::default())
}

/// Breadth-first search from `b` over improving flips; returns a shortest
/// flipping sequence reaching `a`, or `None` when `a` does not dominate `b`.
pub fn dominates_with(
    net: &TcpNet,
    a: &Outcome,
    b: &Outcome,
    limits: &DominanceLimits,
) -> Result<Option<FlippingSequence>, SemanticsError> {
    check_shape(net, a)?;
    check_shape(net, b)?;
    if a == b {
        return Ok(None);
    }
    find_dominating(net, b, limits, |o| o == a)
}

/// Breadth-first search over improving flips from `b` for an outcome that
/// satisfies `accept`; returns the shortest sequence reaching one.
pub fn find_dominating(
    net: &TcpNet,
    b: &Outcome,
    limits: &DominanceLimits,
    mut accept: impl FnMut(&Outcome) -> bool,
) -> Result<Option<FlippingSequence>, SemanticsError> {
    check_shape(net, b)?;
    let mut parent: BTreeMap<Outcome, Outcome> = BTreeMap::new();
    let mut seen: BTreeSet<Outcome> = BTreeSet::new();
    let mut queue = VecDeque::new();
    seen.insert(b.clone());
    queue.push_back(b.clone());
    let mut expanded = 0usize;
    while let Some(current) = queue.pop_front() {
        if let Some(budget) = limits.budget {
            if expanded == budget {
                return Err(SemanticsError::BudgetExhausted(budget));
            }
        }
        expanded += 1;
        for flip in improving_neighbors(net, &current) {
            if seen.contains(&flip.to) {
                continue;
            }
            if seen.len() == limits.outcome_cap {
                return Err(SemanticsError::CapExceeded { cap: limits.outcome_cap });
            }
            seen.insert(flip.to.clone());
            parent.insert(flip.to.clone(), current.clone());
            if accept(&flip.to) {
                let end = flip.to.clone();
                return Ok(Some(rebuild(net, &parent, b, &end)));
            }
            queue.push_back(flip.to);
        }
    }
    Ok(None)
}

fn rebuild(net: &TcpNet, parent: &BTreeMap<Outcome, Outcome>, start: &Outcome, end: &Outcome) -> FlippingSequence {
    let mut chain = vec![end.clone()];
    let mut cursor = end;
    while cursor != start {
        cursor = &parent[cursor];
        chain.push(cursor.clone());
    }
    chain.reverse();
    let steps = chain
        .windows(2)
        .map(|w| {
            improving_neighbors(net, &w[0])
                .into_iter()
                .find(|f| f.to == w[1])
                .expect("parent links follow improving flips")
        })
        .collect();
    FlippingSequence { steps }
}

/// All outcomes with their improving flips, indexed in mixed radix
/// (first variable most significant).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlipGraph {
    radices: Vec<usize>,
    edges: Vec<Vec<(usize, FlipKind)>>,
}

impl FlipGraph {
    pub fn node_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.iter().map(Vec::len).sum()
    }

    pub fn outcome(&self, index: usize) -> Outcome {
        Outcome::from_index(index, &self.radices)
    }

    pub fn index(&self, o: &Outcome) -> usize {
        o.index(&self.radices)
    }

    pub fn successors(&self, index: usize) -> &[(usize, FlipKind)] {
        &self.edges[index]
    }

    /// `(from, to, kind)` for every edge, sorted.
    pub fn edge_list(&self) -> Vec<(usize, usize, FlipKind)> {
        let mut out: Vec<(usize, usize, FlipKind)> = self
            .edges
            .iter()
            .enumerate()
            .flat_map(|(i, e)| e.iter().map(move |&(j, k)| (i, j, k)))
            .collect();
        out.sort();
        out.dedup();
        out
    }

    /// Nodes reachable from `start` by one or more edges.
    pub fn reachable_from(&self, start: usize) -> Vec<bool> {
        let mut seen = vec![false; self.node_count()];
        let mut stack: Vec<usize> = self.edges[start].iter().map(|&(j, _)| j).collect();
        while let Some(v) = stack.pop() {
            if !seen[v] {
                seen[v] = true;
                stack.extend(self.edges[v].iter().map(|&(j, _)| j));
            }
        }
        seen
    }

    /// `a` reachable from `b` by a non-empty path.
    pub fn dominates(&self, a: &Outcome, b: &Outcome) -> bool {
        self.reachable_from(self.index(b))[self.index(a)]
    }

    /// Kahn's algorithm over the outcome graph.
    pub fn topological_order(&self) -> Option<Vec<usize>> {
        let n = self.node_count();
        let mut indegree = vec![0usize; n];
        for e in &self.edges {
            for &(j, _) in e {
                indegree[j] += 1;
            }
        }
        let mut queue: VecDeque<usize> = (0..n).filter(|&v| indegree[v] == 0).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            for &(j, _) in &self.edges[v] {
                indegree[j] -= 1;
                if indegree[j] == 0 {
                    queue.push_back(j);
                }
            }
        }
        (order.len() == n).then_some(order)
    }

    pub fn is_acyclic(&self) -> bool {
        self.topological_order().is_some()
    }

    /// Every dominance pair `(better, worse)` as outcome indices.
    pub fn transitive_closure(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for b in 0..self.node_count() {
            for (a, &r) in self.reachable_from(b).iter().enumerate() {
                if r {
                    out.push((a, b));
                }
            }
        }
        out.sort();
        out
    }
}

fn checked_space(net: &TcpNet, cap: usize) -> Result<usize, SemanticsError> {
    match net.outcome_count() {
        Some(n) if n <= cap => Ok(n),
        _ => Err(SemanticsError::CapExceeded { cap }),
    }
}

pub fn flip_graph(net: &TcpNet, cap: usize) -> Result<FlipGraph, SemanticsError> {
    let n = checked_space(net, cap)?;
    let radices = net.radices();
    let edges = (0..n)
        .map(|i| {
            let o = Outcome::from_index(i, &radices);
            improving_neighbors(net, &o)
                .into_iter()
                .map(|f| (f.to.index(&radices), f.kind()))
                .collect()
        })
        .collect();
    Ok(FlipGraph { radices, edges })
}

pub fn oracle_dominates(net: &TcpNet, a: &Outcome, b: &Outcome, cap: usize) -> Result<bool, SemanticsError> {
    check_shape(net, a)?;
    check_shape(net, b)?;
    Ok(flip_graph(net, cap)?.dominates(a, b))
}

pub fn flip_graph_acyclic(net: &TcpNet, cap: usize) -> Result<bool, SemanticsError> {
    Ok(flip_graph(net, cap)?.is_acyclic())
}

/// Feasible outcomes not dominated by any other feasible outcome.
pub fn oracle_pareto(net: &TcpNet, constraints: &ConstraintSet, cap: usize) -> Result<BTreeSet<Outcome>, SemanticsError> {
    let graph = flip_graph(net, cap)?;
    Ok(pareto_in(&graph, constraints))
}

pub fn pareto_in(graph: &FlipGraph, constraints: &ConstraintSet) -> BTreeSet<Outcome> {
    let n = graph.node_count();
    let feasible: Vec<bool> = (0..n).map(|i| constraints.satisfied_by(&graph.outcome(i))).collect();
    // reaches[v]: some feasible node is reachable from v by a non-empty path.
    let reaches: Vec<bool> = match graph.topological_order() {
        Some(order) => {
            let mut reaches = vec![false; n];
            for &v in order.iter().rev() {
                reaches[v] = graph.successors(v).iter().any(|&(w, _)| feasible[w] || reaches[w]);
            }
            reaches
        }
        None => (0..n)
            .map(|v| {
                graph
                    .reachable_from(v)
                    .iter()
                    .enumerate()
                    .any(|(w, &r)| r && w != v && feasible[w])
            })
            .collect(),
    };
    (0..n)
        .filter(|&v| feasible[v] && !reaches[v])
        .map(|v| graph.outcome(v))
        .collect()
}
