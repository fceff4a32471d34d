//! Conditional acyclicity of TCP-nets.
//!
//! A net is conditionally acyclic when its dependency graph is acyclic and,
//! for every assignment `w` to the selector variables, the `w`-directed
//! graph (all cp/i-arcs plus each ci-arc oriented by its CIT row under `w`)
//! is acyclic. Such nets always admit a consistent ranking.
//!
//! The check runs cheap structural tests first (directed cycles, an acyclic
//! undirected projection, cycles with opposing directed arcs), then
//! classifies each remaining semi-directed cycle with a sequence of
//! selector-set rules. When the number of undirected cycles exceeds a cap,
//! it falls back to enumerating every selector assignment directly.

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use thiserror::Error;

use crate::graph::Digraph;
use crate::model::{ArcKind, CiArc, MixedRadix, PartialAssignment, TcpNet, VarId};

pub type DependencyGraph = Digraph;

pub const DEFAULT_CYCLE_CAP: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConsistencyError {
    #[error("selector variable {0} is not assigned")]
    IncompleteSelectorAssignment(alloc::string::String),
    #[error("more than {0} undirected cycles")]
    CycleBudgetExceeded(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConsistencyConfig {
    /// Maximum number of undirected cycles enumerated before falling back
    /// to direct enumeration of selector assignments.
    pub cycle_cap: usize,
}

impl Default for ConsistencyConfig {
    fn default() -> Self {
        ConsistencyConfig {
            cycle_cap: DEFAULT_CYCLE_CAP,
        }
    }
}

/// cp-arcs, i-arcs, and selector-to-endpoint edges for every ci-arc.
pub fn dependency_graph(net: &TcpNet) -> DependencyGraph {
    let mut g = directed_arcs(net);
    for arc in net.ci_arcs() {
        let (a, b) = arc.endpoints();
        for &z in arc.selector() {
            g.add_edge(z, a);
            g.add_edge(z, b);
        }
    }
    g
}

fn directed_arcs(net: &TcpNet) -> Digraph {
    let mut g = Digraph::new(net.len());
    for (a, b) in net.cp_arcs() {
        g.add_edge(a, b);
    }
    for &(a, b) in net.i_arcs() {
        g.add_edge(a, b);
    }
    g
}

/// The net's directed arcs plus each ci-arc oriented by the CIT row that
/// matches `w`. ci-arcs without a matching row contribute nothing.
pub fn w_directed_graph(net: &TcpNet, w: &PartialAssignment) -> Result<Digraph, ConsistencyError> {
    for z in net.selector_vars() {
        if !w.contains(z) {
            return Err(ConsistencyError::IncompleteSelectorAssignment(net.name(z).into()));
        }
    }
    let mut g = directed_arcs(net);
    for arc in net.ci_arcs() {
        if let Some(more) = arc.orientation(|z| w.get(z).unwrap()) {
            g.add_edge(more, arc.other(more));
        }
    }
    Ok(g)
}

// ---------------------------------------------------------------------------
// Cycles of the undirected projection
// ---------------------------------------------------------------------------

/// Direction relative to a cycle's traversal order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Direction {
    Forward,
    Backward,
}

impl Direction {
    pub fn reversed(self) -> Direction {
        match self {
            Direction::Forward => Direction::Backward,
            Direction::Backward => Direction::Forward,
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::Forward => "forward",
            Direction::Backward => "backward",
        })
    }
}

/// One arc of a cycle, listed in traversal order `from -> to`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CycleEdge {
    pub kind: ArcKind,
    pub from: VarId,
    pub to: VarId,
    /// For cp/i-arcs, whether the arc points along the traversal.
    pub direction: Option<Direction>,
    /// For ci-arcs, index into [`TcpNet::ci_arcs`].
    pub ci: Option<usize>,
}

impl CycleEdge {
    /// Direction of this edge when `more` is the more important endpoint.
    fn direction_of(&self, more: VarId) -> Direction {
        if more == self.from {
            Direction::Forward
        } else {
            Direction::Backward
        }
    }
}

/// A simple cycle of the undirected projection whose directed members all
/// point the same way and which contains at least one ci-arc.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SemiDirectedCycle {
    pub edges: Vec<CycleEdge>,
    /// Common direction of the directed members; `None` if all are ci-arcs.
    pub orientation: Option<Direction>,
}

impl SemiDirectedCycle {
    pub fn vertices(&self) -> Vec<VarId> {
        self.edges.iter().map(|e| e.from).collect()
    }

    pub fn ci_edges(&self) -> impl Iterator<Item = &CycleEdge> {
        self.edges.iter().filter(|e| e.ci.is_some())
    }

    /// Union of the selector sets of the cycle's ci-arcs.
    pub fn selector_vars(&self, net: &TcpNet) -> Vec<VarId> {
        let set: BTreeSet<VarId> = self
            .ci_edges()
            .flat_map(|e| net.ci_arcs()[e.ci.unwrap()].selector().iter().copied())
            .collect();
        set.into_iter().collect()
    }

    /// Union of pairwise intersections of the ci-arcs' selector sets.
    pub fn shared_vars(&self, net: &TcpNet) -> Vec<VarId> {
        let sels: Vec<&[VarId]> = self
            .ci_edges()
            .map(|e| net.ci_arcs()[e.ci.unwrap()].selector())
            .collect();
        let mut shared = BTreeSet::new();
        for i in 0..sels.len() {
            for j in i + 1..sels.len() {
                shared.extend(sels[i].iter().filter(|z| sels[j].contains(z)).copied());
            }
        }
        shared.into_iter().collect()
    }

    /// The arcs of the cycle oriented along `d`.
    pub fn directed_along(&self, d: Direction) -> Vec<(VarId, VarId)> {
        match d {
            Direction::Forward => self.edges.iter().map(|e| (e.from, e.to)).collect(),
            Direction::Backward => self.edges.iter().rev().map(|e| (e.to, e.from)).collect(),
        }
    }

    pub fn display<'a>(&'a self, net: &'a TcpNet) -> CycleDisplay<'a> {
        CycleDisplay { net, cycle: self }
    }
}

pub struct CycleDisplay<'a> {
    net: &'a TcpNet,
    cycle: &'a SemiDirectedCycle,
}

impl fmt::Display for CycleDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for e in &self.cycle.edges {
            let link = match e.direction {
                None => "~",
                Some(Direction::Forward) => "->",
                Some(Direction::Backward) => "<-",
            };
            write!(f, "{} {link} ", self.net.name(e.from))?;
        }
        if let Some(first) = self.cycle.edges.first() {
            f.write_str(self.net.name(first.from))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy)]
struct ProjectedEdge {
    kind: ArcKind,
    a: VarId,
    b: VarId,
    ci: Option<usize>,
}

fn projection(net: &TcpNet) -> Vec<ProjectedEdge> {
    let mut edges: Vec<ProjectedEdge> = net
        .cp_arcs()
        .into_iter()
        .map(|(a, b)| ProjectedEdge {
            kind: ArcKind::Cp,
            a,
            b,
            ci: None,
        })
        .collect();
    edges.extend(net.i_arcs().iter().map(|&(a, b)| ProjectedEdge {
        kind: ArcKind::I,
        a,
        b,
        ci: None,
    }));
    edges.extend(net.ci_arcs().iter().enumerate().map(|(i, c)| ProjectedEdge {
        kind: ArcKind::Ci,
        a: c.endpoints().0,
        b: c.endpoints().1,
        ci: Some(i),
    }));
    edges
}

/// All simple cycles of the undirected projection (a multigraph: parallel
/// arcs form 2-cycles), each listed once starting from its smallest vertex.
fn undirected_cycles(net: &TcpNet, cap: usize) -> Result<Vec<Vec<CycleEdge>>, ConsistencyError> {
    let edges = projection(net);
    let mut adjacency: Vec<Vec<(usize, VarId)>> = vec![Vec::new(); net.len()];
    for (id, e) in edges.iter().enumerate() {
        adjacency[e.a.0].push((id, e.b));
        adjacency[e.b.0].push((id, e.a));
    }
    for adj in &mut adjacency {
        adj.sort_by_key(|&(id, w)| (w, id));
    }

    struct Walk<'a> {
        edges: &'a [ProjectedEdge],
        adjacency: &'a [Vec<(usize, VarId)>],
        start: VarId,
        on_path: Vec<bool>,
        path: Vec<(usize, VarId, VarId)>,
        found: Vec<Vec<CycleEdge>>,
        cap: usize,
    }

    impl Walk<'_> {
        fn edge(&self, id: usize, from: VarId, to: VarId) -> CycleEdge {
            let e = self.edges[id];
            let direction = match e.kind {
                ArcKind::Ci => None,
                _ if e.a == from => Some(Direction::Forward),
                _ => Some(Direction::Backward),
            };
            CycleEdge {
                kind: e.kind,
                from,
                to,
                direction,
                ci: e.ci,
            }
        }

        fn extend(&mut self, u: VarId) -> Result<(), ConsistencyError> {
            for &(id, w) in &self.adjacency[u.0] {
                if self.path.last().is_some_and(|&(last, _, _)| last == id) {
                    continue;
                }
                if w == self.start {
                    let first = match self.path.first() {
                        Some(&(first, _, _)) => first,
                        None => continue,
                    };
                    // Each cycle is met in both directions; keep one.
                    if first < id {
                        if self.found.len() == self.cap {
                            return Err(ConsistencyError::CycleBudgetExceeded(self.cap));
                        }
                        let mut cycle: Vec<CycleEdge> =
                            self.path.iter().map(|&(e, a, b)| self.edge(e, a, b)).collect();
                        cycle.push(self.edge(id, u, w));
                        self.found.push(cycle);
                    }
                } else if w > self.start && !self.on_path[w.0] {
                    self.on_path[w.0] = true;
                    self.path.push((id, u, w));
                    self.extend(w)?;
                    self.path.pop();
                    self.on_path[w.0] = false;
                }
            }
            Ok(())
        }
    }

    let mut walk = Walk {
        edges: &edges,
        adjacency: &adjacency,
        start: VarId(0),
        on_path: vec![false; net.len()],
        path: Vec::new(),
        found: Vec::new(),
        cap,
    };
    for s in net.var_ids() {
        walk.start = s;
        walk.on_path[s.0] = true;
        walk.extend(s)?;
        walk.on_path[s.0] = false;
    }
    Ok(walk.found)
}

enum CycleShape {
    /// Directed arcs disagree in direction; never a directed cycle.
    Mixed,
    /// Only cp/i-arcs, all pointing one way.
    Directed,
    SemiDirected(Option<Direction>),
}

fn shape(cycle: &[CycleEdge]) -> CycleShape {
    let mut dirs = cycle.iter().filter_map(|e| e.direction);
    let first = dirs.next();
    if let Some(d) = first {
        if dirs.any(|x| x != d) {
            return CycleShape::Mixed;
        }
    }
    if cycle.iter().all(|e| e.ci.is_none()) {
        CycleShape::Directed
    } else {
        CycleShape::SemiDirected(first)
    }
}

/// Every semi-directed cycle of the net, in deterministic order. Fails when
/// the undirected projection has more than `cap` simple cycles.
pub fn semi_directed_cycles(net: &TcpNet, cap: usize) -> Result<Vec<SemiDirectedCycle>, ConsistencyError> {
    Ok(undirected_cycles(net, cap)?
        .into_iter()
        .filter_map(|edges| match shape(&edges) {
            CycleShape::SemiDirected(orientation) => Some(SemiDirectedCycle { edges, orientation }),
            _ => None,
        })
        .collect())
}

// ---------------------------------------------------------------------------
// Classifying one cycle
// ---------------------------------------------------------------------------

/// The rule that decided a cycle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Rule {
    /// Pairwise disjoint selector sets: the ci-arcs orient independently,
    /// so picking one suitable row per arc closes the cycle.
    DisjointSelectors,
    /// For every assignment to the selector intersection of some ci-arc
    /// pair, one of the two can never follow the cycle's directed arcs.
    PairBlocksDirection,
    /// All-ci cycle: for every assignment to the selector intersection of
    /// some pair, the two arcs can never agree on a direction.
    PairOpposes,
    /// Exact test over assignments to the shared selector variables.
    SharedSelectors,
    /// Exhaustive enumeration of selector assignments.
    Enumeration,
}

impl Rule {
    pub fn name(self) -> &'static str {
        match self {
            Rule::DisjointSelectors => "disjoint-selectors",
            Rule::PairBlocksDirection => "pair-blocks-direction",
            Rule::PairOpposes => "pair-opposes",
            Rule::SharedSelectors => "shared-selectors",
            Rule::Enumeration => "enumeration",
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CycleVerdict {
    Acyclic,
    /// Under `w` (an assignment to the cycle's selector variables) every
    /// arc of the cycle points along `direction`.
    Directed { w: PartialAssignment, direction: Direction },
}

impl CycleVerdict {
    pub fn is_acyclic(&self) -> bool {
        matches!(self, CycleVerdict::Acyclic)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycleCertificate {
    pub cycle: SemiDirectedCycle,
    pub rule: Rule,
    pub verdict: CycleVerdict,
}

fn candidate_directions(cycle: &SemiDirectedCycle) -> Vec<Direction> {
    match cycle.orientation {
        Some(d) => vec![d],
        None => vec![Direction::Forward, Direction::Backward],
    }
}

fn consistent(arc: &CiArc, key: &[usize], pi: &PartialAssignment) -> bool {
    arc.selector()
        .iter()
        .zip(key)
        .all(|(&z, &x)| pi.get(z).is_none_or(|v| v == x))
}

/// First CIT row (in key order) consistent with `pi` that orients the edge
/// along `d`.
fn row_along<'a>(
    net: &'a TcpNet,
    edge: &CycleEdge,
    d: Direction,
    pi: &PartialAssignment,
) -> Option<&'a [usize]> {
    let arc = &net.ci_arcs()[edge.ci.unwrap()];
    arc.rows()
        .iter()
        .find(|(key, &more)| edge.direction_of(more) == d && consistent(arc, key, pi))
        .map(|(key, _)| key.as_slice())
}

/// No extension of `pi` over the arc's selector orients it along `d`
/// (a missing row leaves the pair unrelated, which also breaks the cycle).
fn blocks(net: &TcpNet, edge: &CycleEdge, d: Direction, pi: &PartialAssignment) -> bool {
    row_along(net, edge, d, pi).is_none()
}

fn assignments<'a>(vars: &'a [VarId], net: &TcpNet) -> impl Iterator<Item = PartialAssignment> + 'a {
    let radices: Vec<usize> = vars.iter().map(|&v| net.domain_size(v)).collect();
    MixedRadix::new(&radices).map(move |digits| vars.iter().copied().zip(digits).collect())
}

/// Builds an assignment over the cycle's selectors orienting every ci-arc
/// along `d`, starting from `pi`; `None` if some arc cannot comply.
fn witness_along(net: &TcpNet, cycle: &SemiDirectedCycle, d: Direction, pi: &PartialAssignment) -> Option<PartialAssignment> {
    let mut w = pi.clone();
    for edge in cycle.ci_edges() {
        let key = row_along(net, edge, d, &w)?;
        let arc = &net.ci_arcs()[edge.ci.unwrap()];
        for (&z, &x) in arc.selector().iter().zip(key) {
            w.insert(z, x);
        }
    }
    Some(w)
}

fn selectors_disjoint(net: &TcpNet, cycle: &SemiDirectedCycle) -> bool {
    let mut seen = BTreeSet::new();
    cycle
        .ci_edges()
        .flat_map(|e| net.ci_arcs()[e.ci.unwrap()].selector().iter())
        .all(|z| seen.insert(*z))
}

/// Disjoint-selector rule: decisive only for "directed", and only when a
/// witness can be assembled row by row.
pub fn disjoint_selectors_rule(net: &TcpNet, cycle: &SemiDirectedCycle) -> Option<CycleVerdict> {
    if !selectors_disjoint(net, cycle) {
        return None;
    }
    candidate_directions(cycle).into_iter().find_map(|d| {
        witness_along(net, cycle, d, &PartialAssignment::new())
            .map(|w| CycleVerdict::Directed { w, direction: d })
    })
}

/// Pair rules: decisive only for "acyclic".
pub fn pair_rule(net: &TcpNet, cycle: &SemiDirectedCycle) -> Option<Rule> {
    let ci: Vec<&CycleEdge> = cycle.ci_edges().collect();
    for i in 0..ci.len() {
        for j in i + 1..ci.len() {
            let si = net.ci_arcs()[ci[i].ci.unwrap()].selector();
            let sj = net.ci_arcs()[ci[j].ci.unwrap()].selector();
            let inter: Vec<VarId> = si.iter().filter(|z| sj.contains(z)).copied().collect();
            let holds = |pi: PartialAssignment| match cycle.orientation {
                Some(d) => blocks(net, ci[i], d, &pi) || blocks(net, ci[j], d, &pi),
                None => {
                    let (f, b) = (Direction::Forward, Direction::Backward);
                    (blocks(net, ci[i], f, &pi) && blocks(net, ci[j], b, &pi))
                        || (blocks(net, ci[i], b, &pi) && blocks(net, ci[j], f, &pi))
                }
            };
            if assignments(&inter, net).all(holds) {
                return Some(match cycle.orientation {
                    Some(_) => Rule::PairBlocksDirection,
                    None => Rule::PairOpposes,
                });
            }
        }
    }
    None
}

/// Shared-selector rule: exact. For each assignment to the shared selector
/// variables, the cycle can be closed iff every ci-arc can independently
/// pick a row (over its private selector variables) along one direction.
pub fn shared_selectors_rule(net: &TcpNet, cycle: &SemiDirectedCycle) -> CycleVerdict {
    let shared = cycle.shared_vars(net);
    for pi in assignments(&shared, net) {
        for d in candidate_directions(cycle) {
            if let Some(w) = witness_along(net, cycle, d, &pi) {
                return CycleVerdict::Directed { w, direction: d };
            }
        }
    }
    CycleVerdict::Acyclic
}

/// Exhaustive check over every assignment to the cycle's selector variables.
pub fn enumeration_rule(net: &TcpNet, cycle: &SemiDirectedCycle) -> CycleVerdict {
    let vars = cycle.selector_vars(net);
    for w in assignments(&vars, net) {
        for d in candidate_directions(cycle) {
            let closes = cycle.ci_edges().all(|e| {
                net.ci_arcs()[e.ci.unwrap()]
                    .orientation(|z| w.get(z).unwrap())
                    .is_some_and(|more| e.direction_of(more) == d)
            });
            if closes {
                return CycleVerdict::Directed { w, direction: d };
            }
        }
    }
    CycleVerdict::Acyclic
}

/// Applies the rules in order and returns the first decisive verdict.
pub fn classify_cycle(net: &TcpNet, cycle: &SemiDirectedCycle) -> CycleCertificate {
    let (rule, verdict) = if let Some(v) = disjoint_selectors_rule(net, cycle) {
        (Rule::DisjointSelectors, v)
    } else if let Some(rule) = pair_rule(net, cycle) {
        (rule, CycleVerdict::Acyclic)
    } else {
        (Rule::SharedSelectors, shared_selectors_rule(net, cycle))
    };
    CycleCertificate {
        cycle: cycle.clone(),
        rule,
        verdict,
    }
}

// ---------------------------------------------------------------------------
// Whole-net verdict
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DirectedWitness {
    /// Under `w` (complete over the selector variables) the `w`-directed
    /// graph contains `cycle`.
    Selector {
        w: PartialAssignment,
        cycle: Vec<(VarId, VarId)>,
        rule: Option<Rule>,
    },
    /// The dependency graph has a cycle through selector edges, although no
    /// single `w`-directed graph need be cyclic.
    Dependency { cycle: Vec<(VarId, VarId)> },
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct AcyclicProof {
    /// One certificate per semi-directed cycle.
    pub certificates: Vec<CycleCertificate>,
    /// Undirected cycles discharged because their directed arcs disagree.
    pub mixed_cycles: usize,
    /// Decided by enumerating every selector assignment (cycle cap hit).
    pub exhaustive: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConsistencyVerdict {
    ConditionallyAcyclic(AcyclicProof),
    ConditionallyDirected(DirectedWitness),
}

impl ConsistencyVerdict {
    pub fn is_acyclic(&self) -> bool {
        matches!(self, ConsistencyVerdict::ConditionallyAcyclic(_))
    }
}

fn extend_over_selectors(net: &TcpNet, partial: &PartialAssignment) -> PartialAssignment {
    let mut w = partial.clone();
    for z in net.selector_vars() {
        if !w.contains(z) {
            w.insert(z, 0);
        }
    }
    w
}

pub fn is_conditionally_acyclic(net: &TcpNet) -> ConsistencyVerdict {
    check_consistency(net, &ConsistencyConfig::default())
}

pub fn check_consistency(net: &TcpNet, config: &ConsistencyConfig) -> ConsistencyVerdict {
    if let Some(cycle) = directed_arcs(net).find_cycle() {
        return ConsistencyVerdict::ConditionallyDirected(DirectedWitness::Selector {
            w: extend_over_selectors(net, &PartialAssignment::new()),
            cycle,
            rule: None,
        });
    }
    if let Some(cycle) = dependency_graph(net).find_cycle() {
        return ConsistencyVerdict::ConditionallyDirected(DirectedWitness::Dependency { cycle });
    }
    let cycles = match undirected_cycles(net, config.cycle_cap) {
        Ok(cycles) => cycles,
        Err(_) => return exhaustive_check(net),
    };
    let mut proof = AcyclicProof::default();
    for edges in cycles {
        let orientation = match shape(&edges) {
            CycleShape::Mixed => {
                proof.mixed_cycles += 1;
                continue;
            }
            // Already excluded by the directed-arc check.
            CycleShape::Directed => unreachable!("directed cycle survived the directed-arc check"),
            CycleShape::SemiDirected(o) => o,
        };
        let cycle = SemiDirectedCycle { edges, orientation };
        let cert = classify_cycle(net, &cycle);
        if let CycleVerdict::Directed { w, direction } = &cert.verdict {
            return ConsistencyVerdict::ConditionallyDirected(DirectedWitness::Selector {
                w: extend_over_selectors(net, w),
                cycle: cycle.directed_along(*direction),
                rule: Some(cert.rule),
            });
        }
        proof.certificates.push(cert);
    }
    ConsistencyVerdict::ConditionallyAcyclic(proof)
}

/// Direct check: every `w`-directed graph must be acyclic.
pub fn exhaustive_check(net: &TcpNet) -> ConsistencyVerdict {
    if let Some(cycle) = dependency_graph(net).find_cycle() {
        if let Some(cycle) = directed_arcs(net).find_cycle() {
            return ConsistencyVerdict::ConditionallyDirected(DirectedWitness::Selector {
                w: extend_over_selectors(net, &PartialAssignment::new()),
                cycle,
                rule: Some(Rule::Enumeration),
            });
        }
        return ConsistencyVerdict::ConditionallyDirected(DirectedWitness::Dependency { cycle });
    }
    let selectors = net.selector_vars();
    for w in assignments(&selectors, net) {
        let g = w_directed_graph(net, &w).expect("w covers every selector variable");
        if let Some(cycle) = g.find_cycle() {
            return ConsistencyVerdict::ConditionallyDirected(DirectedWitness::Selector {
                w,
                cycle,
                rule: Some(Rule::Enumeration),
            });
        }
    }
    ConsistencyVerdict::ConditionallyAcyclic(AcyclicProof {
        exhaustive: true,
        ..AcyclicProof::default()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::model::NetDraft;

    fn edges(net: &TcpNet, list: &[(&str, &str)]) -> BTreeSet<(VarId, VarId)> {
        list.iter()
            .map(|(a, b)| (net.lookup(a).unwrap(), net.lookup(b).unwrap()))
            .collect()
    }

    #[test]
    fn dependency_graphs_of_fixtures() {
        let flight = fixtures::flight();
        assert_eq!(
            dependency_graph(&flight).edges(),
            &edges(&flight, &[("D", "T"), ("T", "S"), ("T", "C"), ("T", "A"), ("A", "S"), ("A", "C")])
        );
        let evening = fixtures::evening();
        assert_eq!(
            dependency_graph(&evening).edges(),
            &edges(&evening, &[("J", "S"), ("P", "S"), ("J", "P")])
        );
    }

    #[test]
    fn w_directed_graphs_follow_cit_rows() {
        let net = fixtures::flight();
        let base = edges(&net, &[("D", "T"), ("T", "S"), ("T", "C"), ("T", "A")]);
        let graph = |t: &str, a: &str| {
            let w = net.partial(&[("T", t), ("A", a)]).unwrap();
            w_directed_graph(&net, &w).unwrap().edges().clone()
        };
        let mut with_sc = base.clone();
        with_sc.extend(edges(&net, &[("S", "C")]));
        let mut with_cs = base.clone();
        with_cs.extend(edges(&net, &[("C", "S")]));
        assert_eq!(graph("m", "klm"), with_sc);
        assert_eq!(graph("n", "ba"), with_sc);
        assert_eq!(graph("m", "ba"), with_cs);
        assert_eq!(graph("n", "klm"), base);

        let partial = net.partial(&[("T", "m")]).unwrap();
        assert_eq!(
            w_directed_graph(&net, &partial),
            Err(ConsistencyError::IncompleteSelectorAssignment("A".into()))
        );
    }

    #[test]
    fn flight_is_conditionally_acyclic_without_semi_directed_cycles() {
        let net = fixtures::flight();
        assert!(semi_directed_cycles(&net, DEFAULT_CYCLE_CAP).unwrap().is_empty());
        match is_conditionally_acyclic(&net) {
            ConsistencyVerdict::ConditionallyAcyclic(proof) => {
                assert!(proof.certificates.is_empty());
                assert_eq!(proof.mixed_cycles, 1);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn directed_two_cycle() {
        let net = NetDraft::new()
            .var("X", &["x1", "x2"])
            .var("Y", &["y1", "y2"])
            .cp("X", "Y")
            .cp("Y", "X")
            .cpt("X", &[("Y", "y1")], &["x1", "x2"])
            .cpt("X", &[("Y", "y2")], &["x2", "x1"])
            .cpt("Y", &[("X", "x1")], &["y1", "y2"])
            .cpt("Y", &[("X", "x2")], &["y2", "y1"])
            .build()
            .unwrap();
        match is_conditionally_acyclic(&net) {
            ConsistencyVerdict::ConditionallyDirected(DirectedWitness::Selector { cycle, .. }) => {
                let (x, y) = (VarId(0), VarId(1));
                assert_eq!(cycle, vec![(x, y), (y, x)]);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn disjoint_selector_triangle_is_directed() {
        let net = fixtures::ci_triangle();
        let cycles = semi_directed_cycles(&net, DEFAULT_CYCLE_CAP).unwrap();
        assert_eq!(cycles.len(), 1);
        assert_eq!(cycles[0].orientation, None);
        assert_eq!(cycles[0].edges.len(), 3);
        let cert = classify_cycle(&net, &cycles[0]);
        assert_eq!(cert.rule, Rule::DisjointSelectors);
        let verdict = is_conditionally_acyclic(&net);
        let ConsistencyVerdict::ConditionallyDirected(DirectedWitness::Selector { w, cycle, .. }) = verdict else {
            panic!("{verdict:?}");
        };
        let g = w_directed_graph(&net, &w).unwrap();
        assert!(cycle.iter().all(|&(a, b)| g.contains(a, b)));
        assert_eq!(cycle.len(), 3);
    }

    #[test]
    fn semi_directed_cycle_with_consistent_direction() {
        // X -> Y (cp), Y ~ Z (ci), Z -> X (cp): both directed arcs run the same way.
        let net = NetDraft::new()
            .var("U", &["u1", "u2"])
            .var("X", &["x1", "x2"])
            .var("Y", &["y1", "y2"])
            .var("Z", &["z1", "z2"])
            .cp("X", "Y")
            .cp("Z", "X")
            .ci("Y", "Z", &["U"])
            .cit("Y", "Z", &[("U", "u1")], "Y")
            .cit("Y", "Z", &[("U", "u2")], "Z")
            .cpt("U", &[], &["u1", "u2"])
            .cpt("X", &[("Z", "z1")], &["x1", "x2"])
            .cpt("X", &[("Z", "z2")], &["x1", "x2"])
            .cpt("Y", &[("X", "x1")], &["y1", "y2"])
            .cpt("Y", &[("X", "x2")], &["y1", "y2"])
            .cpt("Z", &[], &["z1", "z2"])
            .build()
            .unwrap();
        let cycles = semi_directed_cycles(&net, DEFAULT_CYCLE_CAP).unwrap();
        assert_eq!(cycles.len(), 1);
        let c = &cycles[0];
        assert!(c.orientation.is_some());
        let cert = classify_cycle(&net, c);
        assert_eq!(cert.rule, Rule::DisjointSelectors);
        let CycleVerdict::Directed { w, direction } = cert.verdict else { panic!() };
        assert_eq!(Some(direction), c.orientation);
        // Y -> Z closes X -> Y -> Z -> X.
        assert_eq!(w, net.partial(&[("U", "u1")]).unwrap());
    }

    fn pair_net(first: &[(&str, &str)], second: &[(&str, &str)], with_cp: bool) -> TcpNet {
        // Cycle X - Y - Z - X. With `with_cp`, X -> Y is a cp-arc and both
        // Y ~ Z and Z ~ X are ci-arcs sharing selector U; otherwise all
        // three are ci-arcs and X ~ Y uses a private selector V.
        let mut d = NetDraft::new()
            .var("U", &["u1", "u2"])
            .var("V", &["v1", "v2"])
            .var("X", &["x1", "x2"])
            .var("Y", &["y1", "y2"])
            .var("Z", &["z1", "z2"])
            .cpt("U", &[], &["u1", "u2"])
            .cpt("V", &[], &["v1", "v2"])
            .cpt("X", &[], &["x1", "x2"])
            .cpt("Z", &[], &["z1", "z2"])
            .ci("Y", "Z", &["U"])
            .ci("Z", "X", &["U"]);
        if with_cp {
            d = d
                .cp("X", "Y")
                .cpt("Y", &[("X", "x1")], &["y1", "y2"])
                .cpt("Y", &[("X", "x2")], &["y1", "y2"]);
        } else {
            d = d
                .cpt("Y", &[], &["y1", "y2"])
                .ci("X", "Y", &["V"])
                .cit("X", "Y", &[("V", "v1")], "X")
                .cit("X", "Y", &[("V", "v2")], "Y");
        }
        for (u, more) in first {
            d = d.cit("Y", "Z", &[("U", u)], more);
        }
        for (u, more) in second {
            d = d.cit("Z", "X", &[("U", u)], more);
        }
        d.build().unwrap()
    }

    #[test]
    fn pair_blocking_the_directed_arc() {
        // Every row of Y~Z points Z -> Y, against X -> Y.
        let net = pair_net(&[("u1", "Z"), ("u2", "Z")], &[("u1", "Z"), ("u2", "X")], true);
        let cycles = semi_directed_cycles(&net, DEFAULT_CYCLE_CAP).unwrap();
        assert_eq!(cycles.len(), 1);
        let cert = classify_cycle(&net, &cycles[0]);
        assert_eq!(cert.rule, Rule::PairBlocksDirection);
        assert!(cert.verdict.is_acyclic());
        assert_eq!(enumeration_rule(&net, &cycles[0]), CycleVerdict::Acyclic);
    }

    #[test]
    fn pair_of_opposed_ci_arcs() {
        // Traversal X -> Y -> Z -> X. u1: Y~Z forward, Z~X backward; u2 the reverse.
        let net = pair_net(&[("u1", "Y"), ("u2", "Z")], &[("u1", "X"), ("u2", "Z")], false);
        let cycles = semi_directed_cycles(&net, DEFAULT_CYCLE_CAP).unwrap();
        assert_eq!(cycles.len(), 1);
        assert_eq!(cycles[0].orientation, None);
        let cert = classify_cycle(&net, &cycles[0]);
        assert_eq!(cert.rule, Rule::PairOpposes);
        assert!(cert.verdict.is_acyclic());
        assert_eq!(enumeration_rule(&net, &cycles[0]), CycleVerdict::Acyclic);
        assert!(is_conditionally_acyclic(&net).is_acyclic());
    }

    #[test]
    fn shared_selector_rule_finds_witness() {
        // u2 orients Y -> Z and Z -> X, closing X -> Y -> Z -> X.
        let net = pair_net(&[("u1", "Z"), ("u2", "Y")], &[("u1", "X"), ("u2", "Z")], true);
        let cycles = semi_directed_cycles(&net, DEFAULT_CYCLE_CAP).unwrap();
        let cert = classify_cycle(&net, &cycles[0]);
        assert_eq!(cert.rule, Rule::SharedSelectors);
        let CycleVerdict::Directed { w, .. } = &cert.verdict else { panic!() };
        assert_eq!(w, &net.partial(&[("U", "u2")]).unwrap());
        assert!(!enumeration_rule(&net, &cycles[0]).is_acyclic());
        assert!(!exhaustive_check(&net).is_acyclic());
    }

    #[test]
    fn cycle_cap_falls_back_to_enumeration() {
        let net = fixtures::flight();
        let verdict = check_consistency(&net, &ConsistencyConfig { cycle_cap: 0 });
        let ConsistencyVerdict::ConditionallyAcyclic(proof) = verdict else { panic!() };
        assert!(proof.exhaustive);
        assert_eq!(
            semi_directed_cycles(&net, 0),
            Err(ConsistencyError::CycleBudgetExceeded(0))
        );
        let tri = fixtures::ci_triangle();
        assert!(!check_consistency(&tri, &ConsistencyConfig { cycle_cap: 0 }).is_acyclic());
    }

    #[test]
    fn selector_dependency_cycle() {
        // Z selects X~Y while X is a cp-parent of Z.
        let net = NetDraft::new()
            .var("X", &["x1", "x2"])
            .var("Y", &["y1", "y2"])
            .var("Z", &["z1", "z2"])
            .cp("X", "Z")
            .ci("X", "Y", &["Z"])
            .cit("X", "Y", &[("Z", "z1")], "X")
            .cpt("X", &[], &["x1", "x2"])
            .cpt("Y", &[], &["y1", "y2"])
            .cpt("Z", &[("X", "x1")], &["z1", "z2"])
            .cpt("Z", &[("X", "x2")], &["z2", "z1"])
            .build()
            .unwrap();
        assert!(matches!(
            is_conditionally_acyclic(&net),
            ConsistencyVerdict::ConditionallyDirected(DirectedWitness::Dependency { .. })
        ));
    }
}
