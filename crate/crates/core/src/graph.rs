//! Small directed graph over variable ids with deterministic traversal.

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;

use crate::model::VarId;

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Digraph {
    nodes: usize,
    edges: BTreeSet<(VarId, VarId)>,
}

impl Digraph {
    pub fn new(nodes: usize) -> Self {
        Digraph {
            nodes,
            edges: BTreeSet::new(),
        }
    }

    pub fn node_count(&self) -> usize {
        self.nodes
    }

    pub fn add_edge(&mut self, from: VarId, to: VarId) -> bool {
        self.edges.insert((from, to))
    }

    pub fn edges(&self) -> &BTreeSet<(VarId, VarId)> {
        &self.edges
    }

    pub fn contains(&self, from: VarId, to: VarId) -> bool {
        self.edges.contains(&(from, to))
    }

    pub fn successors(&self, v: VarId) -> impl Iterator<Item = VarId> + '_ {
        self.edges
            .range((v, VarId(0))..=(v, VarId(usize::MAX)))
            .map(|&(_, w)| w)
    }

    /// Topological order, smallest ready node first; `None` if cyclic.
    pub fn topological_order(&self) -> Option<Vec<VarId>> {
        let mut indegree = vec![0usize; self.nodes];
        for &(_, to) in &self.edges {
            indegree[to.0] += 1;
        }
        let mut ready: BTreeSet<VarId> = (0..self.nodes).filter(|&v| indegree[v] == 0).map(VarId).collect();
        let mut order = Vec::with_capacity(self.nodes);
        while let Some(v) = ready.pop_first() {
            order.push(v);
            for w in self.successors(v) {
                indegree[w.0] -= 1;
                if indegree[w.0] == 0 {
                    ready.insert(w);
                }
            }
        }
        (order.len() == self.nodes).then_some(order)
    }

    pub fn is_acyclic(&self) -> bool {
        self.find_cycle().is_none()
    }

    /// Some directed cycle as a closed list of arcs, found by depth-first
    /// search from the smallest node.
    pub fn find_cycle(&self) -> Option<Vec<(VarId, VarId)>> {
        const WHITE: u8 = 0;
        const GREY: u8 = 1;
        const BLACK: u8 = 2;
        let mut color = vec![WHITE; self.nodes];
        let adjacency: Vec<Vec<VarId>> = (0..self.nodes).map(|v| self.successors(VarId(v)).collect()).collect();
        for start in 0..self.nodes {
            if color[start] != WHITE {
                continue;
            }
            // (node, next child position)
            let mut stack: Vec<(usize, usize)> = vec![(start, 0)];
            color[start] = GREY;
            while let Some(top) = stack.last_mut() {
                let v = top.0;
                if top.1 < adjacency[v].len() {
                    let w = adjacency[v][top.1].0;
                    top.1 += 1;
                    match color[w] {
                        WHITE => {
                            color[w] = GREY;
                            stack.push((w, 0));
                        }
                        GREY => {
                            let from = stack.iter().position(|&(u, _)| u == w).unwrap();
                            let path: Vec<usize> = stack[from..].iter().map(|&(u, _)| u).collect();
                            let mut cycle: Vec<(VarId, VarId)> =
                                path.windows(2).map(|p| (VarId(p[0]), VarId(p[1]))).collect();
                            cycle.push((VarId(*path.last().unwrap()), VarId(w)));
                            return Some(cycle);
                        }
                        _ => {}
                    }
                } else {
                    color[v] = BLACK;
                    stack.pop();
                }
            }
        }
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn topological_order_prefers_small_nodes() {
        let mut g = Digraph::new(4);
        g.add_edge(VarId(2), VarId(0));
        g.add_edge(VarId(3), VarId(1));
        assert_eq!(
            g.topological_order().unwrap(),
            vec![VarId(2), VarId(0), VarId(3), VarId(1)]
        );
    }

    #[test]
    fn finds_cycles() {
        let mut g = Digraph::new(3);
        g.add_edge(VarId(0), VarId(1));
        g.add_edge(VarId(1), VarId(2));
        assert!(g.is_acyclic());
        g.add_edge(VarId(2), VarId(1));
        let cycle = g.find_cycle().unwrap();
        assert_eq!(cycle, vec![(VarId(1), VarId(2)), (VarId(2), VarId(1))]);
        assert!(g.topological_order().is_none());
    }
}
