mod common;

use proptest::prelude::*;
use tcpnet_core::model::{Outcome, TcpNet};
use tcpnet_core::random::{random_acyclic_net, random_net, NetShape};
use tcpnet_core::semantics::{
    check_flip, dominates, flip_graph, improving_neighbors, Flip, FlipChange, FlipKind, ImportanceSource,
    DEFAULT_OUTCOME_CAP,
};
use tcpnet_core::is_conditionally_acyclic;

use common::{binary_shape, rng};

fn outcomes(net: &TcpNet) -> Vec<Outcome> {
    let radices = net.radices();
    (0..net.outcome_count().unwrap())
        .map(|i| Outcome::from_index(i, &radices))
        .collect()
}

/// Single-field mutations of a flip.
fn mutations(net: &TcpNet, flip: &Flip) -> Vec<Flip> {
    let mut out = Vec::new();
    for v in net.var_ids() {
        for x in 0..net.domain_size(v) {
            if x != flip.to.value(v) {
                let mut m = flip.clone();
                m.to.set(v, x);
                out.push(m);
            }
            if x != flip.from.value(v) {
                let mut m = flip.clone();
                m.from.set(v, x);
                out.push(m);
            }
        }
    }
    match &flip.change {
        FlipChange::Cp { var, row } => {
            for v in net.var_ids().filter(|v| v != var) {
                let mut m = flip.clone();
                m.change = FlipChange::Cp { var: v, row: *row };
                out.push(m);
            }
            for r in 0..net.cpt(*var).rows().len() {
                if r != *row {
                    let mut m = flip.clone();
                    m.change = FlipChange::Cp { var: *var, row: r };
                    out.push(m);
                }
            }
        }
        FlipChange::I {
            improved,
            worsened,
            improved_row,
            worsened_row,
            via,
        } => {
            let mut m = flip.clone();
            m.change = FlipChange::I {
                improved: *worsened,
                worsened: *improved,
                improved_row: *worsened_row,
                worsened_row: *improved_row,
                via: via.clone(),
            };
            out.push(m);
            let other_via = match via {
                ImportanceSource::IArc => ImportanceSource::CitRow { arc: 0, key: vec![0] },
                ImportanceSource::CitRow { .. } => ImportanceSource::IArc,
            };
            let mut m = flip.clone();
            if let FlipChange::I { via, .. } = &mut m.change {
                *via = other_via;
            }
            out.push(m);
            let mut m = flip.clone();
            if let FlipChange::I { improved_row, .. } = &mut m.change {
                *improved_row += 1;
            }
            out.push(m);
        }
    }
    out
}

fn cp_only(net: &TcpNet) -> TcpNet {
    let mut draft = net.to_draft();
    draft.i_arcs.clear();
    draft.ci_arcs.clear();
    draft.cits.clear();
    draft.build().unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn generated_flips_revalidate_and_mutations_fail(seed in any::<u64>()) {
        let net = random_net(&mut rng(seed), &binary_shape(4));
        for o in outcomes(&net) {
            for flip in improving_neighbors(&net, &o) {
                prop_assert!(check_flip(&net, &flip), "rejected {:?}", flip);
                for m in mutations(&net, &flip) {
                    prop_assert!(!check_flip(&net, &m), "accepted mutation {:?}", m);
                }
            }
        }
    }

    #[test]
    fn mutations_of_multivalued_flips_are_rejected_or_genuine(seed in any::<u64>()) {
        let net = random_net(&mut rng(seed), &NetShape { max_vars: 4, ..NetShape::default() });
        for o in outcomes(&net).into_iter().step_by(3) {
            for flip in improving_neighbors(&net, &o) {
                prop_assert!(check_flip(&net, &flip));
                for m in mutations(&net, &flip) {
                    if check_flip(&net, &m) {
                        prop_assert!(improving_neighbors(&net, &m.from).contains(&m));
                    }
                }
            }
        }
    }

    #[test]
    fn dominance_search_matches_reachability(seed in any::<u64>()) {
        let net = random_net(&mut rng(seed), &binary_shape(4));
        let graph = flip_graph(&net, DEFAULT_OUTCOME_CAP).unwrap();
        let all = outcomes(&net);
        for b in &all {
            let reach = graph.reachable_from(graph.index(b));
            for a in &all {
                if a == b {
                    continue;
                }
                let seq = dominates(&net, a, b).unwrap();
                prop_assert_eq!(seq.is_some(), reach[graph.index(a)]);
                if let Some(seq) = seq {
                    prop_assert!(seq.verify(&net));
                    prop_assert_eq!(seq.start(), Some(b));
                    prop_assert_eq!(seq.end(), Some(a));
                }
            }
        }
    }

    #[test]
    fn dominance_is_strict_and_transitive(seed in any::<u64>()) {
        let net = random_net(&mut rng(seed), &binary_shape(4));
        let graph = flip_graph(&net, DEFAULT_OUTCOME_CAP).unwrap();
        let n = graph.node_count();
        let reach: Vec<Vec<bool>> = (0..n).map(|b| graph.reachable_from(b)).collect();
        // reach[b][a]: a dominates b.
        for b in 0..n {
            for from_c in reach.iter().filter(|r| r[b]) {
                for (a, &up) in reach[b].iter().enumerate() {
                    if up {
                        prop_assert!(from_c[a]);
                    }
                }
            }
        }
        if graph.is_acyclic() {
            for (a, from_a) in reach.iter().enumerate() {
                for (b, from_b) in reach.iter().enumerate() {
                    prop_assert!(!(from_b[a] && from_a[b]));
                }
            }
        }
        let closure = graph.transitive_closure();
        let again: Vec<(usize, usize)> = closure
            .iter()
            .flat_map(|&(a, b)| closure.iter().filter(move |&&(x, _)| x == b).map(move |&(_, c)| (a, c)))
            .filter(|p| !closure.contains(p))
            .collect();
        prop_assert!(again.is_empty());
    }

    #[test]
    fn cp_flips_are_the_cp_net_flip_graph(seed in any::<u64>()) {
        let net = random_net(&mut rng(seed), &NetShape { max_vars: 4, ..NetShape::default() });
        let full = flip_graph(&net, DEFAULT_OUTCOME_CAP).unwrap();
        let plain = flip_graph(&cp_only(&net), DEFAULT_OUTCOME_CAP).unwrap();
        let cp: Vec<_> = full.edge_list().into_iter().filter(|e| e.2 == FlipKind::Cp).collect();
        prop_assert_eq!(cp, plain.edge_list());
    }

    #[test]
    fn selector_preserving_flips_are_acyclic_in_conditionally_acyclic_nets(seed in any::<u64>(), forward in any::<bool>()) {
        let shape = binary_shape(6);
        let net = if forward {
            random_acyclic_net(&mut rng(seed), &shape)
        } else {
            random_net(&mut rng(seed), &shape)
        };
        if is_conditionally_acyclic(&net).is_acyclic() {
            let graph = flip_graph(&net, DEFAULT_OUTCOME_CAP).unwrap();
            let selectors = net.selector_vars();
            let edges: Vec<(usize, usize)> = graph
                .edge_list()
                .into_iter()
                .filter(|&(a, b, _)| {
                    let (a, b) = (graph.outcome(a), graph.outcome(b));
                    selectors.iter().all(|&z| a.value(z) == b.value(z))
                })
                .map(|(a, b, _)| (a, b))
                .collect();
            prop_assert!(acyclic(graph.node_count(), &edges));
        }
    }
}

fn acyclic(n: usize, edges: &[(usize, usize)]) -> bool {
    let mut indegree = vec![0usize; n];
    let mut out = vec![Vec::new(); n];
    for &(a, b) in edges {
        indegree[b] += 1;
        out[a].push(b);
    }
    let mut ready: Vec<usize> = (0..n).filter(|&v| indegree[v] == 0).collect();
    let mut seen = 0;
    while let Some(v) = ready.pop() {
        seen += 1;
        for &w in &out[v] {
            indegree[w] -= 1;
            if indegree[w] == 0 {
                ready.push(w);
            }
        }
    }
    seen == n
}

// Conditional acyclicity does not rule out flip cycles once a sequence is
// allowed to change selector values.
#[test]
fn selector_detour_is_conditionally_acyclic_with_a_flip_cycle() {
    let net = tcpnet_core::fixtures::selector_detour();
    assert!(is_conditionally_acyclic(&net).is_acyclic());
    let graph = flip_graph(&net, DEFAULT_OUTCOME_CAP).unwrap();
    assert!(!graph.is_acyclic());
    let cycle = ["a0b0c0d0e1", "a0b0c1d0e1", "a0b0c1d1e1", "a1b0c1d1e0", "a1b0c0d0e0", "a0b0c0d0e1"];
    let outcome = |s: &str| {
        let pairs: Vec<(String, String)> = ["A", "B", "C", "D", "E"]
            .iter()
            .zip(s.as_bytes().chunks(2))
            .map(|(v, c)| (v.to_string(), String::from_utf8(c.to_vec()).unwrap()))
            .collect();
        let refs: Vec<(&str, &str)> = pairs.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();
        net.outcome(&refs).unwrap()
    };
    for w in cycle.windows(2) {
        let (from, to) = (outcome(w[0]), outcome(w[1]));
        assert!(improving_neighbors(&net, &from).iter().any(|f| f.to == to), "{} -> {}", w[0], w[1]);
    }
    let a = outcome(cycle[0]);
    let b = outcome(cycle[2]);
    assert!(dominates(&net, &a, &b).unwrap().is_some());
    assert!(dominates(&net, &b, &a).unwrap().is_some());
}
