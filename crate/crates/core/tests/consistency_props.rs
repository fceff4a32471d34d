mod common;

use proptest::prelude::*;
use tcpnet_core::consistency::{
    check_consistency, dependency_graph, disjoint_selectors_rule, enumeration_rule, exhaustive_check,
    pair_rule, semi_directed_cycles, shared_selectors_rule, w_directed_graph, ConsistencyConfig, CycleVerdict,
    DirectedWitness, SemiDirectedCycle,
};
use tcpnet_core::model::{PartialAssignment, TcpNet};
use tcpnet_core::random::{random_cycle_net, random_forward_net, random_net, NetShape};
use tcpnet_core::ConsistencyVerdict;

use common::{assignments, rng};

fn witness_closes(net: &TcpNet, cycle: &SemiDirectedCycle, verdict: &CycleVerdict) -> bool {
    let CycleVerdict::Directed { w, direction } = verdict else {
        return true;
    };
    let mut full = w.clone();
    for z in net.selector_vars() {
        if !full.contains(z) {
            full.insert(z, 0);
        }
    }
    let g = w_directed_graph(net, &full).unwrap();
    cycle.directed_along(*direction).iter().all(|&(a, b)| g.contains(a, b))
}

fn verdict_is_sound(net: &TcpNet, verdict: &ConsistencyVerdict) -> Result<(), TestCaseError> {
    match verdict {
        ConsistencyVerdict::ConditionallyAcyclic(_) => {
            prop_assert!(dependency_graph(net).is_acyclic());
            for w in assignments(net, &net.selector_vars()) {
                prop_assert!(w_directed_graph(net, &w).unwrap().is_acyclic(), "cyclic under {:?}", w);
            }
        }
        ConsistencyVerdict::ConditionallyDirected(DirectedWitness::Selector { w, cycle, .. }) => {
            let g = w_directed_graph(net, w).unwrap();
            prop_assert!(!cycle.is_empty());
            prop_assert!(cycle.iter().all(|&(a, b)| g.contains(a, b)));
            prop_assert!(cycle.windows(2).all(|p| p[0].1 == p[1].0));
            prop_assert_eq!(cycle.last().unwrap().1, cycle[0].0);
        }
        ConsistencyVerdict::ConditionallyDirected(DirectedWitness::Dependency { cycle }) => {
            let g = dependency_graph(net);
            prop_assert!(cycle.iter().all(|&(a, b)| g.contains(a, b)));
            prop_assert_eq!(cycle.last().unwrap().1, cycle[0].0);
        }
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn verdict_is_sound_and_complete(seed in any::<u64>()) {
        let shape = NetShape { max_vars: 6, ..NetShape::default() };
        let net = random_net(&mut rng(seed), &shape);
        let verdict = check_consistency(&net, &ConsistencyConfig::default());
        verdict_is_sound(&net, &verdict)?;
        let exhaustive = exhaustive_check(&net);
        verdict_is_sound(&net, &exhaustive)?;
        prop_assert_eq!(verdict.is_acyclic(), exhaustive.is_acyclic());
        let capped = check_consistency(&net, &ConsistencyConfig { cycle_cap: 0 });
        prop_assert_eq!(capped.is_acyclic(), verdict.is_acyclic());
    }

    #[test]
    fn verdict_is_sound_on_forward_nets(seed in any::<u64>()) {
        let shape = NetShape { max_vars: 6, importance: 0.6, conditional: 0.7, ..NetShape::default() };
        let net = random_forward_net(&mut rng(seed), &shape);
        let verdict = check_consistency(&net, &ConsistencyConfig::default());
        verdict_is_sound(&net, &verdict)?;
        prop_assert_eq!(verdict.is_acyclic(), exhaustive_check(&net).is_acyclic());
    }

    #[test]
    fn cycle_rules_agree_with_enumeration(
        seed in any::<u64>(),
        len in 2usize..=4,
        pool in 1usize..=3,
        density in 0.3f64..=1.0,
    ) {
        let net = random_cycle_net(&mut rng(seed), len, pool, density);
        let cycles = semi_directed_cycles(&net, 100).unwrap();
        prop_assert_eq!(cycles.len(), 1);
        let cycle = &cycles[0];
        let truth = enumeration_rule(&net, cycle);
        prop_assert!(witness_closes(&net, cycle, &truth));
        if let Some(v) = disjoint_selectors_rule(&net, cycle) {
            prop_assert!(!v.is_acyclic());
            prop_assert!(!truth.is_acyclic());
            prop_assert!(witness_closes(&net, cycle, &v));
        }
        let shared = shared_selectors_rule(&net, cycle);
        prop_assert_eq!(shared.is_acyclic(), truth.is_acyclic());
        prop_assert!(witness_closes(&net, cycle, &shared));
        if pair_rule(&net, cycle).is_some() {
            prop_assert!(shared.is_acyclic());
            prop_assert!(truth.is_acyclic());
        }
    }
}

#[test]
fn witness_selector_assignments_cover_all_selectors() {
    let net = tcpnet_core::fixtures::ci_triangle();
    match tcpnet_core::is_conditionally_acyclic(&net) {
        ConsistencyVerdict::ConditionallyDirected(DirectedWitness::Selector { w, .. }) => {
            let vars: Vec<_> = w.vars().collect();
            assert_eq!(vars, net.selector_vars());
        }
        other => panic!("expected a selector witness, got {other:?}"),
    }
    assert!(w_directed_graph(&net, &PartialAssignment::new()).is_err());
}
