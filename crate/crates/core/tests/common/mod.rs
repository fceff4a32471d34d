#![allow(dead_code)]

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tcpnet_core::model::{MixedRadix, PartialAssignment, TcpNet, VarId};
use tcpnet_core::random::NetShape;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn binary_shape(max_vars: usize) -> NetShape {
    NetShape {
        min_vars: 2,
        max_vars,
        max_domain: 2,
        ..NetShape::default()
    }
}

/// Every assignment to `vars`, lexicographic.
pub fn assignments(net: &TcpNet, vars: &[VarId]) -> Vec<PartialAssignment> {
    let radices: Vec<usize> = vars.iter().map(|&v| net.domain_size(v)).collect();
    MixedRadix::new(&radices)
        .map(|d| vars.iter().copied().zip(d).collect())
        .collect()
}
