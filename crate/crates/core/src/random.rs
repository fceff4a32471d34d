//! Random nets and constraint sets for property tests and benchmarks.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::consistency::is_conditionally_acyclic;
use crate::model::{
    CiArcDecl, CitDecl, CitRowDecl, Constraint, ConstraintSet, CptDecl, CptRowDecl, MixedRadix, NetDraft, TcpNet,
    VariableSpec,
};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NetShape {
    pub min_vars: usize,
    pub max_vars: usize,
    pub max_domain: usize,
    pub max_parents: usize,
    /// Probability that a pair of variables gets an importance relation.
    pub importance: f64,
    /// Probability that an importance relation is conditional.
    pub conditional: f64,
    pub max_selector: usize,
    /// Probability that a CIT row is present.
    pub cit_density: f64,
}

impl Default for NetShape {
    fn default() -> Self {
        NetShape {
            min_vars: 2,
            max_vars: 5,
            max_domain: 3,
            max_parents: 2,
            importance: 0.35,
            conditional: 0.5,
            max_selector: 2,
            cit_density: 0.8,
        }
    }
}

fn name(i: usize) -> String {
    let letters = b"ABCDEFGHIJKLMNOPQRSTUVWXYZ";
    if i < letters.len() {
        String::from(letters[i] as char)
    } else {
        format!("Z{i:03}")
    }
}

fn value(var: &str, i: usize) -> String {
    format!("{}{i}", var.to_lowercase())
}

struct Skeleton {
    names: Vec<String>,
    sizes: Vec<usize>,
    parents: Vec<Vec<usize>>,
    i_arcs: Vec<(usize, usize)>,
    ci_arcs: Vec<(usize, usize, Vec<usize>)>,
}

fn draft_from<R: Rng + ?Sized>(rng: &mut R, shape: &NetShape, s: &Skeleton) -> NetDraft {
    let mut draft = NetDraft::new();
    for (n, &k) in s.names.iter().zip(&s.sizes) {
        draft.variables.push(VariableSpec {
            name: n.clone(),
            domain: (0..k).map(|i| value(n, i)).collect(),
        });
    }
    for (x, ps) in s.parents.iter().enumerate() {
        for &p in ps {
            draft.cp_arcs.push((s.names[p].clone(), s.names[x].clone()));
        }
        let radices: Vec<usize> = ps.iter().map(|&p| s.sizes[p]).collect();
        let rows = MixedRadix::new(&radices)
            .map(|digits| {
                let mut order: Vec<usize> = (0..s.sizes[x]).collect();
                order.shuffle(rng);
                CptRowDecl {
                    condition: ps
                        .iter()
                        .zip(&digits)
                        .map(|(&p, &d)| (s.names[p].clone(), value(&s.names[p], d)))
                        .collect(),
                    order: order.iter().map(|&v| alloc::vec![value(&s.names[x], v)]).collect(),
                }
            })
            .collect();
        draft.cpts.push(CptDecl {
            subject: s.names[x].clone(),
            rows,
        });
    }
    for &(a, b) in &s.i_arcs {
        draft.i_arcs.push((s.names[a].clone(), s.names[b].clone()));
    }
    for (a, b, sel) in &s.ci_arcs {
        let (na, nb) = (s.names[*a].clone(), s.names[*b].clone());
        draft.ci_arcs.push(CiArcDecl {
            endpoints: (na.clone(), nb.clone()),
            selector: sel.iter().map(|&z| s.names[z].clone()).collect(),
        });
        let radices: Vec<usize> = sel.iter().map(|&z| s.sizes[z]).collect();
        let present: Vec<Vec<usize>> = MixedRadix::new(&radices)
            .filter(|_| rng.gen_bool(shape.cit_density))
            .collect();
        let mut rows: Vec<CitRowDecl> = present
            .into_iter()
            .map(|digits| CitRowDecl {
                condition: sel
                    .iter()
                    .zip(&digits)
                    .map(|(&z, &d)| (s.names[z].clone(), value(&s.names[z], d)))
                    .collect(),
                more_important: if rng.gen_bool(0.5) { na.clone() } else { nb.clone() },
            })
            .collect();
        if rows.is_empty() {
            let digits: Vec<usize> = radices.iter().map(|&r| rng.gen_range(0..r)).collect();
            rows.push(CitRowDecl {
                condition: sel
                    .iter()
                    .zip(&digits)
                    .map(|(&z, &d)| (s.names[z].clone(), value(&s.names[z], d)))
                    .collect(),
                more_important: na.clone(),
            });
        }
        draft.cits.push(CitDecl {
            endpoints: (na, nb),
            rows,
        });
    }
    draft
}

/// A random valid net whose arcs all point forward in a random variable
/// order and whose selectors precede both endpoints. Such nets always have
/// an acyclic dependency graph, but CIT rows can still orient ci-arcs into
/// cycles.
pub fn random_forward_net<R: Rng + ?Sized>(rng: &mut R, shape: &NetShape) -> TcpNet {
    let n = rng.gen_range(shape.min_vars..=shape.max_vars);
    let names: Vec<String> = (0..n).map(name).collect();
    let sizes: Vec<usize> = (0..n).map(|_| rng.gen_range(2..=shape.max_domain.max(2))).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut pos = alloc::vec![0; n];
    for (i, &v) in order.iter().enumerate() {
        pos[v] = i;
    }
    let mut parents = alloc::vec![Vec::new(); n];
    for x in 0..n {
        let mut earlier: Vec<usize> = (0..n).filter(|&p| pos[p] < pos[x]).collect();
        earlier.shuffle(rng);
        let k = rng.gen_range(0..=shape.max_parents.min(earlier.len()));
        let mut ps: Vec<usize> = earlier[..k].to_vec();
        ps.sort();
        parents[x] = ps;
    }
    let mut i_arcs = Vec::new();
    let mut ci_arcs = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if !rng.gen_bool(shape.importance) {
                continue;
            }
            let (first, second) = if pos[a] < pos[b] { (a, b) } else { (b, a) };
            let mut pool: Vec<usize> = (0..n).filter(|&z| pos[z] < pos[first]).collect();
            if rng.gen_bool(shape.conditional) && !pool.is_empty() && shape.max_selector > 0 {
                pool.shuffle(rng);
                let k = rng.gen_range(1..=shape.max_selector.min(pool.len()));
                let mut sel = pool[..k].to_vec();
                sel.sort();
                ci_arcs.push((a, b, sel));
            } else {
                i_arcs.push((first, second));
            }
        }
    }
    let skeleton = Skeleton {
        names,
        sizes,
        parents,
        i_arcs,
        ci_arcs,
    };
    draft_from(rng, shape, &skeleton)
        .build()
        .expect("forward construction yields a valid net")
}

/// A random conditionally acyclic net, by rejection sampling forward nets.
pub fn random_acyclic_net<R: Rng + ?Sized>(rng: &mut R, shape: &NetShape) -> TcpNet {
    loop {
        let net = random_forward_net(rng, shape);
        if is_conditionally_acyclic(&net).is_acyclic() {
            return net;
        }
    }
}

/// A random valid net with arcs in arbitrary directions and selectors drawn
/// from any non-endpoint variable. Both consistency verdicts occur.
pub fn random_net<R: Rng + ?Sized>(rng: &mut R, shape: &NetShape) -> TcpNet {
    loop {
        let n = rng.gen_range(shape.min_vars..=shape.max_vars);
        let names: Vec<String> = (0..n).map(name).collect();
        let sizes: Vec<usize> = (0..n).map(|_| rng.gen_range(2..=shape.max_domain.max(2))).collect();
        let mut parents = alloc::vec![Vec::new(); n];
        for (x, ps) in parents.iter_mut().enumerate() {
            let mut others: Vec<usize> = (0..n).filter(|&p| p != x).collect();
            others.shuffle(rng);
            let k = rng.gen_range(0..=shape.max_parents.min(others.len()));
            *ps = others[..k].to_vec();
            ps.sort();
        }
        let mut i_arcs = Vec::new();
        let mut ci_arcs = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                if !rng.gen_bool(shape.importance) {
                    continue;
                }
                let mut pool: Vec<usize> = (0..n).filter(|&z| z != a && z != b).collect();
                if rng.gen_bool(shape.conditional) && !pool.is_empty() && shape.max_selector > 0 {
                    pool.shuffle(rng);
                    let k = rng.gen_range(1..=shape.max_selector.min(pool.len()));
                    let mut sel = pool[..k].to_vec();
                    sel.sort();
                    ci_arcs.push((a, b, sel));
                } else if rng.gen_bool(0.5) {
                    i_arcs.push((a, b));
                } else {
                    i_arcs.push((b, a));
                }
            }
        }
        let skeleton = Skeleton {
            names,
            sizes,
            parents,
            i_arcs,
            ci_arcs,
        };
        if let Ok(net) = draft_from(rng, shape, &skeleton).build() {
            return net;
        }
    }
}

/// A net whose undirected projection is a single cycle over `len` variables
/// containing at least one ci-arc, with every other arc pointing the same way
/// round. Selectors are drawn from `pool` extra variables outside the cycle,
/// so selectors of different ci-arcs may overlap.
pub fn random_cycle_net<R: Rng + ?Sized>(rng: &mut R, len: usize, pool: usize, cit_density: f64) -> TcpNet {
    let len = len.max(2);
    let pool = pool.max(1);
    let n = len + pool;
    let names: Vec<String> = (0..n).map(name).collect();
    let sizes: Vec<usize> = (0..n).map(|v| if v < len { 2 } else { rng.gen_range(2..=3) }).collect();
    let mut parents = alloc::vec![Vec::new(); n];
    let mut i_arcs = Vec::new();
    let mut ci_arcs = Vec::new();
    let forward = rng.gen_bool(0.5);
    let forced_ci = if len == 2 { 0 } else { rng.gen_range(0..len) };
    for i in 0..len {
        let (a, b) = (i, (i + 1) % len);
        if len == 2 && i == 1 {
            // A 2-cycle needs two parallel relations; the only legal pair is
            // a cp-arc alongside an importance relation.
            let (from, to) = if forward { (b, a) } else { (a, b) };
            parents[to].push(from);
            break;
        }
        let (from, to) = if forward { (a, b) } else { (b, a) };
        if i == forced_ci || rng.gen_bool(0.5) {
            let mut sel: Vec<usize> = (len..n).filter(|_| rng.gen_bool(0.5)).collect();
            if sel.is_empty() {
                sel.push(rng.gen_range(len..n));
            }
            ci_arcs.push((a, b, sel));
        } else if rng.gen_bool(0.5) {
            i_arcs.push((from, to));
        } else {
            parents[to].push(from);
        }
    }
    let shape = NetShape {
        cit_density,
        ..NetShape::default()
    };
    let skeleton = Skeleton {
        names,
        sizes,
        parents,
        i_arcs,
        ci_arcs,
    };
    draft_from(rng, &shape, &skeleton)
        .build()
        .expect("cycle construction yields a valid net")
}

/// Up to `max_constraints` random extensional constraints of arity at most
/// `max_arity`; each tuple is allowed with probability `density`.
pub fn random_constraints<R: Rng + ?Sized>(
    rng: &mut R,
    net: &TcpNet,
    max_constraints: usize,
    max_arity: usize,
    density: f64,
) -> ConstraintSet {
    let mut set = ConstraintSet::new();
    if net.is_empty() {
        return set;
    }
    let count = rng.gen_range(0..=max_constraints);
    for _ in 0..count {
        let mut vars: Vec<_> = net.var_ids().collect();
        vars.shuffle(rng);
        let k = rng.gen_range(1..=max_arity.clamp(1, vars.len()));
        let mut scope = vars[..k].to_vec();
        scope.sort();
        let radices: Vec<usize> = scope.iter().map(|&v| net.domain_size(v)).collect();
        let allowed = MixedRadix::new(&radices).filter(|_| rng.gen_bool(density)).collect();
        set.push(Constraint::new(net, scope, allowed).expect("generated tuples are in range"));
    }
    set
}
