//! Small reference nets used throughout the tests and documentation.

use crate::model::{NetDraft, TcpNet};

/// Jacket, pants and shirt. Black is preferred for jacket and pants; a red
/// shirt is preferred when jacket and pants match and a white one otherwise.
/// The jacket's colour is more important than the pants'.
pub fn evening_draft() -> NetDraft {
    evening_cp_draft().iarc("J", "P")
}

/// [`evening_draft`] without the importance arc.
pub fn evening_cp_draft() -> NetDraft {
    NetDraft::new()
        .var("J", &["black", "white"])
        .var("P", &["black", "white"])
        .var("S", &["red", "white"])
        .cp("J", "S")
        .cp("P", "S")
        .cpt("J", &[], &["black", "white"])
        .cpt("P", &[], &["black", "white"])
        .cpt("S", &[("J", "black"), ("P", "black")], &["red", "white"])
        .cpt("S", &[("J", "black"), ("P", "white")], &["white", "red"])
        .cpt("S", &[("J", "white"), ("P", "black")], &["white", "red"])
        .cpt("S", &[("J", "white"), ("P", "white")], &["red", "white"])
}

pub fn evening() -> TcpNet {
    evening_draft().build().expect("evening net is valid")
}

/// Flight booking: day (D), departure time (T), airline (A), stop-over (S)
/// and seating class (C). Time matters more than airline; the importance of
/// stop-over versus seating depends on time and airline.
pub fn flight_draft() -> NetDraft {
    NetDraft::new()
        .var("D", &["1d", "2d"])
        .var("T", &["m", "n"])
        .var("A", &["ba", "klm"])
        .var("S", &["0s", "1s"])
        .var("C", &["b", "e"])
        .cp("D", "T")
        .cp("T", "S")
        .cp("T", "C")
        .iarc("T", "A")
        .ci("S", "C", &["T", "A"])
        .cpt("D", &[], &["1d", "2d"])
        .cpt("T", &[("D", "1d")], &["m", "n"])
        .cpt("T", &[("D", "2d")], &["n", "m"])
        .cpt("A", &[], &["ba", "klm"])
        .cpt("S", &[("T", "m")], &["1s", "0s"])
        .cpt("S", &[("T", "n")], &["0s", "1s"])
        .cpt("C", &[("T", "m")], &["b", "e"])
        .cpt("C", &[("T", "n")], &["e", "b"])
        .cit("S", "C", &[("T", "m"), ("A", "klm")], "S")
        .cit("S", "C", &[("T", "n"), ("A", "ba")], "S")
        .cit("S", "C", &[("T", "m"), ("A", "ba")], "C")
}

pub fn flight() -> TcpNet {
    flight_draft().build().expect("flight net is valid")
}

/// Two independent binary variables with `A` more important than `B`.
pub fn ab() -> TcpNet {
    NetDraft::new()
        .var("A", &["a1", "a2"])
        .var("B", &["b1", "b2"])
        .iarc("A", "B")
        .cpt("A", &[], &["a1", "a2"])
        .cpt("B", &[], &["b1", "b2"])
        .build()
        .expect("two-variable net is valid")
}

/// Conditionally acyclic, yet its flip graph has a cycle. D selects the
/// orientation of A~E; an improving sequence can worsen D (C is more
/// important when B=b0) and so swap which of A and E may be traded away:
/// a0c0d0e1 -> a0c1d0e1 -> a0c1d1e1 -> a1c1d1e0 -> a1c0d0e0 -> a0c0d0e1.
pub fn selector_detour() -> TcpNet {
    NetDraft::new()
        .var("A", &["a0", "a1"])
        .var("B", &["b0", "b1"])
        .var("C", &["c0", "c1"])
        .var("D", &["d0", "d1"])
        .var("E", &["e0", "e1"])
        .cp("E", "C")
        .ci("A", "E", &["D"])
        .ci("C", "D", &["B"])
        .cpt("A", &[], &["a0", "a1"])
        .cpt("B", &[], &["b0", "b1"])
        .cpt("C", &[("E", "e0")], &["c0", "c1"])
        .cpt("C", &[("E", "e1")], &["c1", "c0"])
        .cpt("D", &[], &["d1", "d0"])
        .cpt("E", &[], &["e0", "e1"])
        .cit("A", "E", &[("D", "d0")], "A")
        .cit("A", "E", &[("D", "d1")], "E")
        .cit("C", "D", &[("B", "b0")], "C")
        .build()
        .expect("selector detour net is valid")
}

/// Three ci-arcs X~Y, Y~Z, Z~X with disjoint single-variable selectors
/// U, V, W. Each CIT is total, so some selector assignment orients the
/// triangle into a directed cycle.
pub fn ci_triangle() -> TcpNet {
    NetDraft::new()
        .var("U", &["u1", "u2"])
        .var("V", &["v1", "v2"])
        .var("W", &["w1", "w2"])
        .var("X", &["x1", "x2"])
        .var("Y", &["y1", "y2"])
        .var("Z", &["z1", "z2"])
        .ci("X", "Y", &["U"])
        .ci("Y", "Z", &["V"])
        .ci("Z", "X", &["W"])
        .cit("X", "Y", &[("U", "u1")], "X")
        .cit("X", "Y", &[("U", "u2")], "Y")
        .cit("Y", "Z", &[("V", "v1")], "Y")
        .cit("Y", "Z", &[("V", "v2")], "Z")
        .cit("Z", "X", &[("W", "w1")], "Z")
        .cit("Z", "X", &[("W", "w2")], "X")
        .cpt("U", &[], &["u1", "u2"])
        .cpt("V", &[], &["v1", "v2"])
        .cpt("W", &[], &["w1", "w2"])
        .cpt("X", &[], &["x1", "x2"])
        .cpt("Y", &[], &["y1", "y2"])
        .cpt("Z", &[], &["z1", "z2"])
        .build()
        .expect("triangle net is valid")
}
