//! DOT export of Hasse diagrams and boundary posets.

use std::fmt::Write;

use crate::order::FiniteLattice;
use crate::residual::{EffectiveLattice, ResidualProfile};

fn quote(label: &str) -> String {
    format!("\"{}\"", label.replace('\\', "\\\\").replace('"', "\\\""))
}

/// Hasse diagram with edges pointing from lower covers upwards.
pub fn hasse_dot(l: &FiniteLattice) -> String {
    let mut out = String::from("digraph hasse {\n  rankdir=BT;\n");
    for x in 0..l.len() {
        writeln!(out, "  n{x} [label={}];", quote(l.name(x))).expect("string write");
    }
    for x in 0..l.len() {
        for z in l.poset().lower_covers(x) {
            writeln!(out, "  n{z} -> n{x};").expect("string write");
        }
    }
    out.push_str("}\n");
    out
}

/// The boundary poset `δ(x)` with one cluster per stratum and edges for the
/// covering relation inside `δ(x)`.
pub fn boundary_dot<L: EffectiveLattice>(l: &L, profile: &ResidualProfile<L::Elem>) -> String {
    let mut out = String::from("digraph boundary {\n  rankdir=BT;\n");
    let nodes: Vec<L::Elem> = profile.rho.keys().copied().collect();
    let id = |e: L::Elem| nodes.iter().position(|&n| n == e).expect("node of δ(x)");
    for (alpha, stratum) in profile.strata.iter().enumerate() {
        writeln!(
            out,
            "  subgraph cluster_{alpha} {{\n    label=\"stratum {alpha}\";"
        )
        .expect("string write");
        for &s in stratum {
            writeln!(out, "    n{} [label={}];", id(s), quote(&l.label(s))).expect("string write");
        }
        out.push_str("  }\n");
    }
    for &s in &nodes {
        for &t in &nodes {
            let covers = l.lt(s, t) && !nodes.iter().any(|&u| l.lt(s, u) && l.lt(u, t));
            if covers {
                writeln!(out, "  n{} -> n{};", id(s), id(t)).expect("string write");
            }
        }
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{boolean, chain};
    use crate::residual::{compute_profile, Family};

    #[test]
    fn boolean_square() {
        let dot = hasse_dot(&boolean(2).unwrap());
        assert_eq!(dot.matches("[label=").count(), 4);
        assert_eq!(dot.matches("->").count(), 4);
    }

    #[test]
    fn single_point() {
        let dot = hasse_dot(&chain(1).unwrap());
        assert_eq!(dot.matches("[label=").count(), 1);
        assert_eq!(dot.matches("->").count(), 0);
    }

    #[test]
    fn chain_boundary_edge_points_up_a_stratum() {
        let l = chain(3).unwrap();
        let p = compute_profile(&l, 2, &Family::All).unwrap();
        let dot = boundary_dot(&l, &p);
        assert_eq!(dot.matches("[label=").count(), 2);
        assert!(dot.contains("cluster_0 {\n    label=\"stratum 0\";\n    n1 [label=\"2\"]"));
        assert!(dot.contains("cluster_1 {\n    label=\"stratum 1\";\n    n0 [label=\"1\"]"));
        assert!(dot.contains("n0 -> n1;"));
    }

    #[test]
    fn labels_are_escaped() {
        assert_eq!(quote("a\"b"), "\"a\\\"b\"");
    }
}
