use residua_core::generators::{boolean, chain};
use residua_core::order::ElementSet;
use residua_core::topology::{
    check_order_compatible, dual_lawson, residual_equals_cb_closedsets, FiniteTopology,
    TopologyDocument,
};

fn set(n: usize, items: &[usize]) -> ElementSet {
    ElementSet::from_indices(n, items.iter().copied())
}

fn sorted_opens(t: &FiniteTopology) -> Vec<Vec<usize>> {
    let mut v: Vec<Vec<usize>> = t
        .opens(1 << 16)
        .unwrap()
        .iter()
        .map(ElementSet::to_vec)
        .collect();
    v.sort();
    v
}

#[test]
fn sierpinski_space() {
    let t = FiniteTopology::from_subbase(2, vec![set(2, &[0])]).unwrap();
    assert_eq!(sorted_opens(&t), vec![vec![], vec![0], vec![0, 1]]);
    assert_eq!(t.isolated_points(&set(2, &[0, 1])).to_vec(), vec![0]);
    assert!(!t.is_t1());
}

#[test]
fn indiscrete_and_discrete() {
    let t = FiniteTopology::from_subbase(3, vec![]).unwrap();
    assert_eq!(sorted_opens(&t).len(), 2);
    assert!(t.isolated_points(&ElementSet::full(3)).is_empty());
    let seq = t.cb_sequence(&ElementSet::full(3));
    assert_eq!(seq.rank, 0);
    let singletons = (0..4).map(|i| set(4, &[i])).collect();
    let d = FiniteTopology::from_subbase(4, singletons).unwrap();
    assert!(d.is_discrete());
    assert_eq!(sorted_opens(&d).len(), 16);
    let five = FiniteTopology::discrete(5);
    let seq = five.cb_sequence(&ElementSet::full(5));
    assert_eq!(seq.rank, 1);
    assert!(seq.level(1).is_empty());
}

#[test]
fn opens_are_closed_under_union_and_intersection() {
    let t = FiniteTopology::from_subbase(
        5,
        vec![set(5, &[0, 1]), set(5, &[1, 2, 3]), set(5, &[3, 4])],
    )
    .unwrap();
    let opens = t.opens(1 << 16).unwrap();
    for a in &opens {
        for b in &opens {
            assert!(t.is_open(&a.union(b)));
            assert!(t.is_open(&a.intersection(b)));
        }
    }
}

#[test]
fn chain_of_limits_loses_its_top_point_each_step() {
    let k = 3;
    let n = k + 1;
    let subbase = (0..=k)
        .map(|i| ElementSet::from_indices(n, i..=k))
        .collect();
    let t = FiniteTopology::from_subbase(n, subbase).unwrap();
    let seq = t.cb_sequence(&ElementSet::full(n));
    for alpha in 0..=n {
        let want: Vec<usize> = (0..n - alpha.min(n)).collect();
        assert_eq!(seq.level(alpha).to_vec(), want, "level {alpha}");
    }
    assert_eq!(seq.rank, k + 1);
}

#[test]
fn dual_lawson_examples() {
    let c = chain(3).unwrap();
    let t = dual_lawson(&c);
    assert!(t.is_discrete());
    assert_eq!(sorted_opens(&t).len(), 8);
    let b = boolean(2).unwrap();
    let t = dual_lawson(&b);
    assert_eq!(sorted_opens(&t).len(), 16);
    assert!(check_order_compatible(&b, &t).unwrap().all_pass());
}

#[test]
fn indiscrete_topology_breaks_order_closedness() {
    let b = boolean(2).unwrap();
    let report = check_order_compatible(&b, &FiniteTopology::indiscrete(4)).unwrap();
    assert!(report.order_closed.is_err());
    let c = chain(2).unwrap();
    assert!(check_order_compatible(&c, &FiniteTopology::discrete(2))
        .unwrap()
        .all_pass());
}

#[test]
fn closed_set_derivative_on_discrete_three_points() {
    let rows = residual_equals_cb_closedsets(&FiniteTopology::discrete(3)).unwrap();
    assert_eq!(rows.len(), 8);
    for row in rows {
        assert!(row.agrees());
        assert!(row.derived.is_empty());
    }
}

#[test]
fn non_t1_spaces_are_rejected() {
    let t = FiniteTopology::from_subbase(2, vec![set(2, &[0])]).unwrap();
    assert!(residual_equals_cb_closedsets(&t).is_err());
}

#[test]
fn document_round_trip() {
    let doc = TopologyDocument {
        points: 3,
        subbase: vec![vec![0], vec![0, 1]],
    };
    let t = FiniteTopology::from_document(&doc).unwrap();
    let back = FiniteTopology::from_document(&t.to_document()).unwrap();
    assert_eq!(sorted_opens(&t), sorted_opens(&back));
}
