use residua_core::generators::{boolean, divisor, downset_lattice, parse_poset};
use residua_core::laws::{
    inject_table_fault, parse_selection, replay, run_all, run_law, shrink, Budget, Coverage, LawId,
    TableOp, Verdict,
};
use residua_core::order::{build_poset, FiniteLattice, RelationMode};

fn pentagon() -> FiniteLattice {
    let p = build_poset(
        &["0", "a", "b", "c", "1"],
        &[("0", "a"), ("a", "b"), ("b", "1"), ("0", "c"), ("c", "1")],
        RelationMode::Covers,
    )
    .unwrap();
    FiniteLattice::from_poset(p).unwrap()
}

#[test]
fn every_law_is_registered_once() {
    let names: std::collections::BTreeSet<&str> = LawId::ALL.iter().map(|l| l.name()).collect();
    assert_eq!(names.len(), LawId::ALL.len());
    assert!(LawId::ALL.len() >= 22);
    assert_eq!(parse_selection("all").unwrap().len(), LawId::ALL.len());
    assert_eq!(
        parse_selection("mu-monotone,core_union").unwrap(),
        vec![LawId::MuMonotone, LawId::CoreUnion]
    );
    assert!(parse_selection("no_such_law").is_err());
}

#[test]
fn core_residue_decomposition_on_b3() {
    let r = run_law(
        &boolean(3).unwrap(),
        LawId::CoreResidueDecomp,
        &Budget::default(),
    )
    .unwrap();
    assert!(r.is_pass());
    assert_eq!(r.coverage, Coverage::Exhaustive);
}

#[test]
fn pentagon_skips_coframe_laws() {
    let r = run_law(&pentagon(), LawId::CoheytingJoin, &Budget::default()).unwrap();
    assert!(matches!(r.verdict, Verdict::Skipped { .. }));
}

#[test]
fn join_homomorphism_on_divisor_60() {
    let r = run_law(&divisor(60).unwrap(), LawId::MuJoinHom, &Budget::default()).unwrap();
    assert!(r.is_pass());
    assert_eq!(r.checked, 144);
}

#[test]
fn n_shaped_poset() {
    let l = downset_lattice(&parse_poset("a<c,b<c,b<d").unwrap()).unwrap();
    assert!(run_all(&l, &Budget::default())
        .unwrap()
        .iter()
        .all(|r| r.is_pass()));
}

#[test]
fn a_corrupted_join_is_caught_replayed_and_shrunk() {
    let l = boolean(3).unwrap();
    let (a, b) = (1, 2);
    let right = l.join(a, b);
    let wrong = (0..l.len()).find(|&v| v != right && v != l.top()).unwrap();
    let broken = inject_table_fault(&l, TableOp::Join, a, b, wrong);
    let budget = Budget::default();
    let reports = run_all(&broken, &budget).unwrap();
    let failing = reports
        .iter()
        .find(|r| r.is_fail())
        .expect("some law notices");
    let Verdict::Fail { witness } = &failing.verdict else {
        unreachable!()
    };
    let tuple: Vec<usize> = witness
        .elements
        .iter()
        .map(|n| broken.index_of(n).unwrap())
        .collect();
    assert!(
        replay(&broken, failing.law, &witness.family, &tuple, &budget)
            .unwrap()
            .is_err()
    );
    let shrunk = shrink(&broken, failing.law, &budget);
    assert!(shrunk.report.is_fail());
    assert!(shrunk.lattice.len() <= broken.len());
}
