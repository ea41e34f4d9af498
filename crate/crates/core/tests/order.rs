use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use residua_core::generators::{boolean, chain, divisor, downsets, random_poset};
use residua_core::order::{
    as_lattice, build_poset, ElementSet, FiniteLattice, FinitePoset, OrderError, PosetDocument,
    RelationMode,
};

fn names(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("v{i}")).collect()
}

/// Reflexive-transitive closure by Floyd–Warshall.
fn closure(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<bool>> {
    let mut r = vec![vec![false; n]; n];
    for (i, row) in r.iter_mut().enumerate() {
        row[i] = true;
    }
    for &(a, b) in edges {
        r[a][b] = true;
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if r[i][k] && r[k][j] {
                    r[i][j] = true;
                }
            }
        }
    }
    r
}

#[test]
fn closure_matches_floyd_warshall() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..200 {
        let n = rng.random_range(1..10);
        let edges: Vec<(usize, usize)> = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .filter(|_| rng.random_bool(0.3))
            .collect();
        let ns = names(n);
        let pairs: Vec<(String, String)> = edges
            .iter()
            .map(|&(a, b)| (ns[a].clone(), ns[b].clone()))
            .collect();
        let p = build_poset(&ns, &pairs, RelationMode::Covers).unwrap();
        let want = closure(n, &edges);
        for (a, row) in want.iter().enumerate() {
            for (b, &expected) in row.iter().enumerate() {
                assert_eq!(p.leq(a, b), expected, "{a} <= {b}");
            }
        }
    }
}

#[test]
fn chain_closure_has_six_entries() {
    let p = build_poset(
        &["a", "b", "c"],
        &[("a", "b"), ("b", "c")],
        RelationMode::Covers,
    )
    .unwrap();
    let count = (0..3)
        .flat_map(|a| (0..3).map(move |b| (a, b)))
        .filter(|&(a, b)| p.leq(a, b))
        .count();
    assert_eq!(count, 6);
}

#[test]
fn two_cycle_is_rejected() {
    let err = build_poset(&["a", "b"], &[("a", "b"), ("b", "a")], RelationMode::Leq).unwrap_err();
    assert!(matches!(err, OrderError::CycleDetected(_, _)));
}

#[test]
fn diamond_sides_are_incomparable() {
    let p = build_poset(
        &["0", "a", "b", "1"],
        &[("0", "a"), ("0", "b"), ("a", "1"), ("b", "1")],
        RelationMode::Covers,
    )
    .unwrap();
    let (a, b) = (p.index_of("a").unwrap(), p.index_of("b").unwrap());
    assert!(!p.leq(a, b) && !p.leq(b, a));
    assert!(as_lattice(p).unwrap().is_distributive());
}

fn distributive_by_triples(l: &FiniteLattice) -> bool {
    let n = l.len();
    (0..n).all(|x| {
        (0..n)
            .all(|y| (0..n).all(|z| l.meet(x, l.join(y, z)) == l.join(l.meet(x, y), l.meet(x, z))))
    })
}

#[test]
fn pentagon_is_not_distributive() {
    let p = build_poset(
        &["0", "a", "b", "c", "1"],
        &[("0", "a"), ("a", "b"), ("b", "1"), ("0", "c"), ("c", "1")],
        RelationMode::Covers,
    )
    .unwrap();
    let l = as_lattice(p).unwrap();
    assert!(!l.is_distributive());
    assert!(!distributive_by_triples(&l));
}

#[test]
fn antichain_is_not_a_lattice() {
    let p = build_poset::<&str>(&["a", "b"], &[], RelationMode::Covers).unwrap();
    assert!(matches!(
        as_lattice(p),
        Err(OrderError::NotALattice(..)) | Err(OrderError::NoBottom)
    ));
}

#[test]
fn distributive_flag_matches_triples() {
    let mut lattices = vec![divisor(60).unwrap(), boolean(3).unwrap(), chain(5).unwrap()];
    for seed in 0..30 {
        let p = random_poset(seed, 5);
        if let Ok(l) = as_lattice(p) {
            lattices.push(l);
        }
    }
    for l in lattices {
        assert_eq!(l.is_distributive(), distributive_by_triples(&l));
    }
}

#[test]
fn down_and_up_sets() {
    let c = chain(3).unwrap();
    assert_eq!(c.down_set(1).to_vec(), vec![0, 1]);
    assert_eq!(c.down_set(c.bottom()).to_vec(), vec![c.bottom()]);
    let b = boolean(2).unwrap();
    let up: Vec<usize> = b.up_set(1).to_vec();
    let brute: Vec<usize> = (0..4).filter(|&y| b.leq(1, y)).collect();
    assert_eq!(up, brute);
    assert_eq!(up.len(), 2);
}

#[test]
fn meets_and_joins_of_sets() {
    let d = divisor(12).unwrap();
    let four = d.index_of("4").unwrap();
    let six = d.index_of("6").unwrap();
    let s = ElementSet::from_indices(d.len(), [four, six]);
    assert_eq!(d.name(d.meet_of_set(&s)), "2");
    assert_eq!(d.join_of_set(&ElementSet::empty(d.len())), d.bottom());
}

/// Downsets counted as antichains, one per downset.
fn antichains(p: &FinitePoset) -> usize {
    let n = p.len();
    (0u32..1 << n)
        .filter(|mask| {
            (0..n).all(|a| {
                (0..n).all(|b| a == b || mask >> a & 1 == 0 || mask >> b & 1 == 0 || !p.leq(a, b))
            })
        })
        .count()
}

#[test]
fn downset_count_equals_antichain_count() {
    for seed in 0..60 {
        let p = random_poset(seed, 1 + seed as usize % 6);
        assert_eq!(downsets(&p, 1 << 10).unwrap().len(), antichains(&p));
    }
}

#[test]
fn poset_document_round_trips() {
    for seed in 0..20 {
        let p = random_poset(seed, 6);
        let text = p.to_document().to_canonical_json();
        let back = PosetDocument::from_json(&text).unwrap().build().unwrap();
        assert_eq!(back, p);
        assert_eq!(back.to_document().to_canonical_json(), text);
    }
}
