use residua_core::generators::{
    boolean, divisor, downset_lattice, generate, ideal_lattice_zn, jacobson_zn, parse_poset,
    random_distributive, subgroup_lattice, CayleyTable, GeneratorSpec,
};
use residua_core::order::FiniteLattice;

fn sizes(subs: &[u64]) -> Vec<u32> {
    let mut v: Vec<u32> = subs.iter().map(|h| h.count_ones()).collect();
    v.sort();
    v
}

#[test]
fn divisor_twelve() {
    let l = divisor(12).unwrap();
    let mut names: Vec<u64> = l.names().iter().map(|n| n.parse().unwrap()).collect();
    names.sort();
    assert_eq!(names, vec![1, 2, 3, 4, 6, 12]);
    assert!(l.is_distributive());
    for a in 0..l.len() {
        for b in 0..l.len() {
            let (x, y): (u64, u64) = (l.name(a).parse().unwrap(), l.name(b).parse().unwrap());
            assert_eq!(l.leq(a, b), y % x == 0);
        }
    }
}

#[test]
fn boolean_and_two_antichain() {
    assert_eq!(boolean(3).unwrap().len(), 8);
    let l = downset_lattice(&parse_poset("antichain:2").unwrap()).unwrap();
    assert_eq!(l.len(), 4);
    assert_eq!(l.poset().lower_covers(l.top()).len(), 2);
}

#[test]
fn subgroup_lattices() {
    let z4 = CayleyTable::catalog("Z4").unwrap();
    let (l, subs) = subgroup_lattice(&z4).unwrap();
    assert_eq!(sizes(&subs), vec![1, 2, 4]);
    assert!((0..l.len()).all(|a| (0..l.len()).all(|b| l.leq(a, b) || l.leq(b, a))));
    let q8 = CayleyTable::catalog("Q8").unwrap();
    assert_eq!(
        sizes(&subgroup_lattice(&q8).unwrap().1),
        vec![1, 2, 4, 4, 4, 8]
    );
    let s3 = CayleyTable::catalog("S3").unwrap();
    assert_eq!(
        sizes(&subgroup_lattice(&s3).unwrap().1),
        vec![1, 2, 2, 2, 3, 6]
    );
}

#[test]
fn jacobson_examples() {
    assert_eq!(jacobson_zn(12).unwrap(), 6);
    assert_eq!(jacobson_zn(30).unwrap(), 30);
    assert_eq!(jacobson_zn(8).unwrap(), 2);
    let (l, gens) = ideal_lattice_zn(12).unwrap();
    assert_eq!(l.len(), 6);
    assert_eq!(gens[l.top()], 1);
}

#[test]
fn random_lattices() {
    let a = random_distributive(1, 32).unwrap();
    assert!(a.len() <= 32 && a.is_distributive());
    let b = random_distributive(1, 32).unwrap();
    assert_eq!(a.names(), b.names());
    let trivial = downset_lattice(&parse_poset("antichain:0").unwrap()).unwrap();
    assert_eq!(trivial.len(), 1);
}

#[test]
fn specs_round_trip_through_text() {
    for text in [
        "chain:4",
        "boolean:3",
        "divisor:60",
        "random:seed=7,size=50",
        "ideals:12",
        "group:S3",
    ] {
        let spec: GeneratorSpec = text.parse().unwrap();
        assert_eq!(spec.to_string(), text);
        let l: FiniteLattice = generate(&spec).unwrap();
        assert!(!l.is_empty());
    }
    assert!("nonsense:3".parse::<GeneratorSpec>().is_err());
}
