use proptest::prelude::*;

use residua_core::generators::{random_distributive, random_poset};
use residua_core::laws::{run_law, Budget, LawId};
use residua_core::order::as_lattice;
use residua_core::residual::{residual_derivative, EffectiveLattice, Family};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn random_distributive_is_deterministic(seed in 0u64..10_000, size in 1usize..40) {
        let a = random_distributive(seed, size).unwrap();
        let b = random_distributive(seed, size).unwrap();
        prop_assert!(a.len() <= size.max(1));
        prop_assert!(a.is_distributive());
        prop_assert_eq!(a.names(), b.names());
    }

    #[test]
    fn mu_is_monotone_and_deflationary(seed in 0u64..10_000) {
        let l = random_distributive(seed, 40).unwrap();
        for x in 0..l.len() {
            let mx = residual_derivative(&l, x, &Family::All);
            prop_assert!(l.leq(mx, x));
            for y in (0..l.len()).filter(|&y| l.leq(y, x)) {
                prop_assert!(l.leq(residual_derivative(&l, y, &Family::All), mx));
            }
        }
    }

    #[test]
    fn subtraction_rebuilds_x(seed in 0u64..10_000) {
        let l = random_distributive(seed, 30).unwrap();
        for x in 0..l.len() {
            for z in (0..l.len()).filter(|&z| l.leq(z, x)) {
                let d = l.co_heyting_sub(x, z).unwrap();
                prop_assert_eq!(l.join(z, d), x);
            }
        }
    }

    #[test]
    fn coframe_laws_hold_or_are_skipped(seed in 0u64..10_000, n in 2usize..7) {
        if let Ok(l) = as_lattice(random_poset(seed, n)) {
            let distributive = l.is_distributive();
            for law in [LawId::CoheytingJoin, LawId::MuResidueDecomp, LawId::LatticeAxioms] {
                let r = run_law(&l, law, &Budget::default()).unwrap();
                prop_assert!(!r.is_fail(), "{:?}", r);
                if distributive {
                    prop_assert!(r.is_pass());
                }
            }
        }
    }
}
