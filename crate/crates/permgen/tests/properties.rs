//! Property tests over randomly generated groups: the stabilizer chain, the
//! solver, and the constructions are checked against brute force and against
//! closed-form arithmetic on arbitrary inputs, not just curated examples.

use permgen::constructions::build;
use permgen::mingen::{min_generating_set, MinGenOptions};
use permgen::oracle;
use permgen::{Group, Perm};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Strategy: `count` random permutations of the given degree.
fn perms(degree: usize, count: usize) -> impl Strategy<Value = Vec<Perm>> {
    let one = Just((0..degree as u32).collect::<Vec<u32>>())
        .prop_shuffle()
        .prop_map(|images| Perm::from_images(images).unwrap());
    prop::collection::vec(one, 1..=count)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// Chain order equals brute-force closure size for any generator set.
    #[test]
    fn chain_order_equals_closure_size(gens in perms(6, 3)) {
        let g = Group::new(6, gens).unwrap();
        let enumerated = oracle::enumerate_group(&g).unwrap();
        prop_assert_eq!(g.order_u64(), Some(enumerated.len() as u64));
    }

    /// Membership agrees with brute force, inside and out.
    #[test]
    fn membership_agrees_with_closure(gens in perms(5, 2), probe in perms(5, 1)) {
        let g = Group::new(5, gens).unwrap();
        let enumerated = oracle::enumerate_group(&g).unwrap();
        let x = &probe[0];
        prop_assert_eq!(g.contains(x).unwrap(), enumerated.index_of(x).is_some());
    }

    /// Random elements land in the group; products and inverses stay inside.
    #[test]
    fn random_elements_are_members(gens in perms(8, 3), seed in any::<u64>()) {
        let g = Group::new(8, gens).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = g.random_element(&mut rng);
        let b = g.random_element(&mut rng);
        prop_assert_eq!(g.contains(&a).unwrap(), true);
        prop_assert_eq!(g.contains(&Perm::compose(&a, &b)).unwrap(), true);
        prop_assert_eq!(g.contains(&a.inverse()).unwrap(), true);
    }

    /// The solver's size matches exhaustive search on arbitrary subgroups of
    /// the degree-5 symmetric group, and its witness really generates.
    #[test]
    fn solver_matches_exhaustive_search(gens in perms(5, 2), seed in any::<u64>()) {
        let g = Group::new(5, gens.clone()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let res = min_generating_set(&g, &MinGenOptions::default(), &mut rng).unwrap();
        prop_assert!(res.certified_minimal);
        prop_assert_eq!(res.d, oracle::oracle_min_gen(&g, gens.len().max(1)).unwrap());
        let regen = Group::new(5, res.gens.clone()).unwrap();
        prop_assert_eq!(regen.order(), g.order());
    }

    /// Construction arithmetic: orders of powers and products in closed form.
    #[test]
    fn construction_orders_are_exact(k in 1u32..4, n in 3u32..6) {
        let base = build(&format!("sym({n})")).unwrap();
        let power = build(&format!("direct_power(sym({n}),{k})")).unwrap();
        let base_order = base.order_u64().unwrap();
        prop_assert_eq!(power.order_u64(), Some(base_order.pow(k)));
        prop_assert_eq!(power.degree(), base.degree() * k as usize);

        let product = build(&format!("direct_product(sym({n}),cyclic({k}))")).unwrap();
        prop_assert_eq!(product.order_u64(), Some(base_order * k as u64));

        // |A wr B| = |A|^m * |B| for B of degree m
        let wreath = build(&format!("wreath(cyclic({k}),sym({n}))")).unwrap();
        prop_assert_eq!(
            wreath.order_u64(),
            Some((k as u64).pow(n) * base_order)
        );
    }
}
