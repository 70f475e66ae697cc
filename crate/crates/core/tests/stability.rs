mod common;

use proptest::prelude::*;

use nerode_core::nominal::OrbitDescriptor;
use nerode_core::perm::Perm;

#[test]
fn pool_results_agree_at_two_sizes() {
    match common::stability_suite() {
        Ok(summary) => println!("{summary}"),
        Err(e) => panic!("{e}"),
    }
}

#[test]
fn canonical_forms_match_permutation_equality() {
    match common::canonical_form_suite() {
        Ok(summary) => println!("{summary}"),
        Err(e) => panic!("{e}"),
    }
}

fn stabilizer() -> impl Strategy<Value = (usize, Vec<Perm>)> {
    (1usize..=4).prop_flat_map(|d| {
        let perm = Just((0..d).collect::<Vec<usize>>()).prop_shuffle().prop_map(|v| Perm::from_images(v).unwrap());
        (Just(d), prop::collection::vec(perm, 0..3))
    })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 128, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn canonical_form_is_a_class_invariant(
        (d, gens) in stabilizer(),
        atoms in Just((1u32..=9).collect::<Vec<_>>()).prop_shuffle(),
    ) {
        let o = OrbitDescriptor::new("O", d, gens).unwrap();
        let t: Vec<u32> = atoms[..d].to_vec();
        let c = o.canonical(&t);
        prop_assert!(c <= t);
        prop_assert_eq!(o.canonical(&c), c.clone());
        for s in o.stabilizer() {
            let moved: Vec<u32> = (0..d).map(|i| t[s.apply(i)]).collect();
            prop_assert_eq!(o.canonical(&moved), c.clone());
        }
        // orbit counts at a pool follow from the stabilizer order
        let tuples: usize = (0..d).map(|k| 6 - k).product();
        prop_assert_eq!(o.count_in_pool(6) * o.stabilizer_order(), tuples);
    }
}
