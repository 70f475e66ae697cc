mod common;

use common::{Flavor, Outcome};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use nerode_core::monoid::{transition_monoid, FinPresMonoid, MonoidError};
use nerode_core::{random, FinObject};

fn check(o: Outcome) {
    match o {
        Ok(summary) => println!("{summary}"),
        Err(e) => panic!("{e}"),
    }
}

#[test]
fn sets() {
    check(common::monoid_suite(Flavor::Set));
}

#[test]
fn involutions() {
    check(common::monoid_suite(Flavor::Z2));
}

#[test]
fn rotations_of_order_four() {
    check(common::monoid_suite(Flavor::Z4));
}

#[test]
fn tables_that_break_a_law_are_rejected() {
    let carrier = FinObject::set(["1", "x", "y"]).unwrap();
    // (x·x)·x = y·x = y but x·(x·x) = x·y = x
    let err = FinPresMonoid::new(carrier.clone(), 0, vec![0, 1, 2, 1, 2, 1, 2, 2, 2], None).unwrap_err();
    assert!(matches!(err, MonoidError::NotAssociative(..)), "{err}");
    let err = FinPresMonoid::new(carrier, 1, vec![0; 9], None).unwrap_err();
    assert!(matches!(err, MonoidError::UnitLaw(_)), "{err}");
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn transition_monoids_satisfy_the_laws(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random::set_automaton(&mut rng, 5, 2);
        let t = transition_monoid(&a, common::CAP).unwrap();
        let m = t.monoid();
        prop_assert!(m.check_laws().is_ok());
        // multiplying witnesses is concatenating words
        let words = m.witnesses().unwrap();
        for x in 0..m.len() {
            for y in 0..m.len() {
                let joined = words[x].concat(&words[y]);
                prop_assert_eq!(t.eval(&joined).unwrap(), m.mul(x, y));
            }
        }
    }
}
