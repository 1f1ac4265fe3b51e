//! Activity counts against direct level enumeration.

use germlab::activity::{activity_counts, classify_activity, fitted_degree, profile, ActivityClass};
use germlab::{registry, Element, Group};
use num_bigint::BigUint;
use proptest::prelude::*;

fn group(name: &str) -> Group {
    Group::new(registry::group(name).unwrap()).unwrap()
}

/// Number of level-`n` vertices with a nontrivial section, by listing them.
fn enumerate(g: &Element, n: usize) -> usize {
    let lnf = g.level_normal_form(n).unwrap();
    lnf.sections.iter().filter(|s| !s.is_trivial()).count()
}

#[test]
fn counts_match_enumeration_for_builtins() {
    for name in ["K()", "K(1)", "K(00,1)", "K(0,011)", "M(3)", "M(4)", "grigorchuk"] {
        let g = group(name);
        for e in g.generators() {
            let counts = activity_counts(e, 6);
            for n in 1..=6 {
                if g.degree().pow(n as u32) > 1 << 12 {
                    break;
                }
                assert_eq!(counts[n - 1], BigUint::from(enumerate(e, n)), "{name} level {n}");
            }
        }
    }
}

#[test]
fn structural_class_agrees_with_growth() {
    for name in ["K()", "K(1)", "K(01)", "K(00,1)", "K(11,0)", "K(0,011)", "M(3)", "M(4)", "grigorchuk"] {
        let g = group(name);
        for e in g.generators() {
            let p = profile(e, 10);
            match p.class {
                ActivityClass::Bounded => {
                    let max = p.counts.iter().max().unwrap();
                    assert!(*max <= BigUint::from(p.nontrivial_states), "{name}");
                }
                ActivityClass::Polynomial(k) => {
                    let fit = fitted_degree(&p.counts).unwrap();
                    assert!((fit - k as f64).abs() < 0.5, "{name}: fit {fit} vs {k}");
                }
                ActivityClass::Exponential => panic!("{name}: unexpected exponential growth"),
            }
        }
    }
}

fn word_in(g: &Group, picks: &[usize]) -> Element {
    let letters = g.symmetric_letters();
    picks
        .iter()
        .fold(g.identity(), |acc, &i| acc.compose(&g.letter(letters[i % letters.len()])).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn activity_is_subadditive(
        name in prop::sample::select(vec!["K(1)", "K(00,1)", "M(3)", "grigorchuk"]),
        x in prop::collection::vec(0usize..8, 1..4),
        y in prop::collection::vec(0usize..8, 1..4),
    ) {
        let g = group(name);
        let (a, b) = (word_in(&g, &x), word_in(&g, &y));
        let ab = a.compose(&b).unwrap();
        for n in 1..=4 {
            prop_assert!(enumerate(&ab, n) <= enumerate(&a, n) + enumerate(&b, n));
        }
    }

    #[test]
    fn class_is_stable_under_reminimization(x in prop::collection::vec(0usize..8, 1..5)) {
        let g = group("M(3)");
        let e = word_in(&g, &x);
        let again = Element::from_machine(e.machine().clone());
        prop_assert_eq!(classify_activity(&e).class, classify_activity(&again).class);
    }
}
