//! Level permutations, quotient orders and stabilizers against enumeration.

use germlab::level_quotients::{
    is_level_transitive, kernel_ball, level_permutation, properness_witness_check, quotient_group,
    vertex_stabilizer_gens, Clause,
};
use germlab::perm_group::{self, closure_order, PermGroup};
use germlab::{registry, Group, Ray, Word};
use num_bigint::BigUint;
use proptest::prelude::*;

fn group(name: &str) -> Group {
    Group::new(registry::group(name).unwrap()).unwrap()
}

fn word_in(g: &Group, picks: &[usize]) -> germlab::Element {
    let letters = g.symmetric_letters();
    picks.iter().fold(g.identity(), |acc, &i| {
        acc.compose(&g.letter(letters[i % letters.len()])).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn level_permutation_is_a_homomorphism(
        name in prop::sample::select(vec!["K(1)", "K(00,1)", "M(3)", "grigorchuk"]),
        x in prop::collection::vec(0usize..8, 0..5),
        y in prop::collection::vec(0usize..8, 0..5),
        n in 1usize..=6,
    ) {
        let g = group(name);
        let (a, b) = (word_in(&g, &x), word_in(&g, &y));
        if g.degree().pow(n as u32) > 1 << 12 {
            return Ok(());
        }
        let ab = a.compose(&b).unwrap();
        let pa = level_permutation(&a, n, false).unwrap();
        let pb = level_permutation(&b, n, false).unwrap();
        prop_assert_eq!(level_permutation(&ab, n, false).unwrap(), perm_group::mul(&pa, &pb));
    }
}

#[test]
fn quotient_orders_match_closure_for_binary_groups() {
    for name in ["K()", "K(1)", "K(0)", "K(01)", "K(00,1)", "K(1,0)", "grigorchuk"] {
        let g = group(name);
        for n in 1..=3 {
            let q = quotient_group(&g, n, false).unwrap();
            let gens: Vec<_> = g.generators().iter().map(|e| level_permutation(e, n, false).unwrap()).collect();
            let brute = closure_order(&gens, 1 << n, 1 << 16).unwrap();
            assert_eq!(q.order(), BigUint::from(brute), "{name} level {n}");
        }
    }
}

#[test]
fn grigorchuk_quotient_orders() {
    // |G / St(n)| = 2^(5·2^(n-3) + 2) for n >= 3.
    let g = group("grigorchuk");
    let expect = [2u32, 8, 128, 2u32.pow(12)];
    for (n, e) in (1..=4).zip(expect) {
        assert_eq!(quotient_group(&g, n, false).unwrap().order(), BigUint::from(e), "level {n}");
    }
}

#[test]
fn level_cap_needs_force() {
    let g = group("K()");
    assert!(quotient_group(&g, 21, false).is_err());
    assert!(is_level_transitive(&g, 4, false).unwrap());
}

#[test]
fn stabilizer_generators_fix_the_vertex() {
    for (name, v) in [("K(1)", "011"), ("M(3)", "21"), ("grigorchuk", "101")] {
        let g = group(name);
        let u = Word::parse(v, g.alphabet()).unwrap();
        let data = vertex_stabilizer_gens(&g, &u, false).unwrap();
        assert!(!data.generators.is_empty(), "{name}");
        for s in &data.generators {
            assert_eq!(s.apply(&u).unwrap(), u, "{name}");
        }
        // Orbit-stabilizer at the level of the vertex.
        let n = u.len();
        let q = quotient_group(&g, n, false).unwrap();
        let idx = u.index(g.alphabet()) as u32;
        let orbit = perm_group::orbit(q.group.generators(), q.group.degree(), idx);
        assert_eq!(orbit.len(), data.orbit_size, "{name}");
        let stab: Vec<_> = data
            .generators
            .iter()
            .map(|s| level_permutation(s, n, false).unwrap())
            .collect();
        let stab_order = PermGroup::new(q.group.degree(), stab).order();
        assert_eq!(stab_order * BigUint::from(orbit.len()), q.order(), "{name}");
    }
}

#[test]
fn kernel_ball_elements_are_trivial_on_the_cylinder() {
    let g = group("K(00,1)");
    let z = Ray::constant(g.alphabet(), 1).unwrap();
    let found = kernel_ball(&g, &z, 2, 3, 100_000).unwrap();
    assert!(found.iter().any(|e| e.is_trivial()));
    for e in &found {
        assert!(e.is_trivial_on_cylinder(&z.prefix(2)));
    }
}

#[test]
fn witness_clauses_are_checked_in_order() {
    let g = group("K(1)");
    let z = Ray::constant(g.alphabet(), 1).unwrap();
    let a1 = g.generator("a1").unwrap();
    let id = g.identity();
    let r = properness_witness_check(&z, 3, a1, &id).unwrap().unwrap_err();
    assert_eq!(r.clause, Clause::KernelMembership);
    let r = properness_witness_check(&z, 3, &id, a1).unwrap().unwrap_err();
    assert_eq!(r.clause, Clause::Stabilizes);
}

#[test]
fn k1_witness_sections() {
    let g = group("K(1)");
    let z = Ray::constant(g.alphabet(), 1).unwrap();
    let one = g.identity();
    let form = |x: germlab::Element| germlab::Element::from_image_indexed(&[0, 1], &[x, one.clone()]).unwrap();
    let a1 = form(g.parse("a1").unwrap());
    let odd = form(g.parse("a2 a1 a2^-1").unwrap());
    // (a2a1)^2 a1 (a2a1)^-2
    let even = form(g.parse("a2 a1 a2 a1 a1 a1^-1 a2^-1 a1^-1 a2^-1").unwrap());
    for l in 5..=10 {
        let (gl, hl) = germlab::level_quotients::k1_witness_pair(&g, l).unwrap();
        let w = properness_witness_check(&z, l, &gl, &hl).unwrap().unwrap();
        let k = if l % 2 == 1 { l - 1 } else { l - 2 };
        let cmp = w.sections.iter().find(|s| s.vertex.len() == k).unwrap();
        assert_eq!(cmp.g_section, a1, "level {l}");
        let want = if l % 2 == 1 { &odd } else { &even };
        assert_eq!(&cmp.conjugate_section, want, "level {l}");
        assert_ne!(w.moved_word, Word::empty());
    }
}
