use germlab::{boundary_metric, Alphabet, BoundaryDistance, Cylinder, Ray, Word};
use proptest::prelude::*;

fn ray(d: usize) -> impl Strategy<Value = Ray> {
    (
        prop::collection::vec(0..d as u8, 0..4),
        prop::collection::vec(0..d as u8, 1..4),
    )
        .prop_map(move |(pre, per)| Ray::new(Alphabet::new(d).unwrap(), pre, per).unwrap())
}

/// Common prefix length read off 64 letters; enough for rays this short.
fn brute_distance(a: &Ray, b: &Ray) -> BoundaryDistance {
    match (0..64).find(|&i| a.letter(i) != b.letter(i)) {
        Some(m) => BoundaryDistance::neg_pow2(m as u32),
        None => BoundaryDistance::Zero,
    }
}

proptest! {
    #[test]
    fn ultrametric((a, b, c) in (2usize..=4).prop_flat_map(|d| (ray(d), ray(d), ray(d)))) {
        let ab = boundary_metric(&a, &b).unwrap();
        let bc = boundary_metric(&b, &c).unwrap();
        let ac = boundary_metric(&a, &c).unwrap();
        prop_assert!(ac <= ab.max(bc));
        prop_assert_eq!(ab, boundary_metric(&b, &a).unwrap());
        prop_assert_eq!(ab, brute_distance(&a, &b));
        prop_assert_eq!(ab == BoundaryDistance::Zero, a == b);
    }

    #[test]
    fn canonical_rays_round_trip(r in ray(3)) {
        let again = Ray::parse(&r.render(), r.alphabet()).unwrap();
        prop_assert_eq!(&again, &r);
        // Unrolling the period once names the same point.
        let mut pre = r.preperiod().to_vec();
        pre.extend_from_slice(r.period());
        let longer = Ray::new(r.alphabet(), pre, r.period().repeat(2)).unwrap();
        prop_assert_eq!(longer, r);
    }

    #[test]
    fn cylinders_contain_their_prefixes(r in ray(2), n in 0usize..10) {
        let c = Cylinder::new(r.prefix(n));
        prop_assert!(c.contains(&r));
        prop_assert!(c.contains_word(&r.prefix(n + 3)));
    }

    #[test]
    fn word_index_round_trip(w in prop::collection::vec(0u8..3, 0..8)) {
        let a = Alphabet::new(3).unwrap();
        let w = Word(w);
        prop_assert_eq!(Word::from_index(a, w.len(), w.index(a)), w.clone());
        prop_assert_eq!(Word::parse(&w.render(a), a).unwrap(), w);
    }
}

#[test]
fn metric_rejects_mixed_degrees() {
    let a = Ray::constant(Alphabet::new(2).unwrap(), 0).unwrap();
    let b = Ray::constant(Alphabet::new(3).unwrap(), 0).unwrap();
    assert!(boundary_metric(&a, &b).is_err());
}

#[test]
fn large_degrees_use_commas() {
    let a = Alphabet::new(12).unwrap();
    let w = Word(vec![11, 0, 10]);
    assert_eq!(Word::parse(&w.render(a), a).unwrap(), w);
    assert!(Alphabet::new(37).is_err());
    assert!(Alphabet::new(1).is_err());
}
