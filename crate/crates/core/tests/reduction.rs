use std::sync::Arc;

use loopfire::burn::reduce_by_burning;
use loopfire::random::{
    random_cactus, random_divisor_bounded, random_grid_point, random_pl_function, seeded,
};
use loopfire::subdivision::subdivision_reduce;
use loopfire::*;
use proptest::prelude::*;

const DENS: [u64; 5] = [2, 4, 6, 12, 24];

/// Random instance on a random cactus: divisor, base point and a PL function.
fn instance(seed: u64) -> (Divisor, PointRef, PLFunction) {
    let mut rng = seeded(seed);
    let den = DENS[(seed % DENS.len() as u64) as usize];
    let genus = 1 + (seed / 7 % 4) as usize;
    let g = Arc::new(random_cactus(&mut rng, genus, den));
    let d = random_divisor_bounded(&mut rng, &g, den, 6);
    let v = random_grid_point(&mut rng, &g, den);
    let f = random_pl_function(&mut rng, &g, den).unwrap();
    (d, v, f)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn reduction_keeps_the_class(seed in any::<u64>()) {
        let (d, v, _) = instance(seed);
        prop_assert_eq!(class_coordinates(&q_reduce(&d, &v)), class_coordinates(&d));
    }

    #[test]
    fn reduction_is_idempotent(seed in any::<u64>()) {
        let (d, v, _) = instance(seed);
        let r = q_reduce(&d, &v);
        prop_assert_eq!(q_reduce(&r, &v), r);
    }

    #[test]
    fn reduced_form_is_unique_in_the_class(seed in any::<u64>()) {
        let (d, v, f) = instance(seed);
        let moved = d.plus(&divisor_of_function(&f)).unwrap();
        prop_assert_eq!(q_reduce(&moved, &v), q_reduce(&d, &v));
    }

    #[test]
    fn reduced_output_burns_completely(seed in any::<u64>()) {
        let (d, v, _) = instance(seed);
        let r = q_reduce(&d, &v);
        prop_assert!(r.is_effective_away_from(&v));
        prop_assert!(dhar_burn(&r, &v).unwrap().fully_burnt);
    }

    #[test]
    fn three_reducers_agree(seed in any::<u64>()) {
        let (d, v, _) = instance(seed);
        let a = q_reduce(&d, &v);
        prop_assert_eq!(&reduce_by_burning(&d, &v).unwrap(), &a);
        prop_assert_eq!(&subdivision_reduce(&d, &v, None).unwrap(), &a);
    }

    #[test]
    fn principal_divisors_have_degree_zero(seed in any::<u64>()) {
        let (_, v, f) = instance(seed);
        let p = divisor_of_function(&f);
        prop_assert_eq!(p.degree(), 0);
        // A principal divisor reduces to zero.
        prop_assert!(q_reduce(&p, &v).is_zero());
    }
}

#[test]
fn unburnt_set_fires_when_not_reduced() {
    let g = Arc::new(CactusGraph::parse("loop C 1\n").unwrap());
    let c = g.loop_id("C").unwrap();
    let d = Divisor::point(&g, &PointRef::new(c, "1/2".parse().unwrap()), 2);
    let v = PointRef::new(c, Rational::zero());
    let rep = dhar_burn(&d, &v).unwrap();
    assert!(!rep.fully_burnt);
    assert_eq!(q_reduce(&d, &v), Divisor::point(&g, &v, 2));
}

#[test]
fn chain_example() {
    let g = Arc::new(CactusGraph::parse("loop L1 1\nloop L2 1\nattach L2 L1 1/2\n").unwrap());
    let d = Divisor::parse(&g, "chip L2 1/4 3\n").unwrap();
    let v = g.parse_point("L1:0").unwrap();
    let r = q_reduce(&d, &v);
    assert_eq!(r.to_text(), "chip L1 0 2\nchip L2 3/4 1\n");
}

#[test]
fn circle_reduce_cases() {
    let one = Rational::one();
    let q = |s: &str| -> Rational { s.parse().unwrap() };
    // Two chips sum to 3/5, so one chip moves to v and the other to 3/5.
    assert_eq!(
        circle_reduce(&one, &[(q("3/10"), 2)], &q("0")),
        vec![(q("0"), 1), (q("3/5"), 1)]
    );
    // Chips summing to d·v collapse onto v.
    assert_eq!(
        circle_reduce(&one, &[(q("1/4"), 1), (q("3/4"), 1)], &q("0")),
        vec![(q("0"), 2)]
    );
}
