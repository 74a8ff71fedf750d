use std::sync::Arc;

use loopfire::random::{
    random_cactus, random_circle, random_divisor_bounded, random_grid_point, random_pl_function,
    seeded, Rng64,
};
use loopfire::rank::{generic_offsets, is_effective_class, refutation_holds, RankConfig};
use loopfire::*;
use proptest::prelude::*;
use rand::Rng;

fn small_cactus(rng: &mut Rng64) -> Arc<CactusGraph> {
    let genus = rng.gen_range(1..=3);
    Arc::new(random_cactus(rng, genus, 12))
}

/// Random divisor on a circle of degree in `[-2, 4]`; one time in four it is
/// principal of degree zero.
fn circle_divisor(rng: &mut Rng64) -> Divisor {
    let g = Arc::new(random_circle(rng));
    let l = LoopId(0);
    let c = g.circumference(l).clone();
    let at = |rng: &mut Rng64| -> Rational { &c * &Rational::new(rng.gen_range(0..60), 60) };
    if rng.gen_bool(0.25) {
        let (a, b, x) = (at(rng), at(rng), at(rng));
        let y = (&(&a + &b) - &x).rem_euclid(&c);
        return Divisor::from_chips(
            &g,
            [
                (PointRef::new(l, a), 1),
                (PointRef::new(l, b), 1),
                (PointRef::new(l, x), -1),
                (PointRef::new(l, y), -1),
            ],
        );
    }
    let n = rng.gen_range(1..=4);
    let mut d = Divisor::zero(&g);
    for _ in 0..n {
        let m = rng.gen_range(-1..=2);
        d.add_chip(&PointRef::new(l, at(rng)), m);
    }
    d
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn circle_law(seed in any::<u64>()) {
        let d = circle_divisor(&mut seeded(seed));
        let expected = match d.degree() {
            n if n >= 1 => n - 1,
            0 if class_coordinates(&d).mu[0].is_zero() => 0,
            _ => -1,
        };
        prop_assert_eq!(RankEngine::new(d.graph()).rank(&d, None).unwrap().rank, expected);
    }

    #[test]
    fn rank_is_a_class_invariant(seed in any::<u64>()) {
        let mut rng = seeded(seed);
        let g = small_cactus(&mut rng);
        let d = random_divisor_bounded(&mut rng, &g, 12, 5);
        let f = random_pl_function(&mut rng, &g, 12).unwrap();
        let e = RankEngine::new(&g);
        let moved = d.plus(&divisor_of_function(&f)).unwrap();
        // A second engine avoids sharing the memo between the two queries.
        let e2 = RankEngine::new(&g);
        prop_assert_eq!(e.rank(&d, None).unwrap().rank, e2.rank(&moved, None).unwrap().rank);
    }

    #[test]
    fn adding_a_point_raises_rank_by_at_most_one(seed in any::<u64>()) {
        let mut rng = seeded(seed);
        let g = small_cactus(&mut rng);
        let d = random_divisor_bounded(&mut rng, &g, 12, 5);
        let p = random_grid_point(&mut rng, &g, 12);
        let e = RankEngine::new(&g);
        let a = e.rank(&d, None).unwrap().rank;
        let b = e.rank(&d.with_chip(&p, 1), None).unwrap().rank;
        prop_assert!(a <= b && b <= a + 1, "{} then {}", a, b);
    }

    #[test]
    fn riemann_roch(seed in any::<u64>()) {
        let mut rng = seeded(seed);
        let g = small_cactus(&mut rng);
        let d = random_divisor_bounded(&mut rng, &g, 12, 2 * g.genus() as i64);
        let rep = riemann_roch_residual(&RankEngine::new(&g), &d).unwrap();
        prop_assert!(rep.verified);
        prop_assert_eq!(rep.residual, 0);
    }

    #[test]
    fn refutations_are_genuine(seed in any::<u64>()) {
        let mut rng = seeded(seed);
        let g = small_cactus(&mut rng);
        let d = random_divisor_bounded(&mut rng, &g, 12, 5);
        let w = RankEngine::new(&g).rank(&d, None).unwrap();
        if let Some(seq) = &w.refuting_sequence {
            prop_assert_eq!(seq.len() as i64, w.rank + 1);
            prop_assert!(refutation_holds(&d, seq));
        } else {
            prop_assert_eq!(w.rank, d.degree());
        }
    }

    #[test]
    fn sequential_and_parallel_agree(seed in any::<u64>()) {
        let mut rng = seeded(seed);
        let g = small_cactus(&mut rng);
        let d = random_divisor_bounded(&mut rng, &g, 12, 6);
        let seq = RankEngine::with_config(&g, RankConfig { exec: Exec::Sequential, ..RankConfig::default() });
        let par = RankEngine::with_config(&g, RankConfig { exec: Exec::Parallel, ..RankConfig::default() });
        prop_assert_eq!(seq.rank(&d, None).unwrap(), par.rank(&d, None).unwrap());
    }
}

/// Random off-grid adversary points never refute a rank the game certified.
#[test]
fn sampled_adversaries_never_refute() {
    let mut rng = seeded(11);
    let mut tested = 0;
    while tested < 20 {
        let g = small_cactus(&mut rng);
        let d = random_divisor_bounded(&mut rng, &g, 12, 6);
        let e = RankEngine::new(&g);
        let r = e.rank(&d, None).unwrap().rank;
        if r < 1 {
            continue;
        }
        tested += 1;
        for _ in 0..50 {
            let l = LoopId(rng.gen_range(0..g.genus()));
            let off = g.circumference(l) * &Rational::new(rng.gen_range(0..1009), 1009);
            let rest = d.with_chip(&PointRef::new(l, off), -1);
            if r == 1 {
                assert!(is_effective_class(&rest));
            } else {
                assert!(RankEngine::new(&g).has_rank_at_least(&rest, r - 1).unwrap());
            }
        }
    }
}

#[test]
fn max_r_gives_a_lower_bound() {
    let g = Arc::new(CactusGraph::parse("loop C 1\n").unwrap());
    let d = Divisor::point(&g, &PointRef::new(LoopId(0), Rational::zero()), 5);
    let w = RankEngine::new(&g).rank(&d, Some(2)).unwrap();
    assert_eq!(w.rank, 2);
    assert!(w.lower_bound_only);
}

#[test]
fn star_theta_has_rank_one() {
    let g = Arc::new(
        CactusGraph::parse("loop O 1\nloop R 7/5\nloop W 5/4\nloop S 9/7\nattach R O 0\nattach W O 1/2\nattach S O 3/4\n")
            .unwrap(),
    );
    let e = RankEngine::new(&g);
    for j in 0..16 {
        let d =
            Divisor::parse(&g, &format!("chip O 0 1\nchip O 1/2 1\nchip O {j}/16 1\n")).unwrap();
        assert_eq!(e.rank(&d, None).unwrap().rank, 1, "theta = {j}/16");
    }
}

#[test]
fn sample_offsets_avoid_special_points() {
    let c = Rational::one();
    let offs = generic_offsets(&c, 3, &[Rational::zero()]).unwrap();
    assert_eq!(
        offs.iter().map(|o| o.to_string()).collect::<Vec<_>>(),
        ["1/6", "1/2", "5/6"]
    );
    let offs = generic_offsets(&c, 3, &[Rational::new(1, 2)]).unwrap();
    assert!(!offs.contains(&Rational::new(1, 2)));
}
