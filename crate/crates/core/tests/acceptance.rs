//! Acceptance gate: one PASS/FAIL line per criterion, each under its time limit.

use std::sync::Arc;
use std::time::{Duration, Instant};

use loopfire::bn::*;
use loopfire::burn::reduce_by_burning;
use loopfire::random::{
    random_cactus, random_circle, random_divisor, random_divisor_bounded, random_grid_point,
    seeded, Rng64,
};
use loopfire::rank::is_effective_class;
use loopfire::subdivision::subdivision_reduce;
use loopfire::*;
use rand::Rng;

type Outcome = Result<String, String>;

fn graph(text: &str) -> Arc<CactusGraph> {
    Arc::new(CactusGraph::parse(text).expect("valid graph"))
}

fn star() -> Arc<CactusGraph> {
    graph("loop O 1\nloop R 7/5\nloop W 5/4\nloop S 9/7\nattach R O 0\nattach W O 1/2\nattach S O 3/4\n")
}

fn circle() -> Arc<CactusGraph> {
    graph("loop C 1\n")
}

fn chain() -> Arc<CactusGraph> {
    graph("loop L1 1\nloop L2 1\nattach L2 L1 1/2\n")
}

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn err(e: Error) -> String {
    e.to_string()
}

fn circle_law() -> Outcome {
    let mut rng = seeded(101);
    let mut principal = 0;
    for i in 0..200 {
        let g = Arc::new(random_circle(&mut rng));
        let l = LoopId(0);
        let c = g.circumference(l).clone();
        let at = |rng: &mut Rng64| PointRef::new(l, &c * &Rational::new(rng.gen_range(0..97), 97));
        let d = if i % 4 == 0 {
            // a + b − x − (a + b − x): principal of degree zero.
            let (a, b, x) = (at(&mut rng), at(&mut rng), at(&mut rng));
            let y = (&(&a.offset + &b.offset) - &x.offset).rem_euclid(&c);
            Divisor::from_chips(&g, [(a, 1), (b, 1), (x, -1), (PointRef::new(l, y), -1)])
        } else {
            let mut d = Divisor::zero(&g);
            for _ in 0..rng.gen_range(1..=4) {
                let m = rng.gen_range(-1..=2);
                d.add_chip(&at(&mut rng), m);
            }
            d
        };
        let expected = match d.degree() {
            n if n >= 1 => n - 1,
            0 if class_coordinates(&d).mu[0].is_zero() => {
                principal += 1;
                0
            }
            _ => -1,
        };
        let got = RankEngine::new(&g).rank(&d, None).map_err(err)?.rank;
        ensure(
            got == expected,
            format!("case {i}: rank {got}, expected {expected}"),
        )?;
    }
    Ok(format!("200 divisors, {principal} principal"))
}

fn oracle_instances(seed: u64, n: usize) -> Vec<(Divisor, PointRef)> {
    let mut rng = seeded(seed);
    let dens = [2u64, 3, 4, 5, 6, 8, 12, 24];
    (0..n)
        .map(|_| {
            let genus = rng.gen_range(1..=4);
            let den = dens[rng.gen_range(0..dens.len())];
            let g = Arc::new(random_cactus(&mut rng, genus, den));
            let d = random_divisor_bounded(&mut rng, &g, den, 6);
            let v = random_grid_point(&mut rng, &g, den);
            (d, v)
        })
        .collect()
}

fn oracle_triangle() -> Outcome {
    for (i, (d, v)) in oracle_instances(202, 100).iter().enumerate() {
        let a = q_reduce(d, v);
        let b = reduce_by_burning(d, v).map_err(err)?;
        let c = subdivision_reduce(d, v, None).map_err(err)?;
        ensure(
            a == b,
            format!("case {i}: burning gives {b:?}, closed form {a:?}"),
        )?;
        ensure(
            a == c,
            format!("case {i}: subdivision gives {c:?}, closed form {a:?}"),
        )?;
    }
    Ok("100 instances, three reducers equal".into())
}

fn reducedness() -> Outcome {
    for (i, (d, v)) in oracle_instances(303, 100).iter().enumerate() {
        let a = q_reduce(d, v);
        ensure(
            a.is_effective_away_from(v),
            format!("case {i}: negative away from base"),
        )?;
        ensure(
            dhar_burn(&a, v).map_err(err)?.fully_burnt,
            format!("case {i}: not fully burnt"),
        )?;
        ensure(q_reduce(&a, v) == a, format!("case {i}: not idempotent"))?;
    }
    Ok("100 outputs burnt, effective away from base, idempotent".into())
}

fn global_rr() -> Outcome {
    let rep = verify_rr_random(404, 100, 4, Exec::default()).map_err(err)?;
    ensure(rep.passed, rep.to_string())?;
    Ok("100 instances, residual 0".into())
}

fn lemma() -> Outcome {
    let rep = verify_lemma_w13(&star(), 64, &ProbeConfig::default()).map_err(err)?;
    ensure(rep.passed, rep.to_string())?;
    ensure(
        rep.facts["probe_dims"] == "1,1,1",
        format!("probe dims {}", rep.facts["probe_dims"]),
    )?;
    ensure(rep.facts["rho"] == "0", "rho")?;
    ensure(
        rep.verdict
            .starts_with("not geometric Brill-Noether general"),
        rep.verdict.clone(),
    )?;
    Ok("64 angles rank >= 1, rho = 0, probe dims 1,1,1".into())
}

fn path_control() -> Outcome {
    let g = graph(
        "loop L1 1\nloop L2 1\nloop L3 1\nloop L4 1\nattach L2 L1 1/2\nattach L3 L2 13/37\nattach L4 L3 11/29\n",
    );
    let rep = stratified_scan(&RankEngine::new(&g), &ScanConfig::new(1, 3, 16)).map_err(err)?;
    ensure(
        !rep.found_positive_dimensional,
        "scan found a persistent run",
    )?;
    let longest = rep.strata.iter().map(|s| s.max_run()).max().unwrap_or(0);
    Ok(format!(
        "{} strata, longest run {longest}",
        rep.strata.len()
    ))
}

fn prop_weak() -> Outcome {
    let g6 = graph(
        "loop L1 1\nloop L2 1\nloop L3 1\nloop L4 1\nloop L5 1\nloop L6 1\n\
         attach L2 L1 1/2\nattach L3 L2 1/3\nattach L4 L3 2/5\nattach L5 L2 3/4\nattach L6 L3 1/5\n",
    );
    let g5 = graph(
        "loop L1 1\nloop L2 1\nloop L3 1\nloop L4 1\nloop L5 1\n\
         attach L2 L1 1/2\nattach L3 L2 1/3\nattach L4 L2 2/3\nattach L5 L2 5/6\n",
    );
    for (g, rho, l) in [(&g6, "-2", "4"), (&g5, "-1", "3")] {
        let t = Instant::now();
        let rep = verify_prop_weak(g, Exec::default()).map_err(err)?;
        ensure(rep.passed, rep.to_string())?;
        ensure(
            rep.facts["rho"] == rho && rep.facts["l"] == l && rep.facts["degree"] == "3",
            rep.to_string(),
        )?;
        ensure(
            rep.verdict
                .starts_with("not weakly geometric Brill-Noether general"),
            rep.verdict.clone(),
        )?;
        ensure(t.elapsed() < Duration::from_secs(60), "over 60 s")?;
    }
    Ok("g=6 l=4 rho=-2 and g=5 l=3 rho=-1, inner claims hold".into())
}

fn wedge_pointwise() -> Outcome {
    let mut rng = seeded(808);
    let bases = [circle(), chain(), star()];
    for i in 0..50 {
        let g1 = &bases[i % 3];
        let l = LoopId(rng.gen_range(0..g1.genus()));
        let at = PointRef::new(
            l,
            g1.circumference(l) * &Rational::new(rng.gen_range(0..24), 24),
        );
        let c2 = Rational::new(rng.gen_range(6..=24), 12);
        let (r, d, witness) = match i % 3 {
            0 => (1, 2, random_divisor(&mut rng, g1, 24, 2, 1, true)),
            1 => (1, 3, random_divisor(&mut rng, g1, 24, 3, 1, true)),
            _ => {
                let layout = StarLayout::detect(g1).map_err(err)?;
                let theta = Rational::new(rng.gen_range(0..64), 64);
                (1, 3, star_theta_divisor(g1, &layout, &theta))
            }
        };
        let cfg = WedgeDimConfig {
            samples: 1,
            seed: i as u64,
            witness: Some(witness),
            probe: None,
            ..WedgeDimConfig::default()
        };
        let rep = verify_wedge_dim(g1, &at, c2, r, d, &cfg).map_err(err)?;
        ensure(rep.passed, format!("instance {i}: {rep}"))?;
    }
    Ok("50 instances, rank(D + p) >= r".into())
}

fn tree_chain() -> Outcome {
    let rep = verify_tree_chain(&star(), 2, Exec::default()).map_err(err)?;
    ensure(rep.passed, rep.to_string())?;
    ensure(
        rep.facts["dims_vs_rho"] == "1/0,2/1,3/2",
        rep.facts["dims_vs_rho"].clone(),
    )?;
    Ok("dims 1,2,3 against rho 0,1,2".into())
}

fn sandwich() -> Outcome {
    let c = circle();
    let e = RankEngine::new(&c);
    let w12 = bn_rank_bounds(&e, 1, 2, 1_000_000, Exec::default()).map_err(err)?;
    let w02 = bn_rank_bounds(&e, 0, 2, 1_000_000, Exec::default()).map_err(err)?;
    ensure(
        (w12.lower, w12.upper) == (1, 1),
        format!("w^1_2(circle) in [{}, {}]", w12.lower, w12.upper),
    )?;
    ensure(
        (w02.lower, w02.upper) == (2, 2),
        format!("w^0_2(circle) in [{}, {}]", w02.lower, w02.upper),
    )?;
    let at = c.parse_point("C:1/3").unwrap();
    let big = Arc::new(c.wedge_with_loop(&at, Rational::new(3, 2)).map_err(err)?);
    let mid =
        bn_rank_bounds(&RankEngine::new(&big), 1, 3, 1_000_000, Exec::default()).map_err(err)?;
    ensure(
        1 <= mid.lower && mid.upper <= 2,
        format!("w^1_3(G) in [{}, {}]", mid.lower, mid.upper),
    )?;
    let rep = verify_rank_sandwich(
        &c,
        &at,
        Rational::new(3, 2),
        1,
        2,
        1_000_000,
        Exec::default(),
    )
    .map_err(err)?;
    ensure(rep.passed, rep.to_string())?;
    let ch = chain();
    let rep = verify_rank_sandwich(
        &ch,
        &ch.parse_point("L2:1/3").unwrap(),
        Rational::new(3, 2),
        1,
        3,
        1_000_000,
        Exec::default(),
    )
    .map_err(err)?;
    ensure(rep.passed, rep.to_string())?;
    Ok(format!(
        "w^1_2 = 1, w^0_2 = 2, w^1_3(G) in [{}, {}], chain consistent",
        mid.lower, mid.upper
    ))
}

fn sampling_validation() -> Outcome {
    let mut rng = seeded(1111);
    let mut instances = 0;
    let mut points = 0;
    while instances < 50 {
        let genus = rng.gen_range(1..=3);
        let g = Arc::new(random_cactus(&mut rng, genus, 12));
        let chips = rng.gen_range(2..=5);
        let d = random_divisor(&mut rng, &g, 12, chips, 2, true);
        let r = RankEngine::new(&g).rank(&d, None).map_err(err)?.rank;
        if r < 1 {
            continue;
        }
        instances += 1;
        for _ in 0..200 {
            let l = LoopId(rng.gen_range(0..g.genus()));
            let off = g.circumference(l) * &Rational::new(rng.gen_range(0..10007), 10007);
            let rest = d.with_chip(&PointRef::new(l, off.clone()), -1);
            let holds = if r == 1 {
                is_effective_class(&rest)
            } else {
                RankEngine::new(&g)
                    .has_rank_at_least(&rest, r - 1)
                    .map_err(err)?
            };
            ensure(
                holds,
                format!(
                    "missed refutation: rank {r} divisor {d:?} minus {}:{off}",
                    g.name(l)
                ),
            )?;
            points += 1;
        }
    }
    Ok(format!(
        "{instances} instances x 200 points, {points} checked, 0 missed"
    ))
}

type Criterion = (&'static str, u64, fn() -> Outcome);

fn main() {
    let criteria: Vec<Criterion> = vec![
        ("circle Riemann-Roch law", 5, circle_law),
        ("reduction oracle triangle", 60, oracle_triangle),
        ("reducedness", 60, reducedness),
        ("global Riemann-Roch", 120, global_rr),
        ("star lemma", 60, lemma),
        ("path-of-loops control", 120, path_control),
        ("weak generality both parities", 120, prop_weak),
        ("wedge step pointwise", 120, wedge_pointwise),
        ("tree chain", 300, tree_chain),
        ("rank sandwich", 120, sandwich),
        ("candidate sampling validation", 300, sampling_validation),
    ];
    let mut failed = 0;
    for (i, (name, limit, run)) in criteria.into_iter().enumerate() {
        let t = Instant::now();
        let out = run();
        let secs = t.elapsed().as_secs_f64();
        let out = match out {
            Ok(s) if secs > limit as f64 => Err(format!("{s}; took {secs:.2}s, limit {limit}s")),
            other => other,
        };
        match out {
            Ok(detail) => println!("criterion {:>2} {name}: PASS ({detail}; {secs:.2}s)", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} {name}: FAIL ({detail}; {secs:.2}s)", i + 1);
            }
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
    println!("all criteria passed");
}
