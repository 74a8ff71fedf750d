//! Verifiers that rebuild each constructive step on concrete graphs and
//! check it with the exact rank game.

use std::sync::Arc;

use rand::Rng;

use super::probe::{local_dim_probe, ProbeConfig};
use super::wrd::{bn_rank_bounds, find_witness, BnRankBounds};
use super::{rho, VerifyReport};
use crate::burn::{dhar_burn, reduce_by_burning};
use crate::divisor::Divisor;
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::graph::{CactusGraph, LoopId, PointRef};
use crate::random::{random_cactus, random_divisor_bounded, random_grid_point, seeded};
use crate::rank::{generic_offsets, riemann_roch_residual, RankConfig, RankEngine};
use crate::rational::Rational;
use crate::reduce::q_reduce;
use crate::subdivision::subdivision_reduce;

const NOT_GENERAL: &str = "not geometric Brill-Noether general";
const NOT_WEAKLY_GENERAL: &str = "not weakly geometric Brill-Noether general";

fn engine(g: &Arc<CactusGraph>, exec: Exec) -> RankEngine {
    RankEngine::with_config(
        g,
        RankConfig {
            exec,
            ..RankConfig::default()
        },
    )
}

fn neighbours(g: &CactusGraph, l: LoopId) -> Vec<LoopId> {
    let mut n = g.children(l).to_vec();
    n.extend(g.parent(l));
    n
}

/// The point where two adjacent loops meet.
fn junction(g: &CactusGraph, a: LoopId, b: LoopId) -> PointRef {
    if g.parent(b) == Some(a) {
        g.origin(b).expect("child has an origin").clone()
    } else {
        g.origin(a).expect("child has an origin").clone()
    }
}

/// A point on `l` away from every wedge point: the midpoint when it is free,
/// otherwise the first generic sample.
fn interior_point(g: &CactusGraph, l: LoopId, prefer_mid: bool) -> Result<PointRef> {
    let mut taken: Vec<Rational> = g
        .wedge_points()
        .iter()
        .filter_map(|p| g.offset_on(p, l))
        .collect();
    taken.push(Rational::zero());
    let c = g.circumference(l);
    let mid = c * &Rational::new(1, 2);
    if prefer_mid && !taken.contains(&mid) {
        return Ok(PointRef::new(l, mid));
    }
    let off = generic_offsets(c, 1, &taken).ok_or_else(|| Error::SampleCollision {
        loop_name: g.name(l).to_string(),
        limit: crate::rank::SAMPLE_REFINEMENT_LIMIT,
    })?;
    Ok(PointRef::new(l, off[0].clone()))
}

/// Central loop of a genus-4 star and the wedge points `A`, `B` of its first
/// two leaves.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StarLayout {
    pub center: LoopId,
    pub leaves: Vec<LoopId>,
    pub a: PointRef,
    pub b: PointRef,
}

impl StarLayout {
    pub fn detect(g: &CactusGraph) -> Result<Self> {
        let stats = g.graph_stats();
        if stats.genus != 4 || stats.longest_loop_path != 3 {
            return Err(Error::Precondition(format!(
                "expected a genus-4 star (g=4, l=3), got g={}, l={}",
                stats.genus, stats.longest_loop_path
            )));
        }
        let center = g
            .loop_ids()
            .find(|&l| neighbours(g, l).len() == 3)
            .ok_or_else(|| Error::Precondition("no loop meets all the others".into()))?;
        let mut leaves = neighbours(g, center);
        leaves.sort();
        let a = junction(g, center, leaves[0]);
        let b = junction(g, center, leaves[1]);
        Ok(StarLayout {
            center,
            leaves,
            a,
            b,
        })
    }
}

/// `A + B + (θ)` with `θ` an offset on the central loop.
pub fn star_theta_divisor(g: &Arc<CactusGraph>, layout: &StarLayout, theta: &Rational) -> Divisor {
    Divisor::from_chips(
        g,
        [
            (layout.a.clone(), 1),
            (layout.b.clone(), 1),
            (PointRef::new(layout.center, theta.clone()), 1),
        ],
    )
}

/// Probe angles, as fractions of the central circumference.
pub const LEMMA_PROBE_ANGLES: [(i64, i64); 3] = [(1, 8), (3, 8), (5, 8)];

pub fn verify_lemma_w13(
    g: &Arc<CactusGraph>,
    n: usize,
    probe: &ProbeConfig,
) -> Result<VerifyReport> {
    let layout = StarLayout::detect(g)?;
    if n == 0 {
        return Err(Error::InvalidArgument("need at least one angle".into()));
    }
    let e = engine(g, probe.exec);
    let c = g.circumference(layout.center).clone();
    let mut rep = VerifyReport::new("lemma-w13");
    rep.fact("genus", 4);
    rep.fact("center", g.name(layout.center));
    rep.fact("A", g.fmt_point(&layout.a));
    rep.fact("B", g.fmt_point(&layout.b));

    let thetas: Vec<Rational> = (0..n as i64)
        .map(|j| &c * &Rational::new(j, n as i64))
        .collect();
    let ok = probe.exec.try_map(&thetas, |t| {
        e.has_rank_at_least(&star_theta_divisor(g, &layout, t), 1)
    })?;
    let bad: Vec<String> = thetas
        .iter()
        .zip(&ok)
        .filter(|(_, o)| !**o)
        .map(|(t, _)| t.to_string())
        .collect();
    rep.check(
        "rank(D_theta) >= 1",
        bad.is_empty(),
        if bad.is_empty() {
            format!("all {n} angles")
        } else {
            format!("fails at theta = {}", bad.join(", "))
        },
    );
    let r0 = rho(4, 1, 3);
    rep.fact("rho", r0);
    rep.check("rho(4,1,3) = 0", r0 == 0, format!("rho = {r0}"));

    let mut dims = Vec::new();
    for (p, q) in LEMMA_PROBE_ANGLES {
        let t = &c * &Rational::new(p, q);
        let dp = local_dim_probe(&e, &star_theta_divisor(g, &layout, &t), 1, probe)?;
        rep.check(
            format!("probe at theta = {t}"),
            dp.estimated_local_dim >= 1,
            format!("local dimension {}", dp.estimated_local_dim),
        );
        dims.push(dp.estimated_local_dim.to_string());
    }
    rep.fact("probe_dims", dims.join(","));
    rep.verdict = if rep.passed {
        format!("{NOT_GENERAL}: dim W^1_3 >= 1 > rho(4,1,3) = 0")
    } else {
        "lemma not reproduced".into()
    };
    Ok(rep)
}

pub fn verify_prop_weak(g: &Arc<CactusGraph>, exec: Exec) -> Result<VerifyReport> {
    let genus = g.genus() as i64;
    let path = g.longest_path();
    let l = path.len() as i64;
    if l > genus - 2 {
        return Err(Error::Precondition(format!(
            "needs l <= g - 2, got g={genus}, l={l}"
        )));
    }
    let e = engine(g, exec);
    let (q, deg, home): (PointRef, i64, Vec<LoopId>) = if l % 2 == 0 {
        let (a, b) = (path[(l / 2 - 1) as usize], path[(l / 2) as usize]);
        (junction(g, a, b), l / 2 + 1, vec![a, b])
    } else {
        let mid = path[((l - 1) / 2) as usize];
        (interior_point(g, mid, false)?, (l + 3) / 2, vec![mid])
    };
    let d = Divisor::point(g, &q, deg);
    let mut rep = VerifyReport::new("prop-weak");
    rep.fact("genus", genus);
    rep.fact("l", l);
    rep.fact("q", g.fmt_point(&q));
    rep.fact("degree", deg);
    rep.check(
        "rank(D) >= 1",
        e.has_rank_at_least(&d, 1)?,
        format!("D = {deg}({})", g.fmt_point(&q)),
    );

    // Distance of every loop to the nearest loop containing q.
    let dist: Vec<usize> = g
        .loop_ids()
        .map(|x| {
            home.iter()
                .map(|&h| g.distances_from(h)[x.0])
                .min()
                .unwrap()
        })
        .collect();
    let mut worst = Vec::new();
    for x in g.loop_ids() {
        let k = dist[x.0] as i64;
        let bound = if l % 2 == 0 {
            l / 2 - k + 1
        } else {
            (l + 3) / 2 - k
        };
        let v = interior_point(g, x, true)?;
        let got = q_reduce(&d, &v).degree_on_loop(x);
        if got < bound {
            worst.push(format!("{} (k={k}): {got} < {bound}", g.name(x)));
        }
    }
    rep.check(
        "reduced degree on each loop",
        worst.is_empty(),
        if worst.is_empty() {
            format!("all {genus} loops meet the bound")
        } else {
            worst.join("; ")
        },
    );
    let r0 = rho(genus, 1, deg);
    let expected = if l % 2 == 0 {
        -genus + l
    } else {
        -genus + l + 1
    };
    rep.fact("rho", r0);
    rep.check(
        "rho < 0",
        r0 < 0 && r0 == expected,
        format!("rho(g,1,{deg}) = {r0}"),
    );
    rep.verdict = if rep.passed {
        format!("{NOT_WEAKLY_GENERAL}: W^1_{deg} nonempty with rho = {r0}")
    } else {
        "construction not reproduced".into()
    };
    Ok(rep)
}

#[derive(Debug, Clone)]
pub struct WedgeDimConfig {
    pub samples: usize,
    pub seed: u64,
    pub witness: Option<Divisor>,
    /// Probe settings; `None` skips the dimension comparison.
    pub probe: Option<ProbeConfig>,
    /// Candidate budget for the witness search.
    pub budget: usize,
    pub exec: Exec,
}

impl Default for WedgeDimConfig {
    fn default() -> Self {
        WedgeDimConfig {
            samples: 20,
            seed: 0,
            witness: None,
            probe: Some(ProbeConfig::default()),
            budget: 100_000,
            exec: Exec::default(),
        }
    }
}

fn witness_for(
    e: &RankEngine,
    r: i64,
    d: i64,
    given: Option<&Divisor>,
    budget: usize,
) -> Result<Divisor> {
    match given {
        Some(w) => {
            if w.degree() != d {
                return Err(Error::Precondition(format!(
                    "witness has degree {}, expected {d}",
                    w.degree()
                )));
            }
            if !e.has_rank_at_least(w, r)? {
                return Err(Error::Precondition(format!(
                    "witness does not have rank at least {r}"
                )));
            }
            Ok(w.clone())
        }
        None => find_witness(e, r, d, budget)?.ok_or_else(|| {
            Error::Precondition(format!("no witness of rank {r} and degree {d} found"))
        }),
    }
}

fn random_offset(rng: &mut impl Rng, c: &Rational) -> Rational {
    c * &Rational::new(rng.gen_range(1..997), 997)
}

pub fn verify_wedge_dim(
    g1: &Arc<CactusGraph>,
    at: &PointRef,
    c2: Rational,
    r: i64,
    d: i64,
    cfg: &WedgeDimConfig,
) -> Result<VerifyReport> {
    let e1 = engine(g1, cfg.exec);
    let w1 = witness_for(&e1, r, d, cfg.witness.as_ref(), cfg.budget)?;
    let g = Arc::new(g1.wedge_with_loop(at, c2.clone())?);
    let new = LoopId(g1.genus());
    let e = engine(&g, cfg.exec);
    let w = w1.lift_to(&g)?;

    let mut rep = VerifyReport::new("wedge-dim");
    rep.fact("genus", g.genus());
    rep.fact("new_loop", g.name(new));
    rep.fact("witness", w1.to_text().trim().replace('\n', "; "));
    let mut rng = seeded(cfg.seed);
    let ps: Vec<(PointRef, PointRef)> = (0..cfg.samples)
        .map(|_| {
            let p = PointRef::new(new, random_offset(&mut rng, &c2));
            let q = PointRef::new(new, random_offset(&mut rng, &c2));
            (p, q)
        })
        .collect();
    let verdicts = cfg.exec.try_map(&ps, |(p, x)| -> Result<(bool, bool)> {
        let dp = w.with_chip(p, 1);
        let full = e.has_rank_at_least(&dp, r)?;
        // Removing one chip on the new loop leaves rank r - 1.
        let local = r < 1 || e.has_rank_at_least(&dp.with_chip(x, -1), r - 1)?;
        Ok((full, local))
    })?;
    let bad = verdicts.iter().filter(|v| !v.0).count();
    rep.check(
        format!("rank(D + p) >= {r}"),
        bad == 0,
        format!("{} of {} samples", cfg.samples - bad, cfg.samples),
    );
    let bad_local = verdicts.iter().filter(|v| !v.1).count();
    rep.check(
        "one chip removed on the new loop",
        bad_local == 0,
        format!("{} of {} samples", cfg.samples - bad_local, cfg.samples),
    );

    if let Some(pc) = &cfg.probe {
        let p = match ps.first() {
            Some((p, _)) => p.clone(),
            None => interior_point(&g, new, false)?,
        };
        let before = local_dim_probe(&e1, &w1, r, pc)?.estimated_local_dim;
        let mut pc2 = *pc;
        pc2.subset_limit = pc.subset_limit.max(before + 1);
        if pc2.subset_limit > 3 {
            return Err(Error::Budget(
                "probe would need subsets larger than 3".into(),
            ));
        }
        let after = local_dim_probe(&e, &w.with_chip(&p, 1), r, &pc2)?.estimated_local_dim;
        rep.fact("dim_before", before);
        rep.fact("dim_after", after);
        rep.fact("rho", rho(g.genus() as i64, r, d + 1));
        rep.check(
            "probe grows by one",
            after > before,
            format!("{before} -> {after}"),
        );
    }
    rep.verdict = if rep.passed {
        "wedge adds a dimension to W^r_d".into()
    } else {
        "wedge step not reproduced".into()
    };
    Ok(rep)
}

fn fmt_bounds(b: &BnRankBounds) -> String {
    let mut s = if b.is_exact() {
        format!("{}", b.lower)
    } else {
        format!("[{}, {}]", b.lower, b.upper)
    };
    if b.widened {
        s.push_str(" (budget exhausted)");
    }
    s
}

pub fn verify_rank_sandwich(
    g1: &Arc<CactusGraph>,
    at: &PointRef,
    c2: Rational,
    r: i64,
    d: i64,
    budget: usize,
    exec: Exec,
) -> Result<VerifyReport> {
    if r < 1 {
        return Err(Error::Precondition("needs r >= 1".into()));
    }
    let e1 = engine(g1, exec);
    if find_witness(&e1, r, d, budget)?.is_none() {
        return Err(Error::Precondition(format!(
            "W^{r}_{d} of the base graph looks empty"
        )));
    }
    let g = Arc::new(g1.wedge_with_loop(at, c2)?);
    let e = engine(&g, exec);
    let left = bn_rank_bounds(&e1, r, d, budget, exec)?;
    let mid = bn_rank_bounds(&e, r, d + 1, budget, exec)?;
    let right = bn_rank_bounds(&e1, r - 1, d, budget, exec)?;

    let mut rep = VerifyReport::new("rank-sandwich");
    rep.fact(&format!("w^{r}_{d}(G1)"), fmt_bounds(&left));
    rep.fact(&format!("w^{r}_{}(G)", d + 1), fmt_bounds(&mid));
    rep.fact(&format!("w^{}_{d}(G1)", r - 1), fmt_bounds(&right));
    rep.check(
        "left <= middle",
        left.lower <= mid.upper,
        format!("{} <= {}", left.lower, mid.upper),
    );
    rep.check(
        "middle <= right",
        mid.lower <= right.upper,
        format!("{} <= {}", mid.lower, right.upper),
    );
    rep.verdict = if rep.passed {
        "intervals consistent with the sandwich".into()
    } else {
        "inconsistent intervals".into()
    };
    Ok(rep)
}

/// Circumferences of the loops glued by the chain verifier, in tenths.
const CHAIN_TENTHS: [i64; 6] = [11, 13, 17, 19, 23, 29];

pub fn verify_tree_chain(
    base: &Arc<CactusGraph>,
    steps: usize,
    exec: Exec,
) -> Result<VerifyReport> {
    let layout = StarLayout::detect(base)?;
    if steps + 1 > 3 {
        return Err(Error::Budget(format!(
            "step {steps} needs a probe over {}-subsets, limit is 3",
            steps + 1
        )));
    }
    let c = base.circumference(layout.center);
    let theta = c * &Rational::new(1, 8);
    let mut g = Arc::clone(base);
    let mut d = star_theta_divisor(&g, &layout, &theta);
    let mut last = *layout.leaves.last().expect("star has leaves");
    let mut rep = VerifyReport::new("tree-chain");
    let mut dims = Vec::new();
    for i in 0..=steps {
        if i > 0 {
            let at = interior_point(&g, last, false)?;
            let glued = g.wedge_with_loop(
                &at,
                Rational::new(CHAIN_TENTHS[(i - 1) % CHAIN_TENTHS.len()], 10),
            )?;
            g = Arc::new(glued);
            last = LoopId(g.genus() - 1);
            d = d.lift_to(&g)?;
            let p = interior_point(&g, last, false)?;
            d.add_chip(&p, 1);
        }
        let e = engine(&g, exec);
        let genus = g.genus() as i64;
        let deg = 3 + i as i64;
        rep.check(
            format!("step {i}: rank >= 1"),
            e.has_rank_at_least(&d, 1)?,
            format!("genus {genus}, degree {deg}"),
        );
        let probe = local_dim_probe(
            &e,
            &d,
            1,
            &ProbeConfig {
                subset_limit: i + 1,
                exec,
            },
        )?;
        let r0 = rho(genus, 1, deg);
        let dim = probe.estimated_local_dim as i64;
        rep.check(
            format!("step {i}: dim > rho"),
            dim > r0 && r0 == i as i64,
            format!("dim >= {dim}, rho({genus},1,{deg}) = {r0}"),
        );
        dims.push(format!("{dim}/{r0}"));
    }
    rep.fact("dims_vs_rho", dims.join(","));
    rep.verdict = if rep.passed {
        format!("{NOT_GENERAL} at every step")
    } else {
        "chain not reproduced".into()
    };
    Ok(rep)
}

const DENOMINATORS: [u64; 6] = [2, 3, 4, 6, 12, 24];

pub fn verify_rr_random(
    seed: u64,
    count: usize,
    max_genus: usize,
    exec: Exec,
) -> Result<VerifyReport> {
    let mut rng = seeded(seed);
    let cases: Vec<(Arc<CactusGraph>, Divisor)> = (0..count)
        .map(|_| {
            let genus = rng.gen_range(1..=max_genus.max(1));
            let den = DENOMINATORS[rng.gen_range(0..DENOMINATORS.len())];
            let g = Arc::new(random_cactus(&mut rng, genus, den));
            let d = random_divisor_bounded(&mut rng, &g, den, 2 * genus as i64);
            (g, d)
        })
        .collect();
    let results = exec.try_map(&cases, |(g, d)| {
        let e = RankEngine::with_config(
            g,
            RankConfig {
                exec: Exec::Sequential,
                ..RankConfig::default()
            },
        );
        riemann_roch_residual(&e, d)
    })?;
    let bad: Vec<String> = results
        .iter()
        .enumerate()
        .filter(|(_, r)| r.residual != 0 || !r.verified)
        .map(|(i, r)| format!("case {i}: residual {}", r.residual))
        .collect();
    let mut rep = VerifyReport::new("rr-random");
    rep.fact("seed", seed);
    rep.fact("cases", count);
    rep.check(
        "residual = 0",
        bad.is_empty(),
        if bad.is_empty() {
            format!("{count} of {count}")
        } else {
            bad.join("; ")
        },
    );
    rep.verdict = if rep.passed {
        "Riemann-Roch holds".into()
    } else {
        "Riemann-Roch violated".into()
    };
    Ok(rep)
}

/// Disagreements found on one oracle instance.
fn oracle_case(d: &Divisor, v: &PointRef) -> Result<Vec<String>> {
    let mut bad = Vec::new();
    let a = q_reduce(d, v);
    if reduce_by_burning(d, v)? != a {
        bad.push("burning differs".to_string());
    }
    if subdivision_reduce(d, v, None)? != a {
        bad.push("subdivision differs".to_string());
    }
    if !a.is_effective_away_from(v) {
        bad.push("negative away from base".to_string());
    } else if !dhar_burn(&a, v)?.fully_burnt {
        bad.push("not fully burnt".to_string());
    }
    if q_reduce(&a, v) != a {
        bad.push("not idempotent".to_string());
    }
    Ok(bad)
}

pub fn verify_oracle_random(
    seed: u64,
    count: usize,
    max_genus: usize,
    exec: Exec,
) -> Result<VerifyReport> {
    let mut rng = seeded(seed);
    let cases: Vec<(Divisor, PointRef)> = (0..count)
        .map(|_| {
            let genus = rng.gen_range(1..=max_genus.max(1));
            let den = DENOMINATORS[rng.gen_range(0..DENOMINATORS.len())];
            let g = Arc::new(random_cactus(&mut rng, genus, den));
            let d = random_divisor_bounded(&mut rng, &g, den, 6);
            let v = random_grid_point(&mut rng, &g, den);
            (d, v)
        })
        .collect();
    let results = exec.try_map(&cases, |(d, v)| oracle_case(d, v))?;
    let bad: Vec<String> = results
        .iter()
        .enumerate()
        .filter(|(_, b)| !b.is_empty())
        .map(|(i, b)| format!("case {i}: {}", b.join(", ")))
        .collect();
    let mut rep = VerifyReport::new("oracle-check");
    rep.fact("seed", seed);
    rep.fact("cases", count);
    rep.check(
        "three reducers agree and outputs are reduced",
        bad.is_empty(),
        if bad.is_empty() {
            format!("{count} of {count}")
        } else {
            bad.join("; ")
        },
    );
    rep.verdict = if rep.passed {
        "reduction oracles agree".into()
    } else {
        "reduction oracles disagree".into()
    };
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn star() -> Arc<CactusGraph> {
        Arc::new(
            CactusGraph::parse("loop O 1\nloop R 7/5\nloop W 5/4\nloop S 9/7\nattach R O 0\nattach W O 1/2\nattach S O 3/4\n")
                .unwrap(),
        )
    }

    #[test]
    fn star_layout() {
        let g = star();
        let s = StarLayout::detect(&g).unwrap();
        assert_eq!(g.name(s.center), "O");
        assert_eq!(g.fmt_point(&s.a), "O:0");
        assert_eq!(g.fmt_point(&s.b), "O:1/2");
    }

    #[test]
    fn path_is_not_a_star() {
        let g = Arc::new(CactusGraph::parse("loop A 1\nloop B 1\nloop C 1\nloop D 1\nattach B A 1/2\nattach C B 1/2\nattach D C 1/2\n").unwrap());
        assert!(matches!(
            StarLayout::detect(&g),
            Err(Error::Precondition(_))
        ));
        assert!(matches!(
            verify_prop_weak(&g, Exec::Sequential),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn small_batches() {
        assert!(verify_rr_random(5, 10, 3, Exec::Sequential).unwrap().passed);
        assert!(
            verify_oracle_random(5, 10, 3, Exec::Sequential)
                .unwrap()
                .passed
        );
    }
}
