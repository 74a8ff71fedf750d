//! Divisor rank through a finite adversary game.
//!
//! `check(D, r)` holds when `D − (v)` passes `check(·, r − 1)` for every
//! adversary point `v` in a finite candidate set, with `check(D, 0)` meaning
//! `D` is equivalent to an effective divisor. The game runs on divisor
//! classes (degree plus torus coordinates), so removing a chip is a cheap
//! coordinate update and results can be memoized per class.
//!
//! The candidate set contains the wedge points and at least one other point
//! on every loop. These points are the vertices of a loopless model of the
//! graph, and such a vertex set determines rank (Luo), so the restricted
//! game computes the true rank.

use std::collections::BTreeSet;
use std::sync::Arc;

use dashmap::DashMap;
use serde::Serialize;

use crate::divisor::{canonical_divisor, class_coordinates, Divisor, DivisorClass};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::graph::{CactusGraph, PointRef};
use crate::rational::Rational;
use crate::reduce::q_reduce;

/// Refinement limit when searching for sample offsets clear of special points.
pub const SAMPLE_REFINEMENT_LIMIT: u32 = 40;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RankConfig {
    /// Generic sample points per loop in every candidate set.
    pub samples_per_loop: usize,
    pub exec: Exec,
}

impl Default for RankConfig {
    fn default() -> Self {
        RankConfig {
            samples_per_loop: 3,
            exec: Exec::default(),
        }
    }
}

/// Candidate set offered to the adversary at one step of a refutation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CandidateLog {
    pub depth: usize,
    pub degree: i64,
    pub candidates: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankWitness {
    pub rank: i64,
    /// Set when the search stopped at `max_r` without a refutation.
    pub lower_bound_only: bool,
    /// `rank + 1` points whose removal leaves a non-effective class.
    pub refuting_sequence: Option<Vec<PointRef>>,
    pub candidate_log: Vec<CandidateLog>,
}

/// Why a point was put in a candidate set; generic samples are tried first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Kind {
    Generic,
    Special,
}

/// Rank computations on one graph, sharing a memo across calls.
pub struct RankEngine {
    graph: Arc<CactusGraph>,
    cfg: RankConfig,
    /// Wedge points and the base point.
    fixed: Vec<PointRef>,
    /// `Σ_{j≠i}` of loop `j`'s retraction onto loop `i`.
    cross_sum: Vec<Rational>,
    base_retract: Vec<Rational>,
    slack: DashMap<DivisorClass, i64>,
    memo: DashMap<(DivisorClass, i64), bool>,
}

impl RankEngine {
    pub fn new(graph: &Arc<CactusGraph>) -> Self {
        Self::with_config(graph, RankConfig::default())
    }

    pub fn with_config(graph: &Arc<CactusGraph>, cfg: RankConfig) -> Self {
        let g = graph.as_ref();
        let mut fixed: BTreeSet<PointRef> = g.wedge_points().into_iter().collect();
        fixed.insert(g.base_point().clone());
        let cross_sum = g
            .loop_ids()
            .map(|i| {
                let mut s = Rational::zero();
                for j in g.loop_ids().filter(|&j| j != i) {
                    s += &g.retract_point(&PointRef::new(j, Rational::zero()), i);
                }
                s
            })
            .collect();
        let base_retract = g
            .loop_ids()
            .map(|i| g.retract_point(g.base_point(), i))
            .collect();
        RankEngine {
            graph: Arc::clone(graph),
            cfg,
            fixed: fixed.into_iter().collect(),
            cross_sum,
            base_retract,
            slack: DashMap::new(),
            memo: DashMap::new(),
        }
    }

    pub fn graph(&self) -> &Arc<CactusGraph> {
        &self.graph
    }

    pub fn config(&self) -> RankConfig {
        self.cfg
    }

    /// Number of memoized `(class, r)` verdicts.
    pub fn memo_len(&self) -> usize {
        self.memo.len()
    }

    pub fn class_of(&self, d: &Divisor) -> Result<DivisorClass> {
        if d.graph().as_ref() != self.graph.as_ref() {
            return Err(Error::GraphMismatch);
        }
        Ok(class_coordinates(d))
    }

    fn representative(&self, cls: &DivisorClass) -> Divisor {
        let g = self.graph.as_ref();
        let surplus = cls.degree - g.genus() as i64;
        let mut chips: Vec<(PointRef, i64)> = g
            .loop_ids()
            .map(|i| {
                let x = &(&cls.mu[i.0] - &self.cross_sum[i.0])
                    - &self.base_retract[i.0].mul_int(surplus);
                (PointRef::new(i, x), 1)
            })
            .collect();
        chips.push((g.base_point().clone(), surplus));
        Divisor::from_chips(&self.graph, chips)
    }

    /// The base-point-reduced divisor of the class.
    pub fn reduced(&self, cls: &DivisorClass) -> Divisor {
        q_reduce(&self.representative(cls), self.graph.base_point())
    }

    /// Coefficient at the base point of the reduced divisor: the number of
    /// chips that can be removed at the base point with the class staying
    /// effective.
    pub fn slack(&self, cls: &DivisorClass) -> i64 {
        if let Some(s) = self.slack.get(cls) {
            return *s;
        }
        let s = self.reduced(cls).get(self.graph.base_point());
        self.slack.insert(cls.clone(), s);
        s
    }

    pub fn is_effective_class(&self, cls: &DivisorClass) -> bool {
        if cls.degree < 0 {
            return false;
        }
        if cls.degree >= self.graph.genus() as i64 {
            return true;
        }
        self.slack(cls) >= 0
    }

    fn candidates_tagged(&self, cls: &DivisorClass) -> Result<Vec<(PointRef, Kind)>> {
        let g = self.graph.as_ref();
        let mut special: BTreeSet<PointRef> = self.fixed.iter().cloned().collect();
        let rep = self.representative(cls);
        for i in g.loop_ids() {
            let x = &(&cls.mu[i.0] - &self.cross_sum[i.0])
                - &self.base_retract[i.0].mul_int(cls.degree - g.genus() as i64);
            special.insert(g.canonical_point(i, &x));
        }
        special.extend(q_reduce(&rep, g.base_point()).chips().keys().cloned());
        let mut out: Vec<(PointRef, Kind)> = Vec::new();
        for l in g.loop_ids() {
            let mut taken: Vec<Rational> =
                special.iter().filter_map(|p| g.offset_on(p, l)).collect();
            taken.push(Rational::zero());
            for off in generic_offsets(g.circumference(l), self.cfg.samples_per_loop, &taken)
                .ok_or_else(|| Error::SampleCollision {
                    loop_name: g.name(l).to_string(),
                    limit: SAMPLE_REFINEMENT_LIMIT,
                })?
            {
                out.push((PointRef::new(l, off), Kind::Generic));
            }
        }
        out.extend(special.into_iter().map(|p| (p, Kind::Special)));
        Ok(out)
    }

    /// Adversary points offered against the class.
    pub fn candidates(&self, cls: &DivisorClass) -> Result<Vec<PointRef>> {
        Ok(self
            .candidates_tagged(cls)?
            .into_iter()
            .map(|(p, _)| p)
            .collect())
    }

    /// Candidates in the order they are tried: smallest remaining slack first.
    fn ordered(&self, cls: &DivisorClass, r: i64) -> Result<Vec<(PointRef, DivisorClass)>> {
        let g = self.graph.as_ref();
        let tagged = self.candidates_tagged(cls)?;
        let mut kids: Vec<(i64, Kind, PointRef, DivisorClass)> = tagged
            .into_iter()
            .map(|(p, k)| {
                let child = cls.minus_point(g, &p);
                let s = if r > 1 { self.slack(&child) } else { 0 };
                (s, k, p, child)
            })
            .collect();
        kids.sort_by(|a, b| (a.0, a.1, &a.2).cmp(&(b.0, b.1, &b.2)));
        Ok(kids.into_iter().map(|(_, _, p, c)| (p, c)).collect())
    }

    /// Does every effective divisor of degree `r` leave an effective class?
    pub fn check(&self, cls: &DivisorClass, r: i64) -> Result<bool> {
        if r <= 0 {
            return Ok(r < 0 || self.is_effective_class(cls));
        }
        if cls.degree < r {
            return Ok(false);
        }
        if cls.degree - r >= self.graph.genus() as i64 {
            return Ok(true);
        }
        if self.slack(cls) < r {
            return Ok(false);
        }
        let key = (cls.clone(), r);
        if let Some(v) = self.memo.get(&key) {
            return Ok(*v);
        }
        let kids = self.ordered(cls, r)?;
        let exec = if r >= 2 {
            self.cfg.exec
        } else {
            Exec::Sequential
        };
        let verdict = exec.try_all(&kids, |(_, child)| self.check(child, r - 1))?;
        self.memo.insert(key, verdict);
        Ok(verdict)
    }

    pub fn has_rank_at_least(&self, d: &Divisor, r: i64) -> Result<bool> {
        self.check(&self.class_of(d)?, r)
    }

    /// Exact rank, searching up to `max_r` (default: the degree).
    pub fn rank(&self, d: &Divisor, max_r: Option<i64>) -> Result<RankWitness> {
        let cls = self.class_of(d)?;
        self.rank_of_class(&cls, max_r)
    }

    pub fn rank_of_class(&self, cls: &DivisorClass, max_r: Option<i64>) -> Result<RankWitness> {
        let g = self.graph.genus() as i64;
        if !self.is_effective_class(cls) {
            return Ok(RankWitness {
                rank: -1,
                lower_bound_only: false,
                refuting_sequence: Some(Vec::new()),
                candidate_log: Vec::new(),
            });
        }
        let cap = max_r.unwrap_or(cls.degree).min(cls.degree).max(0);
        // Degree minus genus chips can always be removed.
        let mut r = (cls.degree - g).clamp(0, cap);
        while r < cap && self.check(cls, r + 1)? {
            r += 1;
        }
        if r == cap {
            let lower_bound_only = cap < cls.degree;
            let log = vec![CandidateLog {
                depth: 0,
                degree: cls.degree,
                candidates: self.fmt_points(&self.candidates(cls)?),
            }];
            return Ok(RankWitness {
                rank: r,
                lower_bound_only,
                refuting_sequence: None,
                candidate_log: log,
            });
        }
        let (seq, log) = self.refutation(cls, r + 1)?;
        Ok(RankWitness {
            rank: r,
            lower_bound_only: false,
            refuting_sequence: Some(seq),
            candidate_log: log,
        })
    }

    /// Walks the memoized game to a sequence of `r` removals ending in a
    /// non-effective class. `check(cls, r)` must be false.
    fn refutation(&self, cls: &DivisorClass, r: i64) -> Result<(Vec<PointRef>, Vec<CandidateLog>)> {
        let mut seq = Vec::new();
        let mut log = Vec::new();
        let mut cur = cls.clone();
        for k in (1..=r).rev() {
            let kids = self.ordered(&cur, k)?;
            log.push(CandidateLog {
                depth: (r - k) as usize,
                degree: cur.degree,
                candidates: self
                    .fmt_points(&kids.iter().map(|(p, _)| p.clone()).collect::<Vec<_>>()),
            });
            let mut next = None;
            for (p, child) in kids {
                if !self.check(&child, k - 1)? {
                    next = Some((p, child));
                    break;
                }
            }
            let (p, child) =
                next.ok_or_else(|| Error::Precondition("no refuting candidate".into()))?;
            seq.push(p);
            cur = child;
        }
        debug_assert!(!self.is_effective_class(&cur));
        Ok((seq, log))
    }

    fn fmt_points(&self, pts: &[PointRef]) -> Vec<String> {
        pts.iter().map(|p| self.graph.fmt_point(p)).collect()
    }
}

/// `k` offsets `(2j+1)·c/(3·2^m)` for the smallest admissible `m` that
/// avoids every offset in `taken`.
pub fn generic_offsets(c: &Rational, k: usize, taken: &[Rational]) -> Option<Vec<Rational>> {
    if k == 0 {
        return Some(Vec::new());
    }
    let taken: BTreeSet<Rational> = taken.iter().map(|t| t.rem_euclid(c)).collect();
    for m in 1..=SAMPLE_REFINEMENT_LIMIT {
        let den = 3i64 << m;
        if (2 * k as i64 - 1) >= den {
            continue;
        }
        let offs: Vec<Rational> = (0..k as i64)
            .map(|j| c * &Rational::new(2 * j + 1, den))
            .collect();
        if offs.iter().all(|o| !taken.contains(o)) {
            return Some(offs);
        }
    }
    None
}

/// Is `d` linearly equivalent to an effective divisor?
pub fn is_effective_class(d: &Divisor) -> bool {
    let q = d.graph().base_point();
    q_reduce(d, q).get(q) >= 0
}

/// Rank with a fresh engine.
pub fn rank(d: &Divisor, max_r: Option<i64>) -> Result<RankWitness> {
    RankEngine::new(d.graph()).rank(d, max_r)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RiemannRochReport {
    pub degree: i64,
    pub genus: usize,
    pub rank: i64,
    pub rank_dual: i64,
    pub residual: i64,
    /// False when either rank is only a lower bound.
    pub verified: bool,
}

/// `r(D) − r(K − D) − deg D − 1 + g`, which Riemann-Roch says is zero.
pub fn riemann_roch_residual(engine: &RankEngine, d: &Divisor) -> Result<RiemannRochReport> {
    let g = engine.graph();
    let dual = canonical_divisor(g).minus(d)?;
    let a = engine.rank(d, Some(d.degree() + 1))?;
    let b = engine.rank(&dual, Some(dual.degree() + 1))?;
    let genus = g.genus();
    Ok(RiemannRochReport {
        degree: d.degree(),
        genus,
        rank: a.rank,
        rank_dual: b.rank,
        residual: a.rank - b.rank - d.degree() - 1 + genus as i64,
        verified: !a.lower_bound_only && !b.lower_bound_only,
    })
}

/// Checks a refuting sequence independently of the game.
pub fn refutation_holds(d: &Divisor, seq: &[PointRef]) -> bool {
    let mut e = d.clone();
    for p in seq {
        e.add_chip(p, -1);
    }
    !is_effective_class(&e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::LoopId;

    fn q(s: &str) -> Rational {
        s.parse().unwrap()
    }

    fn graph(text: &str) -> Arc<CactusGraph> {
        Arc::new(CactusGraph::parse(text).unwrap())
    }

    #[test]
    fn circle_ranks() {
        let g = graph("loop C 3/2\n");
        let e = RankEngine::new(&g);
        let c = LoopId(0);
        let d = Divisor::from_chips(
            &g,
            [
                (PointRef::new(c, q("1/3")), 2),
                (PointRef::new(c, q("1")), 1),
            ],
        );
        let w = e.rank(&d, None).unwrap();
        assert_eq!(w.rank, 2);
        let seq = w.refuting_sequence.unwrap();
        assert_eq!(seq.len(), 3);
        assert!(refutation_holds(&d, &seq));

        let neg = Divisor::point(&g, &PointRef::new(c, q("1/2")), -1);
        assert_eq!(e.rank(&neg, None).unwrap().rank, -1);

        let pp = Divisor::from_chips(
            &g,
            [
                (PointRef::new(c, q("1/2")), 1),
                (PointRef::new(c, q("1")), -1),
            ],
        );
        assert_eq!(e.rank(&pp, None).unwrap().rank, -1);
        assert!(!is_effective_class(&pp));
        assert_eq!(e.rank(&Divisor::zero(&g), None).unwrap().rank, 0);
    }

    #[test]
    fn chain_class_not_effective() {
        let g = graph("loop L1 1\nloop L2 1\nattach L2 L1 1/2\n");
        let l2 = g.loop_id("L2").unwrap();
        let d = Divisor::from_chips(
            &g,
            [
                (PointRef::new(l2, q("1/4")), 3),
                (g.base_point().clone(), -3),
            ],
        );
        assert!(!is_effective_class(&d));
        let e = RankEngine::new(&g);
        assert!(!e.is_effective_class(&e.class_of(&d).unwrap()));
    }

    #[test]
    fn chain_riemann_roch() {
        let g = graph("loop L1 1\nloop L2 1\nattach L2 L1 1/2\n");
        let l2 = g.loop_id("L2").unwrap();
        let d = Divisor::point(&g, &PointRef::new(l2, q("1/4")), 3);
        let e = RankEngine::new(&g);
        let rr = riemann_roch_residual(&e, &d).unwrap();
        assert_eq!(
            (rr.rank, rr.rank_dual, rr.residual, rr.verified),
            (1, -1, 0, true)
        );
    }

    #[test]
    fn max_r_gives_lower_bound() {
        let g = graph("loop C 1\n");
        let d = Divisor::point(&g, &PointRef::new(LoopId(0), q("0")), 4);
        let w = RankEngine::new(&g).rank(&d, Some(1)).unwrap();
        assert_eq!((w.rank, w.lower_bound_only), (1, true));
        assert!(w.refuting_sequence.is_none());
    }

    #[test]
    fn sample_offsets_avoid_special_points() {
        let c = q("1");
        assert_eq!(
            generic_offsets(&c, 3, &[]).unwrap(),
            vec![q("1/6"), q("1/2"), q("5/6")]
        );
        assert_eq!(
            generic_offsets(&c, 3, &[q("1/2")]).unwrap(),
            vec![q("1/12"), q("1/4"), q("5/12")]
        );
        let all: Vec<Rational> = (1..=SAMPLE_REFINEMENT_LIMIT)
            .map(|m| Rational::new(1, 1i64 << m))
            .collect();
        assert!(generic_offsets(&c, 3, &all).is_none());
    }
}
