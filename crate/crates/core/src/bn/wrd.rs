//! Brill-Noether rank `w^r_d`: the largest `k` such that every effective `E`
//! of degree `r + k` lies under some degree-`d` divisor of rank at least `r`.
//!
//! Adversaries `E` are multisets over a finite family (wedge points, the
//! base point, generic samples on each loop). For each `E` we look for an
//! effective `F` over a cover family with `rank(E + F) ≥ r`. Every `E` in the
//! family being covered certifies the lower bound against that family only;
//! an uncovered `E` gives the upper bound, which would be wrong if some `F`
//! outside the cover family worked. Reports say which case applies.

use std::collections::BTreeSet;
use std::sync::Arc;

use super::{multiset_count, multisets};
use crate::divisor::Divisor;
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::graph::{CactusGraph, PointRef};
use crate::rank::{generic_offsets, RankEngine};
use crate::rational::Rational;

/// Where the upper bound comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UpperSource {
    /// `k ≤ d − r`, since `E` must fit under a degree-`d` divisor.
    DegreeBound,
    /// An adversary no searched `F` covers.
    UncoveredAdversary,
}

impl UpperSource {
    pub fn as_str(self) -> &'static str {
        match self {
            UpperSource::DegreeBound => "degree-bound",
            UpperSource::UncoveredAdversary => "uncovered-adversary",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BnRankBounds {
    pub r: i64,
    pub d: i64,
    pub lower: i64,
    pub upper: i64,
    pub upper_source: UpperSource,
    /// Uncovered adversary of degree `r + upper + 1`.
    pub counterexample: Option<Divisor>,
    /// Set when the budget ran out before the search finished.
    pub widened: bool,
    /// Rank checks spent.
    pub checks: usize,
}

impl BnRankBounds {
    pub fn is_exact(&self) -> bool {
        self.lower == self.upper
    }
}

/// Wedge points, the base point and `samples` generic points per loop.
pub fn adversary_family(g: &CactusGraph, samples: usize) -> Vec<PointRef> {
    let mut pts: BTreeSet<PointRef> = g.wedge_points().into_iter().collect();
    pts.insert(g.base_point().clone());
    for l in g.loop_ids() {
        let mut taken: Vec<Rational> = pts.iter().filter_map(|p| g.offset_on(p, l)).collect();
        taken.push(Rational::zero());
        if let Some(offs) = generic_offsets(g.circumference(l), samples, &taken) {
            pts.extend(offs.into_iter().map(|o| PointRef::new(l, o)));
        }
    }
    pts.into_iter().collect()
}

/// Adversary family plus the quarter points of every loop.
pub fn cover_family(g: &CactusGraph, samples: usize) -> Vec<PointRef> {
    let mut pts: BTreeSet<PointRef> = adversary_family(g, samples).into_iter().collect();
    for l in g.loop_ids() {
        for j in 0..4 {
            pts.insert(g.canonical_point(l, &(g.circumference(l) * &Rational::new(j, 4))));
        }
    }
    pts.into_iter().collect()
}

fn divisor_of(g: &Arc<CactusGraph>, pts: &[PointRef], idx: &[usize]) -> Divisor {
    Divisor::from_chips(g, idx.iter().map(|&i| (pts[i].clone(), 1)))
}

/// First degree-`d` effective divisor over the cover family with rank at
/// least `r`, trying at most `budget` candidates.
pub fn find_witness(engine: &RankEngine, r: i64, d: i64, budget: usize) -> Result<Option<Divisor>> {
    if d < 0 || r < 0 {
        return Err(Error::InvalidArgument(
            "r and d must be non-negative".into(),
        ));
    }
    if d < r {
        return Ok(None);
    }
    let g = engine.graph();
    let family = cover_family(g, 3);
    if multiset_count(family.len(), d as usize) > budget {
        return Err(Error::Budget(format!(
            "witness search exceeds {budget} candidates"
        )));
    }
    for ms in multisets(family.len(), d as usize) {
        let dv = divisor_of(g, &family, &ms);
        if engine.has_rank_at_least(&dv, r)? {
            return Ok(Some(dv));
        }
    }
    Ok(None)
}

/// Bounds on `w^r_d`, spending at most `budget` rank checks (counted as the
/// worst case of each level before it starts, so results are deterministic).
pub fn bn_rank_bounds(
    engine: &RankEngine,
    r: i64,
    d: i64,
    budget: usize,
    exec: Exec,
) -> Result<BnRankBounds> {
    if r < 0 || d < 0 {
        return Err(Error::InvalidArgument(
            "r and d must be non-negative".into(),
        ));
    }
    let g = engine.graph();
    let adversaries = adversary_family(g, 3);
    let cover = cover_family(g, 3);
    let mut spent = 0usize;
    let top = d - r;
    let mut out = BnRankBounds {
        r,
        d,
        lower: -1,
        upper: top,
        upper_source: UpperSource::DegreeBound,
        counterexample: None,
        widened: false,
        checks: 0,
    };
    if top < 0 {
        // No divisor of degree d has rank r, so W is empty.
        out.upper = -1;
        return Ok(out);
    }
    for k in 0..=top {
        let e_deg = (r + k) as usize;
        let f_deg = (d - r - k) as usize;
        let es = multisets(adversaries.len(), e_deg);
        let worst = es
            .len()
            .saturating_mul(multiset_count(cover.len() + e_deg, f_deg));
        if spent.saturating_add(worst) > budget {
            out.widened = true;
            out.checks = spent;
            return Ok(out);
        }
        let results = exec.try_map(&es, |e_idx| -> Result<(bool, usize)> {
            let e = divisor_of(g, &adversaries, e_idx);
            let mut fam: BTreeSet<PointRef> = cover.iter().cloned().collect();
            fam.extend(e.chips().keys().cloned());
            let fam: Vec<PointRef> = fam.into_iter().collect();
            let mut used = 0;
            for f_idx in multisets(fam.len(), f_deg) {
                used += 1;
                let mut total = e.clone();
                for i in f_idx {
                    total.add_chip(&fam[i], 1);
                }
                if engine.has_rank_at_least(&total, r)? {
                    return Ok((true, used));
                }
            }
            Ok((false, used))
        })?;
        spent += results.iter().map(|(_, u)| u).sum::<usize>();
        if let Some(pos) = results.iter().position(|(ok, _)| !ok) {
            out.lower = k - 1;
            out.upper = k - 1;
            out.upper_source = UpperSource::UncoveredAdversary;
            out.counterexample = Some(divisor_of(g, &adversaries, &es[pos]));
            out.checks = spent;
            return Ok(out);
        }
        out.lower = k;
    }
    out.checks = spent;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn circle() -> RankEngine {
        RankEngine::new(&Arc::new(CactusGraph::parse("loop C 1\n").unwrap()))
    }

    #[test]
    fn circle_bounds() {
        let e = circle();
        let b = bn_rank_bounds(&e, 1, 2, 100_000, Exec::Sequential).unwrap();
        assert_eq!((b.lower, b.upper), (1, 1));
        assert_eq!(b.upper_source, UpperSource::DegreeBound);
        let b = bn_rank_bounds(&e, 1, 1, 100_000, Exec::Sequential).unwrap();
        assert_eq!((b.lower, b.upper), (-1, -1));
        assert_eq!(b.counterexample.unwrap().degree(), 1);
        let b = bn_rank_bounds(&e, 0, 2, 100_000, Exec::Sequential).unwrap();
        assert_eq!((b.lower, b.upper), (2, 2));
    }

    #[test]
    fn tiny_budget_widens() {
        let e = circle();
        let b = bn_rank_bounds(&e, 1, 3, 3, Exec::Sequential).unwrap();
        assert!(b.widened);
        assert!(b.lower <= b.upper);
    }

    #[test]
    fn witness_on_circle() {
        let e = circle();
        assert!(find_witness(&e, 1, 2, 10_000).unwrap().is_some());
        assert!(find_witness(&e, 1, 1, 10_000).unwrap().is_none());
    }
}
