//! Closed-form computation of v-reduced divisors.
//!
//! On a single loop the reduced divisor is determined by the degree and the
//! torus coordinate alone. On a tree of loops the loops are reduced one at a
//! time, starting from those farthest from `v`, each toward the point where
//! it exits in the direction of `v`. The surplus parked on that exit point is
//! then picked up by the next loop along the path.

use std::collections::BTreeMap;

use crate::divisor::Divisor;
use crate::graph::{CactusGraph, LoopId, PointRef};
use crate::rational::Rational;

/// Reduces the chips `(offset, multiplicity)` on a circle of circumference
/// `c` toward the offset `v`. The result is sorted by offset.
pub fn circle_reduce(
    c: &Rational,
    chips: &[(Rational, i64)],
    v: &Rational,
) -> Vec<(Rational, i64)> {
    assert!(c.is_positive(), "circumference must be positive");
    let v = v.rem_euclid(c);
    let d: i64 = chips.iter().map(|(_, m)| m).sum();
    let mut mu = Rational::zero();
    for (x, m) in chips {
        mu += &x.mul_int(*m);
    }
    let mu = mu.rem_euclid(c);
    if mu == v.mul_int(d).rem_euclid(c) {
        return if d == 0 { Vec::new() } else { vec![(v, d)] };
    }
    let p = (&mu - &v.mul_int(d - 1)).rem_euclid(c);
    let mut out = Vec::with_capacity(2);
    if d - 1 != 0 {
        out.push((v, d - 1));
    }
    out.push((p, 1));
    out.sort();
    out
}

/// Order in which loops are processed when reducing toward a point of loop
/// `target`: decreasing tree distance, with `target` last.
pub(crate) fn leaf_to_root_order(g: &CactusGraph, target: LoopId) -> Vec<LoopId> {
    let dist = g.distances_from(target);
    let mut order: Vec<LoopId> = g.loop_ids().collect();
    order.sort_by_key(|l| (std::cmp::Reverse(dist[l.0]), l.0));
    order
}

/// The unique v-reduced divisor linearly equivalent to `d`.
pub fn q_reduce(d: &Divisor, v: &PointRef) -> Divisor {
    let g = d.graph();
    let v = g.canonical_point(v.loop_id, &v.offset);
    let mut buckets: Vec<BTreeMap<Rational, i64>> = vec![BTreeMap::new(); g.genus()];
    for (p, &m) in d.chips() {
        *buckets[p.loop_id.0].entry(p.offset.clone()).or_insert(0) += m;
    }
    for l in leaf_to_root_order(g, v.loop_id) {
        let exit = g.retract_point(&v, l);
        let mut gathered: Vec<(Rational, i64)> = Vec::new();
        let bucket = std::mem::take(&mut buckets[l.0]);
        for (off, m) in bucket {
            if off == exit {
                buckets[l.0].insert(off, m);
            } else if m != 0 {
                gathered.push((off, m));
            }
        }
        // The origin lies on this loop too, but is stored on an ancestor.
        if !exit.is_zero() {
            if let Some(o) = g.origin(l) {
                if let Some(m) = buckets[o.loop_id.0].remove(&o.offset) {
                    gathered.push((Rational::zero(), m));
                }
            }
        }
        if gathered.is_empty() {
            continue;
        }
        for (off, m) in circle_reduce(g.circumference(l), &gathered, &exit) {
            let p = g.canonical_point(l, &off);
            *buckets[p.loop_id.0].entry(p.offset).or_insert(0) += m;
        }
    }
    let chips = buckets
        .into_iter()
        .enumerate()
        .flat_map(|(i, b)| {
            b.into_iter()
                .filter(|(_, m)| *m != 0)
                .map(move |(off, m)| (PointRef::new(LoopId(i), off), m))
        })
        .collect();
    Divisor::from_canonical_map(g, chips)
}

/// Structural test of reducedness: effective away from `v`, and on every
/// loop at most one chip lies off the loop's exit toward `v`.
pub fn is_reduced_shape(d: &Divisor, v: &PointRef) -> bool {
    let g = d.graph();
    let v = g.canonical_point(v.loop_id, &v.offset);
    if !d.is_effective_away_from(&v) {
        return false;
    }
    g.loop_ids().all(|l| {
        let exit = g.retract_point(&v, l);
        let off_exit: i64 = d
            .chips()
            .iter()
            .filter_map(|(p, &m)| g.offset_on(p, l).filter(|o| *o != exit).map(|_| m))
            .sum();
        off_exit <= 1
    })
}
