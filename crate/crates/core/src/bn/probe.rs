//! Local dimension of `W^r_d` at a known witness.
//!
//! Directions are loops: moving along loop `i` changes the torus coordinate
//! `μ_i` only. A subset `S` of directions is persistent when every test
//! vector supported on `S` keeps the rank at least `r` at both magnitudes.

use serde::Serialize;

use super::subsets;
use crate::divisor::{Divisor, DivisorClass};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::graph::{CactusGraph, LoopId};
use crate::rank::RankEngine;
use crate::rational::Rational;

const WEIGHTS: [(i64, i64); 7] = [
    (1, 1),
    (5, 7),
    (3, 11),
    (9, 13),
    (7, 17),
    (13, 19),
    (11, 23),
];
const VECTORS: usize = 4;
const MAGNITUDES: [i64; 2] = [64, 128];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ProbeConfig {
    pub subset_limit: usize,
    pub exec: Exec,
}

impl Default for ProbeConfig {
    fn default() -> Self {
        ProbeConfig {
            subset_limit: 2,
            exec: Exec::default(),
        }
    }
}

/// One row of the probe table: a direction subset at one magnitude.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProbeTrial {
    /// Loop names of the directions.
    pub directions: Vec<String>,
    /// Magnitude denominator: the perturbation has size `c_i / magnitude`.
    pub magnitude: i64,
    pub persisted: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DimProbe {
    pub base_class: DivisorClass,
    pub r: i64,
    /// A largest persistent subset, as loop indices.
    pub persistent_directions: Vec<usize>,
    /// Every persistent subset, as loop indices.
    pub persistent_subsets: Vec<Vec<usize>>,
    pub estimated_local_dim: usize,
    pub trials: Vec<ProbeTrial>,
}

/// Test vector `t` on `subset` at magnitude `c_i / mag`, applied to `base`.
pub fn perturbed_class(
    g: &CactusGraph,
    base: &DivisorClass,
    subset: &[usize],
    t: usize,
    mag: i64,
) -> DivisorClass {
    let mut mu = base.mu.clone();
    for (k, &i) in subset.iter().enumerate() {
        let (p, q) = WEIGHTS[(t + 2 * k) % WEIGHTS.len()];
        let sign = match t {
            0 => 1,
            1 => -1,
            2 => {
                if k % 2 == 0 {
                    1
                } else {
                    -1
                }
            }
            _ => {
                if k % 2 == 0 {
                    -1
                } else {
                    1
                }
            }
        };
        let c = g.circumference(LoopId(i));
        let step = c * &Rational::new(sign * p, q * mag);
        mu[i] = (&mu[i] + &step).rem_euclid(c);
    }
    DivisorClass {
        degree: base.degree,
        mu,
    }
}

pub fn local_dim_probe(
    engine: &RankEngine,
    d: &Divisor,
    r: i64,
    cfg: &ProbeConfig,
) -> Result<DimProbe> {
    let g = engine.graph();
    let base = engine.class_of(d)?;
    if !engine.check(&base, r)? {
        return Err(Error::Precondition(format!(
            "divisor does not have rank at least {r}"
        )));
    }
    let limit = cfg.subset_limit.min(g.genus());
    let sets: Vec<Vec<usize>> = (1..=limit).flat_map(|k| subsets(g.genus(), k)).collect();
    let mut work: Vec<(usize, i64, usize)> = Vec::new();
    for si in 0..sets.len() {
        for &m in &MAGNITUDES {
            for t in 0..VECTORS {
                work.push((si, m, t));
            }
        }
    }
    let kept = cfg.exec.try_map(&work, |&(si, m, t)| {
        engine.check(&perturbed_class(g, &base, &sets[si], t, m), r)
    })?;

    let mut trials = Vec::new();
    let mut persistent_subsets = Vec::new();
    let per_set = MAGNITUDES.len() * VECTORS;
    for (si, set) in sets.iter().enumerate() {
        let chunk = &kept[si * per_set..(si + 1) * per_set];
        let mut all = true;
        for (mi, &m) in MAGNITUDES.iter().enumerate() {
            let ok = chunk[mi * VECTORS..(mi + 1) * VECTORS].iter().all(|&b| b);
            all &= ok;
            trials.push(ProbeTrial {
                directions: set.iter().map(|&i| g.name(LoopId(i)).to_string()).collect(),
                magnitude: m,
                persisted: ok,
            });
        }
        if all {
            persistent_subsets.push(set.clone());
        }
    }
    let persistent_directions = persistent_subsets
        .iter()
        .max_by_key(|s| (s.len(), std::cmp::Reverse((*s).clone())))
        .cloned()
        .unwrap_or_default();
    Ok(DimProbe {
        base_class: base,
        r,
        estimated_local_dim: persistent_directions.len(),
        persistent_directions,
        persistent_subsets,
        trials,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::PointRef;
    use std::sync::Arc;

    #[test]
    fn circle_whole_torus() {
        let g = Arc::new(CactusGraph::parse("loop C 5/3\n").unwrap());
        let e = RankEngine::new(&g);
        let d = Divisor::point(&g, &PointRef::new(LoopId(0), Rational::new(2, 3)), 2);
        let p = local_dim_probe(&e, &d, 1, &ProbeConfig::default()).unwrap();
        assert_eq!(p.estimated_local_dim, 1);
        assert_eq!(p.trials.len(), 2);
    }

    #[test]
    fn rank_precondition() {
        let g = Arc::new(CactusGraph::parse("loop C 1\n").unwrap());
        let e = RankEngine::new(&g);
        let d = Divisor::point(&g, &PointRef::new(LoopId(0), Rational::zero()), 1);
        assert!(matches!(
            local_dim_probe(&e, &d, 1, &ProbeConfig::default()),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn vectors_have_four_sign_patterns() {
        let g = CactusGraph::parse("loop A 1\nloop B 1\nattach B A 1/2\n").unwrap();
        let base = DivisorClass {
            degree: 2,
            mu: vec![Rational::new(1, 2), Rational::new(1, 2)],
        };
        let half = Rational::new(1, 2);
        let signs: Vec<(bool, bool)> = (0..4)
            .map(|t| {
                let c = perturbed_class(&g, &base, &[0, 1], t, 64);
                (c.mu[0] > half, c.mu[1] > half)
            })
            .collect();
        assert_eq!(
            signs,
            vec![(true, true), (false, false), (true, false), (false, true)]
        );
    }
}
