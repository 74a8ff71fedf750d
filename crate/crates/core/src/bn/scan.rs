//! Stratified scans of `W^r_d`.
//!
//! A stratum fixes multiplicities on the anchor points (wedge points and the
//! base point) and a set of loops that each carry one free chip. The free
//! chips range over a grid of `N` offsets per loop. A family like `A + B + θ`
//! is full-dimensional in its stratum, so a run of consecutive marked grid
//! points along a free coordinate is evidence of a positive-dimensional
//! piece of `W^r_d`.

use std::sync::Arc;

use serde::Serialize;

use super::{multiset_count, multisets, subsets};
use crate::divisor::Divisor;
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::graph::{CactusGraph, LoopId, PointRef};
use crate::rank::RankEngine;
use crate::rational::Rational;

/// Run length that counts as a positive-dimensional family.
pub const PERSISTENCE_THRESHOLD: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScanConfig {
    pub r: i64,
    pub d: i64,
    /// Grid points per free loop.
    pub n: usize,
    pub max_free: usize,
    /// Maximum number of grid points over all strata.
    pub budget: usize,
    pub exec: Exec,
}

impl ScanConfig {
    pub fn new(r: i64, d: i64, n: usize) -> Self {
        ScanConfig {
            r,
            d,
            n,
            max_free: 1,
            budget: 250_000,
            exec: Exec::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GridPoint {
    /// Grid index on each free loop.
    pub coords: Vec<usize>,
    pub marked: bool,
}

/// Maximal run of marked points along one free coordinate, the others fixed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PersistenceRun {
    pub axis: usize,
    pub fixed: Vec<usize>,
    pub start: usize,
    pub len: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Stratum {
    pub id: usize,
    pub pattern: String,
    #[serde(skip)]
    pub anchors: Vec<(PointRef, i64)>,
    #[serde(skip)]
    pub free_loops: Vec<LoopId>,
    pub coord_names: Vec<String>,
    pub points: Vec<GridPoint>,
    pub runs: Vec<PersistenceRun>,
}

impl Stratum {
    /// Offset of grid index `j` on free loop `axis`.
    pub fn offset(&self, g: &CactusGraph, axis: usize, j: usize, n: usize) -> Rational {
        g.circumference(self.free_loops[axis]) * &Rational::new(j as i64, n as i64)
    }

    pub fn divisor(&self, g: &Arc<CactusGraph>, coords: &[usize], n: usize) -> Divisor {
        let mut chips: Vec<(PointRef, i64)> = self.anchors.clone();
        for (axis, &j) in coords.iter().enumerate() {
            chips.push((
                PointRef::new(self.free_loops[axis], self.offset(g, axis, j, n)),
                1,
            ));
        }
        Divisor::from_chips(g, chips)
    }

    pub fn max_run(&self) -> usize {
        self.runs.iter().map(|r| r.len).max().unwrap_or(0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ScanReport {
    pub r: i64,
    pub d: i64,
    pub n: usize,
    pub strata: Vec<Stratum>,
    pub found_positive_dimensional: bool,
}

/// Anchor points of a scan: wedge points and the base point.
pub fn scan_anchors(g: &CactusGraph) -> Vec<PointRef> {
    let mut a = g.wedge_points();
    a.push(g.base_point().clone());
    a.sort();
    a.dedup();
    a
}

struct Plan {
    anchors: Vec<(PointRef, i64)>,
    free: Vec<LoopId>,
}

pub fn stratified_scan(engine: &RankEngine, cfg: &ScanConfig) -> Result<ScanReport> {
    let g = engine.graph();
    if cfg.d < 0 || cfg.r < 0 {
        return Err(Error::InvalidArgument(
            "r and d must be non-negative".into(),
        ));
    }
    if cfg.max_free > 3 {
        return Err(Error::InvalidArgument(
            "at most 3 free chips per stratum".into(),
        ));
    }
    if cfg.n == 0 {
        return Err(Error::InvalidArgument(
            "grid resolution must be positive".into(),
        ));
    }
    let anchors = scan_anchors(g);
    let loops: Vec<LoopId> = g.loop_ids().collect();
    let max_free = cfg.max_free.min(cfg.d as usize).min(loops.len());

    let mut total: usize = 0;
    for f in 0..=max_free {
        let per = multiset_count(anchors.len(), cfg.d as usize - f)
            .saturating_mul(subsets(loops.len(), f).len())
            .saturating_mul(cfg.n.saturating_pow(f as u32));
        total = total.saturating_add(per);
    }
    if total > cfg.budget {
        return Err(Error::Budget(format!(
            "scan needs {total} grid points, budget is {}",
            cfg.budget
        )));
    }

    let mut plans = Vec::new();
    for f in 0..=max_free {
        for free in subsets(loops.len(), f) {
            for ms in multisets(anchors.len(), cfg.d as usize - f) {
                let mut mult = vec![0i64; anchors.len()];
                for i in ms {
                    mult[i] += 1;
                }
                plans.push(Plan {
                    anchors: anchors
                        .iter()
                        .zip(mult)
                        .filter(|(_, m)| *m > 0)
                        .map(|(p, m)| (p.clone(), m))
                        .collect(),
                    free: free.iter().map(|&i| loops[i]).collect(),
                });
            }
        }
    }

    let mut strata: Vec<Stratum> = plans
        .into_iter()
        .enumerate()
        .map(|(id, p)| {
            let mut pattern: Vec<String> = p
                .anchors
                .iter()
                .map(|(pt, m)| format!("{}x{}", g.fmt_point(pt), m))
                .collect();
            if !p.free.is_empty() {
                pattern.push(format!(
                    "free:{}",
                    p.free
                        .iter()
                        .map(|l| g.name(*l))
                        .collect::<Vec<_>>()
                        .join("+")
                ));
            }
            Stratum {
                id,
                pattern: pattern.join(" "),
                coord_names: p.free.iter().map(|l| g.name(*l).to_string()).collect(),
                anchors: p.anchors,
                free_loops: p.free,
                points: Vec::new(),
                runs: Vec::new(),
            }
        })
        .collect();

    // Flatten to independent work items: (stratum, grid coordinates).
    let mut work: Vec<(usize, Vec<usize>)> = Vec::new();
    for s in &strata {
        for coords in grid(s.free_loops.len(), cfg.n) {
            work.push((s.id, coords));
        }
    }
    let marks = cfg.exec.try_map(&work, |(sid, coords)| {
        let d = strata[*sid].divisor(g, coords, cfg.n);
        engine.has_rank_at_least(&d, cfg.r)
    })?;
    for ((sid, coords), marked) in work.into_iter().zip(marks) {
        strata[sid].points.push(GridPoint { coords, marked });
    }
    for s in &mut strata {
        s.runs = persistence_runs(&s.points, s.free_loops.len(), cfg.n);
    }
    let found = strata.iter().any(|s| s.max_run() >= PERSISTENCE_THRESHOLD);
    Ok(ScanReport {
        r: cfg.r,
        d: cfg.d,
        n: cfg.n,
        strata,
        found_positive_dimensional: found,
    })
}

/// All coordinate vectors in `[0, n)^dim`, last coordinate fastest.
fn grid(dim: usize, n: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..dim {
        out = out
            .into_iter()
            .flat_map(|c| {
                (0..n).map(move |j| {
                    let mut c = c.clone();
                    c.push(j);
                    c
                })
            })
            .collect();
    }
    out
}

fn persistence_runs(points: &[GridPoint], dim: usize, n: usize) -> Vec<PersistenceRun> {
    let mut runs = Vec::new();
    if dim == 0 {
        return runs;
    }
    // Points are stored in grid order, so index arithmetic recovers them.
    let index = |c: &[usize]| c.iter().fold(0usize, |acc, &j| acc * n + j);
    for axis in 0..dim {
        for others in grid(dim - 1, n) {
            let at = |j: usize| {
                let mut c = others.clone();
                c.insert(axis, j);
                points[index(&c)].marked
            };
            let mut j = 0;
            while j < n {
                if !at(j) {
                    j += 1;
                    continue;
                }
                let start = j;
                while j < n && at(j) {
                    j += 1;
                }
                runs.push(PersistenceRun {
                    axis,
                    fixed: others.clone(),
                    start,
                    len: j - start,
                });
            }
        }
    }
    runs
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn runs_are_linear() {
        let pts: Vec<GridPoint> = [true, true, false, true, true, true]
            .iter()
            .enumerate()
            .map(|(j, &m)| GridPoint {
                coords: vec![j],
                marked: m,
            })
            .collect();
        let runs = persistence_runs(&pts, 1, 6);
        assert_eq!(
            runs.iter().map(|r| (r.start, r.len)).collect::<Vec<_>>(),
            vec![(0, 2), (3, 3)]
        );
    }

    #[test]
    fn degree_one_everything_marked() {
        let g = Arc::new(CactusGraph::parse("loop L1 1\nloop L2 3/2\nattach L2 L1 1/3\n").unwrap());
        let e = RankEngine::new(&g);
        let mut cfg = ScanConfig::new(0, 1, 8);
        cfg.max_free = 1;
        let rep = stratified_scan(&e, &cfg).unwrap();
        assert!(rep.strata.iter().all(|s| s.points.iter().all(|p| p.marked)));
        assert!(rep.found_positive_dimensional);
    }

    #[test]
    fn budget_is_enforced() {
        let g = Arc::new(CactusGraph::parse("loop L1 1\n").unwrap());
        let e = RankEngine::new(&g);
        let mut cfg = ScanConfig::new(1, 3, 64);
        cfg.max_free = 3;
        cfg.budget = 10;
        assert!(matches!(stratified_scan(&e, &cfg), Err(Error::Budget(_))));
    }
}
