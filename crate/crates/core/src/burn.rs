//! Dhar's burning algorithm and the firing-based reducer.
//!
//! A divisor and a base point are turned into a finite model: the vertices
//! are the base point, the wedge points and the chip positions, and each loop
//! is cut into arcs between consecutive vertices. Fire started at the base
//! point runs through arcs freely (arc interiors carry no chips) and enters a
//! vertex once the number of burnt arcs arriving there exceeds its chips.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use serde::Serialize;

use crate::divisor::{divisor_of_function, Divisor, PLFunction};
use crate::error::{Error, Result};
use crate::graph::{CactusGraph, LoopId, PointRef};
use crate::rational::Rational;

#[derive(Debug, Clone)]
struct Edge {
    loop_id: LoopId,
    start: Rational,
    len: Rational,
    a: usize,
    b: usize,
}

/// Vertices and arcs of a finite model of the graph.
#[derive(Debug, Clone)]
struct Model {
    verts: Vec<PointRef>,
    index: HashMap<PointRef, usize>,
    edges: Vec<Edge>,
    /// Per vertex: `(edge, other endpoint)` for every edge end at the vertex.
    incid: Vec<Vec<(usize, usize)>>,
}

impl Model {
    fn build(g: &CactusGraph, points: impl IntoIterator<Item = PointRef>) -> Model {
        let mut verts: BTreeSet<PointRef> = g.wedge_points().into_iter().collect();
        for p in points {
            verts.insert(g.canonical_point(p.loop_id, &p.offset));
        }
        let verts: Vec<PointRef> = verts.into_iter().collect();
        let index: HashMap<PointRef, usize> = verts
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, p)| (p, i))
            .collect();
        let mut on_loop: Vec<Vec<Rational>> = vec![Vec::new(); g.genus()];
        for p in &verts {
            on_loop[p.loop_id.0].push(p.offset.clone());
        }
        for l in g.loop_ids() {
            if g.origin(l).is_some() {
                on_loop[l.0].push(Rational::zero());
            }
            on_loop[l.0].sort();
            on_loop[l.0].dedup();
        }
        let mut edges = Vec::new();
        let mut incid = vec![Vec::new(); verts.len()];
        for l in g.loop_ids() {
            let offs = &on_loop[l.0];
            let c = g.circumference(l);
            for (k, o) in offs.iter().enumerate() {
                let next = if k + 1 < offs.len() {
                    offs[k + 1].clone()
                } else {
                    &offs[0] + c
                };
                let a = index[&g.canonical_point(l, o)];
                let b = index[&g.canonical_point(l, &next)];
                let e = edges.len();
                edges.push(Edge {
                    loop_id: l,
                    start: o.clone(),
                    len: &next - o,
                    a,
                    b,
                });
                incid[a].push((e, b));
                incid[b].push((e, a));
            }
        }
        Model {
            verts,
            index,
            edges,
            incid,
        }
    }

    /// Point at distance `s` from vertex `from` along edge `e`.
    fn point_along(&self, g: &CactusGraph, e: usize, from: usize, s: &Rational) -> PointRef {
        let edge = &self.edges[e];
        let off = if from == edge.a {
            &edge.start + s
        } else {
            &(&edge.start + &edge.len) - s
        };
        g.canonical_point(edge.loop_id, &off)
    }
}

/// An unburnt piece: a closed arc on one loop (`end` may exceed the
/// circumference when the arc wraps past offset 0) or an isolated point.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum UnburntPiece {
    Arc {
        loop_id: LoopId,
        start: Rational,
        end: Rational,
    },
    Point {
        point: String,
    },
}

/// State of one model vertex when the fire stopped.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BurnVertex {
    pub point: PointRef,
    pub chips: i64,
    pub arriving: usize,
    pub burnt: bool,
}

#[derive(Debug, Clone)]
pub struct BurnReport {
    pub fully_burnt: bool,
    pub unburnt_set: Vec<UnburntPiece>,
    /// Unburnt points reached by fire: `(chips, burnt directions arriving)`.
    pub blocking_points: BTreeMap<PointRef, (i64, usize)>,
    pub vertices: Vec<BurnVertex>,
}

struct BurnState {
    model: Model,
    burnt_vertex: Vec<bool>,
    burnt_edge: Vec<bool>,
    arriving: Vec<usize>,
    chips: Vec<i64>,
}

fn run_fire(g: &CactusGraph, d: &Divisor, v: &PointRef, extra: &[PointRef]) -> Result<BurnState> {
    for (p, &m) in d.chips() {
        if m < 0 && p != v {
            return Err(Error::NegativeAwayFromBase {
                point: g.fmt_point(p),
                chips: m,
            });
        }
    }
    let model = Model::build(
        g,
        d.chips()
            .keys()
            .cloned()
            .chain(std::iter::once(v.clone()))
            .chain(extra.iter().cloned()),
    );
    let n = model.verts.len();
    let chips: Vec<i64> = model.verts.iter().map(|p| d.get(p)).collect();
    let mut burnt_vertex = vec![false; n];
    let mut burnt_edge = vec![false; model.edges.len()];
    let mut arriving = vec![0usize; n];
    let start = model.index[v];
    burnt_vertex[start] = true;
    let mut queue = VecDeque::from([start]);
    while let Some(u) = queue.pop_front() {
        for &(e, _) in &model.incid[u] {
            if burnt_edge[e] {
                continue;
            }
            burnt_edge[e] = true;
            // Both ends of the arc now carry fire into their vertices.
            for x in [model.edges[e].a, model.edges[e].b] {
                if burnt_vertex[x] {
                    continue;
                }
                arriving[x] += 1;
                if arriving[x] as i64 > chips[x] {
                    burnt_vertex[x] = true;
                    queue.push_back(x);
                }
            }
        }
    }
    Ok(BurnState {
        model,
        burnt_vertex,
        burnt_edge,
        arriving,
        chips,
    })
}

fn report(g: &CactusGraph, st: &BurnState) -> BurnReport {
    let m = &st.model;
    let fully_burnt = st.burnt_vertex.iter().all(|&b| b);
    let mut unburnt_set = Vec::new();
    let mut covered = vec![false; m.verts.len()];
    for l in g.loop_ids() {
        let idx: Vec<usize> = (0..m.edges.len())
            .filter(|&e| m.edges[e].loop_id == l)
            .collect();
        let k = idx.len();
        if idx.iter().all(|&e| !st.burnt_edge[e]) {
            if k > 0 {
                let s = m.edges[idx[0]].start.clone();
                let end = &s + g.circumference(l);
                unburnt_set.push(UnburntPiece::Arc {
                    loop_id: l,
                    start: s,
                    end,
                });
                for &e in &idx {
                    covered[m.edges[e].a] = true;
                    covered[m.edges[e].b] = true;
                }
            }
            continue;
        }
        // Start right after a burnt edge so wrapping runs are not split.
        let first = (0..k)
            .find(|&j| st.burnt_edge[idx[j]])
            .expect("some edge burnt");
        let mut run: Option<(Rational, Rational)> = None;
        for step in 1..=k {
            let e = idx[(first + step) % k];
            let edge = &m.edges[e];
            if st.burnt_edge[e] {
                if let Some((s, t)) = run.take() {
                    unburnt_set.push(UnburntPiece::Arc {
                        loop_id: l,
                        start: s,
                        end: t,
                    });
                }
                continue;
            }
            covered[edge.a] = true;
            covered[edge.b] = true;
            run = Some(match run.take() {
                None => (edge.start.clone(), &edge.start + &edge.len),
                Some((s, t)) => (s, &t + &edge.len),
            });
        }
        if let Some((s, t)) = run {
            unburnt_set.push(UnburntPiece::Arc {
                loop_id: l,
                start: s,
                end: t,
            });
        }
    }
    for (i, p) in m.verts.iter().enumerate() {
        if !st.burnt_vertex[i] && !covered[i] {
            unburnt_set.push(UnburntPiece::Point {
                point: g.fmt_point(p),
            });
        }
    }
    let blocking_points = (0..m.verts.len())
        .filter(|&i| !st.burnt_vertex[i] && st.arriving[i] > 0)
        .map(|i| (m.verts[i].clone(), (st.chips[i], st.arriving[i])))
        .collect();
    let vertices = (0..m.verts.len())
        .map(|i| BurnVertex {
            point: m.verts[i].clone(),
            chips: st.chips[i],
            arriving: st.arriving[i],
            burnt: st.burnt_vertex[i],
        })
        .collect();
    BurnReport {
        fully_burnt,
        unburnt_set,
        blocking_points,
        vertices,
    }
}

/// Runs the fire from `v`. The divisor must be effective away from `v`.
pub fn dhar_burn(d: &Divisor, v: &PointRef) -> Result<BurnReport> {
    let g = d.graph();
    let v = g.canonical_point(v.loop_id, &v.offset);
    let st = run_fire(g, d, &v, &[])?;
    Ok(report(g, &st))
}

/// Default cap on firing rounds for a divisor with `chips` total absolute
/// multiplicity on a graph of genus `genus`.
pub fn default_iteration_cap(chips: usize, genus: usize) -> usize {
    10 * (chips + genus).pow(2)
}

/// Result of [`reduce_by_burning`] with its firing count.
#[derive(Debug, Clone)]
pub struct BurnReduction {
    pub divisor: Divisor,
    pub firings: usize,
}

/// v-reduced divisor computed by firing alone.
pub fn reduce_by_burning(d: &Divisor, v: &PointRef) -> Result<Divisor> {
    reduce_by_burning_with_cap(d, v, None).map(|r| r.divisor)
}

/// Two phases. First, chips are pulled outward from `v` level by level
/// (a principal divisor built from the distance to `v`) until nothing away
/// from `v` is negative. Then the unburnt set of the fire is fired by the
/// largest step that keeps every moving chip inside its arc, until the
/// fire consumes everything.
pub fn reduce_by_burning_with_cap(
    d: &Divisor,
    v: &PointRef,
    cap: Option<usize>,
) -> Result<BurnReduction> {
    let g = d.graph();
    let v = g.canonical_point(v.loop_id, &v.offset);
    let mut cur = if d.is_effective_away_from(&v) {
        d.clone()
    } else {
        make_effective_away_from(d, &v)?
    };
    let total: i64 = cur.chips().values().map(|m| m.abs()).sum();
    let cap = cap.unwrap_or_else(|| default_iteration_cap(total as usize, g.genus()));
    let mut firings = 0;
    loop {
        let st = run_fire(g, &cur, &v, &[])?;
        if st.burnt_vertex.iter().all(|&b| b) {
            return Ok(BurnReduction {
                divisor: cur,
                firings,
            });
        }
        if firings >= cap {
            return Err(Error::IterationCap { cap });
        }
        firings += 1;
        cur = fire_unburnt(g, &cur, &st);
    }
}

fn fire_unburnt(g: &CactusGraph, d: &Divisor, st: &BurnState) -> Divisor {
    let m = &st.model;
    let mut step: Option<Rational> = None;
    for (u, ends) in m.incid.iter().enumerate() {
        if st.burnt_vertex[u] {
            continue;
        }
        for &(e, _) in ends {
            if st.burnt_edge[e] && step.as_ref().is_none_or(|s| &m.edges[e].len < s) {
                step = Some(m.edges[e].len.clone());
            }
        }
    }
    let step = step.expect("an unburnt set next to burnt arcs");
    let mut out = d.clone();
    for (u, ends) in m.incid.iter().enumerate() {
        if st.burnt_vertex[u] {
            continue;
        }
        for &(e, _) in ends {
            if st.burnt_edge[e] {
                out.add_chip(&m.verts[u], -1);
                out.add_chip(&m.point_along(g, e, u, &step), 1);
            }
        }
    }
    out
}

/// Adds the divisor of `−φ(dist(v, ·))` for a non-decreasing integer-slope
/// `φ` chosen level by level from the top down, which makes every point
/// away from `v` non-negative.
fn make_effective_away_from(d: &Divisor, v: &PointRef) -> Result<Divisor> {
    let g = d.graph();
    let base = Model::build(
        g,
        d.chips().keys().cloned().chain(std::iter::once(v.clone())),
    );
    let dist_of = |p: &PointRef| g.distance(v, p);
    let bdist: Vec<Rational> = base.verts.iter().map(dist_of).collect();
    // Split every arc whose distance profile has an interior maximum.
    let mut cuts = Vec::new();
    for e in &base.edges {
        let (da, db) = (&bdist[e.a], &bdist[e.b]);
        if (da - db).abs() < e.len {
            let t = (&(db + &e.len) - da) / &Rational::from_int(2);
            cuts.push(g.canonical_point(e.loop_id, &(&e.start + &t)));
        }
    }
    let model = Model::build(
        g,
        d.chips()
            .keys()
            .cloned()
            .chain(std::iter::once(v.clone()))
            .chain(cuts),
    );
    let dist: Vec<Rational> = model.verts.iter().map(dist_of).collect();
    let mut levels: Vec<Rational> = dist.clone();
    levels.sort();
    levels.dedup();
    let level_of = |t: &Rational| levels.binary_search(t).expect("known level");
    let top = levels.len() - 1;
    let mut at_level: Vec<Vec<usize>> = vec![Vec::new(); levels.len()];
    for (i, t) in dist.iter().enumerate() {
        at_level[level_of(t)].push(i);
    }
    let (mut inn, mut out) = (vec![0i64; model.verts.len()], vec![0i64; model.verts.len()]);
    for (i, ends) in model.incid.iter().enumerate() {
        for &(_, w) in ends {
            match dist[w].cmp(&dist[i]) {
                std::cmp::Ordering::Less => inn[i] += 1,
                std::cmp::Ordering::Greater => out[i] += 1,
                std::cmp::Ordering::Equal => unreachable!("arcs are monotone after cutting"),
            }
        }
    }
    // a[k] is the slope of φ on [t_k, t_{k+1}]; a[top] = 0 above the top level.
    let mut a = vec![0i64; levels.len()];
    for k in (0..top).rev() {
        let mut need = a[k + 1].max(0);
        for &x in &at_level[k + 1] {
            let deficit = a[k + 1] * out[x] - d.get(&model.verts[x]);
            need =
                need.max(deficit.div_euclid(inn[x]) + i64::from(deficit.rem_euclid(inn[x]) != 0));
        }
        a[k] = need;
    }
    let mut phi = vec![Rational::zero(); levels.len()];
    for k in 1..levels.len() {
        phi[k] = &phi[k - 1] + &(&levels[k] - &levels[k - 1]).mul_int(a[k - 1]);
    }
    // Breakpoints of −φ∘dist: model vertices and level crossings inside arcs.
    let mut pieces: Vec<BTreeMap<Rational, Rational>> = vec![BTreeMap::new(); g.genus()];
    for e in &model.edges {
        let c = g.circumference(e.loop_id);
        let (da, db) = (&dist[e.a], &dist[e.b]);
        let rising = da < db;
        let (lo, hi) = if rising {
            (level_of(da), level_of(db))
        } else {
            (level_of(db), level_of(da))
        };
        pieces[e.loop_id.0].insert(e.start.rem_euclid(c), -&phi[level_of(da)]);
        for k in lo..=hi {
            let off = if rising {
                &levels[k] - da
            } else {
                da - &levels[k]
            };
            pieces[e.loop_id.0].insert((&e.start + &off).rem_euclid(c), -&phi[k]);
        }
    }
    let f = PLFunction::new(
        g,
        pieces
            .into_iter()
            .map(|m| m.into_iter().collect())
            .collect(),
    )?;
    let out = d.plus(&divisor_of_function(&f))?;
    debug_assert!(out.is_effective_away_from(v));
    Ok(out)
}
