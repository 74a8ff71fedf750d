//! Divisors, piecewise-linear functions and Jacobian coordinates.
//!
//! The Jacobian of a tree of loops is the product of the Jacobians of its
//! loops. A divisor class is therefore described by its degree together with
//! one coordinate per loop: the sum, over all chips, of the chip's
//! multiplicity times its retraction onto that loop, taken modulo the
//! circumference.

use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{CactusGraph, LoopId, PointRef};
use crate::rational::Rational;

#[derive(Clone)]
pub struct Divisor {
    graph: Arc<CactusGraph>,
    chips: BTreeMap<PointRef, i64>,
}

/// Degree plus one torus coordinate per loop.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct DivisorClass {
    pub degree: i64,
    pub mu: Vec<Rational>,
}

fn same_graph(a: &Arc<CactusGraph>, b: &Arc<CactusGraph>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

impl PartialEq for Divisor {
    fn eq(&self, other: &Self) -> bool {
        self.chips == other.chips && same_graph(&self.graph, &other.graph)
    }
}

impl Eq for Divisor {}

impl fmt::Debug for Divisor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut m = f.debug_map();
        for (p, c) in &self.chips {
            m.entry(&self.graph.fmt_point(p), c);
        }
        m.finish()
    }
}

impl Divisor {
    pub fn zero(graph: &Arc<CactusGraph>) -> Self {
        Divisor {
            graph: Arc::clone(graph),
            chips: BTreeMap::new(),
        }
    }

    /// Builds a divisor, canonicalizing every point and accumulating repeats.
    pub fn from_chips(
        graph: &Arc<CactusGraph>,
        chips: impl IntoIterator<Item = (PointRef, i64)>,
    ) -> Self {
        let mut d = Divisor::zero(graph);
        for (p, m) in chips {
            let p = graph.canonical_point(p.loop_id, &p.offset);
            d.add_canonical(p, m);
        }
        d
    }

    /// Single chip of multiplicity `mult` at `p`.
    pub fn point(graph: &Arc<CactusGraph>, p: &PointRef, mult: i64) -> Self {
        Divisor::from_chips(graph, [(p.clone(), mult)])
    }

    pub(crate) fn from_canonical_map(
        graph: &Arc<CactusGraph>,
        chips: BTreeMap<PointRef, i64>,
    ) -> Self {
        debug_assert!(chips.values().all(|&m| m != 0));
        Divisor {
            graph: Arc::clone(graph),
            chips,
        }
    }

    pub(crate) fn add_canonical(&mut self, p: PointRef, m: i64) {
        if m == 0 {
            return;
        }
        match self.chips.entry(p) {
            Entry::Occupied(mut o) => {
                *o.get_mut() += m;
                if *o.get() == 0 {
                    o.remove();
                }
            }
            Entry::Vacant(v) => {
                v.insert(m);
            }
        }
    }

    /// Adds `mult` chips at `p` (canonicalized).
    pub fn add_chip(&mut self, p: &PointRef, mult: i64) {
        let p = self.graph.canonical_point(p.loop_id, &p.offset);
        self.add_canonical(p, mult);
    }

    pub fn with_chip(&self, p: &PointRef, mult: i64) -> Divisor {
        let mut d = self.clone();
        d.add_chip(p, mult);
        d
    }

    pub fn graph(&self) -> &Arc<CactusGraph> {
        &self.graph
    }

    pub fn chips(&self) -> &BTreeMap<PointRef, i64> {
        &self.chips
    }

    pub fn get(&self, p: &PointRef) -> i64 {
        self.chips.get(p).copied().unwrap_or(0)
    }

    pub fn degree(&self) -> i64 {
        self.chips.values().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.chips.is_empty()
    }

    pub fn is_effective(&self) -> bool {
        self.chips.values().all(|&m| m > 0)
    }

    pub fn is_effective_away_from(&self, v: &PointRef) -> bool {
        self.chips.iter().all(|(p, &m)| m > 0 || p == v)
    }

    /// Number of chips lying on loop `id`, counting every point of the closed loop.
    pub fn degree_on_loop(&self, id: LoopId) -> i64 {
        self.chips
            .iter()
            .filter(|(p, _)| self.graph.offset_on(p, id).is_some())
            .map(|(_, &m)| m)
            .sum()
    }

    /// `s·a + t·b`.
    pub fn combine(a: &Divisor, b: &Divisor, s: i64, t: i64) -> Result<Divisor> {
        if !same_graph(&a.graph, &b.graph) {
            return Err(Error::GraphMismatch);
        }
        let mut out = Divisor::zero(&a.graph);
        for (p, &m) in &a.chips {
            out.add_canonical(p.clone(), s * m);
        }
        for (p, &m) in &b.chips {
            out.add_canonical(p.clone(), t * m);
        }
        Ok(out)
    }

    pub fn plus(&self, other: &Divisor) -> Result<Divisor> {
        Divisor::combine(self, other, 1, 1)
    }

    pub fn minus(&self, other: &Divisor) -> Result<Divisor> {
        Divisor::combine(self, other, 1, -1)
    }

    pub fn scaled(&self, k: i64) -> Divisor {
        let chips = if k == 0 {
            BTreeMap::new()
        } else {
            self.chips
                .iter()
                .map(|(p, &m)| (p.clone(), k * m))
                .collect()
        };
        Divisor::from_canonical_map(&self.graph, chips)
    }

    /// Keeps the chips whose canonical loop belongs to `loops`.
    pub fn restrict(&self, loops: &[LoopId]) -> Result<Divisor> {
        if loops.is_empty() {
            return Err(Error::InvalidArgument(
                "restriction needs at least one loop".into(),
            ));
        }
        if let Some(bad) = loops.iter().find(|l| l.0 >= self.graph.genus()) {
            return Err(Error::UnknownLoop(format!("#{}", bad.0)));
        }
        let keep: BTreeSet<LoopId> = loops.iter().copied().collect();
        let chips = self
            .chips
            .iter()
            .filter(|(p, _)| keep.contains(&p.loop_id))
            .map(|(p, &m)| (p.clone(), m))
            .collect();
        Ok(Divisor::from_canonical_map(&self.graph, chips))
    }

    /// Reinterprets the divisor on a graph that extends this one
    /// (for instance the result of [`CactusGraph::wedge_with_loop`]).
    pub fn lift_to(&self, graph: &Arc<CactusGraph>) -> Result<Divisor> {
        if graph.genus() < self.graph.genus()
            || self.graph.loop_ids().any(|l| {
                self.graph.circumference(l) != graph.circumference(l)
                    || self.graph.name(l) != graph.name(l)
            })
        {
            return Err(Error::GraphMismatch);
        }
        Ok(Divisor::from_chips(
            graph,
            self.chips.iter().map(|(p, &m)| (p.clone(), m)),
        ))
    }

    /// Divisor file text: one `chip <loop> <offset> <mult>` line per point.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (p, m) in &self.chips {
            out.push_str(&format!(
                "chip {} {} {}\n",
                self.graph.name(p.loop_id),
                p.offset,
                m
            ));
        }
        out
    }

    pub fn parse(graph: &Arc<CactusGraph>, text: &str) -> Result<Divisor> {
        let mut d = Divisor::zero(graph);
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let tok: Vec<&str> = content.split_whitespace().collect();
            match tok.as_slice() {
                ["chip", name, off, mult] => {
                    let id = graph
                        .loop_id(name)
                        .map_err(|_| Error::parse(line, format!("unknown loop `{name}`")))?;
                    let off: Rational = off
                        .parse()
                        .map_err(|_| Error::parse(line, format!("malformed rational `{off}`")))?;
                    let mult: i64 = mult.parse().map_err(|_| {
                        Error::parse(line, format!("malformed multiplicity `{mult}`"))
                    })?;
                    if mult == 0 {
                        return Err(Error::parse(line, "multiplicity must be nonzero"));
                    }
                    d.add_chip(&PointRef::new(id, off), mult);
                }
                _ => {
                    return Err(Error::parse(
                        line,
                        format!("unrecognized directive `{content}`"),
                    ))
                }
            }
        }
        Ok(d)
    }
}

/// `K = Σ (valence − 2)·w` over the wedge points.
pub fn canonical_divisor(graph: &Arc<CactusGraph>) -> Divisor {
    let chips = graph
        .loop_ids()
        .filter_map(|l| graph.origin(l).cloned())
        .map(|p| (p, 2));
    Divisor::from_chips(graph, chips)
}

/// Degree and per-loop torus coordinates of `d`.
pub fn class_coordinates(d: &Divisor) -> DivisorClass {
    let g = d.graph();
    let mu = g
        .loop_ids()
        .map(|l| {
            let c = g.circumference(l);
            let mut acc = Rational::zero();
            for (p, &m) in d.chips() {
                let r = g.retract_point(p, l);
                if !r.is_zero() {
                    acc += &r.mul_int(m);
                }
            }
            acc.rem_euclid(c)
        })
        .collect();
    DivisorClass {
        degree: d.degree(),
        mu,
    }
}

/// Offset on loop `i` of the wedge point through which loop `j ≠ i` is reached.
pub(crate) fn cross_retraction(g: &CactusGraph, i: LoopId, j: LoopId) -> Rational {
    g.retract_point(&PointRef::new(j, Rational::zero()), i)
}

/// Free-chip offsets `x_i` of the representative `Σ (x_i) + (d − g)(q)`.
pub fn representative_offsets(g: &CactusGraph, cls: &DivisorClass) -> Vec<Rational> {
    let q = g.base_point();
    let surplus = cls.degree - g.genus() as i64;
    g.loop_ids()
        .map(|i| {
            let mut x = cls.mu[i.0].clone();
            for j in g.loop_ids().filter(|&j| j != i) {
                x -= &cross_retraction(g, i, j);
            }
            x -= &g.retract_point(q, i).mul_int(surplus);
            x.rem_euclid(g.circumference(i))
        })
        .collect()
}

/// One chip per loop plus the degree surplus `d − g` at the base point,
/// chosen so that the class coordinates come back exactly as `cls`.
pub fn representative_from_class(graph: &Arc<CactusGraph>, cls: &DivisorClass) -> Result<Divisor> {
    if cls.mu.len() != graph.genus() {
        return Err(Error::InvalidArgument(format!(
            "class has {} coordinates but the graph has genus {}",
            cls.mu.len(),
            graph.genus()
        )));
    }
    for l in graph.loop_ids() {
        let m = &cls.mu[l.0];
        if m.is_negative() || m >= graph.circumference(l) {
            return Err(Error::InvalidArgument(format!(
                "coordinate {m} out of range on loop `{}`",
                graph.name(l)
            )));
        }
    }
    let xs = representative_offsets(graph, cls);
    let surplus = cls.degree - graph.genus() as i64;
    let mut chips: Vec<(PointRef, i64)> = graph
        .loop_ids()
        .map(|l| (PointRef::new(l, xs[l.0].clone()), 1))
        .collect();
    chips.push((graph.base_point().clone(), surplus));
    Ok(Divisor::from_chips(graph, chips))
}

impl DivisorClass {
    /// Class of `self − (p)`; `g` must be the graph the class lives on.
    pub fn minus_point(&self, g: &CactusGraph, p: &PointRef) -> DivisorClass {
        self.shift_by_point(g, p, -1)
    }

    pub fn plus_point(&self, g: &CactusGraph, p: &PointRef) -> DivisorClass {
        self.shift_by_point(g, p, 1)
    }

    fn shift_by_point(&self, g: &CactusGraph, p: &PointRef, k: i64) -> DivisorClass {
        let mu = g
            .loop_ids()
            .map(|l| {
                let r = g.retract_point(p, l);
                (&self.mu[l.0] + &r.mul_int(k)).rem_euclid(g.circumference(l))
            })
            .collect();
        DivisorClass {
            degree: self.degree + k,
            mu,
        }
    }

    /// Class file text: a `degree <d>` line, then `mu <loop> <coordinate>` per loop.
    pub fn to_text(&self, g: &CactusGraph) -> String {
        let mut out = format!("degree {}\n", self.degree);
        for l in g.loop_ids() {
            out.push_str(&format!("mu {} {}\n", g.name(l), self.mu[l.0]));
        }
        out
    }

    /// Parses class file text. Every loop needs exactly one `mu` line.
    pub fn parse(g: &CactusGraph, text: &str) -> Result<DivisorClass> {
        let mut degree = None;
        let mut mu: Vec<Option<Rational>> = vec![None; g.genus()];
        let mut last = 0;
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            last = line;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let tok: Vec<&str> = content.split_whitespace().collect();
            match tok.as_slice() {
                ["degree", d] => {
                    if degree.is_some() {
                        return Err(Error::parse(line, "degree given twice"));
                    }
                    degree = Some(
                        d.parse::<i64>()
                            .map_err(|_| Error::parse(line, format!("malformed degree `{d}`")))?,
                    );
                }
                ["mu", name, value] => {
                    let id = g
                        .loop_id(name)
                        .map_err(|_| Error::parse(line, format!("unknown loop `{name}`")))?;
                    let v: Rational = value
                        .parse()
                        .map_err(|_| Error::parse(line, format!("malformed rational `{value}`")))?;
                    if v.is_negative() || &v >= g.circumference(id) {
                        return Err(Error::parse(
                            line,
                            format!("coordinate {v} out of range on `{name}`"),
                        ));
                    }
                    if mu[id.0].replace(v).is_some() {
                        return Err(Error::parse(
                            line,
                            format!("coordinate for `{name}` given twice"),
                        ));
                    }
                }
                _ => {
                    return Err(Error::parse(
                        line,
                        format!("unrecognized directive `{content}`"),
                    ))
                }
            }
        }
        let degree = degree.ok_or_else(|| Error::parse(last, "missing degree line"))?;
        let mu = g
            .loop_ids()
            .map(|l| {
                mu[l.0].take().ok_or_else(|| {
                    Error::parse(last, format!("missing coordinate for `{}`", g.name(l)))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(DivisorClass { degree, mu })
    }
}

/// Continuous piecewise-linear function with integer slopes, given per loop
/// by sorted breakpoints `(offset, value)` joined by linear interpolation
/// around the loop.
#[derive(Debug, Clone)]
pub struct PLFunction {
    graph: Arc<CactusGraph>,
    pieces: Vec<Vec<(Rational, Rational)>>,
}

impl PLFunction {
    pub fn new(graph: &Arc<CactusGraph>, pieces: Vec<Vec<(Rational, Rational)>>) -> Result<Self> {
        if pieces.len() != graph.genus() {
            return Err(Error::InvalidArgument(
                "one breakpoint list per loop is required".into(),
            ));
        }
        let f = PLFunction {
            graph: Arc::clone(graph),
            pieces,
        };
        for l in graph.loop_ids() {
            let bp = &f.pieces[l.0];
            if bp.is_empty() {
                return Err(Error::InvalidArgument(format!(
                    "loop `{}` has no breakpoints",
                    graph.name(l)
                )));
            }
            let c = graph.circumference(l);
            for (k, (o, _)) in bp.iter().enumerate() {
                if o.is_negative() || o >= c || (k > 0 && o <= &bp[k - 1].0) {
                    return Err(Error::InvalidArgument(format!(
                        "breakpoints on loop `{}` must be strictly increasing in [0, {c})",
                        graph.name(l)
                    )));
                }
            }
            for s in f.slopes(l) {
                if !s.is_integer() {
                    return Err(Error::InvalidArgument(format!(
                        "non-integer slope {s} on loop `{}`",
                        graph.name(l)
                    )));
                }
            }
        }
        for l in graph.loop_ids() {
            if let (Some(p), Some(off)) = (graph.parent(l), graph.attach_offset(l)) {
                if f.value_at(l, &Rational::zero()) != f.value_at(p, off) {
                    return Err(Error::InvalidArgument(format!(
                        "discontinuity where loop `{}` meets `{}`",
                        graph.name(l),
                        graph.name(p)
                    )));
                }
            }
        }
        Ok(f)
    }

    pub fn constant(graph: &Arc<CactusGraph>, value: Rational) -> Self {
        PLFunction {
            graph: Arc::clone(graph),
            pieces: graph
                .loop_ids()
                .map(|_| vec![(Rational::zero(), value.clone())])
                .collect(),
        }
    }

    pub fn graph(&self) -> &Arc<CactusGraph> {
        &self.graph
    }

    pub fn breakpoints(&self, l: LoopId) -> &[(Rational, Rational)] {
        &self.pieces[l.0]
    }

    /// Slope of segment `k` (from breakpoint `k` to the next, cyclically).
    fn slopes(&self, l: LoopId) -> Vec<Rational> {
        let bp = &self.pieces[l.0];
        let c = self.graph.circumference(l);
        (0..bp.len())
            .map(|k| {
                let (o0, v0) = &bp[k];
                let (o1, v1) = if k + 1 < bp.len() {
                    (bp[k + 1].0.clone(), &bp[k + 1].1)
                } else {
                    (&bp[0].0 + c, &bp[0].1)
                };
                (v1 - v0) / (&o1 - o0)
            })
            .collect()
    }

    pub fn value_at(&self, l: LoopId, offset: &Rational) -> Rational {
        let c = self.graph.circumference(l);
        let x = offset.rem_euclid(c);
        let bp = &self.pieces[l.0];
        let slopes = self.slopes(l);
        // Last breakpoint at or before x, wrapping to the final one.
        let k = match bp.iter().rposition(|(o, _)| o <= &x) {
            Some(k) => k,
            None => bp.len() - 1,
        };
        let (o, v) = &bp[k];
        let dx = if &x >= o { &x - o } else { &(&x + c) - o };
        v + &(&slopes[k] * &dx)
    }
}

/// `div(f)`: at every point, the sum of the slopes of `f` along the
/// directions leaving that point.
pub fn divisor_of_function(f: &PLFunction) -> Divisor {
    let g = f.graph();
    let mut d = Divisor::zero(g);
    for l in g.loop_ids() {
        let slopes = f.slopes(l);
        let n = slopes.len();
        for (k, (o, _)) in f.breakpoints(l).iter().enumerate() {
            let ord = &slopes[k] - &slopes[(k + n - 1) % n];
            let m = ord.to_i64().expect("integer slope difference");
            if m != 0 {
                d.add_chip(&PointRef::new(l, o.clone()), m);
            }
        }
    }
    d
}
