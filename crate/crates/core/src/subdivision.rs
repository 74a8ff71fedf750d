//! Reduction on an integer subdivision, used as an independent oracle.
//!
//! All lengths and positions are scaled by the common denominator so every
//! loop becomes a cycle of unit edges. Reduction then runs on that finite
//! multigraph with integer chip counts, and the result is mapped back.

use std::collections::VecDeque;

use crate::divisor::Divisor;
use crate::error::{Error, Result};
use crate::graph::{LoopId, PointRef};
use crate::rational::{common_denominator, Rational};

/// Vertex budget used when none is given.
pub const DEFAULT_MAX_VERTICES: usize = 200_000;

struct Subdivided {
    adj: Vec<Vec<usize>>,
    /// Loop and scaled position where each vertex was first created.
    pos: Vec<(LoopId, u64)>,
    /// `ids[loop][k]`: vertex at scaled position `k` of the loop.
    ids: Vec<Vec<usize>>,
}

fn scaled(x: &Rational, n: u64) -> Result<u64> {
    (x * &Rational::from_int(n as i64))
        .to_i64()
        .and_then(|k| u64::try_from(k).ok())
        .ok_or_else(|| Error::Budget("scaled position does not fit".into()))
}

fn subdivide(d: &Divisor, v: &PointRef, max_vertices: usize) -> Result<(Subdivided, u64)> {
    let g = d.graph();
    let mut rats: Vec<Rational> = g.loop_ids().map(|l| g.circumference(l).clone()).collect();
    rats.extend(g.loop_ids().filter_map(|l| g.attach_offset(l).cloned()));
    rats.extend(d.chips().keys().map(|p| p.offset.clone()));
    rats.push(v.offset.clone());
    let n = common_denominator(rats.iter())
        .ok_or_else(|| Error::Budget("common denominator overflows".into()))?;
    if n > i64::MAX as u64 {
        return Err(Error::Budget("common denominator overflows".into()));
    }
    let mut total: u64 = 0;
    for l in g.loop_ids() {
        total = total.saturating_add(scaled(g.circumference(l), n)?);
    }
    if total as usize > max_vertices {
        return Err(Error::Budget(format!(
            "subdivision needs {total} vertices, limit {max_vertices}"
        )));
    }
    let mut order: Vec<LoopId> = g.loop_ids().collect();
    order.sort_by_key(|l| g.depth(*l));
    let mut ids: Vec<Vec<usize>> = vec![Vec::new(); g.genus()];
    let mut pos = Vec::new();
    for &l in &order {
        let len = scaled(g.circumference(l), n)? as usize;
        let mut row = Vec::with_capacity(len);
        for k in 0..len {
            let shared = match (k, g.parent(l), g.attach_offset(l)) {
                (0, Some(p), Some(off)) => Some(ids[p.0][scaled(off, n)? as usize]),
                _ => None,
            };
            row.push(shared.unwrap_or_else(|| {
                pos.push((l, k as u64));
                pos.len() - 1
            }));
        }
        ids[l.0] = row;
    }
    let mut adj = vec![Vec::new(); pos.len()];
    for l in g.loop_ids() {
        let row = &ids[l.0];
        if row.len() < 2 {
            continue;
        }
        for k in 0..row.len() {
            let (a, b) = (row[k], row[(k + 1) % row.len()]);
            adj[a].push(b);
            adj[b].push(a);
        }
    }
    Ok((Subdivided { adj, pos, ids }, n))
}

fn bfs(adj: &[Vec<usize>], s: usize) -> Vec<usize> {
    let mut dist = vec![usize::MAX; adj.len()];
    dist[s] = 0;
    let mut q = VecDeque::from([s]);
    while let Some(u) = q.pop_front() {
        for &w in &adj[u] {
            if dist[w] == usize::MAX {
                dist[w] = dist[u] + 1;
                q.push_back(w);
            }
        }
    }
    dist
}

/// Borrows chips level by level from `v` so every other vertex is non-negative.
fn level_borrow(adj: &[Vec<usize>], chips: &mut [i64], v: usize) {
    let dist = bfs(adj, v);
    let top = *dist.iter().max().unwrap_or(&0);
    let (mut inn, mut out) = (vec![0i64; adj.len()], vec![0i64; adj.len()]);
    let mut by_level = vec![Vec::new(); top + 1];
    for u in 0..adj.len() {
        by_level[dist[u]].push(u);
        for &w in &adj[u] {
            if dist[w] + 1 == dist[u] {
                inn[u] += 1;
            } else if dist[w] == dist[u] + 1 {
                out[u] += 1;
            }
        }
    }
    let mut a = vec![0i64; top + 1];
    for k in (0..top).rev() {
        let mut need = a[k + 1];
        for &x in &by_level[k + 1] {
            let deficit = a[k + 1] * out[x] - chips[x];
            if deficit > 0 {
                need = need.max((deficit + inn[x] - 1) / inn[x]);
            }
        }
        a[k] = need;
    }
    for u in 0..adj.len() {
        let k = dist[u];
        chips[u] -= a[k] * out[u];
        if k > 0 {
            chips[u] += a[k - 1] * inn[u];
        }
    }
}

fn dhar_reduce(adj: &[Vec<usize>], chips: &mut [i64], v: usize, cap: usize) -> Result<()> {
    let n = adj.len();
    for _ in 0..=cap {
        let mut burnt = vec![false; n];
        let mut arriving = vec![0i64; n];
        burnt[v] = true;
        let mut q = VecDeque::from([v]);
        while let Some(u) = q.pop_front() {
            for &w in &adj[u] {
                if !burnt[w] {
                    arriving[w] += 1;
                    if arriving[w] > chips[w] {
                        burnt[w] = true;
                        q.push_back(w);
                    }
                }
            }
        }
        if burnt.iter().all(|&b| b) {
            return Ok(());
        }
        for u in (0..n).filter(|&u| !burnt[u]) {
            for &w in &adj[u] {
                if burnt[w] {
                    chips[u] -= 1;
                    chips[w] += 1;
                }
            }
        }
    }
    Err(Error::IterationCap { cap })
}

/// v-reduced divisor computed on the unit subdivision.
pub fn subdivision_reduce(
    d: &Divisor,
    v: &PointRef,
    max_vertices: Option<usize>,
) -> Result<Divisor> {
    let g = d.graph();
    let v = g.canonical_point(v.loop_id, &v.offset);
    let (sub, n) = subdivide(d, &v, max_vertices.unwrap_or(DEFAULT_MAX_VERTICES))?;
    let mut chips = vec![0i64; sub.pos.len()];
    for (p, &m) in d.chips() {
        chips[sub.ids[p.loop_id.0][scaled(&p.offset, n)? as usize]] += m;
    }
    let vi = sub.ids[v.loop_id.0][scaled(&v.offset, n)? as usize];
    level_borrow(&sub.adj, &mut chips, vi);
    let mass: i64 = chips.iter().map(|c| c.abs()).sum();
    let cap = 10 * (mass as usize + sub.pos.len()).pow(2);
    dhar_reduce(&sub.adj, &mut chips, vi, cap)?;
    let nr = Rational::from_int(n as i64);
    let out = chips
        .iter()
        .enumerate()
        .filter(|(_, &c)| c != 0)
        .map(|(i, &c)| {
            let (l, k) = sub.pos[i];
            (PointRef::new(l, &Rational::from_int(k as i64) / &nr), c)
        });
    Ok(Divisor::from_chips(g, out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::CactusGraph;
    use std::sync::Arc;

    fn q(s: &str) -> Rational {
        s.parse().unwrap()
    }

    #[test]
    fn circle_on_ten_segments() {
        let g = Arc::new(CactusGraph::parse("loop C 1\n").unwrap());
        let c = LoopId(0);
        let d = Divisor::point(&g, &PointRef::new(c, q("3/10")), 2);
        let r = subdivision_reduce(&d, &PointRef::new(c, q("0")), None).unwrap();
        assert_eq!(
            r,
            Divisor::from_chips(
                &g,
                [
                    (PointRef::new(c, q("0")), 1),
                    (PointRef::new(c, q("3/5")), 1)
                ]
            )
        );

        let d = Divisor::from_chips(
            &g,
            [
                (PointRef::new(c, q("1/4")), 1),
                (PointRef::new(c, q("1/2")), -1),
            ],
        );
        let r = subdivision_reduce(&d, &PointRef::new(c, q("0")), None).unwrap();
        assert_eq!(
            r,
            Divisor::from_chips(
                &g,
                [
                    (PointRef::new(c, q("0")), -1),
                    (PointRef::new(c, q("3/4")), 1)
                ]
            )
        );
    }

    #[test]
    fn chain_on_subdivision() {
        let g = Arc::new(CactusGraph::parse("loop L1 1\nloop L2 1\nattach L2 L1 1/2\n").unwrap());
        let l2 = g.loop_id("L2").unwrap();
        let d = Divisor::point(&g, &PointRef::new(l2, q("1/4")), 3);
        let v = g.base_point().clone();
        let r = subdivision_reduce(&d, &v, None).unwrap();
        assert_eq!(
            r,
            Divisor::from_chips(&g, [(v, 2), (PointRef::new(l2, q("3/4")), 1)])
        );
    }

    #[test]
    fn budget_enforced() {
        let g = Arc::new(CactusGraph::parse("loop C 1\n").unwrap());
        let d = Divisor::point(&g, &PointRef::new(LoopId(0), q("1/1000")), 1);
        assert!(matches!(
            subdivision_reduce(&d, &PointRef::new(LoopId(0), q("0")), Some(100)),
            Err(Error::Budget(_))
        ));
    }
}
