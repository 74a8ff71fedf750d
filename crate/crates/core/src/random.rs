//! Seeded random graphs, divisors and piecewise-linear functions.
//!
//! Everything is drawn from a [`ChaCha8Rng`] so a `u64` seed reproduces a
//! run exactly on every platform.

use std::sync::Arc;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::divisor::{Divisor, PLFunction};
use crate::error::{Error, Result};
use crate::graph::{CactusGraph, GraphBuilder, LoopId, PointRef};
use crate::rational::Rational;

pub type Rng64 = ChaCha8Rng;

pub fn seeded(seed: u64) -> Rng64 {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random tree of `genus` loops whose circumferences and attachment offsets
/// are multiples of `1/den`, with circumferences in `[1/2, 2]`.
pub fn random_cactus(rng: &mut Rng64, genus: usize, den: u64) -> CactusGraph {
    assert!(genus >= 1 && den >= 2);
    let den = den as i64;
    let mut units: Vec<i64> = Vec::with_capacity(genus);
    let mut b = GraphBuilder::new();
    for i in 0..genus {
        let u = rng.gen_range((den + 1) / 2..=2 * den);
        units.push(u);
        b = b.add_loop(&format!("L{}", i + 1), Rational::new(u, den));
    }
    for i in 1..genus {
        let parent = rng.gen_range(0..i);
        // Occasionally reuse offset 0 so wedge points get shared.
        let k = if rng.gen_bool(0.2) {
            0
        } else {
            rng.gen_range(0..units[parent])
        };
        b = b.attach(
            &format!("L{}", i + 1),
            &format!("L{}", parent + 1),
            Rational::new(k, den),
        );
    }
    let bl = rng.gen_range(0..genus);
    let bk = rng.gen_range(0..units[bl]);
    b.base_point(&format!("L{}", bl + 1), Rational::new(bk, den))
        .build()
        .expect("generated graph is valid")
}

/// Single loop with a random circumference `p/q`, `q ≤ 12`, in `(0, 3]`.
pub fn random_circle(rng: &mut Rng64) -> CactusGraph {
    let q = rng.gen_range(1..=12i64);
    let p = rng.gen_range(1..=3 * q);
    GraphBuilder::new()
        .add_loop("C", Rational::new(p, q))
        .build()
        .expect("valid circle")
}

/// Uniform loop, offset `c·k/den` for uniform `k < den`.
pub fn random_point(rng: &mut Rng64, g: &CactusGraph, den: u64) -> PointRef {
    let l = LoopId(rng.gen_range(0..g.genus()));
    let k = rng.gen_range(0..den as i64);
    g.canonical_point(l, &(g.circumference(l) * &Rational::new(k, den as i64)))
}

/// Point whose offset is a multiple of `1/den` (the circumference must be one too).
pub fn random_grid_point(rng: &mut Rng64, g: &CactusGraph, den: u64) -> PointRef {
    let l = LoopId(rng.gen_range(0..g.genus()));
    let slots = (g.circumference(l) * &Rational::from_int(den as i64))
        .to_i64()
        .expect("circumference on the grid");
    g.canonical_point(l, &Rational::new(rng.gen_range(0..slots), den as i64))
}

/// `chips` random grid points with multiplicities in `[-max_mult, max_mult] ∖ {0}`
/// (or `[1, max_mult]` when `effective`).
pub fn random_divisor(
    rng: &mut Rng64,
    g: &Arc<CactusGraph>,
    den: u64,
    chips: usize,
    max_mult: i64,
    effective: bool,
) -> Divisor {
    let mut d = Divisor::zero(g);
    for _ in 0..chips {
        let p = random_grid_point(rng, g, den);
        let m = if effective {
            rng.gen_range(1..=max_mult)
        } else {
            let m = rng.gen_range(1..=max_mult);
            if rng.gen_bool(0.5) {
                m
            } else {
                -m
            }
        };
        d.add_chip(&p, m);
    }
    d
}

/// Random divisor whose degree lies in `[-max_deg, max_deg]`.
pub fn random_divisor_bounded(
    rng: &mut Rng64,
    g: &Arc<CactusGraph>,
    den: u64,
    max_deg: i64,
) -> Divisor {
    loop {
        let n = rng.gen_range(1..=4);
        let d = random_divisor(rng, g, den, n, 2, false);
        if d.degree().abs() <= max_deg {
            return d;
        }
    }
}

/// Random continuous function, linear with integer slope on each grid
/// interval of length `1/den`. Every circumference and attachment offset
/// must be a multiple of `1/den`.
pub fn random_pl_function(rng: &mut Rng64, g: &Arc<CactusGraph>, den: u64) -> Result<PLFunction> {
    let den_i = den as i64;
    let h = Rational::new(1, den_i);
    let slots = |l: LoopId| -> Result<i64> {
        (g.circumference(l) * &Rational::from_int(den_i))
            .to_i64()
            .ok_or_else(|| Error::InvalidArgument("circumference off the grid".into()))
    };
    let mut order: Vec<LoopId> = g.loop_ids().collect();
    order.sort_by_key(|l| g.depth(*l));
    let mut values: Vec<Vec<Rational>> = vec![Vec::new(); g.genus()];
    for l in order {
        let n = slots(l)? as usize;
        let start = match (g.parent(l), g.attach_offset(l)) {
            (Some(p), Some(off)) => {
                let k = (off * &Rational::from_int(den_i))
                    .to_i64()
                    .ok_or_else(|| Error::InvalidArgument("attachment off the grid".into()))?;
                values[p.0][k as usize].clone()
            }
            _ => Rational::new(rng.gen_range(-den_i..=den_i), den_i),
        };
        let mut slopes: Vec<i64> = (0..n)
            .map(|_| {
                if rng.gen_bool(0.25) {
                    rng.gen_range(-2..=2)
                } else {
                    0
                }
            })
            .collect();
        let sum: i64 = slopes.iter().sum();
        slopes[n - 1] -= sum;
        let mut vals = Vec::with_capacity(n);
        let mut cur = start;
        for s in slopes.iter().take(n) {
            vals.push(cur.clone());
            cur += &h.mul_int(*s);
        }
        values[l.0] = vals;
    }
    let pieces = values
        .into_iter()
        .map(|vals| {
            vals.into_iter()
                .enumerate()
                .map(|(k, v)| (Rational::new(k as i64, den_i), v))
                .collect()
        })
        .collect();
    PLFunction::new(g, pieces)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::divisor::divisor_of_function;

    #[test]
    fn same_seed_same_graph() {
        let a = random_cactus(&mut seeded(7), 4, 24);
        let b = random_cactus(&mut seeded(7), 4, 24);
        assert_eq!(a.to_text(), b.to_text());
        assert_eq!(a.genus(), 4);
    }

    #[test]
    fn functions_are_principal() {
        let mut rng = seeded(3);
        for _ in 0..20 {
            let g = Arc::new(random_cactus(&mut rng, 3, 12));
            let f = random_pl_function(&mut rng, &g, 12).unwrap();
            assert_eq!(divisor_of_function(&f).degree(), 0);
        }
    }

    #[test]
    fn bounded_degree() {
        let mut rng = seeded(1);
        let g = Arc::new(random_cactus(&mut rng, 2, 24));
        for _ in 0..50 {
            assert!(random_divisor_bounded(&mut rng, &g, 24, 3).degree().abs() <= 3);
        }
    }
}
