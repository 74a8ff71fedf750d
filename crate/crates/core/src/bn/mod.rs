//! Brill-Noether experiments: expected dimension, stratified scans of
//! `W^r_d`, local dimension probes, Brill-Noether rank bounds and
//! verifiers for the constructive steps of the tree-of-loops results.

mod probe;
mod scan;
mod verify;
mod wrd;

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

pub use probe::{local_dim_probe, DimProbe, ProbeConfig, ProbeTrial};
pub use scan::{stratified_scan, GridPoint, PersistenceRun, ScanConfig, ScanReport, Stratum};
pub use verify::{
    star_theta_divisor, verify_lemma_w13, verify_oracle_random, verify_prop_weak,
    verify_rank_sandwich, verify_rr_random, verify_tree_chain, verify_wedge_dim, StarLayout,
    WedgeDimConfig,
};
pub use wrd::{bn_rank_bounds, find_witness, BnRankBounds, UpperSource};

/// Expected dimension `ρ(g, r, d) = g − (r+1)(g − d + r)`.
pub fn rho(g: i64, r: i64, d: i64) -> i64 {
    g - (r + 1) * (g - d + r)
}

/// One named check inside a verifier run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckLine {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// Outcome of a verifier: individual checks, named facts and a verdict.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerifyReport {
    pub name: String,
    pub passed: bool,
    pub verdict: String,
    pub facts: BTreeMap<String, String>,
    pub checks: Vec<CheckLine>,
}

impl VerifyReport {
    pub(crate) fn new(name: &str) -> Self {
        VerifyReport {
            name: name.to_string(),
            passed: true,
            verdict: String::new(),
            facts: BTreeMap::new(),
            checks: Vec::new(),
        }
    }

    pub(crate) fn check(
        &mut self,
        name: impl Into<String>,
        passed: bool,
        detail: impl Into<String>,
    ) {
        self.passed &= passed;
        self.checks.push(CheckLine {
            name: name.into(),
            passed,
            detail: detail.into(),
        });
    }

    pub(crate) fn fact(&mut self, key: &str, value: impl ToString) {
        self.facts.insert(key.to_string(), value.to_string());
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "verify {}: {}",
            self.name,
            if self.passed { "PASS" } else { "FAIL" }
        )?;
        for (k, v) in &self.facts {
            writeln!(f, "{k}={v}")?;
        }
        for c in &self.checks {
            writeln!(
                f,
                "[{}] {}: {}",
                if c.passed { "ok" } else { "FAIL" },
                c.name,
                c.detail
            )?;
        }
        write!(f, "verdict: {}", self.verdict)
    }
}

/// Nondecreasing index sequences of length `k` over `0..n`, in lexicographic order.
pub(crate) fn multisets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(n: usize, k: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(n, k, i, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if n == 0 && k > 0 {
        return out;
    }
    rec(n, k, 0, &mut Vec::with_capacity(k), &mut out);
    out
}

/// Number of multisets of size `k` over `n` items, saturating.
pub(crate) fn multiset_count(n: usize, k: usize) -> usize {
    if n == 0 {
        return usize::from(k == 0);
    }
    // C(n + k − 1, k)
    let mut acc: u128 = 1;
    for i in 0..k as u128 {
        acc = acc * (n as u128 + i) / (i + 1);
        if acc > usize::MAX as u128 {
            return usize::MAX;
        }
    }
    acc as usize
}

/// Subsets of `0..n` of size `k`, lexicographic.
pub(crate) fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    multisets(n, k)
        .into_iter()
        .filter(|s| s.windows(2).all(|w| w[0] < w[1]))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rho_values() {
        assert_eq!(rho(4, 1, 3), 0);
        assert_eq!(rho(6, 1, 3), -2);
        assert_eq!(rho(5, 1, 3), -1);
        for g in 1..10 {
            assert_eq!(rho(g, 0, 0), 0);
        }
    }

    #[test]
    fn counting() {
        assert_eq!(multisets(3, 2).len(), 6);
        assert_eq!(multiset_count(3, 2), 6);
        assert_eq!(multiset_count(4, 3), 20);
        assert_eq!(multisets(0, 0), vec![Vec::<usize>::new()]);
        assert!(multisets(0, 1).is_empty());
        assert_eq!(subsets(4, 2).len(), 6);
        assert_eq!(subsets(3, 0), vec![Vec::<usize>::new()]);
    }
}
