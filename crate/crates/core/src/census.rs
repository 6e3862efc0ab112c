//! Labeled essential-DAG counters over a single binary relation: totals,
//! totals under an indegree bound, counts per indegree profile, and
//! filtered sums (source count, edge count).
//!
//! With a trivial matrix the extended 1-types of the general dynamic
//! program collapse to the indegree alone. A profile k of length d+1
//! records how many nodes have each indegree; the sink recursion
//! specializes to an attachment count of C(n−m, t) − k″_{t−1} per sink of
//! indegree t, and the unbounded total a_n closes over the profile sum:
//!
//!   a_n = Σ_{m=1}^{n} (−1)^{m+1} C(n,m) (2^{n−m} − (n−m))^m a_{n−m}.

use std::collections::HashMap;

use num::pow::pow;
use num::{BigInt, One, Signed, Zero};

use crate::arith::{binomial_int, for_each_composition, multinomial_int, ExactNumber};

/// Memo for the profile recursion, shared across queries. The count
/// depends only on the profile's support, so keys are trimmed of trailing
/// zeros and a value computed under one indegree bound serves every
/// other.
#[derive(Default)]
pub struct CensusMemo {
    entries: HashMap<Vec<u32>, BigInt>,
}

impl CensusMemo {
    pub fn new() -> CensusMemo {
        CensusMemo::default()
    }
}

fn trimmed(k: &[u32]) -> Vec<u32> {
    let mut v = k.to_vec();
    while v.last() == Some(&0) {
        v.pop();
    }
    v
}

/// The sink recursion over indegree profiles: split off a sink census k′,
/// count the ways each sink attaches, and consult the remainder.
fn a_profile(k: &[u32], memo: &mut CensusMemo) -> BigInt {
    let key = trimmed(k);
    if let Some(v) = memo.entries.get(&key) {
        return v.clone();
    }
    let n: u32 = key.iter().sum();
    let value = if n == 0 {
        BigInt::one()
    } else {
        let width = key.len();
        let mut acc = BigInt::zero();
        let mut k1 = vec![0u32; width];
        'splits: loop {
            // odometer bounded componentwise by the profile
            let mut pos = width;
            loop {
                if pos == 0 {
                    break 'splits;
                }
                pos -= 1;
                if k1[pos] < key[pos] {
                    k1[pos] += 1;
                    break;
                }
                k1[pos] = 0;
            }
            let m: u32 = k1.iter().sum();
            let k2: Vec<u32> = key.iter().zip(&k1).map(|(&a, &b)| a - b).collect();
            let prev = a_profile(&k2, memo);
            if prev.is_zero() {
                continue;
            }
            let rest = (n - m) as usize;
            let mut term = binomial_int(n as usize, m as usize) * multinomial_int(&k1);
            for (t, &cnt) in k1.iter().enumerate() {
                if cnt == 0 {
                    continue;
                }
                let mut g = binomial_int(rest, t);
                if t > 0 {
                    g -= BigInt::from(k2[t - 1]);
                }
                if g.is_zero() {
                    continue 'splits;
                }
                // a realizable remainder forces a non-negative count: every
                // excluded parent set belongs to a distinct existing node
                assert!(
                    !g.is_negative(),
                    "negative sink-attachment count on a realizable profile"
                );
                term *= pow(g, cnt as usize);
            }
            term *= &prev;
            if m % 2 == 1 {
                acc += term;
            } else {
                acc -= term;
            }
        }
        acc
    };
    memo.entries.insert(key, value.clone());
    value
}

/// a_n: labeled essential DAGs on n nodes, unbounded indegree.
pub fn essential_total(n: u32) -> ExactNumber {
    let mut a: Vec<BigInt> = Vec::with_capacity(n as usize + 1);
    a.push(BigInt::one());
    for nn in 1..=n as usize {
        let mut acc = BigInt::zero();
        for m in 1..=nn {
            let rest = nn - m;
            // parent-set choices per sink: any subset of the non-sinks
            // except the n−m sets of the form parents(a) ∪ {a}
            let choices = pow(BigInt::from(2u32), rest) - BigInt::from(rest);
            let term = binomial_int(nn, m) * pow(choices, m) * &a[rest];
            if m % 2 == 1 {
                acc += term;
            } else {
                acc -= term;
            }
        }
        a.push(acc);
    }
    ExactNumber::from_bigint(a[n as usize].clone())
}

/// a_k: labeled essential DAGs whose indegree profile is exactly k, with
/// k_t nodes of indegree t.
pub fn essential_by_indegree(k: &[u32], memo: &mut CensusMemo) -> ExactNumber {
    ExactNumber::from_bigint(a_profile(k, memo))
}

/// Labeled essential DAGs on n nodes with every indegree at most d.
pub fn essential_bounded(n: u32, d: u32, memo: &mut CensusMemo) -> ExactNumber {
    let mut total = BigInt::zero();
    for_each_composition(n, d as usize + 1, &mut |k| {
        total += a_profile(k, memo);
    });
    ExactNumber::from_bigint(total)
}

/// Σ of a_k over the indegree profiles with |k| = n, indegrees capped at
/// d, that the filter admits. Source-count and edge-count queries are
/// filters: k[0] = s, Σ t·k_t = e.
pub fn essential_filtered(
    n: u32,
    d: u32,
    mut filter: impl FnMut(&[u32]) -> bool,
    memo: &mut CensusMemo,
) -> ExactNumber {
    let mut total = BigInt::zero();
    for_each_composition(n, d as usize + 1, &mut |k| {
        if filter(k) {
            total += a_profile(k, memo);
        }
    });
    ExactNumber::from_bigint(total)
}

/// The grid of bounded counts: rows n = 1..=n_max, columns d = 0..=d_max,
/// computed over one shared memo.
pub fn table(n_max: u32, d_max: u32) -> Vec<Vec<ExactNumber>> {
    let mut memo = CensusMemo::new();
    (1..=n_max)
        .map(|n| {
            (0..=d_max)
                .map(|d| essential_bounded(n, d, &mut memo))
                .collect()
        })
        .collect()
}
