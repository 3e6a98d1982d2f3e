//! Brute-force oracles over column index sets, independent of the solver.
#![allow(dead_code)]

use std::collections::HashSet;

use codeserve::gf2::{GroupVector, Profile};
use rand::Rng;

fn xor_table(cols: &[u32]) -> Vec<u32> {
    let n = cols.len();
    let mut xr = vec![0u32; 1 << n];
    for mask in 1..1usize << n {
        let low = mask.trailing_zeros() as usize;
        xr[mask] = xr[mask & (mask - 1)] ^ cols[low];
    }
    xr
}

fn fits(mask: usize, cap: Option<usize>) -> bool {
    cap.is_none_or(|w| mask.count_ones() as usize <= w)
}

/// Maximum number of pairwise disjoint column subsets summing to `r`.
pub fn packing_oracle(cols: &[u32], r: u32, cap: Option<usize>) -> usize {
    assert!(cols.len() <= 14, "oracle is exponential");
    let xr = xor_table(cols);
    let mut memo = vec![usize::MAX; 1 << cols.len()];
    fn best(mask: usize, r: u32, cap: Option<usize>, xr: &[u32], memo: &mut [usize]) -> usize {
        if mask == 0 {
            return 0;
        }
        if memo[mask] != usize::MAX {
            return memo[mask];
        }
        let low = mask & mask.wrapping_neg();
        let mut v = best(mask ^ low, r, cap, xr, memo);
        let rest = mask ^ low;
        let mut sub = rest;
        loop {
            let s = sub | low;
            if xr[s] == r && fits(s, cap) {
                v = v.max(1 + best(mask ^ s, r, cap, xr, memo));
            }
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & rest;
        }
        memo[mask] = v;
        v
    }
    best((1 << cols.len()) - 1, r, cap, &xr, &mut memo)
}

/// Whether `reqs` can be served by pairwise disjoint column subsets.
pub fn servable_oracle(cols: &[u32], reqs: &[u32], cap: Option<usize>) -> bool {
    assert!(cols.len() <= 14, "oracle is exponential");
    let xr = xor_table(cols);
    let mut failed = HashSet::new();
    fn go(
        i: usize,
        free: usize,
        reqs: &[u32],
        cap: Option<usize>,
        xr: &[u32],
        failed: &mut HashSet<(usize, usize)>,
    ) -> bool {
        if i == reqs.len() {
            return true;
        }
        if failed.contains(&(i, free)) {
            return false;
        }
        let mut sub = free;
        while sub != 0 {
            if xr[sub] == reqs[i] && fits(sub, cap) && go(i + 1, free ^ sub, reqs, cap, xr, failed) {
                return true;
            }
            sub = (sub - 1) & free;
        }
        failed.insert((i, free));
        false
    }
    go(0, (1 << cols.len()) - 1, reqs, cap, &xr, &mut failed)
}

/// Functional batch parameter by trying every multiset of nonzero vectors
/// of size `1, 2, ...` against [`servable_oracle`].
pub fn tfb_oracle(k: u8, cols: &[u32]) -> u64 {
    let types: Vec<u32> = (1..1u32 << k).collect();
    let mut t = 1;
    loop {
        let mut idx = vec![0usize; t];
        loop {
            let reqs: Vec<u32> = idx.iter().map(|&i| types[i]).collect();
            if !servable_oracle(cols, &reqs, None) {
                return t as u64 - 1;
            }
            let Some(i) = (0..t).rev().find(|&i| idx[i] + 1 < types.len()) else { break };
            let v = idx[i] + 1;
            idx[i..].iter_mut().for_each(|x| *x = v);
        }
        t += 1;
    }
}

pub fn gv(s: &str) -> GroupVector {
    GroupVector::parse(s).unwrap()
}

pub fn bits_of(p: &Profile) -> Vec<u32> {
    p.to_vectors().iter().map(|v| v.bits()).collect()
}

/// A profile with `total` columns drawn uniformly from `F_2^k`.
pub fn random_profile(k: u8, total: usize, rng: &mut impl Rng) -> Profile {
    let mut c = vec![0u32; 1 << k];
    for _ in 0..total {
        c[rng.gen_range(0..1usize << k)] += 1;
    }
    Profile::from_counts(k, c).unwrap()
}

/// A multiset of `count` nonzero vectors, uniform.
pub fn random_requests(k: u8, count: usize, rng: &mut impl Rng) -> Profile {
    let mut c = vec![0u32; 1 << k];
    for _ in 0..count {
        c[rng.gen_range(1..1usize << k)] += 1;
    }
    Profile::from_counts(k, c).unwrap()
}
