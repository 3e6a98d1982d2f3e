//! The request-stream statistics `V` (longest servable prefix) and `L`
//! (largest servable subset).

use serde::Serialize;

use crate::gf2::{Gf2Error, GroupVector, Profile};
use crate::solver::{is_servable, Budget, Servability, SolverError};

/// Above this many requests `L` is only bracketed, never searched.
pub const L_EXACT_LIMIT: usize = 24;

/// A statistic known to lie in `[lower, upper]`; exact when they agree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Bracket {
    pub lower: u64,
    pub upper: u64,
}

impl Bracket {
    pub fn exact(v: u64) -> Self {
        Self { lower: v, upper: v }
    }

    pub fn is_exact(&self) -> bool {
        self.lower == self.upper
    }
}

fn check(g: &Profile, requests: &[GroupVector]) -> Result<(), SolverError> {
    for r in requests {
        if r.k() != g.k() {
            return Err(Gf2Error::DimensionMismatch { left: g.k(), right: r.k() }.into());
        }
        if r.is_zero() {
            return Err(SolverError::ZeroRequest);
        }
    }
    Ok(())
}

/// Length of the prefix served by singletons alone, while supplies last.
fn singleton_prefix(g: &Profile, requests: &[GroupVector]) -> u64 {
    let mut supply = g.counts().to_vec();
    let mut served = 0;
    for r in requests {
        let s = &mut supply[r.bits() as usize];
        if *s == 0 {
            break;
        }
        *s -= 1;
        served += 1;
    }
    served
}

/// Longest prefix that satisfies the counting bound. The bound is monotone
/// along prefixes, so the scan stops at its first violation.
fn bound_prefix(g: &Profile, requests: &[GroupVector]) -> u64 {
    let c = g.counts();
    let mut need = vec![0u32; c.len()];
    let nonzero = g.nonzero_total();
    let mut meet = 0u64;
    let mut best = 0;
    for (i, r) in requests.iter().enumerate() {
        let t = r.bits() as usize;
        need[t] += 1;
        if need[t] <= c[t] {
            meet += 1;
        }
        if 2 * (i as u64 + 1) > nonzero + meet {
            break;
        }
        best = i as u64 + 1;
    }
    best
}

/// `V`: the longest prefix of `requests` that `g` can serve.
///
/// Prefixes served by singletons are accepted without search; beyond that
/// each prefix up to the counting-bound limit is decided exactly. If the
/// search budget runs out the result is a proper bracket.
pub fn longest_servable_prefix(g: &Profile, requests: &[GroupVector], budget: Budget) -> Result<Bracket, SolverError> {
    check(g, requests)?;
    let k = g.k();
    let mut lower = singleton_prefix(g, requests);
    let upper = bound_prefix(g, requests);
    let mut prefix = Profile::empty(k)?;
    for r in &requests[..lower as usize] {
        prefix.insert(*r, 1);
    }
    while lower < upper {
        prefix.insert(requests[lower as usize], 1);
        match is_servable(g, &prefix, None, budget) {
            Ok(Servability::Servable(_)) => lower += 1,
            Ok(Servability::Unservable { .. }) => return Ok(Bracket::exact(lower)),
            Err(SolverError::BudgetExceeded { .. }) => return Ok(Bracket { lower, upper }),
            Err(e) => return Err(e),
        }
    }
    Ok(Bracket::exact(lower))
}

/// Serves singletons first, then as many remaining requests as possible
/// by pairs `{e, r+e}`, smallest `e` first.
pub fn greedy_subset_size(g: &Profile, requests: &Profile) -> u64 {
    let mut supply = g.counts().to_vec();
    supply[0] = 0;
    let want = requests.counts();
    let mut rest = vec![0u32; want.len()];
    let mut served = 0u64;
    for t in 1..want.len() {
        let m = supply[t].min(want[t]);
        supply[t] -= m;
        rest[t] = want[t] - m;
        served += m as u64;
    }
    for t in 1..want.len() {
        for _ in 0..rest[t] {
            let pair = (1..supply.len()).find(|&e| e < (e ^ t) && supply[e] > 0 && supply[e ^ t] > 0);
            let Some(e) = pair else { break };
            supply[e] -= 1;
            supply[e ^ t] -= 1;
            served += 1;
        }
    }
    served
}

/// Largest request count the counting bound allows from `requests`:
/// requests present in `g` cost one unit of the budget, others two.
pub fn bound_subset_size(g: &Profile, requests: &Profile) -> u64 {
    let budget = g.nonzero_total();
    let meet = g.intersection(requests).expect("dimensions checked by caller");
    let x = meet.min(budget);
    let y = (requests.total() - meet).min((budget - x) / 2);
    x + y
}

/// `L`: the largest sub-multiset of `requests` that `g` can serve.
///
/// Exact up to [`L_EXACT_LIMIT`] requests, by deciding sizes upward from
/// the greedy value until some size has no servable sub-multiset. Larger
/// inputs, and searches that run out of budget, yield the bracket between
/// the greedy value and the counting bound.
pub fn largest_servable_subset(g: &Profile, requests: &[GroupVector], budget: Budget) -> Result<Bracket, SolverError> {
    check(g, requests)?;
    let rp = if requests.is_empty() { Profile::empty(g.k())? } else { crate::gf2::profile_of(requests, g.k())? };
    let mut lower = greedy_subset_size(g, &rp);
    let upper = bound_subset_size(g, &rp);
    if lower >= upper {
        return Ok(Bracket::exact(lower));
    }
    if requests.len() > L_EXACT_LIMIT {
        return Ok(Bracket { lower, upper });
    }
    for size in lower + 1..=upper {
        match servable_of_size(g, &rp, size, budget) {
            Ok(true) => lower = size,
            Ok(false) => return Ok(Bracket::exact(lower)),
            Err(SolverError::BudgetExceeded { .. }) => return Ok(Bracket { lower, upper }),
            Err(e) => return Err(e),
        }
    }
    Ok(Bracket::exact(lower))
}

/// Whether some sub-multiset of `rp` with `size` requests is servable.
fn servable_of_size(g: &Profile, rp: &Profile, size: u64, budget: Budget) -> Result<bool, SolverError> {
    let types: Vec<(GroupVector, u32)> = rp.support().collect();
    let mut chosen = vec![0u32; types.len()];
    let mut remaining: Vec<u64> = vec![0; types.len() + 1];
    for i in (0..types.len()).rev() {
        remaining[i] = remaining[i + 1] + types[i].1 as u64;
    }
    sub_multisets(g, &types, &remaining, 0, size, &mut chosen, budget)
}

fn sub_multisets(
    g: &Profile,
    types: &[(GroupVector, u32)],
    remaining: &[u64],
    i: usize,
    left: u64,
    chosen: &mut [u32],
    budget: Budget,
) -> Result<bool, SolverError> {
    if left == 0 {
        let mut sub = Profile::empty(g.k())?;
        for (&(v, _), &c) in types.iter().zip(chosen.iter()) {
            sub.insert(v, c);
        }
        return Ok(is_servable(g, &sub, None, budget)?.is_servable());
    }
    if i == types.len() || remaining[i] < left {
        return Ok(false);
    }
    let most = (types[i].1 as u64).min(left);
    for c in (0..=most).rev() {
        chosen[i] = c as u32;
        if sub_multisets(g, types, remaining, i + 1, left - c, chosen, budget)? {
            return Ok(true);
        }
    }
    chosen[i] = 0;
    Ok(false)
}
