//! Maximum number of disjoint recovery sets for a single request vector.
//!
//! For a fixed `r` the recovery sets of size at most two, `{r}` and
//! `{e, r+e}`, never overlap unless equal, so their maximum packing is a
//! closed-form count. Using all of them first loses nothing, so the
//! unrestricted maximum is that count plus an exact packing of the
//! remaining columns, where only sets of size three or more can occur.

use std::collections::HashMap;

use serde::Serialize;

use super::{effective_cap, minimal_sets, Budget, NodeMeter, SolverError};
use crate::gf2::{GroupVector, Profile};

fn check_target(g: &Profile, r: GroupVector) -> Result<(), SolverError> {
    if r.k() != g.k() {
        return Err(crate::gf2::Gf2Error::DimensionMismatch { left: g.k(), right: r.k() }.into());
    }
    if r.is_zero() {
        return Err(SolverError::ZeroTarget);
    }
    Ok(())
}

/// `N(r) + ½ Σ_{e ∉ {0,r}} min(N(e), N(r+e))`.
pub fn t_rp_le2(g: &Profile, r: GroupVector) -> Result<u64, SolverError> {
    check_target(g, r)?;
    Ok(le2_raw(g.counts(), r.bits()))
}

pub(crate) fn le2_raw(c: &[u32], r: u32) -> u64 {
    let twice_pairs: u64 = (1..c.len() as u32)
        .filter(|&e| e != r)
        .map(|e| c[e as usize].min(c[(e ^ r) as usize]) as u64)
        .sum();
    c[r as usize] as u64 + twice_pairs / 2
}

/// Columns left after removing every recovery set of size at most two for
/// `r`. The count at `r` becomes zero and the zero count is kept.
pub fn residual_after_le2(g: &Profile, r: GroupVector) -> Result<Profile, SolverError> {
    check_target(g, r)?;
    let c = g.counts();
    let rb = r.bits() as usize;
    let mut out = c.to_vec();
    out[rb] = 0;
    for e in 1..c.len() {
        if e != rb {
            out[e] = c[e] - c[e].min(c[e ^ rb]);
        }
    }
    Ok(Profile::from_counts(g.k(), out)?)
}

/// A maximum packing of recovery sets for one request vector.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RpPacking {
    pub request: GroupVector,
    pub value: u64,
    pub sets: Vec<Vec<GroupVector>>,
}

/// `t_rP(G)`: how many copies of `r` can be served.
pub fn t_rp(g: &Profile, r: GroupVector, budget: Budget) -> Result<u64, SolverError> {
    rp_packing(g, r, None, budget).map(|p| p.value)
}

/// Maximum disjoint recovery sets for `r`, optionally capped in size.
pub fn rp_packing(
    g: &Profile,
    r: GroupVector,
    weight_cap: Option<usize>,
    budget: Budget,
) -> Result<RpPacking, SolverError> {
    check_target(g, r)?;
    let k = g.k();
    let cap = effective_cap(k, weight_cap)?;
    let rb = r.bits();
    let mut counts = g.counts().to_vec();
    counts[0] = 0;
    let mut sets: Vec<Vec<u32>> = Vec::new();

    // singletons are always part of some maximum packing, capped or not
    for _ in 0..counts[rb as usize] {
        sets.push(vec![rb]);
    }
    counts[rb as usize] = 0;

    let min_big = match cap {
        Some(1) => None,
        Some(2) | None => {
            for e in 1..counts.len() as u32 {
                let f = e ^ rb;
                if e < f {
                    let m = counts[e as usize].min(counts[f as usize]);
                    for _ in 0..m {
                        sets.push(vec![e, f]);
                    }
                    counts[e as usize] -= m;
                    counts[f as usize] -= m;
                }
            }
            if cap.is_none() {
                Some(k as usize)
            } else {
                None
            }
        }
        Some(w) => Some(w),
    };

    if let Some(max_size) = min_big {
        let available: Vec<u32> = (1..counts.len() as u32).filter(|&e| counts[e as usize] > 0).collect();
        let mut by_min: Vec<Vec<Vec<u32>>> = vec![Vec::new(); counts.len()];
        for s in minimal_sets(rb, &available, max_size) {
            by_min[s[0] as usize].push(s);
        }
        let mut packer = Packer { by_min: &by_min, memo: HashMap::new(), meter: NodeMeter::new(budget) };
        sets.extend(packer.extract(&mut counts)?);
    }

    let to_vectors = |s: &Vec<u32>| s.iter().map(|&b| GroupVector::from_raw(k, b)).collect();
    Ok(RpPacking { request: r, value: sets.len() as u64, sets: sets.iter().map(to_vectors).collect() })
}

/// Exact maximum packing by branching on the smallest remaining vector:
/// either none of its copies is used, or one copy goes into a set.
struct Packer<'a> {
    by_min: &'a [Vec<Vec<u32>>],
    memo: HashMap<Vec<u32>, u32>,
    meter: NodeMeter,
}

impl Packer<'_> {
    fn lowest(c: &[u32]) -> Option<usize> {
        (1..c.len()).find(|&e| c[e] > 0)
    }

    fn best(&mut self, c: &mut [u32]) -> Result<u32, SolverError> {
        self.meter.tick()?;
        let Some(e) = Self::lowest(c) else { return Ok(0) };
        if let Some(&v) = self.memo.get(&*c) {
            return Ok(v);
        }
        let key = c.to_vec();
        let held = c[e];
        c[e] = 0;
        let mut best = self.best(c)?;
        c[e] = held;
        let by_min = self.by_min;
        for set in &by_min[e] {
            if set.iter().all(|&x| c[x as usize] > 0) {
                set.iter().for_each(|&x| c[x as usize] -= 1);
                let v = 1 + self.best(c)?;
                set.iter().for_each(|&x| c[x as usize] += 1);
                best = best.max(v);
            }
        }
        self.memo.insert(key, best);
        Ok(best)
    }

    /// Sets of one maximum packing; consumes them from `c`.
    fn extract(&mut self, c: &mut [u32]) -> Result<Vec<Vec<u32>>, SolverError> {
        let mut out = Vec::new();
        while let Some(e) = Self::lowest(c) {
            let target = self.best(c)?;
            let held = c[e];
            c[e] = 0;
            if self.best(c)? == target {
                continue;
            }
            c[e] = held;
            let by_min = self.by_min;
            let mut found = false;
            for set in &by_min[e] {
                if set.iter().all(|&x| c[x as usize] > 0) {
                    set.iter().for_each(|&x| c[x as usize] -= 1);
                    if 1 + self.best(c)? == target {
                        out.push(set.clone());
                        found = true;
                        break;
                    }
                    set.iter().for_each(|&x| c[x as usize] += 1);
                }
            }
            debug_assert!(found, "memoized optimum must be reachable");
            if !found {
                break;
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf2::profile_of;

    fn gv(s: &str) -> GroupVector {
        GroupVector::parse(s).unwrap()
    }

    fn four_columns() -> Profile {
        profile_of(&[gv("100"), gv("101"), gv("110"), gv("111")], 3).unwrap()
    }

    fn balanced(k: u8, each: u32, zero: u32) -> Profile {
        let mut c = vec![each; 1 << k];
        c[0] = zero;
        Profile::from_counts(k, c).unwrap()
    }

    fn odd() -> Profile {
        // {010:3, 011:1, 100:2}
        let mut c = vec![0; 8];
        c[0b010] = 3;
        c[0b011] = 1;
        c[0b100] = 2;
        Profile::from_counts(3, c).unwrap()
    }

    #[test]
    fn le2_examples() {
        assert_eq!(t_rp_le2(&balanced(3, 2, 0), gv("001")).unwrap(), 8);
        assert_eq!(t_rp_le2(&Profile::empty(3).unwrap(), gv("001")).unwrap(), 0);
        assert_eq!(t_rp_le2(&four_columns(), gv("001")).unwrap(), 2);
        assert_eq!(t_rp_le2(&four_columns(), gv("000")), Err(SolverError::ZeroTarget));
    }

    #[test]
    fn residual_examples() {
        let res = residual_after_le2(&balanced(3, 2, 5), gv("001")).unwrap();
        assert_eq!(res.nonzero_total(), 0);
        assert_eq!(res.zero_count(), 5);

        let mut c = vec![0; 8];
        c[1] = 5;
        let res = residual_after_le2(&Profile::from_counts(3, c).unwrap(), gv("001")).unwrap();
        assert_eq!(res.nonzero_total(), 0);

        let res = residual_after_le2(&odd(), gv("001")).unwrap();
        let mut want = vec![0; 8];
        want[0b010] = 2;
        want[0b100] = 2;
        assert_eq!(res.counts(), want.as_slice());
    }

    #[test]
    fn t_rp_examples() {
        let g = four_columns();
        for r in GroupVector::nonzero(3).unwrap() {
            assert!(t_rp(&g, r, Budget::default()).unwrap() >= 2, "r = {r}");
        }
        for k in [2u8, 3] {
            for m in [1u32, 2] {
                let g = balanced(k, 2 * m, 3);
                for r in GroupVector::nonzero(k).unwrap() {
                    assert_eq!(t_rp(&g, r, Budget::default()).unwrap(), (m as u64) << k);
                }
            }
        }
        assert_eq!(t_rp(&odd(), gv("001"), Budget::default()).unwrap(), 1);
    }

    #[test]
    fn triples_are_found_in_residual() {
        // 011 + 101 + 111 = 001 and no set of size <= 2 exists for 001
        let mut c = vec![0; 8];
        c[0b011] = 2;
        c[0b101] = 2;
        c[0b111] = 2;
        let g = Profile::from_counts(3, c).unwrap();
        let r = gv("001");
        assert_eq!(t_rp_le2(&g, r).unwrap(), 0);
        let p = rp_packing(&g, r, None, Budget::default()).unwrap();
        assert_eq!(p.value, 2);
        for s in &p.sets {
            assert_eq!(s.iter().fold(0, |a, v| a ^ v.bits()), 1);
        }
        assert_eq!(rp_packing(&g, r, Some(2), Budget::default()).unwrap().value, 0);
    }

    #[test]
    fn capped_packing_matches_formula_at_two() {
        let g = balanced(3, 3, 1);
        for r in GroupVector::nonzero(3).unwrap() {
            let capped = rp_packing(&g, r, Some(2), Budget::default()).unwrap();
            assert_eq!(capped.value, t_rp_le2(&g, r).unwrap());
            assert!(capped.sets.iter().all(|s| s.len() <= 2));
            assert_eq!(rp_packing(&g, r, Some(1), Budget::default()).unwrap().value, 3);
        }
    }

    #[test]
    fn budget_is_reported() {
        let mut c = vec![0; 16];
        for e in [3, 5, 6, 9, 10, 12, 7, 11] {
            c[e] = 6;
        }
        let g = Profile::from_counts(4, c).unwrap();
        let r = GroupVector::new(4, 1).unwrap();
        assert!(matches!(rp_packing(&g, r, None, Budget::new(3)), Err(SolverError::BudgetExceeded { limit: 3 })));
    }
}
