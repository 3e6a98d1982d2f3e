//! Exact servability of a request multiset.

use std::collections::HashSet;

use serde::Serialize;

use super::pir::le2_raw;
use super::{effective_cap, minimal_sets, Budget, NodeMeter, SolverError};
use crate::batch::{Assignment, ColumnPool, RecoverySet, Service};
use crate::gf2::{serve_bound, BoundCheck, Gf2Error, GroupVector, Matrix, Profile, RequestSeq};

/// One request served by a multiset of column vectors.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TypedRecovery {
    pub request: GroupVector,
    pub columns: Vec<GroupVector>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Servability {
    Servable(Vec<TypedRecovery>),
    /// `bound` is the counting bound evaluated on the instance; when it does
    /// not hold it is a certificate on its own.
    Unservable { bound: BoundCheck },
}

impl Servability {
    pub fn is_servable(&self) -> bool {
        matches!(self, Servability::Servable(_))
    }
}

/// Decides whether `r` can be served from `g` by pairwise disjoint recovery
/// sets, each of size at most `weight_cap` when given.
///
/// Without a cap, every request whose vector is stored is served from a
/// copy of itself first; an exchange argument shows this never hurts. The
/// rest is a depth-first search over the smallest unserved request vector,
/// trying its inclusion-minimal recovery sets in order of size. Failed
/// states are memoized and pruned by the counting bound and by a per-vector
/// bound on how many copies could be served at all.
pub fn is_servable(
    g: &Profile,
    r: &Profile,
    weight_cap: Option<usize>,
    budget: Budget,
) -> Result<Servability, SolverError> {
    let k = g.k();
    if r.k() != k {
        return Err(Gf2Error::DimensionMismatch { left: k, right: r.k() }.into());
    }
    if r.zero_count() != 0 {
        return Err(SolverError::ZeroRequest);
    }
    let cap = effective_cap(k, weight_cap)?;
    let bound = serve_bound(g, r)?;
    if !bound.holds() {
        return Ok(Servability::Unservable { bound });
    }

    let mut gc = g.counts().to_vec();
    gc[0] = 0;
    let mut rc = r.counts().to_vec();
    let mut witness = Vec::new();
    let vec_of = |b: u32| GroupVector::from_raw(k, b);

    if cap.is_none() {
        for t in 1..gc.len() {
            let m = gc[t].min(rc[t]);
            gc[t] -= m;
            rc[t] -= m;
            for _ in 0..m {
                witness.push(TypedRecovery { request: vec_of(t as u32), columns: vec![vec_of(t as u32)] });
            }
        }
    }

    let max_size = cap.unwrap_or(k as usize);
    let available: Vec<u32> = (1..gc.len() as u32).filter(|&e| gc[e as usize] > 0).collect();
    let sets: Vec<Vec<Vec<u32>>> = (0..rc.len() as u32)
        .map(|t| if t > 0 && rc[t as usize] > 0 { minimal_sets(t, &available, max_size) } else { Vec::new() })
        .collect();

    let mut search = Search {
        sets: &sets,
        g: gc,
        r: rc,
        triples: max_size >= 3,
        failed: HashSet::new(),
        meter: NodeMeter::new(budget),
        path: Vec::new(),
    };
    if search.dfs(0)? {
        for &(t, idx) in &search.path {
            let columns = sets[t as usize][idx].iter().map(|&b| vec_of(b)).collect();
            witness.push(TypedRecovery { request: vec_of(t), columns });
        }
        Ok(Servability::Servable(witness))
    } else {
        Ok(Servability::Unservable { bound })
    }
}

struct Search<'a> {
    sets: &'a [Vec<Vec<u32>>],
    g: Vec<u32>,
    r: Vec<u32>,
    triples: bool,
    failed: HashSet<Vec<u32>>,
    meter: NodeMeter,
    path: Vec<(u32, usize)>,
}

impl Search<'_> {
    fn plausible(&self) -> bool {
        let nonzero: u64 = self.g[1..].iter().map(|&c| c as u64).sum();
        let meet: u64 = self.g.iter().zip(&self.r).skip(1).map(|(&a, &b)| a.min(b) as u64).sum();
        let want: u64 = self.r.iter().map(|&c| c as u64).sum();
        if 2 * want > nonzero + meet {
            return false;
        }
        for t in 1..self.r.len() {
            let need = self.r[t] as u64;
            if need == 0 {
                continue;
            }
            let le2 = le2_raw(&self.g, t as u32);
            if need <= le2 {
                continue;
            }
            if !self.triples {
                return false;
            }
            // each pair of the le2 count uses two columns, singles one
            let singles = self.g[t] as u64;
            let used = singles + 2 * (le2 - singles);
            if need > le2 + (nonzero - used) / 3 {
                return false;
            }
        }
        true
    }

    fn key(&self, start: usize) -> Vec<u32> {
        let mut key = Vec::with_capacity(2 * self.g.len() - 1);
        key.extend_from_slice(&self.g[1..]);
        key.extend_from_slice(&self.r[1..]);
        key.push(start as u32);
        key
    }

    /// `start` skips sets already ruled out for further copies of the same
    /// request vector, so equal requests take sets in non-decreasing order.
    fn dfs(&mut self, start: usize) -> Result<bool, SolverError> {
        self.meter.tick()?;
        let Some(t) = (1..self.r.len()).find(|&t| self.r[t] > 0) else { return Ok(true) };
        if !self.plausible() {
            return Ok(false);
        }
        let key = self.key(start);
        if self.failed.contains(&key) {
            return Ok(false);
        }
        let sets = self.sets;
        for (idx, set) in sets[t].iter().enumerate().skip(start) {
            if !set.iter().all(|&e| self.g[e as usize] > 0) {
                continue;
            }
            set.iter().for_each(|&e| self.g[e as usize] -= 1);
            self.r[t] -= 1;
            self.path.push((t as u32, idx));
            let next = if self.r[t] > 0 { idx } else { 0 };
            if self.dfs(next)? {
                return Ok(true);
            }
            self.path.pop();
            self.r[t] += 1;
            set.iter().for_each(|&e| self.g[e as usize] += 1);
        }
        self.failed.insert(key);
        Ok(false)
    }
}

/// Assigns concrete column indices to a type-level witness, lowest
/// available index first. Returns `None` if the witness does not fit the
/// matrix or does not cover the requests.
pub fn lift_witness(g: &Matrix, r: &RequestSeq, witness: &[TypedRecovery]) -> Option<Service> {
    let mut by_type: Vec<Vec<&TypedRecovery>> = vec![Vec::new(); 1 << g.k()];
    for w in witness.iter().rev() {
        if w.request.k() != g.k() {
            return None;
        }
        by_type[w.request.bits() as usize].push(w);
    }
    let mut pool = ColumnPool::new(g);
    let mut assignments = Vec::with_capacity(r.len());
    for (request, v) in r.requests().iter().enumerate() {
        let w = by_type[v.bits() as usize].pop()?;
        let columns = w.columns.iter().map(|&c| pool.take(c)).collect::<Option<Vec<_>>>()?;
        assignments.push(Assignment { request, columns: RecoverySet::new(columns) });
    }
    if by_type.iter().any(|q| !q.is_empty()) {
        return None;
    }
    Some(Service::new(assignments))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::batch::verify_service;
    use crate::gf2::profile_of;

    fn gv(s: &str) -> GroupVector {
        GroupVector::parse(s).unwrap()
    }

    fn prof(k: u8, items: &[&str]) -> Profile {
        profile_of(&items.iter().map(|s| gv(s)).collect::<Vec<_>>(), k).unwrap()
    }

    #[test]
    fn four_columns_pair_is_unservable() {
        let g = prof(3, &["100", "101", "110", "111"]);
        let r = prof(3, &["001", "010"]);
        let out = is_servable(&g, &r, None, Budget::default()).unwrap();
        // the counting bound holds with equality, so only the search refutes it
        assert_eq!(out, Servability::Unservable { bound: BoundCheck { lhs: 4, rhs: 4 } });
    }

    #[test]
    fn empty_request_is_servable() {
        let g = prof(3, &["100"]);
        let out = is_servable(&g, &Profile::empty(3).unwrap(), None, Budget::default()).unwrap();
        assert_eq!(out, Servability::Servable(vec![]));
    }

    #[test]
    fn two_pairs() {
        let g = prof(2, &["10", "10", "01", "01"]);
        let r = prof(2, &["11", "11"]);
        match is_servable(&g, &r, None, Budget::default()).unwrap() {
            Servability::Servable(w) => {
                assert_eq!(w.len(), 2);
                for t in w {
                    assert_eq!(t.columns, vec![gv("01"), gv("10")]);
                }
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn bound_violation_is_certificate() {
        let g = prof(3, &["001"]);
        let r = prof(3, &["010", "010"]);
        let out = is_servable(&g, &r, None, Budget::default()).unwrap();
        assert_eq!(out, Servability::Unservable { bound: BoundCheck { lhs: 4, rhs: 1 } });
    }

    #[test]
    fn weight_cap_binds() {
        // 001 = 011 + 101 + 111 needs three columns
        let g = prof(3, &["011", "101", "111"]);
        let r = prof(3, &["001"]);
        assert!(is_servable(&g, &r, None, Budget::default()).unwrap().is_servable());
        assert!(!is_servable(&g, &r, Some(2), Budget::default()).unwrap().is_servable());
        assert_eq!(is_servable(&g, &r, Some(0), Budget::default()), Err(SolverError::InvalidCap));
    }

    #[test]
    fn singleton_first_is_safe_with_mixed_requests() {
        // serving 011 from {001, 010} would block 001
        let g = prof(3, &["001", "010", "011"]);
        let r = prof(3, &["011", "001"]);
        assert!(is_servable(&g, &r, None, Budget::default()).unwrap().is_servable());
    }

    #[test]
    fn rejects_zero_requests() {
        let g = prof(2, &["01"]);
        let r = Profile::from_counts(2, vec![1, 0, 0, 0]).unwrap();
        assert_eq!(is_servable(&g, &r, None, Budget::default()), Err(SolverError::ZeroRequest));
    }

    #[test]
    fn budget_exceeded_is_distinct() {
        let g = Profile::from_counts(3, vec![0, 0, 0, 3, 0, 3, 3, 3]).unwrap();
        let r = Profile::from_counts(3, vec![0, 3, 2, 0, 1, 0, 0, 0]).unwrap();
        assert_eq!(is_servable(&g, &r, None, Budget::new(1)), Err(SolverError::BudgetExceeded { limit: 1 }));
    }

    #[test]
    fn witness_lifts_to_verified_service() {
        let g = Matrix::new(3, ["011", "100", "101", "111", "110", "001"].iter().map(|s| gv(s)).collect()).unwrap();
        let r = RequestSeq::new(3, ["001", "001", "010"].iter().map(|s| gv(s)).collect()).unwrap();
        let Servability::Servable(w) = is_servable(&g.profile(), &r.profile(), None, Budget::default()).unwrap() else {
            panic!("expected servable");
        };
        let s = lift_witness(&g, &r, &w).unwrap();
        assert!(verify_service(&g, &r, &s));
        assert!(lift_witness(&g, &r.prefix(1), &w).is_none());
    }
}
