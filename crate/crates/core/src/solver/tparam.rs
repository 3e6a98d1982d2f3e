//! The t-parameters `t_b, t_P, t_fb, t_fP, t_rP` and their capped variants.

use serde::Serialize;

use super::pir::rp_packing;
use super::servable::is_servable;
use super::{Budget, Regime, RpPacking, Servability, SolverError, TParamKind};
use crate::gf2::{profile_of, BoundCheck, GroupVector, Profile};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum TParamWitness {
    /// `value` disjoint recovery sets for the minimizing request vector.
    Packing(RpPacking),
    /// A multiset of `value + 1` admissible requests that cannot be served.
    /// `bound` is set when the counting bound alone rules it out.
    FailingRequests { requests: Vec<GroupVector>, bound: Option<BoundCheck> },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TParamOutcome {
    pub value: u64,
    pub witness: TParamWitness,
}

/// Computes a t-parameter exactly.
///
/// PIR-type parameters minimize `t_rP` over the admissible vectors (ties go
/// to the smallest vector). Batch-type parameters try every request
/// multiset of size `t = 1, 2, ...` and stop at the first one that fails;
/// the matching PIR parameter bounds the search from above.
pub fn t_param(g: &Profile, kind: &TParamKind, budget: Budget) -> Result<TParamOutcome, SolverError> {
    let k = g.k();
    let cap = kind.weight_cap;
    match kind.regime {
        Regime::RequestPir(r) => {
            let p = rp_packing(g, r, cap, budget)?;
            Ok(TParamOutcome { value: p.value, witness: TParamWitness::Packing(p) })
        }
        Regime::FunctionalPir => min_packing(g, GroupVector::nonzero(k)?, cap, budget),
        Regime::Pir => min_packing(g, GroupVector::units(k)?, cap, budget),
        Regime::FunctionalBatch => {
            let pir = min_packing(g, GroupVector::nonzero(k)?, cap, budget)?;
            batch_search(g, GroupVector::nonzero(k)?.collect(), pir, cap, budget)
        }
        Regime::Batch => {
            let pir = min_packing(g, GroupVector::units(k)?, cap, budget)?;
            batch_search(g, GroupVector::units(k)?, pir, cap, budget)
        }
    }
}

fn min_packing(
    g: &Profile,
    candidates: impl IntoIterator<Item = GroupVector>,
    cap: Option<usize>,
    budget: Budget,
) -> Result<TParamOutcome, SolverError> {
    let mut best: Option<RpPacking> = None;
    for r in candidates {
        let p = rp_packing(g, r, cap, budget)?;
        if best.as_ref().is_none_or(|b| p.value < b.value) {
            best = Some(p);
        }
    }
    let p = best.expect("at least one candidate vector");
    Ok(TParamOutcome { value: p.value, witness: TParamWitness::Packing(p) })
}

fn batch_search(
    g: &Profile,
    types: Vec<GroupVector>,
    pir: TParamOutcome,
    cap: Option<usize>,
    budget: Budget,
) -> Result<TParamOutcome, SolverError> {
    let k = g.k();
    for t in 1..=pir.value as usize {
        let mut failing = None;
        for_each_multiset(types.len(), t, |idx| {
            let reqs: Vec<GroupVector> = idx.iter().map(|&i| types[i]).collect();
            let profile = profile_of(&reqs, k).expect("request dimension matches");
            match is_servable(g, &profile, cap, budget) {
                Ok(Servability::Servable(_)) => Ok(true),
                Ok(Servability::Unservable { bound }) => {
                    failing = Some((reqs, bound));
                    Ok(false)
                }
                Err(e) => Err(e),
            }
        })?;
        if let Some((requests, bound)) = failing {
            let bound = (!bound.holds()).then_some(bound);
            return Ok(TParamOutcome { value: t as u64 - 1, witness: TParamWitness::FailingRequests { requests, bound } });
        }
    }
    // every multiset up to the PIR value is servable, and value + 1 copies of
    // the PIR minimizer are not
    let TParamWitness::Packing(p) = &pir.witness else { unreachable!("PIR witness is a packing") };
    let requests = vec![p.request; pir.value as usize + 1];
    let r = profile_of(&requests, k).expect("request dimension matches");
    let bound = crate::gf2::serve_bound(g, &r)?;
    Ok(TParamOutcome {
        value: pir.value,
        witness: TParamWitness::FailingRequests { requests, bound: (!bound.holds()).then_some(bound) },
    })
}

/// Visits every non-decreasing index sequence of length `t` over `0..m` in
/// lexicographic order until `f` returns `Ok(false)`.
fn for_each_multiset<E>(m: usize, t: usize, mut f: impl FnMut(&[usize]) -> Result<bool, E>) -> Result<(), E> {
    if m == 0 {
        return Ok(());
    }
    let mut idx = vec![0usize; t];
    loop {
        if !f(&idx)? {
            return Ok(());
        }
        let Some(i) = (0..t).rev().find(|&i| idx[i] + 1 < m) else { return Ok(()) };
        let v = idx[i] + 1;
        idx[i..].iter_mut().for_each(|x| *x = v);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::format::parse_matrix;

    fn value(g: &Profile, regime: Regime) -> u64 {
        t_param(g, &TParamKind::new(regime), Budget::default()).unwrap().value
    }

    #[test]
    fn four_columns_parameters() {
        let g = parse_matrix("3 4\n1111\n0011\n0101\n").unwrap().profile();
        assert_eq!(value(&g, Regime::FunctionalPir), 2);
        assert_eq!(value(&g, Regime::Batch), 1);
        assert_eq!(value(&g, Regime::FunctionalBatch), 1);
        let out = t_param(&g, &TParamKind::new(Regime::Batch), Budget::default()).unwrap();
        match out.witness {
            TParamWitness::FailingRequests { requests, .. } => {
                let names: Vec<String> = requests.iter().map(|v| v.to_string()).collect();
                assert_eq!(names, ["001", "010"]);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn k2_profile() {
        // N(01)=1, N(10)=2, N(11)=3
        let g = Profile::from_counts(2, vec![0, 1, 2, 3]).unwrap();
        assert_eq!(value(&g, Regime::FunctionalPir), 3);
        assert_eq!(value(&g, Regime::FunctionalBatch), 3);
    }

    #[test]
    fn empty_profile_is_zero_everywhere() {
        let g = Profile::empty(3).unwrap();
        let r = GroupVector::parse("011").unwrap();
        for regime in [Regime::Batch, Regime::Pir, Regime::FunctionalBatch, Regime::FunctionalPir, Regime::RequestPir(r)] {
            assert_eq!(value(&g, regime), 0, "{regime:?}");
        }
    }

    #[test]
    fn multiset_enumeration() {
        let mut seen = Vec::new();
        for_each_multiset::<()>(3, 2, |idx| {
            seen.push(idx.to_vec());
            Ok(true)
        })
        .unwrap();
        assert_eq!(seen, vec![vec![0, 0], vec![0, 1], vec![0, 2], vec![1, 1], vec![1, 2], vec![2, 2]]);
    }

    #[test]
    fn capped_functional_batch() {
        // doubled simplex for k=2 serves any 4 requests with sets of size <= 2
        let g = Profile::from_counts(2, vec![2, 2, 2, 2]).unwrap();
        let out = t_param(&g, &TParamKind::capped(Regime::FunctionalBatch, 2), Budget::default()).unwrap();
        assert!(out.value >= 4);
    }
}
