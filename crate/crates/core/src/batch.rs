//! Constructive service when every vector is stored at least `2m` times.
//!
//! Requests are split into `m` blocks of `2^k`. For a block
//! `(r_1, ..., r_N)` let `s_1 = r_2 + ... + r_N` and `s_i = r_i` for `i > 1`;
//! this sequence sums to zero, so it has a Hall pairing `(a, b)`. Anchoring
//! the pairing so that `a_1 = r_1`, the block is served by `{a_1}` for `r_1`
//! and `{a_i, b_i}` for the rest. One block consumes two copies of every
//! vector except `r_1 + s_1`, of which it consumes one.

use std::collections::VecDeque;

use serde::Serialize;
use thiserror::Error;

use crate::gf2::{xor_all, GroupVector, Matrix, RequestSeq};
use crate::hall::{anchor_pairing, hall_pairing, HallError};

/// Distinct column indices whose XOR is the request they serve.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct RecoverySet(Vec<usize>);

impl RecoverySet {
    /// Sorts and stores the indices. Duplicates are kept so that
    /// [`verify_service`] can reject them.
    pub fn new(mut columns: Vec<usize>) -> Self {
        columns.sort_unstable();
        Self(columns)
    }

    pub fn columns(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Assignment {
    pub request: usize,
    pub columns: RecoverySet,
}

/// Index-level service: one recovery set per request.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Default)]
#[serde(transparent)]
pub struct Service {
    assignments: Vec<Assignment>,
}

impl Service {
    /// Assignments are stored in request order.
    pub fn new(mut assignments: Vec<Assignment>) -> Self {
        assignments.sort_by_key(|a| a.request);
        Self { assignments }
    }

    pub fn assignments(&self) -> &[Assignment] {
        &self.assignments
    }

    pub fn max_set_size(&self) -> usize {
        self.assignments.iter().map(|a| a.columns.len()).max().unwrap_or(0)
    }

    pub fn used_columns(&self) -> impl Iterator<Item = usize> + '_ {
        self.assignments.iter().flat_map(|a| a.columns.columns().iter().copied())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ServeError {
    #[error("{count} requests is not a positive multiple of 2^k = {block}")]
    BadLength { count: usize, block: usize },
    #[error("vector {vector} appears {have} times, need at least {need}")]
    Deficient { vector: GroupVector, have: u32, need: u32 },
    #[error("matrix has k = {matrix}, requests have k = {requests}")]
    DimensionMismatch { matrix: u8, requests: u8 },
    #[error(transparent)]
    Hall(#[from] HallError),
}

/// Lowest-index-first supply of column indices per vector.
pub(crate) struct ColumnPool {
    free: Vec<VecDeque<usize>>,
}

impl ColumnPool {
    pub(crate) fn new(g: &Matrix) -> Self {
        let mut free = vec![VecDeque::new(); 1 << g.k()];
        for (j, c) in g.columns().iter().enumerate() {
            free[c.bits() as usize].push_back(j);
        }
        Self { free }
    }

    pub(crate) fn take(&mut self, v: GroupVector) -> Option<usize> {
        self.free[v.bits() as usize].pop_front()
    }
}

/// Serves `m·2^k` requests with recovery sets of size at most two.
///
/// Requires every vector of F_2^k, zero included, to appear at least `2m`
/// times among the columns. `seed` fixes the pairing tie-breaks.
pub fn serve_by_hall(g: &Matrix, r: &RequestSeq, seed: u64) -> Result<Service, ServeError> {
    let k = g.k();
    if r.k() != k {
        return Err(ServeError::DimensionMismatch { matrix: k, requests: r.k() });
    }
    let block = 1usize << k;
    if r.is_empty() || !r.len().is_multiple_of(block) {
        return Err(ServeError::BadLength { count: r.len(), block });
    }
    let m = r.len() / block;
    let profile = g.profile();
    let need = 2 * m as u32;
    if let Some((vector, have)) = GroupVector::all(k)
        .expect("matrix dimension is valid")
        .map(|v| (v, profile.count(v)))
        .find(|&(_, c)| c < need)
    {
        return Err(ServeError::Deficient { vector, have, need });
    }

    let mut pool = ColumnPool::new(g);
    let mut assignments = Vec::with_capacity(r.len());
    for start in 0..m {
        // round-robin deal: block `start` holds requests start, start+m, ...
        let members: Vec<usize> = (start..r.len()).step_by(m).collect();
        let reqs: Vec<GroupVector> = members.iter().map(|&i| r.requests()[i]).collect();
        let mut s = reqs.clone();
        s[0] = xor_all(k, &reqs[1..]);
        let pairing = anchor_pairing(&hall_pairing(&s, seed ^ start as u64)?, reqs[0]);

        for (pos, &request) in members.iter().enumerate() {
            let types: &[GroupVector] = if pos == 0 {
                &pairing.a()[..1]
            } else {
                &[pairing.a()[pos], pairing.b()[pos]]
            };
            let columns = types
                .iter()
                .map(|&t| pool.take(t).expect("each block uses at most two copies per vector"))
                .collect();
            assignments.push(Assignment { request, columns: RecoverySet::new(columns) });
        }
    }
    Ok(Service::new(assignments))
}

/// True iff each request is served exactly once, the recovery sets are
/// pairwise disjoint, and each set XORs to its request.
pub fn verify_service(g: &Matrix, r: &RequestSeq, s: &Service) -> bool {
    if g.k() != r.k() || s.assignments.len() != r.len() {
        return false;
    }
    let mut served = vec![false; r.len()];
    let mut used = vec![false; g.n()];
    for a in &s.assignments {
        if a.request >= r.len() || std::mem::replace(&mut served[a.request], true) {
            return false;
        }
        let mut acc = 0u32;
        for &j in a.columns.columns() {
            if j >= g.n() || std::mem::replace(&mut used[j], true) {
                return false;
            }
            acc ^= g.columns()[j].bits();
        }
        if acc != r.requests()[a.request].bits() {
            return false;
        }
    }
    true
}
