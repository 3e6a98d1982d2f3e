//! Vectors of F_2^k, multiplicity profiles, and the matrix / request models.
//!
//! A [`GroupVector`] stores its coordinates as the low `k` bits of an
//! integer. Row 1 of a generator matrix is the most significant bit, so the
//! column `(1,0,1)^T` is the value `0b101`.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Largest supported dimension.
pub const MAX_DIM: u8 = 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Gf2Error {
    #[error("dimension {0} is outside 1..=16")]
    BadDimension(u32),
    #[error("value {bits} does not fit in {k} bits")]
    OutOfRange { bits: u32, k: u8 },
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: u8, right: u8 },
    #[error("request {index} is the zero vector")]
    ZeroRequest { index: usize },
    #[error("profile for k={k} needs {expected} counters, got {got}")]
    BadProfileLength { k: u8, expected: usize, got: usize },
    #[error("invalid bitstring {0:?}")]
    BadBitstring(String),
}

pub(crate) fn check_dim(k: u32) -> Result<u8, Gf2Error> {
    if (1..=MAX_DIM as u32).contains(&k) {
        Ok(k as u8)
    } else {
        Err(Gf2Error::BadDimension(k))
    }
}

/// An element of F_2^k.
///
/// Ordering is by dimension, then by bit value, which is the lexicographic
/// order used for all tie-breaking.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupVector {
    k: u8,
    bits: u32,
}

impl GroupVector {
    pub fn new(k: u8, bits: u32) -> Result<Self, Gf2Error> {
        check_dim(k as u32)?;
        if bits >> k != 0 {
            return Err(Gf2Error::OutOfRange { bits, k });
        }
        Ok(Self { k, bits })
    }

    /// Caller guarantees `1 <= k <= 16` and `bits < 2^k`.
    pub(crate) fn from_raw(k: u8, bits: u32) -> Self {
        debug_assert!((1..=MAX_DIM).contains(&k) && bits >> k == 0);
        Self { k, bits }
    }

    pub fn zero(k: u8) -> Result<Self, Gf2Error> {
        Self::new(k, 0)
    }

    /// The standard basis vector for data symbol `row` (0-based, row 0 = MSB).
    pub fn unit(k: u8, row: u8) -> Result<Self, Gf2Error> {
        check_dim(k as u32)?;
        if row >= k {
            return Err(Gf2Error::OutOfRange { bits: row as u32, k });
        }
        Ok(Self { k, bits: 1 << (k - 1 - row) })
    }

    /// Parses a bitstring such as `"101"`; the dimension is its length.
    pub fn parse(s: &str) -> Result<Self, Gf2Error> {
        let k = check_dim(s.len() as u32).map_err(|_| Gf2Error::BadBitstring(s.to_string()))?;
        let mut bits = 0u32;
        for ch in s.chars() {
            bits = (bits << 1)
                | match ch {
                    '0' => 0,
                    '1' => 1,
                    _ => return Err(Gf2Error::BadBitstring(s.to_string())),
                };
        }
        Ok(Self { k, bits })
    }

    pub fn k(self) -> u8 {
        self.k
    }

    pub fn bits(self) -> u32 {
        self.bits
    }

    pub fn is_zero(self) -> bool {
        self.bits == 0
    }

    /// Group addition (bitwise XOR).
    pub fn add(self, other: Self) -> Result<Self, Gf2Error> {
        if self.k != other.k {
            return Err(Gf2Error::DimensionMismatch { left: self.k, right: other.k });
        }
        Ok(self.xor(other))
    }

    pub(crate) fn xor(self, other: Self) -> Self {
        debug_assert_eq!(self.k, other.k);
        Self { k: self.k, bits: self.bits ^ other.bits }
    }

    /// All `2^k` elements in increasing bit order.
    pub fn all(k: u8) -> Result<impl Iterator<Item = GroupVector>, Gf2Error> {
        check_dim(k as u32)?;
        Ok((0..1u32 << k).map(move |bits| GroupVector { k, bits }))
    }

    pub fn nonzero(k: u8) -> Result<impl Iterator<Item = GroupVector>, Gf2Error> {
        Ok(Self::all(k)?.skip(1))
    }

    pub fn units(k: u8) -> Result<Vec<GroupVector>, Gf2Error> {
        check_dim(k as u32)?;
        // increasing bit order: last row first
        Ok((0..k).map(|j| GroupVector { k, bits: 1 << j }).collect())
    }
}

impl fmt::Display for GroupVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in (0..self.k).rev() {
            f.write_str(if self.bits >> i & 1 == 1 { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for GroupVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GroupVector({self})")
    }
}

impl Serialize for GroupVector {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for GroupVector {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        GroupVector::parse(&s).map_err(serde::de::Error::custom)
    }
}

/// XOR of a non-empty run of vectors sharing one dimension.
pub fn xor_all<'a>(k: u8, items: impl IntoIterator<Item = &'a GroupVector>) -> GroupVector {
    items.into_iter().fold(GroupVector::from_raw(k, 0), |acc, v| acc.xor(*v))
}

/// Multiplicity vector over all of F_2^k.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Profile {
    k: u8,
    counts: Vec<u32>,
    total: u64,
}

impl Profile {
    pub fn empty(k: u8) -> Result<Self, Gf2Error> {
        check_dim(k as u32)?;
        Ok(Self { k, counts: vec![0; 1 << k], total: 0 })
    }

    pub fn from_counts(k: u8, counts: Vec<u32>) -> Result<Self, Gf2Error> {
        check_dim(k as u32)?;
        if counts.len() != 1 << k {
            return Err(Gf2Error::BadProfileLength { k, expected: 1 << k, got: counts.len() });
        }
        let total = counts.iter().map(|&c| c as u64).sum();
        Ok(Self { k, counts, total })
    }

    pub fn k(&self) -> u8 {
        self.k
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn count(&self, v: GroupVector) -> u32 {
        debug_assert_eq!(v.k, self.k);
        self.counts[v.bits as usize]
    }

    pub fn zero_count(&self) -> u32 {
        self.counts[0]
    }

    /// Number of nonzero entries with multiplicity, `|G| - N_G(0)`.
    pub fn nonzero_total(&self) -> u64 {
        self.total - self.counts[0] as u64
    }

    pub fn counts(&self) -> &[u32] {
        &self.counts
    }

    pub fn is_empty(&self) -> bool {
        self.total == 0
    }

    pub fn insert(&mut self, v: GroupVector, times: u32) {
        debug_assert_eq!(v.k, self.k);
        self.counts[v.bits as usize] += times;
        self.total += times as u64;
    }

    /// Removes up to `times` copies; returns how many were removed.
    pub fn remove(&mut self, v: GroupVector, times: u32) -> u32 {
        debug_assert_eq!(v.k, self.k);
        let slot = &mut self.counts[v.bits as usize];
        let taken = (*slot).min(times);
        *slot -= taken;
        self.total -= taken as u64;
        taken
    }

    /// `(vector, count)` for every vector with positive count.
    pub fn support(&self) -> impl Iterator<Item = (GroupVector, u32)> + '_ {
        let k = self.k;
        self.counts
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(move |(bits, &c)| (GroupVector::from_raw(k, bits as u32), c))
    }

    /// Expands to a sorted sequence of vectors.
    pub fn to_vectors(&self) -> Vec<GroupVector> {
        self.support()
            .flat_map(|(v, c)| std::iter::repeat_n(v, c as usize))
            .collect()
    }

    /// `|self ∩ other|` as multisets.
    pub fn intersection(&self, other: &Profile) -> Result<u64, Gf2Error> {
        multiset_intersection(self, other)
    }
}

impl fmt::Debug for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut m = f.debug_map();
        for (v, c) in self.support() {
            m.entry(&v.to_string(), &c);
        }
        m.finish()
    }
}

#[derive(Serialize, Deserialize)]
struct ProfileDoc {
    k: u8,
    counts: BTreeMap<String, u32>,
}

impl Serialize for Profile {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let counts = self.support().map(|(v, c)| (v.to_string(), c)).collect();
        ProfileDoc { k: self.k, counts }.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Profile {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let doc = ProfileDoc::deserialize(deserializer)?;
        let mut p = Profile::empty(doc.k).map_err(D::Error::custom)?;
        for (s, c) in doc.counts {
            let v = GroupVector::parse(&s).map_err(D::Error::custom)?;
            if v.k != doc.k {
                return Err(D::Error::custom(Gf2Error::DimensionMismatch { left: doc.k, right: v.k }));
            }
            p.insert(v, c);
        }
        Ok(p)
    }
}

/// Counts multiplicities of `items`, all of which must have dimension `k`.
pub fn profile_of(items: &[GroupVector], k: u8) -> Result<Profile, Gf2Error> {
    let mut p = Profile::empty(k)?;
    for v in items {
        if v.k != k {
            return Err(Gf2Error::DimensionMismatch { left: k, right: v.k });
        }
        p.insert(*v, 1);
    }
    Ok(p)
}

/// `Σ_v min(a[v], b[v])`.
pub fn multiset_intersection(a: &Profile, b: &Profile) -> Result<u64, Gf2Error> {
    if a.k != b.k {
        return Err(Gf2Error::DimensionMismatch { left: a.k, right: b.k });
    }
    Ok(a.counts.iter().zip(&b.counts).map(|(&x, &y)| x.min(y) as u64).sum())
}

/// Both sides of the counting bound `2|R| <= |G| - N_G(0) + |G ∩ R|`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BoundCheck {
    pub lhs: u64,
    pub rhs: u64,
}

impl BoundCheck {
    pub fn holds(&self) -> bool {
        self.lhs <= self.rhs
    }
}

/// Evaluates the counting bound; every servable request multiset satisfies it.
pub fn serve_bound(g: &Profile, r: &Profile) -> Result<BoundCheck, Gf2Error> {
    let meet = multiset_intersection(g, r)?;
    Ok(BoundCheck { lhs: 2 * r.total, rhs: g.nonzero_total() + meet })
}

/// Necessary condition for `r` to be servable from `g`. A `false` result
/// certifies that no service exists; `true` certifies nothing.
pub fn serve_bound_holds(g: &Profile, r: &Profile) -> bool {
    serve_bound(g, r).map(|b| b.holds()).unwrap_or(false)
}

/// A `k × n` generator matrix, stored column by column.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matrix {
    k: u8,
    columns: Vec<GroupVector>,
}

impl Matrix {
    pub fn new(k: u8, columns: Vec<GroupVector>) -> Result<Self, Gf2Error> {
        check_dim(k as u32)?;
        if let Some(c) = columns.iter().find(|c| c.k != k) {
            return Err(Gf2Error::DimensionMismatch { left: k, right: c.k });
        }
        Ok(Self { k, columns })
    }

    pub fn k(&self) -> u8 {
        self.k
    }

    pub fn n(&self) -> usize {
        self.columns.len()
    }

    pub fn columns(&self) -> &[GroupVector] {
        &self.columns
    }

    pub fn profile(&self) -> Profile {
        profile_of(&self.columns, self.k).expect("columns share the matrix dimension")
    }

    /// Replaces column `j`, returning the old value.
    pub fn set_column(&mut self, j: usize, v: GroupVector) -> Result<GroupVector, Gf2Error> {
        if v.k != self.k {
            return Err(Gf2Error::DimensionMismatch { left: self.k, right: v.k });
        }
        Ok(std::mem::replace(&mut self.columns[j], v))
    }
}

/// An ordered sequence of nonzero requests.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RequestSeq {
    k: u8,
    requests: Vec<GroupVector>,
}

impl RequestSeq {
    pub fn new(k: u8, requests: Vec<GroupVector>) -> Result<Self, Gf2Error> {
        check_dim(k as u32)?;
        for (index, r) in requests.iter().enumerate() {
            if r.k != k {
                return Err(Gf2Error::DimensionMismatch { left: k, right: r.k });
            }
            if r.is_zero() {
                return Err(Gf2Error::ZeroRequest { index });
            }
        }
        Ok(Self { k, requests })
    }

    pub fn k(&self) -> u8 {
        self.k
    }

    pub fn len(&self) -> usize {
        self.requests.len()
    }

    pub fn is_empty(&self) -> bool {
        self.requests.is_empty()
    }

    pub fn requests(&self) -> &[GroupVector] {
        &self.requests
    }

    pub fn profile(&self) -> Profile {
        profile_of(&self.requests, self.k).expect("requests share the sequence dimension")
    }

    pub fn prefix(&self, len: usize) -> RequestSeq {
        RequestSeq { k: self.k, requests: self.requests[..len].to_vec() }
    }
}
