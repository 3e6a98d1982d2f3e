//! Hall pairings on F_2^k.
//!
//! Given a sequence `s` of length `2^k` whose total is zero, a pairing is a
//! pair of permutations `a`, `b` of the group with `s_i = a_i + b_i` for
//! every `i`. Existence is Hall's theorem on abelian groups.
//!
//! [`hall_pairing`] builds one incrementally. It starts from `a = b =`
//! identity and fixes the target differences one position at a time. The
//! last position acts as a sink: its difference is forced by the zero-sum
//! condition. An insertion is a rewiring walk that swaps one coordinate into
//! place and pushes the displaced one through the sink; the walk stops as
//! soon as the displaced value lands on a position not yet fixed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::gf2::{xor_all, GroupVector};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HallError {
    #[error("sequence has length {got}, expected a power of two 2^k matching the entry width")]
    WrongLength { got: usize },
    #[error("entries have mixed dimensions")]
    MixedDimensions,
    #[error("sequence sums to {sum}, not zero")]
    NonZeroSum { sum: GroupVector },
    #[error("exhaustive oracle supports k <= 3, got k = {k}")]
    OracleTooLarge { k: u8 },
    #[error("no pairing found after {attempts} randomized attempts")]
    Exhausted { attempts: u32 },
}

/// Two permutations of F_2^k whose coordinatewise sums realize a sequence.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Pairing {
    k: u8,
    a: Vec<GroupVector>,
    b: Vec<GroupVector>,
}

impl Pairing {
    /// Builds a pairing from explicit permutations. Validity against a
    /// sequence is checked separately by [`verify_pairing`].
    pub fn new(k: u8, a: Vec<GroupVector>, b: Vec<GroupVector>) -> Self {
        Self { k, a, b }
    }

    pub fn k(&self) -> u8 {
        self.k
    }

    pub fn a(&self) -> &[GroupVector] {
        &self.a
    }

    pub fn b(&self) -> &[GroupVector] {
        &self.b
    }

    pub fn differences(&self) -> Vec<GroupVector> {
        self.a.iter().zip(&self.b).map(|(x, y)| x.xor(*y)).collect()
    }
}

fn dimension_of(s: &[GroupVector]) -> Result<u8, HallError> {
    let k = s.first().ok_or(HallError::WrongLength { got: 0 })?.k();
    if s.iter().any(|v| v.k() != k) {
        return Err(HallError::MixedDimensions);
    }
    if s.len() != 1usize << k {
        return Err(HallError::WrongLength { got: s.len() });
    }
    Ok(k)
}

/// Mutable pairing state with inverse lookups.
struct Board {
    a: Vec<u32>,
    b: Vec<u32>,
    pos_a: Vec<usize>,
    pos_b: Vec<usize>,
    /// swaps since the last checkpoint; `true` marks an `a` swap
    log: Vec<(bool, usize, usize)>,
}

impl Board {
    fn identity(n: usize) -> Self {
        let a: Vec<u32> = (0..n as u32).collect();
        Self { b: a.clone(), a, pos_a: (0..n).collect(), pos_b: (0..n).collect(), log: Vec::new() }
    }

    fn swap_a(&mut self, i: usize, j: usize) {
        self.log.push((true, i, j));
        self.a.swap(i, j);
        self.pos_a[self.a[i] as usize] = i;
        self.pos_a[self.a[j] as usize] = j;
    }

    fn swap_b(&mut self, i: usize, j: usize) {
        self.log.push((false, i, j));
        self.b.swap(i, j);
        self.pos_b[self.b[i] as usize] = i;
        self.pos_b[self.b[j] as usize] = j;
    }

    fn rollback(&mut self) {
        while let Some((is_a, i, j)) = self.log.pop() {
            if is_a {
                self.swap_a(i, j);
            } else {
                self.swap_b(i, j);
            }
            self.log.pop();
        }
    }

    fn diff(&self, i: usize) -> u32 {
        self.a[i] ^ self.b[i]
    }
}

/// Repairs `start` to difference `targets[start]`, keeping every position
/// below `start` correct. Positions above `start` are still unconstrained and
/// absorb the displaced values. Returns `false` if `max_steps` is hit.
fn rewire(
    board: &mut Board,
    targets: &[u32],
    start: usize,
    sink: usize,
    rng: Option<&mut ChaCha8Rng>,
    max_steps: usize,
) -> bool {
    let mut rng = rng;
    let mut p = start;
    for _ in 0..max_steps {
        let t = targets[p];
        if board.diff(p) == t {
            return true;
        }
        let fix_b = match rng.as_deref_mut() {
            Some(r) => r.gen_bool(0.5),
            None => true,
        };
        if fix_b {
            // keep a[p], pull in the b-value that completes the difference
            let q = board.pos_b[(board.a[p] ^ t) as usize];
            board.swap_b(p, q);
            if q > start {
                return true;
            }
            board.swap_a(q, sink);
            p = q;
        } else {
            let q = board.pos_a[(board.b[p] ^ t) as usize];
            board.swap_a(p, q);
            if q > start {
                return true;
            }
            board.swap_b(q, sink);
            p = q;
        }
    }
    false
}

const MAX_ATTEMPTS: u32 = 64;

/// Finds a Hall pairing for a zero-sum sequence of length `2^k`.
///
/// Output is deterministic for a given `(s, seed)`. The first pass uses no
/// randomness; the seed only drives the retries of a stalled insertion.
pub fn hall_pairing(s: &[GroupVector], seed: u64) -> Result<Pairing, HallError> {
    let k = dimension_of(s)?;
    let sum = xor_all(k, s);
    if !sum.is_zero() {
        return Err(HallError::NonZeroSum { sum });
    }
    let n = s.len();
    let sink = n - 1;
    let mut board = Board::identity(n);
    let mut targets = vec![0u32; n];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let base_steps = 4 * n + 16;

    for j in 0..sink {
        targets[j] = s[j].bits();
        if board.diff(j) == targets[j] {
            continue;
        }
        board.log.clear();
        if rewire(&mut board, &targets, j, sink, None, base_steps) {
            continue;
        }
        let mut done = false;
        for attempt in 0..MAX_ATTEMPTS {
            board.rollback();
            let steps = base_steps << (attempt / 8).min(6);
            if rewire(&mut board, &targets, j, sink, Some(&mut rng), steps) {
                done = true;
                break;
            }
        }
        if !done {
            return Err(HallError::Exhausted { attempts: MAX_ATTEMPTS });
        }
    }

    let to_vec = |v: &[u32]| v.iter().map(|&x| GroupVector::from_raw(k, x)).collect::<Vec<_>>();
    let pairing = Pairing { k, a: to_vec(&board.a), b: to_vec(&board.b) };
    debug_assert!(verify_pairing(s, &pairing));
    if !verify_pairing(s, &pairing) {
        unreachable!("pairing construction produced an invalid pairing");
    }
    Ok(pairing)
}

/// Translates both permutations by `c = a_1 + target`, so the new first
/// entry of `a` is `target`. Differences are unchanged.
pub fn anchor_pairing(p: &Pairing, target: GroupVector) -> Pairing {
    let c = p.a[0].xor(target);
    Pairing {
        k: p.k,
        a: p.a.iter().map(|x| x.xor(c)).collect(),
        b: p.b.iter().map(|x| x.xor(c)).collect(),
    }
}

fn is_permutation(k: u8, v: &[GroupVector]) -> bool {
    let n = 1usize << k;
    if v.len() != n {
        return false;
    }
    let mut seen = vec![false; n];
    for x in v {
        if x.k() != k || std::mem::replace(&mut seen[x.bits() as usize], true) {
            return false;
        }
    }
    true
}

/// True iff `a` and `b` are permutations of F_2^k and `s_i = a_i + b_i`.
pub fn verify_pairing(s: &[GroupVector], p: &Pairing) -> bool {
    s.len() == p.a.len()
        && is_permutation(p.k, &p.a)
        && is_permutation(p.k, &p.b)
        && s.iter().zip(p.a.iter().zip(&p.b)).all(|(si, (x, y))| si.k() == p.k && si.bits() == x.bits() ^ y.bits())
}

/// Exhaustive search returning the lexicographically first pairing in `a`,
/// or `None` if there is none. Limited to `k <= 3`.
pub fn pairing_oracle(s: &[GroupVector]) -> Result<Option<Pairing>, HallError> {
    let k = dimension_of(s)?;
    if k > 3 {
        return Err(HallError::OracleTooLarge { k });
    }
    let n = s.len();
    let mut a = Vec::with_capacity(n);
    let mut used_a = vec![false; n];
    let mut used_b = vec![false; n];

    fn go(i: usize, s: &[GroupVector], a: &mut Vec<u32>, used_a: &mut [bool], used_b: &mut [bool]) -> bool {
        if i == s.len() {
            return true;
        }
        for x in 0..s.len() as u32 {
            let y = x ^ s[i].bits();
            if used_a[x as usize] || used_b[y as usize] {
                continue;
            }
            used_a[x as usize] = true;
            used_b[y as usize] = true;
            a.push(x);
            if go(i + 1, s, a, used_a, used_b) {
                return true;
            }
            a.pop();
            used_a[x as usize] = false;
            used_b[y as usize] = false;
        }
        false
    }

    if !go(0, s, &mut a, &mut used_a, &mut used_b) {
        return Ok(None);
    }
    let av: Vec<GroupVector> = a.iter().map(|&x| GroupVector::from_raw(k, x)).collect();
    let bv = av.iter().zip(s).map(|(x, si)| x.xor(*si)).collect();
    Ok(Some(Pairing { k, a: av, b: bv }))
}
