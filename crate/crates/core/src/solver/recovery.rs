//! Enumeration of inclusion-minimal recovery sets.
//!
//! A set of nonzero columns summing to `r` is inclusion-minimal exactly when
//! it is linearly independent: a repeated vector, or any dependent subset,
//! could be dropped without changing the sum. Minimal sets therefore consist
//! of distinct vectors and have size at most `k`.

/// Incremental GF(2) span test.
#[derive(Clone, Copy, Default)]
struct XorBasis {
    rows: [u32; 16],
}

impl XorBasis {
    /// Adds `v` if it is outside the current span.
    fn try_insert(&mut self, mut v: u32) -> bool {
        for bit in (0..16).rev() {
            if v >> bit & 1 == 0 {
                continue;
            }
            if self.rows[bit] == 0 {
                self.rows[bit] = v;
                return true;
            }
            v ^= self.rows[bit];
        }
        false
    }
}

/// All independent subsets of `available` (distinct nonzero values, sorted
/// ascending) with at most `max_size` elements and XOR equal to `target`.
/// Each set is sorted; the list is ordered by size, then lexicographically.
pub(crate) fn minimal_sets(target: u32, available: &[u32], max_size: usize) -> Vec<Vec<u32>> {
    fn walk(
        target: u32,
        available: &[u32],
        from: usize,
        max_size: usize,
        basis: XorBasis,
        acc: u32,
        chosen: &mut Vec<u32>,
        out: &mut Vec<Vec<u32>>,
    ) {
        if !chosen.is_empty() && acc == target {
            out.push(chosen.clone());
            // any superset would contain this set, so it is not minimal
            return;
        }
        if chosen.len() == max_size {
            return;
        }
        for i in from..available.len() {
            let v = available[i];
            let mut next = basis;
            if !next.try_insert(v) {
                continue;
            }
            chosen.push(v);
            walk(target, available, i + 1, max_size, next, acc ^ v, chosen, out);
            chosen.pop();
        }
    }

    debug_assert!(target != 0);
    let mut out = Vec::new();
    walk(target, available, 0, max_size, XorBasis::default(), 0, &mut Vec::new(), &mut out);
    out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    out
}
