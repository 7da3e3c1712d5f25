//! Subsets of a finite ground set, stored as bitmasks over index positions.
//!
//! Positions are zero-based; index `i` corresponds to bit `i`. Human-facing
//! labels (e.g. `"1"`, `"4"`, `"5"`) live with the model, not here.
//!
//! The total order on [`IndexSet`] is the one every enumeration in the crate
//! uses: ascending cardinality, then lexicographic order of the sorted member
//! lists. For `{0, 1, 2}` this gives `{0} {1} {2} {0,1} {0,2} {1,2} {0,1,2}`.

use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};

/// Largest ground set supported by the lattice routines.
pub const MAX_INDICES: usize = 20;

#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct IndexSet(u32);

impl IndexSet {
    pub const EMPTY: IndexSet = IndexSet(0);

    pub const fn from_bits(bits: u32) -> Self {
        IndexSet(bits)
    }

    pub const fn bits(self) -> u32 {
        self.0
    }

    /// `{0, 1, ..., n-1}`.
    pub fn full(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyGroundSet);
        }
        if n > MAX_INDICES {
            return Err(Error::TooManyIndices {
                size: n,
                limit: MAX_INDICES,
            });
        }
        Ok(IndexSet(((1u64 << n) - 1) as u32))
    }

    pub fn singleton(i: usize) -> Self {
        assert!(i < MAX_INDICES, "index {i} out of range");
        IndexSet(1 << i)
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(indices: I) -> Result<Self> {
        let mut bits = 0u32;
        for i in indices {
            if i >= MAX_INDICES {
                return Err(Error::IndexOutOfRange {
                    index: i,
                    dim: MAX_INDICES,
                });
            }
            bits |= 1 << i;
        }
        Ok(IndexSet(bits))
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, i: usize) -> bool {
        i < 32 && self.0 & (1 << i) != 0
    }

    pub fn union(self, other: Self) -> Self {
        IndexSet(self.0 | other.0)
    }

    pub fn intersection(self, other: Self) -> Self {
        IndexSet(self.0 & other.0)
    }

    pub fn difference(self, other: Self) -> Self {
        IndexSet(self.0 & !other.0)
    }

    pub fn is_subset_of(self, other: Self) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_disjoint(self, other: Self) -> bool {
        self.0 & other.0 == 0
    }

    pub fn intersects(self, other: Self) -> bool {
        !self.is_disjoint(other)
    }

    /// Member positions in ascending order.
    pub fn iter(self) -> Members {
        Members(self.0)
    }

    pub fn to_vec(self) -> Vec<usize> {
        self.iter().collect()
    }

    /// Smallest member, if any.
    pub fn first(self) -> Option<usize> {
        (self.0 != 0).then(|| self.0.trailing_zeros() as usize)
    }

    pub(crate) fn require_non_empty(self) -> Result<Self> {
        if self.is_empty() {
            Err(Error::EmptySet)
        } else {
            Ok(self)
        }
    }

    pub(crate) fn require_subset_of(self, outer: Self) -> Result<Self> {
        if self.is_subset_of(outer) {
            Ok(self)
        } else {
            Err(Error::NotSubset { inner: self, outer })
        }
    }
}

impl Ord for IndexSet {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len().cmp(&other.len()).then_with(|| {
            let diff = self.0 ^ other.0;
            if diff == 0 {
                Ordering::Equal
            } else if self.0 & (1 << diff.trailing_zeros()) != 0 {
                // the set holding the smallest differing element sorts first
                Ordering::Less
            } else {
                Ordering::Greater
            }
        })
    }
}

impl PartialOrd for IndexSet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl FromIterator<usize> for IndexSet {
    fn from_iter<T: IntoIterator<Item = usize>>(iter: T) -> Self {
        IndexSet::from_indices(iter).expect("index out of range")
    }
}

#[derive(Clone, Debug)]
pub struct Members(u32);

impl Iterator for Members {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let i = self.0.trailing_zeros();
        self.0 &= self.0 - 1;
        Some(i as usize)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = self.0.count_ones() as usize;
        (n, Some(n))
    }
}

impl ExactSizeIterator for Members {}

/// Every non-empty subset of `ground`, ascending by cardinality then
/// lexicographically.
pub fn enumerate_subsets(ground: IndexSet) -> Result<Vec<IndexSet>> {
    if ground.is_empty() {
        return Err(Error::EmptyGroundSet);
    }
    let mut out: Vec<IndexSet> = submasks(ground).filter(|s| !s.is_empty()).collect();
    out.sort_unstable();
    Ok(out)
}

/// All subsets of `ground` including the empty set, in decreasing bitmask order.
pub fn submasks(ground: IndexSet) -> impl Iterator<Item = IndexSet> {
    let g = ground.0;
    let mut next = Some(g);
    std::iter::from_fn(move || {
        let cur = next?;
        next = if cur == 0 { None } else { Some((cur - 1) & g) };
        Some(IndexSet(cur))
    })
}

/// Non-empty subsets of `{0..n-1}` in the documented order.
pub fn subsets_of_dim(n: usize) -> Result<Vec<IndexSet>> {
    enumerate_subsets(IndexSet::full(n)?)
}

/// `I ∖ (A ∪ B)` after checking that `A` and `B` are disjoint, non-empty
/// subsets of `ground`.
pub fn pair_complement(ground: IndexSet, a: IndexSet, b: IndexSet) -> Result<IndexSet> {
    a.require_non_empty()?;
    b.require_non_empty()?;
    a.require_subset_of(ground)?;
    b.require_subset_of(ground)?;
    if a.intersects(b) {
        return Err(Error::Overlap { a, b });
    }
    Ok(ground.difference(a.union(b)))
}

/// Ordered pairs `(A, B)` of disjoint non-empty subsets of `ground`.
pub fn disjoint_pairs(ground: IndexSet) -> Vec<(IndexSet, IndexSet)> {
    let mut out = Vec::new();
    let subsets = enumerate_subsets(ground).unwrap_or_default();
    for &a in &subsets {
        for &b in &subsets {
            if a.is_disjoint(b) {
                out.push((a, b));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(v: &[usize]) -> IndexSet {
        v.iter().copied().collect()
    }

    #[test]
    fn singleton_ground() {
        assert_eq!(enumerate_subsets(set(&[0])).unwrap(), vec![set(&[0])]);
    }

    #[test]
    fn pair_ground() {
        assert_eq!(
            enumerate_subsets(set(&[0, 1])).unwrap(),
            vec![set(&[0]), set(&[1]), set(&[0, 1])]
        );
    }

    #[test]
    fn four_element_ground_has_fifteen_subsets() {
        assert_eq!(subsets_of_dim(4).unwrap().len(), 15);
    }

    #[test]
    fn empty_ground_is_rejected() {
        assert_eq!(
            enumerate_subsets(IndexSet::EMPTY),
            Err(Error::EmptyGroundSet)
        );
    }

    #[test]
    fn order_is_cardinality_then_lexicographic() {
        let got = subsets_of_dim(4).unwrap();
        let mut expected: Vec<Vec<usize>> = got.iter().map(|s| s.to_vec()).collect();
        expected.sort_by(|a, b| a.len().cmp(&b.len()).then(a.cmp(b)));
        let got: Vec<Vec<usize>> = got.iter().map(|s| s.to_vec()).collect();
        assert_eq!(got, expected);
    }

    #[test]
    fn sparse_ground() {
        let g = set(&[1, 3]);
        assert_eq!(
            enumerate_subsets(g).unwrap(),
            vec![set(&[1]), set(&[3]), set(&[1, 3])]
        );
    }

    #[test]
    fn too_large_ground() {
        assert!(matches!(
            IndexSet::full(21),
            Err(Error::TooManyIndices { .. })
        ));
    }

    #[test]
    fn disjoint_pair_count() {
        // 3^n - 2^(n+1) + 1 ordered pairs of disjoint non-empty sets
        for n in 1..=5 {
            let expected = 3usize.pow(n as u32) + 1 - 2 * 2usize.pow(n as u32);
            assert_eq!(disjoint_pairs(IndexSet::full(n).unwrap()).len(), expected);
        }
    }
}
