//! Point sets over the indices `0..P` of a finite space.
//!
//! [`PointSet`] stores ball memberships: symbolic cylinders are contiguous
//! index ranges, everything else is a sorted index list. [`TargetSet`] is a
//! dense bitset used for the sets `Z` being covered.

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

/// Sorted set of point indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PointSet {
    /// Half-open index range `start..end`.
    Range { start: u32, end: u32 },
    /// Strictly increasing list of indices.
    List(Vec<u32>),
}

impl PointSet {
    pub fn range(start: usize, end: usize) -> Self {
        PointSet::Range {
            start: start as u32,
            end: end.max(start) as u32,
        }
    }

    /// Builds a set from indices in any order; duplicates are removed.
    pub fn from_unsorted(mut idx: Vec<u32>) -> Self {
        idx.sort_unstable();
        idx.dedup();
        PointSet::List(idx)
    }

    /// Builds a set from an already strictly increasing list.
    pub fn from_sorted(idx: Vec<u32>) -> Self {
        debug_assert!(idx.windows(2).all(|w| w[0] < w[1]));
        PointSet::List(idx)
    }

    pub fn len(&self) -> usize {
        match self {
            PointSet::Range { start, end } => (end - start) as usize,
            PointSet::List(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn contains(&self, x: usize) -> bool {
        match self {
            PointSet::Range { start, end } => (*start as usize) <= x && x < (*end as usize),
            PointSet::List(v) => v.binary_search(&(x as u32)).is_ok(),
        }
    }

    pub fn iter(&self) -> PointIter<'_> {
        match self {
            PointSet::Range { start, end } => PointIter::Range(*start..*end),
            PointSet::List(v) => PointIter::List(v.iter()),
        }
    }

    pub fn to_vec(&self) -> Vec<u32> {
        self.iter().map(|x| x as u32).collect()
    }

    pub fn intersects(&self, other: &PointSet) -> bool {
        match (self, other) {
            (PointSet::Range { start: a, end: b }, PointSet::Range { start: c, end: d }) => {
                a.max(c) < b.min(d)
            }
            (PointSet::Range { .. }, PointSet::List(v)) | (PointSet::List(v), PointSet::Range { .. }) => {
                let r = if let PointSet::Range { .. } = self { self } else { other };
                v.iter().any(|&x| r.contains(x as usize))
            }
            (PointSet::List(a), PointSet::List(b)) => {
                let (mut i, mut j) = (0, 0);
                while i < a.len() && j < b.len() {
                    match a[i].cmp(&b[j]) {
                        std::cmp::Ordering::Less => i += 1,
                        std::cmp::Ordering::Greater => j += 1,
                        std::cmp::Ordering::Equal => return true,
                    }
                }
                false
            }
        }
    }

    pub fn is_subset(&self, other: &PointSet) -> bool {
        if self.len() > other.len() {
            return false;
        }
        match (self, other) {
            (PointSet::Range { start: a, end: b }, PointSet::Range { start: c, end: d }) => {
                a >= b || (c <= a && b <= d)
            }
            _ => self.iter().all(|x| other.contains(x)),
        }
    }

    pub fn to_target(&self, universe: usize) -> TargetSet {
        TargetSet::from_indices(universe, self.iter())
    }
}

pub enum PointIter<'a> {
    Range(std::ops::Range<u32>),
    List(std::slice::Iter<'a, u32>),
}

impl Iterator for PointIter<'_> {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        match self {
            PointIter::Range(r) => r.next().map(|x| x as usize),
            PointIter::List(it) => it.next().map(|&x| x as usize),
        }
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        match self {
            PointIter::Range(r) => r.size_hint(),
            PointIter::List(it) => it.size_hint(),
        }
    }
}

/// Membership bitset over the points of a space: the sets `Z` and `chi_Z`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TargetSet {
    bits: FixedBitSet,
}

impl TargetSet {
    pub fn empty(universe: usize) -> Self {
        TargetSet {
            bits: FixedBitSet::with_capacity(universe),
        }
    }

    pub fn full(universe: usize) -> Self {
        let mut bits = FixedBitSet::with_capacity(universe);
        bits.insert_range(..);
        TargetSet { bits }
    }

    pub fn from_indices(universe: usize, idx: impl IntoIterator<Item = usize>) -> Self {
        let mut bits = FixedBitSet::with_capacity(universe);
        for x in idx {
            bits.insert(x);
        }
        TargetSet { bits }
    }

    pub fn universe(&self) -> usize {
        self.bits.len()
    }

    pub fn insert(&mut self, x: usize) {
        self.bits.insert(x);
    }

    pub fn contains(&self, x: usize) -> bool {
        self.bits.contains(x)
    }

    pub fn count(&self) -> usize {
        self.bits.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_clear()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits.ones()
    }

    pub fn union(&self, other: &TargetSet) -> TargetSet {
        let mut bits = self.bits.clone();
        bits.union_with(&other.bits);
        TargetSet { bits }
    }

    pub fn is_subset(&self, other: &TargetSet) -> bool {
        self.bits.is_subset(&other.bits)
    }

    /// Number of members of `set` that lie in this target.
    pub fn count_in(&self, set: &PointSet) -> usize {
        set.iter().filter(|&x| self.contains(x)).count()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn range_and_list_agree() {
        let r = PointSet::range(3, 7);
        let l = PointSet::from_unsorted(vec![6, 3, 5, 4, 4]);
        assert_eq!(r.to_vec(), l.to_vec());
        assert!(r.is_subset(&l) && l.is_subset(&r));
        assert!(r.intersects(&PointSet::from_sorted(vec![0, 6])));
        assert!(!r.intersects(&PointSet::range(7, 9)));
        assert!(!l.intersects(&PointSet::from_sorted(vec![0, 1, 2, 7])));
        assert!(PointSet::range(4, 5).is_subset(&l));
        assert!(!PointSet::range(2, 5).is_subset(&r));
    }

    #[test]
    fn target_set_basics() {
        let mut z = TargetSet::empty(10);
        assert!(z.is_empty());
        z.insert(2);
        z.insert(9);
        assert_eq!(z.count(), 2);
        assert_eq!(z.iter().collect::<Vec<_>>(), vec![2, 9]);
        assert_eq!(z.count_in(&PointSet::range(0, 5)), 1);
        assert!(z.is_subset(&TargetSet::full(10)));
        assert_eq!(TargetSet::full(10).count(), 10);
    }
}
