//! Ground sets, subset bitmasks and integer vectors indexed by a ground set.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Sub};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default cap on the ground-set size. Most operations are exponential in `n`.
pub const DEFAULT_LIMIT_N: usize = 12;

/// Masks are `u32`, and several tables have `2^n` entries.
pub const HARD_LIMIT_N: usize = 20;

/// An ordered, duplicate-free list of element names.
///
/// The order fixed here drives every canonical iteration and tie-break in the crate.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GroundSet(Arc<[String]>);

impl GroundSet {
    pub fn new<S: Into<String>>(names: impl IntoIterator<Item = S>) -> Result<Self> {
        Self::with_limit(names, DEFAULT_LIMIT_N)
    }

    pub fn with_limit<S: Into<String>>(
        names: impl IntoIterator<Item = S>,
        limit: usize,
    ) -> Result<Self> {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        if names.is_empty() {
            return Err(Error::usage("ground set must contain at least one element"));
        }
        let limit = limit.min(HARD_LIMIT_N);
        if names.len() > limit {
            return Err(Error::usage(format!(
                "ground set has {} elements, limit is {}",
                names.len(),
                limit
            )));
        }
        for (i, name) in names.iter().enumerate() {
            if names[..i].contains(name) {
                return Err(Error::usage(format!("duplicate ground element {name:?}")));
            }
        }
        Ok(GroundSet(names.into()))
    }

    /// Ground set `e1, e2, ..., en`.
    pub fn numbered(n: usize) -> Result<Self> {
        Self::with_limit((1..=n).map(|i| format!("e{i}")), HARD_LIMIT_N)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.0
    }

    pub fn position(&self, name: &str) -> Option<usize> {
        self.0.iter().position(|n| n == name)
    }

    #[inline]
    pub fn full(&self) -> SubsetMask {
        SubsetMask::full(self.len())
    }

    /// Number of subsets, `2^n`.
    #[inline]
    pub fn subset_count(&self) -> usize {
        1usize << self.len()
    }

    /// The elements of `mask`, in ground order, as a new ground set.
    pub fn restrict(&self, mask: SubsetMask) -> Result<Self> {
        let names: Vec<String> = mask.iter().map(|i| self.0[i].clone()).collect();
        Self::with_limit(names, HARD_LIMIT_N)
    }

    pub fn mask_of<'a>(&self, names: impl IntoIterator<Item = &'a str>) -> Result<SubsetMask> {
        let mut m = SubsetMask::EMPTY;
        for name in names {
            let i = self
                .position(name)
                .ok_or_else(|| Error::usage(format!("unknown ground element {name:?}")))?;
            m = m.with(i);
        }
        Ok(m)
    }

    /// `{a,b}` style rendering.
    pub fn format_mask(&self, mask: SubsetMask) -> String {
        let inner: Vec<&str> = mask.iter().map(|i| self.0[i].as_str()).collect();
        format!("{{{}}}", inner.join(","))
    }

    pub fn check_mask(&self, mask: SubsetMask) -> Result<()> {
        if mask.0 >> self.len() != 0 {
            return Err(Error::usage(format!(
                "mask {:#b} out of range for a ground set of size {}",
                mask.0,
                self.len()
            )));
        }
        Ok(())
    }
}

impl fmt::Debug for GroundSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.0.iter()).finish()
    }
}

/// Subset of a ground set, as a bitmask over ground positions.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
pub struct SubsetMask(pub u32);

impl SubsetMask {
    pub const EMPTY: SubsetMask = SubsetMask(0);

    #[inline]
    pub fn full(n: usize) -> Self {
        SubsetMask(((1u64 << n) - 1) as u32)
    }

    #[inline]
    pub fn singleton(i: usize) -> Self {
        SubsetMask(1 << i)
    }

    #[inline]
    pub fn bits(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }

    #[inline]
    pub fn contains(self, i: usize) -> bool {
        self.0 >> i & 1 == 1
    }

    #[inline]
    pub fn with(self, i: usize) -> Self {
        SubsetMask(self.0 | 1 << i)
    }

    #[inline]
    pub fn without(self, i: usize) -> Self {
        SubsetMask(self.0 & !(1 << i))
    }

    #[inline]
    pub fn union(self, o: Self) -> Self {
        SubsetMask(self.0 | o.0)
    }

    #[inline]
    pub fn intersection(self, o: Self) -> Self {
        SubsetMask(self.0 & o.0)
    }

    #[inline]
    pub fn minus(self, o: Self) -> Self {
        SubsetMask(self.0 & !o.0)
    }

    /// Complement within a ground set of size `n`.
    #[inline]
    pub fn complement(self, n: usize) -> Self {
        SubsetMask(!self.0 & Self::full(n).0)
    }

    #[inline]
    pub fn is_subset_of(self, o: Self) -> bool {
        self.0 & !o.0 == 0
    }

    #[inline]
    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    #[inline]
    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    /// Positions of the members, increasing.
    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let i = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(i)
            }
        })
    }

    /// All subsets of `self`, in increasing bitmask order.
    pub fn submasks(self) -> impl Iterator<Item = SubsetMask> {
        let full = self.0;
        let mut next = Some(0u32);
        std::iter::from_fn(move || {
            let cur = next?;
            next = if cur == full {
                None
            } else {
                Some((cur.wrapping_sub(full)) & full)
            };
            Some(SubsetMask(cur))
        })
    }

    /// All subsets of a ground set of size `n`, in increasing bitmask order.
    pub fn all(n: usize) -> impl Iterator<Item = SubsetMask> {
        (0..1u32 << n).map(SubsetMask)
    }

    /// Packs the bits of `self` at `positions` into a dense mask (`positions[j]` -> bit `j`).
    pub fn gather(self, positions: &[usize]) -> SubsetMask {
        let mut out = 0;
        for (j, &p) in positions.iter().enumerate() {
            out |= (self.0 >> p & 1) << j;
        }
        SubsetMask(out)
    }

    /// Inverse of [`gather`](Self::gather).
    pub fn scatter(self, positions: &[usize]) -> SubsetMask {
        let mut out = 0;
        for (j, &p) in positions.iter().enumerate() {
            out |= (self.0 >> j & 1) << p;
        }
        SubsetMask(out)
    }
}

impl fmt::Debug for SubsetMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// Integer vector indexed by ground-set positions.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct IntVector(pub Vec<i64>);

impl IntVector {
    pub fn zeros(n: usize) -> Self {
        IntVector(vec![0; n])
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[i64] {
        &self.0
    }

    /// `x(U)`.
    pub fn sum_over(&self, mask: SubsetMask) -> i64 {
        mask.iter().map(|i| self.0[i]).sum()
    }

    pub fn total(&self) -> i64 {
        self.0.iter().sum()
    }

    /// `x(U)` for every `U`, indexed by bitmask.
    pub fn subset_sums(&self) -> Vec<i64> {
        let n = self.len();
        let mut sums = vec![0i64; 1 << n];
        for m in 1..sums.len() {
            let low = m.trailing_zeros() as usize;
            sums[m] = sums[m & (m - 1)] + self.0[low];
        }
        sums
    }

    pub fn scaled(&self, r: i64) -> Self {
        IntVector(self.0.iter().map(|v| v * r).collect())
    }

    /// Coordinates at `positions`, in that order.
    pub fn gather(&self, positions: &[usize]) -> Self {
        IntVector(positions.iter().map(|&p| self.0[p]).collect())
    }

    pub fn restrict(&self, mask: SubsetMask) -> Self {
        IntVector(mask.iter().map(|i| self.0[i]).collect())
    }
}

impl From<Vec<i64>> for IntVector {
    fn from(v: Vec<i64>) -> Self {
        IntVector(v)
    }
}

impl Index<usize> for IntVector {
    type Output = i64;
    fn index(&self, i: usize) -> &i64 {
        &self.0[i]
    }
}

impl IndexMut<usize> for IntVector {
    fn index_mut(&mut self, i: usize) -> &mut i64 {
        &mut self.0[i]
    }
}

impl Add for &IntVector {
    type Output = IntVector;
    fn add(self, o: &IntVector) -> IntVector {
        assert_eq!(self.len(), o.len());
        IntVector(self.0.iter().zip(&o.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &IntVector {
    type Output = IntVector;
    fn sub(self, o: &IntVector) -> IntVector {
        assert_eq!(self.len(), o.len());
        IntVector(self.0.iter().zip(&o.0).map(|(a, b)| a - b).collect())
    }
}

impl fmt::Debug for IntVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, ")")
    }
}
