//! Compact item sets over a ground set of at most 64 items.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// A subset of `{0, .., 63}` stored as a bitmask.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct ItemSet(u64);

impl ItemSet {
    pub const EMPTY: ItemSet = ItemSet(0);
    /// Largest ground set an `ItemSet` can index.
    pub const CAPACITY: usize = 64;

    pub const fn from_bits(bits: u64) -> Self {
        ItemSet(bits)
    }

    pub const fn bits(self) -> u64 {
        self.0
    }

    /// `{0, .., n-1}`.
    pub fn full(n: usize) -> Self {
        assert!(n <= Self::CAPACITY, "ground set of {n} items exceeds 64");
        if n == Self::CAPACITY {
            ItemSet(u64::MAX)
        } else {
            ItemSet((1u64 << n) - 1)
        }
    }

    pub fn singleton(item: usize) -> Self {
        assert!(item < Self::CAPACITY, "item {item} out of range");
        ItemSet(1u64 << item)
    }

    pub fn contains(self, item: usize) -> bool {
        item < Self::CAPACITY && self.0 & (1u64 << item) != 0
    }

    #[must_use]
    pub fn with(self, item: usize) -> Self {
        ItemSet(self.0 | Self::singleton(item).0)
    }

    #[must_use]
    pub fn without(self, item: usize) -> Self {
        ItemSet(self.0 & !Self::singleton(item).0)
    }

    pub fn insert(&mut self, item: usize) {
        *self = self.with(item);
    }

    #[must_use]
    pub fn union(self, other: Self) -> Self {
        ItemSet(self.0 | other.0)
    }

    #[must_use]
    pub fn intersection(self, other: Self) -> Self {
        ItemSet(self.0 & other.0)
    }

    #[must_use]
    pub fn difference(self, other: Self) -> Self {
        ItemSet(self.0 & !other.0)
    }

    pub fn is_subset(self, other: Self) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_disjoint(self, other: Self) -> bool {
        self.0 & other.0 == 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    /// Largest item index plus one, or 0 for the empty set.
    pub fn span(self) -> usize {
        64 - self.0.leading_zeros() as usize
    }

    /// Items in ascending order.
    pub fn iter(self) -> Items {
        Items(self.0)
    }

    /// All subsets of `self`, in ascending bitmask order, starting with the empty set.
    pub fn subsets(self) -> Subsets {
        Subsets {
            mask: self.0,
            next: Some(0),
        }
    }

    /// Comma separated item indices, e.g. `"0,2,3"`; the empty set is `""`.
    pub fn to_key(self) -> String {
        self.iter()
            .map(|i| i.to_string())
            .collect::<Vec<_>>()
            .join(",")
    }

    /// Inverse of [`ItemSet::to_key`]. Whitespace around indices is ignored.
    pub fn parse_key(key: &str) -> Result<Self, String> {
        let key = key.trim();
        if key.is_empty() {
            return Ok(ItemSet::EMPTY);
        }
        let mut set = ItemSet::EMPTY;
        for part in key.split(',') {
            let item: usize = part
                .trim()
                .parse()
                .map_err(|_| format!("invalid item index {part:?} in subset key {key:?}"))?;
            if item >= Self::CAPACITY {
                return Err(format!(
                    "item index {item} exceeds 63 in subset key {key:?}"
                ));
            }
            if set.contains(item) {
                return Err(format!("duplicate item {item} in subset key {key:?}"));
            }
            set.insert(item);
        }
        Ok(set)
    }
}

impl FromIterator<usize> for ItemSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        iter.into_iter().fold(ItemSet::EMPTY, ItemSet::with)
    }
}

impl<'a> FromIterator<&'a usize> for ItemSet {
    fn from_iter<I: IntoIterator<Item = &'a usize>>(iter: I) -> Self {
        iter.into_iter().copied().collect()
    }
}

impl IntoIterator for ItemSet {
    type Item = usize;
    type IntoIter = Items;

    fn into_iter(self) -> Items {
        self.iter()
    }
}

impl fmt::Debug for ItemSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl fmt::Display for ItemSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.to_key())
    }
}

impl Serialize for ItemSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_seq(self.iter())
    }
}

impl<'de> Deserialize<'de> for ItemSet {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let items = Vec::<usize>::deserialize(deserializer)?;
        if let Some(&bad) = items.iter().find(|&&i| i >= ItemSet::CAPACITY) {
            return Err(serde::de::Error::custom(format!(
                "item index {bad} exceeds 63"
            )));
        }
        Ok(items.into_iter().collect())
    }
}

pub struct Items(u64);

impl Iterator for Items {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let item = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(item)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = self.0.count_ones() as usize;
        (n, Some(n))
    }
}

impl ExactSizeIterator for Items {}

pub struct Subsets {
    mask: u64,
    next: Option<u64>,
}

impl Iterator for Subsets {
    type Item = ItemSet;

    fn next(&mut self) -> Option<ItemSet> {
        let current = self.next?;
        // next submask in ascending order; wraps to 0 after the full mask
        let following = (current | !self.mask).wrapping_add(1) & self.mask;
        self.next = (following != 0).then_some(following);
        Some(ItemSet(current))
    }
}
