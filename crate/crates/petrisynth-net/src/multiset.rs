//! Finite multisets with a canonical (zero-free, ordered) representation.
//!
//! Every marking, preset and postset in the workspace is a [`Multiset`].
//! The backing map never stores a zero count, so structural equality and
//! hashing coincide with multiset equality.

use std::collections::btree_map;
use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

/// A finite multiset over an ordered key type.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(bound(serialize = "K: Ord + Serialize", deserialize = "K: Ord + Deserialize<'de>"))]
pub struct Multiset<K: Ord> {
    counts: BTreeMap<K, u32>,
}

impl<K: Ord> Default for Multiset<K> {
    fn default() -> Self {
        Self { counts: BTreeMap::new() }
    }
}

impl<K: Ord + fmt::Debug> fmt::Debug for Multiset<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.counts.iter()).finish()
    }
}

impl<K: Ord + Clone> Multiset<K> {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a multiset from `(element, count)` pairs; repeated elements accumulate.
    pub fn from_counts<I: IntoIterator<Item = (K, u32)>>(pairs: I) -> Self {
        let mut m = Self::new();
        for (k, c) in pairs {
            m.insert_n(k, c);
        }
        m
    }

    pub fn singleton(k: K) -> Self {
        Self::from_counts([(k, 1)])
    }

    pub fn count(&self, k: &K) -> u32 {
        self.counts.get(k).copied().unwrap_or(0)
    }

    pub fn insert_n(&mut self, k: K, n: u32) {
        if n == 0 {
            return;
        }
        *self.counts.entry(k).or_insert(0) += n;
    }

    pub fn insert(&mut self, k: K) {
        self.insert_n(k, 1);
    }

    /// Removes up to `n` copies of `k`, returning how many were removed.
    pub fn remove_n(&mut self, k: &K, n: u32) -> u32 {
        match self.counts.get_mut(k) {
            None => 0,
            Some(c) if *c <= n => {
                let removed = *c;
                self.counts.remove(k);
                removed
            }
            Some(c) => {
                *c -= n;
                n
            }
        }
    }

    pub fn set(&mut self, k: K, n: u32) {
        if n == 0 {
            self.counts.remove(&k);
        } else {
            self.counts.insert(k, n);
        }
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    /// Total number of elements counted with multiplicity.
    pub fn total(&self) -> u64 {
        self.counts.values().map(|&c| u64::from(c)).sum()
    }

    /// Distinct elements in ascending order.
    pub fn support(&self) -> impl Iterator<Item = &K> + '_ {
        self.counts.keys()
    }

    pub fn iter(&self) -> btree_map::Iter<'_, K, u32> {
        self.counts.iter()
    }

    /// Elements with multiplicity, ascending.
    pub fn elements(&self) -> impl Iterator<Item = &K> + '_ {
        self.counts
            .iter()
            .flat_map(|(k, &c)| std::iter::repeat_n(k, c as usize))
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (k, &c) in other.iter() {
            out.insert_n(k.clone(), c);
        }
        out
    }

    /// Saturating difference: counts never drop below zero.
    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (k, &c) in other.iter() {
            out.remove_n(k, c);
        }
        out
    }

    /// Pointwise maximum.
    pub fn union(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (k, &c) in other.iter() {
            if c > out.count(k) {
                out.set(k.clone(), c);
            }
        }
        out
    }

    /// Pointwise minimum.
    pub fn intersection(&self, other: &Self) -> Self {
        Self::from_counts(
            self.iter()
                .map(|(k, &c)| (k.clone(), c.min(other.count(k))))
                .filter(|&(_, c)| c > 0),
        )
    }

    /// `self ⊆ other` as multisets.
    pub fn is_subset(&self, other: &Self) -> bool {
        self.iter().all(|(k, &c)| other.count(k) >= c)
    }

    pub fn is_strict_subset(&self, other: &Self) -> bool {
        self.is_subset(other) && self != other
    }

    pub fn map_keys<J: Ord + Clone, F: Fn(&K) -> J>(&self, f: F) -> Multiset<J> {
        Multiset::from_counts(self.iter().map(|(k, &c)| (f(k), c)))
    }
}

impl<K: Ord + Clone> FromIterator<K> for Multiset<K> {
    fn from_iter<I: IntoIterator<Item = K>>(iter: I) -> Self {
        Self::from_counts(iter.into_iter().map(|k| (k, 1)))
    }
}

impl<'a, K: Ord> IntoIterator for &'a Multiset<K> {
    type Item = (&'a K, &'a u32);
    type IntoIter = btree_map::Iter<'a, K, u32>;

    fn into_iter(self) -> Self::IntoIter {
        self.counts.iter()
    }
}
