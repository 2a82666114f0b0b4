//! Finite multisets with canonical (sorted) iteration order.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

/// A finite multiset. Absent elements have multiplicity zero; stored counts
/// are always positive, so structural equality is multiset equality and the
/// derived `Hash`/`Ord` are canonical.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Multiset<T: Ord>(BTreeMap<T, u32>);

impl<T: Ord> Default for Multiset<T> {
    fn default() -> Self {
        Multiset(BTreeMap::new())
    }
}

impl<T: Ord + Clone> Multiset<T> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn singleton(x: T) -> Self {
        let mut m = Self::new();
        m.insert(x, 1);
        m
    }

    pub fn count(&self, x: &T) -> u32 {
        self.0.get(x).copied().unwrap_or(0)
    }

    /// Adds `n` copies of `x`. Adding zero copies is a no-op.
    pub fn insert(&mut self, x: T, n: u32) {
        if n > 0 {
            *self.0.entry(x).or_insert(0) += n;
        }
    }

    /// Removes up to `n` copies of `x`, returning how many were removed.
    pub fn remove(&mut self, x: &T, n: u32) -> u32 {
        let Some(c) = self.0.get_mut(x) else {
            return 0;
        };
        let removed = n.min(*c);
        *c -= removed;
        if *c == 0 {
            self.0.remove(x);
        }
        removed
    }

    /// Total cardinality, counting multiplicities.
    pub fn len(&self) -> u32 {
        self.0.values().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Number of distinct elements.
    pub fn support_len(&self) -> usize {
        self.0.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&T, u32)> + '_ {
        self.0.iter().map(|(k, v)| (k, *v))
    }

    pub fn support(&self) -> impl Iterator<Item = &T> + '_ {
        self.0.keys()
    }

    pub fn contains(&self, x: &T) -> bool {
        self.0.contains_key(x)
    }

    /// Multiset inclusion: every element occurs in `other` at least as often.
    pub fn is_subset(&self, other: &Self) -> bool {
        self.0.iter().all(|(k, v)| other.count(k) >= *v)
    }

    pub fn sum(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (k, v) in other.iter() {
            out.insert(k.clone(), v);
        }
        out
    }

    /// `self - other`, or `None` when `other` is not included in `self`.
    pub fn checked_sub(&self, other: &Self) -> Option<Self> {
        if !other.is_subset(self) {
            return None;
        }
        let mut out = self.clone();
        for (k, v) in other.iter() {
            out.remove(k, v);
        }
        Some(out)
    }

    /// Image of the multiset under `f`, summing multiplicities.
    pub fn map<U: Ord + Clone>(&self, mut f: impl FnMut(&T) -> U) -> Multiset<U> {
        let mut out = Multiset::new();
        for (k, v) in self.iter() {
            out.insert(f(k), v);
        }
        out
    }

    /// Keeps only elements satisfying `keep`.
    pub fn filter(&self, mut keep: impl FnMut(&T) -> bool) -> Self {
        Multiset(
            self.0
                .iter()
                .filter(|(k, _)| keep(k))
                .map(|(k, v)| (k.clone(), *v))
                .collect(),
        )
    }

    pub fn max_count(&self) -> u32 {
        self.0.values().copied().max().unwrap_or(0)
    }

    /// Expands to a sorted vector with one element per copy.
    pub fn to_vec(&self) -> Vec<T> {
        let mut out = Vec::with_capacity(self.len() as usize);
        for (k, v) in self.iter() {
            out.extend(std::iter::repeat_n(k.clone(), v as usize));
        }
        out
    }
}

impl<T: Ord + Clone> FromIterator<T> for Multiset<T> {
    fn from_iter<I: IntoIterator<Item = T>>(iter: I) -> Self {
        let mut m = Multiset::new();
        for x in iter {
            m.insert(x, 1);
        }
        m
    }
}

impl<T: Ord + Clone> FromIterator<(T, u32)> for Multiset<T> {
    fn from_iter<I: IntoIterator<Item = (T, u32)>>(iter: I) -> Self {
        let mut m = Multiset::new();
        for (x, n) in iter {
            m.insert(x, n);
        }
        m
    }
}

impl<T: Ord + fmt::Debug> fmt::Debug for Multiset<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.0.iter()).finish()
    }
}
