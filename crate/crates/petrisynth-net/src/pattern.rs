//! Finite descriptions of (possibly infinite) marking sets.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::net::{Marking, PlaceId};

/// Inclusive token range; `hi == None` means unbounded.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Range {
    pub lo: u32,
    pub hi: Option<u32>,
}

impl Range {
    pub fn new(lo: u32, hi: Option<u32>) -> Self {
        Self { lo, hi }
    }

    pub fn contains(&self, n: u64) -> bool {
        n >= u64::from(self.lo) && self.hi.is_none_or(|h| n <= u64::from(h))
    }
}

/// A marking pattern: exact counts, per-place ranges and range constraints on
/// sums of places. With `others_zero`, every place not mentioned anywhere in
/// the pattern must be empty.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MarkingPattern {
    pub exact: BTreeMap<PlaceId, u32>,
    pub ranges: BTreeMap<PlaceId, Range>,
    pub sums: Vec<(BTreeSet<PlaceId>, Range)>,
    pub others_zero: bool,
}

impl MarkingPattern {
    /// The pattern matching exactly `m` and nothing else.
    pub fn exactly(m: &Marking) -> Self {
        Self { exact: m.iter().map(|(&p, &c)| (p, c)).collect(), others_zero: true, ..Self::default() }
    }

    /// The pattern matching every marking that covers `m`.
    pub fn at_least(m: &Marking) -> Self {
        Self { ranges: m.iter().map(|(&p, &c)| (p, Range::new(c, None))).collect(), ..Self::default() }
    }

    pub fn mentioned(&self) -> BTreeSet<PlaceId> {
        let mut s: BTreeSet<PlaceId> = self.exact.keys().copied().collect();
        s.extend(self.ranges.keys().copied());
        for (ps, _) in &self.sums {
            s.extend(ps.iter().copied());
        }
        s
    }

    pub fn matches(&self, m: &Marking) -> bool {
        if !self.exact.iter().all(|(p, &c)| m.count(p) == c) {
            return false;
        }
        if !self.ranges.iter().all(|(p, r)| r.contains(u64::from(m.count(p)))) {
            return false;
        }
        let sums_ok = self
            .sums
            .iter()
            .all(|(ps, r)| r.contains(ps.iter().map(|p| u64::from(m.count(p))).sum()));
        if !sums_ok {
            return false;
        }
        if self.others_zero {
            let mentioned = self.mentioned();
            if m.support().any(|p| !mentioned.contains(p)) {
                return false;
            }
        }
        true
    }
}
