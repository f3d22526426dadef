//! The bounds table: a sharded concurrent map from canonical sets to
//! intervals, sparse over the initial state.

use std::hash::BuildHasher;

use parking_lot::{Condvar, Mutex, RwLock};
use rustc_hash::{FxBuildHasher, FxHashMap, FxHashSet};

use crate::error::{Error, Result};
use crate::seqset::BoolSeqSet;

/// Known upper bounds `ŝ(n)` for `n = 0..=12`.
pub const UPPER_BOUNDS: [u32; 13] = [0, 0, 1, 3, 5, 9, 12, 16, 19, 25, 29, 35, 39];

/// Largest channel count covered by [`UPPER_BOUNDS`].
pub const MAX_CHANNELS: usize = 12;

/// An interval `[lo, hi]` containing `s(X)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct BoundInterval {
    pub lo: u32,
    pub hi: u32,
}

impl BoundInterval {
    pub fn new(lo: u32, hi: u32) -> Self {
        debug_assert!(lo <= hi);
        BoundInterval { lo, hi }
    }

    pub fn exact(v: u32) -> Self {
        BoundInterval { lo: v, hi: v }
    }

    pub fn is_fathomed(&self) -> bool {
        self.lo == self.hi
    }

    pub fn intersect(&self, other: BoundInterval) -> Option<BoundInterval> {
        let lo = self.lo.max(other.lo);
        let hi = self.hi.min(other.hi);
        (lo <= hi).then_some(BoundInterval { lo, hi })
    }
}

const SHARDS: usize = 64;

/// A concurrent hash map split into independently locked shards.
pub(crate) struct ShardedMap<V> {
    shards: Vec<RwLock<FxHashMap<BoolSeqSet, V>>>,
}

impl<V: Copy> ShardedMap<V> {
    fn new() -> Self {
        ShardedMap {
            shards: (0..SHARDS)
                .map(|_| RwLock::new(FxHashMap::default()))
                .collect(),
        }
    }

    fn shard(&self, key: &BoolSeqSet) -> &RwLock<FxHashMap<BoolSeqSet, V>> {
        let h = FxBuildHasher.hash_one(key);
        &self.shards[(h >> 32) as usize % SHARDS]
    }

    pub(crate) fn get(&self, key: &BoolSeqSet) -> Option<V> {
        self.shard(key).read().get(key).copied()
    }

    pub(crate) fn insert(&self, key: BoolSeqSet, value: V) {
        self.shard(&key).write().insert(key, value);
    }

    fn len(&self) -> usize {
        self.shards.iter().map(|s| s.read().len()).sum()
    }

    fn snapshot(&self) -> Vec<(BoolSeqSet, V)> {
        let mut out = Vec::with_capacity(self.len());
        for shard in &self.shards {
            out.extend(shard.read().iter().map(|(k, v)| (k.clone(), *v)));
        }
        out
    }
}

/// Bounds for canonical sets; entries equal to the initial state are not stored.
pub struct BoundsTable {
    upper: Vec<u32>,
    entries: ShardedMap<BoundInterval>,
    active: Mutex<FxHashSet<BoolSeqSet>>,
    released: Condvar,
}

/// Exclusive right to improve one entry; released on drop.
pub struct Session<'a> {
    table: &'a BoundsTable,
    key: BoolSeqSet,
}

impl Drop for Session<'_> {
    fn drop(&mut self) {
        let mut active = self.table.active.lock();
        active.remove(&self.key);
        self.table.released.notify_all();
    }
}

impl BoundsTable {
    /// A table using `upper[w]` as the initial upper bound for width `w`.
    pub fn new(upper: Vec<u32>) -> Self {
        BoundsTable {
            upper,
            entries: ShardedMap::new(),
            active: Mutex::new(FxHashSet::default()),
            released: Condvar::new(),
        }
    }

    pub fn with_known_upper_bounds() -> Self {
        Self::new(UPPER_BOUNDS.to_vec())
    }

    pub fn upper_bounds(&self) -> &[u32] {
        &self.upper
    }

    /// The initial interval for a well-behaved set.
    pub fn initial(&self, x: &BoolSeqSet) -> BoundInterval {
        if x.is_trivially_sortable() {
            BoundInterval::exact(0)
        } else {
            BoundInterval::new(1, self.upper[x.width()])
        }
    }

    pub fn get(&self, x: &BoolSeqSet) -> BoundInterval {
        self.entries.get(x).unwrap_or_else(|| self.initial(x))
    }

    /// Narrows the entry for `x` to its intersection with `bound`.
    pub fn narrow(&self, x: &BoolSeqSet, bound: BoundInterval) -> Result<BoundInterval> {
        let initial = self.initial(x);
        let shard = self.entries.shard(x);
        let mut map = shard.write();
        let current = map.get(x).copied().unwrap_or(initial);
        let next = current.intersect(bound).ok_or_else(|| {
            Error::Internal(format!("empty interval for {x:?}: {current:?} ∩ {bound:?}"))
        })?;
        if next != current {
            map.insert(x.clone(), next);
        }
        Ok(next)
    }

    /// Blocks until no other session holds `x`, then claims it.
    pub fn session(&self, x: &BoolSeqSet) -> Session<'_> {
        let mut active = self.active.lock();
        while active.contains(x) {
            self.released.wait(&mut active);
        }
        active.insert(x.clone());
        Session {
            table: self,
            key: x.clone(),
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// All stored entries, sorted by width then bitmap.
    pub fn entries(&self) -> Vec<(BoolSeqSet, BoundInterval)> {
        let mut all = self.entries.snapshot();
        all.sort_unstable_by(|a, b| a.0.cmp(&b.0));
        all
    }
}

pub(crate) fn new_cache<V: Copy>() -> ShardedMap<V> {
    ShardedMap::new()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::atomic::{AtomicUsize, Ordering};
    use std::sync::Arc;

    #[test]
    fn initial_state() {
        let t = BoundsTable::with_known_upper_bounds();
        assert_eq!(
            t.get(&BoolSeqSet::full(5).unwrap()),
            BoundInterval::new(1, 9)
        );
        assert_eq!(
            t.get(&BoolSeqSet::full(2).unwrap()),
            BoundInterval::exact(1)
        );
        assert_eq!(
            t.get(&BoolSeqSet::sorted(4).unwrap()),
            BoundInterval::exact(0)
        );
        assert!(t.is_empty());
    }

    #[test]
    fn narrowing_is_monotone_and_sparse() {
        let t = BoundsTable::with_known_upper_bounds();
        let x = BoolSeqSet::full(4).unwrap();
        assert_eq!(
            t.narrow(&x, BoundInterval::new(0, 100)).unwrap(),
            BoundInterval::new(1, 5)
        );
        assert!(t.is_empty());
        assert_eq!(
            t.narrow(&x, BoundInterval::new(3, 100)).unwrap(),
            BoundInterval::new(3, 5)
        );
        assert_eq!(
            t.narrow(&x, BoundInterval::new(0, 5)).unwrap(),
            BoundInterval::new(3, 5)
        );
        assert!(matches!(
            t.narrow(&x, BoundInterval::new(6, 7)),
            Err(Error::Internal(_))
        ));
        assert_eq!(t.len(), 1);
    }

    #[test]
    fn sessions_are_exclusive() {
        let t = Arc::new(BoundsTable::with_known_upper_bounds());
        let inside = Arc::new(AtomicUsize::new(0));
        let x = BoolSeqSet::full(3).unwrap();
        std::thread::scope(|s| {
            for _ in 0..4 {
                let (t, inside, x) = (t.clone(), inside.clone(), x.clone());
                s.spawn(move || {
                    for _ in 0..200 {
                        let _g = t.session(&x);
                        assert_eq!(inside.fetch_add(1, Ordering::SeqCst), 0);
                        std::thread::yield_now();
                        inside.fetch_sub(1, Ordering::SeqCst);
                    }
                });
            }
        });
    }

    #[test]
    fn concurrent_narrowing_keeps_the_tightest_bound() {
        let t = BoundsTable::with_known_upper_bounds();
        let x = BoolSeqSet::full(8).unwrap();
        std::thread::scope(|s| {
            for k in 1..=8u32 {
                let (t, x) = (&t, &x);
                s.spawn(move || {
                    t.narrow(x, BoundInterval::new(k, 19)).unwrap();
                });
            }
        });
        assert_eq!(t.get(&x), BoundInterval::new(8, 19));
    }
}
