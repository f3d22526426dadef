//! Successive approximation of `s(X)` over canonical well-behaved sets.
//!
//! Every improvement step strictly narrows the interval of the set it is
//! called on, recursing into successors (same width, smaller weight) or
//! pruned interiors (smaller width) as needed.

use std::sync::atomic::{AtomicU64, Ordering};

use rayon::prelude::*;
use rustc_hash::FxHashMap;

use crate::canon::canonicalize;
use crate::error::{Error, Result};
use crate::huffman::{ceil_log2, huffman_min};
use crate::seqset::BoolSeqSet;
use crate::table::{new_cache, BoundInterval, BoundsTable, ShardedMap, MAX_CHANNELS};

/// A subproblem: a canonical set, or a trivially sortable one left as is.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct Child {
    set: BoolSeqSet,
    trivial: bool,
}

#[derive(Debug, Default)]
pub struct SearchStats {
    pub improve_calls: AtomicU64,
    pub canonicalizations: AtomicU64,
}

pub struct Search {
    table: BoundsTable,
    /// Largest value the Huffman bound of a set can still reach.
    ceilings: ShardedMap<u32>,
    pool: Option<rayon::ThreadPool>,
    stats: SearchStats,
}

impl Default for Search {
    fn default() -> Self {
        Self::new()
    }
}

/// The step may stop: the lower bound rose or the value is known.
fn settled(start: BoundInterval, now: BoundInterval) -> bool {
    now != start && (now.is_fathomed() || now.lo > start.lo)
}

impl Search {
    pub fn new() -> Self {
        Self::with_table(BoundsTable::with_known_upper_bounds())
    }

    pub fn with_table(table: BoundsTable) -> Self {
        Search {
            table,
            ceilings: new_cache(),
            pool: None,
            stats: SearchStats::default(),
        }
    }

    /// Canonicalizes successor and pruned sets on `threads` workers.
    pub fn with_threads(mut self, threads: usize) -> Result<Self> {
        if threads == 0 {
            return Err(Error::InvalidArgument(
                "thread count must be positive".into(),
            ));
        }
        self.pool = if threads > 1 {
            Some(
                rayon::ThreadPoolBuilder::new()
                    .num_threads(threads)
                    .build()
                    .map_err(|e| Error::Internal(e.to_string()))?,
            )
        } else {
            None
        };
        Ok(self)
    }

    pub fn table(&self) -> &BoundsTable {
        &self.table
    }

    pub fn into_table(self) -> BoundsTable {
        self.table
    }

    pub fn stats(&self) -> &SearchStats {
        &self.stats
    }

    pub fn bound(&self, x: &BoolSeqSet) -> BoundInterval {
        self.table.get(x)
    }

    /// `s(n)`, leaving the final bounds in the table.
    pub fn min_size(&self, n: usize) -> Result<u32> {
        if n == 0 || n > MAX_CHANNELS || n >= self.table.upper_bounds().len() {
            return Err(Error::InvalidArgument(format!(
                "channel count {n} outside the supported range 1..={MAX_CHANNELS}"
            )));
        }
        self.size_of(&BoolSeqSet::full(n)?)
    }

    /// `s(X)` for a well-behaved set.
    pub fn size_of(&self, x: &BoolSeqSet) -> Result<u32> {
        let x = self.child(x.clone());
        if x.trivial {
            return Ok(0);
        }
        loop {
            let b = self.table.get(&x.set);
            if b.is_fathomed() {
                return Ok(b.lo);
            }
            self.improve(&x.set)?;
        }
    }

    /// Strictly narrows the interval of the canonical, non-fathomed set `x`.
    pub fn improve(&self, x: &BoolSeqSet) -> Result<()> {
        self.stats.improve_calls.fetch_add(1, Ordering::Relaxed);
        let start = self.table.get(x);
        if start.is_fathomed() {
            return Ok(());
        }
        if self.pruned_step(x, start)? || self.huffman_step(x, start)? {
            return Ok(());
        }
        self.successor_step(x, start)
    }

    fn child(&self, y: BoolSeqSet) -> Child {
        if y.is_trivially_sortable() {
            Child {
                set: y,
                trivial: true,
            }
        } else {
            self.stats.canonicalizations.fetch_add(1, Ordering::Relaxed);
            Child {
                set: canonicalize(&y).set,
                trivial: false,
            }
        }
    }

    fn children(&self, sets: Vec<BoolSeqSet>) -> Vec<Child> {
        let mut out: Vec<Child> = match &self.pool {
            Some(pool) => pool.install(|| sets.into_par_iter().map(|y| self.child(y)).collect()),
            None => sets.into_iter().map(|y| self.child(y)).collect(),
        };
        out.sort_unstable();
        out.dedup();
        out
    }

    fn child_bound(&self, c: &Child) -> BoundInterval {
        if c.trivial {
            BoundInterval::exact(0)
        } else {
            self.table.get(&c.set)
        }
    }

    /// With a single prunable channel, `s(X)` equals that of the pruned interior.
    fn pruned_step(&self, x: &BoolSeqSet, start: BoundInterval) -> Result<bool> {
        let negated = x.negate();
        let mut target = None;
        for z in [x, &negated] {
            let p = z.prunable_mask();
            if p.count_ones() == 1 {
                target = Some(z.pruned_interior_well_behaved(p.trailing_zeros() as usize)?);
                break;
            }
        }
        let Some(y) = target else {
            return Ok(false);
        };
        let y = self.child(y);
        loop {
            let now = self.table.narrow(x, self.child_bound(&y))?;
            if settled(start, now) {
                return Ok(true);
            }
            self.improve(&y.set)?;
        }
    }

    fn huffman_step(&self, x: &BoolSeqSet, start: BoundInterval) -> Result<bool> {
        if let Some(u) = self.ceilings.get(x) {
            if start.lo >= u {
                return Ok(false);
            }
        }
        let negated = x.negate();
        let mut groups = Vec::with_capacity(2);
        for z in [x, &negated] {
            let channels = z.prunable_channels();
            if channels.is_empty() {
                return Err(Error::Internal(format!(
                    "well-behaved set without prunable channels: {z:?}"
                )));
            }
            let pruned = channels
                .iter()
                .map(|&i| z.pruned_interior_well_behaved(i))
                .collect::<Result<Vec<_>>>()?;
            // Duplicates matter for the Huffman bound, so keep one entry per channel.
            let group: Vec<Child> = match &self.pool {
                Some(pool) => {
                    pool.install(|| pruned.into_par_iter().map(|y| self.child(y)).collect())
                }
                None => pruned.into_iter().map(|y| self.child(y)).collect(),
            };
            groups.push(group);
        }
        loop {
            let mut lower = 0;
            let mut ceiling = 0;
            for group in &groups {
                let bounds: Vec<BoundInterval> =
                    group.iter().map(|c| self.child_bound(c)).collect();
                let los: Vec<u32> = bounds.iter().map(|b| b.lo).collect();
                let his: Vec<u32> = bounds.iter().map(|b| b.hi).collect();
                lower = lower.max(huffman_min(&los)?);
                ceiling = ceiling.max(huffman_min(&his)?);
            }
            let now = self.table.narrow(x, BoundInterval::new(lower, u32::MAX))?;
            self.ceilings.insert(x.clone(), ceiling);
            if settled(start, now) {
                return Ok(true);
            }
            if now.lo >= ceiling {
                return Ok(false);
            }
            let next = groups
                .iter()
                .flatten()
                .filter_map(|c| {
                    let b = self.child_bound(c);
                    (!b.is_fathomed()).then_some(((b.lo, c.set.len(), b.hi), c))
                })
                .min_by(|a, b| a.0.cmp(&b.0))
                .map(|(_, c)| c.set.clone())
                .ok_or_else(|| {
                    Error::Internal("Huffman bound below its ceiling with all parts known".into())
                })?;
            self.improve(&next)?;
        }
    }

    fn successor_step(&self, x: &BoolSeqSet, start: BoundInterval) -> Result<()> {
        let succ = self.children(x.successors().into_iter().map(|(_, y)| y).collect());
        if succ.is_empty() {
            return Err(Error::Internal(format!(
                "unfathomed set without successors: {x:?}"
            )));
        }
        loop {
            let (mut lo, mut hi) = (u32::MAX, u32::MAX);
            for c in &succ {
                let b = self.child_bound(c);
                lo = lo.min(b.lo);
                hi = hi.min(b.hi);
            }
            let now = self.table.narrow(x, BoundInterval::new(lo + 1, hi + 1))?;
            if settled(start, now) {
                return Ok(());
            }
            let next = succ
                .iter()
                .filter_map(|c| {
                    let b = self.child_bound(c);
                    (!b.is_fathomed() && b.lo < now.lo).then_some(((c.set.len(), b.lo, b.hi), c))
                })
                .min_by(|a, b| a.0.cmp(&b.0))
                .map(|(_, c)| c.set.clone())
                .ok_or_else(|| Error::Internal("no successor can raise the bound".into()))?;
            self.improve(&next)?;
        }
    }
}

/// Largest width accepted by [`memo_min_size`].
pub const MEMO_WIDTH_LIMIT: usize = 6;

/// Exact `s(X)` for a well-behaved set by full memoized recursion over
/// canonical successors.
pub fn memo_min_size(x: &BoolSeqSet) -> Result<u32> {
    if x.width() > MEMO_WIDTH_LIMIT {
        return Err(Error::InvalidArgument(format!(
            "memoized search is limited to width {MEMO_WIDTH_LIMIT}"
        )));
    }
    fn go(x: &BoolSeqSet, memo: &mut FxHashMap<BoolSeqSet, u32>) -> u32 {
        if x.is_trivially_sortable() {
            return 0;
        }
        let x = canonicalize(x).set;
        if let Some(&s) = memo.get(&x) {
            return s;
        }
        let s = 1 + x
            .successors()
            .iter()
            .map(|(_, y)| go(y, memo))
            .min()
            .expect("a set that is not trivially sortable has successors");
        memo.insert(x, s);
        s
    }
    Ok(go(x, &mut FxHashMap::default()))
}

/// Folds `s(k) ≥ s(k−1) + ⌈log₂ k⌉` from a known `s(n)` up to `target`.
pub fn van_voorhis_chain(n: usize, size: u32, target: usize) -> Result<u32> {
    if target < n {
        return Err(Error::InvalidArgument(format!(
            "target {target} is below the known channel count {n}"
        )));
    }
    Ok((n + 1..=target).fold(size, |s, k| s + ceil_log2(k as u32)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::table::UPPER_BOUNDS;

    #[test]
    fn small_channel_counts() {
        let search = Search::new();
        for (n, &s) in UPPER_BOUNDS.iter().enumerate().take(7).skip(1) {
            assert_eq!(search.min_size(n).unwrap(), s, "n = {n}");
        }
        assert!(search.min_size(0).is_err());
        assert!(search.min_size(13).is_err());
    }

    #[test]
    fn memo_examples() {
        assert_eq!(memo_min_size(&BoolSeqSet::full(4).unwrap()).unwrap(), 5);
        assert_eq!(memo_min_size(&BoolSeqSet::sorted(5).unwrap()).unwrap(), 0);
        assert_eq!(memo_min_size(&BoolSeqSet::full(3).unwrap()).unwrap(), 3);
        assert!(memo_min_size(&BoolSeqSet::full(7).unwrap()).is_err());
    }

    #[test]
    fn chain_examples() {
        assert_eq!(van_voorhis_chain(11, 35, 12).unwrap(), 39);
        assert_eq!(van_voorhis_chain(9, 25, 10).unwrap(), 29);
        assert_eq!(van_voorhis_chain(5, 9, 5).unwrap(), 9);
        assert!(van_voorhis_chain(5, 9, 4).is_err());
    }

    #[test]
    fn successor_update_on_the_two_cube() {
        let search = Search::new();
        let x = BoolSeqSet::full(2).unwrap();
        assert_eq!(search.bound(&x), BoundInterval::exact(1));
        search.improve(&x).unwrap();
        assert_eq!(search.bound(&x), BoundInterval::exact(1));
    }

    #[test]
    fn pruned_step_copies_a_fathomed_value() {
        let search = Search::new();
        // The comparator-image of a cube where only one one-hot survives.
        let mut x = BoolSeqSet::full(4).unwrap();
        for (i, j) in [(0, 1), (0, 2), (0, 3)] {
            x = x
                .apply_comparator(crate::Comparator::new(i, j).unwrap())
                .unwrap();
        }
        let x = canonicalize(&x).set;
        let size = search.size_of(&x).unwrap();
        assert_eq!(size, memo_min_size(&x).unwrap());
    }

    #[test]
    fn parallel_canonicalization_gives_the_same_sizes() {
        let search = Search::new().with_threads(2).unwrap();
        assert_eq!(search.min_size(6).unwrap(), 12);
        assert!(Search::new().with_threads(0).is_err());
    }
}
