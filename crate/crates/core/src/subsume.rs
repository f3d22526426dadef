//! Subsumption `X ⊑ Y`: some permuted, possibly negated copy of `X` is a
//! subset of `Y`, so `s(X) ≤ s(Y)`.
//!
//! Tests go through monotone abstractions first. Per-set statistics rule out
//! most pairs; per-channel statistics then restrict which channel of `X` may
//! map to which channel of `Y`, and only the perfect matchings of that
//! compatibility graph are tried as permutations.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::seqset::{BoolSeqSet, ChannelPermutation};

/// Matching enumeration gives up after this many candidate permutations.
pub const MATCHING_CAP: u64 = 1_000_000;

/// Statistics of one set that can only grow when passing to a superset of a
/// permuted copy.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Abstraction {
    /// Size, weight, popcount histogram, then per-channel one and zero
    /// counts, each sorted in decreasing order.
    point: Vec<u64>,
    /// Per channel: size, weight and popcount histogram of the members with
    /// the channel set and of those with it clear, with the channel removed.
    channels: Vec<Vec<u64>>,
}

fn set_stats(codes: impl Iterator<Item = u32>, width: usize) -> Vec<u64> {
    let mut len = 0u64;
    let mut hist = vec![0u64; width + 1];
    let mut ones = vec![0u64; width];
    for v in codes {
        len += 1;
        hist[v.count_ones() as usize] += 1;
        let mut bits = v;
        while bits != 0 {
            ones[bits.trailing_zeros() as usize] += 1;
            bits &= bits - 1;
        }
    }
    let weight: u64 = ones.iter().map(|&o| 2 * o * (len - o)).sum();
    let mut out = Vec::with_capacity(width + 3);
    out.push(len);
    out.push(weight);
    out.extend(hist);
    out
}

#[inline]
fn delete_bit(v: u32, c: usize) -> u32 {
    let low = (1u32 << c) - 1;
    (v & low) | ((v >> (c + 1)) << c)
}

impl Abstraction {
    pub fn of(x: &BoolSeqSet) -> Abstraction {
        let w = x.width();
        let members: Vec<u32> = x.members().collect();
        let mut point = set_stats(members.iter().copied(), w);
        let len = members.len();
        let mut ones: Vec<u64> = (0..w).map(|c| x.channel_count(c) as u64).collect();
        let mut zeros: Vec<u64> = ones.iter().map(|&o| len as u64 - o).collect();
        ones.sort_unstable_by(|a, b| b.cmp(a));
        zeros.sort_unstable_by(|a, b| b.cmp(a));
        point.extend(ones);
        point.extend(zeros);
        let channels = (0..w)
            .map(|c| {
                let side = |bit: u32| {
                    members
                        .iter()
                        .filter(move |&&v| (v >> c) & 1 == bit)
                        .map(move |&v| delete_bit(v, c))
                };
                let mut stats = set_stats(side(1), w - 1);
                stats.extend(set_stats(side(0), w - 1));
                stats
            })
            .collect();
        Abstraction { point, channels }
    }

    pub fn point(&self) -> &[u64] {
        &self.point
    }
}

#[inline]
fn leq(a: &[u64], b: &[u64]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x <= y)
}

/// Searches for `σ` with `permute(x, σ) ⊆ y` among the perfect matchings of
/// the channel compatibility graph.
fn permutation_into(
    x: &BoolSeqSet,
    ax: &Abstraction,
    y: &BoolSeqSet,
    ay: &Abstraction,
) -> Result<Option<ChannelPermutation>> {
    if !leq(&ax.point, &ay.point) {
        return Ok(None);
    }
    let w = x.width();
    let mut compat = vec![0u32; w];
    for (i, fi) in ax.channels.iter().enumerate() {
        for (j, fj) in ay.channels.iter().enumerate() {
            if leq(fi, fj) {
                compat[i] |= 1 << j;
            }
        }
        if compat[i] == 0 {
            return Ok(None);
        }
    }
    let mut order: Vec<usize> = (0..w).collect();
    order.sort_by_key(|&i| (compat[i].count_ones(), i));
    let mut matcher = Matcher {
        x,
        y,
        compat: &compat,
        order: &order,
        image: vec![0; w],
        tried: 0,
    };
    matcher.search(0, 0)
}

struct Matcher<'a> {
    x: &'a BoolSeqSet,
    y: &'a BoolSeqSet,
    compat: &'a [u32],
    order: &'a [usize],
    image: Vec<usize>,
    tried: u64,
}

impl Matcher<'_> {
    fn search(&mut self, depth: usize, used: u32) -> Result<Option<ChannelPermutation>> {
        if depth == self.order.len() {
            self.tried += 1;
            if self.tried > MATCHING_CAP {
                return Err(Error::Internal(format!(
                    "more than {MATCHING_CAP} channel matchings for one subsumption test"
                )));
            }
            let perm = ChannelPermutation::new(self.image.clone())?;
            return Ok(self.x.permute(&perm).is_subset(self.y).then_some(perm));
        }
        let i = self.order[depth];
        let mut options = self.compat[i] & !used;
        while options != 0 {
            let j = options.trailing_zeros() as usize;
            options &= options - 1;
            let used = used | (1 << j);
            let feasible = self.order[depth + 1..]
                .iter()
                .all(|&k| self.compat[k] & !used != 0);
            if !feasible {
                continue;
            }
            self.image[i] = j;
            if let Some(p) = self.search(depth + 1, used)? {
                return Ok(Some(p));
            }
        }
        Ok(None)
    }
}

/// `(σ, b)` with `transform(x, σ, b) ⊆ y`, if any.
pub fn subsumption_witness(
    x: &BoolSeqSet,
    y: &BoolSeqSet,
) -> Result<Option<(ChannelPermutation, bool)>> {
    if x.width() != y.width() {
        return Err(Error::WidthMismatch {
            expected: x.width(),
            found: y.width(),
        });
    }
    let ay = Abstraction::of(y);
    for negate in [false, true] {
        let xs = if negate { x.negate() } else { x.clone() };
        let ax = Abstraction::of(&xs);
        if let Some(p) = permutation_into(&xs, &ax, y, &ay)? {
            return Ok(Some((p, negate)));
        }
    }
    Ok(None)
}

pub fn subsumes(x: &BoolSeqSet, y: &BoolSeqSet) -> Result<bool> {
    Ok(subsumption_witness(x, y)?.is_some())
}

/// One stored orientation of an indexed set.
struct Entry {
    owner: usize,
    negated: bool,
    set: BoolSeqSet,
    abs: Abstraction,
}

/// A bulk-loaded bounding-box tree over abstraction points; answers "which
/// stored sets may be subsumed into a query set".
pub struct SubsumptionIndex {
    sets: Vec<BoolSeqSet>,
    entries: Vec<Entry>,
    nodes: Vec<Node>,
}

struct Node {
    /// Componentwise minimum over the subtree.
    lo: Vec<u64>,
    kind: NodeKind,
}

enum NodeKind {
    Leaf(Vec<usize>),
    Inner(usize, usize),
}

const LEAF_SIZE: usize = 16;

impl SubsumptionIndex {
    /// Indexes `sets` and their negations.
    pub fn new(sets: Vec<BoolSeqSet>) -> SubsumptionIndex {
        let entries: Vec<Entry> = sets
            .par_iter()
            .enumerate()
            .flat_map_iter(|(owner, set)| {
                let neg = set.negate();
                [(set.clone(), false), (neg, true)]
                    .into_iter()
                    .map(move |(s, negated)| Entry {
                        owner,
                        negated,
                        abs: Abstraction::of(&s),
                        set: s,
                    })
            })
            .collect();
        let mut index = SubsumptionIndex {
            sets,
            entries,
            nodes: Vec::new(),
        };
        if !index.entries.is_empty() {
            let all: Vec<usize> = (0..index.entries.len()).collect();
            index.build(all);
        }
        index
    }

    pub fn sets(&self) -> &[BoolSeqSet] {
        &self.sets
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    fn build(&mut self, mut ids: Vec<usize>) -> usize {
        let dims = self.entries[ids[0]].abs.point.len();
        let mut lo = vec![u64::MAX; dims];
        let mut hi = vec![0u64; dims];
        for &e in &ids {
            for (d, &v) in self.entries[e].abs.point.iter().enumerate() {
                lo[d] = lo[d].min(v);
                hi[d] = hi[d].max(v);
            }
        }
        let widest = (0..dims)
            .max_by_key(|&d| (hi[d] - lo[d], usize::MAX - d))
            .unwrap_or(0);
        let splittable = ids.len() > LEAF_SIZE && lo[widest] < hi[widest];
        let slot = self.nodes.len();
        self.nodes.push(Node {
            lo,
            kind: NodeKind::Leaf(Vec::new()),
        });
        if !splittable {
            self.nodes[slot].kind = NodeKind::Leaf(ids);
            return slot;
        }
        ids.sort_by_key(|&e| (self.entries[e].abs.point[widest], e));
        let right = ids.split_off(ids.len() / 2);
        let l = self.build(ids);
        let r = self.build(right);
        self.nodes[slot].kind = NodeKind::Inner(l, r);
        slot
    }

    /// Entries whose abstraction point is dominated by `point`, ascending.
    fn candidates(&self, point: &[u64]) -> Vec<usize> {
        let mut out = Vec::new();
        if self.nodes.is_empty() {
            return out;
        }
        let mut stack = vec![0];
        while let Some(n) = stack.pop() {
            let node = &self.nodes[n];
            if !leq(&node.lo, point) {
                continue;
            }
            match &node.kind {
                NodeKind::Leaf(ids) => out.extend(
                    ids.iter()
                        .copied()
                        .filter(|&e| leq(&self.entries[e].abs.point, point)),
                ),
                NodeKind::Inner(l, r) => {
                    stack.push(*l);
                    stack.push(*r);
                }
            }
        }
        out.sort_unstable_by_key(|&e| (self.entries[e].owner, self.entries[e].negated));
        out
    }

    /// The first stored set (in index order, among those accepted by
    /// `admit`) subsumed into `y`, with `(σ, b)` such that
    /// `transform(stored, σ, b) ⊆ y`.
    pub fn find_subsumed_into(
        &self,
        y: &BoolSeqSet,
        admit: impl Fn(usize) -> bool,
    ) -> Result<Option<(usize, ChannelPermutation, bool)>> {
        let ay = Abstraction::of(y);
        for e in self.candidates(&ay.point) {
            let entry = &self.entries[e];
            if !admit(entry.owner) || entry.set.width() != y.width() {
                continue;
            }
            if let Some(p) = permutation_into(&entry.set, &entry.abs, y, &ay)? {
                return Ok(Some((entry.owner, p, entry.negated)));
            }
        }
        Ok(None)
    }
}

/// Keeps the sets not subsumed by an earlier set of the same part, after a
/// stable sort by size; every dropped set is subsumed by a survivor.
///
/// Subsumption is transitive, so each set is only compared against the
/// survivors so far.
pub fn filter_nonsubsumed(part: &[BoolSeqSet]) -> Result<Vec<BoolSeqSet>> {
    let mut sorted: Vec<BoolSeqSet> = part.to_vec();
    sorted.sort_by_key(|s| s.len());
    sorted.dedup();
    let mut kept: Vec<BoolSeqSet> = Vec::new();
    let mut entries: Vec<(BoolSeqSet, Abstraction)> = Vec::new();
    for t in sorted {
        let at = Abstraction::of(&t);
        let mut subsumed = false;
        for (set, abs) in &entries {
            if permutation_into(set, abs, &t, &at)?.is_some() {
                subsumed = true;
                break;
            }
        }
        if !subsumed {
            let neg = t.negate();
            entries.push((t.clone(), at));
            entries.push((neg.clone(), Abstraction::of(&neg)));
            kept.push(t);
        }
    }
    Ok(kept)
}

/// A set from the indexed parts embedded into a query set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Redirect {
    pub set: BoolSeqSet,
    pub k: u32,
    /// Position of `set` within its part.
    pub position: usize,
    /// `transform(set, perm, negate) ⊆ query`.
    pub perm: ChannelPermutation,
    pub negate: bool,
}

/// Indexes of every `(width, k)` part.
pub struct RedirectIndex {
    parts: BTreeMap<(usize, u32), SubsumptionIndex>,
}

impl RedirectIndex {
    pub fn new(parts: BTreeMap<(usize, u32), Vec<BoolSeqSet>>) -> RedirectIndex {
        RedirectIndex {
            parts: parts
                .into_iter()
                .map(|(key, sets)| (key, SubsumptionIndex::new(sets)))
                .collect(),
        }
    }

    pub fn part(&self, w: usize, k: u32) -> Option<&SubsumptionIndex> {
        self.parts.get(&(w, k))
    }

    /// The stored set subsumed into `x` with the largest `k`.
    pub fn redirect(&self, x: &BoolSeqSet) -> Result<Redirect> {
        let w = x.width();
        for (&(_, k), index) in self.parts.range((w, 0)..=(w, u32::MAX)).rev() {
            if let Some((position, perm, negate)) = index.find_subsumed_into(x, |_| true)? {
                return Ok(Redirect {
                    set: index.sets()[position].clone(),
                    k,
                    position,
                    perm,
                    negate,
                });
            }
        }
        Err(Error::NotFound(format!(
            "no indexed set is subsumed into {x:?}"
        )))
    }
}
