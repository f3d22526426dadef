//! Canonical representatives of sequence sets under channel permutation and
//! Boolean negation.
//!
//! Channels and member sequences form a bipartite incidence graph. A channel
//! partition is refined to an equitable one and then individualized channel by
//! channel; every discrete partition yields a labeling, and the least labeled
//! set over the explored leaves is the representative. Leaves whose image
//! repeats the first leaf of an ancestor reveal an automorphism, and the rest
//! of that child's subtree is skipped.

use crate::seqset::{BoolSeqSet, ChannelPermutation};

/// A representative together with the transform taking the input to it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CanonicalForm {
    pub set: BoolSeqSet,
    pub perm: ChannelPermutation,
    pub negate: bool,
}

pub fn canonicalize(x: &BoolSeqSet) -> CanonicalForm {
    let (plain, plain_perm) = canonical_labeling(x);
    let negated = x.negate();
    let (neg, neg_perm) = canonical_labeling(&negated);
    if neg < plain {
        CanonicalForm {
            set: neg,
            perm: neg_perm,
            negate: true,
        }
    } else {
        CanonicalForm {
            set: plain,
            perm: plain_perm,
            negate: false,
        }
    }
}

/// `(σ, b)` with `transform(x, σ, b) = y`, if `x` and `y` are similar.
pub fn find_similarity_witness(
    x: &BoolSeqSet,
    y: &BoolSeqSet,
) -> Option<(ChannelPermutation, bool)> {
    if x.width() != y.width() || x.len() != y.len() {
        return None;
    }
    let cx = canonicalize(x);
    let cy = canonicalize(y);
    if cx.set != cy.set {
        return None;
    }
    Some((cx.perm.then(&cy.perm.inverse()), cx.negate ^ cy.negate))
}

/// Canonical labeling under channel permutations only.
pub fn canonical_labeling(x: &BoolSeqSet) -> (BoolSeqSet, ChannelPermutation) {
    let width = x.width();
    if width <= 1 {
        return (x.clone(), ChannelPermutation::identity(width));
    }
    let mut search = LabelSearch {
        set: x,
        members: x.members().collect(),
        best: None,
        first_leaf: Vec::with_capacity(width),
        child: Vec::with_capacity(width),
    };
    let mut cells: Cells = vec![((1u32 << width) - 1) as u16];
    refine(&search.members, &mut cells);
    search.explore(cells, 0);
    search.best.expect("search tree has at least one leaf")
}

/// Ordered partition of channels; each cell is a channel mask.
type Cells = Vec<u16>;

struct LabelSearch<'a> {
    set: &'a BoolSeqSet,
    members: Vec<u32>,
    best: Option<(BoolSeqSet, ChannelPermutation)>,
    first_leaf: Vec<Option<BoolSeqSet>>,
    child: Vec<usize>,
}

impl LabelSearch<'_> {
    /// Returns the depth whose current child should be abandoned, if any.
    fn explore(&mut self, cells: Cells, depth: usize) -> Option<usize> {
        let width = self.set.width();
        if cells.len() == width {
            return self.leaf(&cells, depth);
        }
        let target = cells
            .iter()
            .enumerate()
            .filter(|(_, m)| m.count_ones() > 1)
            .max_by(|(ia, a), (ib, b)| a.count_ones().cmp(&b.count_ones()).then(ib.cmp(ia)))
            .map(|(k, _)| k)
            .expect("non-discrete partition has a non-singleton cell");
        self.first_leaf.truncate(depth);
        self.first_leaf.push(None);
        self.child.truncate(depth);
        self.child.push(0);
        let mask = cells[target];
        let mut bits = mask;
        let mut k = 0;
        while bits != 0 {
            let c = bits.trailing_zeros();
            bits &= bits - 1;
            self.child[depth] = k;
            k += 1;
            let mut next = Vec::with_capacity(cells.len() + 1);
            next.extend_from_slice(&cells[..target]);
            next.push(1 << c);
            next.push(mask & !(1 << c));
            next.extend_from_slice(&cells[target + 1..]);
            refine(&self.members, &mut next);
            match self.explore(next, depth + 1) {
                Some(d) if d == depth => continue,
                Some(d) => return Some(d),
                None => {}
            }
        }
        None
    }

    fn leaf(&mut self, cells: &Cells, depth: usize) -> Option<usize> {
        let mut image = vec![0usize; cells.len()];
        for (pos, &m) in cells.iter().enumerate() {
            image[m.trailing_zeros() as usize] = pos;
        }
        let perm = ChannelPermutation::new(image).expect("discrete partition is a bijection");
        let labeled = self.set.permute(&perm);
        for d in 0..depth {
            if self.child[d] > 0 && self.first_leaf[d].as_ref() == Some(&labeled) {
                return Some(d);
            }
        }
        for slot in self.first_leaf.iter_mut().take(depth) {
            if slot.is_none() {
                *slot = Some(labeled.clone());
            }
        }
        match &self.best {
            Some((best, _)) if *best <= labeled => {}
            _ => self.best = Some((labeled, perm)),
        }
        None
    }
}

#[inline]
fn mix(mut h: u64) -> u64 {
    h ^= h >> 33;
    h = h.wrapping_mul(0xff51_afd7_ed55_8ccd);
    h ^= h >> 33;
    h = h.wrapping_mul(0xc4ce_b9fe_1a85_ec53);
    h ^ (h >> 33)
}

/// Splits cells until every channel in a cell sees the same multiset of
/// member profiles, where a member's profile is its per-cell channel count.
fn refine(members: &[u32], cells: &mut Cells) {
    let mut values = [0u64; 16];
    loop {
        values.fill(0);
        for &v in members {
            let mut h = 0x243f_6a88_85a3_08d3u64;
            for &m in cells.iter() {
                h = (h ^ (v & m as u32).count_ones() as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15);
                h = h.rotate_left(23);
            }
            let h = mix(h);
            let mut bits = v;
            while bits != 0 {
                let c = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                values[c] = values[c].wrapping_add(h);
            }
        }
        let mut next: Cells = Vec::with_capacity(16);
        for &m in cells.iter() {
            if m.count_ones() == 1 {
                next.push(m);
                continue;
            }
            let mut chans: Vec<(u64, u16)> = Vec::with_capacity(16);
            let mut bits = m;
            while bits != 0 {
                let c = bits.trailing_zeros();
                bits &= bits - 1;
                chans.push((values[c as usize], c as u16));
            }
            chans.sort_unstable();
            let mut cell = 0u16;
            let mut last = chans[0].0;
            for &(val, c) in &chans {
                if val != last {
                    next.push(cell);
                    cell = 0;
                    last = val;
                }
                cell |= 1 << c;
            }
            next.push(cell);
        }
        let stable = next.len() == cells.len();
        *cells = next;
        if stable {
            return;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::brute_force_canonical;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_set(rng: &mut ChaCha8Rng, width: usize, density: f64) -> BoolSeqSet {
        let codes = (0..1u32 << width).filter(|_| rng.gen_bool(density));
        BoolSeqSet::from_codes(width, codes.collect::<Vec<_>>()).unwrap()
    }

    fn random_perm(rng: &mut ChaCha8Rng, width: usize) -> ChannelPermutation {
        let mut image: Vec<usize> = (0..width).collect();
        for k in (1..width).rev() {
            image.swap(k, rng.gen_range(0..=k));
        }
        ChannelPermutation::new(image).unwrap()
    }

    #[test]
    fn examples() {
        let a = BoolSeqSet::from_codes(2, [0b01]).unwrap();
        let b = BoolSeqSet::from_codes(2, [0b10]).unwrap();
        assert_eq!(canonicalize(&a).set, canonicalize(&b).set);
        for w in 1..=8 {
            let full = BoolSeqSet::full(w).unwrap();
            assert_eq!(canonicalize(&full).set, full);
        }
    }

    #[test]
    fn witness_examples() {
        let x = BoolSeqSet::from_codes(3, [0b001, 0b011]).unwrap();
        let (perm, neg) = find_similarity_witness(&x, &x).unwrap();
        assert_eq!(x.transform(&perm, neg).unwrap(), x);

        let zero = BoolSeqSet::from_codes(2, [0b00]).unwrap();
        let ones = BoolSeqSet::from_codes(2, [0b11]).unwrap();
        let (perm, neg) = find_similarity_witness(&zero, &ones).unwrap();
        assert!(neg);
        assert_eq!(zero.transform(&perm, neg).unwrap(), ones);

        let bigger = BoolSeqSet::from_codes(2, [0b00, 0b01]).unwrap();
        assert!(find_similarity_witness(&zero, &bigger).is_none());
    }

    #[test]
    fn witness_maps_input_to_representative() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for w in 2..=10 {
            for _ in 0..20 {
                let x = random_set(&mut rng, w, 0.3);
                let c = canonicalize(&x);
                assert_eq!(x.transform(&c.perm, c.negate).unwrap(), c.set);
                assert_eq!(c.set.weight(), x.weight());
                assert_eq!(canonicalize(&c.set).set, c.set);
            }
        }
    }

    #[test]
    fn invariant_under_random_transforms() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for w in 2..=10 {
            for _ in 0..20 {
                let density = rng.gen_range(0.05..0.6);
                let x = random_set(&mut rng, w, density);
                let canon = canonicalize(&x).set;
                for _ in 0..3 {
                    let perm = random_perm(&mut rng, w);
                    let y = x.transform(&perm, rng.gen()).unwrap();
                    assert_eq!(canonicalize(&y).set, canon, "width {w}: {x:?}");
                }
            }
        }
    }

    #[test]
    fn classifies_orbits_like_brute_force_on_width_3() {
        // All 256 subsets of B^3: two sets share a representative exactly
        // when they share a brute-force minimum.
        let sets: Vec<BoolSeqSet> = (0u32..256)
            .map(|bits| BoolSeqSet::from_codes(3, (0..8).filter(|v| bits >> v & 1 == 1)).unwrap())
            .collect();
        let fast: Vec<BoolSeqSet> = sets.iter().map(|x| canonicalize(x).set).collect();
        let slow: Vec<BoolSeqSet> = sets.iter().map(brute_force_canonical).collect();
        for a in 0..sets.len() {
            for b in a + 1..sets.len() {
                assert_eq!(fast[a] == fast[b], slow[a] == slow[b]);
            }
        }
    }
}
