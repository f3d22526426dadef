//! Sets of Boolean sequences stored as bit-vectors over hypercube vertex codes.
//!
//! A sequence of width `w` is encoded as an integer code in `[0, 2^w)` where
//! bit `i` carries the value of channel `i`. A set of such sequences is a
//! bit-vector of length `2^w`; bit `v` is set when the sequence with code `v`
//! is a member.

use std::cmp::Ordering;
use std::fmt;

use smallvec::SmallVec;

use crate::error::{Error, Result};

/// Largest supported channel count.
pub const MAX_WIDTH: usize = 16;

pub(crate) type Words = SmallVec<[u64; 8]>;

/// Bit patterns selecting the codes with channel `c` set, for `c < 6`.
const LOW_PATTERNS: [u64; 6] = [
    0xAAAA_AAAA_AAAA_AAAA,
    0xCCCC_CCCC_CCCC_CCCC,
    0xF0F0_F0F0_F0F0_F0F0,
    0xFF00_FF00_FF00_FF00,
    0xFFFF_0000_FFFF_0000,
    0xFFFF_FFFF_0000_0000,
];

#[inline]
fn word_count(width: usize) -> usize {
    if width <= 6 {
        1
    } else {
        1 << (width - 6)
    }
}

#[inline]
fn valid_mask(width: usize) -> u64 {
    if width >= 6 {
        !0
    } else {
        (1u64 << (1u32 << width)) - 1
    }
}

/// Mask of word `k` selecting the codes whose channel `c` is set.
#[inline]
fn channel_word_mask(c: usize, k: usize) -> u64 {
    if c < 6 {
        LOW_PATTERNS[c]
    } else if (k >> (c - 6)) & 1 == 1 {
        !0
    } else {
        0
    }
}

fn check_width(width: usize) -> Result<()> {
    if width > MAX_WIDTH {
        return Err(Error::InvalidArgument(format!(
            "width {width} exceeds maximum {MAX_WIDTH}"
        )));
    }
    Ok(())
}

/// A single Boolean sequence.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct BoolSeq {
    width: u8,
    code: u32,
}

impl BoolSeq {
    pub fn new(width: usize, code: u32) -> Result<Self> {
        check_width(width)?;
        if (code as u64) >= (1u64 << width) {
            return Err(Error::InvalidArgument(format!(
                "code {code:#b} out of range for width {width}"
            )));
        }
        Ok(BoolSeq {
            width: width as u8,
            code,
        })
    }

    /// Builds a sequence from channel values, channel 0 first.
    pub fn from_bits(bits: &[bool]) -> Result<Self> {
        let code = bits
            .iter()
            .enumerate()
            .fold(0u32, |acc, (i, &b)| acc | ((b as u32) << i));
        Self::new(bits.len(), code)
    }

    pub fn width(&self) -> usize {
        self.width as usize
    }

    pub fn code(&self) -> u32 {
        self.code
    }

    pub fn get(&self, channel: usize) -> bool {
        (self.code >> channel) & 1 == 1
    }

    /// Non-decreasing from channel 0 to the last channel.
    pub fn is_sorted(&self) -> bool {
        is_sorted_code(self.code, self.width())
    }
}

/// A code is sorted when its ones occupy the topmost channels.
#[inline]
pub fn is_sorted_code(code: u32, width: usize) -> bool {
    let full = ((1u64 << width) - 1) as u32;
    let zeros_below = (code | !full).trailing_zeros() as usize;
    let ones = code.count_ones() as usize;
    zeros_below.min(width) + ones == width
}

/// A standard comparator `[i, j]` with `i < j`: the minimum lands on `i`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Comparator {
    i: u8,
    j: u8,
}

impl Comparator {
    pub fn new(i: usize, j: usize) -> Result<Self> {
        if i >= j || j >= MAX_WIDTH {
            return Err(Error::InvalidArgument(format!(
                "comparator [{i},{j}] is not in standard form"
            )));
        }
        Ok(Comparator {
            i: i as u8,
            j: j as u8,
        })
    }

    pub fn i(&self) -> usize {
        self.i as usize
    }

    pub fn j(&self) -> usize {
        self.j as usize
    }

    /// All standard comparators on `width` channels in lexicographic order.
    pub fn all(width: usize) -> impl Iterator<Item = Comparator> {
        (0..width).flat_map(move |i| {
            (i + 1..width).map(move |j| Comparator {
                i: i as u8,
                j: j as u8,
            })
        })
    }
}

/// A bijection on channels; `image[c]` is the channel that channel `c` moves to.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ChannelPermutation {
    image: SmallVec<[u8; MAX_WIDTH]>,
}

impl ChannelPermutation {
    pub fn identity(width: usize) -> Self {
        ChannelPermutation {
            image: (0..width as u8).collect(),
        }
    }

    pub fn new(image: Vec<usize>) -> Result<Self> {
        let width = image.len();
        check_width(width)?;
        let mut seen = 0u32;
        for &c in &image {
            if c >= width || seen & (1 << c) != 0 {
                return Err(Error::InvalidArgument(format!(
                    "{image:?} is not a permutation"
                )));
            }
            seen |= 1 << c;
        }
        Ok(ChannelPermutation {
            image: image.iter().map(|&c| c as u8).collect(),
        })
    }

    pub fn transposition(width: usize, a: usize, b: usize) -> Result<Self> {
        if a >= width || b >= width {
            return Err(Error::InvalidArgument(format!(
                "transposition ({a},{b}) out of range for width {width}"
            )));
        }
        let mut p = Self::identity(width);
        p.image.swap(a, b);
        Ok(p)
    }

    pub fn width(&self) -> usize {
        self.image.len()
    }

    pub fn apply(&self, channel: usize) -> usize {
        self.image[channel] as usize
    }

    pub fn images(&self) -> impl Iterator<Item = usize> + '_ {
        self.image.iter().map(|&c| c as usize)
    }

    pub fn is_identity(&self) -> bool {
        self.image.iter().enumerate().all(|(c, &d)| c == d as usize)
    }

    pub fn inverse(&self) -> Self {
        let mut inv: SmallVec<[u8; MAX_WIDTH]> = SmallVec::from_elem(0, self.image.len());
        for (c, &d) in self.image.iter().enumerate() {
            inv[d as usize] = c as u8;
        }
        ChannelPermutation { image: inv }
    }

    /// Applies `self` first, then `then`.
    pub fn then(&self, then: &ChannelPermutation) -> Self {
        ChannelPermutation {
            image: self.image.iter().map(|&d| then.image[d as usize]).collect(),
        }
    }

    /// Moves the value on channel `c` of `code` to channel `image[c]`.
    pub fn apply_code(&self, code: u32) -> u32 {
        let mut out = 0;
        for (c, &d) in self.image.iter().enumerate() {
            out |= ((code >> c) & 1) << d;
        }
        out
    }
}

/// A set of Boolean sequences of one width.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BoolSeqSet {
    width: u8,
    words: Words,
}

impl fmt::Debug for BoolSeqSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BoolSeqSet(w={}, {{", self.width)?;
        for (n, v) in self.members().enumerate() {
            if n > 0 {
                write!(f, ",")?;
            }
            write!(f, "{:0w$b}", v, w = self.width as usize)?;
        }
        write!(f, "}})")
    }
}

impl BoolSeqSet {
    pub fn empty(width: usize) -> Result<Self> {
        check_width(width)?;
        Ok(BoolSeqSet {
            width: width as u8,
            words: SmallVec::from_elem(0, word_count(width)),
        })
    }

    /// The full cube `B^w`.
    pub fn full(width: usize) -> Result<Self> {
        let mut set = Self::empty(width)?;
        let mask = valid_mask(width);
        for w in set.words.iter_mut() {
            *w = mask;
        }
        Ok(set)
    }

    /// The `w + 1` sorted sequences.
    pub fn sorted(width: usize) -> Result<Self> {
        let mut set = Self::empty(width)?;
        for k in 0..=width {
            let code = ((1u64 << width) - (1u64 << k)) as u32;
            set.insert(code);
        }
        Ok(set)
    }

    pub fn from_codes<I: IntoIterator<Item = u32>>(width: usize, codes: I) -> Result<Self> {
        let mut set = Self::empty(width)?;
        for code in codes {
            if (code as u64) >= (1u64 << width) {
                return Err(Error::InvalidArgument(format!(
                    "code {code} out of range for width {width}"
                )));
            }
            set.insert(code);
        }
        Ok(set)
    }

    pub fn width(&self) -> usize {
        self.width as usize
    }

    /// Number of addressable codes, `2^w`.
    pub fn universe(&self) -> usize {
        1 << self.width
    }

    #[inline]
    pub fn contains(&self, code: u32) -> bool {
        let code = code as usize;
        code < self.universe() && (self.words[code >> 6] >> (code & 63)) & 1 == 1
    }

    #[inline]
    pub fn insert(&mut self, code: u32) {
        let code = code as usize;
        assert!(code < self.universe(), "code out of range");
        self.words[code >> 6] |= 1 << (code & 63);
    }

    #[inline]
    pub fn remove(&mut self, code: u32) {
        let code = code as usize;
        assert!(code < self.universe(), "code out of range");
        self.words[code >> 6] &= !(1 << (code & 63));
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Member codes in ascending order.
    pub fn members(&self) -> Members<'_> {
        Members {
            words: &self.words,
            index: 0,
            current: self.words[0],
        }
    }

    pub fn is_subset(&self, other: &BoolSeqSet) -> bool {
        self.width == other.width
            && self
                .words
                .iter()
                .zip(other.words.iter())
                .all(|(a, b)| a & !b == 0)
    }

    fn check_same_width(&self, width: usize) -> Result<()> {
        if self.width() != width {
            return Err(Error::WidthMismatch {
                expected: self.width(),
                found: width,
            });
        }
        Ok(())
    }

    /// Members grouped by the two channels `i < j`: returns (10-pattern, 01-pattern)
    /// masks per word, i.e. codes with `x_i = 1, x_j = 0` and `x_i = 0, x_j = 1`.
    #[inline]
    fn pair_masks(i: usize, j: usize, k: usize) -> (u64, u64) {
        let mi = channel_word_mask(i, k);
        let mj = channel_word_mask(j, k);
        (mi & !mj, !mi & mj)
    }

    /// Applies comparator `[i, j]` (`i < j`) to every member.
    pub(crate) fn apply_pair_comparator(&self, i: usize, j: usize) -> BoolSeqSet {
        let d = (1usize << j) - (1usize << i);
        let mut moved: Words = SmallVec::with_capacity(self.words.len());
        let mut out: Words = SmallVec::with_capacity(self.words.len());
        for (k, &w) in self.words.iter().enumerate() {
            let (m10, _) = Self::pair_masks(i, j, k);
            moved.push(w & m10);
            out.push(w & !m10);
        }
        or_shifted_up(&mut out, &moved, d);
        BoolSeqSet {
            width: self.width,
            words: out,
        }
    }

    /// Applies the exchange `(i, j)` (`i < j`) to every member.
    pub(crate) fn apply_exchange(&self, i: usize, j: usize) -> BoolSeqSet {
        if i == j {
            return self.clone();
        }
        let (i, j) = if i < j { (i, j) } else { (j, i) };
        let d = (1usize << j) - (1usize << i);
        let mut up: Words = SmallVec::with_capacity(self.words.len());
        let mut down: Words = SmallVec::with_capacity(self.words.len());
        let mut out: Words = SmallVec::with_capacity(self.words.len());
        for (k, &w) in self.words.iter().enumerate() {
            let (m10, m01) = Self::pair_masks(i, j, k);
            up.push(w & m10);
            down.push(w & m01);
            out.push(w & !(m10 | m01));
        }
        or_shifted_up(&mut out, &up, d);
        or_shifted_down(&mut out, &down, d);
        BoolSeqSet {
            width: self.width,
            words: out,
        }
    }

    /// `{ x^[i,j] | x ∈ X }`.
    pub fn apply_comparator(&self, c: Comparator) -> Result<BoolSeqSet> {
        if c.j() >= self.width() {
            return Err(Error::InvalidArgument(format!(
                "comparator [{},{}] out of range for width {}",
                c.i(),
                c.j(),
                self.width
            )));
        }
        Ok(self.apply_pair_comparator(c.i(), c.j()))
    }

    /// Elementwise bitwise complement of every member.
    pub fn negate(&self) -> BoolSeqSet {
        let width = self.width();
        let words: Words = if width >= 6 {
            self.words.iter().rev().map(|w| w.reverse_bits()).collect()
        } else {
            let shift = 64 - (1u32 << width);
            SmallVec::from_elem(self.words[0].reverse_bits() >> shift, 1)
        };
        BoolSeqSet {
            width: self.width,
            words,
        }
    }

    /// Moves channel `c` of every member to `perm.apply(c)`.
    pub(crate) fn permute(&self, perm: &ChannelPermutation) -> BoolSeqSet {
        let width = self.width();
        // pos[c]: where the value of original channel c currently sits.
        let mut pos: [u8; MAX_WIDTH] = [0; MAX_WIDTH];
        let mut at: [u8; MAX_WIDTH] = [0; MAX_WIDTH];
        for c in 0..width {
            pos[c] = c as u8;
            at[c] = c as u8;
        }
        let mut out = self.clone();
        for c in 0..width {
            let target = perm.apply(c);
            let p = pos[c] as usize;
            if p != target {
                out = out.apply_exchange(p, target);
                let other = at[target] as usize;
                pos[other] = p as u8;
                at[p] = other as u8;
                pos[c] = target as u8;
                at[target] = c as u8;
            }
        }
        out
    }

    /// Applies `perm` elementwise, then complements each member if `negate`.
    pub fn transform(&self, perm: &ChannelPermutation, negate: bool) -> Result<BoolSeqSet> {
        self.check_same_width(perm.width())?;
        let permuted = self.permute(perm);
        Ok(if negate { permuted.negate() } else { permuted })
    }

    /// `{ x/i | x ∈ X, x_i = 1 }`: keeps the members with channel `i` set and
    /// deletes channel `i`, shifting higher channels down by one.
    pub fn prune(&self, i: usize) -> Result<BoolSeqSet> {
        let width = self.width();
        if width < 1 || i >= width {
            return Err(Error::InvalidArgument(format!(
                "cannot prune channel {i} of width {width}"
            )));
        }
        let mut out = BoolSeqSet::empty(width - 1)?;
        let low = (1u32 << i) - 1;
        for v in self.members() {
            if (v >> i) & 1 == 1 {
                out.insert((v & low) | ((v >> (i + 1)) << i));
            }
        }
        Ok(out)
    }

    /// Channels whose one-hot sequence is a member, as a bit mask.
    pub fn prunable_mask(&self) -> u32 {
        (0..self.width())
            .filter(|&i| self.contains(1 << i))
            .fold(0, |m, i| m | (1 << i))
    }

    pub fn prunable_channels(&self) -> Vec<usize> {
        let mask = self.prunable_mask();
        (0..self.width())
            .filter(|&i| mask & (1 << i) != 0)
            .collect()
    }

    /// Number of members with channel `c` set.
    pub fn channel_count(&self, c: usize) -> usize {
        self.words
            .iter()
            .enumerate()
            .map(|(k, &w)| (w & channel_word_mask(c, k)).count_ones() as usize)
            .sum()
    }

    /// Sum of Hamming distances over ordered member pairs.
    pub fn weight(&self) -> u64 {
        let n = self.len() as u64;
        (0..self.width())
            .map(|c| {
                let ones = self.channel_count(c) as u64;
                2 * ones * (n - ones)
            })
            .sum()
    }

    /// Non-redundant comparator images: `X^c` is skipped when it equals `X`
    /// or the image of `X` under the exchange `(i, j)`.
    pub fn successors(&self) -> Vec<(Comparator, BoolSeqSet)> {
        let width = self.width();
        let mut out = Vec::new();
        for c in Comparator::all(width) {
            if let Some(image) = self.successor_for(c) {
                out.push((c, image));
            }
        }
        out
    }

    /// `X^c` if `c` is not redundant for `X`.
    pub fn successor_for(&self, c: Comparator) -> Option<BoolSeqSet> {
        let (i, j) = (c.i(), c.j());
        // Redundant exactly if no member has the 10 pattern (image = X) or no
        // member has the 01 pattern (image = exchanged X).
        let mut has10 = false;
        let mut has01 = false;
        for (k, &w) in self.words.iter().enumerate() {
            let (m10, m01) = Self::pair_masks(i, j, k);
            has10 |= w & m10 != 0;
            has01 |= w & m01 != 0;
        }
        if !has10 || !has01 {
            return None;
        }
        Some(self.apply_pair_comparator(i, j))
    }

    /// Members reachable from `start` by forward hypercube edges inside `self`
    /// and able to reach the all-ones code the same way.
    fn chain_closure(&self, start: u32, check_backward: bool) -> BoolSeqSet {
        let width = self.width();
        let mut forward = BoolSeqSet {
            width: self.width,
            words: SmallVec::from_elem(0, self.words.len()),
        };
        if !self.contains(start) {
            return forward;
        }
        forward.insert(start);
        for v in self.members() {
            if v <= start || v & start != start {
                continue;
            }
            let mut bits = v & !start;
            while bits != 0 {
                let b = bits & bits.wrapping_neg();
                bits ^= b;
                if forward.contains(v ^ b) {
                    forward.insert(v);
                    break;
                }
            }
        }
        if !check_backward {
            return forward;
        }
        let top = ((1u64 << width) - 1) as u32;
        let mut both = BoolSeqSet {
            width: self.width,
            words: SmallVec::from_elem(0, self.words.len()),
        };
        if !forward.contains(top) {
            return both;
        }
        both.insert(top);
        let members: Vec<u32> = forward.members().collect();
        for &v in members.iter().rev() {
            if v == top {
                continue;
            }
            let mut bits = !v & top;
            while bits != 0 {
                let b = bits & bits.wrapping_neg();
                bits ^= b;
                if both.contains(v | b) {
                    both.insert(v);
                    break;
                }
            }
        }
        both
    }

    /// The largest union of threshold sets contained in `self`.
    pub fn interior(&self) -> BoolSeqSet {
        self.chain_closure(0, true)
    }

    pub fn is_well_behaved(&self) -> bool {
        self.interior() == *self
    }

    /// `interior(prune(X, i))`, with the pruning folded into the forward pass.
    pub fn pruned_interior(&self, i: usize) -> Result<BoolSeqSet> {
        self.pruned_interior_impl(i, true)
    }

    /// Like [`pruned_interior`](Self::pruned_interior) but skips the backward
    /// pass; only valid when `self` is well-behaved.
    pub fn pruned_interior_well_behaved(&self, i: usize) -> Result<BoolSeqSet> {
        self.pruned_interior_impl(i, false)
    }

    fn pruned_interior_impl(&self, i: usize, check_backward: bool) -> Result<BoolSeqSet> {
        if i >= self.width() || !self.contains(1 << i) {
            return Err(Error::InvalidArgument(format!(
                "channel {i} is not prunable"
            )));
        }
        self.chain_closure(1 << i, check_backward).prune(i)
    }

    /// `s(X) = 0` test, valid for well-behaved sets only.
    pub fn is_trivially_sortable(&self) -> bool {
        self.len() <= self.width() + 1
    }

    /// Members form a chain under the product order, i.e. a single exchange
    /// pattern sorts them all.
    pub fn is_chain(&self) -> bool {
        let members: Vec<u32> = self.members().collect();
        let mut sorted = members;
        sorted.sort_by_key(|v| v.count_ones());
        sorted
            .windows(2)
            .all(|p| p[0] & p[1] == p[0] && p[0] != p[1])
    }

    /// Packed little-endian bitmap: bit `v` is byte `v >> 3`, bit `v & 7`.
    pub fn to_bytes(&self) -> Vec<u8> {
        let n = self.universe().div_ceil(8);
        let mut out = Vec::with_capacity(n);
        for (k, w) in self.words.iter().enumerate() {
            for (b, byte) in w.to_le_bytes().iter().enumerate() {
                if k * 8 + b < n {
                    out.push(*byte);
                }
            }
        }
        out
    }

    pub fn bitmap_len(width: usize) -> usize {
        (1usize << width).div_ceil(8)
    }

    pub fn from_bytes(width: usize, bytes: &[u8]) -> Result<Self> {
        check_width(width)?;
        if bytes.len() != Self::bitmap_len(width) {
            return Err(Error::InvalidArgument(format!(
                "bitmap for width {width} needs {} bytes, got {}",
                Self::bitmap_len(width),
                bytes.len()
            )));
        }
        let mut set = Self::empty(width)?;
        for (n, &byte) in bytes.iter().enumerate() {
            set.words[n / 8] |= (byte as u64) << ((n % 8) * 8);
        }
        if set.words[0] & !valid_mask(width) != 0 {
            return Err(Error::InvalidArgument(
                "bitmap has bits beyond the code range".into(),
            ));
        }
        Ok(set)
    }
}

impl PartialOrd for BoolSeqSet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Width first, then the bitmap read as an unsigned integer.
impl Ord for BoolSeqSet {
    fn cmp(&self, other: &Self) -> Ordering {
        self.width
            .cmp(&other.width)
            .then_with(|| self.words.iter().rev().cmp(other.words.iter().rev()))
    }
}

pub struct Members<'a> {
    words: &'a [u64],
    index: usize,
    current: u64,
}

impl Iterator for Members<'_> {
    type Item = u32;

    #[inline]
    fn next(&mut self) -> Option<u32> {
        loop {
            if self.current != 0 {
                let bit = self.current.trailing_zeros();
                self.current &= self.current - 1;
                return Some((self.index as u32) * 64 + bit);
            }
            self.index += 1;
            if self.index >= self.words.len() {
                return None;
            }
            self.current = self.words[self.index];
        }
    }
}

fn or_shifted_up(dst: &mut [u64], src: &[u64], d: usize) {
    let q = d / 64;
    let r = d % 64;
    for k in (q..dst.len()).rev() {
        let mut v = src[k - q] << r;
        if r > 0 && k > q {
            v |= src[k - q - 1] >> (64 - r);
        }
        dst[k] |= v;
    }
}

fn or_shifted_down(dst: &mut [u64], src: &[u64], d: usize) {
    let q = d / 64;
    let r = d % 64;
    let n = dst.len();
    for k in 0..n.saturating_sub(q) {
        let mut v = src[k + q] >> r;
        if r > 0 && k + q + 1 < n {
            v |= src[k + q + 1] << (64 - r);
        }
        dst[k] |= v;
    }
}
