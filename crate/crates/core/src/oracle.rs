//! Slow, obviously-correct reference implementations for tests.

use std::collections::HashMap;

use crate::certificate::{Certificate, PremiseKind, Rule};
use crate::seqset::{BoolSeqSet, ChannelPermutation};

/// Every permutation of `width` channels.
pub fn all_permutations(width: usize) -> Vec<ChannelPermutation> {
    fn extend(prefix: &mut Vec<usize>, used: u32, width: usize, out: &mut Vec<ChannelPermutation>) {
        if prefix.len() == width {
            out.push(ChannelPermutation::new(prefix.clone()).unwrap());
            return;
        }
        for c in 0..width {
            if used & (1 << c) == 0 {
                prefix.push(c);
                extend(prefix, used | (1 << c), width, out);
                prefix.pop();
            }
        }
    }
    let mut out = Vec::new();
    extend(&mut Vec::new(), 0, width, &mut out);
    out
}

/// Least bitmap over all `2 · w!` transforms.
pub fn brute_force_canonical(x: &BoolSeqSet) -> BoolSeqSet {
    assert!(x.width() <= 7, "brute force limited to small widths");
    all_permutations(x.width())
        .iter()
        .flat_map(|p| [false, true].map(|b| x.transform(p, b).unwrap()))
        .min()
        .unwrap()
}

/// Threshold set of a ranking: `ranks[c]` is the rank (1-based) of channel
/// `c`; member `k` has ones exactly on channels of rank above `w - k`.
pub fn threshold_set(ranks: &[usize]) -> BoolSeqSet {
    let w = ranks.len();
    let mut set = BoolSeqSet::empty(w).unwrap();
    for k in 0..=w {
        let code = ranks
            .iter()
            .enumerate()
            .filter(|&(_, &r)| r > w - k)
            .fold(0u32, |acc, (c, _)| acc | (1 << c));
        set.insert(code);
    }
    set
}

/// Union of every threshold set contained in `x`.
pub fn interior_by_thresholds(x: &BoolSeqSet) -> BoolSeqSet {
    let w = x.width();
    let mut out = BoolSeqSet::empty(w).unwrap();
    for p in all_permutations(w) {
        let ranks: Vec<usize> = p.images().map(|r| r + 1).collect();
        let t = threshold_set(&ranks);
        if t.is_subset(x) {
            for v in t.members() {
                out.insert(v);
            }
        }
    }
    out
}

/// Exact `s(X)` for an arbitrary small set: zero when the members form a
/// chain (a permutation sorts them), otherwise one more than the best
/// non-redundant successor.
#[derive(Default)]
pub struct ExactSize {
    memo: HashMap<BoolSeqSet, u32>,
}

impl ExactSize {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn size(&mut self, x: &BoolSeqSet) -> u32 {
        assert!(x.width() <= 5, "exhaustive size limited to small widths");
        if let Some(&s) = self.memo.get(x) {
            return s;
        }
        let s = if x.is_chain() {
            0
        } else {
            let succ = x.successors();
            1 + succ
                .iter()
                .map(|(_, y)| self.size(y))
                .min()
                .expect("a set that is not a chain has a non-redundant comparator")
        };
        self.memo.insert(x.clone(), s);
        s
    }
}

pub fn exact_size(x: &BoolSeqSet) -> u32 {
    ExactSize::new().size(x)
}

/// One single-field mutation of `cert`, chosen by the random word `r`.
pub fn mutate_certificate(cert: &Certificate, mut r: u64) -> Certificate {
    let mut next = |m: usize| -> usize {
        let v = (r % m.max(1) as u64) as usize;
        r = r.rotate_right(17).wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ (r >> 29);
        v
    };
    let mut out = cert.clone();
    if out.steps.is_empty() {
        out.n = out.n.wrapping_add(1);
        return out;
    }
    let s = next(out.steps.len());
    let kind = next(12);
    let step = &mut out.steps[s];
    let width = step.subject.width();
    match kind {
        0 => {
            let code = next(step.subject.universe()) as u32;
            if step.subject.contains(code) {
                step.subject.remove(code);
            } else {
                step.subject.insert(code);
            }
        }
        1 => step.bound += 1 + next(3) as u32,
        2 => {
            step.rule = match (step.rule, next(3)) {
                (Rule::Triv, 0) | (Rule::Succ, 1) | (Rule::Huffman, 1) => Rule::Ph,
                (Rule::Triv, 1) | (Rule::Ph, 0) | (Rule::Huffman, 0) => Rule::Succ,
                (Rule::Triv, _) | (Rule::Ph, 1) | (Rule::Succ, 0) => Rule::Huffman,
                _ => Rule::Triv,
            }
        }
        3 => step.negate = !step.negate,
        _ if step.premises.is_empty() => step.bound += 1,
        4 => {
            let p = next(step.premises.len());
            let d = &mut step.premises[p].discriminator;
            if next(2) == 0 {
                d.0 = next(width.max(1)) as u8;
            } else {
                d.1 = next(width.max(1)) as u8;
            }
        }
        5 => {
            let p = next(step.premises.len());
            step.premises[p].kind = match step.premises[p].kind {
                PremiseKind::InlineTriv => PremiseKind::InlinePh,
                PremiseKind::InlinePh if s > 0 => {
                    let target = next(s);
                    let w = cert.steps[target].subject.width();
                    PremiseKind::StepRef {
                        index: target as u64,
                        negate: next(2) == 1,
                        perm: ChannelPermutation::identity(w),
                    }
                }
                _ => PremiseKind::InlinePh,
            };
        }
        6..=8 => {
            let p = next(step.premises.len());
            if let PremiseKind::StepRef {
                index,
                negate,
                perm,
            } = &mut step.premises[p].kind
            {
                match kind {
                    6 => *index = next(cert.steps.len()) as u64,
                    7 => *negate = !*negate,
                    _ => {
                        let w = perm.width();
                        let a = next(w);
                        let b = (a + 1 + next(w.max(2) - 1)) % w.max(1);
                        if a != b {
                            let swap = ChannelPermutation::transposition(w, a, b).unwrap();
                            *perm = perm.then(&swap);
                        }
                    }
                }
            } else {
                step.premises[p].kind = PremiseKind::InlinePh;
            }
        }
        9 => {
            let p = next(step.premises.len());
            step.premises.remove(p);
        }
        10 => {
            let p = next(step.premises.len());
            let dup = step.premises[p].clone();
            step.premises.push(dup);
        }
        _ => {
            out.steps.truncate(s.max(1));
        }
    }
    out
}
