//! Huffman's algorithm over the algebra `(ℕ, ≤, a ⋆ b = 1 + max(a, b))`.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

/// The combining operation of the algebra.
#[inline]
pub fn star(a: u32, b: u32) -> u32 {
    1 + a.max(b)
}

/// Minimal root label over all full binary trees with leaf labels `leaves`.
pub fn huffman_min(leaves: &[u32]) -> Result<u32> {
    if leaves.is_empty() {
        return Err(Error::InvalidArgument("empty leaf multiset".into()));
    }
    let mut heap: BinaryHeap<Reverse<u32>> = leaves.iter().map(|&v| Reverse(v)).collect();
    while heap.len() > 1 {
        let Reverse(a) = heap.pop().unwrap();
        let Reverse(b) = heap.pop().unwrap();
        heap.push(Reverse(star(a, b)));
    }
    Ok(heap.pop().unwrap().0)
}

/// Largest multiset accepted by [`huffman_min_bruteforce`].
pub const BRUTEFORCE_LIMIT: usize = 8;

/// Tries every full binary tree over every leaf order.
pub fn huffman_min_bruteforce(leaves: &[u32]) -> Result<u32> {
    if leaves.is_empty() {
        return Err(Error::InvalidArgument("empty leaf multiset".into()));
    }
    if leaves.len() > BRUTEFORCE_LIMIT {
        return Err(Error::InvalidArgument(format!(
            "brute force is limited to {BRUTEFORCE_LIMIT} leaves"
        )));
    }
    Ok(merge_all(leaves))
}

// Every full binary tree arises from some sequence of pairwise merges, so
// minimizing over all merge orders covers all trees and leaf permutations.
fn merge_all(values: &[u32]) -> u32 {
    if values.len() == 1 {
        return values[0];
    }
    let mut best = u32::MAX;
    for a in 0..values.len() {
        for b in a + 1..values.len() {
            let (va, vb) = (values[a], values[b]);
            let mut next: Vec<u32> = values
                .iter()
                .enumerate()
                .filter(|&(k, _)| k != a && k != b)
                .map(|(_, &v)| v)
                .collect();
            next.push(star(va, vb));
            best = best.min(merge_all(&next));
        }
    }
    best
}

/// `⌈log₂ n⌉` for `n ≥ 1`.
pub fn ceil_log2(n: u32) -> u32 {
    assert!(n > 0);
    32 - (n - 1).leading_zeros()
}
