//! Comparator networks as executable operation lists.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::seqset::{BoolSeq, ChannelPermutation, Comparator, MAX_WIDTH};

/// One network operation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Op {
    /// Minimum to `min`, maximum to `max`.
    Comparator {
        min: u8,
        max: u8,
    },
    Exchange(u8, u8),
}

impl Op {
    pub fn comparator(min: usize, max: usize) -> Op {
        Op::Comparator {
            min: min as u8,
            max: max as u8,
        }
    }

    pub fn exchange(a: usize, b: usize) -> Op {
        Op::Exchange(a as u8, b as u8)
    }

    fn channels(&self) -> (usize, usize) {
        match *self {
            Op::Comparator { min, max } => (min as usize, max as usize),
            Op::Exchange(a, b) => (a as usize, b as usize),
        }
    }

    #[inline]
    fn apply_code(&self, code: u32) -> u32 {
        let (a, b) = self.channels();
        let (va, vb) = ((code >> a) & 1, (code >> b) & 1);
        let swap = match self {
            Op::Comparator { .. } => va > vb,
            Op::Exchange(..) => va != vb,
        };
        if swap {
            code ^ (1 << a) ^ (1 << b)
        } else {
            code
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ComparatorNetwork {
    width: usize,
    ops: Vec<Op>,
}

impl ComparatorNetwork {
    pub fn new(width: usize, ops: Vec<Op>) -> Result<Self> {
        if width == 0 || width > MAX_WIDTH {
            return Err(Error::InvalidArgument(format!(
                "network width {width} out of range"
            )));
        }
        for op in &ops {
            let (a, b) = op.channels();
            if a >= width || b >= width || a == b {
                return Err(Error::InvalidArgument(format!(
                    "operation {op:?} invalid for width {width}"
                )));
            }
        }
        Ok(ComparatorNetwork { width, ops })
    }

    /// A network of standard comparators only.
    pub fn from_comparators(width: usize, comparators: &[Comparator]) -> Result<Self> {
        Self::new(
            width,
            comparators
                .iter()
                .map(|c| Op::comparator(c.i(), c.j()))
                .collect(),
        )
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn ops(&self) -> &[Op] {
        &self.ops
    }

    /// Number of comparator operations.
    pub fn size(&self) -> usize {
        self.ops
            .iter()
            .filter(|op| matches!(op, Op::Comparator { .. }))
            .count()
    }

    pub fn apply_code(&self, code: u32) -> u32 {
        self.ops.iter().fold(code, |v, op| op.apply_code(v))
    }

    pub fn apply(&self, x: BoolSeq) -> Result<BoolSeq> {
        if x.width() != self.width {
            return Err(Error::WidthMismatch {
                expected: self.width,
                found: x.width(),
            });
        }
        BoolSeq::new(self.width, self.apply_code(x.code()))
    }

    /// Sorts every Boolean input.
    pub fn is_sorting_network(&self) -> bool {
        (0..1u32 << self.width)
            .all(|v| crate::seqset::is_sorted_code(self.apply_code(v), self.width))
    }

    /// Same action as `other` on every Boolean input.
    pub fn is_equivalent(&self, other: &ComparatorNetwork) -> bool {
        self.width == other.width
            && (0..1u32 << self.width).all(|v| self.apply_code(v) == other.apply_code(v))
    }

    /// Standard comparators followed only by exchanges.
    pub fn is_standard(&self) -> bool {
        let prefix = self
            .ops
            .iter()
            .take_while(|op| matches!(op, Op::Comparator { min, max } if min < max))
            .count();
        self.ops[prefix..]
            .iter()
            .all(|op| matches!(op, Op::Exchange(..)))
    }

    /// Equivalent network of standard comparators followed by an exchange suffix.
    pub fn standardize(&self) -> ComparatorNetwork {
        // The pending permutation acts after everything emitted so far.
        let mut pending = ChannelPermutation::identity(self.width);
        let mut ops = Vec::with_capacity(self.ops.len());
        for op in &self.ops {
            let inv = pending.inverse();
            match *op {
                Op::Comparator { min, max } => {
                    let (a, b) = (inv.apply(min as usize), inv.apply(max as usize));
                    if a < b {
                        ops.push(Op::comparator(a, b));
                    } else {
                        ops.push(Op::comparator(b, a));
                        let swap = ChannelPermutation::transposition(self.width, a, b)
                            .expect("channels in range");
                        pending = swap.then(&pending);
                    }
                }
                Op::Exchange(a, b) => {
                    let swap =
                        ChannelPermutation::transposition(self.width, a as usize, b as usize)
                            .expect("channels in range");
                    pending = pending.then(&swap);
                }
            }
        }
        ops.extend(exchanges_for(&pending));
        ComparatorNetwork {
            width: self.width,
            ops,
        }
    }

    /// Removes the path followed by a maximal value entering channel `i`.
    ///
    /// Returns the pruned network on `w - 1` channels and the number of
    /// comparators removed.
    pub fn prune(&self, i: usize) -> Result<(ComparatorNetwork, usize)> {
        let w = self.width;
        if i >= w || w < 2 {
            return Err(Error::InvalidArgument(format!(
                "cannot prune channel {i} of a {w}-channel network"
            )));
        }
        // label[c]: the pruned network's wire currently carried on channel c.
        let mut label: Vec<usize> = (0..w)
            .map(|c| if c < i { c } else { c.saturating_sub(1) })
            .collect();
        let mut path = i;
        let mut removed = 0;
        let mut ops = Vec::new();
        for op in &self.ops {
            let (a, b) = op.channels();
            if a != path && b != path {
                ops.push(match op {
                    Op::Comparator { .. } => Op::comparator(label[a], label[b]),
                    Op::Exchange(..) => Op::exchange(label[a], label[b]),
                });
                continue;
            }
            match op {
                Op::Comparator { min, max } => {
                    removed += 1;
                    let (min, max) = (*min as usize, *max as usize);
                    if path == min {
                        label[min] = label[max];
                        path = max;
                    }
                }
                Op::Exchange(..) => {
                    let other = if a == path { b } else { a };
                    label[path] = label[other];
                    path = other;
                }
            }
        }
        if path != w - 1 {
            return Err(Error::Precondition(format!(
                "maximal path from channel {i} ends at {path}, not {}",
                w - 1
            )));
        }
        // Wire label[c] must end on output c.
        let restore = ChannelPermutation::new(label[..w - 1].to_vec())
            .map_err(|e| Error::Internal(e.to_string()))?
            .inverse();
        ops.extend(exchanges_for(&restore));
        Ok((ComparatorNetwork { width: w - 1, ops }, removed))
    }
}

/// Exchanges whose left-to-right composition moves channel `c` to `perm(c)`.
fn exchanges_for(perm: &ChannelPermutation) -> Vec<Op> {
    let w = perm.width();
    let mut pos: Vec<usize> = (0..w).collect();
    let mut at: Vec<usize> = (0..w).collect();
    let mut ops = Vec::new();
    for c in 0..w {
        let target = perm.apply(c);
        let p = pos[c];
        if p != target {
            ops.push(Op::exchange(p.min(target), p.max(target)));
            let other = at[target];
            pos[other] = p;
            at[p] = other;
            pos[c] = target;
            at[target] = c;
        }
    }
    ops
}

impl fmt::Display for ComparatorNetwork {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "width {}", self.width)?;
        for op in &self.ops {
            match op {
                Op::Comparator { min, max } => writeln!(f, "c {min} {max}")?,
                Op::Exchange(a, b) => writeln!(f, "x {a} {b}")?,
            }
        }
        Ok(())
    }
}

impl FromStr for ComparatorNetwork {
    type Err = Error;

    /// Parses `width w` followed by `c i j` / `x i j` lines; `#` starts a comment.
    fn from_str(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(n, l)| (n + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());
        let parse_err = |n: usize, msg: &str| Error::InvalidArgument(format!("line {n}: {msg}"));
        let (n, header) = lines
            .next()
            .ok_or_else(|| Error::InvalidArgument("empty network file".into()))?;
        let width = match header.split_whitespace().collect::<Vec<_>>()[..] {
            ["width", w] => w.parse::<usize>().map_err(|_| parse_err(n, "bad width"))?,
            _ => return Err(parse_err(n, "expected `width <w>`")),
        };
        let mut ops = Vec::new();
        for (n, line) in lines {
            let fields: Vec<&str> = line.split_whitespace().collect();
            let [kind, a, b] = fields[..] else {
                return Err(parse_err(n, "expected `c i j` or `x i j`"));
            };
            let a: usize = a.parse().map_err(|_| parse_err(n, "bad channel"))?;
            let b: usize = b.parse().map_err(|_| parse_err(n, "bad channel"))?;
            if a >= width || b >= width || a == b {
                return Err(parse_err(n, "channel out of range"));
            }
            ops.push(match kind {
                "c" => Op::comparator(a, b),
                "x" => Op::exchange(a, b),
                _ => return Err(parse_err(n, "unknown operation")),
            });
        }
        ComparatorNetwork::new(width, ops)
    }
}
