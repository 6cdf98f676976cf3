//! Permutations, Kendall tau distance and block edits with swap accounting.
//!
//! Positions are 0-based. A [`Permutation`] keeps both directions of the
//! bijection (`node_at` and `pos_of`) so that either lookup is O(1); block
//! edits touch only the affected span.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Node identifier in `0..n`.
pub type NodeId = usize;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Permutation {
    node_at: Vec<NodeId>,
    pos_of: Vec<usize>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation {
            node_at: (0..n).collect(),
            pos_of: (0..n).collect(),
        }
    }

    /// Builds a permutation from the node sequence in position order.
    pub fn from_order(node_at: Vec<NodeId>) -> Result<Self> {
        let n = node_at.len();
        let mut pos_of = vec![usize::MAX; n];
        for (pos, &v) in node_at.iter().enumerate() {
            if v >= n {
                return Err(Error::InvalidPermutation {
                    n,
                    reason: format!("node {v} out of range"),
                });
            }
            if pos_of[v] != usize::MAX {
                return Err(Error::InvalidPermutation {
                    n,
                    reason: format!("node {v} appears twice"),
                });
            }
            pos_of[v] = pos;
        }
        Ok(Permutation { node_at, pos_of })
    }

    pub fn len(&self) -> usize {
        self.node_at.len()
    }

    pub fn is_empty(&self) -> bool {
        self.node_at.is_empty()
    }

    #[inline]
    pub fn node_at(&self, pos: usize) -> NodeId {
        self.node_at[pos]
    }

    #[inline]
    pub fn pos_of(&self, v: NodeId) -> usize {
        self.pos_of[v]
    }

    pub fn as_slice(&self) -> &[NodeId] {
        &self.node_at
    }

    pub fn positions(&self) -> &[usize] {
        &self.pos_of
    }

    pub fn into_order(self) -> Vec<NodeId> {
        self.node_at
    }

    pub fn reversed(&self) -> Self {
        let mut node_at = self.node_at.clone();
        node_at.reverse();
        let n = node_at.len();
        let pos_of = self.pos_of.iter().map(|&p| n - 1 - p).collect();
        Permutation { node_at, pos_of }
    }

    /// True if `u` is to the left of `v`.
    #[inline]
    pub fn precedes(&self, u: NodeId, v: NodeId) -> bool {
        self.pos_of[u] < self.pos_of[v]
    }

    fn check_block(&self, block: BlockRange) -> Result<()> {
        if block.len == 0 || block.start + block.len > self.len() {
            return Err(Error::BlockOutOfRange {
                start: block.start,
                len: block.len,
                n: self.len(),
            });
        }
        Ok(())
    }

    fn reindex(&mut self, span: std::ops::Range<usize>) {
        for pos in span {
            self.pos_of[self.node_at[pos]] = pos;
        }
    }

    /// Slides `block` so that it starts at `dest_start`; the nodes it jumps
    /// over shift to fill the gap. Returns the number of adjacent swaps.
    pub fn move_block_in_place(&mut self, block: BlockRange, dest_start: usize) -> Result<u64> {
        self.check_block(block)?;
        let n = self.len();
        if dest_start + block.len > n {
            return Err(Error::DestinationOutOfRange {
                dest: dest_start,
                len: block.len,
                n,
            });
        }
        let len = block.len;
        let start = block.start;
        let jumped = if dest_start > start {
            let span = start..dest_start + len;
            self.node_at[span.clone()].rotate_left(len);
            self.reindex(span);
            dest_start - start
        } else if dest_start < start {
            let span = dest_start..start + len;
            self.node_at[span.clone()].rotate_right(len);
            self.reindex(span);
            start - dest_start
        } else {
            0
        };
        Ok((len * jumped) as u64)
    }

    /// Reverses the nodes inside `block`. Returns C(len, 2).
    pub fn reverse_block_in_place(&mut self, block: BlockRange) -> Result<u64> {
        self.check_block(block)?;
        let span = block.start..block.start + block.len;
        self.node_at[span.clone()].reverse();
        self.reindex(span);
        Ok(pairs(block.len as u64))
    }

    /// Overwrites the span starting at `start` with `nodes`, which must be a
    /// rearrangement of the nodes currently there.
    pub(crate) fn write_span(&mut self, start: usize, nodes: &[NodeId]) {
        debug_assert!({
            let mut a = self.node_at[start..start + nodes.len()].to_vec();
            let mut b = nodes.to_vec();
            a.sort_unstable();
            b.sort_unstable();
            a == b
        });
        self.node_at[start..start + nodes.len()].copy_from_slice(nodes);
        self.reindex(start..start + nodes.len());
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Permutation{:?}", self.node_at)
    }
}

/// Space-separated node ids in position order.
impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.node_at.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

impl FromStr for Permutation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let order = s
            .split_whitespace()
            .map(|tok| {
                tok.parse::<NodeId>().map_err(|_| Error::InvalidPermutation {
                    n: 0,
                    reason: format!("bad node id {tok:?}"),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Permutation::from_order(order)
    }
}

/// A contiguous run of positions `[start, start + len)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BlockRange {
    pub start: usize,
    pub len: usize,
}

impl BlockRange {
    pub fn new(start: usize, len: usize) -> Self {
        BlockRange { start, len }
    }

    pub fn end(&self) -> usize {
        self.start + self.len
    }
}

/// C(m, 2).
#[inline]
pub fn pairs(m: u64) -> u64 {
    m * m.saturating_sub(1) / 2
}

fn same_len(p: &Permutation, q: &Permutation) -> Result<()> {
    if p.len() != q.len() {
        return Err(Error::InstanceMismatch {
            expected: p.len(),
            actual: q.len(),
        });
    }
    Ok(())
}

/// Kendall tau distance: the number of node pairs ordered differently in
/// `p` and `q`. Counted as inversions by merge sort in O(n log n).
pub fn kendall_tau(p: &Permutation, q: &Permutation) -> Result<u64> {
    same_len(p, q)?;
    let mut seq: Vec<usize> = p.node_at.iter().map(|&v| q.pos_of[v]).collect();
    Ok(count_inversions(&mut seq))
}

/// Number of pairs `(i, j)` with `i < j` and `seq[i] > seq[j]`. Sorts `seq`.
pub fn count_inversions<T: Copy + Ord>(seq: &mut [T]) -> u64 {
    let mut buf = seq.to_vec();
    merge_count(seq, &mut buf)
}

fn merge_count<T: Copy + Ord>(seq: &mut [T], buf: &mut [T]) -> u64 {
    let n = seq.len();
    if n < 2 {
        return 0;
    }
    let mid = n / 2;
    let mut inv = {
        let (lo, hi) = seq.split_at_mut(mid);
        let (blo, bhi) = buf.split_at_mut(mid);
        merge_count(lo, blo) + merge_count(hi, bhi)
    };
    let (mut i, mut j, mut k) = (0, mid, 0);
    while i < mid && j < n {
        if seq[j] < seq[i] {
            inv += (mid - i) as u64;
            buf[k] = seq[j];
            j += 1;
        } else {
            buf[k] = seq[i];
            i += 1;
        }
        k += 1;
    }
    buf[k..k + mid - i].copy_from_slice(&seq[i..mid]);
    k += mid - i;
    buf[k..k + n - j].copy_from_slice(&seq[j..n]);
    seq.copy_from_slice(&buf[..n]);
    inv
}

/// `|L_p \ L_q|`: ordered pairs `(x, y)` with `x` left of `y` in `p` but
/// right of it in `q`. Counted with a Fenwick tree over `q` positions.
pub fn ordered_pairs_diff(p: &Permutation, q: &Permutation) -> Result<u64> {
    same_len(p, q)?;
    let n = p.len();
    let mut tree = vec![0u64; n + 1];
    let mut total = 0u64;
    for (seen, &v) in p.node_at.iter().enumerate() {
        let qpos = q.pos_of[v];
        // earlier nodes of p with a smaller q position agree with p
        let mut agree = 0u64;
        let mut i = qpos;
        while i > 0 {
            agree += tree[i];
            i &= i - 1;
        }
        total += seen as u64 - agree;
        let mut i = qpos + 1;
        while i <= n {
            tree[i] += 1;
            i += i & i.wrapping_neg();
        }
    }
    Ok(total)
}

/// Pure form of [`Permutation::move_block_in_place`].
pub fn move_block(p: &Permutation, block: BlockRange, dest_start: usize) -> Result<(Permutation, u64)> {
    let mut out = p.clone();
    let cost = out.move_block_in_place(block, dest_start)?;
    Ok((out, cost))
}

/// Pure form of [`Permutation::reverse_block_in_place`].
pub fn reverse_block(p: &Permutation, block: BlockRange) -> Result<(Permutation, u64)> {
    let mut out = p.clone();
    let cost = out.reverse_block_in_place(block)?;
    Ok((out, cost))
}
