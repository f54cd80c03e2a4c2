//! Interval markets over huge ordered outcome spaces.
//!
//! Outcomes are `0..N` with N up to 10^9 or more, so the share vector is
//! never materialized. The tree stores one node per elementary interval
//! (maximal run of outcomes with equal share count): `key` is the interval's
//! first outcome, and the interval runs to `next_key` exclusive. Each node is
//! augmented with the subtree's maximum value and the number of atomic
//! outcomes attaining it, plus a pending lazy increment that applies to the
//! node itself and its whole subtree.
//!
//! Balancing is a treap whose priorities are a hash of the key, so the shape
//! is a pure function of the key set; split and merge are the primitives and
//! every public operation is split-update-merge.
//!
//! The leading run `[0, first_key)` is kept implicit. Nothing is ever
//! purchased below the smallest key (a purchase starting there would have
//! created that key), so its value is pinned at zero and it can only matter
//! for max queries while the whole tree is still at zero.

use crate::approx::{CostOracle, MaxStats};
use rand::{Rng, RngCore};
use crate::error::{Error, Result};

type Link = Option<Box<Node>>;

struct Node {
    key: u64,
    /// Start of the successor elementary interval; this node covers
    /// `[key, next_key)`. The rightmost node's next_key is N.
    next_key: u64,
    value: u64,
    priority: u64,
    /// Pending increment for this node's value and its entire subtree.
    lazy_add: u64,
    max_val: u64,
    max_count: u64,
    left: Link,
    right: Link,
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

impl Node {
    fn new(key: u64, next_key: u64, value: u64, seed: u64) -> Box<Node> {
        debug_assert!(key < next_key);
        Box::new(Node {
            key,
            next_key,
            value,
            priority: splitmix64(key ^ seed),
            lazy_add: 0,
            max_val: value,
            max_count: next_key - key,
            left: None,
            right: None,
        })
    }

    fn len(&self) -> u64 {
        self.next_key - self.key
    }

    /// Recompute max_val/max_count from own interval and children. A
    /// child's pending lazy is added on read; this node's own lazy shifts
    /// the whole subtree uniformly and so never enters the comparison.
    fn update(&mut self) {
        let mut max_val = self.value;
        let mut max_count = self.len();
        for child in [&self.left, &self.right] {
            if let Some(c) = child {
                let cv = c.max_val + c.lazy_add;
                if cv > max_val {
                    max_val = cv;
                    max_count = c.max_count;
                } else if cv == max_val {
                    max_count += c.max_count;
                }
            }
        }
        self.max_val = max_val;
        self.max_count = max_count;
    }

    /// Apply the pending lazy to this node and hand it to the children.
    fn push_down(&mut self) {
        if self.lazy_add == 0 {
            return;
        }
        self.value += self.lazy_add;
        self.max_val += self.lazy_add;
        if let Some(c) = self.left.as_mut() {
            c.lazy_add += self.lazy_add;
        }
        if let Some(c) = self.right.as_mut() {
            c.lazy_add += self.lazy_add;
        }
        self.lazy_add = 0;
    }
}

/// Split into keys < at and keys >= at.
fn split(node: Link, at: u64, visits: &mut u64) -> (Link, Link) {
    match node {
        None => (None, None),
        Some(mut b) => {
            *visits += 1;
            b.push_down();
            if b.key < at {
                let (l, r) = split(b.right.take(), at, visits);
                b.right = l;
                b.update();
                (Some(b), r)
            } else {
                let (l, r) = split(b.left.take(), at, visits);
                b.left = r;
                b.update();
                (l, Some(b))
            }
        }
    }
}

/// Merge two trees where every key in `a` precedes every key in `b`.
fn merge(a: Link, b: Link, visits: &mut u64) -> Link {
    match (a, b) {
        (None, x) | (x, None) => x,
        (Some(mut l), Some(mut r)) => {
            *visits += 1;
            if l.priority >= r.priority {
                l.push_down();
                l.right = merge(l.right.take(), Some(r), visits);
                l.update();
                Some(l)
            } else {
                r.push_down();
                r.left = merge(Some(l), r.left.take(), visits);
                r.update();
                Some(r)
            }
        }
    }
}

fn min_key(node: &Link, visits: &mut u64) -> Option<u64> {
    let mut cur = node;
    let mut best = None;
    while let Some(n) = cur {
        *visits += 1;
        best = Some(n.key);
        cur = &n.left;
    }
    best
}

/// Truncate the rightmost node's interval to end at `new_next`, fixing the
/// augmented data back up the spine; returns that node's resolved value.
fn clip_rightmost(node: &mut Box<Node>, new_next: u64, visits: &mut u64) -> u64 {
    *visits += 1;
    node.push_down();
    let value = match node.right.as_mut() {
        Some(right) => clip_rightmost(right, new_next, visits),
        None => {
            node.next_key = new_next;
            node.value
        }
    };
    node.update();
    value
}

/// Share counts over `[0, N)`, one node per elementary interval.
pub struct IntervalTree {
    root: Link,
    n: u64,
    seed: u64,
    first_key: u64,
    node_count: u64,
    purchases: u64,
    visits: u64,
}

impl IntervalTree {
    pub fn new(n: u64) -> Result<Self> {
        Self::with_seed(n, 0x5eed_c1de_0ddb_a11)
    }

    pub fn with_seed(n: u64, seed: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidMarket("outcome count N must be positive".into()));
        }
        Ok(IntervalTree {
            root: None,
            n,
            seed,
            first_key: n,
            node_count: 0,
            purchases: 0,
            visits: 0,
        })
    }

    pub fn n_outcomes(&self) -> u64 {
        self.n
    }

    /// Number of distinct elementary-interval endpoints (tree nodes).
    pub fn node_count(&self) -> u64 {
        self.node_count
    }

    pub fn purchases(&self) -> u64 {
        self.purchases
    }

    /// Cumulative node visits across splits, merges and spine walks.
    pub fn visits(&self) -> u64 {
        self.visits
    }

    /// Insert `key` as an elementary-interval start if absent. The new node
    /// inherits the predecessor interval's value (zero below the first key)
    /// and the predecessor is truncated to end at `key`.
    fn ensure_endpoint(&mut self, key: u64) {
        debug_assert!(key < self.n);
        let (left, right) = split(self.root.take(), key, &mut self.visits);
        if min_key(&right, &mut self.visits) == Some(key) {
            self.root = merge(left, right, &mut self.visits);
            return;
        }
        let next = min_key(&right, &mut self.visits).unwrap_or(self.n);
        let mut left = left;
        let inherited = match left.as_mut() {
            Some(node) => clip_rightmost(node, key, &mut self.visits),
            None => 0,
        };
        let fresh = Node::new(key, next, inherited, self.seed);
        self.node_count += 1;
        self.first_key = self.first_key.min(key);
        let merged = merge(left, Some(fresh), &mut self.visits);
        self.root = merge(merged, right, &mut self.visits);
    }

    /// Add `val` shares to every outcome in `[lo, hi]`.
    pub fn purchase(&mut self, lo: u64, hi: u64, val: u64) -> Result<()> {
        if lo > hi || hi >= self.n {
            return Err(Error::IntervalOutOfRange { lo, hi, n_outcomes: self.n });
        }
        if val == 0 {
            return Err(Error::InvalidParameter("purchase quantity must be >= 1".into()));
        }
        self.ensure_endpoint(lo);
        if hi + 1 < self.n {
            self.ensure_endpoint(hi + 1);
        }
        let (a, bc) = split(self.root.take(), lo, &mut self.visits);
        let (mut b, c) = split(bc, hi + 1, &mut self.visits);
        b.as_mut().expect("purchase range holds at least the lo endpoint").lazy_add += val;
        self.root = merge(a, merge(b, c, &mut self.visits), &mut self.visits);
        self.purchases += 1;
        #[cfg(debug_assertions)]
        self.assert_balanced();
        Ok(())
    }

    /// (q_max, s_qmax) over the whole universe, O(1).
    pub fn max_stats(&self) -> MaxStats {
        match &self.root {
            None => MaxStats { q_max: 0, s_qmax: self.n },
            Some(r) => {
                let q_max = r.max_val + r.lazy_add;
                let mut s_qmax = r.max_count;
                if q_max == 0 {
                    s_qmax += self.first_key;
                }
                MaxStats { q_max, s_qmax }
            }
        }
    }

    /// Share count of a single outcome: root-to-leaf descent accumulating
    /// pending lazies, no mutation.
    pub fn value_at(&self, index: u64) -> Result<u64> {
        if index >= self.n {
            return Err(Error::OutcomeOutOfRange { index, n_outcomes: self.n });
        }
        let mut acc = 0u64;
        let mut best = None;
        let mut cur = &self.root;
        while let Some(node) = cur {
            acc += node.lazy_add;
            if node.key <= index {
                best = Some(node.value + acc);
                cur = &node.right;
            } else {
                cur = &node.left;
            }
        }
        Ok(best.unwrap_or(0))
    }

    /// Elementary intervals as (start, value), ascending, lazies resolved.
    pub fn to_entries(&self) -> Vec<(u64, u64)> {
        fn collect(node: &Link, acc: u64, out: &mut Vec<(u64, u64)>) {
            if let Some(n) = node {
                let acc = acc + n.lazy_add;
                collect(&n.left, acc, out);
                out.push((n.key, n.value + acc));
                collect(&n.right, acc, out);
            }
        }
        let mut out = Vec::with_capacity(self.node_count as usize);
        collect(&self.root, 0, &mut out);
        out
    }

    /// Rebuild from `to_entries` output.
    pub fn from_entries(n: u64, entries: &[(u64, u64)]) -> Result<Self> {
        let mut tree = Self::new(n)?;
        let mut prev: Option<u64> = None;
        for &(key, _) in entries {
            if key >= n {
                return Err(Error::OutcomeOutOfRange { index: key, n_outcomes: n });
            }
            if prev.is_some_and(|p| p >= key) {
                return Err(Error::Parse(format!(
                    "interval keys must be strictly increasing, got {key} after {prev:?}"
                )));
            }
            prev = Some(key);
        }
        for (i, &(key, value)) in entries.iter().enumerate() {
            let next = entries.get(i + 1).map_or(n, |&(k, _)| k);
            let node = Node::new(key, next, value, tree.seed);
            tree.node_count += 1;
            tree.first_key = tree.first_key.min(key);
            tree.root = merge(tree.root.take(), Some(node), &mut tree.visits);
        }
        // Nodes normally arrive two per purchase; a rebuilt tree keeps the
        // k <= 2U accounting conservative.
        tree.purchases = tree.node_count;
        Ok(tree)
    }

    #[cfg(debug_assertions)]
    fn assert_balanced(&self) {
        fn height(node: &Link) -> u64 {
            node.as_ref().map_or(0, |n| 1 + height(&n.left).max(height(&n.right)))
        }
        let k = self.node_count;
        let limit = 12.0 + 7.0 * ((k + 1) as f64).ln();
        let h = height(&self.root);
        assert!(
            (h as f64) <= limit,
            "treap degenerated: height {h} over {k} nodes (limit {limit:.1})"
        );
    }
}

/// The tree is exactly what the sampled solver needs: O(1) max stats and
/// O(log k) point lookups for uniform outcome draws.
impl CostOracle for IntervalTree {
    fn n_outcomes(&self) -> u64 {
        self.n
    }

    fn max_stats(&self) -> MaxStats {
        IntervalTree::max_stats(self)
    }

    fn sample_outcome(&self, rng: &mut dyn RngCore) -> (u64, u64) {
        let index = rng.gen_range(0..self.n);
        let value = self.value_at(index).expect("sampled index is in range");
        (index, value)
    }
}
