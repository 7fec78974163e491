//! Path-compressed binary radix trie over 128-bit keys, with per-node counts.
//!
//! Leaves are `/128` keys carrying a hit weight. Interior nodes exist only
//! where two keys diverge, plus a permanent `::/0` root. Densification
//! collapses subtrees into the least-specific prefix that meets a
//! [`DensityClass`].

use alloc::string::ToString;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::addr::{Address, Prefix};
use crate::error::{Error, Result};
use crate::set::AddressSet;
use crate::spatial::AggregateCounts;

const NIL: u32 = u32::MAX;
const ROOT: usize = 0;
/// Dense prefixes stop at /127; a /128 holds a single address.
pub const MAX_DENSE_LEN: u8 = 127;

/// `n@/p`: prefixes of length at least `p` holding at least `n` observed addresses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DensityClass {
    n: u64,
    p: u8,
}

impl DensityClass {
    pub fn new(n: u64, p: u8) -> Result<Self> {
        if n == 0 || p > MAX_DENSE_LEN {
            return Err(Error::DensityClassParse(alloc::format!("{n}@/{p}")));
        }
        Ok(DensityClass { n, p })
    }

    pub const fn min_addresses(self) -> u64 {
        self.n
    }

    pub const fn prefix_len(self) -> u8 {
        self.p
    }
}

impl fmt::Display for DensityClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}@/{}", self.n, self.p)
    }
}

impl FromStr for DensityClass {
    type Err = Error;

    /// Accepts `2@/112` and `2@112`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::DensityClassParse(s.to_string());
        let (n, p) = s.trim().split_once('@').ok_or_else(bad)?;
        let p = p.strip_prefix('/').unwrap_or(p);
        let n = n.trim().parse().map_err(|_| bad())?;
        let p = p.trim().parse().map_err(|_| bad())?;
        DensityClass::new(n, p).map_err(|_| bad())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DensePrefix {
    pub prefix: Prefix,
    /// Distinct observed addresses inside `prefix`.
    pub addresses: u64,
}

/// Disjoint dense prefixes in ascending numeric order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DensePrefixReport {
    pub class: DensityClass,
    pub entries: Vec<DensePrefix>,
}

impl DensePrefixReport {
    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn prefixes(&self) -> impl Iterator<Item = Prefix> + '_ {
        self.entries.iter().map(|e| e.prefix)
    }

    pub fn contained_addresses(&self) -> u64 {
        self.entries.iter().map(|e| e.addresses).sum()
    }
}

/// One line per entry: `<prefix>/<len> <count>`.
impl fmt::Display for DensePrefixReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for e in &self.entries {
            writeln!(f, "{} {}", e.prefix, e.addresses)?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
struct Node {
    prefix: Prefix,
    hits: u64,
    /// Distinct addresses held directly: 1 for a leaf, the subtree total once aggregated.
    addresses: u64,
    children: [u32; 2],
    aggregated: bool,
}

impl Node {
    fn new(prefix: Prefix) -> Self {
        Node { prefix, hits: 0, addresses: 0, children: [NIL; 2], aggregated: false }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
struct Totals {
    addresses: u64,
    hits: u64,
}

impl core::ops::AddAssign for Totals {
    fn add_assign(&mut self, rhs: Totals) {
        self.addresses += rhs.addresses;
        self.hits += rhs.hits;
    }
}

/// Node view handed out by traversals.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NodeCounts {
    pub prefix: Prefix,
    pub addresses: u64,
    pub hits: u64,
}

#[derive(Clone, Debug)]
pub struct CountingTrie {
    nodes: Vec<Node>,
    distinct: u64,
    total_hits: u64,
}

impl Default for CountingTrie {
    fn default() -> Self {
        Self::new()
    }
}

impl CountingTrie {
    pub fn new() -> Self {
        CountingTrie { nodes: alloc::vec![Node::new(Prefix::ALL)], distinct: 0, total_hits: 0 }
    }

    pub fn from_addresses<'a>(addrs: impl IntoIterator<Item = &'a Address>) -> Self {
        let mut t = CountingTrie::new();
        for a in addrs {
            t.insert(*a, 1);
        }
        t
    }

    /// Distinct keys inserted so far.
    pub fn distinct(&self) -> u64 {
        self.distinct
    }

    pub fn total_hits(&self) -> u64 {
        self.total_hits
    }

    pub fn is_empty(&self) -> bool {
        self.distinct == 0
    }

    /// Adds `weight` hits for `addr`. Repeated inserts accumulate. A zero
    /// weight still registers the address.
    pub fn insert(&mut self, addr: Address, weight: u64) {
        self.total_hits += weight;
        let mut cur = ROOT;
        loop {
            let node = &self.nodes[cur];
            if node.prefix.len() == 128 {
                self.nodes[cur].hits += weight;
                return;
            }
            let side = addr.bit(node.prefix.len()) as usize;
            let child = node.children[side];
            if child == NIL {
                let leaf = self.push_leaf(addr, weight);
                self.nodes[cur].children[side] = leaf;
                return;
            }
            let child_prefix = self.nodes[child as usize].prefix;
            if child_prefix.contains(addr) {
                cur = child as usize;
                continue;
            }
            // Diverges strictly inside the edge leading to `child`.
            let split_len = addr.common_prefix_len(child_prefix.base());
            let leaf = self.push_leaf(addr, weight);
            let mut branch = Node::new(Prefix::new_unchecked(addr, split_len));
            branch.children[addr.bit(split_len) as usize] = leaf;
            branch.children[child_prefix.base().bit(split_len) as usize] = child;
            let branch_idx = self.push(branch);
            self.nodes[cur].children[side] = branch_idx;
            return;
        }
    }

    fn push_leaf(&mut self, addr: Address, weight: u64) -> u32 {
        self.distinct += 1;
        let mut leaf = Node::new(Prefix::new_unchecked(addr, 128));
        leaf.hits = weight;
        leaf.addresses = 1;
        self.push(leaf)
    }

    fn push(&mut self, node: Node) -> u32 {
        let idx = u32::try_from(self.nodes.len()).expect("trie node index overflow");
        assert!(idx != NIL, "trie node index overflow");
        self.nodes.push(node);
        idx
    }

    fn children(&self, idx: usize) -> impl Iterator<Item = usize> + '_ {
        self.nodes[idx].children.iter().filter(|&&c| c != NIL).map(|&c| c as usize)
    }

    /// Pre-order walk (child 0 before child 1) yielding `(node, parent_len)`;
    /// the root's parent length is -1. Visits nodes in ascending base order.
    fn preorder(&self) -> Vec<(usize, i16)> {
        let mut out = Vec::with_capacity(self.nodes.len());
        let mut stack = alloc::vec![(ROOT, -1i16)];
        while let Some((idx, parent_len)) = stack.pop() {
            out.push((idx, parent_len));
            let node = &self.nodes[idx];
            for &c in node.children.iter().rev() {
                if c != NIL {
                    stack.push((c as usize, node.prefix.len() as i16));
                }
            }
        }
        out
    }

    /// Subtree totals for every reachable node, indexed like `nodes`.
    fn subtree_totals(&self) -> Vec<Totals> {
        let mut totals = alloc::vec![Totals::default(); self.nodes.len()];
        for (idx, _) in self.preorder().into_iter().rev() {
            let node = &self.nodes[idx];
            let mut t = Totals { addresses: node.addresses, hits: node.hits };
            for c in self.children(idx) {
                t += totals[c];
            }
            totals[idx] = t;
        }
        totals
    }

    /// Reachable nodes with their held counts, in ascending prefix order.
    pub fn nodes(&self) -> impl Iterator<Item = NodeCounts> + '_ {
        self.preorder().into_iter().map(move |(idx, _)| {
            let n = &self.nodes[idx];
            NodeCounts { prefix: n.prefix, addresses: n.addresses, hits: n.hits }
        })
    }

    /// `/128` leaves in ascending order.
    pub fn leaves(&self) -> impl Iterator<Item = NodeCounts> + '_ {
        self.nodes().filter(|n| n.prefix.len() == 128)
    }

    /// Active aggregate counts read off the trie shape: a compressed edge from
    /// a node at length `q` to a child at length `l` stands for one distinct
    /// prefix at every length in `q+1..=l`.
    pub fn aggregate_counts(&self) -> Result<AggregateCounts> {
        if self.is_empty() {
            return Err(Error::EmptySet);
        }
        let mut delta = [0i64; 130];
        for (idx, parent_len) in self.preorder() {
            let len = self.nodes[idx].prefix.len() as usize;
            delta[(parent_len + 1) as usize] += 1;
            delta[len + 1] -= 1;
        }
        let mut n = [0u64; 129];
        let mut running = 0i64;
        for (p, slot) in n.iter_mut().enumerate() {
            running += delta[p];
            *slot = running as u64;
        }
        Ok(AggregateCounts::from_counts(n))
    }

    /// Least-specific disjoint prefixes of length `class.p..=127` holding at
    /// least `class.n` distinct addresses. Does not modify the trie.
    pub fn dense_prefixes(&self, class: DensityClass) -> DensePrefixReport {
        let totals = self.subtree_totals();
        let mut entries = Vec::new();
        let mut stack = alloc::vec![(ROOT, -1i16)];
        while let Some((idx, parent_len)) = stack.pop() {
            let node = &self.nodes[idx];
            let t = totals[idx];
            if t.addresses >= class.n {
                if let Some(len) = dense_len(parent_len, node.prefix.len(), class) {
                    entries.push(DensePrefix {
                        prefix: Prefix::new_unchecked(node.prefix.base(), len),
                        addresses: t.addresses,
                    });
                    continue;
                }
            } else {
                // nothing below can reach n either
                continue;
            }
            for &c in node.children.iter().rev() {
                if c != NIL {
                    stack.push((c as usize, node.prefix.len() as i16));
                }
            }
        }
        DensePrefixReport { class, entries }
    }

    /// Aggregating densification. A post-order pass folds each subtree
    /// whose total reaches `class.n` into its node, relabelled to the
    /// shortest admissible length; the dense prefixes are then the
    /// aggregated nodes, read in order.
    pub fn densify(mut self, class: DensityClass) -> Densified {
        self.densify_node(ROOT, -1, class);
        Densified { trie: self, class }
    }

    fn densify_node(&mut self, idx: usize, parent_len: i16, class: DensityClass) -> Totals {
        let node_len = self.nodes[idx].prefix.len();
        let mut t = Totals { addresses: self.nodes[idx].addresses, hits: self.nodes[idx].hits };
        let children = self.nodes[idx].children;
        for c in children.into_iter().filter(|&c| c != NIL) {
            t += self.densify_node(c as usize, node_len as i16, class);
        }
        if t.addresses >= class.n {
            if let Some(len) = dense_len(parent_len, node_len, class) {
                let node = &mut self.nodes[idx];
                node.children = [NIL; 2];
                node.addresses = t.addresses;
                node.hits = t.hits;
                node.prefix = Prefix::new_unchecked(node.prefix.base(), len);
                node.aggregated = true;
            }
        }
        t
    }
}

/// Shortest length in `max(parent+1, p)..=min(node, 127)`, if any. Every
/// length on that edge covers exactly the node's subtree.
fn dense_len(parent_len: i16, node_len: u8, class: DensityClass) -> Option<u8> {
    let lo = ((parent_len + 1) as u8).max(class.p);
    let hi = node_len.min(MAX_DENSE_LEN);
    (lo <= hi).then_some(lo)
}

/// A trie after densification. Sparse regions keep their unaggregated leaves.
#[derive(Clone, Debug)]
pub struct Densified {
    trie: CountingTrie,
    class: DensityClass,
}

impl Densified {
    pub fn class(&self) -> DensityClass {
        self.class
    }

    /// Every node still reachable, aggregated or not.
    pub fn retained(&self) -> impl Iterator<Item = NodeCounts> + '_ {
        self.trie.nodes()
    }

    pub fn report(&self) -> DensePrefixReport {
        let entries = self
            .trie
            .preorder()
            .into_iter()
            .map(|(idx, _)| &self.trie.nodes[idx])
            .filter(|n| n.aggregated && n.addresses >= self.class.n)
            .map(|n| DensePrefix { prefix: n.prefix, addresses: n.addresses })
            .collect();
        DensePrefixReport { class: self.class, entries }
    }
}

/// Exactly the `class.p`-length prefixes holding at least `class.n` addresses.
pub fn dense_fixed_length(addrs: &AddressSet, class: DensityClass) -> DensePrefixReport {
    let mut entries: Vec<DensePrefix> = Vec::new();
    let mut run: Option<DensePrefix> = None;
    for &a in addrs {
        let prefix = Prefix::new_unchecked(a, class.p);
        match run.as_mut() {
            Some(r) if r.prefix == prefix => r.addresses += 1,
            _ => {
                if let Some(r) = run.take() {
                    if r.addresses >= class.n {
                        entries.push(r);
                    }
                }
                run = Some(DensePrefix { prefix, addresses: 1 });
            }
        }
    }
    if let Some(r) = run.filter(|r| r.addresses >= class.n) {
        entries.push(r);
    }
    DensePrefixReport { class, entries }
}

/// Active aggregate counts `n_p` for every `p` in `0..=128`.
pub fn aggregate_counts(addrs: &AddressSet) -> Result<AggregateCounts> {
    AggregateCounts::from_set(addrs)
}
