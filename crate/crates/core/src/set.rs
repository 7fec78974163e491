use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::addr::{mask, Address, Prefix};
use crate::error::{Error, Result};

/// A sorted, deduplicated set of addresses.
///
/// Set algebra is done by linear merges, so combining per-day sets never
/// needs hashing.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct AddressSet(Vec<Address>);

impl AddressSet {
    pub const fn new() -> Self {
        AddressSet(Vec::new())
    }

    pub fn from_unsorted(mut addrs: Vec<Address>) -> Self {
        addrs.sort_unstable();
        addrs.dedup();
        AddressSet(addrs)
    }

    /// Wraps a vector that is already strictly ascending; returns it back otherwise.
    pub fn from_sorted(addrs: Vec<Address>) -> core::result::Result<Self, Vec<Address>> {
        if addrs.windows(2).all(|w| w[0] < w[1]) {
            Ok(AddressSet(addrs))
        } else {
            Err(addrs)
        }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.0.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    #[inline]
    pub fn as_slice(&self) -> &[Address] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<Address> {
        self.0
    }

    pub fn iter(&self) -> core::slice::Iter<'_, Address> {
        self.0.iter()
    }

    pub fn contains(&self, addr: &Address) -> bool {
        self.0.binary_search(addr).is_ok()
    }

    pub fn first(&self) -> Option<Address> {
        self.0.first().copied()
    }

    /// Replaces every address by the base of its `len`-bit prefix.
    pub fn map_prefix(&self, len: u8) -> Result<AddressSet> {
        if len > 128 {
            return Err(Error::PrefixLength(len as u32));
        }
        let m = mask(len);
        let mut out: Vec<Address> = Vec::new();
        for a in &self.0 {
            let base = Address::from_bits(a.bits() & m);
            // masking preserves order, so duplicates are adjacent
            if out.last() != Some(&base) {
                out.push(base);
            }
        }
        Ok(AddressSet(out))
    }

    /// Members contained in `prefix`, as a contiguous slice.
    pub fn within(&self, prefix: Prefix) -> &[Address] {
        let lo = self.0.partition_point(|a| *a < prefix.base());
        let hi = self.0.partition_point(|a| *a <= prefix.last());
        &self.0[lo..hi]
    }

    pub fn union(&self, other: &AddressSet) -> AddressSet {
        let (a, b) = (&self.0, &other.0);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                Ordering::Equal => {
                    out.push(a[i]);
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        AddressSet(out)
    }

    pub fn intersection(&self, other: &AddressSet) -> AddressSet {
        let mut out = Vec::new();
        merge_matches(&self.0, &other.0, |i, _| out.push(self.0[i]));
        AddressSet(out)
    }

    pub fn difference(&self, other: &AddressSet) -> AddressSet {
        let mut keep = alloc::vec![true; self.0.len()];
        merge_matches(&self.0, &other.0, |i, _| keep[i] = false);
        AddressSet(self.0.iter().zip(keep).filter_map(|(a, k)| k.then_some(*a)).collect())
    }
}

/// Calls `hit(i, j)` for every pair with `a[i] == b[j]`; both slices strictly ascending.
pub(crate) fn merge_matches(a: &[Address], b: &[Address], mut hit: impl FnMut(usize, usize)) {
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            Ordering::Less => i += 1,
            Ordering::Greater => j += 1,
            Ordering::Equal => {
                hit(i, j);
                i += 1;
                j += 1;
            }
        }
    }
}

impl FromIterator<Address> for AddressSet {
    fn from_iter<I: IntoIterator<Item = Address>>(iter: I) -> Self {
        AddressSet::from_unsorted(iter.into_iter().collect())
    }
}

impl<'a> IntoIterator for &'a AddressSet {
    type Item = &'a Address;
    type IntoIter = core::slice::Iter<'a, Address>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

impl IntoIterator for AddressSet {
    type Item = Address;
    type IntoIter = alloc::vec::IntoIter<Address>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.into_iter()
    }
}
