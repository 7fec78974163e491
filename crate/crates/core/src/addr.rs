//! 128-bit address and prefix values.
//!
//! Bits are numbered from the most significant end: bit 0 is the top bit of
//! the first group, bit 127 the bottom bit of the last. Prefixes are always
//! kept in masked form, so `(base, len)` equality is prefix equality.

use alloc::string::{String, ToString};
use core::fmt::{self, Write as _};
use core::net::Ipv6Addr;
use core::str::FromStr;

use crate::error::{Error, Result};

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Address(u128);

impl Address {
    pub const UNSPECIFIED: Address = Address(0);

    #[inline]
    pub const fn from_bits(bits: u128) -> Self {
        Address(bits)
    }

    #[inline]
    pub const fn bits(self) -> u128 {
        self.0
    }

    pub const fn from_segments(segments: [u16; 8]) -> Self {
        let mut bits = 0u128;
        let mut i = 0;
        while i < 8 {
            bits = (bits << 16) | segments[i] as u128;
            i += 1;
        }
        Address(bits)
    }

    pub const fn segments(self) -> [u16; 8] {
        let mut out = [0u16; 8];
        let mut i = 0;
        while i < 8 {
            out[i] = (self.0 >> (112 - 16 * i)) as u16;
            i += 1;
        }
        out
    }

    #[inline]
    pub const fn octets(self) -> [u8; 16] {
        self.0.to_be_bytes()
    }

    #[inline]
    pub const fn from_octets(octets: [u8; 16]) -> Self {
        Address(u128::from_be_bytes(octets))
    }

    /// Bit `i` counted from the most significant end. `i` must be below 128.
    #[inline]
    pub const fn bit(self, i: u8) -> u8 {
        debug_assert!(i < 128);
        ((self.0 >> (127 - i as u32)) & 1) as u8
    }

    /// Low 64 bits, the canonical interface identifier.
    #[inline]
    pub const fn iid(self) -> IidView {
        IidView(self.0 as u64)
    }

    /// Length of the longest common prefix shared with `other` (128 when equal).
    #[inline]
    pub const fn common_prefix_len(self, other: Address) -> u8 {
        (self.0 ^ other.0).leading_zeros() as u8
    }

    /// Parses presentation format: full, `::`-compressed, or with a dotted-quad tail.
    /// Zone indices (`%eth0`) are rejected.
    pub fn parse(text: &str) -> Result<Self> {
        Ipv6Addr::from_str(text).map(|a| Address(a.to_bits())).map_err(|_| Error::AddressParse(text.to_string()))
    }

    /// Fixed-width form: 32 lowercase hex digits, most significant nybble first.
    pub fn to_fixed_hex(self) -> String {
        alloc::format!("{:032x}", self.0)
    }

    pub fn from_fixed_hex(text: &str) -> Result<Self> {
        if text.len() != 32 || !text.bytes().all(|b| b.is_ascii_hexdigit()) {
            return Err(Error::AddressParse(text.to_string()));
        }
        u128::from_str_radix(text, 16).map(Address).map_err(|_| Error::AddressParse(text.to_string()))
    }
}

impl FromStr for Address {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Address::parse(s)
    }
}

impl From<Ipv6Addr> for Address {
    fn from(a: Ipv6Addr) -> Self {
        Address(a.to_bits())
    }
}

impl From<Address> for Ipv6Addr {
    fn from(a: Address) -> Self {
        Ipv6Addr::from_bits(a.0)
    }
}

/// Canonical compressed form: lowercase, no leading zeros, the longest run of
/// two or more zero groups replaced by `::` (leftmost run on a tie).
impl fmt::Display for Address {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let groups = self.segments();

        let (mut best_start, mut best_len) = (0usize, 0usize);
        let mut i = 0;
        while i < 8 {
            if groups[i] == 0 {
                let start = i;
                while i < 8 && groups[i] == 0 {
                    i += 1;
                }
                if i - start > best_len {
                    best_start = start;
                    best_len = i - start;
                }
            } else {
                i += 1;
            }
        }

        // Pad through a fixed buffer so width/alignment flags still apply.
        let mut buf = arrayfmt::Buf::new();
        if best_len >= 2 {
            write_groups(&mut buf, &groups[..best_start])?;
            buf.write_str("::")?;
            write_groups(&mut buf, &groups[best_start + best_len..])?;
        } else {
            write_groups(&mut buf, &groups)?;
        }
        f.pad(buf.as_str())
    }
}

fn write_groups(out: &mut impl fmt::Write, groups: &[u16]) -> fmt::Result {
    for (i, g) in groups.iter().enumerate() {
        if i > 0 {
            out.write_char(':')?;
        }
        write!(out, "{g:x}")?;
    }
    Ok(())
}

impl fmt::Debug for Address {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

mod arrayfmt {
    use core::fmt;

    // Longest compressed form is 39 bytes.
    pub struct Buf {
        data: [u8; 40],
        len: usize,
    }

    impl Buf {
        pub fn new() -> Self {
            Buf { data: [0; 40], len: 0 }
        }

        pub fn as_str(&self) -> &str {
            core::str::from_utf8(&self.data[..self.len]).unwrap_or_default()
        }
    }

    impl fmt::Write for Buf {
        fn write_str(&mut self, s: &str) -> fmt::Result {
            let end = self.len + s.len();
            if end > self.data.len() {
                return Err(fmt::Error);
            }
            self.data[self.len..end].copy_from_slice(s.as_bytes());
            self.len = end;
            Ok(())
        }
    }
}

/// The low 64 bits of an address.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct IidView(u64);

impl IidView {
    pub const fn new(low64: u64) -> Self {
        IidView(low64)
    }

    pub const fn value(self) -> u64 {
        self.0
    }

    pub const fn octets(self) -> [u8; 8] {
        self.0.to_be_bytes()
    }
}

#[inline]
pub const fn mask(len: u8) -> u128 {
    if len == 0 {
        0
    } else {
        u128::MAX << (128 - len as u32)
    }
}

/// An address block: a masked base address and a length in `0..=128`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Prefix {
    base: Address,
    len: u8,
}

impl Prefix {
    pub const ALL: Prefix = Prefix { base: Address(0), len: 0 };

    /// Masks `addr` down to `len` bits.
    pub fn new(addr: Address, len: u8) -> Result<Self> {
        if len > 128 {
            return Err(Error::PrefixLength(len as u32));
        }
        Ok(Self::new_unchecked(addr, len))
    }

    #[inline]
    pub(crate) const fn new_unchecked(addr: Address, len: u8) -> Self {
        Prefix { base: Address(addr.0 & mask(len)), len }
    }

    #[inline]
    pub const fn base(self) -> Address {
        self.base
    }

    /// Prefix length in bits.
    #[inline]
    #[allow(clippy::len_without_is_empty)]
    pub const fn len(self) -> u8 {
        self.len
    }

    /// Last address covered by the prefix.
    pub const fn last(self) -> Address {
        Address(self.base.0 | !mask(self.len))
    }

    #[inline]
    pub const fn contains(self, addr: Address) -> bool {
        addr.0 & mask(self.len) == self.base.0
    }

    /// True if `other` lies entirely within `self` (a prefix covers itself).
    #[inline]
    pub const fn covers(self, other: Prefix) -> bool {
        other.len >= self.len && self.contains(other.base)
    }

    /// The enclosing prefix of length `len`, or `None` when `len` is longer than `self`.
    pub fn truncate(self, len: u8) -> Option<Prefix> {
        (len <= self.len).then(|| Prefix::new_unchecked(self.base, len))
    }
}

/// `addr` with every bit at position `len` or beyond cleared, paired with `len`.
pub fn prefix_of(addr: Address, len: u8) -> Result<Prefix> {
    Prefix::new(addr, len)
}

impl fmt::Display for Prefix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.base, self.len)
    }
}

impl fmt::Debug for Prefix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Prefix {
    type Err = Error;

    /// Accepts `<address>/<len>`; host bits below `len` are cleared.
    fn from_str(s: &str) -> Result<Self> {
        let (addr, len) = s.split_once('/').ok_or_else(|| Error::PrefixParse(s.to_string()))?;
        let addr = Address::parse(addr).map_err(|_| Error::PrefixParse(s.to_string()))?;
        let len: u8 = len.parse().map_err(|_| Error::PrefixParse(s.to_string()))?;
        Prefix::new(addr, len)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    fn a(s: &str) -> Address {
        s.parse().unwrap()
    }

    #[test]
    fn parse_expands_compression() {
        assert_eq!(a("2001:db8::1").segments(), [0x2001, 0x0db8, 0, 0, 0, 0, 0, 1]);
        assert_eq!(
            a("2001:db8:0:1cdf:21e:c2ff:fec0:11db").segments(),
            [0x2001, 0x0db8, 0, 0x1cdf, 0x021e, 0xc2ff, 0xfec0, 0x11db]
        );
        assert_eq!(a("2001:DB8::A"), a("2001:db8::a"));
        assert_eq!(a("::ffff:192.0.2.4").bits(), 0xffff_c000_0204);
    }

    #[test]
    fn parse_rejects_malformed() {
        for bad in [
            "2001:db8:::1",
            "2001:db8::1::2",
            "1:2:3:4:5:6:7",
            "1:2:3:4:5:6:7:8:9",
            "2001:db8::g",
            "fe80::1%eth0",
            "",
            "192.0.2.1",
        ] {
            match Address::parse(bad) {
                Err(Error::AddressParse(s)) => assert_eq!(s, bad),
                other => panic!("{bad:?} parsed as {other:?}"),
            }
        }
    }

    #[test]
    fn format_compressed_and_fixed() {
        let x = Address::from_segments([0x2001, 0x0db8, 0, 0, 0, 0, 0, 1]);
        assert_eq!(x.to_string(), "2001:db8::1");
        assert_eq!(x.to_fixed_hex(), "20010db8000000000000000000000001");
        assert_eq!(Address::UNSPECIFIED.to_string(), "::");
        assert_eq!(a("2001:db8:0:1cdf:21e:c2ff:fec0:11db").to_string(), "2001:db8:0:1cdf:21e:c2ff:fec0:11db");
        // leftmost of two equal runs
        assert_eq!(a("1:0:0:2:3:0:0:4").to_string(), "1::2:3:0:0:4");
        // longer run wins over an earlier shorter one
        assert_eq!(a("1:0:0:2:0:0:0:4").to_string(), "1:0:0:2::4");
        assert_eq!(a("::ffff:192.0.2.4").to_string(), "::ffff:c000:204");
        assert_eq!(a("1::").to_string(), "1::");
        assert_eq!(alloc::format!("{:>12}", a("::1")), "         ::1");
    }

    #[test]
    fn fixed_hex_round_trip() {
        let x = a("2001:db8:0:1cdf:21e:c2ff:fec0:11db");
        assert_eq!(Address::from_fixed_hex(&x.to_fixed_hex()).unwrap(), x);
        assert!(Address::from_fixed_hex("2001").is_err());
    }

    #[test]
    fn prefix_of_masks() {
        assert_eq!(prefix_of(a("2001:db8::ffff"), 64).unwrap().to_string(), "2001:db8::/64");
        let p = prefix_of(a("2001:db8::4"), 126).unwrap();
        assert_eq!(p.base(), a("2001:db8::4"));
        assert_eq!(prefix_of(p.base(), 126).unwrap(), p);
        assert_eq!(prefix_of(a("2001:db8::4"), 0).unwrap(), Prefix::ALL);
        assert_eq!(prefix_of(a("::1"), 129), Err(Error::PrefixLength(129)));
    }

    #[test]
    fn containment() {
        let p112: Prefix = "2001:db8::/112".parse().unwrap();
        assert!(p112.contains(a("2001:db8::1")));
        let p126: Prefix = "2001:db8::4/126".parse().unwrap();
        assert!(!p126.contains(a("2001:db8::1")));
        assert!(Prefix::ALL.contains(a("ffff::1")));
        assert!(p112.covers(p126));
        assert!(!p126.covers(p112));
        assert_eq!(p112.last(), a("2001:db8::ffff"));
    }

    #[test]
    fn bit_numbering() {
        let x = Address::from_bits(1u128 << 127);
        assert_eq!(x.bit(0), 1);
        assert_eq!(x.bit(1), 0);
        assert_eq!(Address::from_bits(1).bit(127), 1);
        assert_eq!(a("2001:db8::1").common_prefix_len(a("2001:db8::4")), 125);
        assert_eq!(a("::1").common_prefix_len(a("::1")), 128);
        assert_eq!(a("2001:db8::1:2").iid().value(), 0x1_0002);
    }

    #[test]
    fn prefix_parse_masks_host_bits() {
        let p: Prefix = "2001:db8::ffff/112".parse().unwrap();
        assert_eq!(p.to_string(), "2001:db8::/112");
        assert!("2001:db8::/129".parse::<Prefix>().is_err());
        assert!("2001:db8::".parse::<Prefix>().is_err());
    }
}
